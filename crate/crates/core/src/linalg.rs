//! Dense complex/real matrix helpers shared by every module.
//!
//! Real `2m`-dimensional vectors are laid out as `(Re v, Im v)`, so the
//! complex structure is `J = [[0, -I], [I, 0]]` and a complex matrix
//! `a = x + i y` realifies to `[[x, -y], [y, x]]`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;
pub type CVec = DVector<C64>;
pub type RVec = DVector<f64>;

pub const IM: C64 = Complex { re: 0.0, im: 1.0 };
pub const ONE: C64 = Complex { re: 1.0, im: 0.0 };
pub const ZERO: C64 = Complex { re: 0.0, im: 0.0 };

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn j_matrix(m: usize) -> RMat {
    let mut j = RMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        j[(m + i, i)] = 1.0;
        j[(i, m + i)] = -1.0;
    }
    j
}

pub fn realify(a: &CMat) -> RMat {
    let m = a.nrows();
    assert_eq!(m, a.ncols());
    let mut r = RMat::zeros(2 * m, 2 * m);
    for i in 0..m {
        for k in 0..m {
            let z = a[(i, k)];
            r[(i, k)] = z.re;
            r[(i, m + k)] = -z.im;
            r[(m + i, k)] = z.im;
            r[(m + i, m + k)] = z.re;
        }
    }
    r
}

/// Complex-linear part of a real `2m x 2m` matrix, `A + iB` read off the left
/// column blocks. Exact inverse of [`realify`] on matrices commuting with `J`.
pub fn complexify_unchecked(r: &RMat) -> CMat {
    let n = r.nrows();
    assert!(n % 2 == 0 && n == r.ncols());
    let m = n / 2;
    CMat::from_fn(m, m, |i, k| c64(r[(i, k)], r[(m + i, k)]))
}

/// `[r, J]` max-abs residual.
pub fn j_commutator_residual(r: &RMat) -> f64 {
    let j = j_matrix(r.nrows() / 2);
    max_abs_r(&(r * &j - &j * r))
}

pub fn real_vec_to_complex(v: &RVec) -> CVec {
    let m = v.len() / 2;
    CVec::from_fn(m, |i, _| c64(v[i], v[m + i]))
}

pub fn complex_vec_to_real(v: &CVec) -> RVec {
    let m = v.len();
    RVec::from_fn(2 * m, |i, _| if i < m { v[i].re } else { v[i - m].im })
}

pub fn max_abs_c(a: &CMat) -> f64 {
    a.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_r(a: &RMat) -> f64 {
    a.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub fn frobenius_c(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn hermitian_residual(a: &CMat) -> f64 {
    max_abs_c(&(a - a.adjoint()))
}

pub fn skew_hermitian_residual(a: &CMat) -> f64 {
    max_abs_c(&(a + a.adjoint()))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn commutator_r(a: &RMat, b: &RMat) -> RMat {
    a * b - b * a
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

pub fn symmetric_eigen(s: &RMat) -> (Vec<f64>, RMat) {
    let sym = (s + s.transpose()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let n = s.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = RMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// `h^power` for a Hermitian positive-definite `h`.
pub fn hermitian_power(h: &CMat, power: f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(h);
    let d = CMat::from_diagonal(&CVec::from_iterator(vals.len(), vals.iter().map(|&v| c64(v.powf(power), 0.0))));
    &vecs * d * vecs.adjoint()
}

/// Singular-value rank threshold: `sigma > max(rel * sigma_max, abs)`.
#[derive(Debug, Clone, Copy)]
pub struct RankTol {
    pub rel: f64,
    pub abs: f64,
}

impl RankTol {
    pub const EXACT: RankTol = RankTol { rel: 1e-8, abs: 1e-12 };

    pub fn cutoff(&self, sigma_max: f64) -> f64 {
        (self.rel * sigma_max).max(self.abs)
    }
}

fn sorted_svd_r(a: &RMat) -> (Vec<f64>, RMat) {
    // pad to at least square so that v_t spans the full column space
    let (r, c) = a.shape();
    let padded = if r < c {
        let mut p = RMat::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let sv = order.iter().map(|&i| svd.singular_values[i]).collect();
    let vt_sorted = RMat::from_fn(k, c, |i, j| vt[(order[i], j)]);
    (sv, vt_sorted)
}

fn sorted_svd_c(a: &CMat) -> (Vec<f64>, CMat) {
    let (r, c) = a.shape();
    let padded = if r < c {
        let mut p = CMat::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let sv = order.iter().map(|&i| svd.singular_values[i]).collect();
    let vt_sorted = CMat::from_fn(k, c, |i, j| vt[(order[i], j)]);
    (sv, vt_sorted)
}

/// Null space of a complex matrix; returns an orthonormal basis as columns.
pub fn null_space_c(a: &CMat, tol: RankTol) -> CMat {
    let c = a.ncols();
    if a.nrows() == 0 {
        return CMat::identity(c, c);
    }
    let (sv, vt) = sorted_svd_c(a);
    let cut = tol.cutoff(sv.first().copied().unwrap_or(0.0));
    let rank = sv.iter().filter(|&&s| s > cut).count();
    let cols: Vec<CVec> = (rank..c).map(|i| vt.row(i).adjoint()).collect();
    if cols.is_empty() {
        CMat::zeros(c, 0)
    } else {
        CMat::from_columns(&cols)
    }
}

pub fn null_space_r(a: &RMat, tol: RankTol) -> RMat {
    let c = a.ncols();
    if a.nrows() == 0 {
        return RMat::identity(c, c);
    }
    let (sv, vt) = sorted_svd_r(a);
    let cut = tol.cutoff(sv.first().copied().unwrap_or(0.0));
    let rank = sv.iter().filter(|&&s| s > cut).count();
    let cols: Vec<RVec> = (rank..c).map(|i| vt.row(i).transpose()).collect();
    if cols.is_empty() {
        RMat::zeros(c, 0)
    } else {
        RMat::from_columns(&cols)
    }
}

/// Orthonormal basis (as rows) of the row space of `rows`.
#[derive(Debug, Clone)]
pub struct RowBasis {
    pub rows: RMat,
    /// Smallest retained singular value (0 when the span is empty).
    pub smallest_retained: f64,
    pub largest: f64,
}

pub fn row_basis(rows: &RMat, tol: RankTol) -> RowBasis {
    let c = rows.ncols();
    if rows.nrows() == 0 {
        return RowBasis { rows: RMat::zeros(0, c), smallest_retained: 0.0, largest: 0.0 };
    }
    let (sv, vt) = sorted_svd_r(rows);
    let largest = sv.first().copied().unwrap_or(0.0);
    let cut = tol.cutoff(largest);
    let rank = sv.iter().filter(|&&s| s > cut).count();
    RowBasis { rows: vt.rows(0, rank).into_owned(), smallest_retained: if rank > 0 { sv[rank - 1] } else { 0.0 }, largest }
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) / 2f64.sqrt()
}

pub fn random_complex_matrix<R: Rng + ?Sized>(r: usize, c: usize, rng: &mut R) -> CMat {
    CMat::from_fn(r, c, |_, _| complex_gaussian(rng))
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix with phase fix.
pub fn random_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CMat {
    let z = random_complex_matrix(m, m, rng);
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..m {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_special_unitary<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CMat {
    let u = random_unitary(m, rng);
    let det = u.determinant();
    let fix = det.powf(-1.0 / m as f64);
    u * fix
}

pub fn random_hermitian<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CMat {
    let z = random_complex_matrix(m, m, rng);
    (&z + z.adjoint()).scale(0.5)
}

pub fn random_skew_hermitian<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CMat {
    let z = random_complex_matrix(m, m, rng);
    (&z - z.adjoint()).scale(0.5)
}

/// Random Hermitian positive-definite matrix with eigenvalues in `[0.5, 2.5]`.
pub fn random_pd_hermitian<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CMat {
    let u = random_unitary(m, rng);
    let d = CMat::from_diagonal(&CVec::from_fn(m, |_, _| c64(0.5 + 2.0 * rng.random::<f64>(), 0.0)));
    &u * d * u.adjoint()
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Matrix of `p x p` minors of `a` (rows and columns indexed by
/// lexicographic `p`-subsets); the matrix of `∧^p a`.
pub fn compound_matrix(a: &CMat, p: usize) -> CMat {
    let rows = subsets(a.nrows(), p);
    let cols = subsets(a.ncols(), p);
    CMat::from_fn(rows.len(), cols.len(), |r, c| minor_det(a, &rows[r], &cols[c]))
}

pub fn minor_det(a: &CMat, rows: &[usize], cols: &[usize]) -> C64 {
    let k = rows.len();
    match k {
        0 => ONE,
        1 => a[(rows[0], cols[0])],
        2 => a[(rows[0], cols[0])] * a[(rows[1], cols[1])] - a[(rows[0], cols[1])] * a[(rows[1], cols[0])],
        _ => CMat::from_fn(k, k, |i, j| a[(rows[i], cols[j])]).determinant(),
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}
