//! Matrix Lie subalgebras of `u(m)` and `so(2m)`: closure, commutant, center,
//! derived algebra, and the restricted holonomy algebra of a connection.

mod holonomy;

pub use holonomy::{holonomy_algebra, ricci_vs_su_check, HolonomyApprox, RicciSuReport, HOLONOMY_FD_TOL};

use crate::error::{Error, Result};
use crate::linalg::{
    commutator, hermitian_eigen, max_abs_c, null_space_c, null_space_r, realify, row_basis, CMat, RMat, RankTol, C64, ZERO,
};
use rand::{Rng, SeedableRng};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "ambient", rename_all = "kebab-case")]
pub enum Ambient {
    /// Skew-Hermitian `m×m` complex matrices.
    Unitary { m: usize },
    /// Real skew-symmetric `n×n` matrices.
    Orthogonal { n: usize },
}

impl Ambient {
    pub fn size(&self) -> usize {
        match *self {
            Ambient::Unitary { m } => m,
            Ambient::Orthogonal { n } => n,
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Ambient::Unitary { m } => m * m,
            Ambient::Orthogonal { n } => n * (n - 1) / 2,
        }
    }
}

/// Real span of skew endomorphisms, orthonormal under `-2 Re tr(ab)`.
#[derive(Debug, Clone, Serialize)]
pub struct MatrixLieSubalgebra {
    pub ambient: Ambient,
    #[serde(serialize_with = "serialize_basis")]
    pub basis: Vec<CMat>,
    pub closed: bool,
    pub provenance: Vec<String>,
    /// Smallest singular value kept by the last rank decision.
    pub smallest_retained: f64,
    #[serde(skip)]
    pub tol: RankTol,
}

fn serialize_basis<S: serde::Serializer>(basis: &[CMat], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(basis.len()))?;
    for b in basis {
        let rows: Vec<Vec<[f64; 2]>> = (0..b.nrows()).map(|i| (0..b.ncols()).map(|j| [b[(i, j)].re, b[(i, j)].im]).collect()).collect();
        seq.serialize_element(&rows)?;
    }
    seq.end()
}

fn to_vec(a: &CMat) -> Vec<f64> {
    a.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn from_vec(v: &[f64], size: usize) -> CMat {
    CMat::from_iterator(size, size, v.chunks(2).map(|c| C64::new(c[0], c[1])))
}

fn skew_part(a: &CMat) -> CMat {
    (a - a.adjoint()) * C64::new(0.5, 0.0)
}

/// Orthonormal basis of the real span of `mats`, with the smallest kept singular value.
fn span(mats: &[CMat], size: usize, tol: RankTol) -> (Vec<CMat>, f64) {
    if mats.is_empty() {
        return (Vec::new(), 0.0);
    }
    let width = 2 * size * size;
    let rows = RMat::from_fn(mats.len(), width, |i, j| {
        let z = mats[i][(j / 2 % size, j / 2 / size)];
        if j % 2 == 0 {
            z.re
        } else {
            z.im
        }
    });
    let rb = row_basis(&rows, tol);
    let basis = (0..rb.rows.nrows())
        .map(|i| from_vec(rb.rows.row(i).transpose().as_slice(), size) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
        .collect();
    (basis, rb.smallest_retained)
}

impl MatrixLieSubalgebra {
    pub fn zero(ambient: Ambient) -> Self {
        Self { ambient, basis: Vec::new(), closed: true, provenance: Vec::new(), smallest_retained: 0.0, tol: RankTol::EXACT }
    }

    /// Span of `mats` without closing it.
    pub fn spanned(ambient: Ambient, mats: &[CMat], tol: RankTol) -> Result<Self> {
        let mats = validate(ambient, mats)?;
        let (basis, smallest) = span(&mats, ambient.size(), tol);
        Ok(Self { ambient, basis, closed: false, provenance: Vec::new(), smallest_retained: smallest, tol })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn size(&self) -> usize {
        self.ambient.size()
    }

    /// Distance (Frobenius, scaled to the ad-invariant norm) from `x` to the span.
    pub fn span_residual(&self, x: &CMat) -> f64 {
        let mut v = to_vec(x);
        for b in &self.basis {
            let r: Vec<f64> = to_vec(b).iter().map(|t| t * std::f64::consts::SQRT_2).collect();
            let c: f64 = v.iter().zip(&r).map(|(a, b)| a * b).sum();
            for (vi, ri) in v.iter_mut().zip(&r) {
                *vi -= c * ri;
            }
        }
        (2.0 * v.iter().map(|t| t * t).sum::<f64>()).sqrt()
    }

    /// Max over basis pairs of the distance of `[b_i, b_j]` from the span.
    pub fn closure_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for b in &self.basis[i + 1..] {
                worst = worst.max(self.span_residual(&commutator(a, b)));
            }
        }
        worst
    }

    /// Smallest eigenvalue of the ad-invariant Gram matrix of the basis.
    pub fn gram_min_eigen(&self) -> f64 {
        let d = self.dim();
        if d == 0 {
            return 1.0;
        }
        let g = CMat::from_fn(d, d, |i, j| C64::new(crate::fiber::ad_inner_unchecked(&self.basis[i], &self.basis[j]), 0.0));
        hermitian_eigen(&g).0[0]
    }

    /// Largest distance of a basis element of `self` from `other`.
    pub fn containment_residual(&self, other: &MatrixLieSubalgebra) -> f64 {
        self.basis.iter().map(|b| other.span_residual(b)).fold(0.0, f64::max)
    }
}

fn validate(ambient: Ambient, mats: &[CMat]) -> Result<Vec<CMat>> {
    let size = ambient.size();
    let mut out = Vec::with_capacity(mats.len());
    for a in mats {
        if a.shape() != (size, size) {
            return Err(Error::DimensionMismatch(format!("{}x{} generator in a {size}x{size} ambient", a.nrows(), a.ncols())));
        }
        let scale = max_abs_c(a).max(1.0);
        let res = max_abs_c(&(a + a.adjoint()));
        if res > 1e-6 * scale {
            return Err(Error::NotSkewHermitian(res));
        }
        if let Ambient::Orthogonal { .. } = ambient {
            let imag = a.iter().fold(0.0f64, |acc, z| acc.max(z.im.abs()));
            if imag > 1e-6 * scale {
                return Err(Error::AmbientMismatch(format!("complex entries ({imag:.3e}) in a real orthogonal ambient")));
            }
        }
        let mut s = skew_part(a);
        if let Ambient::Orthogonal { .. } = ambient {
            s = s.map(|z| C64::new(z.re, 0.0));
        }
        out.push(s);
    }
    Ok(out)
}

/// Smallest bracket-closed real subspace containing the generators.
pub fn lie_closure(ambient: Ambient, generators: &[CMat], tol: RankTol) -> Result<MatrixLieSubalgebra> {
    let gens = validate(ambient, generators)?;
    let size = ambient.size();
    let (mut basis, mut smallest) = span(&gens, size, tol);
    loop {
        if basis.len() >= ambient.dim() {
            break;
        }
        let mut cand = basis.clone();
        for (i, a) in basis.iter().enumerate() {
            for b in &basis[i + 1..] {
                cand.push(commutator(a, b));
            }
        }
        let (next, s) = span(&cand, size, tol);
        let grew = next.len() > basis.len();
        basis = next;
        smallest = s;
        if !grew {
            break;
        }
    }
    Ok(MatrixLieSubalgebra { ambient, basis, closed: true, provenance: vec!["bracket closure".into()], smallest_retained: smallest, tol })
}

/// Complex endomorphisms commuting with every basis element, as an orthonormal list.
pub fn commutant(g: &MatrixLieSubalgebra) -> Vec<CMat> {
    let n = g.size();
    let id = CMat::identity(n, n);
    if g.basis.is_empty() {
        return (0..n * n).map(|k| CMat::from_fn(n, n, |i, j| if i + j * n == k { C64::new(1.0, 0.0) } else { ZERO })).collect();
    }
    let mut stacked = CMat::zeros(g.dim() * n * n, n * n);
    for (s, b) in g.basis.iter().enumerate() {
        // vec(bX − Xb) = (I ⊗ b − bᵀ ⊗ I) vec(X)
        let op = id.kronecker(b) - b.transpose().kronecker(&id);
        stacked.view_mut((s * n * n, 0), (n * n, n * n)).copy_from(&op);
    }
    let tol = RankTol { rel: g.tol.rel.max(1e-9), abs: g.tol.abs };
    let ns = null_space_c(&stacked, tol);
    (0..ns.ncols()).map(|c| CMat::from_column_slice(n, n, ns.column(c).as_slice())).collect()
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Irreducibility {
    Irreducible {
        commutant_dim: usize,
    },
    /// `witness` columns span a proper invariant subspace.
    Reducible {
        commutant_dim: usize,
        #[serde(serialize_with = "serialize_witness")]
        witness: CMat,
    },
}

fn serialize_witness<S: serde::Serializer>(w: &CMat, s: S) -> std::result::Result<S::Ok, S::Error> {
    let cols: Vec<Vec<[f64; 2]>> = (0..w.ncols()).map(|c| w.column(c).iter().map(|z| [z.re, z.im]).collect()).collect();
    serde::Serialize::serialize(&cols, s)
}

impl Irreducibility {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, Irreducibility::Irreducible { .. })
    }

    pub fn commutant_dim(&self) -> usize {
        match self {
            Irreducibility::Irreducible { commutant_dim } | Irreducibility::Reducible { commutant_dim, .. } => *commutant_dim,
        }
    }
}

/// Schur test on the complex fiber; a reducible answer carries an eigenspace of
/// a generic Hermitian commutant element as witness.
pub fn is_irreducible(g: &MatrixLieSubalgebra) -> Irreducibility {
    let comm = commutant(g);
    let dim = comm.len();
    if dim <= 1 {
        return Irreducibility::Irreducible { commutant_dim: dim };
    }
    Irreducibility::Reducible { commutant_dim: dim, witness: invariant_witness(&comm, g.size()) }
}

fn invariant_witness(comm: &[CMat], n: usize) -> CMat {
    invariant_blocks(comm, n).swap_remove(0)
}

/// Eigenspaces of a generic Hermitian commutant element, ordered by the lowest
/// basis index they touch. Each is an irreducible invariant subspace.
pub fn invariant_subspaces(g: &MatrixLieSubalgebra) -> Vec<CMat> {
    invariant_blocks(&commutant(g), g.size())
}

fn invariant_blocks(comm: &[CMat], n: usize) -> Vec<CMat> {
    if comm.len() <= 1 {
        return vec![CMat::identity(n, n)];
    }
    // the commutant of a skew-Hermitian family is closed under adjoints
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED);
    let mut h = CMat::zeros(n, n);
    for c in comm {
        let w: f64 = rng.random_range(0.5..1.5);
        let v: f64 = rng.random_range(0.5..1.5);
        h += (c + c.adjoint()) * C64::new(w, 0.0) + (c - c.adjoint()) * C64::new(0.0, v);
    }
    let (vals, vecs) = hermitian_eigen(&h);
    let spread = vals.last().unwrap() - vals[0];
    let gap = 1e-6 * spread.max(1e-12);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, _) in vals.iter().enumerate() {
        match clusters.last_mut() {
            Some(c) if vals[i] - vals[*c.last().unwrap()] < gap => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    let first_index =
        |c: &Vec<usize>| -> usize { (0..n).find(|&row| c.iter().map(|&k| vecs[(row, k)].norm_sqr()).sum::<f64>() > 1e-6).unwrap_or(n) };
    clusters.sort_by_key(|c| first_index(c));
    clusters.iter().map(|c| CMat::from_columns(&c.iter().map(|&k| vecs.column(k).into_owned()).collect::<Vec<_>>())).collect()
}

/// Real endomorphisms of the realification commuting with the algebra.
pub fn real_commutant(g: &MatrixLieSubalgebra) -> Vec<RMat> {
    let mats: Vec<RMat> = match g.ambient {
        Ambient::Unitary { .. } => g.basis.iter().map(realify).collect(),
        Ambient::Orthogonal { .. } => g.basis.iter().map(|b| b.map(|z| z.re)).collect(),
    };
    let n = match g.ambient {
        Ambient::Unitary { m } => 2 * m,
        Ambient::Orthogonal { n } => n,
    };
    let id = RMat::identity(n, n);
    if mats.is_empty() {
        return (0..n * n).map(|k| RMat::from_fn(n, n, |i, j| if i + j * n == k { 1.0 } else { 0.0 })).collect();
    }
    let mut stacked = RMat::zeros(mats.len() * n * n, n * n);
    for (s, b) in mats.iter().enumerate() {
        let op = id.kronecker(b) - b.transpose().kronecker(&id);
        stacked.view_mut((s * n * n, 0), (n * n, n * n)).copy_from(&op);
    }
    let ns = null_space_r(&stacked, RankTol { rel: g.tol.rel.max(1e-9), abs: g.tol.abs });
    (0..ns.ncols()).map(|c| RMat::from_column_slice(n, n, ns.column(c).as_slice())).collect()
}

/// Real form of Schur's lemma on the realification of `g ⊆ u(m)`.
#[derive(Debug, Clone, Serialize)]
pub struct RealSchur {
    /// Worst deviation of a symmetric commutant element from `λ·id`. Small
    /// exactly when the realification is irreducible over `ℝ`.
    pub symmetric: f64,
    pub real_irreducible: bool,
    /// Worst deviation of `ab + ba` from a scalar over skew commutant elements;
    /// zero iff every skew element is `λ·J'` for a complex structure `J'`.
    pub skew_square: f64,
    /// Largest dimension, over the skew basis, of the part of the skew
    /// commutant commuting with a basis element (one when pairs are proportional).
    pub skew_centralizer: usize,
    pub skew_dim: usize,
}

fn scalar_deviation(a: &RMat) -> f64 {
    let n = a.nrows();
    crate::linalg::max_abs_r(&(a - RMat::identity(n, n) * (a.trace() / n as f64)))
}

/// Splits the real commutant into symmetric and skew parts and tests both
/// against the real Schur statements.
pub fn real_schur(g: &MatrixLieSubalgebra) -> Result<RealSchur> {
    if !matches!(g.ambient, Ambient::Unitary { .. }) {
        return Err(Error::AmbientMismatch("real Schur test needs u(m)".into()));
    }
    let comm = real_commutant(g);
    let mut symmetric: f64 = 0.0;
    let mut skew: Vec<RMat> = Vec::new();
    for c in &comm {
        symmetric = symmetric.max(scalar_deviation(&((c + c.transpose()) * 0.5)));
        let mut k: RMat = (c - c.transpose()) * 0.5;
        for b in &skew {
            let dot = k.dot(b);
            k -= b * dot;
        }
        let norm = k.norm();
        if norm > 1e-8 {
            skew.push(k / norm);
        }
    }
    let mut skew_square: f64 = 0.0;
    for (i, a) in skew.iter().enumerate() {
        for b in &skew[i..] {
            skew_square = skew_square.max(scalar_deviation(&(a * b + b * a)));
        }
    }
    let mut skew_centralizer = 0;
    for a in &skew {
        let n = a.nrows();
        let cols: Vec<nalgebra::DVector<f64>> =
            skew.iter().map(|b| nalgebra::DVector::from_column_slice((a * b - b * a).as_slice())).collect();
        let map = RMat::from_columns(&cols);
        debug_assert_eq!(map.nrows(), n * n);
        skew_centralizer = skew_centralizer.max(null_space_r(&map, RankTol::EXACT).ncols());
    }
    Ok(RealSchur { symmetric, real_irreducible: symmetric < 1e-8, skew_square, skew_centralizer, skew_dim: skew.len() })
}

/// `{x ∈ g : [x, g] = 0}`.
pub fn center(g: &MatrixLieSubalgebra) -> Result<MatrixLieSubalgebra> {
    if !g.closed {
        return Err(Error::NotClosed);
    }
    let d = g.dim();
    let size = g.size();
    if d == 0 {
        return Ok(MatrixLieSubalgebra::zero(g.ambient));
    }
    // columns: coefficient j ↦ vec([b_j, b_i]) stacked over i
    let block = 2 * size * size;
    let mut sys = RMat::zeros(d * block, d);
    for j in 0..d {
        for i in 0..d {
            let v = to_vec(&commutator(&g.basis[j], &g.basis[i]));
            for (r, x) in v.iter().enumerate() {
                sys[(i * block + r, j)] = *x;
            }
        }
    }
    let ns = null_space_r(&sys, RankTol { rel: g.tol.rel, abs: g.tol.abs.max(1e-12) });
    let mats: Vec<CMat> = (0..ns.ncols())
        .map(|c| g.basis.iter().enumerate().fold(CMat::zeros(size, size), |acc, (j, b)| acc + b * C64::new(ns[(j, c)], 0.0)))
        .collect();
    let mut z = MatrixLieSubalgebra::spanned(g.ambient, &mats, g.tol)?;
    z.closed = true;
    z.provenance = vec!["center".into()];
    Ok(z)
}

/// `[g, g]`
pub fn derived(g: &MatrixLieSubalgebra) -> Result<MatrixLieSubalgebra> {
    if !g.closed {
        return Err(Error::NotClosed);
    }
    let mut brackets = Vec::new();
    for (i, a) in g.basis.iter().enumerate() {
        for b in &g.basis[i + 1..] {
            brackets.push(commutator(a, b));
        }
    }
    let mut d = MatrixLieSubalgebra::spanned(g.ambient, &brackets, g.tol)?;
    d.closed = true;
    d.provenance = vec!["derived".into()];
    Ok(d)
}

#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub center: MatrixLieSubalgebra,
    pub semisimple: MatrixLieSubalgebra,
    /// `max |⟨z, d⟩|` over the two bases.
    pub orthogonality: f64,
}

pub fn decompose(g: &MatrixLieSubalgebra) -> Result<Decomposition> {
    let z = center(g)?;
    let d = derived(g)?;
    let mut orth: f64 = 0.0;
    for a in &z.basis {
        for b in &d.basis {
            orth = orth.max(crate::fiber::ad_inner_unchecked(a, b).abs());
        }
    }
    Ok(Decomposition { center: z, semisimple: d, orthogonality: orth })
}

/// Norm of the trace functional on `g` (zero iff `g ⊆ su(m)`).
pub fn trace_norm(g: &MatrixLieSubalgebra) -> Result<f64> {
    match g.ambient {
        Ambient::Unitary { .. } => Ok(g.basis.iter().map(|b| b.trace().norm_sqr()).sum::<f64>().sqrt()),
        Ambient::Orthogonal { .. } => Err(Error::AmbientMismatch("su(m) containment needs a u(m) ambient".into())),
    }
}

pub fn is_in_su(g: &MatrixLieSubalgebra) -> Result<bool> {
    Ok(trace_norm(g)? < 1e-9)
}
