//! Linear algebra on a single Hermitian fiber: `u(m)` inside `so(2m)`, the
//! exterior algebra with Lefschetz and Hodge operators, and the fiberwise
//! identities built on them.

mod bochner;
mod curvature;
pub mod exterior;
mod identities;

pub use bochner::{bochner_rhs, BochnerTerms};
pub use curvature::{KaehlerCurvature, Provenance};
pub use exterior::{ExteriorBasis, FiberForm, FormRecord, Mask};
pub use identities::{beta_tilde, i_power, verify_kaehler_identities, verify_l1, KaehlerIdentityReport, L1Residuals};

use crate::error::{Error, Result};
use crate::linalg::{
    c64, complexify_unchecked, compound_matrix, hermitian_eigen, hermitian_power, j_commutator_residual, j_matrix, max_abs_c, realify,
    CMat, RMat, C64, IM, ZERO,
};
use exterior::{conj_mask, conj_sign, wedge_sign};
use std::sync::OnceLock;

const SKEW_TOL: f64 = 1e-12;

/// Element of `u(m)`: a skew-Hermitian `m x m` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SkewEndo {
    pub matrix: CMat,
}

impl SkewEndo {
    pub fn new(matrix: CMat) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(format!("{}x{} is not square", matrix.nrows(), matrix.ncols())));
        }
        let res = max_abs_c(&(&matrix + matrix.adjoint()));
        if res > SKEW_TOL * max_abs_c(&matrix).max(1.0) {
            return Err(Error::NotSkewHermitian(res));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Complex-linear part of a real skew matrix commuting with `J`.
    pub fn complexify(r: &RMat) -> Result<Self> {
        if r.nrows() != r.ncols() || r.nrows() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!("{}x{} is not 2m x 2m", r.nrows(), r.ncols())));
        }
        let scale = r.iter().fold(1.0f64, |a, x| a.max(x.abs()));
        let res = j_commutator_residual(r);
        if res > SKEW_TOL * scale {
            return Err(Error::NotComplexLinear(res));
        }
        Self::new(complexify_unchecked(r))
    }

    pub fn realify(&self) -> RMat {
        realify(&self.matrix)
    }

    pub fn bracket(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix }
    }
}

/// Ad-invariant inner product `-2 Re tr(ab)` on `u(m)`.
pub fn ad_inner_product(a: &SkewEndo, b: &SkewEndo) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("u({}) vs u({})", a.dim(), b.dim())));
    }
    SkewEndo::new(a.matrix.clone())?;
    SkewEndo::new(b.matrix.clone())?;
    Ok(ad_inner_unchecked(&a.matrix, &b.matrix))
}

pub(crate) fn ad_inner_unchecked(a: &CMat, b: &CMat) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    -2.0 * acc
}

/// A complex `m`-dimensional inner-product space with its realification.
///
/// The unitary frame is `e_k = Σ_i U[i,k] ∂_i` with `U = conj(h^{-1/2})`; all
/// metric-dependent form operations run in the dual coframe `θ`, where the
/// induced inner product is the standard one.
#[derive(Debug, Clone)]
pub struct HermitianFiber {
    m: usize,
    metric: CMat,
    frame: CMat,
    frame_inv: CMat,
    basis: ExteriorBasis,
    transforms: Vec<OnceLock<(CMat, CMat)>>,
}

impl HermitianFiber {
    pub fn new(metric: CMat) -> Result<Self> {
        let m = metric.nrows();
        if m == 0 || metric.ncols() != m {
            return Err(Error::InvalidMetric(format!("{}x{} is not square", metric.nrows(), metric.ncols())));
        }
        if m > 6 {
            return Err(Error::InvalidMetric(format!("m = {m} exceeds the dense exterior-algebra bound 6")));
        }
        let asym = max_abs_c(&(&metric - metric.adjoint()));
        if asym > 1e-12 * max_abs_c(&metric).max(1.0) {
            return Err(Error::InvalidMetric(format!("not Hermitian (residual {asym:.3e})")));
        }
        let (vals, _) = hermitian_eigen(&metric);
        if vals[0] <= 0.0 {
            return Err(Error::InvalidMetric(format!("min eigenvalue {:.3e} <= 0", vals[0])));
        }
        let frame = hermitian_power(&metric, -0.5).map(|z| z.conj());
        let frame_inv = hermitian_power(&metric, 0.5).map(|z| z.conj());
        let transforms = (0..(m + 1) * (m + 1)).map(|_| OnceLock::new()).collect();
        Ok(Self { m, metric, frame, frame_inv, basis: ExteriorBasis::new(m), transforms })
    }

    pub fn identity(m: usize) -> Result<Self> {
        Self::new(CMat::identity(m, m))
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn metric(&self) -> &CMat {
        &self.metric
    }

    /// Columns are the unitary frame vectors in coordinates.
    pub fn unitary_frame(&self) -> &CMat {
        &self.frame
    }

    pub fn basis(&self) -> &ExteriorBasis {
        &self.basis
    }

    pub fn j(&self) -> RMat {
        j_matrix(self.m)
    }

    /// Riemannian metric on the realification, coordinates `(x, y)`.
    pub fn real_metric(&self) -> RMat {
        realify(&self.metric.map(|z| z.conj())) * 2.0
    }

    /// `g(u, conj v)` for (1,0) vectors given in coordinates.
    pub fn hermitian_product(&self, u: &[C64], v: &[C64]) -> C64 {
        let mut acc = ZERO;
        for i in 0..self.m {
            for j in 0..self.m {
                acc += self.metric[(i, j)] * u[i] * v[j].conj();
            }
        }
        acc
    }

    fn transform(&self, p: usize, q: usize) -> &(CMat, CMat) {
        self.transforms[p * (self.m + 1) + q].get_or_init(|| {
            let ubar = self.frame.map(|z| z.conj());
            let uinv_bar = self.frame_inv.map(|z| z.conj());
            let to = compound_matrix(&self.frame, p).kronecker(&compound_matrix(&ubar, q)).transpose();
            let from = compound_matrix(&self.frame_inv, p).kronecker(&compound_matrix(&uinv_bar, q)).transpose();
            (to, from)
        })
    }

    /// Coefficients on the unitary coframe basis `θ^K`.
    pub fn to_unitary(&self, f: &FiberForm) -> Vec<C64> {
        let (to, _) = self.transform(f.p, f.q);
        let v = to * nalgebra::DVector::from_column_slice(&f.coeffs);
        v.iter().copied().collect()
    }

    pub fn from_unitary(&self, p: usize, q: usize, coeffs: &[C64]) -> Result<FiberForm> {
        let (_, from) = self.transform(p, q);
        let v = from * nalgebra::DVector::from_column_slice(coeffs);
        FiberForm::from_coeffs(&self.basis, p, q, v.iter().copied().collect())
    }

    pub fn inner(&self, f: &FiberForm, g: &FiberForm) -> Result<C64> {
        if (f.p, f.q) != (g.p, g.q) {
            return Ok(ZERO);
        }
        let a = self.to_unitary(f);
        let b = self.to_unitary(g);
        Ok(a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum())
    }

    pub fn norm_sq(&self, f: &FiberForm) -> f64 {
        self.to_unitary(f).iter().map(|z| z.norm_sqr()).sum()
    }

    /// `ω = i Σ g_{ij̄} dz^i ∧ dz̄^j`.
    pub fn kaehler_form(&self) -> FiberForm {
        let m = self.m;
        let mut w = FiberForm::zero(&self.basis, 1, 1).expect("m >= 1");
        for i in 0..m {
            for j in 0..m {
                let mask = (1u32 << i) | (1u32 << (m + j));
                w.coeffs[self.basis.position(mask)] = IM * self.metric[(i, j)];
            }
        }
        w
    }

    /// Real (1,1)-form `i Σ b_{ij̄} dz^i ∧ dz̄^j` from its coefficient matrix.
    pub fn one_one_form(&self, b: &CMat) -> Result<FiberForm> {
        let m = self.m;
        if b.shape() != (m, m) {
            return Err(Error::DimensionMismatch(format!("coefficient matrix must be {m}x{m}")));
        }
        let mut w = FiberForm::zero(&self.basis, 1, 1)?;
        for i in 0..m {
            for j in 0..m {
                let mask = (1u32 << i) | (1u32 << (m + j));
                w.coeffs[self.basis.position(mask)] = IM * b[(i, j)];
            }
        }
        Ok(w)
    }

    /// Inverse of [`Self::one_one_form`].
    pub fn one_one_matrix(&self, w: &FiberForm) -> Result<CMat> {
        if (w.p, w.q) != (1, 1) {
            return Err(Error::DimensionMismatch(format!("expected a (1,1)-form, got ({},{})", w.p, w.q)));
        }
        let m = self.m;
        Ok(CMat::from_fn(m, m, |i, j| {
            let mask = (1u32 << i) | (1u32 << (m + j));
            -IM * w.coeffs[self.basis.position(mask)]
        }))
    }

    pub fn volume_form(&self) -> FiberForm {
        let top = self.unitary_volume_coefficient();
        let full = (1u32 << (2 * self.m)) - 1;
        let mut coeffs = vec![ZERO; 1];
        coeffs[self.basis.position(full)] = top;
        self.from_unitary(self.m, self.m, &coeffs).expect("top degree")
    }

    /// Coefficient of `ω^m/m!` on the canonical top element of the unitary coframe.
    fn unitary_volume_coefficient(&self) -> C64 {
        let m = self.m;
        let mut sign = 1.0;
        let mut acc: u32 = 0;
        for k in 0..m {
            let pair = (1u32 << k) | (1u32 << (m + k));
            sign *= wedge_sign(acc, pair).expect("disjoint");
            acc |= pair;
        }
        let mut ipow = c64(1.0, 0.0);
        for _ in 0..m {
            ipow *= IM;
        }
        ipow * sign
    }

    pub fn lefschetz_l(&self, f: &FiberForm) -> Result<FiberForm> {
        if f.p + 1 > self.m || f.q + 1 > self.m {
            return Err(Error::BidegreeOverflow { p: f.p + 1, q: f.q + 1, m: self.m });
        }
        self.kaehler_form().wedge(f, &self.basis)
    }

    /// Metric adjoint of `L`.
    pub fn lefschetz_lambda(&self, f: &FiberForm) -> Result<FiberForm> {
        let m = self.m;
        if f.p == 0 || f.q == 0 {
            // no (1,1) part to contract; the zero result keeps the input bidegree
            return FiberForm::zero(&self.basis, f.p, f.q);
        }
        let src = self.to_unitary(f);
        let mut out = vec![ZERO; self.basis.dim(f.p - 1, f.q - 1)];
        for (s, c) in self.basis.block(f.p, f.q).iter().zip(&src) {
            if *c == ZERO {
                continue;
            }
            for k in 0..m {
                let pair = (1u32 << k) | (1u32 << (m + k));
                if s & pair == pair {
                    let t = s & !pair;
                    let sign = wedge_sign(pair, t).expect("disjoint");
                    out[self.basis.position(t)] += -IM * sign * c;
                }
            }
        }
        self.from_unitary(f.p - 1, f.q - 1, &out)
    }

    /// Complex-linear Hodge star with `α ∧ *conj(β) = ⟨α, β⟩ vol`; maps
    /// `(p,q)` to `(m-q, m-p)`.
    pub fn hodge_star(&self, f: &FiberForm) -> Result<FiberForm> {
        let m = self.m;
        let full = (1u32 << (2 * m)) - 1;
        let vol = self.unitary_volume_coefficient();
        let src = self.to_unitary(f);
        let (p2, q2) = (m - f.q, m - f.p);
        let mut out = vec![ZERO; self.basis.dim(p2, q2)];
        for (r, c) in self.basis.block(f.p, f.q).iter().zip(&src) {
            let rbar = conj_mask(*r, m);
            let comp = full & !rbar;
            let ws = wedge_sign(rbar, comp).expect("complement");
            out[self.basis.position(comp)] += c * vol * (conj_sign(*r, m) / ws);
        }
        self.from_unitary(p2, q2, &out)
    }

    /// Conjugate-linear star `g ↦ *conj(g)`, pinned by `f ∧ *conj(g) = ⟨f,g⟩ vol`.
    pub fn hodge_star_bar(&self, g: &FiberForm) -> Result<FiberForm> {
        self.hodge_star(&g.conj(&self.basis))
    }

    /// `tr_ω η = Λ η` for a (1,1)-form.
    pub fn trace(&self, eta: &FiberForm) -> Result<C64> {
        let l = self.lefschetz_lambda(eta)?;
        Ok(l.coeffs[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_r, random_pd_hermitian, random_skew_hermitian};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ad_inner_product_values() {
        let a = SkewEndo::new(CMat::identity(3, 3) * IM).unwrap();
        assert!((ad_inner_product(&a, &a).unwrap() - 6.0).abs() < 1e-14);
        let d = SkewEndo::new(CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![IM, -IM]))).unwrap();
        let i2 = SkewEndo::new(CMat::identity(2, 2) * IM).unwrap();
        assert!(ad_inner_product(&d, &i2).unwrap().abs() < 1e-14);
    }

    #[test]
    fn ad_inner_rejects_bad_input() {
        let a = SkewEndo { matrix: CMat::identity(2, 2) };
        let b = SkewEndo::new(CMat::identity(2, 2) * IM).unwrap();
        assert!(matches!(ad_inner_product(&a, &b), Err(Error::NotSkewHermitian(_))));
        let c = SkewEndo::new(CMat::identity(3, 3) * IM).unwrap();
        assert!(matches!(ad_inner_product(&b, &c), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn ad_invariance_and_real_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = SkewEndo::new(random_skew_hermitian(3, &mut rng)).unwrap();
            let b = SkewEndo::new(random_skew_hermitian(3, &mut rng)).unwrap();
            let c = SkewEndo::new(random_skew_hermitian(3, &mut rng)).unwrap();
            let lhs = ad_inner_product(&c.bracket(&a), &b).unwrap() + ad_inner_product(&a, &c.bracket(&b)).unwrap();
            assert!(lhs.abs() < 1e-10);
            let r = a.realify();
            let direct = (&r * r.transpose()).trace();
            assert!((ad_inner_product(&a, &a).unwrap() - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn complexify_round_trip_and_rejection() {
        let j = j_matrix(2);
        let a = SkewEndo::complexify(&j).unwrap();
        assert!(max_abs_c(&(a.matrix - CMat::identity(2, 2) * IM)) < 1e-15);
        let mut bad = RMat::zeros(4, 4);
        bad[(0, 1)] = 1.0;
        bad[(1, 0)] = -1.0;
        bad[(0, 2)] = 0.5;
        bad[(2, 0)] = -0.5;
        assert!(matches!(SkewEndo::complexify(&bad), Err(Error::NotComplexLinear(_))));
    }

    #[test]
    fn unitary_frame_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_pd_hermitian(3, &mut rng);
        let fib = HermitianFiber::new(h.clone()).unwrap();
        let u = fib.unitary_frame();
        let gram = u.transpose() * &h * u.map(|z| z.conj());
        assert!(max_abs_c(&(gram - CMat::identity(3, 3))) < 1e-12);
        let g = fib.real_metric();
        let j = fib.j();
        assert!(max_abs_r(&(j.transpose() * &g * &j - &g)) < 1e-12);
    }

    #[test]
    fn lambda_of_kaehler_form_is_m() {
        for m in 1..=4 {
            let fib = HermitianFiber::identity(m).unwrap();
            let t = fib.trace(&fib.kaehler_form()).unwrap();
            assert!((t - c64(m as f64, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn lambda_kills_holomorphic_forms() {
        let fib = HermitianFiber::identity(3).unwrap();
        let s = FiberForm::monomial(fib.basis(), &[0, 1], &[], c64(1.0, 0.5)).unwrap();
        let l = fib.lefschetz_lambda(&s).unwrap();
        assert!(l.max_abs() == 0.0);
    }

    #[test]
    fn volume_matches_omega_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fib = HermitianFiber::new(random_pd_hermitian(3, &mut rng)).unwrap();
        let w = fib.kaehler_form();
        let w3 = w.wedge(&w, fib.basis()).unwrap().wedge(&w, fib.basis()).unwrap().scale(c64(1.0 / 6.0, 0.0));
        assert!(w3.sub(&fib.volume_form()).unwrap().max_abs() < 1e-12);
    }
}
