use super::{HermitianFiber, KaehlerCurvature};
use crate::error::{Error, Result};
use crate::fiber::exterior::{sort_sign, FiberForm};
use crate::linalg::{compound_matrix, hermitian_eigen, subsets, CMat, CVec, C64, ZERO};

/// Curvature term of the Bochner formula for a `(p,0)`-form, computed by the
/// ordered-tuple sum and again after diagonalizing `Q_{kl} = R_{v v̄ k l̄}`.
#[derive(Debug, Clone, Copy)]
pub struct BochnerTerms {
    pub ordered: f64,
    pub diagonalized: f64,
    pub residual: f64,
    pub imaginary_part: f64,
}

/// Antisymmetric extension of increasing-index coefficients to any tuple.
fn coefficient(f: &[C64], m: usize, tuple: &[usize], lookup: &[usize]) -> C64 {
    let mut t = tuple.to_vec();
    let sign = sort_sign(&mut t);
    if t.windows(2).any(|w| w[0] == w[1]) {
        return ZERO;
    }
    let mask = t.iter().fold(0usize, |acc, &i| acc | (1 << i));
    debug_assert!(mask < 1 << m);
    f[lookup[mask]] * sign
}

/// `(1/p!) Σ_{I_p} Σ_k Σ_l R_{v v̄ l ī_k} f_{I_p} conj(f_{i_1..(l)_k..i_p})` in
/// a unitary coframe of the curvature's reference metric.
///
/// The coframe index of `f` pairs with the antiholomorphic slot, which makes
/// the sum independent of the unitary coframe; for real symmetric `R_{v v̄ · ·}`
/// it coincides with pairing `R_{v v̄ i_k l̄}`.
pub fn bochner_rhs(r: &KaehlerCurvature, fiber: &HermitianFiber, s: &FiberForm, v: &[C64]) -> Result<BochnerTerms> {
    let m = fiber.m();
    if r.m != m || s.m != m || v.len() != m {
        return Err(Error::DimensionMismatch("curvature, form and vector live on different fibers".into()));
    }
    if crate::linalg::max_abs_c(&(&r.metric - fiber.metric())) > 1e-12 {
        return Err(Error::DimensionMismatch("curvature metric differs from the fiber metric".into()));
    }
    if s.q != 0 {
        return Err(Error::DimensionMismatch(format!("expected a (p,0)-form, got ({},{})", s.p, s.q)));
    }
    r.validate(1e-9)?;
    let vn = fiber.hermitian_product(v, v).re;
    if (vn - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParams(format!("|v|^2 = {vn} is not 1")));
    }
    let p = s.p;
    let ru = r.in_unitary_frame();
    let frame = fiber.unitary_frame();
    let frame_inv = frame.clone().try_inverse().ok_or(Error::SingularMetric)?;
    let vu = &frame_inv * CVec::from_column_slice(v);
    let f = fiber.to_unitary(s);

    let q = CMat::from_fn(m, m, |k, l| {
        let mut acc = ZERO;
        for a in 0..m {
            for b in 0..m {
                acc += ru.get(a, b, k, l) * vu[a] * vu[b].conj();
            }
        }
        acc
    });

    let mut lookup = vec![0usize; 1 << m];
    for (pos, sub) in subsets(m, p).iter().enumerate() {
        lookup[sub.iter().fold(0usize, |acc, &i| acc | (1 << i))] = pos;
    }

    let mut ordered = ZERO;
    let mut tuple = vec![0usize; p];
    let total = m.pow(p as u32);
    for code in 0..total {
        let mut c = code;
        for slot in tuple.iter_mut() {
            *slot = c % m;
            c /= m;
        }
        let fi = coefficient(&f, m, &tuple, &lookup);
        if fi == ZERO {
            continue;
        }
        for k in 0..p {
            let ik = tuple[k];
            let mut swapped = tuple.clone();
            for l in 0..m {
                swapped[k] = l;
                ordered += q[(l, ik)] * fi * coefficient(&f, m, &swapped, &lookup).conj();
            }
        }
    }
    ordered /= crate::linalg::factorial(p);

    let (vals, vecs) = hermitian_eigen(&q);
    let w = vecs.map(|z| z.conj());
    let rotated = compound_matrix(&w, p).transpose() * CVec::from_column_slice(&f);
    let mut diagonalized = 0.0;
    for (pos, sub) in subsets(m, p).iter().enumerate() {
        let weight: f64 = sub.iter().map(|&i| vals[i]).sum();
        diagonalized += weight * rotated[pos].norm_sqr();
    }

    Ok(BochnerTerms { ordered: ordered.re, diagonalized, residual: (ordered.re - diagonalized).abs(), imaginary_part: ordered.im.abs() })
}
