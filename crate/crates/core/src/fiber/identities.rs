use super::exterior::{bidegree_of, conj_mask, conj_sign, wedge_sign, FiberForm, Mask};
use super::HermitianFiber;
use crate::error::{Error, Result};
use crate::linalg::{c64, factorial, hermitian_eigen, hermitian_residual, C64, IM, ONE, ZERO};
use serde::Serialize;

/// `i^n` from `n mod 4`, exact.
pub fn i_power(n: usize) -> C64 {
    match n % 4 {
        0 => ONE,
        1 => IM,
        2 => -ONE,
        _ => -IM,
    }
}

/// Dense vector over the full exterior algebra, indexed by mask, in a
/// unitary coframe (standard inner product).
type Full = Vec<C64>;

fn apply_l(v: &Full, m: usize) -> Full {
    let mut out = vec![ZERO; v.len()];
    for (t, c) in v.iter().enumerate() {
        if *c == ZERO {
            continue;
        }
        for k in 0..m {
            let pair: Mask = (1 << k) | (1 << (m + k));
            if let Some(s) = wedge_sign(pair, t as Mask) {
                out[(t as Mask | pair) as usize] += IM * s * c;
            }
        }
    }
    out
}

fn apply_lambda(v: &Full, m: usize) -> Full {
    let mut out = vec![ZERO; v.len()];
    for (s, c) in v.iter().enumerate() {
        if *c == ZERO {
            continue;
        }
        let s = s as Mask;
        for k in 0..m {
            let pair: Mask = (1 << k) | (1 << (m + k));
            if s & pair == pair {
                let t = s & !pair;
                let sign = wedge_sign(pair, t).expect("disjoint");
                out[t as usize] += -IM * sign * c;
            }
        }
    }
    out
}

fn apply_star(v: &Full, m: usize) -> Full {
    let full: Mask = (1 << (2 * m)) - 1;
    let mut vol = i_power(m);
    let mut acc: Mask = 0;
    for k in 0..m {
        let pair: Mask = (1 << k) | (1 << (m + k));
        vol *= wedge_sign(acc, pair).expect("disjoint");
        acc |= pair;
    }
    let mut out = vec![ZERO; v.len()];
    for (r, c) in v.iter().enumerate() {
        if *c == ZERO {
            continue;
        }
        let r = r as Mask;
        let rbar = conj_mask(r, m);
        let comp = full & !rbar;
        let ws = wedge_sign(rbar, comp).expect("complement");
        out[comp as usize] += c * vol * (conj_sign(r, m) / ws);
    }
    out
}

fn max_diff(a: &Full, b: &Full) -> f64 {
    a.iter().zip(b).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

fn max_norm(a: &Full) -> f64 {
    a.iter().fold(0.0, |acc, x| acc.max(x.norm()))
}

#[derive(Debug, Clone, Serialize)]
pub struct KaehlerIdentityReport {
    pub m: usize,
    pub max_degree: usize,
    /// `max |L*α - *Λα|` over basis forms.
    pub star_commutation: f64,
    /// `max |[L^ℓ,Λ]α - ℓ(k-m+ℓ-1) L^{ℓ-1}α|`, relative to the operand scale.
    pub lefschetz_commutator: f64,
    /// `max |**α - (-1)^k α|`.
    pub star_involution: f64,
    /// `max |⟨Lα,β⟩ - ⟨α,Λβ⟩|` over basis pairs.
    pub adjointness: f64,
    pub forms_checked: usize,
    pub passed: bool,
}

/// Operator identities `L* = *Λ` and `[L^ℓ, Λ] = ℓ(k-m+ℓ-1) L^{ℓ-1}` on every
/// basis `k`-form of a unitary coframe, `k <= max_degree`.
pub fn verify_kaehler_identities(m: usize, max_degree: usize) -> KaehlerIdentityReport {
    assert!((1..=5).contains(&m), "identity check supports 1 <= m <= 5");
    let n = 1usize << (2 * m);
    let mut star_commutation: f64 = 0.0;
    let mut lefschetz_commutator: f64 = 0.0;
    let mut star_involution: f64 = 0.0;
    let mut adjointness: f64 = 0.0;
    let mut forms_checked = 0;
    for mask in 0..n {
        let k = (mask as Mask).count_ones() as usize;
        if k > max_degree {
            continue;
        }
        forms_checked += 1;
        let mut e = vec![ZERO; n];
        e[mask] = ONE;

        let lhs = apply_l(&apply_star(&e, m), m);
        let rhs = apply_star(&apply_lambda(&e, m), m);
        star_commutation = star_commutation.max(max_diff(&lhs, &rhs));

        let ss = apply_star(&apply_star(&e, m), m);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let expect: Full = e.iter().map(|z| z * sign).collect();
        star_involution = star_involution.max(max_diff(&ss, &expect));

        // adjointness against every basis element reached by L
        let le = apply_l(&e, m);
        for (t, c) in le.iter().enumerate() {
            if *c == ZERO {
                continue;
            }
            let mut f = vec![ZERO; n];
            f[t] = ONE;
            let lam = apply_lambda(&f, m);
            // ⟨L e, f⟩ = c, ⟨e, Λ f⟩ = conj(lam[mask])
            adjointness = adjointness.max((c - lam[mask].conj()).norm());
        }

        let lam_e = apply_lambda(&e, m);
        let mut l_pow_prev = e.clone(); // L^{ℓ-1} e
        let mut l_pow_lam = lam_e.clone(); // L^ℓ Λ e, built incrementally
        for ell in 1..=m {
            l_pow_lam = apply_l(&l_pow_lam, m);
            let l_pow = apply_l(&l_pow_prev, m);
            let lam_l_pow = apply_lambda(&l_pow, m);
            let coef = ell as f64 * (k as f64 - m as f64 + ell as f64 - 1.0);
            let mut worst: f64 = 0.0;
            let mut scale: f64 = 1.0;
            for i in 0..n {
                let comm = l_pow_lam[i] - lam_l_pow[i];
                worst = worst.max((comm - l_pow_prev[i] * coef).norm());
            }
            scale = scale.max(max_norm(&l_pow_lam)).max(max_norm(&lam_l_pow));
            lefschetz_commutator = lefschetz_commutator.max(worst / scale);
            l_pow_prev = l_pow;
        }
    }
    let tol = 1e-10;
    KaehlerIdentityReport {
        m,
        max_degree,
        star_commutation,
        lefschetz_commutator,
        star_involution,
        adjointness,
        forms_checked,
        passed: star_commutation < tol && lefschetz_commutator < tol && star_involution < tol && adjointness < tol,
    }
}

/// `β̃ = Λ^{p-1}(i^{p²} s ∧ s̄ / p!)` for a `(p,0)`-form, `1 <= p <= m-1`.
pub fn beta_tilde(fiber: &HermitianFiber, s: &FiberForm) -> Result<FiberForm> {
    let m = fiber.m();
    if s.q != 0 {
        return Err(Error::DimensionMismatch(format!("expected a (p,0)-form, got ({},{})", s.p, s.q)));
    }
    let p = s.p;
    if p == 0 || p >= m {
        return Err(Error::DegreeOutOfRange { p, m });
    }
    let basis = fiber.basis();
    let ss = s.wedge(&s.conj(basis), basis)?;
    let mut cur = ss.scale(i_power(p * p) / factorial(p));
    for _ in 0..p - 1 {
        cur = fiber.lefschetz_lambda(&cur)?;
    }
    Ok(cur)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct L1Residuals {
    /// `|Λβ̃ - |s|²|`
    pub trace: f64,
    /// top-degree residual of the wedge identity
    pub wedge: f64,
    /// smallest eigenvalue of the `β̃` coefficient matrix
    pub beta_min_eigen: f64,
}

/// Residuals of `tr_ω β̃ = |s|²` and
/// `i^{p²} η∧s∧s̄∧ω^{m-p-1}/(m-p-1)! = [tr_ω η |s|² - p⟨η,β̃⟩] ω^m/m!`.
pub fn verify_l1(fiber: &HermitianFiber, s: &FiberForm, eta: &FiberForm) -> Result<L1Residuals> {
    let m = fiber.m();
    let p = s.p;
    let beta = beta_tilde(fiber, s)?;
    if (eta.p, eta.q) != (1, 1) {
        return Err(Error::DimensionMismatch(format!("η must be a (1,1)-form, got ({},{})", eta.p, eta.q)));
    }
    let b_eta = fiber.one_one_matrix(eta)?;
    let herm = hermitian_residual(&b_eta);
    if herm > 1e-12 * b_eta.iter().fold(1.0f64, |a, z| a.max(z.norm())) {
        return Err(Error::InvalidParams(format!("η is not real (residual {herm:.3e})")));
    }
    let basis = fiber.basis();
    let s2 = fiber.norm_sq(s);
    let trace = (fiber.trace(&beta)? - c64(s2, 0.0)).norm();

    let omega = fiber.kaehler_form();
    let mut lhs = eta.wedge(s, basis)?.wedge(&s.conj(basis), basis)?;
    for _ in 0..m - p - 1 {
        lhs = lhs.wedge(&omega, basis)?;
    }
    let lhs = lhs.scale(i_power(p * p) / factorial(m - p - 1));
    let coeff = fiber.trace(eta)? * s2 - fiber.inner(eta, &beta)? * p as f64;
    let rhs = fiber.volume_form().scale(coeff);
    let wedge = lhs.sub(&rhs)?.max_abs();

    let b = fiber.one_one_matrix(&beta)?;
    let (vals, _) = hermitian_eigen(&b);
    Ok(L1Residuals { trace, wedge, beta_min_eigen: vals[0] })
}

#[allow(dead_code)]
fn bidegree_check(mask: Mask, m: usize) -> (usize, usize) {
    bidegree_of(mask, m)
}
