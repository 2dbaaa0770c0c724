use super::{lie_closure, trace_norm, Ambient, MatrixLieSubalgebra};
use crate::conn::{connection, gamma_at, ConnectionData, ConnectionKind};
use crate::error::{Error, Result};
use crate::linalg::{complexify_unchecked, j_commutator_residual, max_abs_r, CMat, RMat, RankTol, C64};
use crate::models::ManifoldModel;
use serde::Serialize;

/// Rank threshold for finite-difference models; curvature noise sits near 1e-7.
pub const HOLONOMY_FD_TOL: RankTol = RankTol { rel: 1e-6, abs: 1e-5 };
const TRANSPORT_STEP: f64 = 0.05;
const RK4_STEPS: usize = 8;

#[derive(Debug, Clone, Serialize)]
pub struct HolonomyApprox {
    pub algebra: MatrixLieSubalgebra,
    /// Closure dimension using generators up to each order.
    pub dims_by_order: Vec<usize>,
    /// Dimension unchanged between the last two orders, or already maximal.
    pub stable: bool,
    pub exact: bool,
}

/// Real displacement `v` (frame coordinates) added to a point.
fn displaced(model: &ManifoldModel, z: &[C64], v: &[f64], t: f64) -> Vec<C64> {
    let m = model.m;
    z.iter().enumerate().map(|(i, w)| w + C64::new(t * v[i], t * v[m + i])).collect()
}

/// Parallel transport matrix along `t ↦ z + t v`, `t ∈ [0, 1]`, by RK4:
/// frame coefficients at the start map to coefficients at the end.
fn transport(model: &ManifoldModel, kind: ConnectionKind, z: &[C64], v: &[f64]) -> Result<RMat> {
    let n = 2 * model.m;
    let rhs = |t: f64, p: &RMat| -> Result<RMat> {
        let gamma = gamma_at(model, kind, &displaced(model, z, v, t))?;
        let mut gv = RMat::zeros(n, n);
        for (a, g) in gamma.iter().enumerate() {
            if v[a] != 0.0 {
                gv += g * v[a];
            }
        }
        Ok(-(gv * p))
    };
    let mut p = RMat::identity(n, n);
    let dt = 1.0 / RK4_STEPS as f64;
    for s in 0..RK4_STEPS {
        let t = s as f64 * dt;
        let k1 = rhs(t, &p)?;
        let k2 = rhs(t + dt / 2.0, &(&p + &k1 * (dt / 2.0)))?;
        let k3 = rhs(t + dt / 2.0, &(&p + &k2 * (dt / 2.0)))?;
        let k4 = rhs(t + dt, &(&p + &k3 * dt))?;
        p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    Ok(p)
}

/// Covariant derivatives of the curvature along Lie directions, where every
/// component is constant along the flow and `∇` is purely algebraic.
/// `levels[k]` has `n^(k+2)` entries; `None` marks chart-direction slots.
fn lie_derivatives(cd: &ConnectionData, lie: &[bool], order: usize) -> Result<Vec<Vec<Option<RMat>>>> {
    let n = cd.n();
    let mixed = lie.iter().any(|&b| b) && lie.iter().any(|&b| !b);
    if mixed && order >= 2 {
        for d in (0..n).filter(|&d| lie[d]) {
            for b in (0..n).filter(|&b| lie[b]) {
                for e in (0..n).filter(|&e| !lie[e]) {
                    if cd.gamma[d][(e, b)].abs() > 1e-12 {
                        return Err(Error::Consistency("connection couples Lie and chart directions".into()));
                    }
                }
            }
        }
    }
    let mut levels: Vec<Vec<Option<RMat>>> = vec![cd.curvature.iter().cloned().map(Some).collect()];
    for k in 1..=order {
        let prev = &levels[k - 1];
        let rank = k + 1;
        let stride = n.pow(rank as u32);
        let mut next = vec![None; n * stride];
        for d in (0..n).filter(|&d| lie[d]) {
            let g = &cd.gamma[d];
            for code in 0..stride {
                let Some(s) = &prev[code] else { continue };
                let mut out = g * s - s * g;
                let mut digits = vec![0usize; rank];
                let mut c = code;
                for slot in (0..rank).rev() {
                    digits[slot] = c % n;
                    c /= n;
                }
                for slot in 0..rank {
                    let b = digits[slot];
                    let place = n.pow((rank - 1 - slot) as u32);
                    for e in 0..n {
                        let coef = g[(e, b)];
                        if coef == 0.0 {
                            continue;
                        }
                        let other = code - b * place + e * place;
                        if let Some(t) = &prev[other] {
                            out -= t * coef;
                        }
                    }
                }
                next[d * stride + code] = Some(out);
            }
        }
        levels.push(next);
    }
    Ok(levels)
}

/// Lie closure of curvature endomorphisms at the base point, curvature
/// transported back from nearby chart points, and algebraic covariant
/// derivatives along Lie directions; `order` bounds both enlargements.
pub fn holonomy_algebra(model: &ManifoldModel, kind: ConnectionKind, base: &[C64], order: usize) -> Result<HolonomyApprox> {
    if order > 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    let m = model.m;
    let n = 2 * m;
    let exact = model.is_invariant();
    let base: Vec<C64> = if exact { model.base_point() } else { base.to_vec() };
    let cd0 = connection(model, kind, &base)?;
    let frame = cd0.orthonormal_frame();
    let frame_inv = frame.clone().try_inverse().ok_or(Error::SingularMetric)?;
    let lie: Vec<bool> = (0..n).map(|a| model.is_lie_direction(a)).collect();
    let chart: Vec<usize> = (0..n).filter(|&a| !lie[a]).collect();

    // (stencil level, displacement)
    let mut stencil: Vec<(usize, Vec<f64>)> = vec![(0, vec![0.0; n])];
    if order >= 1 {
        for &a in &chart {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; n];
                v[a] = s * TRANSPORT_STEP;
                stencil.push((1, v));
            }
        }
    }
    if order >= 2 {
        for (i, &a) in chart.iter().enumerate() {
            for &b in &chart[i + 1..] {
                for (sa, sb) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    let mut v = vec![0.0; n];
                    v[a] = sa * TRANSPORT_STEP;
                    v[b] = sb * TRANSPORT_STEP;
                    stencil.push((2, v));
                }
            }
        }
    }

    // generators tagged with the order at which they enter
    let mut tagged: Vec<(usize, RMat)> = Vec::new();
    for (level, v) in &stencil {
        let (cd, p) = if *level == 0 {
            (cd0.clone(), RMat::identity(n, n))
        } else {
            let z = displaced(model, &base, v, 1.0);
            (connection(model, kind, &z)?, transport(model, kind, &base, v)?)
        };
        let p_inv = p.clone().try_inverse().ok_or(Error::SingularMetric)?;
        let pull = &frame_inv * &p_inv;
        let push = &p * &frame;
        let derivs = lie_derivatives(&cd, &lie, order.saturating_sub(*level))?;
        for (k, tensors) in derivs.iter().enumerate() {
            for a in tensors.iter().flatten() {
                if max_abs_r(a) == 0.0 {
                    continue;
                }
                tagged.push((level + k, &pull * a * &push));
            }
        }
    }

    let scale = tagged.iter().map(|(_, a)| max_abs_r(a)).fold(1.0, f64::max);
    let j_linear = tagged.iter().all(|(_, a)| j_commutator_residual(a) <= 1e-6 * scale);
    let ambient = if kind.is_hermitian() || j_linear { Ambient::Unitary { m } } else { Ambient::Orthogonal { n } };
    if kind.is_hermitian() && !j_linear {
        return Err(Error::Consistency("Hermitian curvature is not complex-linear".into()));
    }
    let convert = |a: &RMat| -> CMat {
        match ambient {
            Ambient::Unitary { .. } => complexify_unchecked(&((a + a.transpose().scale(-1.0)) * 0.5)),
            Ambient::Orthogonal { .. } => ((a - a.transpose()) * 0.5).map(|x| C64::new(x, 0.0)),
        }
    };
    let tol = if exact { RankTol::EXACT } else { HOLONOMY_FD_TOL };
    let mut dims_by_order = Vec::with_capacity(order + 1);
    let mut algebra = MatrixLieSubalgebra::zero(ambient);
    for k in 0..=order {
        let gens: Vec<CMat> = tagged.iter().filter(|(lvl, _)| *lvl <= k).map(|(_, a)| convert(a)).collect();
        algebra = lie_closure(ambient, &gens, tol)?;
        dims_by_order.push(algebra.dim());
    }
    let top = *dims_by_order.last().unwrap();
    let stable = top == ambient.dim() || (order >= 1 && dims_by_order[order - 1] == top);
    algebra.provenance = vec![
        format!("curvature at {}", if exact { "identity".to_string() } else { format!("{base:?}") }),
        format!("order {order}: transported curvature (step {TRANSPORT_STEP}) and Lie-direction derivatives"),
        "bracket closure".into(),
    ];
    Ok(HolonomyApprox { algebra, dims_by_order, stable, exact })
}

#[derive(Debug, Clone, Serialize)]
pub struct RicciSuReport {
    pub max_ricci: f64,
    pub ricci_tol: f64,
    pub ricci_vanishes: bool,
    pub holonomy_dim: usize,
    pub trace_norm: f64,
    pub trace_tol: f64,
    pub in_su: bool,
    pub stable: bool,
    pub agree: bool,
}

/// Both sides of "holonomy inside `su(m)` iff Chern Ricci vanishes".
pub fn ricci_vs_su_check(model: &ManifoldModel, kind: ConnectionKind, points: &[Vec<C64>], order: usize) -> Result<RicciSuReport> {
    let exact = model.is_invariant();
    let base = points.first().cloned().unwrap_or_else(|| model.base_point());
    let hol = holonomy_algebra(model, kind, &base, order)?;
    let tn = trace_norm(&hol.algebra)?;
    let mut max_ricci: f64 = 0.0;
    let pts: Vec<Vec<C64>> = if exact || points.is_empty() { vec![base.clone()] } else { points.to_vec() };
    for z in &pts {
        max_ricci = max_ricci.max(connection(model, kind, z)?.chern_ricci_norm());
    }
    let (ricci_tol, trace_tol) = if exact { (1e-10, 1e-9) } else { (1e-5, 1e-5) };
    let ricci_vanishes = max_ricci < ricci_tol;
    let in_su = tn < trace_tol;
    Ok(RicciSuReport {
        max_ricci,
        ricci_tol,
        ricci_vanishes,
        holonomy_dim: hol.algebra.dim(),
        trace_norm: tn,
        trace_tol,
        in_su,
        stable: hol.stable,
        agree: ricci_vanishes == in_su,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;
    use crate::models::{catalog, Params};

    fn model(name: &str, m: Option<usize>) -> ManifoldModel {
        let mut p = Params::new();
        if let Some(m) = m {
            p.insert("m".into(), serde_json::json!(m));
        }
        catalog(name, &p).unwrap()
    }

    #[test]
    fn fubini_study_holonomy_is_full_unitary() {
        for m in [1, 2] {
            let fs = model("fubini-study", Some(m));
            let z = vec![c64(0.1, -0.05); m];
            let h = holonomy_algebra(&fs, ConnectionKind::LeviCivita, &z, 2).unwrap();
            assert_eq!(h.algebra.dim(), m * m, "{:?}", h.dims_by_order);
            assert!(h.stable);
        }
    }

    #[test]
    fn lie_group_chern_holonomy_is_trivial() {
        for name in ["complex-lie-group-2d", "complex-lie-group-heisenberg"] {
            let h = holonomy_algebra(&model(name, None), ConnectionKind::Chern, &[], 2).unwrap();
            assert_eq!(h.algebra.dim(), 0);
            assert!(h.exact && h.stable);
        }
    }

    #[test]
    fn transport_preserves_metric() {
        let hopf = model("hopf-surface", None);
        let z = vec![c64(1.0, 0.2), c64(0.1, 0.0)];
        let v = [0.05, 0.0, 0.0, 0.05];
        let p = transport(&hopf, ConnectionKind::Chern, &z, &v).unwrap();
        let g0 = hopf.real_metric(&z);
        let g1 = hopf.real_metric(&displaced(&hopf, &z, &v, 1.0));
        let err = max_abs_r(&(p.transpose() * g1 * &p - g0));
        // limited by the O(h²) error of the finite-difference coefficients
        assert!(err < 1e-7, "{err}");
    }

    #[test]
    fn ricci_su_agreement() {
        let fs = model("fubini-study", Some(2));
        let r = ricci_vs_su_check(&fs, ConnectionKind::Chern, &[vec![c64(0.0, 0.0); 2]], 1).unwrap();
        assert!(!r.ricci_vanishes && !r.in_su && r.agree);
        assert!((r.max_ricci - 3.0).abs() < 1e-5);
        let lie = model("complex-lie-group-2d", None);
        let r = ricci_vs_su_check(&lie, ConnectionKind::Chern, &[], 2).unwrap();
        assert!(r.ricci_vanishes && r.in_su && r.agree);
    }
}
