use super::{holomorphic_vector, ConnectionData, ConnectionKind};
use crate::error::{Error, Result};
use crate::linalg::{j_matrix, C64};
use crate::models::ManifoldModel;
use serde::{Deserialize, Serialize};

/// `N(X_a, X_b)^k` stored as `[(a*n + b)*n + k]`, from the frame brackets with
/// `N(X,Y) = [JX,JY] − [X,Y] − J[X,JY] − J[JX,Y]`.
pub fn nijenhuis(model: &ManifoldModel) -> Vec<f64> {
    let m = model.m;
    let n = 2 * m;
    let c = model.real_brackets();
    let j = j_matrix(m);
    let br = |u: &[f64], v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for a in 0..n {
            for b in 0..n {
                let w = u[a] * v[b];
                if w != 0.0 {
                    for (k, o) in out.iter_mut().enumerate() {
                        *o += w * c[(a * n + b) * n + k];
                    }
                }
            }
        }
        out
    };
    let apply_j = |v: &[f64]| -> Vec<f64> { (0..n).map(|k| (0..n).map(|p| j[(k, p)] * v[p]).sum()).collect() };
    let unit = |a: usize| -> Vec<f64> { (0..n).map(|k| if k == a { 1.0 } else { 0.0 }).collect() };
    let mut out = vec![0.0; n * n * n];
    for a in 0..n {
        let x = unit(a);
        let jx = apply_j(&x);
        for b in 0..n {
            let y = unit(b);
            let jy = apply_j(&y);
            let t1 = br(&jx, &jy);
            let t2 = br(&x, &y);
            let t3 = apply_j(&br(&x, &jy));
            let t4 = apply_j(&br(&jx, &y));
            for k in 0..n {
                out[(a * n + b) * n + k] = t1[k] - t2[k] - t3[k] - t4[k];
            }
        }
    }
    out
}

/// `max |T_{X,Y} − T_{JX,JY} + J(T_{X,JY} + T_{JX,Y}) − N(X,Y)|` over frame pairs.
pub fn torsion_nijenhuis_residual(cd: &ConnectionData, nij: &[f64]) -> f64 {
    let m = cd.m;
    let n = cd.n();
    // J X_a = s X_{p}
    let jmap = |a: usize| -> (usize, f64) {
        if a < m {
            (a + m, 1.0)
        } else {
            (a - m, -1.0)
        }
    };
    let mut worst: f64 = 0.0;
    for a in 0..n {
        let (ja, sa) = jmap(a);
        for b in 0..n {
            let (jb, sb) = jmap(b);
            let mut inner = vec![0.0; n];
            for (k, v) in inner.iter_mut().enumerate() {
                *v = sb * cd.t(a, jb, k) + sa * cd.t(ja, b, k);
            }
            for k in 0..n {
                // (J v)_k = Σ_p J[k][p] v_p, J[k][p] nonzero only at p = jmap^{-1}(k)
                let jv = if k < m { -inner[k + m] } else { inner[k - m] };
                let lhs = cd.t(a, b, k) - sa * sb * cd.t(ja, jb, k) + jv;
                worst = worst.max((lhs - nij[(a * n + b) * n + k]).abs());
            }
        }
    }
    worst
}

/// Max over frame triples of `|G(T(x,y),z) + G(T(x,z),y)|`.
pub fn bismut_skew_residual(cd: &ConnectionData) -> f64 {
    let n = cd.n();
    let g = &cd.real_metric;
    let low = |a: usize, b: usize, c: usize| -> f64 { (0..n).map(|k| cd.t(a, b, k) * g[(k, c)]).sum() };
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                worst = worst.max((low(a, b, c) + low(a, c, b)).abs());
            }
        }
    }
    worst
}

/// Max over frame triples of `|𝔖{(∇_x T)(y,z) − R_{xy}z − T(x,T(y,z))}|`; without
/// the derivative term this is the parallel-torsion form of the identity.
pub fn bianchi_residual(cd: &ConnectionData, with_derivative: bool) -> f64 {
    let n = cd.n();
    let term = |x: usize, y: usize, z: usize, k: usize| -> f64 {
        let mut v = -cd.r(x, y)[(k, z)];
        for e in 0..n {
            v -= cd.t(y, z, e) * cd.t(x, e, k);
        }
        if with_derivative {
            v += cd.nabla_t(x, y, z, k);
        }
        v
    };
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for k in 0..n {
                    let s = term(a, b, c, k) + term(b, c, a, k) + term(c, a, b, k);
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

/// Max of `|∇T|` over the given points.
pub fn parallel_torsion_residual(model: &ManifoldModel, kind: ConnectionKind, points: &[Vec<C64>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    if model.is_invariant() {
        return Ok(super::connection(model, kind, &[])?.torsion_derivative_norm());
    }
    for z in points {
        worst = worst.max(super::connection(model, kind, z)?.torsion_derivative_norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConvention {
    /// The relations hold as written.
    Literal,
    /// They hold after replacing the Bismut torsion by its negative.
    Flipped,
    /// Both torsions vanish, so the data cannot tell.
    Indeterminate,
}

#[derive(Debug, Clone, Serialize)]
pub struct TorsionRelations {
    pub literal: [f64; 3],
    pub flipped: [f64; 3],
    pub convention: SignConvention,
    /// Residuals under the detected convention.
    pub residuals: [f64; 3],
}

/// The three relations between Bismut torsion `T` and Chern torsion `T^c` on
/// `(1,0)` frame triples, with `⟨·,·⟩` the complex-bilinear metric:
/// `⟨T_{X,Y}, Z̄⟩ = −⟨T^c_{X,Y}, Z̄⟩`, `⟨T_{X̄,Y}, Z̄⟩ = ⟨conj T^c_{X,Z}, Y⟩`,
/// `⟨T_{X̄,Y}, Z⟩ = −⟨T^c_{Y,Z}, X̄⟩`.
pub fn torsion_relation_residuals(bismut: &ConnectionData, chern: &ConnectionData) -> Result<TorsionRelations> {
    if bismut.kind != ConnectionKind::Bismut || chern.kind != ConnectionKind::Chern {
        return Err(Error::InvalidParams("expected Bismut and Chern connection data".into()));
    }
    if bismut.m != chern.m || bismut.point != chern.point {
        return Err(Error::PointMismatch);
    }
    let m = bismut.m;
    let e = |i: usize| holomorphic_vector(m, i, false);
    let eb = |i: usize| holomorphic_vector(m, i, true);
    let conj = |v: Vec<C64>| -> Vec<C64> { v.into_iter().map(|z| z.conj()).collect() };
    let mut literal = [0.0f64; 3];
    let mut flipped = [0.0f64; 3];
    for x in 0..m {
        for y in 0..m {
            for z in 0..m {
                let g = |u: &[C64], v: &[C64]| bismut.g_bilinear(u, v);
                let pairs = [
                    (g(&bismut.torsion_apply(&e(x), &e(y)), &eb(z)), -g(&chern.torsion_apply(&e(x), &e(y)), &eb(z))),
                    (g(&bismut.torsion_apply(&eb(x), &e(y)), &eb(z)), g(&conj(chern.torsion_apply(&e(x), &e(z))), &e(y))),
                    (g(&bismut.torsion_apply(&eb(x), &e(y)), &e(z)), -g(&chern.torsion_apply(&e(y), &e(z)), &eb(x))),
                ];
                for (r, (lhs, rhs)) in pairs.iter().enumerate() {
                    literal[r] = literal[r].max((lhs - rhs).norm());
                    flipped[r] = flipped[r].max((-lhs - rhs).norm());
                }
            }
        }
    }
    let lit = literal.iter().cloned().fold(0.0, f64::max);
    let fl = flipped.iter().cloned().fold(0.0, f64::max);
    let scale = bismut.torsion_norm().max(chern.torsion_norm());
    let (convention, residuals) = if scale < 1e-9 {
        (SignConvention::Indeterminate, literal)
    } else if lit <= fl {
        (SignConvention::Literal, literal)
    } else {
        (SignConvention::Flipped, flipped)
    };
    Ok(TorsionRelations { literal, flipped, convention, residuals })
}
