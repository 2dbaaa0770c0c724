use super::ConnectionData;
use crate::fiber::KaehlerCurvature;
use crate::linalg::{CMat, C64, ZERO};

/// Ricci-type and sectional-type quantities of a connection's `(1,1)` curvature.
#[derive(Debug, Clone)]
pub struct CurvatureScalars {
    /// Chern Ricci `Ric¹_{ij̄}` in coordinates.
    pub ric1: CMat,
    pub tensor: KaehlerCurvature,
}

pub fn curvature_scalars(cd: &ConnectionData) -> CurvatureScalars {
    let tensor = cd.complex_curvature();
    CurvatureScalars { ric1: tensor.ricci(), tensor }
}

impl CurvatureScalars {
    pub fn ricci(&self, x: &[C64]) -> f64 {
        let m = self.tensor.m;
        let mut acc = ZERO;
        for i in 0..m {
            for j in 0..m {
                acc += self.ric1[(i, j)] * x[i] * x[j].conj();
            }
        }
        acc.re
    }

    /// `H(X) = R(X, X̄, X, X̄)/|X|⁴`
    pub fn holomorphic_sectional(&self, x: &[C64]) -> f64 {
        self.tensor.holomorphic_sectional(x)
    }

    /// `C_{α,β}(X) = α|X|² Ric(X, X̄) + β R(X, X̄, X, X̄)`
    pub fn mixed(&self, alpha: f64, beta: f64, x: &[C64]) -> f64 {
        alpha * self.tensor.norm_sq(x) * self.ricci(x) + beta * self.tensor.eval(x, x, x, x).re
    }

    /// `Σ_{i,j} R(v_i, v̄_i, v_j, v̄_j)` over a unitary basis of the span of `vectors`.
    pub fn partial_scalar(&self, vectors: &[Vec<C64>]) -> f64 {
        let basis = orthonormalize(&self.tensor.metric, vectors);
        let mut acc = 0.0;
        for u in &basis {
            for v in &basis {
                acc += self.tensor.eval(u, u, v, v).re;
            }
        }
        acc
    }
}

/// Gram–Schmidt against `h`, dropping dependent vectors.
pub fn orthonormalize(h: &CMat, vectors: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let m = h.nrows();
    let ip = |u: &[C64], v: &[C64]| -> C64 {
        let mut acc = ZERO;
        for i in 0..m {
            for j in 0..m {
                acc += h[(i, j)] * u[i] * v[j].conj();
            }
        }
        acc
    };
    let mut out: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let c = ip(&w, u);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
        }
        let norm = ip(&w, &w).re.sqrt();
        if norm > 1e-10 {
            out.push(w.iter().map(|z| z / norm).collect());
        }
    }
    out
}
