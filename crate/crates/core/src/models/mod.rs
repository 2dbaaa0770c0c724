//! Manifold backends: left-invariant structures on complex Lie groups, metrics
//! on coordinate charts, and products of both.
//!
//! Every model is presented through one frame: complex index `i` is either a
//! left-invariant holomorphic field (Lie direction) or a coordinate field
//! `∂_i` (chart direction). The metric depends on chart coordinates only, and
//! brackets are constant and vanish between different factors.

mod catalog;
mod jet;

pub use catalog::{catalog, catalog_names, Params};
pub use jet::{metric_jet, real_metric_jet, MetricJet, RealMetricJet};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, max_abs_c, realify, CMat, RMat, C64, ZERO};
use rand::RngCore;
use std::sync::Arc;

pub type MetricFn = Arc<dyn Fn(&[C64]) -> CMat + Send + Sync>;
pub type MarginFn = Arc<dyn Fn(&[C64]) -> f64 + Send + Sync>;
pub type SampleFn = Arc<dyn Fn(&mut dyn RngCore) -> Vec<C64> + Send + Sync>;

pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Complex Lie algebra with structure constants `[e_i, e_j] = Σ c^k_{ij} e_k`
/// and a Hermitian metric at the identity.
#[derive(Debug, Clone)]
pub struct LieGroupModel {
    pub m: usize,
    /// `c[(i*m + j)*m + k] = c^k_{ij}`
    pub structure_constants: Vec<C64>,
    pub metric: CMat,
}

impl LieGroupModel {
    pub fn new(m: usize, structure_constants: Vec<C64>, metric: CMat) -> Result<Self> {
        if structure_constants.len() != m * m * m || metric.shape() != (m, m) {
            return Err(Error::DimensionMismatch(format!("structure data does not match m = {m}")));
        }
        let model = Self { m, structure_constants, metric };
        let anti = model.antisymmetry_residual();
        if anti > 1e-12 {
            return Err(Error::InvalidParams(format!("structure constants not antisymmetric ({anti:.3e})")));
        }
        let jac = model.jacobi_residual();
        if jac > 1e-12 {
            return Err(Error::InvalidParams(format!("Jacobi identity fails ({jac:.3e})")));
        }
        validate_metric(&model.metric)?;
        Ok(model)
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> C64 {
        self.structure_constants[(i * self.m + j) * self.m + k]
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let m = self.m;
        let mut r: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    r = r.max((self.c(i, j, k) + self.c(j, i, k)).norm());
                }
            }
        }
        r
    }

    pub fn jacobi_residual(&self) -> f64 {
        let m = self.m;
        let mut r: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for s in 0..m {
                        let mut acc = ZERO;
                        for l in 0..m {
                            acc +=
                                self.c(i, j, l) * self.c(l, k, s) + self.c(j, k, l) * self.c(l, i, s) + self.c(k, i, l) * self.c(l, j, s);
                        }
                        r = r.max(acc.norm());
                    }
                }
            }
        }
        r
    }
}

/// Hermitian metric on a coordinate box/annulus with central differences.
#[derive(Clone)]
pub struct ChartModel {
    pub m: usize,
    pub metric_fn: MetricFn,
    /// Distance to the domain boundary; positive inside.
    pub margin_fn: MarginFn,
    pub sampler: SampleFn,
    pub base_point: Vec<C64>,
}

impl std::fmt::Debug for ChartModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChartModel").field("m", &self.m).field("base_point", &self.base_point).finish()
    }
}

#[derive(Debug, Clone)]
pub enum Factor {
    Lie(LieGroupModel),
    Chart(ChartModel),
}

impl Factor {
    pub fn m(&self) -> usize {
        match self {
            Factor::Lie(l) => l.m,
            Factor::Chart(c) => c.m,
        }
    }
}

/// A catalog model: one factor, or a Riemannian product of several.
#[derive(Debug, Clone)]
pub struct ManifoldModel {
    pub name: String,
    pub m: usize,
    pub factors: Vec<Factor>,
    pub fd_step: f64,
    /// Property tags to be re-verified, never assumed.
    pub expected: Vec<String>,
    structure: Vec<C64>,
    lie: Vec<bool>,
    offsets: Vec<usize>,
}

impl ManifoldModel {
    pub fn new(name: &str, factors: Vec<Factor>, expected: Vec<String>) -> Self {
        let m: usize = factors.iter().map(Factor::m).sum();
        let mut structure = vec![ZERO; m * m * m];
        let mut lie = vec![false; m];
        let mut offsets = Vec::with_capacity(factors.len());
        let mut off = 0;
        for f in &factors {
            offsets.push(off);
            if let Factor::Lie(l) = f {
                for i in 0..l.m {
                    lie[off + i] = true;
                    for j in 0..l.m {
                        for k in 0..l.m {
                            structure[((off + i) * m + off + j) * m + off + k] = l.c(i, j, k);
                        }
                    }
                }
            }
            off += f.m();
        }
        Self { name: name.to_string(), m, factors, fd_step: DEFAULT_FD_STEP, expected, structure, lie, offsets }
    }

    pub fn with_fd_step(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0 && h < 0.1) {
            return Err(Error::InvalidParams(format!("fd_step {h} outside (0, 0.1)")));
        }
        self.fd_step = h;
        Ok(self)
    }

    /// True when every direction is left-invariant: all tensors are constant.
    pub fn is_invariant(&self) -> bool {
        self.lie.iter().all(|&b| b)
    }

    pub fn is_lie_direction(&self, i: usize) -> bool {
        self.lie[i % self.m]
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> C64 {
        self.structure[(i * self.m + j) * self.m + k]
    }

    pub fn structure_constants(&self) -> &[C64] {
        &self.structure
    }

    pub fn factor_offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// Complex metric `h_{ij̄}` at a point (Lie coordinates are ignored).
    pub fn metric(&self, z: &[C64]) -> CMat {
        let mut h = CMat::zeros(self.m, self.m);
        for (f, &off) in self.factors.iter().zip(&self.offsets) {
            let block = match f {
                Factor::Lie(l) => l.metric.clone(),
                Factor::Chart(c) => (c.metric_fn)(&z[off..off + c.m]),
            };
            h.view_mut((off, off), (f.m(), f.m())).copy_from(&block);
        }
        h
    }

    /// Riemannian metric in the real frame `(E_1..E_m, F_1..F_m)`, `F = J E`.
    pub fn real_metric(&self, z: &[C64]) -> RMat {
        realify(&self.metric(z).map(|x| x.conj())) * 2.0
    }

    /// Real brackets `[X_a, X_b] = Σ_k out[(a*n+b)*n+k] X_k` of the real frame.
    pub fn real_brackets(&self) -> Vec<f64> {
        let m = self.m;
        let n = 2 * m;
        let mut out = vec![0.0; n * n * n];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let c = self.c(i, j, k);
                    if c == ZERO {
                        continue;
                    }
                    let mut set = |a: usize, b: usize, kk: usize, v: f64| out[(a * n + b) * n + kk] += v;
                    // [E,E] = Re c E + Im c F
                    set(i, j, k, c.re);
                    set(i, j, m + k, c.im);
                    // [E,F] = -Im c E + Re c F
                    set(i, m + j, k, -c.im);
                    set(i, m + j, m + k, c.re);
                    // [F,E] = -[E_j, F_i]
                    set(m + j, i, k, c.im);
                    set(m + j, i, m + k, -c.re);
                    // [F,F] = -(Re c E + Im c F)
                    set(m + i, m + j, k, -c.re);
                    set(m + i, m + j, m + k, -c.im);
                }
            }
        }
        out
    }

    /// Distance of a point to the chart boundaries (infinite for pure Lie models).
    pub fn margin(&self, z: &[C64]) -> f64 {
        let mut margin = f64::INFINITY;
        for (f, &off) in self.factors.iter().zip(&self.offsets) {
            if let Factor::Chart(c) = f {
                margin = margin.min((c.margin_fn)(&z[off..off + c.m]));
            }
        }
        margin
    }

    pub fn check_interior(&self, z: &[C64], order: usize) -> Result<()> {
        if z.len() != self.m {
            return Err(Error::DimensionMismatch(format!("point has {} coordinates, model has m = {}", z.len(), self.m)));
        }
        let need = 2.0 * self.fd_step * order.max(1) as f64;
        if self.margin(z) < need {
            return Err(Error::TooCloseToBoundary { margin: need });
        }
        Ok(())
    }

    pub fn base_point(&self) -> Vec<C64> {
        let mut z = vec![ZERO; self.m];
        for (f, &off) in self.factors.iter().zip(&self.offsets) {
            if let Factor::Chart(c) = f {
                z[off..off + c.m].copy_from_slice(&c.base_point);
            }
        }
        z
    }

    pub fn sample_point(&self, rng: &mut dyn RngCore) -> Vec<C64> {
        let mut z = vec![ZERO; self.m];
        for (f, &off) in self.factors.iter().zip(&self.offsets) {
            if let Factor::Chart(c) = f {
                let s = (c.sampler)(rng);
                z[off..off + c.m].copy_from_slice(&s);
            }
        }
        z
    }

    /// Point shifted along real frame direction `a` (x_i for `a < m`, y_i otherwise).
    pub fn shifted(&self, z: &[C64], a: usize, t: f64) -> Vec<C64> {
        let mut w = z.to_vec();
        if a < self.m {
            w[a].re += t;
        } else {
            w[a - self.m].im += t;
        }
        w
    }

    /// `X_a(G)` by central differences; zero along Lie directions.
    pub fn real_metric_derivative(&self, z: &[C64], a: usize) -> RMat {
        let n = 2 * self.m;
        if self.is_lie_direction(a) {
            return RMat::zeros(n, n);
        }
        let h = self.fd_step;
        (self.real_metric(&self.shifted(z, a, h)) - self.real_metric(&self.shifted(z, a, -h))) / (2.0 * h)
    }
}

pub(crate) fn validate_metric(h: &CMat) -> Result<()> {
    let asym = max_abs_c(&(h - h.adjoint()));
    if asym > 1e-12 * max_abs_c(h).max(1.0) {
        return Err(Error::InvalidParams(format!("metric not Hermitian ({asym:.3e})")));
    }
    let (vals, _) = hermitian_eigen(h);
    if vals[0] <= 1e-8 {
        return Err(Error::InvalidParams(format!("metric not positive definite (min eigenvalue {:.3e})", vals[0])));
    }
    Ok(())
}
