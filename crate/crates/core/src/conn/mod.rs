//! Levi-Civita, Chern, Bismut and Gauduchon connections of a model, with
//! torsion, curvature and covariant torsion derivative at a point.
//!
//! Everything lives in the real frame `X_a = (E_1..E_m, F_1..F_m)` with
//! `F_i = J E_i`; `(Γ_a)[k][b] = Γ^k_{ab}` means `∇_{X_a} X_b = Σ_k Γ^k_{ab} X_k`.
//! Conventions: `T(X,Y) = ∇_X Y − ∇_Y X − [X,Y]` and
//! `R_{X,Y} = ∇_X∇_Y − ∇_Y∇_X − ∇_{[X,Y]}`.

mod identities;
mod scalars;

pub use identities::{
    bianchi_residual, bismut_skew_residual, nijenhuis, parallel_torsion_residual, torsion_nijenhuis_residual, torsion_relation_residuals,
    SignConvention, TorsionRelations,
};
pub use scalars::{curvature_scalars, CurvatureScalars};

use crate::error::{Error, Result};
use crate::fiber::{KaehlerCurvature, Provenance};
use crate::linalg::{complexify_unchecked, hermitian_power, j_matrix, max_abs_r, realify, CMat, RMat, C64, IM};
use crate::models::{real_metric_jet, ManifoldModel};
use serde::{Deserialize, Serialize};

/// Sign in front of `½ dω(J·,J·,J·)` in the Bismut connection, fixed by `∇J = 0`.
const BISMUT_SIGN: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConnectionKind {
    LeviCivita,
    Chern,
    Bismut,
    Gauduchon { t: f64 },
}

impl ConnectionKind {
    pub fn parse(name: &str, t: Option<f64>) -> Result<Self> {
        match (name, t) {
            ("levi-civita", None) => Ok(Self::LeviCivita),
            ("chern", None) => Ok(Self::Chern),
            ("bismut", None) => Ok(Self::Bismut),
            ("gauduchon", Some(t)) if t.is_finite() => Ok(Self::Gauduchon { t }),
            ("gauduchon", _) => Err(Error::InvalidParams("gauduchon needs a finite t".into())),
            (other, Some(_)) if ["levi-civita", "chern", "bismut"].contains(&other) => {
                Err(Error::InvalidParams(format!("t is only meaningful for gauduchon, not {other}")))
            }
            (other, _) => Err(Error::InvalidParams(format!("unknown connection kind '{other}' (levi-civita, chern, bismut, gauduchon)"))),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        !matches!(self, Self::LeviCivita)
    }

    pub fn label(&self) -> String {
        match self {
            Self::LeviCivita => "levi-civita".into(),
            Self::Chern => "chern".into(),
            Self::Bismut => "bismut".into(),
            Self::Gauduchon { t } => format!("gauduchon(t={t})"),
        }
    }
}

/// Connection, torsion and curvature of one kind at one point.
#[derive(Debug, Clone)]
pub struct ConnectionData {
    pub kind: ConnectionKind,
    /// `None` on left-invariant models, where nothing depends on the point.
    pub point: Option<Vec<C64>>,
    pub m: usize,
    /// True when no finite differences entered the computation.
    pub exact: bool,
    pub fd_step: f64,
    pub metric: CMat,
    pub real_metric: RMat,
    pub metric_derivative: Vec<RMat>,
    /// `[(a*n + b)*n + k] = c^k_{ab}` for the real frame.
    pub brackets: Vec<f64>,
    pub gamma: Vec<RMat>,
    /// `gamma_derivative[d][a] = X_d Γ_a`
    pub gamma_derivative: Vec<Vec<RMat>>,
    /// `[(a*n + b)*n + k] = T^k_{ab}`
    pub torsion: Vec<f64>,
    /// `[((d*n + a)*n + b)*n + k] = ((∇_{X_d} T)(X_a, X_b))^k`
    pub torsion_derivative: Vec<f64>,
    /// `curvature[a*n + b] = R_{X_a, X_b}` as a matrix acting on frame coefficients.
    pub curvature: Vec<RMat>,
}

/// `G(∇_{X_a} X_b, X_l)` stored as `[l][b]`, linear in `(G, dG)` jointly.
fn lowered(kind: ConnectionKind, m: usize, g: &RMat, dg: &[RMat], c: &[f64]) -> Vec<RMat> {
    match kind {
        ConnectionKind::LeviCivita => levi_civita_lowered(m, g, dg, c),
        ConnectionKind::Chern => chern_lowered(m, dg),
        ConnectionKind::Bismut => bismut_lowered(m, g, dg, c),
        ConnectionKind::Gauduchon { t } => {
            let ch = chern_lowered(m, dg);
            let bi = bismut_lowered(m, g, dg, c);
            ch.iter().zip(&bi).map(|(a, b)| a * (1.0 - t / 2.0) + b * (t / 2.0)).collect()
        }
    }
}

fn levi_civita_lowered(m: usize, g: &RMat, dg: &[RMat], c: &[f64]) -> Vec<RMat> {
    let n = 2 * m;
    let cg = |a: usize, b: usize, l: usize| -> f64 { (0..n).map(|p| c[(a * n + b) * n + p] * g[(p, l)]).sum() };
    (0..n)
        .map(|a| {
            RMat::from_fn(n, n, |l, b| 0.5 * (dg[a][(b, l)] + dg[b][(a, l)] - dg[l][(a, b)] + cg(a, b, l) - cg(a, l, b) - cg(b, l, a)))
        })
        .collect()
}

/// `A_iᵀ h = ∂_i h` in the holomorphic frame, so the lowered coefficients are
/// `2 realify((∂_i h)ᵀ)` along `E_i` and `2 realify(i (∂_i h)ᵀ)` along `F_i`.
fn chern_lowered(m: usize, dg: &[RMat]) -> Vec<RMat> {
    let n = 2 * m;
    let mut out = vec![RMat::zeros(n, n); n];
    for i in 0..m {
        // h = conj(complexify(G))/2, ∂_i = (X_i − i X_{m+i})/2
        let dx = complexify_unchecked(&dg[i]).map(|z| z.conj() * 0.5);
        let dy = complexify_unchecked(&dg[m + i]).map(|z| z.conj() * 0.5);
        let dh = (dx - dy * IM) * C64::new(0.5, 0.0);
        let t = dh.transpose();
        out[i] = realify(&t) * 2.0;
        out[m + i] = realify(&(t * IM)) * 2.0;
    }
    out
}

/// `dω(X_a, X_b, X_c)` with `ω(X, Y) = G(JX, Y)`, bracket terms included.
fn d_omega(m: usize, g: &RMat, dg: &[RMat], c: &[f64]) -> Vec<f64> {
    let n = 2 * m;
    let j = j_matrix(m);
    let omega = j.transpose() * g;
    let domega: Vec<RMat> = dg.iter().map(|d| j.transpose() * d).collect();
    let w_br = |a: usize, b: usize, l: usize| -> f64 { (0..n).map(|p| c[(a * n + b) * n + p] * omega[(p, l)]).sum() };
    let mut out = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for l in 0..n {
                out[(a * n + b) * n + l] =
                    domega[a][(b, l)] - domega[b][(a, l)] + domega[l][(a, b)] - w_br(a, b, l) + w_br(a, l, b) - w_br(b, l, a);
            }
        }
    }
    out
}

fn bismut_lowered(m: usize, g: &RMat, dg: &[RMat], c: &[f64]) -> Vec<RMat> {
    let n = 2 * m;
    let mut out = levi_civita_lowered(m, g, dg, c);
    let dw = d_omega(m, g, dg, c);
    let j = j_matrix(m);
    // H_{abl} = dω(JX_a, JX_b, JX_l); J has one nonzero per column.
    let jcol = |a: usize| -> (usize, f64) {
        if a < m {
            (a + m, 1.0)
        } else {
            (a - m, -1.0)
        }
    };
    debug_assert!(j[(jcol(0).0, 0)] == jcol(0).1);
    for (a, low) in out.iter_mut().enumerate() {
        let (pa, sa) = jcol(a);
        for b in 0..n {
            let (pb, sb) = jcol(b);
            for l in 0..n {
                let (pl, sl) = jcol(l);
                low[(l, b)] += BISMUT_SIGN * 0.5 * sa * sb * sl * dw[(pa * n + pb) * n + pl];
            }
        }
    }
    out
}

fn torsion_of(gamma: &[RMat], c: &[f64], n: usize) -> Vec<f64> {
    let mut t = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for k in 0..n {
                t[(a * n + b) * n + k] = gamma[a][(k, b)] - gamma[b][(k, a)] - c[(a * n + b) * n + k];
            }
        }
    }
    t
}

/// Connection coefficients from a first-order jet at `z`.
pub fn gamma_at(model: &ManifoldModel, kind: ConnectionKind, z: &[C64]) -> Result<Vec<RMat>> {
    let jet = real_metric_jet(model, z, 1)?;
    let ginv = jet.g.clone().try_inverse().ok_or(Error::SingularMetric)?;
    let c = model.real_brackets();
    Ok(lowered(kind, model.m, &jet.g, &jet.dg, &c).iter().map(|l| &ginv * l).collect())
}

/// Full connection data of `kind` at `z`; on left-invariant models `z` is ignored.
pub fn connection(model: &ManifoldModel, kind: ConnectionKind, z: &[C64]) -> Result<ConnectionData> {
    let m = model.m;
    let n = 2 * m;
    let exact = model.is_invariant();
    let z: Vec<C64> = if exact { model.base_point() } else { z.to_vec() };
    let jet = real_metric_jet(model, &z, 2)?;
    let ginv = jet.g.clone().try_inverse().ok_or(Error::SingularMetric)?;
    let c = model.real_brackets();
    let gamma: Vec<RMat> = lowered(kind, m, &jet.g, &jet.dg, &c).iter().map(|l| &ginv * l).collect();

    let gamma_derivative: Vec<Vec<RMat>> = (0..n)
        .map(|d| {
            let low = lowered(kind, m, &jet.dg[d], &jet.ddg[d], &c);
            low.iter().zip(&gamma).map(|(l, g)| &ginv * (l - &jet.dg[d] * g)).collect()
        })
        .collect();

    let mut curvature = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let mut r = &gamma_derivative[a][b] - &gamma_derivative[b][a] + &gamma[a] * &gamma[b] - &gamma[b] * &gamma[a];
            for (e, ge) in gamma.iter().enumerate() {
                let ce = c[(a * n + b) * n + e];
                if ce != 0.0 {
                    r -= ge * ce;
                }
            }
            curvature.push(r);
        }
    }

    let torsion = torsion_of(&gamma, &c, n);
    let h = model.fd_step;
    let mut torsion_derivative = vec![0.0; n * n * n * n];
    for d in 0..n {
        let xd_t = if model.is_lie_direction(d) {
            vec![0.0; n * n * n]
        } else {
            let tp = torsion_of(&gamma_at(model, kind, &model.shifted(&z, d, h))?, &c, n);
            let tm = torsion_of(&gamma_at(model, kind, &model.shifted(&z, d, -h))?, &c, n);
            tp.iter().zip(&tm).map(|(p, q)| (p - q) / (2.0 * h)).collect()
        };
        let gd = &gamma[d];
        for a in 0..n {
            for b in 0..n {
                for k in 0..n {
                    let mut v = xd_t[(a * n + b) * n + k];
                    for e in 0..n {
                        v += gd[(k, e)] * torsion[(a * n + b) * n + e]
                            - gd[(e, a)] * torsion[(e * n + b) * n + k]
                            - gd[(e, b)] * torsion[(a * n + e) * n + k];
                    }
                    torsion_derivative[((d * n + a) * n + b) * n + k] = v;
                }
            }
        }
    }

    let cd = ConnectionData {
        kind,
        point: if exact { None } else { Some(z.clone()) },
        m,
        exact,
        fd_step: h,
        metric: model.metric(&z),
        real_metric: jet.g,
        metric_derivative: jet.dg,
        brackets: c,
        gamma,
        gamma_derivative,
        torsion,
        torsion_derivative,
        curvature,
    };
    if kind.is_hermitian() {
        let res = cd.j_residual();
        let scale = cd.gamma.iter().map(max_abs_r).fold(1.0, f64::max);
        if res > 1e-9 * scale {
            return Err(Error::Consistency(format!("∇J residual {res:.3e} for {}", kind.label())));
        }
    }
    Ok(cd)
}

pub fn chern(model: &ManifoldModel, z: &[C64]) -> Result<ConnectionData> {
    connection(model, ConnectionKind::Chern, z)
}

pub fn levi_civita(model: &ManifoldModel, z: &[C64]) -> Result<ConnectionData> {
    connection(model, ConnectionKind::LeviCivita, z)
}

pub fn bismut(model: &ManifoldModel, z: &[C64]) -> Result<ConnectionData> {
    connection(model, ConnectionKind::Bismut, z)
}

pub fn gauduchon(model: &ManifoldModel, z: &[C64], t: f64) -> Result<ConnectionData> {
    connection(model, ConnectionKind::Gauduchon { t }, z)
}

/// Coefficients of the complex vector `e_i = (E_i − i F_i)/2` (or its conjugate).
pub fn holomorphic_vector(m: usize, i: usize, conjugate: bool) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 2 * m];
    v[i] = C64::new(0.5, 0.0);
    v[m + i] = C64::new(0.0, if conjugate { 0.5 } else { -0.5 });
    v
}

impl ConnectionData {
    pub fn n(&self) -> usize {
        2 * self.m
    }

    #[inline]
    pub fn t(&self, a: usize, b: usize, k: usize) -> f64 {
        let n = self.n();
        self.torsion[(a * n + b) * n + k]
    }

    #[inline]
    pub fn nabla_t(&self, d: usize, a: usize, b: usize, k: usize) -> f64 {
        let n = self.n();
        self.torsion_derivative[((d * n + a) * n + b) * n + k]
    }

    pub fn r(&self, a: usize, b: usize) -> &RMat {
        &self.curvature[a * self.n() + b]
    }

    pub fn bracket(&self, a: usize, b: usize, k: usize) -> f64 {
        let n = self.n();
        self.brackets[(a * n + b) * n + k]
    }

    /// `T(u, v)` for complex frame-coefficient vectors, extended bilinearly.
    pub fn torsion_apply(&self, u: &[C64], v: &[C64]) -> Vec<C64> {
        let n = self.n();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for a in 0..n {
            if u[a] == C64::new(0.0, 0.0) {
                continue;
            }
            for b in 0..n {
                let w = u[a] * v[b];
                if w == C64::new(0.0, 0.0) {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += w * self.t(a, b, k);
                }
            }
        }
        out
    }

    /// `R_{u,v}` as a complex matrix on frame coefficients.
    pub fn curvature_apply(&self, u: &[C64], v: &[C64]) -> CMat {
        let n = self.n();
        let mut out = CMat::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let w = u[a] * v[b];
                if w != C64::new(0.0, 0.0) {
                    out += self.r(a, b).map(|x| C64::new(x, 0.0)) * w;
                }
            }
        }
        out
    }

    /// Complex-bilinear metric on frame coefficients.
    pub fn g_bilinear(&self, u: &[C64], v: &[C64]) -> C64 {
        let n = self.n();
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..n {
            for b in 0..n {
                acc += u[a] * self.real_metric[(a, b)] * v[b];
            }
        }
        acc
    }

    /// `max |X_a G − Γ_aᵀ G − G Γ_a|`
    pub fn metric_residual(&self) -> f64 {
        self.gamma
            .iter()
            .zip(&self.metric_derivative)
            .map(|(g, d)| max_abs_r(&(d - g.transpose() * &self.real_metric - &self.real_metric * g)))
            .fold(0.0, f64::max)
    }

    /// `max |[Γ_a, J]|`
    pub fn j_residual(&self) -> f64 {
        let j = j_matrix(self.m);
        self.gamma.iter().map(|g| max_abs_r(&(g * &j - &j * g))).fold(0.0, f64::max)
    }

    pub fn torsion_norm(&self) -> f64 {
        self.torsion.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn torsion_derivative_norm(&self) -> f64 {
        self.torsion_derivative.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn curvature_norm(&self) -> f64 {
        self.curvature.iter().map(max_abs_r).fold(0.0, f64::max)
    }

    /// `max |dω|` over frame triples.
    pub fn d_omega_norm(&self) -> f64 {
        d_omega(self.m, &self.real_metric, &self.metric_derivative, &self.brackets).iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    /// Columns `ε_k, Jε_k` of a `G`-orthonormal real frame adapted to `J`.
    pub fn orthonormal_frame(&self) -> RMat {
        let u = hermitian_power(&self.metric, -0.5).map(|z| z.conj());
        realify(&u) / std::f64::consts::SQRT_2
    }

    /// Complex-linear part of `R_{u,v}` restricted to `T^{1,0}`, in the basis `e_k`.
    pub fn curvature_on_10(&self, u: &[C64], v: &[C64]) -> CMat {
        let m = self.m;
        let n = self.n();
        let j = j_matrix(m).map(|x| C64::new(x, 0.0));
        let full = self.curvature_apply(u, v);
        let lin = (&full - &j * &full * &j) * C64::new(0.5, 0.0);
        // complexify: top-left + i·bottom-left, extended complex-linearly
        let tl = lin.view((0, 0), (m, m)).into_owned();
        let bl = lin.view((m, 0), (m, m)).into_owned();
        debug_assert_eq!(n, 2 * m);
        tl + bl * IM
    }

    /// `R_{ij̄kl̄} = g(R(e_i, ē_j) e_k, ē_l)` against the coordinate metric.
    pub fn complex_curvature(&self) -> KaehlerCurvature {
        let m = self.m;
        let mut r = vec![C64::new(0.0, 0.0); m.pow(4)];
        for i in 0..m {
            let ei = holomorphic_vector(m, i, false);
            for j in 0..m {
                let ej = holomorphic_vector(m, j, true);
                let mm = self.curvature_on_10(&ei, &ej);
                let g = mm.transpose() * &self.metric;
                for k in 0..m {
                    for l in 0..m {
                        r[KaehlerCurvature::idx(m, i, j, k, l)] = g[(k, l)];
                    }
                }
            }
        }
        KaehlerCurvature { m, metric: self.metric.clone(), r, provenance: Provenance::ModelDerived }
    }

    /// `Ric¹_{ij̄} = Σ_k R_{ij̄kk̄}` over a unitary frame.
    pub fn chern_ricci(&self) -> CMat {
        self.complex_curvature().ricci()
    }

    /// Largest eigenvalue modulus of `Ric¹` relative to the metric.
    pub fn chern_ricci_norm(&self) -> f64 {
        let w = hermitian_power(&self.metric, -0.5);
        let ric = self.chern_ricci();
        let rel = &w * ric * &w;
        let rel = (&rel + rel.adjoint()) * C64::new(0.5, 0.0);
        crate::linalg::hermitian_eigen(&rel).0.iter().fold(0.0, |a: f64, x| a.max(x.abs()))
    }

    /// `T(e_i, e_j)` and `T(e_i, ē_j)` split into `(1,0)` and `(0,1)` parts.
    pub fn complex_torsion(&self, i: usize, j: usize, mixed: bool) -> (Vec<C64>, Vec<C64>) {
        let m = self.m;
        let v = self.torsion_apply(&holomorphic_vector(m, i, false), &holomorphic_vector(m, j, mixed));
        split_types(m, &v)
    }
}

/// `(1,0)` and `(0,1)` coefficients of a complex frame vector.
pub fn split_types(m: usize, v: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let hol = (0..m).map(|k| v[k] + IM * v[m + k]).collect();
    let anti = (0..m).map(|k| v[k] - IM * v[m + k]).collect();
    (hol, anti)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, ZERO};
    use crate::models::{catalog, Params};

    fn params(json: serde_json::Value) -> Params {
        json.as_object().unwrap().clone()
    }

    #[test]
    fn flat_everything_vanishes() {
        let model = catalog("flat", &Params::new()).unwrap();
        for kind in [ConnectionKind::LeviCivita, ConnectionKind::Chern, ConnectionKind::Bismut] {
            let cd = connection(&model, kind, &[c64(0.1, 0.0), c64(0.0, -0.2)]).unwrap();
            assert!(cd.gamma.iter().all(|g| max_abs_r(g) < 1e-12));
            assert!(cd.torsion_norm() < 1e-12 && cd.curvature_norm() < 1e-12);
        }
    }

    #[test]
    fn hermitian_kinds_preserve_j_and_g() {
        let model = catalog("hopf-surface", &Params::new()).unwrap();
        let z = [c64(0.9, 0.3), c64(-0.2, 0.4)];
        for kind in [ConnectionKind::LeviCivita, ConnectionKind::Chern, ConnectionKind::Bismut, ConnectionKind::Gauduchon { t: 0.7 }] {
            let cd = connection(&model, kind, &z).unwrap();
            assert!(cd.metric_residual() < 1e-12, "{kind:?}");
            if kind.is_hermitian() {
                assert!(cd.j_residual() < 1e-12, "{kind:?}");
            }
        }
    }

    #[test]
    fn bismut_torsion_is_totally_skew() {
        let model = catalog("hopf-surface", &Params::new()).unwrap();
        let cd = bismut(&model, &[c64(1.0, 0.0), ZERO]).unwrap();
        assert!(cd.torsion_norm() > 0.1);
        assert!(bismut_skew_residual(&cd) < 1e-10);
    }

    #[test]
    fn fubini_study_curvature_matches_closed_form() {
        let model = catalog("fubini-study", &params(serde_json::json!({"m": 2}))).unwrap();
        let cd = chern(&model, &[ZERO, ZERO]).unwrap();
        let r = cd.complex_curvature();
        let oracle = KaehlerCurvature::fubini_study(&CMat::identity(2, 2));
        let diff = r.r.iter().zip(&oracle.r).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-6, "{diff}");
        assert!(cd.torsion_norm() < 1e-8);
    }

    #[test]
    fn lie_group_chern_torsion_is_minus_brackets() {
        let model = catalog("complex-lie-group-2d", &Params::new()).unwrap();
        let cd = chern(&model, &[]).unwrap();
        assert!(cd.exact && cd.point.is_none());
        assert!(cd.curvature_norm() == 0.0);
        let (hol, anti) = cd.complex_torsion(0, 1, false);
        assert!((hol[1] + 1.0).norm() < 1e-15 && hol[0].norm() < 1e-15);
        assert!(anti.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn gauduchon_endpoints_and_affinity() {
        let model = catalog("hopf-surface", &Params::new()).unwrap();
        let z = [c64(1.1, -0.2), c64(0.3, 0.1)];
        let c = chern(&model, &z).unwrap();
        let b = bismut(&model, &z).unwrap();
        let g0 = gauduchon(&model, &z, 0.0).unwrap();
        let g1 = gauduchon(&model, &z, 1.0).unwrap();
        let g2 = gauduchon(&model, &z, 2.0).unwrap();
        for a in 0..4 {
            assert!(max_abs_r(&(&g0.gamma[a] - &c.gamma[a])) < 1e-12);
            assert!(max_abs_r(&(&g2.gamma[a] - &b.gamma[a])) < 1e-12);
            assert!(max_abs_r(&(&g1.gamma[a] - (&c.gamma[a] + &b.gamma[a]) * 0.5)) < 1e-12);
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(ConnectionKind::parse("gauduchon", Some(0.5)).unwrap(), ConnectionKind::Gauduchon { t: 0.5 });
        assert!(ConnectionKind::parse("gauduchon", None).is_err());
        assert!(ConnectionKind::parse("chern", Some(1.0)).is_err());
        let json = serde_json::to_string(&ConnectionKind::Gauduchon { t: 0.5 }).unwrap();
        assert_eq!(json, r#"{"kind":"gauduchon","t":0.5}"#);
    }
}
