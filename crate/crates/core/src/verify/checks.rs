use super::report::{CheckResult, Evidence, Status};
use super::{CheckId, Ctx, ModelCtx};
use crate::conn::{
    bianchi_residual, bismut_skew_residual, connection, gamma_at, holomorphic_vector, nijenhuis, split_types, torsion_nijenhuis_residual,
    torsion_relation_residuals, ConnectionData, ConnectionKind, SignConvention,
};
use crate::error::{Error, Result};
use crate::hol::{holonomy_algebra, invariant_subspaces, is_irreducible, ricci_vs_su_check, trace_norm, Ambient, HolonomyApprox};
use crate::linalg::{hermitian_power, max_abs_c, max_abs_r, CMat, CVec, C64};
use serde_json::json;
use std::sync::OnceLock;

/// Holonomy approximations use derivatives up to this order.
const HOLONOMY_ORDER: usize = 2;
/// `∇J` below this counts as a Hermitian connection.
const HERMITIAN_TOL: f64 = 1e-8;

fn cmax(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |a, z| a.max(z.norm()))
}

fn max_over<T>(items: &[T], f: impl Fn(&T) -> f64) -> f64 {
    items.iter().map(f).fold(0.0, f64::max)
}

fn data_at(mc: &ModelCtx, kind: ConnectionKind) -> Result<Vec<ConnectionData>> {
    mc.points.iter().map(|z| connection(&mc.model, kind, z)).collect()
}

/// Re-raises a cached error, keeping the variants that decide the status.
fn replay(e: &Error) -> Error {
    match e {
        Error::NotConverged(s) => Error::NotConverged(s.clone()),
        Error::UncertifiedMinimizer(x) => Error::UncertifiedMinimizer(*x),
        Error::HypothesisUnverified(s) => Error::HypothesisUnverified(s.clone()),
        Error::AmbientMismatch(s) => Error::AmbientMismatch(s.clone()),
        other => Error::Consistency(other.to_string()),
    }
}

/// Connection data at every point of a model plus a lazily computed holonomy.
pub(crate) struct PairCtx<'a> {
    pub mc: &'a ModelCtx,
    pub kind: ConnectionKind,
    data: std::result::Result<Vec<ConnectionData>, Error>,
    hol: OnceLock<std::result::Result<HolonomyApprox, Error>>,
}

impl<'a> PairCtx<'a> {
    pub fn new(mc: &'a ModelCtx, kind: ConnectionKind) -> Self {
        Self { mc, kind, data: data_at(mc, kind), hol: OnceLock::new() }
    }

    fn data(&self) -> Result<&[ConnectionData]> {
        self.data.as_deref().map_err(replay)
    }

    fn holonomy(&self) -> Result<&HolonomyApprox> {
        self.hol.get_or_init(|| holonomy_algebra(&self.mc.model, self.kind, &self.mc.points[0], HOLONOMY_ORDER)).as_ref().map_err(replay)
    }

    fn result(&self, id: CheckId) -> CheckResult {
        CheckResult::new(id, Some(self.mc.label.clone()), Some(self.kind))
    }

    fn hermitian(&self, data: &[ConnectionData]) -> bool {
        self.kind.is_hermitian() || max_over(data, |cd| cd.j_residual()) < HERMITIAN_TOL
    }
}

pub(crate) fn pair_check(ctx: &Ctx, p: &PairCtx, id: CheckId) -> Result<CheckResult> {
    match id {
        CheckId::Bianchi => bianchi(ctx, p),
        CheckId::MetricCompatibility => metric_compatibility(ctx, p),
        CheckId::TorsionNijenhuis => torsion_nijenhuis(ctx, p),
        CheckId::Holonomy => holonomy(ctx, p),
        CheckId::ParallelTorsionKaehler => parallel_torsion_kaehler(ctx, p),
        CheckId::SubbundleTorsion => subbundle_torsion(ctx, p),
        CheckId::RicciSu => ricci_su(p),
        CheckId::FdConvergence => fd_convergence(p),
        other => Err(Error::Consistency(format!("{other} is not a per-connection check"))),
    }
}

pub(crate) fn model_check(ctx: &Ctx, mc: &ModelCtx, id: CheckId) -> Result<CheckResult> {
    match id {
        CheckId::BismutSkew => bismut_skew(ctx, mc),
        CheckId::GauduchonEndpoints => gauduchon_endpoints(ctx, mc),
        CheckId::KaehlerDetection => kaehler_detection(ctx, mc),
        CheckId::TorsionRelations => torsion_relations(ctx, mc),
        CheckId::BracketJacobi => bracket_jacobi(ctx, mc),
        CheckId::TrivialHolonomy => trivial_holonomy(ctx, mc),
        CheckId::ExpectedProperties => expected_properties(ctx, mc),
        other => Err(Error::Consistency(format!("{other} is not a per-model check"))),
    }
}

fn bianchi(ctx: &Ctx, p: &PairCtx) -> Result<CheckResult> {
    let data = p.data()?;
    let (tol, src) = ctx.tol(CheckId::Bianchi, p.mc.pick(1e-10, 5e-4));
    let mut r = p.result(CheckId::Bianchi);
    r.branch = "identity".into();
    r.push(Evidence::below("bianchi-residual", max_over(data, |cd| bianchi_residual(cd, true)), tol, src));
    r.push(Evidence::measured("points", data.len() as f64));
    r.push(Evidence::measured("fd-step", if p.mc.exact() { 0.0 } else { p.mc.model.fd_step }));
    Ok(r)
}

fn metric_compatibility(ctx: &Ctx, p: &PairCtx) -> Result<CheckResult> {
    let data = p.data()?;
    let (tol, src) = ctx.tol(CheckId::MetricCompatibility, p.mc.pick(1e-12, 1e-6));
    let mut r = p.result(CheckId::MetricCompatibility);
    r.branch = "identity".into();
    r.push(Evidence::below("metric-residual", max_over(data, |cd| cd.metric_residual()), tol, src));
    let jr = max_over(data, |cd| cd.j_residual());
    if p.kind.is_hermitian() {
        r.push(Evidence::below("j-residual", jr, tol, src));
    } else {
        r.push(Evidence::measured("j-residual", jr));
    }
    Ok(r)
}

fn torsion_nijenhuis(ctx: &Ctx, p: &PairCtx) -> Result<CheckResult> {
    let data = p.data()?;
    let mut r = p.result(CheckId::TorsionNijenhuis);
    if !p.kind.is_hermitian() {
        r.status = Status::HypothesisNotMet;
        r.branch = "not-hermitian".into();
        r.push(Evidence::measured("j-residual", max_over(data, |cd| cd.j_residual())));
        return Ok(r);
    }
    let nij = nijenhuis(&p.mc.model);
    let (tol, src) = ctx.tol(CheckId::TorsionNijenhuis, p.mc.pick(1e-10, 1e-6));
    r.branch = "identity".into();
    r.push(Evidence::measured("nijenhuis-norm", nij.iter().fold(0.0, |a, x| a.max(x.abs()))));
    r.push(Evidence::below("torsion-nijenhuis-residual", max_over(data, |cd| torsion_nijenhuis_residual(cd, &nij)), tol, src));
    Ok(r)
}

fn holonomy(ctx: &Ctx, p: &PairCtx) -> Result<CheckResult> {
    let hol = p.holonomy()?;
    let (tol, src) = ctx.tol(CheckId::Holonomy, 1e-8);
    let mut r = p.result(CheckId::Holonomy);
    let dim = hol.algebra.dim();
    r.push(Evidence::below("closure-residual", hol.algebra.closure_residual(), tol, src));
    r.push(Evidence::measured("dimension", dim as f64));
    r.push(Evidence::measured("ambient-dimension", hol.algebra.ambient.dim() as f64));
    r.push(Evidence::measured("gram-min-eigen", hol.algebra.gram_min_eigen()));
    if p.kind == ConnectionKind::Chern && p.mc.model.expected.iter().any(|t| t == "chern-flat") {
        r.push(Evidence::below("chern-flat-dimension", dim as f64, 0.5, "exact"));
    }
    r.details = json!({
        "dims_by_order": hol.dims_by_order,
        "stable": hol.stable,
        "exact": hol.exact,
        "ambient": match hol.algebra.ambient { Ambient::Unitary { m } => format!("u({m})"), Ambient::Orthogonal { n } => format!("so({n})") },
    });
    if hol.stable {
        r.branch = "stable".into();
    } else {
        r.branch = "order-unstable".into();
        r.status = Status::ApproximationUnstable;
    }
    Ok(r)
}

/// Largest Chern torsion and `dω` over the points; both vanish iff Kähler.
fn kaehler_measure(chern: &[ConnectionData]) -> (f64, f64) {
    (max_over(chern, |cd| cd.torsion_norm()), max_over(chern, |cd| cd.d_omega_norm()))
}

/// A Hermitian connection with parallel torsion, irreducible holonomy and
/// nonzero first Ricci forces the metric to be Kähler. Reports the branch the
/// pair falls in; only the non-vacuous branch with a non-Kähler metric fails.
fn parallel_torsion_kaehler(ctx: &Ctx, p: &PairCtx) -> Result<CheckResult> {
    let data = p.data()?;
    let chern = if p.kind == ConnectionKind::Chern { data.to_vec() } else { data_at(p.mc, ConnectionKind::Chern)? };
    let mc = p.mc;
    let (tol, src) = ctx.tol(CheckId::ParallelTorsionKaehler, mc.pick(1e-10, 1e-6));
    let parallel_tol = mc.pick(1e-10, 1e-4);
    let ricci_tol = mc.pick(1e-10, 1e-5);
    let mut r = p.result(CheckId::ParallelTorsionKaehler);
    let (tc, dw) = kaehler_measure(&chern);
    let nabla_t = max_over(data, |cd| cd.torsion_derivative_norm());
    let ricci = max_over(data, |cd| cd.chern_ricci_norm());
    r.push(Evidence::measured("torsion-norm", max_over(data, |cd| cd.torsion_norm())));
    r.push(Evidence::measured("nabla-torsion", nabla_t));
    r.push(Evidence::measured("ricci-norm", ricci));

    let kaehler = Evidence::below("kaehler-defect", tc.max(dw), tol, src);
    if kaehler.holds == Some(true) {
        r.branch = "conclusion-kaehler".into();
        r.push(kaehler);
        return Ok(r);
    }
    // from here on the conclusion fails; the pair passes only if a hypothesis does
    r.push(Evidence { role: super::Role::Hypothesis, ..kaehler });
    if !p.hermitian(data) {
        r.branch = "not-hermitian".into();
        r.push(Evidence::hypothesis_below("j-residual", max_over(data, |cd| cd.j_residual()), HERMITIAN_TOL, "fixed"));
        return Ok(r);
    }
    let par = Evidence::hypothesis_below("nabla-torsion", nabla_t, parallel_tol, "fixed");
    let parallel = par.holds == Some(true);
    r.push(par);
    if !parallel {
        r.branch = "torsion-not-parallel".into();
        return Ok(r);
    }
    let hol = p.holonomy()?;
    r.push(Evidence::measured("holonomy-dimension", hol.algebra.dim() as f64));
    if !hol.stable {
        r.branch = "order-unstable".into();
        r.status = Status::ApproximationUnstable;
        return Ok(r);
    }
    let irr = is_irreducible(&hol.algebra);
    r.push(Evidence::measured("commutant-dimension", irr.commutant_dim() as f64));
    if !irr.is_irreducible() {
        r.branch = "reducible".into();
        return Ok(r);
    }
    let ric = Evidence::hypothesis_below("ricci-norm", ricci, ricci_tol, "fixed");
    if ric.holds == Some(true) {
        r.branch = "ricci-vanishes".into();
        r.push(ric);
        if let Ok(tn) = trace_norm(&hol.algebra) {
            r.push(Evidence::measured("holonomy-trace-norm", tn));
        }
        return Ok(r);
    }
    r.push(ric);
    r.branch = "violation".into();
    r.status = Status::Fail;
    r.note = Some("parallel torsion, irreducible holonomy and nonzero first Ricci on a non-Kähler metric".into());
    Ok(r)
}

/// `U = conj(h^{-1/2})`: the holonomy algebra acts in the unitary frame
/// `f_k = Σ_i U_ik e_i`.
fn unitary_frame(cd: &ConnectionData) -> Result<(CMat, CMat)> {
    let u = hermitian_power(&cd.metric, -0.5).map(|z| z.conj());
    let inv = u.clone().try_inverse().ok_or(Error::SingularMetric)?;
    Ok((u, inv))
}

/// Frame-coefficient vector of `Σ_k c_k e_k`, or of its conjugate.
fn lift_10(m: usize, c: &[C64], conjugate: bool) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); 2 * m];
    for (k, ck) in c.iter().enumerate() {
        let e = holomorphic_vector(m, k, false);
        for (o, ek) in out.iter_mut().zip(e) {
            *o += ck * ek;
        }
    }
    if conjugate {
        out.iter_mut().for_each(|z| *z = z.conj());
    }
    out
}

fn real_unit(n: usize, a: usize) -> Vec<C64> {
    (0..n).map(|b| C64::new(if a == b { 1.0 } else { 0.0 }, 0.0)).collect()
}

/// On a holonomy-invariant subbundle `V` with parallel torsion and nonzero
/// first Ricci of `V`, the `V ⊕ V̄` component of `T(X, Y)` vanishes for `X, Y`
/// in `V ⊕ V̄`.
fn subbundle_torsion(ctx: &Ctx, p: &PairCtx) -> Result<CheckResult> {
    let data = p.data()?;
    let mc = p.mc;
    let m = mc.model.m;
    let n = 2 * m;
    let mut r = p.result(CheckId::SubbundleTorsion);
    let hol = p.holonomy()?;
    if !matches!(hol.algebra.ambient, Ambient::Unitary { .. }) || !p.hermitian(data) {
        r.status = Status::HypothesisNotMet;
        r.branch = "not-hermitian".into();
        r.push(Evidence::measured("j-residual", max_over(data, |cd| cd.j_residual())));
        return Ok(r);
    }
    if !hol.stable {
        r.status = Status::ApproximationUnstable;
        r.branch = "order-unstable".into();
        r.push(Evidence::measured("holonomy-dimension", hol.algebra.dim() as f64));
        return Ok(r);
    }
    let subspaces = invariant_subspaces(&hol.algebra);
    r.push(Evidence::measured("invariant-subspaces", subspaces.len() as f64));
    if subspaces.len() < 2 {
        r.status = Status::HypothesisNotMet;
        r.branch = "irreducible".into();
        return Ok(r);
    }
    let nabla_t = max_over(data, |cd| cd.torsion_derivative_norm());
    let par = Evidence::hypothesis_below("nabla-torsion", nabla_t, mc.pick(1e-10, 1e-4), "fixed");
    let parallel = par.holds == Some(true);
    r.push(par);
    if !parallel {
        r.status = Status::HypothesisNotMet;
        r.branch = "torsion-not-parallel".into();
        return Ok(r);
    }
    let (tol, src) = ctx.tol(CheckId::SubbundleTorsion, mc.pick(1e-10, 1e-4));
    let ricci_tol = mc.pick(1e-10, 1e-5);
    let cd = &data[0];
    let (u, u_inv) = unitary_frame(cd)?;
    let curv: Vec<CMat> =
        (0..n * n).map(|ab| u_inv.clone() * cd.curvature_on_10(&real_unit(n, ab / n), &real_unit(n, ab % n)) * &u).collect();
    let mut asserted = 0;
    let mut branches = Vec::new();
    for (idx, v) in subspaces.iter().enumerate() {
        let vh = v.adjoint();
        let proj_out = CMat::identity(m, m) - v * &vh;
        let invariance = hol.algebra.basis.iter().map(|b| max_abs_c(&(&proj_out * b * v))).fold(0.0, f64::max);
        r.push(Evidence::measured(&format!("V{idx}.dimension"), v.ncols() as f64));
        r.push(Evidence::measured(&format!("V{idx}.invariance"), invariance));
        let ric_v = curv.iter().map(|mf| (&vh * mf * v).trace().norm()).fold(0.0, f64::max);
        let hyp = Evidence::hypothesis_at_least(&format!("V{idx}.ricci"), ric_v, ricci_tol, "fixed");
        let active = hyp.holds == Some(true);
        r.push(hyp);
        // X, Y range over V ⊕ V̄ in frame coordinates
        let mut vecs: Vec<Vec<C64>> = Vec::new();
        for c in 0..v.ncols() {
            let coords: CVec = &u * v.column(c);
            vecs.push(lift_10(m, coords.as_slice(), false));
            vecs.push(lift_10(m, coords.as_slice(), true));
        }
        let mut worst: f64 = 0.0;
        for x in &vecs {
            for y in &vecs {
                let t = cd.torsion_apply(x, y);
                let (hol10, anti) = split_types(m, &t);
                let a = &vh * (&u_inv * CVec::from_vec(hol10));
                let b = &vh * (&u_inv * CVec::from_vec(anti.iter().map(|z| z.conj()).collect()));
                worst = worst.max(cmax(a.as_slice())).max(cmax(b.as_slice()));
            }
        }
        let name = format!("V{idx}.projected-torsion");
        if active {
            asserted += 1;
            r.push(Evidence::below(&name, worst, tol, src));
            branches.push("asserted");
        } else {
            r.push(Evidence::measured(&name, worst));
            branches.push("ricci-vanishes");
        }
    }
    r.details = json!({ "subspaces": branches });
    if asserted == 0 {
        r.status = Status::HypothesisNotMet;
        r.branch = "ricci-vanishes-on-every-subspace".into();
    } else {
        r.branch = "asserted".into();
    }
    Ok(r)
}

fn ricci_su(p: &PairCtx) -> Result<CheckResult> {
    let rep = ricci_vs_su_check(&p.mc.model, p.kind, &p.mc.points, HOLONOMY_ORDER)?;
    let mut r = p.result(CheckId::RicciSu);
    r.push(Evidence { role: super::Role::Measurement, ..Evidence::below("ricci-norm", rep.max_ricci, rep.ricci_tol, "fixed") });
    r.push(Evidence { role: super::Role::Measurement, ..Evidence::below("holonomy-trace-norm", rep.trace_norm, rep.trace_tol, "fixed") });
    r.push(Evidence::measured("holonomy-dimension", rep.holonomy_dim as f64));
    r.push(Evidence::below("disagreement", if rep.agree { 0.0 } else { 1.0 }, 0.5, "exact"));
    r.details = json!({ "ricci_vanishes": rep.ricci_vanishes, "in_su": rep.in_su, "stable": rep.stable });
    r.branch = match (rep.ricci_vanishes, rep.in_su) {
        (true, true) => "both-affirmative",
        (false, false) => "both-negative",
        _ => "disagree",
    }
    .into();
    if !rep.stable && rep.agree {
        r.status = Status::ApproximationUnstable;
        r.branch = "order-unstable".into();
    }
    Ok(r)
}

const FD_COARSE: f64 = 1e-2;
const FD_FINE: f64 = 5e-3;
const FD_POINTS: usize = 4;

/// The Bianchi residual of a chart model must shrink like `h²`: halving the
/// step divides it by about four.
fn fd_convergence(p: &PairCtx) -> Result<CheckResult> {
    let mut r = p.result(CheckId::FdConvergence);
    if p.mc.exact() {
        r.status = Status::HypothesisNotMet;
        r.branch = "exact-model".into();
        r.push(Evidence::measured("fd-step", 0.0));
        return Ok(r);
    }
    let coarse = p.mc.model.clone().with_fd_step(FD_COARSE)?;
    let fine = p.mc.model.clone().with_fd_step(FD_FINE)?;
    let (mut r1, mut r2) = (0.0f64, 0.0f64);
    let mut used = 0;
    for z in p.mc.points.iter().take(FD_POINTS) {
        if coarse.check_interior(z, 2).is_err() {
            continue;
        }
        r1 = r1.max(bianchi_residual(&connection(&coarse, p.kind, z)?, true));
        r2 = r2.max(bianchi_residual(&connection(&fine, p.kind, z)?, true));
        used += 1;
    }
    r.push(Evidence::measured("points", used as f64));
    if used == 0 {
        r.status = Status::HypothesisNotMet;
        r.branch = "no-interior-point".into();
        return Ok(r);
    }
    r.push(Evidence::measured("residual-coarse", r1));
    r.push(Evidence::measured("residual-fine", r2));
    if r1 < 1e-8 {
        r.branch = "round-off".into();
        r.push(Evidence::below("residual-fine", r2, 1e-8, "fixed"));
    } else {
        r.branch = "second-order".into();
        r.push(Evidence::at_least("ratio", r1 / r2.max(f64::MIN_POSITIVE), 3.0, "fixed"));
    }
    Ok(r)
}

fn model_result(mc: &ModelCtx, id: CheckId) -> CheckResult {
    CheckResult::new(id, Some(mc.label.clone()), None)
}

fn bismut_skew(ctx: &Ctx, mc: &ModelCtx) -> Result<CheckResult> {
    let data = data_at(mc, ConnectionKind::Bismut)?;
    let (tol, src) = ctx.tol(CheckId::BismutSkew, mc.pick(1e-12, 1e-6));
    let mut r = model_result(mc, CheckId::BismutSkew);
    r.branch = "identity".into();
    r.push(Evidence::below("skew-residual", max_over(&data, bismut_skew_residual), tol, src));
    r.push(Evidence::below("j-residual", max_over(&data, |cd| cd.j_residual()), tol, src));
    Ok(r)
}

fn gauduchon_endpoints(ctx: &Ctx, mc: &ModelCtx) -> Result<CheckResult> {
    let (tol, src) = ctx.tol(CheckId::GauduchonEndpoints, 1e-12);
    let mut r = model_result(mc, CheckId::GauduchonEndpoints);
    r.branch = "identity".into();
    let diff = |a: &[crate::linalg::RMat], b: &[crate::linalg::RMat]| -> f64 {
        a.iter().zip(b).map(|(x, y)| max_abs_r(&(x - y))).fold(0.0, f64::max)
    };
    let (mut d0, mut d1, mut d2, mut scale) = (0.0f64, 0.0f64, 0.0f64, 1.0f64);
    for z in mc.points.iter().take(3) {
        let g = |k| gamma_at(&mc.model, k, z);
        let ch = g(ConnectionKind::Chern)?;
        let bi = g(ConnectionKind::Bismut)?;
        let mid: Vec<_> = ch.iter().zip(&bi).map(|(a, b)| (a + b) * 0.5).collect();
        scale = scale.max(ch.iter().chain(&bi).map(max_abs_r).fold(0.0, f64::max));
        d0 = d0.max(diff(&g(ConnectionKind::Gauduchon { t: 0.0 })?, &ch));
        d1 = d1.max(diff(&g(ConnectionKind::Gauduchon { t: 1.0 })?, &mid));
        d2 = d2.max(diff(&g(ConnectionKind::Gauduchon { t: 2.0 })?, &bi));
    }
    r.push(Evidence::below("t0-vs-chern", d0 / scale, tol, src));
    r.push(Evidence::below("t1-vs-midpoint", d1 / scale, tol, src));
    r.push(Evidence::below("t2-vs-bismut", d2 / scale, tol, src));
    Ok(r)
}

/// Decides Kähler from `T^c` and `dω`; on Kähler metrics also checks the
/// curvature symmetries and that Levi-Civita and Chern agree, and on the
/// Fubini–Study model the Einstein constant and full unitary holonomy.
fn kaehler_detection(ctx: &Ctx, mc: &ModelCtx) -> Result<CheckResult> {
    let chern = data_at(mc, ConnectionKind::Chern)?;
    let m = mc.model.m;
    let mut r = model_result(mc, CheckId::KaehlerDetection);
    let (tc, dw) = kaehler_measure(&chern);
    let decide = mc.pick(1e-10, 1e-6);
    let t_ev = Evidence::hypothesis_below("chern-torsion", tc, decide, "fixed");
    let w_ev = Evidence::hypothesis_below("d-omega", dw, decide, "fixed");
    let kaehler = t_ev.holds == Some(true) && w_ev.holds == Some(true);
    let consistent = t_ev.holds == w_ev.holds;
    r.push(t_ev);
    r.push(w_ev);
    r.push(Evidence::below("torsion-domega-disagreement", if consistent { 0.0 } else { 1.0 }, 0.5, "exact"));
    let tagged = mc.model.expected.iter().any(|t| t == "kaehler");
    if tagged {
        r.push(Evidence::below("tag-mismatch", if kaehler { 0.0 } else { 1.0 }, 0.5, "exact"));
    }
    if !kaehler {
        r.branch = "not-kaehler".into();
        return Ok(r);
    }
    r.branch = "kaehler".into();
    let (tol, src) = ctx.tol(CheckId::KaehlerDetection, mc.pick(1e-10, 1e-6));
    r.push(Evidence::below("curvature-symmetry", max_over(&chern, |cd| cd.complex_curvature().symmetry_residual()), tol, src));
    let mut lc_vs_chern: f64 = 0.0;
    for (z, cd) in mc.points.iter().zip(&chern) {
        let lc = gamma_at(&mc.model, ConnectionKind::LeviCivita, z)?;
        lc_vs_chern = lc_vs_chern.max(lc.iter().zip(&cd.gamma).map(|(a, b)| max_abs_r(&(a - b))).fold(0.0, f64::max));
    }
    r.push(Evidence::below("levi-civita-vs-chern", lc_vs_chern, tol, src));
    if mc.model.name == "fubini-study" {
        let (etol, esrc) = ctx.tol(CheckId::KaehlerDetection, 1e-4);
        let einstein = max_over(&chern, |cd| max_abs_c(&(cd.chern_ricci() - &cd.metric * C64::new(m as f64 + 1.0, 0.0))));
        r.push(Evidence::below("ricci-minus-(m+1)g", einstein, etol, esrc));
        let hol = holonomy_algebra(&mc.model, ConnectionKind::Chern, &mc.points[0], HOLONOMY_ORDER)?;
        r.push(Evidence::below("holonomy-dimension-defect", (m * m).abs_diff(hol.algebra.dim()) as f64, 0.5, "exact"));
        r.push(Evidence::below("holonomy-unstable", if hol.stable { 0.0 } else { 1.0 }, 0.5, "exact"));
        r.branch = "kaehler-einstein".into();
    }
    Ok(r)
}

fn torsion_relations(ctx: &Ctx, mc: &ModelCtx) -> Result<CheckResult> {
    let bismut = data_at(mc, ConnectionKind::Bismut)?;
    let chern = data_at(mc, ConnectionKind::Chern)?;
    let (tol, src) = ctx.tol(CheckId::TorsionRelations, mc.pick(1e-10, 1e-4));
    let mut worst = [0.0f64; 3];
    let mut conventions = Vec::new();
    for (b, c) in bismut.iter().zip(&chern) {
        let rel = torsion_relation_residuals(b, c)?;
        if rel.convention != SignConvention::Indeterminate && !conventions.contains(&rel.convention) {
            conventions.push(rel.convention);
        }
        for (w, x) in worst.iter_mut().zip(rel.residuals) {
            *w = w.max(x);
        }
    }
    let mut r = model_result(mc, CheckId::TorsionRelations);
    for (i, w) in worst.iter().enumerate() {
        r.push(Evidence::below(&format!("relation-{}", i + 1), *w, tol, src));
    }
    r.push(Evidence::below("conventions-within-model", conventions.len() as f64, 1.5, "exact"));
    let convention = conventions.first().copied().unwrap_or(SignConvention::Indeterminate);
    r.branch = match convention {
        SignConvention::Indeterminate => "torsion-free",
        _ => "identity",
    }
    .into();
    r.details = json!({ "convention": convention });
    Ok(r)
}

/// Jacobi identity of `T^c(·,·)` on `(1,0)` triples and of `T(·,·)` on the
/// real frame when the Bismut torsion is parallel, plus the type conditions
/// `T^c(X, Ȳ) = 0` and `R^b_{Z,X} = 0` for `(1,0)` vectors.
fn bracket_jacobi(ctx: &Ctx, mc: &ModelCtx) -> Result<CheckResult> {
    let bismut = data_at(mc, ConnectionKind::Bismut)?;
    let chern = data_at(mc, ConnectionKind::Chern)?;
    let m = mc.model.m;
    let n = 2 * m;
    let mut r = model_result(mc, CheckId::BracketJacobi);
    let nabla_t = max_over(&bismut, |cd| cd.torsion_derivative_norm());
    let hyp = Evidence::hypothesis_below("bismut-nabla-torsion", nabla_t, mc.pick(1e-10, 1e-4), "fixed");
    let parallel = hyp.holds == Some(true);
    r.push(hyp);
    if !parallel {
        r.status = Status::HypothesisNotMet;
        r.branch = "torsion-not-parallel".into();
        return Ok(r);
    }
    let (tol, src) = ctx.tol(CheckId::BracketJacobi, mc.pick(1e-10, 1e-4));
    let (mixed_tol, mixed_src) = ctx.tol(CheckId::BracketJacobi, 1e-14);
    let jacobi = |cd: &ConnectionData, vecs: &[Vec<C64>]| -> f64 {
        let mut worst: f64 = 0.0;
        for x in vecs {
            for y in vecs {
                for z in vecs {
                    let term = |a: &[C64], b: &[C64], c: &[C64]| cd.torsion_apply(a, &cd.torsion_apply(b, c));
                    let s: Vec<C64> = term(x, y, z).iter().zip(term(y, z, x)).zip(term(z, x, y)).map(|((a, b), c)| a + b + c).collect();
                    worst = worst.max(cmax(&s));
                }
            }
        }
        worst
    };
    let hol_vecs: Vec<Vec<C64>> = (0..m).map(|i| holomorphic_vector(m, i, false)).collect();
    let real_vecs: Vec<Vec<C64>> = (0..n).map(|a| real_unit(n, a)).collect();
    let chern_jacobi = max_over(&chern, |cd| jacobi(cd, &hol_vecs));
    let bismut_jacobi = max_over(&bismut, |cd| jacobi(cd, &real_vecs));
    let mixed = max_over(&chern, |cd| {
        let mut w: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                let (a, b) = cd.complex_torsion(i, j, true);
                w = w.max(cmax(&a)).max(cmax(&b));
            }
        }
        w
    });
    let r_zx = max_over(&bismut, |cd| {
        let mut w: f64 = 0.0;
        for x in &hol_vecs {
            for y in &hol_vecs {
                w = w.max(max_abs_c(&cd.curvature_apply(x, y)));
            }
        }
        w
    });
    r.push(Evidence::below("chern-bracket-jacobi", chern_jacobi, tol, src));
    r.push(Evidence::below("bismut-bracket-jacobi", bismut_jacobi, tol, src));
    r.push(Evidence::below("chern-mixed-torsion", mixed, mixed_tol, mixed_src));
    r.push(Evidence::below("bismut-curvature-20", r_zx, tol, src));
    r.push(Evidence::measured("bismut-torsion-norm", max_over(&bismut, |cd| cd.torsion_norm())));
    r.branch = if max_over(&bismut, |cd| cd.torsion_norm()) == 0.0 { "torsion-free" } else { "parallel-torsion" }.into();
    Ok(r)
}

fn trivial_holonomy(ctx: &Ctx, mc: &ModelCtx) -> Result<CheckResult> {
    let mut r = model_result(mc, CheckId::TrivialHolonomy);
    if !mc.exact() {
        r.status = Status::HypothesisNotMet;
        r.branch = "not-a-lie-group".into();
        r.push(Evidence::measured("lie-directions", (0..mc.model.m).filter(|&i| mc.model.is_lie_direction(i)).count() as f64));
        return Ok(r);
    }
    let cd = connection(&mc.model, ConnectionKind::Chern, &[])?;
    let hol = holonomy_algebra(&mc.model, ConnectionKind::Chern, &[], HOLONOMY_ORDER)?;
    let (tol, src) = ctx.tol(CheckId::TrivialHolonomy, 1e-12);
    r.branch = "lie-group".into();
    r.push(Evidence::below("curvature-norm", cd.curvature_norm(), tol, src));
    r.push(Evidence::below("holonomy-dimension", hol.algebra.dim() as f64, 0.5, "exact"));
    r.push(Evidence::below("ricci-norm", cd.chern_ricci_norm(), tol, src));
    r.push(Evidence::below("nabla-torsion", cd.torsion_derivative_norm(), tol, src));
    r.push(Evidence::measured("torsion-norm", cd.torsion_norm()));
    Ok(r)
}

/// Every catalog tag is re-derived from computed quantities.
fn expected_properties(ctx: &Ctx, mc: &ModelCtx) -> Result<CheckResult> {
    let mut r = model_result(mc, CheckId::ExpectedProperties);
    r.push(Evidence::measured("tags", mc.model.expected.len() as f64));
    if mc.model.expected.is_empty() {
        r.status = Status::HypothesisNotMet;
        r.branch = "no-tags".into();
        return Ok(r);
    }
    r.branch = "tags".into();
    let chern = data_at(mc, ConnectionKind::Chern)?;
    for tag in &mc.model.expected {
        let (value, default) = match tag.as_str() {
            "kaehler" => {
                let (tc, dw) = kaehler_measure(&chern);
                (tc.max(dw), mc.pick(1e-10, 1e-6))
            }
            "chern-flat" => (max_over(&chern, |cd| cd.curvature_norm()), mc.pick(1e-12, 1e-6)),
            "bismut-parallel-torsion" => {
                let b = data_at(mc, ConnectionKind::Bismut)?;
                (max_over(&b, |cd| cd.torsion_derivative_norm()), mc.pick(1e-10, 1e-4))
            }
            other => return Err(Error::Consistency(format!("unknown catalog tag '{other}'"))),
        };
        let (tol, src) = ctx.tol(CheckId::ExpectedProperties, default);
        r.push(Evidence::below(tag, value, tol, src));
    }
    Ok(r)
}
