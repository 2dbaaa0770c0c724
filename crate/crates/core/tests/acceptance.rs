//! Acceptance gate. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any criterion fails.

use holomat::conn::{connection, parallel_torsion_residual, torsion_relation_residuals, ConnectionKind, SignConvention};
use holomat::fiber::KaehlerCurvature;
use holomat::fiber::{verify_kaehler_identities, verify_l1, FiberForm, HermitianFiber};
use holomat::hol::{center, derived, holonomy_algebra, is_irreducible, lie_closure, trace_norm, Ambient};
use holomat::kforms::{fs_shifted, greedy_extremal_frame};
use holomat::linalg::{complex_gaussian, random_hermitian, random_pd_hermitian, random_unitary, CMat, CVec, RankTol, C64, IM, ONE, ZERO};
use holomat::models::{catalog, catalog_names, ManifoldModel, Params};
use holomat::rep::{sample_group, torus_project, GroupSampler, WedgeRep};
use holomat::verify::{run_checks, CheckConfig, CheckId, CheckReport, CheckResult, ModelSpec, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rng(label: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xACCE_0000 ^ label)
}

fn model(name: &str) -> ManifoldModel {
    catalog(name, &Params::new()).expect("catalog model")
}

fn gauduchon_family() -> Vec<ConnectionKind> {
    let mut kinds = vec![ConnectionKind::LeviCivita, ConnectionKind::Chern, ConnectionKind::Bismut];
    kinds.extend([0.0, 0.5, 1.0, 1.5, 2.0].map(|t| ConnectionKind::Gauduchon { t }));
    kinds
}

fn catalog_config(checks: &[CheckId], kinds: Vec<ConnectionKind>) -> CheckConfig {
    CheckConfig {
        checks: checks.to_vec(),
        kinds,
        models: catalog_names().iter().map(|n| ModelSpec::named(n)).collect(),
        ..CheckConfig::default()
    }
}

fn evidence(r: &CheckResult, name: &str) -> Result<f64, String> {
    r.evidence.iter().find(|e| e.name == name).map(|e| e.value).ok_or_else(|| format!("{} has no evidence '{name}'", r.check))
}

fn label(r: &CheckResult) -> String {
    format!("{}/{}", r.model.as_deref().unwrap_or("-"), r.kind.map(|k| k.label()).unwrap_or_default())
}

fn points(model: &ManifoldModel, count: usize, seed: u64) -> Vec<Vec<C64>> {
    if model.is_invariant() {
        return vec![model.base_point()];
    }
    let mut r = rng(seed);
    let mut pts = vec![model.base_point()];
    pts.extend((1..count).map(|_| model.sample_point(&mut r)));
    pts
}

fn bianchi_oracle() -> Outcome {
    let kinds = vec![ConnectionKind::LeviCivita, ConnectionKind::Chern, ConnectionKind::Bismut, ConnectionKind::Gauduchon { t: 1.0 }];
    let cfg = catalog_config(&[CheckId::Bianchi], kinds);
    let start = Instant::now();
    let report = run_checks(&cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let (mut worst_exact, mut worst_chart) = (0.0f64, 0.0f64);
    for r in &report.body.checks {
        let name = r.model.as_deref().unwrap_or_default();
        let m = model(name);
        let value = evidence(r, "bianchi-residual")?;
        let (tol, worst) = if m.is_invariant() { (1e-10, &mut worst_exact) } else { (5e-4, &mut worst_chart) };
        ensure(m.is_invariant() || m.fd_step == 1e-4, format!("{name}: step {}", m.fd_step))?;
        ensure(value < tol, format!("{}: residual {value:.3e} >= {tol:e}", label(r)))?;
        ensure(r.status == Status::Pass, format!("{}: status {:?}", label(r), r.status))?;
        *worst = worst.max(value);
    }
    ensure(report.body.checks.len() == 4 * catalog_names().len(), "missing (model, kind) pairs")?;
    ensure(elapsed < 60.0, format!("runtime {elapsed:.1} s"))?;
    Ok(format!("{} pairs, lie-group max {worst_exact:.1e}, chart max {worst_chart:.1e}, {elapsed:.1} s", report.body.checks.len()))
}

/// `g_{ij̄} = ∂_i ∂̄_j log(1 + |z|²)`; its Chern Ricci form is `(m+1) g`.
fn fs_metric_symbolic(z: &[C64]) -> CMat {
    let s = 1.0 + z.iter().map(|w| w.norm_sqr()).sum::<f64>();
    CMat::from_fn(z.len(), z.len(), |i, j| {
        let delta = if i == j { 1.0 / s } else { 0.0 };
        C64::new(delta, 0.0) - z[i].conj() * z[j] / (s * s)
    })
}

fn kaehler_detection() -> Outcome {
    let mut worst = [0.0f64; 4];
    for m in [1usize, 2] {
        let mut params = Params::new();
        params.insert("m".into(), m.into());
        let model = catalog("fubini-study", &params).map_err(|e| e.to_string())?;
        for z in points(&model, 20, 20 + m as u64) {
            let cd = connection(&model, ConnectionKind::Chern, &z).map_err(|e| e.to_string())?;
            let g = fs_metric_symbolic(&z);
            let ric_err = (cd.chern_ricci() - &g * C64::new(m as f64 + 1.0, 0.0)).iter().fold(0.0f64, |a, x| a.max(x.norm()));
            let metric_err = (&model.metric(&z) - &g).iter().fold(0.0f64, |a, x| a.max(x.norm()));
            for (w, v) in worst.iter_mut().zip([cd.torsion_norm(), cd.d_omega_norm(), ric_err, metric_err]) {
                *w = w.max(v);
            }
        }
        let hol = holonomy_algebra(&model, ConnectionKind::Chern, &model.base_point(), 2).map_err(|e| e.to_string())?;
        ensure(hol.algebra.dim() == m * m, format!("m={m}: holonomy dimension {}", hol.algebra.dim()))?;
        ensure(hol.stable, format!("m={m}: holonomy not order-stable ({:?})", hol.dims_by_order))?;
    }
    ensure(worst[0] < 1e-6, format!("|T^c| = {:.3e}", worst[0]))?;
    ensure(worst[1] < 1e-6, format!("|dω| = {:.3e}", worst[1]))?;
    ensure(worst[2] < 1e-4, format!("|Ric¹ - (m+1)g| = {:.3e}", worst[2]))?;
    ensure(worst[3] < 1e-14, "catalog metric differs from the symbolic one")?;
    Ok(format!("|T^c| {:.1e}, |dω| {:.1e}, |Ric¹-(m+1)g| {:.1e}, hol dim m²", worst[0], worst[1], worst[2]))
}

fn lie_group_holonomy() -> Outcome {
    let mut parts = Vec::new();
    for name in ["complex-lie-group-2d", "complex-lie-group-heisenberg"] {
        let model = model(name);
        ensure(model.is_invariant(), format!("{name} is not left-invariant"))?;
        let cd = connection(&model, ConnectionKind::Chern, &[]).map_err(|e| e.to_string())?;
        let hol = holonomy_algebra(&model, ConnectionKind::Chern, &[], 2).map_err(|e| e.to_string())?;
        let (curv, ric, nabla_t) = (cd.curvature_norm(), cd.chern_ricci_norm(), cd.torsion_derivative_norm());
        ensure(curv < 1e-12, format!("{name}: curvature {curv:.3e}"))?;
        ensure(hol.algebra.dim() == 0, format!("{name}: holonomy dimension {}", hol.algebra.dim()))?;
        ensure(ric < 1e-12, format!("{name}: Ric¹ {ric:.3e}"))?;
        ensure(nabla_t == 0.0, format!("{name}: ∇T {nabla_t:.3e}"))?;
        ensure(cd.torsion_norm() > 0.1, format!("{name}: torsion unexpectedly zero"))?;
        parts.push(format!("{name}: R {curv:.0e}, ∇T {nabla_t:.0e}"));
    }
    Ok(parts.join("; "))
}

fn torsion_relations() -> Outcome {
    let mut conventions = Vec::new();
    let mut summary = Vec::new();
    for name in catalog_names() {
        let model = model(&name);
        let tol = if model.is_invariant() { 1e-10 } else { 1e-4 };
        let (mut worst, mut flipped) = (0.0f64, 0.0f64);
        for z in points(&model, 20, 40) {
            let z: &[C64] = if model.is_invariant() { &[] } else { &z };
            let b = connection(&model, ConnectionKind::Bismut, z).map_err(|e| e.to_string())?;
            let c = connection(&model, ConnectionKind::Chern, z).map_err(|e| e.to_string())?;
            let rel = torsion_relation_residuals(&b, &c).map_err(|e| e.to_string())?;
            if rel.convention != SignConvention::Indeterminate && !conventions.contains(&rel.convention) {
                conventions.push(rel.convention);
            }
            worst = rel.residuals.iter().fold(worst, |a, &x| a.max(x));
            let other = if rel.convention == SignConvention::Flipped { rel.literal } else { rel.flipped };
            flipped = other.iter().fold(flipped, |a, &x| a.max(x));
        }
        ensure(worst < tol, format!("{name}: residual {worst:.3e} >= {tol:e}"))?;
        if matches!(name.as_str(), "hopf-surface" | "complex-lie-group-2d" | "complex-lie-group-heisenberg") {
            ensure(flipped > 1e-3, format!("{name}: opposite sign convention also fits ({flipped:.3e})"))?;
            summary.push(format!("{name} {worst:.1e} (opposite sign {flipped:.1e})"));
        }
    }
    ensure(conventions.len() == 1, format!("conventions seen: {conventions:?}"))?;
    Ok(format!("convention {:?}; {}", conventions[0], summary.join(", ")))
}

fn bracket_pipeline_hopf() -> Outcome {
    let hopf = model("hopf-surface");
    let nabla_t = parallel_torsion_residual(&hopf, ConnectionKind::Bismut, &points(&hopf, 20, 50)).map_err(|e| e.to_string())?;
    ensure(nabla_t < 1e-4, format!("Bismut ∇T {nabla_t:.3e}"))?;
    let cfg =
        CheckConfig { checks: vec![CheckId::BracketJacobi], models: vec![ModelSpec::named("hopf-surface")], ..CheckConfig::default() };
    let report = run_checks(&cfg).map_err(|e| e.to_string())?;
    let r = &report.body.checks[0];
    ensure(r.status == Status::Pass, format!("status {:?} ({})", r.status, r.branch))?;
    let jacobi = evidence(r, "chern-bracket-jacobi")?;
    let r_zx = evidence(r, "bismut-curvature-20")?;
    let mixed = evidence(r, "chern-mixed-torsion")?;
    ensure(jacobi < 1e-4, format!("Jacobi {jacobi:.3e}"))?;
    ensure(r_zx < 1e-4, format!("R_(Z,X) {r_zx:.3e}"))?;
    ensure(mixed < 1e-14, format!("mixed T^c {mixed:.3e}"))?;
    Ok(format!("∇T {nabla_t:.1e}, Jacobi {jacobi:.1e}, R_(Z,X) {r_zx:.1e}, mixed {mixed:.0e}"))
}

fn fiber_identities() -> Outcome {
    let start = Instant::now();
    let mut identity = 0.0f64;
    for m in 1..=5 {
        let rep = verify_kaehler_identities(m, 2 * m);
        identity = identity.max(rep.star_commutation).max(rep.lefschetz_commutator);
    }
    let cases: Vec<(usize, usize)> = (2..=5usize).flat_map(|m| (1..m).map(move |p| (m, p))).collect();
    let per_case: Vec<Result<f64, String>> = cases
        .par_iter()
        .map(|&(m, p)| {
            let mut r = rng((m * 10 + p) as u64);
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let fib = HermitianFiber::new(random_pd_hermitian(m, &mut r)).map_err(|e| e.to_string())?;
                let coeffs: Vec<C64> = (0..fib.basis().dim(p, 0)).map(|_| complex_gaussian(&mut r)).collect();
                let s = FiberForm::from_coeffs(fib.basis(), p, 0, coeffs).map_err(|e| e.to_string())?;
                let eta = fib.one_one_form(&random_hermitian(m, &mut r)).map_err(|e| e.to_string())?;
                let res = verify_l1(&fib, &s, &eta).map_err(|e| e.to_string())?;
                worst = worst.max(res.trace).max(res.wedge);
            }
            Ok(worst)
        })
        .collect();
    let mut l1 = 0.0f64;
    for w in per_case {
        l1 = l1.max(w?);
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(identity < 1e-10, format!("operator identities {identity:.3e}"))?;
    ensure(l1 < 1e-10, format!("trace/wedge identities {l1:.3e}"))?;
    ensure(elapsed < 30.0, format!("runtime {elapsed:.1} s"))?;
    Ok(format!("operators {identity:.1e}, trace/wedge {l1:.1e} over {} cases x 100, {elapsed:.1} s", cases.len()))
}

/// Commutant dimension by a direct SVD of the stacked `I⊗A − Aᵀ⊗I` system.
fn commutant_dim(actions: &[CMat]) -> usize {
    let d = actions[0].nrows();
    let id = CMat::identity(d, d);
    let mut stacked = CMat::zeros(actions.len() * d * d, d * d);
    for (s, a) in actions.iter().enumerate() {
        let op = id.kronecker(a) - a.transpose().kronecker(&id);
        stacked.view_mut((s * d * d, 0), (d * d, d * d)).copy_from(&op);
    }
    let sv = stacked.singular_values();
    let top = sv.max().max(1.0);
    d * d - sv.iter().filter(|&&x| x > 1e-9 * top).count()
}

fn representations() -> Outcome {
    let mut r = rng(70);
    let mut recon = 0.0f64;
    for m in 2..=5usize {
        for p in 1..m {
            let rep = WedgeRep::new(m, p).map_err(|e| e.to_string())?;
            let act = |s: GroupSampler, r: &mut ChaCha8Rng| -> Result<usize, String> {
                let g = sample_group(s, m, 6, r).map_err(|e| e.to_string())?;
                Ok(commutant_dim(&g.iter().map(|x| rep.action(x)).collect::<Vec<_>>()))
            };
            let u = act(GroupSampler::Unitary, &mut r)?;
            let su = act(GroupSampler::SpecialUnitary, &mut r)?;
            let torus = act(GroupSampler::Torus, &mut r)?;
            let block = act(GroupSampler::Block { k: 1 }, &mut r)?;
            ensure(u == 1 && su == 1, format!("m={m} p={p}: commutant U {u}, SU {su}"))?;
            ensure(torus > 1 && block > 1, format!("m={m} p={p}: controls torus {torus}, block {block}"))?;
            let v: Vec<C64> = (0..rep.dim()).map(|_| complex_gaussian(&mut r)).collect();
            let mut sum = CVec::zeros(rep.dim());
            for multi in &rep.basis {
                sum += torus_project(&rep, &v, multi, 3).map_err(|e| e.to_string())?;
            }
            recon = recon.max((sum - CVec::from_column_slice(&v)).norm());
        }
    }
    ensure(recon < 1e-12, format!("torus reconstruction {recon:.3e}"))?;
    Ok(format!("commutant 1 for U and SU on all (m, p); controls > 1; reconstruction {recon:.1e}"))
}

fn unit(m: usize, i: usize, j: usize, z: C64) -> CMat {
    let mut a = CMat::zeros(m, m);
    a[(i, j)] = z;
    a
}

/// Random block decomposition with `u(k)`, `su(k)` or scalar blocks, conjugated.
fn random_block_algebra(m: usize, r: &mut ChaCha8Rng) -> Vec<CMat> {
    let mut gens = Vec::new();
    let mut off = 0;
    while off < m {
        let k = r.random_range(1..=m - off);
        let choice = r.random_range(0..3);
        for a in 0..k {
            for b in a + 1..k {
                if choice < 2 {
                    gens.push(unit(m, off + a, off + b, ONE) - unit(m, off + b, off + a, ONE));
                    gens.push(unit(m, off + a, off + b, IM) + unit(m, off + b, off + a, IM));
                }
            }
        }
        match choice {
            0 => gens.extend((0..k).map(|a| unit(m, off + a, off + a, IM))),
            1 => gens.extend((0..k.saturating_sub(1)).map(|a| unit(m, off + a, off + a, IM) - unit(m, off + a + 1, off + a + 1, IM))),
            _ => gens.push((0..k).fold(CMat::zeros(m, m), |acc, a| acc + unit(m, off + a, off + a, IM))),
        }
        off += k;
    }
    let q = random_unitary(m, r);
    gens.iter().map(|g| &q * g * q.adjoint()).collect()
}

fn lie_structure() -> Outcome {
    let mut r = rng(80);
    let (mut orth, mut scalar_center, mut traceless) = (0.0f64, 0.0f64, 0.0f64);
    let (mut irreducible, mut centerless) = (0, 0);
    for trial in 0..50 {
        let m = 1 + trial % 5;
        let g = lie_closure(Ambient::Unitary { m }, &random_block_algebra(m, &mut r), RankTol::EXACT).map_err(|e| e.to_string())?;
        let z = center(&g).map_err(|e| e.to_string())?;
        let d = derived(&g).map_err(|e| e.to_string())?;
        // -Re tr(ab) is ad-invariant on u(m)
        for a in &z.basis {
            for b in &d.basis {
                orth = orth.max((a * b).trace().re.abs());
            }
        }
        if is_irreducible(&g).is_irreducible() {
            irreducible += 1;
            for a in &z.basis {
                let s = a.trace() / C64::new(m as f64, 0.0);
                scalar_center = scalar_center.max((a - CMat::identity(m, m) * s).iter().fold(0.0, |x: f64, y| x.max(y.norm())));
                ensure(s.re.abs() < 1e-12, "center element is not skew")?;
            }
        }
        if z.dim() == 0 {
            centerless += 1;
            traceless = traceless.max(trace_norm(&g).map_err(|e| e.to_string())?);
            traceless = g.basis.iter().fold(traceless, |x, a| x.max(a.trace().norm()));
        }
    }
    ensure(orth < 1e-8, format!("center/derived inner product {orth:.3e}"))?;
    ensure(scalar_center < 1e-8, format!("irreducible center off the scalars by {scalar_center:.3e}"))?;
    ensure(traceless < 1e-8, format!("centerless trace {traceless:.3e}"))?;
    ensure(irreducible > 0 && centerless > 0, format!("degenerate suite: {irreducible} irreducible, {centerless} centerless"))?;
    Ok(format!("orthogonality {orth:.1e}; {irreducible} irreducible, {centerless} centerless, no violation"))
}

fn ricci_su_equivalence() -> Outcome {
    let report = run_checks(&catalog_config(&[CheckId::RicciSu], gauduchon_family())).map_err(|e| e.to_string())?;
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for r in &report.body.checks {
        ensure(r.branch != "disagree", format!("{}: sides disagree", label(r)))?;
        ensure(r.status != Status::Fail, format!("{}: fail", label(r)))?;
        *counts.entry(format!("{:?}/{}", r.status, r.branch)).or_default() += 1;
    }
    Ok(format!("{} pairs, no disagreement: {counts:?}", report.body.checks.len()))
}

/// `H(x) = R(x, x̄, x, x̄)/|x|⁴` summed directly over components.
fn h_value(t: &KaehlerCurvature, x: &[C64]) -> f64 {
    let m = t.m;
    let mut acc = ZERO;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    acc += t.r[KaehlerCurvature::idx(m, i, j, k, l)] * x[i] * x[j].conj() * x[k] * x[l].conj();
                }
            }
        }
    }
    let n2: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    acc.re / (n2 * n2)
}

fn ricci_diag(t: &KaehlerCurvature, e: &[C64]) -> f64 {
    let m = t.m;
    let mut acc = ZERO;
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                acc += t.r[KaehlerCurvature::idx(m, i, j, k, k)] * e[i] * e[j].conj();
            }
        }
    }
    acc.re
}

/// Minimum of `H` from a uniform sphere mesh, refined by projected descent
/// with central-difference gradients.
fn mesh_min(t: &KaehlerCurvature, r: &mut ChaCha8Rng) -> f64 {
    let m = t.m;
    let mut mesh: Vec<(f64, Vec<C64>)> = (0..10_000)
        .map(|_| {
            let x: Vec<C64> = (0..m).map(|_| complex_gaussian(r)).collect();
            (h_value(t, &x), x)
        })
        .collect();
    mesh.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = mesh[0].0;
    for (mut val, x) in mesh.into_iter().take(8) {
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut x: Vec<f64> = x.iter().flat_map(|z| [z.re / norm, z.im / norm]).collect();
        let f = |v: &[f64]| h_value(t, &v.chunks(2).map(|c| C64::new(c[0], c[1])).collect::<Vec<_>>());
        let mut step = 0.1;
        for _ in 0..400 {
            let h = 1e-6;
            let grad: Vec<f64> = (0..2 * m)
                .map(|a| {
                    let mut p = x.clone();
                    let mut q = x.clone();
                    p[a] += h;
                    q[a] -= h;
                    (f(&p) - f(&q)) / (2.0 * h)
                })
                .collect();
            let mut trial: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a - step * g).collect();
            let n = trial.iter().map(|a| a * a).sum::<f64>().sqrt();
            trial.iter_mut().for_each(|a| *a /= n);
            let tv = f(&trial);
            if tv < val {
                x = trial;
                val = tv;
                step *= 1.2;
            } else {
                step *= 0.5;
                if step < 1e-12 {
                    break;
                }
            }
        }
        best = best.min(val);
    }
    best
}

fn frame_bound() -> Outcome {
    let draws: Vec<(usize, u64)> = (0..200u64).map(|i| (2 + (i % 2) as usize, i)).collect();
    let runs: Vec<Result<(f64, f64), String>> = draws
        .par_iter()
        .map(|&(m, i)| {
            let mut r = rng(1000 + i);
            let t = fs_shifted(m, &mut r).map_err(|e| e.to_string())?;
            let f = greedy_extremal_frame(&t, &mut r).map_err(|e| e.to_string())?;
            let mesh = mesh_min(&t, &mut r);
            let rel = (f.kappa - mesh).abs() / mesh.abs().max(1e-12);
            let bound = f.kappa * (m as f64 + 1.0) / 2.0;
            let slack = (0..m).map(|c| ricci_diag(&t, f.frame.column(c).as_slice()) - bound).fold(f64::INFINITY, f64::min);
            Ok((slack, rel))
        })
        .collect();
    let (mut slack, mut rel) = (f64::INFINITY, 0.0f64);
    for run in runs {
        let (s, q) = run?;
        slack = slack.min(s);
        rel = rel.max(q);
    }
    ensure(slack >= -1e-6, format!("bound violated by {:.3e}", -slack))?;
    ensure(rel < 1e-3, format!("optimizer and mesh disagree on κ by {rel:.3e} relative"))?;
    let mut saturation = 0.0f64;
    for m in [2usize, 3] {
        let fs = KaehlerCurvature::fubini_study(&CMat::identity(m, m));
        let f = greedy_extremal_frame(&fs, &mut rng(2000 + m as u64)).map_err(|e| e.to_string())?;
        for c in 0..m {
            saturation = saturation.max((ricci_diag(&fs, f.frame.column(c).as_slice()) - f.kappa * (m as f64 + 1.0) / 2.0).abs());
        }
        saturation = saturation.max((f.kappa - 2.0).abs());
    }
    ensure(saturation < 1e-9, format!("FS saturation gap {saturation:.3e}"))?;
    Ok(format!("200 draws, min slack {slack:.2e}, κ mesh agreement {rel:.1e}, FS gap {saturation:.0e}"))
}

fn implication_check() -> Outcome {
    let report = run_checks(&catalog_config(&[CheckId::ParallelTorsionKaehler], gauduchon_family())).map_err(|e| e.to_string())?;
    let mut branches: BTreeMap<String, usize> = BTreeMap::new();
    for r in &report.body.checks {
        ensure(r.status == Status::Pass, format!("{}: {:?} ({})", label(r), r.status, r.branch))?;
        ensure(!r.branch.is_empty(), format!("{}: no branch recorded", label(r)))?;
        *branches.entry(r.branch.clone()).or_default() += 1;
    }
    Ok(format!("{} pairs, 0 violations: {branches:?}", report.body.checks.len()))
}

fn regression_config() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/regression.toml")
}

fn determinism() -> Outcome {
    let mut cfg = CheckConfig::from_path(&regression_config()).map_err(|e| e.to_string())?;
    cfg.output = None;
    let first: CheckReport = run_checks(&cfg).map_err(|e| e.to_string())?;
    let second = run_checks(&cfg).map_err(|e| e.to_string())?;
    ensure(first.body_json() == second.body_json(), "reports differ")?;
    ensure(first.exit_code() == 0, format!("regression exit code {}", first.exit_code()))?;
    ensure(first.body.checks.len() >= 30, "fewer than 30 check entries")?;
    Ok(format!("{} entries, {} bytes identical, exit 0", first.body.checks.len(), first.body_json().len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("generalized Bianchi identity on the catalog", bianchi_oracle),
        ("Kaehler detection on Fubini-Study", kaehler_detection),
        ("trivial Chern holonomy of complex Lie groups", lie_group_holonomy),
        ("Bismut/Chern torsion relations", torsion_relations),
        ("torsion bracket pipeline on the Hopf surface", bracket_pipeline_hopf),
        ("fiber trace/wedge and Lefschetz identities", fiber_identities),
        ("exterior power irreducibility", representations),
        ("center/derived structure of subalgebras", lie_structure),
        ("Ricci-flat iff holonomy in su(m)", ricci_su_equivalence),
        ("extremal frame Ricci bound", frame_bound),
        ("parallel torsion implication over the catalog", implication_check),
        ("report determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2}. {name} [{secs:.1} s]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2}. {name} [{secs:.1} s]: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
