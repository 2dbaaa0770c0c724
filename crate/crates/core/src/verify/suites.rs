use super::report::{CheckResult, Evidence};
use super::{CheckId, Ctx};
use crate::error::{Error, Result};
use crate::fiber::{bochner_rhs, verify_kaehler_identities, verify_l1, FiberForm, HermitianFiber, KaehlerCurvature, Provenance};
use crate::hol::{decompose, is_irreducible, lie_closure, real_schur, trace_norm, Ambient};
use crate::kforms::{
    berger_average_check, bochner_chain_pointwise, fs_shifted, greedy_extremal_frame, normal_form_2form, second_variation_check,
    two_form_from_matrix, VariationMode,
};
use crate::linalg::{
    c64, complex_gaussian, random_complex_matrix, random_hermitian, random_pd_hermitian, random_unitary, CMat, RankTol, C64, IM, ONE, ZERO,
};
use crate::rep::{irreducibility_certificate, tensor_commutant_dim, wedge_dim, GroupSampler, WedgeRep};
use rand::Rng;
use rayon::prelude::*;

pub(crate) fn global_check(ctx: &Ctx, id: CheckId) -> Result<CheckResult> {
    let mut r = CheckResult::new(id, None, None);
    match id {
        CheckId::KaehlerIdentities => kaehler_identities(ctx, &mut r),
        CheckId::BetaIdentities => beta_identities(ctx, &mut r)?,
        CheckId::RepIrreducibility => rep_irreducibility(ctx, &mut r)?,
        CheckId::LieStructure => lie_structure(ctx, &mut r)?,
        CheckId::FrameBound => frame_bound(ctx, &mut r)?,
        CheckId::SecondVariation => second_variation(ctx, &mut r)?,
        CheckId::BergerAverage => berger_average(ctx, &mut r)?,
        CheckId::NormalForm => normal_form(ctx, &mut r)?,
        CheckId::BochnerChain => bochner_chain(ctx, &mut r)?,
        other => return Err(Error::Consistency(format!("{other} is not a global check"))),
    }
    Ok(r)
}

fn fs(m: usize) -> KaehlerCurvature {
    KaehlerCurvature::fubini_study(&CMat::identity(m, m))
}

fn kaehler_identities(ctx: &Ctx, r: &mut CheckResult) {
    let (tol, src) = ctx.tol(CheckId::KaehlerIdentities, 1e-10);
    let reports: Vec<_> = (1..=5usize).into_par_iter().map(|m| verify_kaehler_identities(m, 2 * m)).collect();
    let mut forms = 0;
    for rep in &reports {
        let m = rep.m;
        r.push(Evidence::below(&format!("m{m}.star-lefschetz"), rep.star_commutation, tol, src));
        r.push(Evidence::below(&format!("m{m}.lefschetz-commutator"), rep.lefschetz_commutator, tol, src));
        r.push(Evidence::below(&format!("m{m}.star-involution"), rep.star_involution, tol, src));
        r.push(Evidence::below(&format!("m{m}.adjointness"), rep.adjointness, tol, src));
        forms += rep.forms_checked;
    }
    r.push(Evidence::measured("forms-checked", forms as f64));
    r.branch = "identity".into();
}

pub const BETA_DRAWS: usize = 100;

/// Trace and wedge identities of `β̃` for random metrics, `(p,0)`-forms and
/// real `(1,1)`-forms, `2 <= m <= 5`, `1 <= p < m`.
fn beta_identities(ctx: &Ctx, r: &mut CheckResult) -> Result<()> {
    let (tol, src) = ctx.tol(CheckId::BetaIdentities, 1e-10);
    let cases: Vec<(usize, usize)> = (2..=5usize).flat_map(|m| (1..m).map(move |p| (m, p))).collect();
    let results: Vec<Result<(f64, f64, f64)>> = cases
        .par_iter()
        .map(|&(m, p)| {
            let mut rng = ctx.rng(&format!("beta-identities/{m}/{p}"));
            let (mut trace, mut wedge, mut eig) = (0.0f64, 0.0f64, f64::INFINITY);
            for _ in 0..BETA_DRAWS {
                let fib = HermitianFiber::new(random_pd_hermitian(m, &mut rng))?;
                let dim = fib.basis().dim(p, 0);
                let coeffs: Vec<C64> = (0..dim).map(|_| complex_gaussian(&mut rng)).collect();
                let s = FiberForm::from_coeffs(fib.basis(), p, 0, coeffs)?;
                let eta = fib.one_one_form(&random_hermitian(m, &mut rng))?;
                let res = verify_l1(&fib, &s, &eta)?;
                trace = trace.max(res.trace);
                wedge = wedge.max(res.wedge);
                eig = eig.min(res.beta_min_eigen);
            }
            Ok((trace, wedge, eig))
        })
        .collect();
    for (&(m, p), res) in cases.iter().zip(results) {
        let (trace, wedge, eig) = res?;
        r.push(Evidence::below(&format!("m{m}p{p}.trace"), trace, tol, src));
        r.push(Evidence::below(&format!("m{m}p{p}.wedge"), wedge, tol, src));
        r.push(Evidence::at_least(&format!("m{m}p{p}.beta-min-eigen"), eig, -1e-12, "fixed"));
    }
    r.push(Evidence::measured("draws-per-case", BETA_DRAWS as f64));
    r.branch = "identity".into();
    Ok(())
}

const GROUP_SAMPLES: usize = 6;

/// Schur test for `∧^p` of sampled `U(m)` and `SU(m)` elements, with torus and
/// block subgroups as reducible controls.
fn rep_irreducibility(ctx: &Ctx, r: &mut CheckResult) -> Result<()> {
    let (tol, src) = ctx.tol(CheckId::RepIrreducibility, 1e-12);
    let cases: Vec<(usize, usize)> = (2..=5usize).flat_map(|m| (1..m).map(move |p| (m, p))).collect();
    let results: Vec<Result<Vec<Evidence>>> = cases
        .par_iter()
        .map(|&(m, p)| {
            let mut rng = ctx.rng(&format!("rep-irreducibility/{m}/{p}"));
            let rep = WedgeRep::new(m, p)?;
            let tag = format!("m{m}p{p}");
            let mut ev = Vec::new();
            let u = irreducibility_certificate(&rep, GroupSampler::Unitary, GROUP_SAMPLES, &mut rng)?;
            ev.push(Evidence::below(
                &format!("{tag}.unitary-commutant"),
                u.commutant_dim.max(u.commutant_dim_recheck) as f64,
                1.5,
                "exact",
            ));
            if let Some(c) = &u.constructive {
                ev.push(Evidence::below(&format!("{tag}.torus-projection"), c.projection_residual, tol, src));
                ev.push(Evidence::below(&format!("{tag}.unreached-weights"), (wedge_dim(m, p) - c.reached) as f64, 0.5, "exact"));
                ev.push(Evidence::measured(&format!("{tag}.sign-observed"), if c.sign_observed { 1.0 } else { 0.0 }));
            }
            let su = irreducibility_certificate(&rep, GroupSampler::SpecialUnitary, GROUP_SAMPLES, &mut rng)?;
            ev.push(Evidence::below(
                &format!("{tag}.special-unitary-commutant"),
                su.commutant_dim.max(su.commutant_dim_recheck) as f64,
                1.5,
                "exact",
            ));
            let torus = irreducibility_certificate(&rep, GroupSampler::Torus, GROUP_SAMPLES, &mut rng)?;
            ev.push(Evidence::at_least(&format!("{tag}.torus-commutant"), torus.commutant_dim as f64, 2.0, "exact"));
            let block = irreducibility_certificate(&rep, GroupSampler::Block { k: 1 }, GROUP_SAMPLES, &mut rng)?;
            ev.push(Evidence::at_least(&format!("{tag}.block-commutant"), block.commutant_dim as f64, 2.0, "exact"));
            if p == 2 && m <= 3 {
                let t = tensor_commutant_dim(m, 2, GROUP_SAMPLES, &mut rng)?;
                ev.push(Evidence::measured(&format!("m{m}.tensor-square-commutant"), t as f64));
            }
            Ok(ev)
        })
        .collect();
    for ev in results {
        for e in ev? {
            r.push(e);
        }
    }
    r.branch = "irreducible-with-controls".into();
    Ok(())
}

pub const LIE_TRIALS: usize = 50;

fn unit(m: usize, i: usize, j: usize, z: C64) -> CMat {
    let mut a = CMat::zeros(m, m);
    a[(i, j)] = z;
    a
}

/// Generators of `u(k)` (or `su(k)`) placed on the block `off..off+k`.
fn block_generators(m: usize, off: usize, k: usize, traceless: bool) -> Vec<CMat> {
    let mut out = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            out.push(unit(m, off + a, off + b, ONE) - unit(m, off + b, off + a, ONE));
            out.push(unit(m, off + a, off + b, IM) + unit(m, off + b, off + a, IM));
        }
    }
    for a in 0..k {
        if traceless {
            if a + 1 < k {
                out.push(unit(m, off + a, off + a, IM) - unit(m, off + a + 1, off + a + 1, IM));
            }
        } else {
            out.push(unit(m, off + a, off + a, IM));
        }
    }
    out
}

/// A closed subalgebra of `u(m)` built from a random block decomposition,
/// each block carrying `u(k)`, `su(k)`, scalars, a torus or nothing, then
/// conjugated by a random unitary.
fn random_subalgebra<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<crate::hol::MatrixLieSubalgebra> {
    let mut sizes = Vec::new();
    let mut left = m;
    while left > 0 {
        let k = if rng.random_bool(0.35) { left } else { rng.random_range(1..=left) };
        sizes.push(k);
        left -= k;
    }
    let mut gens = Vec::new();
    let mut off = 0;
    for k in sizes {
        match rng.random_range(0..5) {
            0 => gens.extend(block_generators(m, off, k, false)),
            1 => gens.extend(block_generators(m, off, k, true)),
            2 => gens.push((off..off + k).fold(CMat::zeros(m, m), |acc, i| acc + unit(m, i, i, IM))),
            3 => gens.extend((off..off + k).map(|i| unit(m, i, i, IM))),
            _ => {}
        }
        off += k;
    }
    let q = random_unitary(m, rng);
    let gens: Vec<CMat> = gens.iter().map(|g| &q * g * q.adjoint()).collect();
    lie_closure(Ambient::Unitary { m }, &gens, RankTol::EXACT)
}

/// Center is orthogonal to the derived algebra; irreducible algebras have
/// center inside `ℝ·i·id`; algebras without center are traceless.
fn lie_structure(ctx: &Ctx, r: &mut CheckResult) -> Result<()> {
    let (tol, src) = ctx.tol(CheckId::LieStructure, 1e-8);
    let trials: Vec<Result<(f64, Option<f64>, Option<f64>, Option<(f64, usize)>)>> = (0..LIE_TRIALS)
        .into_par_iter()
        .map(|i| {
            let m = 1 + i % 5;
            let mut rng = ctx.rng(&format!("lie-structure/{i}"));
            let g = random_subalgebra(m, &mut rng)?;
            let d = decompose(&g)?;
            let irr = is_irreducible(&g).is_irreducible();
            let center_scalar = irr.then(|| {
                d.center
                    .basis
                    .iter()
                    .map(|z| {
                        let s = z.trace() / C64::new(m as f64, 0.0);
                        crate::linalg::max_abs_c(&(z - CMat::identity(m, m) * s)) / crate::linalg::max_abs_c(z).max(1e-300)
                    })
                    .fold(0.0, f64::max)
            });
            let traceless = if d.center.dim() == 0 { Some(trace_norm(&g)?) } else { None };
            let rs = real_schur(&g)?;
            let schur = rs.real_irreducible.then_some((rs.skew_square, rs.skew_centralizer));
            Ok((d.orthogonality, center_scalar, traceless, schur))
        })
        .collect();
    let (mut orth, mut center, mut trace, mut skew_square) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let (mut irreducible, mut centerless, mut real_irreducible, mut centralizer) = (0, 0, 0, 0);
    for t in trials {
        let (o, c, tr, s) = t?;
        orth = orth.max(o);
        if let Some(c) = c {
            irreducible += 1;
            center = center.max(c);
        }
        if let Some(tr) = tr {
            centerless += 1;
            trace = trace.max(tr);
        }
        if let Some((sq, cz)) = s {
            real_irreducible += 1;
            skew_square = skew_square.max(sq);
            centralizer = centralizer.max(cz);
        }
    }
    r.push(Evidence::below("center-derived-orthogonality", orth, tol, src));
    r.push(Evidence::below("irreducible-center-off-scalar", center, tol, src));
    r.push(Evidence::below("centerless-trace-norm", trace, tol, src));
    r.push(Evidence::below("real-irreducible-skew-square", skew_square, tol, src));
    r.push(Evidence::below("real-irreducible-skew-centralizer", centralizer as f64, 1.5, "exact"));
    r.push(Evidence::measured("trials", LIE_TRIALS as f64));
    r.push(Evidence::measured("irreducible-trials", irreducible as f64));
    r.push(Evidence::measured("centerless-trials", centerless as f64));
    r.push(Evidence::measured("real-irreducible-trials", real_irreducible as f64));
    r.branch = "randomized".into();
    Ok(())
}

/// Greedy extremal frame on Fubini–Study-shifted random tensors:
/// `Ric(e_i, ē_i) >= κ(m+1)/2` with `κ` the minimum holomorphic sectional curvature.
fn frame_bound(ctx: &Ctx, r: &mut CheckResult) -> Result<()> {
    let (tol, src) = ctx.tol(CheckId::FrameBound, 1e-6);
    let draws = 5 * ctx.cfg.samples;
    for m in [2usize, 3] {
        let runs: Vec<Result<(f64, f64, f64, f64)>> = (0..draws)
            .into_par_iter()
            .map(|i| {
                let mut rng = ctx.rng(&format!("frame-bound/{m}/{i}"));
                let t = fs_shifted(m, &mut rng)?;
                let f = greedy_extremal_frame(&t, &mut rng)?;
                let order = f.h_values.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max);
                Ok((f.slack, f.unitarity, order, f.kappa))
            })
            .collect();
        let (mut slack, mut unitarity, mut order, mut kappa) = (f64::INFINITY, 0.0f64, 0.0f64, f64::INFINITY);
        for run in runs {
            let (s, u, o, k) = run?;
            slack = slack.min(s);
            unitarity = unitarity.max(u);
            order = order.max(o);
            kappa = kappa.min(k);
        }
        r.push(Evidence::at_least(&format!("m{m}.min-slack"), slack, -tol, src));
        r.push(Evidence::below(&format!("m{m}.unitarity"), unitarity, 1e-10, "fixed"));
        r.push(Evidence::below(&format!("m{m}.h-order-violation"), order, 1e-9, "fixed"));
        r.push(Evidence::measured(&format!("m{m}.min-kappa"), kappa));
        let mut rng = ctx.rng(&format!("frame-bound/fs/{m}"));
        let f = greedy_extremal_frame(&fs(m), &mut rng)?;
        r.push(Evidence::below(&format!("m{m}.fubini-study-saturation"), f.slack.abs(), 1e-9, "fixed"));
        r.push(Evidence::below(&format!("m{m}.fubini-study-kappa"), (f.kappa - 2.0).abs(), 1e-9, "fixed"));
    }
    r.push(Evidence::measured("draws-per-dimension", draws as f64));
    r.branch = "bound".into();
    Ok(())
}

/// `0 ⊕ R_FS` on `ℂ² ⊕ ℂ²`: the zero block has vanishing partial scalar curvature.
fn zero_plus_fs() -> Result<KaehlerCurvature> {
    let m: usize = 4;
    let block = fs(2);
    let mut r = vec![ZERO; m.pow(4)];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    r[KaehlerCurvature::idx(m, i + 2, j + 2, k + 2, l + 2)] = block.get(i, j, k, l);
                }
            }
        }
    }
    KaehlerCurvature::new(CMat::identity(m, m), r, Provenance::Given)
}

fn e_frame(m: usize, d: usize) -> CMat {
    CMat::from_fn(m, d, |i, j| if i == j { ONE } else { ZERO })
}

fn second_variation(ctx: &Ctx, r: &mut CheckResult) -> Result<()> {
    let (tol, src) = ctx.tol(CheckId::SecondVariation, 1e-6);
    for m in [2usize, 3] {
        let sv = second_variation_check(&fs(m), &e_frame(m, 1), VariationMode::HMin)?;
        r.push(Evidence::below(&format!("m{m}.fubini-study-slack"), sv.slack.abs(), 1e-9, "fixed"));
        r.push(Evidence::below(&format!("m{m}.fubini-study-inner-min"), (sv.inner_min - 1.0).abs(), 1e-9, "fixed"));
    }
    let draws = ctx.cfg.samples;
    let runs: Vec<Result<f64>> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = ctx.rng(&format!("second-variation/{i}"));
            let t = fs_shifted(3, &mut rng)?;
            let f = greedy_extremal_frame(&t, &mut rng)?;
            Ok(second_variation_check(&t, &f.frame.columns(0, 1).into_owned(), VariationMode::HMin)?.slack)
        })
        .collect();
    let mut slack = f64::INFINITY;
    for s in runs {
        slack = slack.min(s?);
    }
    r.push(Evidence::at_least("m3.shifted-min-slack", slack, -tol, src));
    r.push(Evidence::measured("shifted-draws", draws as f64));
    let zero = second_variation_check(&KaehlerCurvature::zero(4), &e_frame(4, 2), VariationMode::S2kMin)?;
    r.push(Evidence::below("zero-tensor-s2k-slack", zero.slack.abs(), 1e-12, "fixed"));
    let block = second_variation_check(&zero_plus_fs()?, &e_frame(4, 2), VariationMode::S2kMin)?;
    r.push(Evidence::at_least("block-tensor-s2k-slack", block.slack, -tol, src));
    r.branch = "inequality".into();
    Ok(())
}

fn berger_average(ctx: &Ctx, r: &mut CheckResult) -> Result<()> {
    let (tol, src) = ctx.tol(CheckId::BergerAverage, 1e-6);
    let mut rng = ctx.rng("berger-average/oracles");
    let b = berger_average_check(&fs(2), 1.0, 0.0, 1, &mut rng)?;
    r.push(Evidence::below("fs-m2-ricci-average", (b.average_min - 3.0).abs(), 1e-10, "fixed"));
    let b = berger_average_check(&fs(3), 1.0, -1.0, 1, &mut rng)?;
    r.push(Evidence::below("fs-m3-orthogonal-ricci-average", (b.average_min - 2.0).abs(), 1e-10, "fixed"));
    let b = berger_average_check(&KaehlerCurvature::zero(2), 1.0, 0.5, 1, &mut rng)?;
    r.push(Evidence::below("zero-tensor-average", b.average_min.abs(), 1e-14, "fixed"));
    let draws = ctx.cfg.samples.div_ceil(2);
    let runs: Vec<Result<Option<f64>>> = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = ctx.rng(&format!("berger-average/{i}"));
            let m = 2 + i % 3;
            let k = 1 + rng.random_range(0..m / 2);
            let beta = rng.random_range(-1.4..1.0);
            let t = fs_shifted(m, &mut rng)?;
            match berger_average_check(&t, 1.0, beta, k, &mut rng) {
                Ok(b) => Ok(Some(b.average_min)),
                Err(Error::HypothesisUnverified(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let (mut met, mut worst) = (0, f64::INFINITY);
    for run in runs {
        if let Some(a) = run? {
            met += 1;
            worst = worst.min(a);
        }
    }
    r.push(Evidence::measured("random-draws", draws as f64));
    r.push(Evidence::measured("random-hypothesis-met", met as f64));
    if met > 0 {
        r.push(Evidence::at_least("random-min-average", worst, -tol, src));
    }
    r.branch = "average".into();
    Ok(())
}

fn normal_form(ctx: &Ctx, r: &mut CheckResult) -> Result<()> {
    let (tol, src) = ctx.tol(CheckId::NormalForm, 1e-10);
    let fiber = HermitianFiber::identity(4)?;
    let mut a = CMat::zeros(4, 4);
    a[(0, 1)] = c64(2.0, 0.0);
    a[(1, 0)] = c64(-2.0, 0.0);
    a[(2, 3)] = c64(1.0, 0.0);
    a[(3, 2)] = c64(-1.0, 0.0);
    let nf = normal_form_2form(&fiber, &two_form_from_matrix(&fiber, &a)?)?;
    let pair_err = if nf.pairs.len() == 2 { (nf.pairs[0] - 2.0).abs().max((nf.pairs[1] - 1.0).abs()) } else { f64::INFINITY };
    r.push(Evidence::below("block-example-pairs", pair_err, tol, src));
    r.push(Evidence::below("block-example-rank-defect", nf.rank.abs_diff(2) as f64, 0.5, "exact"));

    let mut rng = ctx.rng("normal-form");
    let (mut recon, mut rank_gap, mut generic_gap, mut non_simple, mut order) = (0.0f64, 0usize, 0usize, 0usize, 0.0f64);
    let mut count = 0;
    for m in 2..=5usize {
        for _ in 0..ctx.cfg.samples {
            let fiber = HermitianFiber::new(random_pd_hermitian(m, &mut rng))?;
            let phi = two_form_from_matrix(&fiber, &random_complex_matrix(m, m, &mut rng))?;
            let nf = normal_form_2form(&fiber, &phi)?;
            recon = recon.max(nf.reconstruction);
            rank_gap += nf.rank.abs_diff(nf.wedge_rank);
            generic_gap += nf.rank.abs_diff(m / 2);
            non_simple += nf.simple_terms.abs_diff(1);
            order = order.max(nf.pairs.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max));
            count += 1;
        }
    }
    r.push(Evidence::below("random-reconstruction", recon, tol, src));
    r.push(Evidence::below("rank-vs-wedge-rank", rank_gap as f64, 0.5, "exact"));
    r.push(Evidence::below("rank-vs-generic", generic_gap as f64, 0.5, "exact"));
    r.push(Evidence::below("non-simple-top-power", non_simple as f64, 0.5, "exact"));
    r.push(Evidence::below("pair-order-violation", order, tol, src));
    r.push(Evidence::measured("random-forms", count as f64));
    r.branch = "normal-form".into();
    Ok(())
}

fn bochner_chain(ctx: &Ctx, r: &mut CheckResult) -> Result<()> {
    let (tol, src) = ctx.tol(CheckId::BochnerChain, 1e-9);
    let fiber = HermitianFiber::identity(4)?;
    let mut a = CMat::zeros(4, 4);
    a[(0, 1)] = ONE;
    a[(1, 0)] = -ONE;
    let phi = two_form_from_matrix(&fiber, &a)?;
    let c = bochner_chain_pointwise(&fs(4), &phi)?;
    r.push(Evidence::below("fs-m4-ricci-term", (c.ricci_term - 10.0).abs(), tol, src));
    r.push(Evidence::below("fs-m4-curvature-term", (c.curvature_term - 3.0).abs(), tol, src));
    let z = bochner_chain_pointwise(&KaehlerCurvature::zero(4), &phi)?;
    r.push(Evidence::below("zero-tensor-terms", z.ricci_term.abs().max(z.curvature_term.abs()), tol, src));

    let mut rng = ctx.rng("bochner-chain");
    let (mut beta, mut rhs, mut imag) = (0.0f64, 0.0f64, 0.0f64);
    let mut skipped = 0;
    for i in 0..ctx.cfg.samples {
        let m = 3 + i % 3;
        let rt = KaehlerCurvature::random_symmetrized(m, &mut rng);
        let fib = HermitianFiber::identity(m)?;
        let phi = two_form_from_matrix(&fib, &random_complex_matrix(m, m, &mut rng))?;
        match bochner_chain_pointwise(&rt, &phi)?.beta_residual {
            Some(b) => beta = beta.max(b),
            None => skipped += 1,
        }
        let p = 1 + i % (m - 1);
        let dim = fib.basis().dim(p, 0);
        let s = FiberForm::from_coeffs(fib.basis(), p, 0, (0..dim).map(|_| complex_gaussian(&mut rng)).collect())?;
        let v: Vec<C64> = (0..m).map(|_| complex_gaussian(&mut rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<C64> = v.iter().map(|z| z / norm).collect();
        let terms = bochner_rhs(&rt, &fib, &s, &v)?;
        rhs = rhs.max(terms.residual / terms.ordered.abs().max(1.0));
        imag = imag.max(terms.imaginary_part / terms.ordered.abs().max(1.0));
    }
    r.push(Evidence::below("beta-tilde-consistency", beta, tol, src));
    r.push(Evidence::measured("beta-tilde-skipped", skipped as f64));
    r.push(Evidence::below("bochner-ordered-vs-diagonalized", rhs, tol, src));
    r.push(Evidence::below("bochner-imaginary-part", imag, tol, src));
    r.push(Evidence::measured("draws", ctx.cfg.samples as f64));
    r.branch = "identity".into();
    Ok(())
}
