//! Verification pipelines over catalog models: configuration, scheduling of
//! per-model, per-connection and model-independent checks, and JSON reports.

mod checks;
pub mod config;
pub mod report;
mod suites;

pub use config::{default_kinds, CheckConfig, ModelSpec, DEFAULT_SAMPLES, DEFAULT_SEED};
pub use report::{CheckReport, CheckResult, Evidence, Relation, ReportBody, Role, Status, Summary, SCHEMA_VERSION};

use crate::conn::{ConnectionKind, SignConvention};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::models::ManifoldModel;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckId {
    Bianchi,
    MetricCompatibility,
    TorsionNijenhuis,
    Holonomy,
    ParallelTorsionKaehler,
    SubbundleTorsion,
    RicciSu,
    FdConvergence,
    BismutSkew,
    GauduchonEndpoints,
    KaehlerDetection,
    TorsionRelations,
    BracketJacobi,
    TrivialHolonomy,
    ExpectedProperties,
    KaehlerIdentities,
    BetaIdentities,
    RepIrreducibility,
    LieStructure,
    FrameBound,
    SecondVariation,
    BergerAverage,
    NormalForm,
    BochnerChain,
}

/// What a check is evaluated over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Once per (model, connection kind).
    Pair,
    /// Once per model.
    Model,
    /// Once per run, independent of models.
    Global,
}

impl CheckId {
    pub const ALL: [CheckId; 24] = [
        CheckId::Bianchi,
        CheckId::MetricCompatibility,
        CheckId::TorsionNijenhuis,
        CheckId::Holonomy,
        CheckId::ParallelTorsionKaehler,
        CheckId::SubbundleTorsion,
        CheckId::RicciSu,
        CheckId::FdConvergence,
        CheckId::BismutSkew,
        CheckId::GauduchonEndpoints,
        CheckId::KaehlerDetection,
        CheckId::TorsionRelations,
        CheckId::BracketJacobi,
        CheckId::TrivialHolonomy,
        CheckId::ExpectedProperties,
        CheckId::KaehlerIdentities,
        CheckId::BetaIdentities,
        CheckId::RepIrreducibility,
        CheckId::LieStructure,
        CheckId::FrameBound,
        CheckId::SecondVariation,
        CheckId::BergerAverage,
        CheckId::NormalForm,
        CheckId::BochnerChain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckId::Bianchi => "bianchi",
            CheckId::MetricCompatibility => "metric-compatibility",
            CheckId::TorsionNijenhuis => "torsion-nijenhuis",
            CheckId::Holonomy => "holonomy",
            CheckId::ParallelTorsionKaehler => "parallel-torsion-kaehler",
            CheckId::SubbundleTorsion => "subbundle-torsion",
            CheckId::RicciSu => "ricci-su",
            CheckId::FdConvergence => "fd-convergence",
            CheckId::BismutSkew => "bismut-skew",
            CheckId::GauduchonEndpoints => "gauduchon-endpoints",
            CheckId::KaehlerDetection => "kaehler-detection",
            CheckId::TorsionRelations => "torsion-relations",
            CheckId::BracketJacobi => "bracket-jacobi",
            CheckId::TrivialHolonomy => "trivial-holonomy",
            CheckId::ExpectedProperties => "expected-properties",
            CheckId::KaehlerIdentities => "kaehler-identities",
            CheckId::BetaIdentities => "beta-identities",
            CheckId::RepIrreducibility => "rep-irreducibility",
            CheckId::LieStructure => "lie-structure",
            CheckId::FrameBound => "frame-bound",
            CheckId::SecondVariation => "second-variation",
            CheckId::BergerAverage => "berger-average",
            CheckId::NormalForm => "normal-form",
            CheckId::BochnerChain => "bochner-chain",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL.iter().copied().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|c| c.name()).collect();
            Error::Config(format!("unknown check '{s}' (known: {})", names.join(", ")))
        })
    }

    pub fn scope(self) -> Scope {
        use CheckId::*;
        match self {
            Bianchi
            | MetricCompatibility
            | TorsionNijenhuis
            | Holonomy
            | ParallelTorsionKaehler
            | SubbundleTorsion
            | RicciSu
            | FdConvergence => Scope::Pair,
            BismutSkew | GauduchonEndpoints | KaehlerDetection | TorsionRelations | BracketJacobi | TrivialHolonomy
            | ExpectedProperties => Scope::Model,
            _ => Scope::Global,
        }
    }

    pub fn is_global(self) -> bool {
        self.scope() == Scope::Global
    }

    pub fn per_kind(self) -> bool {
        self.scope() == Scope::Pair
    }

    /// Whether `[tolerances]` may override the assertion thresholds. Ratio and
    /// agreement checks have no single threshold to override.
    pub fn tunable(self) -> bool {
        !matches!(self, CheckId::RicciSu | CheckId::FdConvergence)
    }
}

impl std::fmt::Display for CheckId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Threshold lookup and seeded randomness shared by all checks of a run.
pub(crate) struct Ctx<'a> {
    pub cfg: &'a CheckConfig,
}

impl Ctx<'_> {
    /// Assertion threshold and where it came from.
    pub fn tol(&self, id: CheckId, default: f64) -> (f64, &'static str) {
        match self.cfg.tolerances.get(&id) {
            Some(&v) => (v, "config"),
            None => (default, "default"),
        }
    }

    pub fn rng(&self, label: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ fnv1a(label))
    }
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// A model with its evaluation points: the base point followed by seeded
/// samples, or the identity alone on left-invariant models.
pub(crate) struct ModelCtx {
    pub label: String,
    pub model: ManifoldModel,
    pub points: Vec<Vec<C64>>,
}

impl ModelCtx {
    pub fn new(ctx: &Ctx, spec: &ModelSpec) -> Result<Self> {
        let model = spec.build()?;
        let label = spec.label();
        let mut points = vec![model.base_point()];
        if !model.is_invariant() {
            let mut rng = ctx.rng(&label);
            points.extend((1..ctx.cfg.samples).map(|_| model.sample_point(&mut rng)));
        }
        Ok(Self { label, model, points })
    }

    pub fn exact(&self) -> bool {
        self.model.is_invariant()
    }

    /// `(exact, chart)` default by model type.
    pub fn pick(&self, exact: f64, chart: f64) -> f64 {
        if self.exact() {
            exact
        } else {
            chart
        }
    }
}

/// Status an error maps to when a check cannot complete.
pub fn error_status(e: &Error) -> Status {
    match e {
        Error::NotConverged(_) | Error::UncertifiedMinimizer(_) => Status::ApproximationUnstable,
        Error::HypothesisUnverified(_) | Error::AmbientMismatch(_) => Status::HypothesisNotMet,
        _ => Status::Fail,
    }
}

pub(crate) fn error_result(id: CheckId, model: Option<&str>, kind: Option<ConnectionKind>, e: &Error) -> CheckResult {
    let mut r = CheckResult::new(id, model.map(String::from), kind);
    r.status = error_status(e);
    r.branch = match r.status {
        Status::ApproximationUnstable => "approximation-unstable",
        Status::HypothesisNotMet => "hypothesis-not-met",
        _ => "error",
    }
    .into();
    r.note = Some(e.to_string());
    r.push(Evidence::measured("error", 1.0));
    r
}

fn finish(id: CheckId, model: Option<&str>, kind: Option<ConnectionKind>, out: Result<CheckResult>) -> CheckResult {
    match out {
        Ok(r) => r.enforce(),
        Err(e) => error_result(id, model, kind, &e).enforce(),
    }
}

enum Task<'a> {
    Model(&'a ModelCtx, Vec<CheckId>),
    Pair(&'a ModelCtx, ConnectionKind, Vec<CheckId>),
    Global(CheckId),
}

fn run_task(ctx: &Ctx, task: &Task) -> Vec<CheckResult> {
    match task {
        Task::Model(mc, ids) => ids.iter().map(|&id| finish(id, Some(&mc.label), None, checks::model_check(ctx, mc, id))).collect(),
        Task::Pair(mc, kind, ids) => {
            let pair = checks::PairCtx::new(mc, *kind);
            ids.iter().map(|&id| finish(id, Some(&mc.label), Some(*kind), checks::pair_check(ctx, &pair, id))).collect()
        }
        Task::Global(id) => vec![finish(*id, None, None, suites::global_check(ctx, *id))],
    }
}

/// The sign convention of the torsion relations must not depend on the model.
fn convention_consistency(results: &[CheckResult]) -> Option<CheckResult> {
    let mut seen: Vec<SignConvention> = Vec::new();
    let mut any = false;
    for r in results.iter().filter(|r| r.check == CheckId::TorsionRelations && r.model.is_some()) {
        any = true;
        if let Some(c) = r.details.get("convention").and_then(|v| serde_json::from_value::<SignConvention>(v.clone()).ok()) {
            if c != SignConvention::Indeterminate && !seen.contains(&c) {
                seen.push(c);
            }
        }
    }
    if !any {
        return None;
    }
    let mut out = CheckResult::new(CheckId::TorsionRelations, None, None);
    out.branch = "convention-consistency".into();
    out.push(Evidence::below("distinct-conventions", seen.len() as f64, 1.5, "exact"));
    out.details = serde_json::json!({ "conventions": seen });
    Some(out.enforce())
}

/// Runs every configured check; results are in a fixed order independent of
/// scheduling: model checks, then (model, kind) checks, then global ones.
pub fn run_checks(cfg: &CheckConfig) -> Result<CheckReport> {
    cfg.validate()?;
    let ctx = Ctx { cfg };
    let model_ids: Vec<CheckId> = cfg.checks.iter().copied().filter(|c| c.scope() == Scope::Model).collect();
    let pair_ids: Vec<CheckId> = cfg.checks.iter().copied().filter(|c| c.scope() == Scope::Pair).collect();
    let models: Vec<ModelCtx> = if model_ids.is_empty() && pair_ids.is_empty() {
        Vec::new()
    } else {
        cfg.models.iter().map(|s| ModelCtx::new(&ctx, s)).collect::<Result<_>>()?
    };
    let mut tasks = Vec::new();
    for mc in &models {
        if !model_ids.is_empty() {
            tasks.push(Task::Model(mc, model_ids.clone()));
        }
    }
    for mc in &models {
        if !pair_ids.is_empty() {
            for &kind in &cfg.kinds {
                tasks.push(Task::Pair(mc, kind, pair_ids.clone()));
            }
        }
    }
    tasks.extend(cfg.checks.iter().copied().filter(|c| c.is_global()).map(Task::Global));

    let go = || -> Vec<CheckResult> { tasks.par_iter().map(|t| run_task(&ctx, t)).collect::<Vec<_>>().concat() };
    let mut results = match thread_cap() {
        Some(n) => {
            rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| Error::Config(format!("thread pool: {e}")))?.install(go)
        }
        None => go(),
    };
    if let Some(c) = convention_consistency(&results) {
        results.push(c);
    }
    Ok(CheckReport::new(cfg.clone(), results))
}

/// `HOLOMAT_THREADS`, when set to a positive integer.
fn thread_cap() -> Option<usize> {
    std::env::var("HOLOMAT_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Parses a config file, runs it and writes the report when an output path is
/// configured. Returns the report; the exit code is `report.exit_code()`.
pub fn run_config_file(path: &std::path::Path) -> Result<CheckReport> {
    let cfg = CheckConfig::from_path(path)?;
    let report = run_checks(&cfg)?;
    if let Some(out) = &cfg.output {
        let out = if out.is_relative() { path.parent().unwrap_or(std::path::Path::new(".")).join(out) } else { out.clone() };
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(&out, report.to_json())?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifiers_roundtrip() {
        for id in CheckId::ALL {
            assert_eq!(CheckId::parse(id.name()).unwrap(), id);
            assert_eq!(serde_json::to_value(id).unwrap(), serde_json::json!(id.name()));
        }
        assert!(matches!(CheckId::parse("foo"), Err(Error::Config(_))));
    }

    #[test]
    fn flat_bianchi_run() {
        let cfg = CheckConfig::from_toml("model = \"flat\"\nchecks = [\"bianchi\"]\nsamples = 3").unwrap();
        let report = run_checks(&cfg).unwrap();
        assert_eq!(report.exit_code(), 0);
        assert_eq!(report.body.checks.len(), 4);
        assert!(report.body.checks.iter().all(|c| c.status == Status::Pass));
    }
}
