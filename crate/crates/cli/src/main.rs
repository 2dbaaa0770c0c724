use clap::{Parser, Subcommand};
use holomat::conn::ConnectionKind;
use holomat::models::{catalog, catalog_names, Params};
use holomat::verify::{run_checks, run_config_file, CheckConfig, CheckId, CheckReport, ModelSpec, Scope, Status};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "holomat", version, about = "Hermitian connection and holonomy verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check listed in a TOML config and write its report.
    Run { config: PathBuf },
    /// List catalog models and check identifiers.
    Catalog,
    /// Run a single check on one model and connection kind.
    Check {
        name: String,
        #[arg(long)]
        model: Option<String>,
        #[arg(long)]
        kind: Option<String>,
        /// Gauduchon parameter, required with `--kind gauduchon`.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn status_tag(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::HypothesisNotMet => "HNM ",
        Status::ApproximationUnstable => "UNST",
    }
}

fn print_report(report: &CheckReport) {
    for r in &report.body.checks {
        let model = r.model.as_deref().unwrap_or("-");
        let kind = r.kind.map(|k| k.label()).unwrap_or_else(|| "-".into());
        let mut line = format!("{} {:<26} {:<30} {:<16} {}", status_tag(r.status), r.check.name(), model, kind, r.branch);
        if let Some(note) = &r.note {
            line.push_str(&format!("  ({note})"));
        }
        println!("{}", line.trim_end());
    }
    let s = &report.body.summary;
    println!(
        "{} checks: {} pass, {} fail, {} hypothesis-not-met, {} approximation-unstable; exit {}",
        s.total,
        s.pass,
        s.fail,
        s.hypothesis_not_met,
        s.approximation_unstable,
        report.exit_code()
    );
}

fn list_catalog() -> holomat::Result<()> {
    println!("models:");
    for name in catalog_names() {
        let model = catalog(&name, &Params::new())?;
        let tags = if model.expected.is_empty() { String::new() } else { format!("  [{}]", model.expected.join(", ")) };
        let shape = if model.is_invariant() { "left-invariant" } else { "chart" };
        println!("  {name:<30} m={} {shape}{tags}", model.m);
    }
    println!("checks:");
    for id in CheckId::ALL {
        let scope = match id.scope() {
            Scope::Pair => "per model and kind",
            Scope::Model => "per model",
            Scope::Global => "global",
        };
        println!("  {:<26} {scope}", id.name());
    }
    println!("kinds: levi-civita, chern, bismut, gauduchon (with --t)");
    Ok(())
}

fn single_check(
    name: &str,
    model: Option<String>,
    kind: Option<String>,
    t: Option<f64>,
    samples: Option<usize>,
    seed: Option<u64>,
) -> holomat::Result<CheckReport> {
    let id = CheckId::parse(name)?;
    let config_err = |msg: String| holomat::Error::Config(msg);
    let mut cfg = CheckConfig { checks: vec![id], ..CheckConfig::default() };
    if let Some(s) = samples {
        cfg.samples = s.max(1);
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    match (id.scope(), model) {
        (Scope::Global, _) => {}
        (_, Some(m)) => cfg.models = vec![ModelSpec::named(&m)],
        (_, None) => return Err(config_err(format!("check '{name}' needs --model"))),
    }
    cfg.kinds = match (id.per_kind(), kind) {
        (true, Some(k)) => vec![ConnectionKind::parse(&k, t).map_err(|e| config_err(e.to_string()))?],
        (true, None) => return Err(config_err(format!("check '{name}' needs --kind"))),
        (false, _) => Vec::new(),
    };
    run_checks(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Catalog => list_catalog().map(|_| 0),
        Command::Run { config } => run_config_file(&config).map(|report| {
            print_report(&report);
            report.exit_code()
        }),
        Command::Check { name, model, kind, t, json, samples, seed } => {
            single_check(&name, model, kind, t, samples, seed).and_then(|report| {
                print_report(&report);
                if let Some(path) = json {
                    std::fs::write(path, report.to_json())?;
                }
                Ok(report.exit_code())
            })
        }
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
