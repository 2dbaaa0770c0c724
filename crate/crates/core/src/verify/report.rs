use super::config::CheckConfig;
use super::CheckId;
use crate::conn::ConnectionKind;
use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    HypothesisNotMet,
    ApproximationUnstable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    /// Must hold for the check to pass.
    Assertion,
    /// Decides which branch of an implication applies; never fails a check.
    Hypothesis,
    Measurement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `value < tol`
    Below,
    /// `value >= tol`
    AtLeast,
}

/// One recorded number, with the threshold it was compared against and where
/// that threshold came from.
#[derive(Debug, Clone, Serialize)]
pub struct Evidence {
    pub name: String,
    pub value: f64,
    pub role: Role,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relation: Option<Relation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub source: String,
}

impl Evidence {
    fn compared(name: &str, value: f64, tol: f64, relation: Relation, role: Role, source: &str) -> Self {
        let holds = match relation {
            Relation::Below => value < tol,
            Relation::AtLeast => value >= tol,
        };
        Self { name: name.into(), value, role, tol: Some(tol), relation: Some(relation), holds: Some(holds), source: source.into() }
    }

    pub fn below(name: &str, value: f64, tol: f64, source: &str) -> Self {
        Self::compared(name, value, tol, Relation::Below, Role::Assertion, source)
    }

    pub fn at_least(name: &str, value: f64, bound: f64, source: &str) -> Self {
        Self::compared(name, value, bound, Relation::AtLeast, Role::Assertion, source)
    }

    pub fn hypothesis_below(name: &str, value: f64, tol: f64, source: &str) -> Self {
        Self::compared(name, value, tol, Relation::Below, Role::Hypothesis, source)
    }

    pub fn hypothesis_at_least(name: &str, value: f64, bound: f64, source: &str) -> Self {
        Self::compared(name, value, bound, Relation::AtLeast, Role::Hypothesis, source)
    }

    pub fn measured(name: &str, value: f64) -> Self {
        Self { name: name.into(), value, role: Role::Measurement, tol: None, relation: None, holds: None, source: String::new() }
    }

    pub fn violated(&self) -> bool {
        self.role == Role::Assertion && self.holds == Some(false)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check: CheckId,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kind: Option<ConnectionKind>,
    pub status: Status,
    pub branch: String,
    pub evidence: Vec<Evidence>,
    #[serde(skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    pub fn new(check: CheckId, model: Option<String>, kind: Option<ConnectionKind>) -> Self {
        Self {
            check,
            model,
            kind,
            status: Status::Pass,
            branch: String::new(),
            evidence: Vec::new(),
            details: serde_json::Value::Null,
            note: None,
        }
    }

    pub fn push(&mut self, e: Evidence) -> &mut Self {
        self.evidence.push(e);
        self
    }

    pub fn any_violation(&self) -> bool {
        self.evidence.iter().any(Evidence::violated)
    }

    /// A pass with a violated assertion becomes a fail; so does a pass that
    /// records no number at all.
    pub fn enforce(mut self) -> Self {
        if self.status == Status::Pass && (self.any_violation() || self.evidence.is_empty()) {
            self.status = Status::Fail;
            if self.evidence.is_empty() {
                self.note.get_or_insert_with(|| "no evidence recorded".into());
            }
        }
        self
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub hypothesis_not_met: usize,
    pub approximation_unstable: usize,
}

impl Summary {
    pub fn of(results: &[CheckResult]) -> Self {
        let mut s = Summary { total: results.len(), ..Default::default() };
        for r in results {
            match r.status {
                Status::Pass => s.pass += 1,
                Status::Fail => s.fail += 1,
                Status::HypothesisNotMet => s.hypothesis_not_met += 1,
                Status::ApproximationUnstable => s.approximation_unstable += 1,
            }
        }
        s
    }

    /// 0 when nothing failed or was unstable, 2 on any failure, 3 on instability alone.
    pub fn exit_code(&self) -> i32 {
        if self.fail > 0 {
            2
        } else if self.approximation_unstable > 0 {
            3
        } else {
            0
        }
    }
}

/// Everything that varies between otherwise identical runs.
#[derive(Debug, Clone, Serialize)]
pub struct Header {
    pub generated_unix: u64,
    pub tool: String,
}

impl Header {
    pub fn now() -> Self {
        let secs = std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        Self { generated_unix: secs, tool: format!("holomat {}", env!("CARGO_PKG_VERSION")) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub header: Header,
    #[serde(flatten)]
    pub body: ReportBody,
}

/// The deterministic part of a report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportBody {
    pub schema: u32,
    pub config: CheckConfig,
    pub summary: Summary,
    pub exit_code: i32,
    pub checks: Vec<CheckResult>,
}

impl CheckReport {
    pub fn new(config: CheckConfig, checks: Vec<CheckResult>) -> Self {
        let summary = Summary::of(&checks);
        let exit_code = summary.exit_code();
        Self { header: Header::now(), body: ReportBody { schema: SCHEMA_VERSION, config, summary, exit_code, checks } }
    }

    pub fn exit_code(&self) -> i32 {
        self.body.exit_code
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Serialized report without the header, for reproducibility comparisons.
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.body).expect("report serializes")
    }
}
