use super::CheckId;
use crate::conn::ConnectionKind;
use crate::error::{Error, Result};
use crate::models::{catalog, catalog_names, ManifoldModel, Params};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const DEFAULT_SEED: u64 = 0x5EED;
pub const DEFAULT_SAMPLES: usize = 20;

/// A catalog entry with its constructor parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSpec {
    pub name: String,
    pub params: Params,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
}

impl ModelSpec {
    pub fn named(name: &str) -> Self {
        Self { name: name.to_string(), params: Params::new(), fd_step: None }
    }

    pub fn with_param(mut self, key: &str, value: serde_json::Value) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    /// Stable identifier used in reports and for per-model seeding.
    pub fn label(&self) -> String {
        let mut s = self.name.clone();
        if !self.params.is_empty() {
            s.push_str(&serde_json::to_string(&self.params).unwrap_or_default());
        }
        if let Some(h) = self.fd_step {
            s.push_str(&format!("@h={h:e}"));
        }
        s
    }

    pub fn build(&self) -> Result<ManifoldModel> {
        let model = catalog(&self.name, &self.params)?;
        match self.fd_step {
            Some(h) => model.with_fd_step(h),
            None => Ok(model),
        }
    }
}

/// Parsed and validated run configuration.
#[derive(Debug, Clone, Serialize)]
pub struct CheckConfig {
    pub seed: u64,
    pub samples: usize,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    pub checks: Vec<CheckId>,
    pub kinds: Vec<ConnectionKind>,
    pub models: Vec<ModelSpec>,
    pub tolerances: BTreeMap<CheckId, f64>,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            output: None,
            checks: CheckId::ALL.to_vec(),
            kinds: default_kinds(),
            models: Vec::new(),
            tolerances: BTreeMap::new(),
        }
    }
}

pub fn default_kinds() -> Vec<ConnectionKind> {
    vec![ConnectionKind::LeviCivita, ConnectionKind::Chern, ConnectionKind::Bismut, ConnectionKind::Gauduchon { t: 1.0 }]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    samples: Option<usize>,
    output: Option<PathBuf>,
    checks: Option<Vec<String>>,
    kinds: Option<Vec<RawKind>>,
    model: Option<RawModel>,
    models: Option<RawModels>,
    #[serde(default)]
    tolerances: BTreeMap<String, f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawKind {
    Name(String),
    Table(KindTable),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KindTable {
    kind: String,
    t: Option<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawModel {
    Name(String),
    Table(ModelTable),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelTable {
    name: String,
    #[serde(default)]
    params: Params,
    fd_step: Option<f64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawModels {
    /// `"catalog"`: every catalog entry with default parameters.
    Keyword(String),
    List(Vec<RawModel>),
}

impl RawModel {
    fn into_spec(self) -> ModelSpec {
        match self {
            RawModel::Name(name) => ModelSpec::named(&name),
            RawModel::Table(t) => ModelSpec { name: t.name, params: t.params, fd_step: t.fd_step },
        }
    }
}

impl CheckConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = CheckConfig::default();
        if let Some(seed) = raw.seed {
            cfg.seed = seed;
        }
        if let Some(samples) = raw.samples {
            if samples == 0 {
                return Err(Error::Config("samples must be at least 1".into()));
            }
            cfg.samples = samples;
        }
        cfg.output = raw.output;
        if let Some(names) = raw.checks {
            cfg.checks = names.iter().map(|n| CheckId::parse(n)).collect::<Result<_>>()?;
            cfg.checks.dedup();
        }
        if let Some(kinds) = raw.kinds {
            cfg.kinds = kinds
                .into_iter()
                .map(|k| match k {
                    RawKind::Name(n) => ConnectionKind::parse(&n, None),
                    RawKind::Table(t) => ConnectionKind::parse(&t.kind, t.t),
                })
                .collect::<Result<_>>()
                .map_err(|e| Error::Config(e.to_string()))?;
        }
        let mut models = Vec::new();
        if let Some(m) = raw.model {
            models.push(m.into_spec());
        }
        match raw.models {
            None => {}
            Some(RawModels::Keyword(k)) if k == "catalog" => models.extend(catalog_names().iter().map(|n| ModelSpec::named(n))),
            Some(RawModels::Keyword(k)) => {
                return Err(Error::Config(format!("models must be a list or \"catalog\", got \"{k}\"")));
            }
            Some(RawModels::List(list)) => models.extend(list.into_iter().map(RawModel::into_spec)),
        }
        cfg.models = models;
        for (key, value) in raw.tolerances {
            let id = CheckId::parse(&key).map_err(|_| Error::Config(format!("unknown tolerance key '{key}'")))?;
            if !id.tunable() {
                return Err(Error::Config(format!("check '{key}' has no overridable tolerance")));
            }
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!("tolerance for '{key}' must be positive, got {value}")));
            }
            cfg.tolerances.insert(id, value);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Models must build, and model-dependent checks need at least one model.
    pub fn validate(&self) -> Result<()> {
        for spec in &self.models {
            spec.build().map_err(|e| Error::Config(format!("model '{}': {e}", spec.label())))?;
        }
        if self.models.is_empty() && self.checks.iter().any(|c| !c.is_global()) {
            return Err(Error::Config("no model given (use `model`, `models = [...]` or `models = \"catalog\"`)".into()));
        }
        if self.kinds.is_empty() && self.checks.iter().any(|c| c.per_kind()) {
            return Err(Error::Config("no connection kind given".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let cfg = CheckConfig::from_toml("model = \"flat\"\nchecks = [\"bianchi\"]\n").unwrap();
        assert_eq!(cfg.checks, vec![CheckId::Bianchi]);
        assert_eq!(cfg.models[0].name, "flat");
        assert_eq!(cfg.seed, DEFAULT_SEED);
    }

    #[test]
    fn table_forms() {
        let text = r#"
            seed = 7
            samples = 3
            kinds = ["chern", { kind = "gauduchon", t = 0.5 }]
            models = ["flat", { name = "fubini-study", params = { m = 1 }, fd_step = 2e-4 }]
            [tolerances]
            bianchi = 1e-3
        "#;
        let cfg = CheckConfig::from_toml(text).unwrap();
        assert_eq!(cfg.kinds[1], ConnectionKind::Gauduchon { t: 0.5 });
        assert_eq!(cfg.models[1].fd_step, Some(2e-4));
        assert_eq!(cfg.tolerances[&CheckId::Bianchi], 1e-3);
    }

    #[test]
    fn rejections() {
        for text in [
            "model = \"flat\"\nchecks = [\"foo\"]",
            "model = \"flat\"\n[tolerances]\nfoo = 1.0",
            "model = \"flat\"\nunknown_key = 1",
            "model = \"nowhere\"",
            "checks = [\"bianchi\"]",
            "model = \"flat\"\nkinds = [\"gauduchon\"]",
            "model = { name = \"flat\", params = { m = 0 } }",
        ] {
            assert!(matches!(CheckConfig::from_toml(text), Err(Error::Config(_))), "{text}");
        }
    }

    #[test]
    fn catalog_keyword() {
        let cfg = CheckConfig::from_toml("models = \"catalog\"").unwrap();
        assert_eq!(cfg.models.len(), catalog_names().len());
    }
}
