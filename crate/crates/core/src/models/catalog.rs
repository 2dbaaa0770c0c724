use super::{validate_metric, ChartModel, Factor, LieGroupModel, ManifoldModel, DEFAULT_FD_STEP};
use crate::error::{Error, Result};
use crate::linalg::{c64, CMat, C64, ZERO};
use rand::{Rng, RngCore, SeedableRng};
use serde_json::Value;
use std::sync::Arc;

pub type Params = serde_json::Map<String, Value>;

const NAMES: [&str; 8] =
    ["flat", "torus-flat", "fubini-study", "hopf-surface", "complex-lie-group-2d", "complex-lie-group-heisenberg", "product", "perturbed"];

pub fn catalog_names() -> Vec<String> {
    NAMES.iter().map(|s| s.to_string()).collect()
}

fn get_usize(p: &Params, key: &str, default: usize) -> Result<usize> {
    match p.get(key) {
        None => Ok(default),
        Some(v) => v.as_u64().map(|x| x as usize).ok_or_else(|| Error::InvalidParams(format!("'{key}' must be a non-negative integer"))),
    }
}

fn get_f64(p: &Params, key: &str, default: f64) -> Result<f64> {
    match p.get(key) {
        None => Ok(default),
        Some(v) => v.as_f64().ok_or_else(|| Error::InvalidParams(format!("'{key}' must be a number"))),
    }
}

fn get_str<'a>(p: &'a Params, key: &str, default: &'a str) -> Result<&'a str> {
    match p.get(key) {
        None => Ok(default),
        Some(v) => v.as_str().ok_or_else(|| Error::InvalidParams(format!("'{key}' must be a string"))),
    }
}

fn check_keys(p: &Params, allowed: &[&str]) -> Result<()> {
    for k in p.keys() {
        if !allowed.contains(&k.as_str()) && k != "fd_step" {
            return Err(Error::InvalidParams(format!("unknown parameter '{k}' (allowed: {})", allowed.join(", "))));
        }
    }
    Ok(())
}

/// Optional positive diagonal for left-invariant metrics.
fn lie_metric(p: &Params, m: usize) -> Result<CMat> {
    let Some(v) = p.get("metric_diag") else {
        return Ok(CMat::identity(m, m));
    };
    let arr = v.as_array().ok_or_else(|| Error::InvalidParams("'metric_diag' must be an array".into()))?;
    if arr.len() != m {
        return Err(Error::InvalidParams(format!("'metric_diag' needs {m} entries")));
    }
    let mut h = CMat::zeros(m, m);
    for (i, x) in arr.iter().enumerate() {
        let d = x.as_f64().ok_or_else(|| Error::InvalidParams("'metric_diag' entries must be numbers".into()))?;
        h[(i, i)] = c64(d, 0.0);
    }
    validate_metric(&h)?;
    Ok(h)
}

fn uniform_box(m: usize, half: f64) -> super::SampleFn {
    Arc::new(move |rng: &mut dyn RngCore| (0..m).map(|_| c64(rng.random_range(-half..half), rng.random_range(-half..half))).collect())
}

fn flat_chart(m: usize) -> ChartModel {
    ChartModel {
        m,
        metric_fn: Arc::new(move |_z: &[C64]| CMat::identity(m, m)),
        margin_fn: Arc::new(|z: &[C64]| z.iter().map(|w| (1.0 - w.re.abs()).min(1.0 - w.im.abs())).fold(f64::INFINITY, f64::min)),
        sampler: uniform_box(m, 0.5),
        base_point: vec![ZERO; m],
    }
}

/// `g_{ij̄} = ∂_i ∂_j̄ log(1 + |z|²)` in closed form.
pub(crate) fn fubini_study_metric(z: &[C64]) -> CMat {
    let m = z.len();
    let s = 1.0 + z.iter().map(|w| w.norm_sqr()).sum::<f64>();
    CMat::from_fn(m, m, |i, j| {
        let d = if i == j { c64(1.0 / s, 0.0) } else { ZERO };
        d - z[i].conj() * z[j] / (s * s)
    })
}

fn fubini_study_chart(m: usize) -> ChartModel {
    ChartModel {
        m,
        metric_fn: Arc::new(fubini_study_metric),
        margin_fn: Arc::new(|z: &[C64]| 2.0 - z.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt()),
        sampler: uniform_box(m, 0.4),
        base_point: vec![ZERO; m],
    }
}

fn hopf_chart(m: usize) -> ChartModel {
    let mut base = vec![ZERO; m];
    base[0] = c64(1.0, 0.0);
    ChartModel {
        m,
        metric_fn: Arc::new(move |z: &[C64]| {
            let r2: f64 = z.iter().map(|w| w.norm_sqr()).sum();
            CMat::identity(m, m) * c64(1.0 / r2, 0.0)
        }),
        margin_fn: Arc::new(|z: &[C64]| {
            let r = z.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
            (r - 0.5).min(2.0 - r)
        }),
        sampler: Arc::new(move |rng: &mut dyn RngCore| {
            let v: Vec<C64> = (0..m)
                .map(|_| {
                    let re: f64 = rng.sample(rand_distr::StandardNormal);
                    let im: f64 = rng.sample(rand_distr::StandardNormal);
                    c64(re, im)
                })
                .collect();
            let n = v.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
            let r = rng.random_range(0.7..1.5);
            v.iter().map(|w| w * (r / n)).collect()
        }),
        base_point: base,
    }
}

fn structure(m: usize, entries: &[(usize, usize, usize, f64)]) -> Vec<C64> {
    let mut c = vec![ZERO; m * m * m];
    for &(i, j, k, v) in entries {
        c[(i * m + j) * m + k] += c64(v, 0.0);
        c[(j * m + i) * m + k] -= c64(v, 0.0);
    }
    c
}

fn tags(t: &[&str]) -> Vec<String> {
    t.iter().map(|s| s.to_string()).collect()
}

fn single_factor(name: &str, p: &Params, default_m: usize) -> Result<(Factor, Vec<String>)> {
    match name {
        "flat" => {
            check_keys(p, &["m"])?;
            let m = get_usize(p, "m", default_m)?;
            positive_dim(m)?;
            Ok((Factor::Chart(flat_chart(m)), tags(&["kaehler", "chern-flat"])))
        }
        "torus-flat" => {
            check_keys(p, &["m", "metric_diag"])?;
            let m = get_usize(p, "m", default_m)?;
            positive_dim(m)?;
            let l = LieGroupModel::new(m, vec![ZERO; m * m * m], lie_metric(p, m)?)?;
            Ok((Factor::Lie(l), tags(&["kaehler", "chern-flat"])))
        }
        "fubini-study" => {
            check_keys(p, &["m"])?;
            let m = get_usize(p, "m", default_m)?;
            positive_dim(m)?;
            Ok((Factor::Chart(fubini_study_chart(m)), tags(&["kaehler"])))
        }
        "hopf-surface" => {
            check_keys(p, &["m"])?;
            let m = get_usize(p, "m", 2)?;
            if m < 2 {
                return Err(Error::InvalidParams("hopf-surface needs m >= 2".into()));
            }
            Ok((Factor::Chart(hopf_chart(m)), tags(&["bismut-parallel-torsion"])))
        }
        "complex-lie-group-2d" => {
            check_keys(p, &["metric_diag"])?;
            let l = LieGroupModel::new(2, structure(2, &[(0, 1, 1, 1.0)]), lie_metric(p, 2)?)?;
            Ok((Factor::Lie(l), tags(&["chern-flat"])))
        }
        "complex-lie-group-heisenberg" => {
            check_keys(p, &["metric_diag"])?;
            let l = LieGroupModel::new(3, structure(3, &[(0, 1, 2, 1.0)]), lie_metric(p, 3)?)?;
            Ok((Factor::Lie(l), tags(&["chern-flat"])))
        }
        _ => Err(Error::UnknownModel { name: name.to_string(), catalog: catalog_names() }),
    }
}

fn positive_dim(m: usize) -> Result<()> {
    if m == 0 || m > 6 {
        return Err(Error::InvalidParams(format!("m = {m} outside 1..=6")));
    }
    Ok(())
}

fn sub_params(p: &Params, key: &str, idx: Option<usize>) -> Result<Params> {
    let v = match (p.get(key), idx) {
        (None, _) => return Ok(Params::new()),
        (Some(v), None) => v.clone(),
        (Some(Value::Array(a)), Some(i)) => a.get(i).cloned().unwrap_or(Value::Object(Params::new())),
        (Some(_), Some(_)) => return Err(Error::InvalidParams(format!("'{key}' must be an array of tables"))),
    };
    match v {
        Value::Object(o) => Ok(o),
        _ => Err(Error::InvalidParams(format!("'{key}' entries must be tables"))),
    }
}

/// Build a catalog model by name; every model is validated on construction.
pub fn catalog(name: &str, params: &Params) -> Result<ManifoldModel> {
    let fd = get_f64(params, "fd_step", DEFAULT_FD_STEP)?;
    let model = match name {
        "product" => {
            check_keys(params, &["factors", "factor_params"])?;
            let names: Vec<String> = match params.get("factors") {
                None => vec!["flat".into(), "fubini-study".into()],
                Some(Value::Array(a)) => a
                    .iter()
                    .map(|v| v.as_str().map(String::from).ok_or_else(|| Error::InvalidParams("factor names must be strings".into())))
                    .collect::<Result<_>>()?,
                Some(_) => return Err(Error::InvalidParams("'factors' must be an array of model names".into())),
            };
            if names.len() < 2 {
                return Err(Error::InvalidParams("a product needs at least two factors".into()));
            }
            let mut factors = Vec::new();
            for (i, n) in names.iter().enumerate() {
                if n == "product" || n == "perturbed" {
                    return Err(Error::InvalidParams(format!("'{n}' cannot be a product factor")));
                }
                let (f, _) = single_factor(n, &sub_params(params, "factor_params", Some(i))?, 1)?;
                factors.push(f);
            }
            ManifoldModel::new(&format!("product({})", names.join(",")), factors, Vec::new())
        }
        "perturbed" => {
            check_keys(params, &["base", "base_params", "potential", "epsilon", "a"])?;
            let base_name = get_str(params, "base", "fubini-study")?;
            let (base, _) = single_factor(base_name, &sub_params(params, "base_params", None)?, 2)?;
            let Factor::Chart(chart) = base else {
                return Err(Error::InvalidParams(format!("perturbed needs a chart base, '{base_name}' is a Lie group")));
            };
            let eps = get_f64(params, "epsilon", 0.1)?;
            let potential = get_str(params, "potential", "quartic")?.to_string();
            let m = chart.m;
            let a: Vec<C64> = match params.get("a") {
                None => vec![c64(1.0, 0.0); m],
                Some(Value::Array(arr)) if arr.len() == m => arr
                    .iter()
                    .map(|x| match x {
                        Value::Array(pair) if pair.len() == 2 => {
                            Ok(c64(pair[0].as_f64().unwrap_or(f64::NAN), pair[1].as_f64().unwrap_or(f64::NAN)))
                        }
                        v => v
                            .as_f64()
                            .map(|r| c64(r, 0.0))
                            .ok_or_else(|| Error::InvalidParams("'a' entries must be numbers or [re, im]".into())),
                    })
                    .collect::<Result<_>>()?,
                Some(_) => return Err(Error::InvalidParams(format!("'a' must have {m} entries"))),
            };
            let ddbar: Arc<dyn Fn(&[C64]) -> CMat + Send + Sync> = match potential.as_str() {
                // Σ |z_k|^4
                "quartic" => Arc::new(move |z: &[C64]| {
                    CMat::from_fn(z.len(), z.len(), |i, j| if i == j { c64(4.0 * z[i].norm_sqr(), 0.0) } else { ZERO })
                }),
                // |z|² Re(a·z)
                "cubic" => Arc::new(move |z: &[C64]| {
                    let az: C64 = a.iter().zip(z).map(|(x, y)| x * y).sum();
                    CMat::from_fn(z.len(), z.len(), |i, j| {
                        let d = if i == j { c64(az.re, 0.0) } else { ZERO };
                        d + (a[i] * z[j] + a[j].conj() * z[i].conj()) * 0.5
                    })
                }),
                other => return Err(Error::InvalidParams(format!("unknown potential '{other}' (quartic, cubic)"))),
            };
            let base_fn = chart.metric_fn.clone();
            let metric_fn: super::MetricFn =
                if eps == 0.0 { base_fn } else { Arc::new(move |z: &[C64]| base_fn(z) + ddbar(z) * c64(eps, 0.0)) };
            let chart = ChartModel { metric_fn, ..chart };
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5EED);
            validate_metric(&(chart.metric_fn)(&chart.base_point))?;
            for _ in 0..50 {
                let z = (chart.sampler)(&mut rng);
                validate_metric(&(chart.metric_fn)(&z))?;
            }
            ManifoldModel::new("perturbed", vec![Factor::Chart(chart)], Vec::new())
        }
        _ => {
            let default_m = match name {
                "flat" | "torus-flat" | "fubini-study" | "hopf-surface" => 2,
                _ => 0,
            };
            let (f, expected) = single_factor(name, params, default_m)?;
            ManifoldModel::new(name, vec![f], expected)
        }
    };
    model.with_fd_step(fd)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name_lists_catalog() {
        let err = catalog("klein-bottle", &Params::new()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("fubini-study") && msg.contains("klein-bottle"));
    }

    #[test]
    fn invalid_metric_rejected() {
        let mut p = Params::new();
        p.insert("metric_diag".into(), serde_json::json!([1.0, -2.0]));
        assert!(matches!(catalog("complex-lie-group-2d", &p), Err(Error::InvalidParams(_))));
        let mut p = Params::new();
        p.insert("epsilon".into(), serde_json::json!(-50.0));
        assert!(catalog("perturbed", &p).is_err());
    }

    #[test]
    fn every_name_builds() {
        for n in catalog_names() {
            let m = catalog(&n, &Params::new()).unwrap();
            assert!(m.m >= 1, "{n}");
        }
    }

    #[test]
    fn lie_models_satisfy_jacobi() {
        for n in ["complex-lie-group-2d", "complex-lie-group-heisenberg", "torus-flat"] {
            let model = catalog(n, &Params::new()).unwrap();
            let Factor::Lie(l) = &model.factors[0] else { panic!() };
            assert_eq!(l.jacobi_residual(), 0.0);
        }
    }

    #[test]
    fn unperturbed_matches_base() {
        let mut p = Params::new();
        p.insert("epsilon".into(), serde_json::json!(0.0));
        let pert = catalog("perturbed", &p).unwrap();
        let base = catalog("fubini-study", &Params::new()).unwrap();
        let z = [c64(0.2, -0.1), c64(0.05, 0.3)];
        assert_eq!(pert.metric(&z), base.metric(&z));
    }
}
