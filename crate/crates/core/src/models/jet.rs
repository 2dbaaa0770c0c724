use super::ManifoldModel;
use crate::error::{Error, Result};
use crate::linalg::{max_abs_c, CMat, RMat, C64, IM};

/// Metric value and complex partial derivatives at a point, by central differences.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub g: CMat,
    /// `d[i] = ∂_i g`
    pub d: Vec<CMat>,
    /// `dbar[i] = ∂_ī g`
    pub dbar: Vec<CMat>,
    /// `ddbar[i][j] = ∂_i ∂_j̄ g`
    pub ddbar: Vec<Vec<CMat>>,
    /// Conjugate-symmetry defect before symmetrization.
    pub asymmetry: f64,
    /// Set when the defect exceeds `100 h²`.
    pub asymmetry_warning: bool,
}

/// `∂_i = (∂_x - i ∂_y)/2`, `∂_ī = (∂_x + i ∂_y)/2`; Lie directions carry no
/// coordinate dependence and their derivatives vanish.
pub fn metric_jet(model: &ManifoldModel, z: &[C64], order: usize) -> Result<MetricJet> {
    if order > 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    model.check_interior(z, order)?;
    let m = model.m;
    let h = model.fd_step;
    let g = model.metric(z);
    let zero = CMat::zeros(m, m);
    let at = |a: usize, s: f64, b: usize, t: f64| -> CMat {
        let w = model.shifted(z, a, s);
        model.metric(&model.shifted(&w, b, t))
    };
    let dreal = |a: usize| -> CMat {
        if model.is_lie_direction(a) {
            return zero.clone();
        }
        (model.metric(&model.shifted(z, a, h)) - model.metric(&model.shifted(z, a, -h))) / C64::new(2.0 * h, 0.0)
    };

    let mut d = vec![zero.clone(); m];
    let mut dbar = vec![zero.clone(); m];
    let mut ddbar = vec![vec![zero.clone(); m]; m];
    let mut asymmetry: f64 = 0.0;
    if order >= 1 {
        for i in 0..m {
            let dx = dreal(i);
            let dy = dreal(m + i);
            d[i] = (&dx - &dy * IM) * C64::new(0.5, 0.0);
            dbar[i] = (&dx + &dy * IM) * C64::new(0.5, 0.0);
        }
        for i in 0..m {
            // ∂_ī g = (∂_i g)^H
            asymmetry = asymmetry.max(max_abs_c(&(&dbar[i] - d[i].adjoint())));
            let sym = (&d[i] + dbar[i].adjoint()) * C64::new(0.5, 0.0);
            dbar[i] = sym.adjoint();
            d[i] = sym;
        }
    }
    if order >= 2 {
        let second = |a: usize, b: usize| -> CMat {
            if model.is_lie_direction(a) || model.is_lie_direction(b) {
                return zero.clone();
            }
            if a == b {
                (at(a, h, a, 0.0) - &g * C64::new(2.0, 0.0) + at(a, -h, a, 0.0)) / C64::new(h * h, 0.0)
            } else {
                (at(a, h, b, h) - at(a, h, b, -h) - at(a, -h, b, h) + at(a, -h, b, -h)) / C64::new(4.0 * h * h, 0.0)
            }
        };
        for i in 0..m {
            for j in 0..m {
                let xx = second(i, j);
                let yy = second(m + i, m + j);
                let xy = second(i, m + j);
                let yx = second(m + i, j);
                // (∂x_i - i∂y_i)(∂x_j + i∂y_j)/4
                ddbar[i][j] = (xx + yy + (xy - yx) * IM) * C64::new(0.25, 0.0);
            }
        }
        for i in 0..m {
            for j in 0..m {
                asymmetry = asymmetry.max(max_abs_c(&(&ddbar[j][i] - ddbar[i][j].adjoint())));
            }
        }
        for i in 0..m {
            for j in i..m {
                let sym = (&ddbar[i][j] + ddbar[j][i].adjoint()) * C64::new(0.5, 0.0);
                ddbar[j][i] = sym.adjoint();
                ddbar[i][j] = sym;
            }
        }
    }
    Ok(MetricJet { g, d, dbar, ddbar, asymmetry, asymmetry_warning: asymmetry > 100.0 * h * h })
}

/// Real metric `G` in the frame `(E, F)` with its first and second frame
/// derivatives; derivatives along Lie directions vanish identically.
#[derive(Debug, Clone)]
pub struct RealMetricJet {
    pub g: RMat,
    /// `dg[a] = X_a G`
    pub dg: Vec<RMat>,
    /// `ddg[a][b] = X_a X_b G`, empty below order 2.
    pub ddg: Vec<Vec<RMat>>,
}

pub fn real_metric_jet(model: &ManifoldModel, z: &[C64], order: usize) -> Result<RealMetricJet> {
    if order > 2 {
        return Err(Error::UnsupportedOrder(order));
    }
    model.check_interior(z, order)?;
    let n = 2 * model.m;
    let h = model.fd_step;
    let g = model.real_metric(z);
    let zero = RMat::zeros(n, n);
    let at = |a: usize, s: f64, b: usize, t: f64| model.real_metric(&model.shifted(&model.shifted(z, a, s), b, t));
    let dg = if order >= 1 { (0..n).map(|a| model.real_metric_derivative(z, a)).collect() } else { vec![zero.clone(); n] };
    let mut ddg = Vec::new();
    if order >= 2 {
        ddg = vec![vec![zero.clone(); n]; n];
        for a in 0..n {
            for b in a..n {
                if model.is_lie_direction(a) || model.is_lie_direction(b) {
                    continue;
                }
                let v = if a == b {
                    (at(a, h, a, 0.0) - &g * 2.0 + at(a, -h, a, 0.0)) / (h * h)
                } else {
                    (at(a, h, b, h) - at(a, h, b, -h) - at(a, -h, b, h) + at(a, -h, b, -h)) / (4.0 * h * h)
                };
                ddg[b][a] = v.clone();
                ddg[a][b] = v;
            }
        }
    }
    Ok(RealMetricJet { g, dg, ddg })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, ZERO};
    use crate::models::{catalog, Params};

    #[test]
    fn flat_derivatives_vanish() {
        let model = catalog("flat", &Params::new()).unwrap();
        let jet = metric_jet(&model, &[c64(0.1, 0.2), c64(-0.3, 0.0)], 2).unwrap();
        assert!(jet.d.iter().chain(jet.dbar.iter()).all(|x| max_abs_c(x) < 1e-12));
        assert!(jet.ddbar.iter().flatten().all(|x| max_abs_c(x) < 1e-12));
    }

    #[test]
    fn fubini_study_second_derivative() {
        let mut p = Params::new();
        p.insert("m".into(), serde_json::json!(1));
        let model = catalog("fubini-study", &p).unwrap();
        let jet = metric_jet(&model, &[ZERO], 2).unwrap();
        assert!((jet.g[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
        // g = (1+|z|²)^{-2} = 1 - 2|z|² + ...
        assert!((jet.ddbar[0][0][(0, 0)] - c64(-2.0, 0.0)).norm() < 1e-6);
    }

    #[test]
    fn hopf_first_derivative() {
        let model = catalog("hopf-surface", &Params::new()).unwrap();
        let jet = metric_jet(&model, &[c64(1.0, 0.0), ZERO], 1).unwrap();
        assert!((jet.g[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!((jet.d[0][(0, 0)] - c64(-1.0, 0.0)).norm() < 1e-7);
        assert!(!jet.asymmetry_warning);
    }

    #[test]
    fn boundary_and_order_errors() {
        let model = catalog("hopf-surface", &Params::new()).unwrap();
        assert!(matches!(metric_jet(&model, &[c64(0.5, 0.0), ZERO], 1), Err(Error::TooCloseToBoundary { .. })));
        assert!(matches!(metric_jet(&model, &[c64(1.0, 0.0), ZERO], 3), Err(Error::UnsupportedOrder(3))));
    }
}
