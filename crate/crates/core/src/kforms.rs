//! Pointwise positivity machinery for algebraic Kähler curvature tensors:
//! eigenvalue sums, extremal frames for the holomorphic sectional curvature,
//! second-variation inequalities, Berger averaging and the unitary normal
//! form of `(2,0)`-forms.

use crate::error::{Error, Result};
use crate::fiber::{beta_tilde, FiberForm, HermitianFiber, KaehlerCurvature, Provenance};
use crate::linalg::{complex_gaussian, hermitian_eigen, hermitian_power, random_unitary, CMat, CVec, C64, ZERO};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

pub const STARTS: usize = 50;
const MAX_ITERS: usize = 20_000;
const FIRST_ORDER_TOL: f64 = 1e-6;
const STATIONARY_TOL: f64 = 1e-4;
const SCREEN_FACTOR: usize = 40;
const RECHECKS: usize = 4;
const RECHECK_RADIUS: f64 = 0.05;

/// Sum of the `p` smallest eigenvalues of a Hermitian matrix.
pub fn eigen_sum_min(ric: &CMat, p: usize) -> Result<f64> {
    let m = ric.nrows();
    if p == 0 || p > m {
        return Err(Error::InvalidParams(format!("need 1 <= p <= {m}, got {p}")));
    }
    let (vals, _) = hermitian_eigen(ric);
    Ok(vals[..p].iter().sum())
}

/// A curvature tensor rewritten in the unitary frame `U = conj(h^{-1/2})`, with
/// the maps between coordinate and unitary components.
struct UnitaryView {
    r: KaehlerCurvature,
    u: CMat,
    u_inv: CMat,
}

impl UnitaryView {
    fn new(r: &KaehlerCurvature) -> Self {
        let u = hermitian_power(&r.metric, -0.5).map(|z| z.conj());
        let u_inv = hermitian_power(&r.metric, 0.5).map(|z| z.conj());
        Self { r: r.in_unitary_frame(), u, u_inv }
    }

    fn ricci(&self) -> CMat {
        self.r.ricci()
    }
}

/// `w_j = Σ R_{ij̄kl̄} x_i x_k x̄_l`, so that `H(x) = Σ w_j x̄_j` and the
/// real gradient of the quartic is `4w`.
fn quartic_w(r: &KaehlerCurvature, x: &CVec) -> CVec {
    let m = r.m;
    let mut w = CVec::zeros(m);
    for i in 0..m {
        for k in 0..m {
            let xik = x[i] * x[k];
            for j in 0..m {
                let mut acc = ZERO;
                for l in 0..m {
                    acc += r.get(i, j, k, l) * x[l].conj();
                }
                w[j] += acc * xik;
            }
        }
    }
    w
}

fn quartic(r: &KaehlerCurvature, x: &CVec) -> (f64, CVec) {
    let w = quartic_w(r, x);
    let v: C64 = w.iter().zip(x.iter()).map(|(a, b)| a * b.conj()).sum();
    (v.re, w * C64::new(4.0, 0.0))
}

fn hermitian_quadratic(a: &CMat, x: &CVec) -> (f64, CVec) {
    let ax = a.transpose() * x;
    let v: C64 = ax.iter().zip(x.iter()).map(|(p, q)| p * q.conj()).sum();
    (v.re, ax * C64::new(2.0, 0.0))
}

#[derive(Debug, Clone, Serialize)]
pub struct SphereMin {
    #[serde(skip)]
    pub point: CVec,
    pub value: f64,
    pub gradient_residual: f64,
    pub iterations: usize,
}

fn normalize(v: CVec) -> CVec {
    let n = v.norm();
    v / C64::new(n, 0.0)
}

/// Projected gradient descent on the unit sphere of `span(basis)` (orthonormal
/// columns), with Barzilai–Borwein steps and a non-monotone Armijo safeguard.
pub fn descend<F>(f: &F, basis: &CMat, x0: &CVec) -> SphereMin
where
    F: Fn(&CVec) -> (f64, CVec) + ?Sized,
{
    let proj = |v: &CVec| basis * (basis.adjoint() * v);
    let tangent = |x: &CVec, g: &CVec| -> CVec {
        let pg = proj(g);
        let radial = (x.adjoint() * &pg)[0].re;
        pg - x * C64::new(radial, 0.0)
    };
    let re_dot = |a: &CVec, b: &CVec| -> f64 { a.iter().zip(b.iter()).map(|(p, q)| (p.conj() * q).re).sum() };
    let mut x = normalize(proj(x0));
    let (mut val, g) = f(&x);
    let mut rg = tangent(&x, &g);
    let stop = 1e-11 * g.norm().max(1.0);
    let mut step = 0.1 / (g.norm() + 1e-12);
    let mut history = vec![val];
    let mut iterations = 0;
    while iterations < MAX_ITERS && rg.norm() >= stop {
        iterations += 1;
        let gn2 = rg.norm_squared();
        // keep each move within a fixed arc so that BB steps cannot jump across the sphere
        step = step.min(0.3 / gn2.sqrt());
        let reference = history.iter().rev().take(10).cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut trial = step;
        let accepted = loop {
            // re-project: roundoff along the excluded directions is otherwise amplified by descent
            let cand = normalize(proj(&(&x - &rg * C64::new(trial, 0.0))));
            let (cv, cg) = f(&cand);
            if cv <= reference - 1e-4 * trial * gn2 || (cv <= val && trial < 1e-14) {
                break Some((cand, cv, cg));
            }
            trial *= 0.5;
            if trial < 1e-18 {
                break None;
            }
        };
        let Some((xn, vn, gn)) = accepted else { break };
        let rgn = tangent(&xn, &gn);
        let s_vec = &xn - &x;
        let y_vec = &rgn - &rg;
        let sy = re_dot(&s_vec, &y_vec);
        step = if sy > 0.0 { (s_vec.norm_squared() / sy).clamp(1e-10, 1e10) } else { trial * 2.0 };
        x = xn;
        val = vn;
        rg = rgn;
        history.push(val);
    }
    SphereMin { gradient_residual: rg.norm(), point: x, value: val, iterations }
}

/// Multi-start minimization; fails unless the best value is certified to first
/// order and reached by at least two starts.
pub fn multistart<F, R>(f: &F, basis: &CMat, starts: usize, scale: f64, rng: &mut R) -> Result<SphereMin>
where
    F: Fn(&CVec) -> (f64, CVec) + Sync,
    R: Rng + ?Sized,
{
    let m = basis.nrows();
    let d = basis.ncols();
    let lift = |c: CVec| -> CVec { basis * c };
    // half the starts are the lowest points of a random screen, so narrow basins get several visits
    let screened = starts / 2;
    let mut screen: Vec<(f64, CVec)> = (0..SCREEN_FACTOR * screened)
        .map(|_| {
            let x = normalize(lift(CVec::from_fn(d, |_, _| complex_gaussian(rng))));
            (f(&x).0, x)
        })
        .collect();
    screen.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut inits: Vec<CVec> = screen.into_iter().take(screened).map(|(_, x)| x).collect();
    inits.extend((screened..starts).map(|_| CVec::from_fn(m, |_, _| complex_gaussian(rng))));
    let runs: Vec<SphereMin> = inits.par_iter().map(|x0| descend(f, basis, x0)).collect();
    let tol = FIRST_ORDER_TOL * scale.max(1.0);
    // flat minima only yield a slowly decaying gradient, so stationarity is
    // screened loosely and the value agreement across restarts decides
    let converged: Vec<&SphereMin> = runs.iter().filter(|r| r.gradient_residual <= STATIONARY_TOL * scale.max(1.0)).collect();
    let Some(best) = converged.iter().min_by(|a, b| a.value.total_cmp(&b.value)).map(|r| (*r).clone()) else {
        let closest = runs.iter().map(|r| r.gradient_residual).fold(f64::INFINITY, f64::min);
        return Err(Error::NotConverged(format!("no start reached a stationary point (smallest gradient residual {closest:.3e})")));
    };
    let mut agreeing = converged.iter().filter(|r| (r.value - best.value).abs() <= tol).count();
    if starts > 1 && agreeing < 2 {
        // a narrow basin may be hit by one start only; confirm it from nearby restarts
        let nearby: Vec<CVec> =
            (0..RECHECKS).map(|_| &best.point + CVec::from_fn(m, |_, _| complex_gaussian(rng)) * C64::new(RECHECK_RADIUS, 0.0)).collect();
        agreeing += nearby
            .par_iter()
            .map(|x0| descend(f, basis, x0))
            .collect::<Vec<_>>()
            .iter()
            .filter(|r| r.gradient_residual <= STATIONARY_TOL * scale.max(1.0) && (r.value - best.value).abs() <= tol)
            .count();
    }
    if starts > 1 && agreeing < 2 {
        let spread = converged.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max) - best.value;
        return Err(Error::NotConverged(format!("best value {:.9e} reached by a single start (value spread {spread:.3e})", best.value)));
    }
    Ok(best)
}

/// Orthonormal basis of the orthogonal complement of the columns of `frame`.
pub fn complement(frame: &CMat) -> CMat {
    let m = frame.nrows();
    let d = frame.ncols();
    let p = CMat::identity(m, m) - frame * frame.adjoint();
    let (_, vecs) = hermitian_eigen(&p);
    vecs.columns(d, m - d).into_owned()
}

/// Random symmetrized tensor plus `c·R_FS`, with `c` chosen so that the
/// minimum holomorphic sectional curvature is `0.1 + margin`.
pub fn fs_shifted<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Result<KaehlerCurvature> {
    let base = KaehlerCurvature::random_symmetrized(m, rng);
    let fs = KaehlerCurvature::fubini_study(&CMat::identity(m, m));
    let id = CMat::identity(m, m);
    let min = multistart(&|x: &CVec| quartic(&base, x), &id, STARTS, base.max_abs(), rng)?.value;
    let c = ((0.15 - min) / 2.0).max(0.0);
    let mut out = base.add(&fs.scale(c))?;
    out.provenance = Provenance::FsShifted;
    Ok(out)
}

/// Minimum of `H` over the unit sphere of the span of `basis` (unitary components).
fn h_min<R: Rng + ?Sized>(r: &KaehlerCurvature, basis: &CMat, rng: &mut R) -> Result<SphereMin> {
    multistart(&|x: &CVec| quartic(r, x), basis, STARTS, r.max_abs(), rng)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremalFrame {
    /// Columns are the frame vectors in coordinates.
    #[serde(skip)]
    pub frame: CMat,
    pub kappa: f64,
    /// `H(e_i)`, nondecreasing by construction.
    pub h_values: Vec<f64>,
    /// `Ric(e_i, ē_i)`
    pub ricci_diagonal: Vec<f64>,
    /// `κ(m+1)/2`
    pub bound: f64,
    /// `min_i Ric(e_i, ē_i) − κ(m+1)/2`
    pub slack: f64,
    /// `max |⟨e_a, e_b⟩ − δ_ab|`
    pub unitarity: f64,
}

/// Greedy frame: `e_1` minimizes `H`, each later `e_i` minimizes `H` on the
/// complement of the previous ones.
pub fn greedy_extremal_frame<R: Rng + ?Sized>(r: &KaehlerCurvature, rng: &mut R) -> Result<ExtremalFrame> {
    let m = r.m;
    if m > 4 {
        return Err(Error::InvalidParams(format!("extremal frame search is limited to m <= 4, got {m}")));
    }
    let view = UnitaryView::new(r);
    let ric = view.ricci();
    let mut cols: Vec<CVec> = Vec::with_capacity(m);
    let mut h_values = Vec::with_capacity(m);
    for _ in 0..m {
        let basis = if cols.is_empty() { CMat::identity(m, m) } else { complement(&CMat::from_columns(&cols)) };
        let best = h_min(&view.r, &basis, rng)?;
        h_values.push(best.value);
        cols.push(best.point);
    }
    let y = CMat::from_columns(&cols);
    let kappa = h_values[0];
    let ricci_diagonal: Vec<f64> = cols.iter().map(|e| hermitian_quadratic(&ric, e).0).collect();
    let bound = kappa * (m as f64 + 1.0) / 2.0;
    let slack = ricci_diagonal.iter().cloned().fold(f64::INFINITY, f64::min) - bound;
    let unitarity = (y.adjoint() * &y - CMat::identity(m, m)).iter().fold(0.0f64, |a, z| a.max(z.norm()));
    Ok(ExtremalFrame { frame: &view.u * y, kappa, h_values, ricci_diagonal, bound, slack, unitarity })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariationMode {
    /// `subframe = e_1`, a minimizer of `H`.
    HMin,
    /// `subframe` spans a `2k`-plane minimizing the partial scalar curvature at 0.
    S2kMin,
}

#[derive(Debug, Clone, Serialize)]
pub struct SecondVariation {
    pub mode: VariationMode,
    /// First-order condition residual at the subframe.
    pub first_order: f64,
    /// `H(e_1)` or `S_{2k}` of the subframe.
    pub value: f64,
    /// Minimum of the second-variation quantity over the unit complement.
    pub inner_min: f64,
    /// `κ/2` or `0`.
    pub target: f64,
    pub slack: f64,
}

/// Second-variation inequality at a minimizing subframe given in coordinates.
pub fn second_variation_check(r: &KaehlerCurvature, subframe: &CMat, mode: VariationMode) -> Result<SecondVariation> {
    let m = r.m;
    let d = subframe.ncols();
    let view = UnitaryView::new(r);
    let y = &view.u_inv * subframe;
    let gram = y.adjoint() * &y;
    let gram_err = (&gram - CMat::identity(d, d)).iter().fold(0.0f64, |a, z| a.max(z.norm()));
    if gram_err > 1e-8 {
        return Err(Error::InvalidParams(format!("subframe is not unitary (residual {gram_err:.3e})")));
    }
    match mode {
        VariationMode::HMin if d != 1 => return Err(Error::InvalidParams("H-min mode takes a single vector".into())),
        VariationMode::S2kMin if d == 0 || d % 2 == 1 || d >= m => {
            return Err(Error::InvalidParams(format!("S2k-min mode needs an even proper subframe, got {d} of {m}")))
        }
        _ => {}
    }
    let rt = &view.r;
    let cols: Vec<CVec> = (0..d).map(|a| y.column(a).into_owned()).collect();
    // Σ_a R(e_a, ē_a, ·, ·) as a Hermitian matrix acting by x ↦ x^* A x
    let mut a_mat = CMat::zeros(m, m);
    for e in &cols {
        for k in 0..m {
            for l in 0..m {
                let mut acc = ZERO;
                for i in 0..m {
                    for j in 0..m {
                        acc += rt.get(i, j, k, l) * e[i] * e[j].conj();
                    }
                }
                a_mat[(l, k)] += acc;
            }
        }
    }
    let q = complement(&y);
    let restricted = q.adjoint() * &a_mat * &q;
    let (vals, _) = hermitian_eigen(&restricted);
    let inner_min = vals[0];

    // first-order: R(X, ē_a, Σ_b e_b ē_b) = 0 for X in the complement
    let mut first_order: f64 = 0.0;
    for e in &cols {
        for c in 0..q.ncols() {
            let x = q.column(c).into_owned();
            let mut acc = ZERO;
            for f in &cols {
                acc += rt.eval(x.as_slice(), e.as_slice(), f.as_slice(), f.as_slice());
            }
            first_order = first_order.max(acc.norm());
        }
    }
    let value: f64 = cols
        .iter()
        .flat_map(|e| cols.iter().map(move |f| (e, f)))
        .map(|(e, f)| rt.eval(e.as_slice(), e.as_slice(), f.as_slice(), f.as_slice()).re)
        .sum();
    let scale = rt.max_abs().max(1.0);
    if first_order > FIRST_ORDER_TOL * scale {
        return Err(Error::UncertifiedMinimizer(first_order));
    }
    let target = match mode {
        VariationMode::HMin => value / 2.0,
        VariationMode::S2kMin => {
            if value.abs() > FIRST_ORDER_TOL * scale {
                return Err(Error::HypothesisUnverified(format!("partial scalar curvature of the subframe is {value:.3e}, not 0")));
            }
            0.0
        }
    };
    Ok(SecondVariation { mode, first_order, value, inner_min, target, slack: inner_min - target })
}

#[derive(Debug, Clone, Serialize)]
pub struct BergerReport {
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    /// Minimum of `C_{α,β}` on the unit sphere (mesh plus refinement).
    pub mixed_min: f64,
    /// Minimum over random unitary `2k`-subframes of the averaged quantity.
    pub average_min: f64,
    pub subframes: usize,
}

pub const MESH_SAMPLES: usize = 10_000;
pub const BERGER_SUBFRAMES: usize = 100;

/// `min` over random unitary `2k`-subframes of
/// `α/(2k) Σ_{i≤2k} Ric_{iī} + β/(k(2k+1)) Σ_{i,j≤2k} R_{iījj̄}`, after
/// checking `C_{α,β} ≥ 0`, `α > 0` and `3α + 2β > 0`.
pub fn berger_average_check<R: Rng + ?Sized>(r: &KaehlerCurvature, alpha: f64, beta: f64, k: usize, rng: &mut R) -> Result<BergerReport> {
    let m = r.m;
    if k == 0 || 2 * k > m {
        return Err(Error::InvalidParams(format!("need 1 <= 2k <= m, got k = {k}, m = {m}")));
    }
    if !(alpha > 0.0 && 3.0 * alpha + 2.0 * beta > 0.0) {
        return Err(Error::HypothesisUnverified(format!("coefficients α = {alpha}, β = {beta} outside α > 0, 3α + 2β > 0")));
    }
    let view = UnitaryView::new(r);
    let ric = view.ricci();
    let rt = &view.r;
    let mixed = |x: &CVec| -> (f64, CVec) {
        let n2 = x.norm_squared();
        let (q, gq) = hermitian_quadratic(&ric, x);
        let (h, gh) = quartic(rt, x);
        let value = alpha * n2 * q + beta * h;
        let grad = x * C64::new(2.0 * alpha * q, 0.0) + gq * C64::new(alpha * n2, 0.0) + gh * C64::new(beta, 0.0);
        (value, grad)
    };
    let mut mesh: Vec<(f64, CVec)> = (0..MESH_SAMPLES)
        .map(|_| {
            let x = normalize(CVec::from_fn(m, |_, _| complex_gaussian(rng)));
            (mixed(&x).0, x)
        })
        .collect();
    mesh.sort_by(|a, b| a.0.total_cmp(&b.0));
    let id = CMat::identity(m, m);
    let mixed_min = mesh[..5].par_iter().map(|(_, x)| descend(&mixed, &id, x).value).reduce(|| f64::INFINITY, f64::min);
    let scale = rt.max_abs().max(1.0);
    if mixed_min < -1e-9 * scale {
        return Err(Error::HypothesisUnverified(format!("mixed curvature reaches {mixed_min:.3e} < 0")));
    }
    let kk = k as f64;
    let mut average_min = f64::INFINITY;
    for _ in 0..BERGER_SUBFRAMES {
        let u = random_unitary(m, rng);
        let cols: Vec<CVec> = (0..2 * k).map(|a| u.column(a).into_owned()).collect();
        let ric_sum: f64 = cols.iter().map(|e| hermitian_quadratic(&ric, e).0).sum();
        let mut rr = 0.0;
        for e in &cols {
            for f in &cols {
                rr += rt.eval(e.as_slice(), e.as_slice(), f.as_slice(), f.as_slice()).re;
            }
        }
        average_min = average_min.min(alpha / (2.0 * kk) * ric_sum + beta / (kk * (2.0 * kk + 1.0)) * rr);
    }
    Ok(BergerReport { alpha, beta, k, mixed_min, average_min, subframes: BERGER_SUBFRAMES })
}

/// Antisymmetric coefficient matrix `A` of a `(2,0)`-form in the fiber's
/// unitary coframe: `φ = Σ_{i<j} A_ij θ^i ∧ θ^j`.
fn two_form_matrix(fiber: &HermitianFiber, phi: &FiberForm) -> Result<CMat> {
    if (phi.p, phi.q) != (2, 0) {
        return Err(Error::DimensionMismatch(format!("expected a (2,0)-form, got ({},{})", phi.p, phi.q)));
    }
    let m = fiber.m();
    let coeffs = fiber.to_unitary(phi);
    let mut a = CMat::zeros(m, m);
    for (pos, &mask) in fiber.basis().block(2, 0).iter().enumerate() {
        let bits = crate::fiber::exterior::bits_of(mask);
        a[(bits[0], bits[1])] = coeffs[pos];
        a[(bits[1], bits[0])] = -coeffs[pos];
    }
    Ok(a)
}

fn matrix_two_form(fiber: &HermitianFiber, a: &CMat) -> Result<FiberForm> {
    let coeffs: Vec<C64> = fiber
        .basis()
        .block(2, 0)
        .iter()
        .map(|&mask| {
            let bits = crate::fiber::exterior::bits_of(mask);
            a[(bits[0], bits[1])]
        })
        .collect();
    fiber.from_unitary(2, 0, &coeffs)
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalForm2 {
    /// New unitary coframe `θ' = Uᵀ θ` in terms of the fiber's unitary coframe.
    #[serde(skip)]
    pub u: CMat,
    /// Columns are the dual frame vectors in coordinates.
    #[serde(skip)]
    pub frame: CMat,
    /// `f_1 ≥ f_2 ≥ … > 0`
    pub pairs: Vec<f64>,
    pub rank: usize,
    /// Largest `k` with `∧^k φ ≠ 0` by explicit wedge products.
    pub wedge_rank: usize,
    /// `max |A − U Σ Uᵀ|`
    pub reconstruction: f64,
    /// Number of nonzero coefficients of `∧^k φ` in the new coframe.
    pub simple_terms: usize,
}

/// Unitary congruence normal form `A = U Σ Uᵀ`, `Σ` block diagonal with blocks
/// `[[0, f_i], [−f_i, 0]]`, by deflating the top singular pair.
pub fn normal_form_2form(fiber: &HermitianFiber, phi: &FiberForm) -> Result<NormalForm2> {
    let m = fiber.m();
    let a = two_form_matrix(fiber, phi)?;
    let scale = a.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let tol = 1e-12 * scale.max(1.0);
    let mut rest = a.clone();
    let mut cols: Vec<CVec> = Vec::new();
    let mut pairs = Vec::new();
    while 2 * pairs.len() + 1 < m {
        let svd = rest.clone().svd(true, true);
        let (idx, sigma) = svd.singular_values.iter().enumerate().fold((0, 0.0), |b, (i, &s)| if s > b.1 { (i, s) } else { b });
        if sigma <= tol {
            break;
        }
        let u1 = svd.u.as_ref().expect("requested").column(idx).into_owned();
        // A ū₁ = −σ v̄, so u₂ = −A ū₁/σ pairs with u₁
        let u2 = -(&rest * u1.map(|z| z.conj())) / C64::new(sigma, 0.0);
        let block = (&u1 * u2.transpose() - &u2 * u1.transpose()) * C64::new(sigma, 0.0);
        rest -= block;
        cols.push(u1);
        cols.push(u2);
        pairs.push(sigma);
    }
    let rank = pairs.len();
    let u = if cols.is_empty() {
        CMat::identity(m, m)
    } else if cols.len() == m {
        CMat::from_columns(&cols)
    } else {
        let tail = complement(&CMat::from_columns(&cols));
        let mut all = cols.clone();
        all.extend(tail.column_iter().map(|c| c.into_owned()));
        CMat::from_columns(&all)
    };
    let mut sigma = CMat::zeros(m, m);
    for (i, &f) in pairs.iter().enumerate() {
        sigma[(2 * i, 2 * i + 1)] = C64::new(f, 0.0);
        sigma[(2 * i + 1, 2 * i)] = C64::new(-f, 0.0);
    }
    let reconstruction = (&a - &u * &sigma * u.transpose()).iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let wedge_rank = wedge_rank(fiber, phi)?;

    // φ rewritten in the coframe θ' = Uᵀθ, then its k-th power
    let a_new = u.adjoint() * &a * u.map(|z| z.conj());
    let id_fiber = HermitianFiber::identity(m)?;
    let phi_new = matrix_two_form(&id_fiber, &a_new)?;
    let simple_terms = if rank == 0 {
        0
    } else {
        let s = wedge_power(&id_fiber, &phi_new, rank)?;
        let smax = s.max_abs();
        s.coeffs.iter().filter(|z| z.norm() > 1e-10 * smax).count()
    };
    // θ'(e'_b) = δ: e'_b = Σ_k conj(U[k,b]) e_k with e_k the fiber's unitary frame
    let frame = fiber.unitary_frame() * u.map(|z| z.conj());
    Ok(NormalForm2 { u, frame, pairs, rank, wedge_rank, reconstruction, simple_terms })
}

pub fn wedge_power(fiber: &HermitianFiber, phi: &FiberForm, k: usize) -> Result<FiberForm> {
    let basis = fiber.basis();
    let mut cur = phi.clone();
    for _ in 1..k {
        cur = cur.wedge(phi, basis)?;
    }
    Ok(cur)
}

fn wedge_rank(fiber: &HermitianFiber, phi: &FiberForm) -> Result<usize> {
    let m = fiber.m();
    let basis = fiber.basis();
    let scale = phi.max_abs();
    if scale == 0.0 {
        return Ok(0);
    }
    let mut cur = phi.clone();
    let mut k = 1;
    while 2 * (k + 1) <= m {
        let next = cur.wedge(phi, basis)?;
        if next.max_abs() <= 1e-10 * scale.powi(k as i32 + 1) {
            break;
        }
        cur = next;
        k += 1;
    }
    Ok(k)
}

#[derive(Debug, Clone, Serialize)]
pub struct BochnerChain {
    pub k: usize,
    pub s_norm_sq: f64,
    /// `|s|² Σ_{i≤2k} Ric_{iī}`
    pub ricci_term: f64,
    /// `(|s|⁴/2k) Σ_{i,j≤2k} R_{iījj̄}`
    pub curvature_term: f64,
    /// `max |β̃ − (|s|²/2k) Σ_{i≤2k} dz^i∧dz̄^i|` as `(1,1)` coefficient matrices;
    /// `None` when `2k = m`, outside the range of the β̃ construction.
    pub beta_residual: Option<f64>,
}

/// Curvature terms of the Bochner chain for `s = ∧^k φ` in the normal frame of `φ`.
pub fn bochner_chain_pointwise(r: &KaehlerCurvature, phi: &FiberForm) -> Result<BochnerChain> {
    let m = r.m;
    let fiber = HermitianFiber::new(r.metric.clone())?;
    let nf = normal_form_2form(&fiber, phi)?;
    let k = nf.rank;
    if k == 0 {
        return Err(Error::ZeroForm);
    }
    let rn = r.in_frame(&nf.frame);
    let ric = rn.ricci();
    let a = two_form_matrix(&fiber, phi)?;
    let a_new = nf.u.adjoint() * &a * nf.u.map(|z| z.conj());
    let id_fiber = HermitianFiber::identity(m)?;
    let s = wedge_power(&id_fiber, &matrix_two_form(&id_fiber, &a_new)?, k)?;
    let s2 = id_fiber.norm_sq(&s);
    let ricci_term = s2 * (0..2 * k).map(|i| ric[(i, i)].re).sum::<f64>();
    let mut rr = 0.0;
    for i in 0..2 * k {
        for j in 0..2 * k {
            rr += rn.get(i, i, j, j).re;
        }
    }
    let curvature_term = s2 * s2 / (2.0 * k as f64) * rr;
    let beta_residual = if 2 * k < m {
        let b = id_fiber.one_one_matrix(&beta_tilde(&id_fiber, &s)?)?;
        let expect = CMat::from_fn(m, m, |i, j| if i == j && i < 2 * k { C64::new(s2 / (2.0 * k as f64), 0.0) } else { ZERO });
        Some((b - expect).iter().fold(0.0f64, |acc, z| acc.max(z.norm())))
    } else {
        None
    };
    Ok(BochnerChain { k, s_norm_sq: s2, ricci_term, curvature_term, beta_residual })
}

/// Antisymmetric `(2,0)`-form from a coefficient matrix in the coordinate coframe.
pub fn two_form_from_matrix(fiber: &HermitianFiber, a: &CMat) -> Result<FiberForm> {
    let coeffs: Vec<C64> = fiber
        .basis()
        .block(2, 0)
        .iter()
        .map(|&mask| {
            let bits = crate::fiber::exterior::bits_of(mask);
            (a[(bits[0], bits[1])] - a[(bits[1], bits[0])]) * 0.5
        })
        .collect();
    FiberForm::from_coeffs(fiber.basis(), 2, 0, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, random_complex_matrix, random_hermitian};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fs(m: usize) -> KaehlerCurvature {
        KaehlerCurvature::fubini_study(&CMat::identity(m, m))
    }

    #[test]
    fn eigen_sums() {
        let ric = CMat::from_diagonal(&CVec::from_vec(vec![c64(1.0, 0.0), c64(-1.0, 0.0), c64(3.0, 0.0)]));
        assert!(eigen_sum_min(&ric, 2).unwrap().abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_hermitian(4, &mut rng);
        assert!((eigen_sum_min(&h, 4).unwrap() - h.trace().re).abs() < 1e-12);
        assert!(eigen_sum_min(&h, 5).is_err());
    }

    #[test]
    fn fubini_study_saturates_the_frame_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = greedy_extremal_frame(&fs(2), &mut rng).unwrap();
        assert!((f.kappa - 2.0).abs() < 1e-12);
        assert!(f.slack.abs() < 1e-9, "{f:?}");
        assert!(f.unitarity < 1e-10);
    }

    #[test]
    fn zero_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z = KaehlerCurvature::zero(3);
        let f = greedy_extremal_frame(&z, &mut rng).unwrap();
        assert_eq!(f.kappa, 0.0);
        assert_eq!(f.slack, 0.0);
        let sv = second_variation_check(&z, &f.frame.columns(0, 1).into_owned(), VariationMode::HMin).unwrap();
        assert_eq!(sv.inner_min, 0.0);
        let b = berger_average_check(&z, 1.0, 0.0, 1, &mut rng).unwrap();
        assert_eq!(b.average_min, 0.0);
    }

    #[test]
    fn shifted_tensor_frame() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = fs_shifted(3, &mut rng).unwrap();
        let f = greedy_extremal_frame(&r, &mut rng).unwrap();
        assert!(f.kappa >= 0.1, "{}", f.kappa);
        assert!(f.slack > -1e-6);
        assert!(f.h_values.windows(2).all(|w| w[1] >= w[0] - 1e-9));
        let sv = second_variation_check(&r, &f.frame.columns(0, 1).into_owned(), VariationMode::HMin).unwrap();
        assert!(sv.slack > -1e-6, "{sv:?}");
    }

    #[test]
    fn fubini_study_second_variation_and_berger() {
        let e1 = CMat::from_column_slice(2, 1, &[c64(1.0, 0.0), ZERO]);
        let sv = second_variation_check(&fs(2), &e1, VariationMode::HMin).unwrap();
        assert!((sv.inner_min - 1.0).abs() < 1e-12 && sv.slack.abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b = berger_average_check(&fs(2), 1.0, 0.0, 1, &mut rng).unwrap();
        assert!((b.average_min - 3.0).abs() < 1e-10);
        // m = 3, α = 1, β = −1: (4 + 4)/2 − (2 + 2 + 1 + 1)/3 = 2
        let b = berger_average_check(&fs(3), 1.0, -1.0, 1, &mut rng).unwrap();
        assert!((b.average_min - 2.0).abs() < 1e-10);
        assert!(matches!(berger_average_check(&fs(2), 1.0, -2.0, 1, &mut rng), Err(Error::HypothesisUnverified(_))));
    }

    #[test]
    fn uncertified_subframe_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let r = KaehlerCurvature::random_symmetrized(3, &mut rng);
        let x = CMat::from_column_slice(3, 1, &[c64(0.6, 0.0), c64(0.0, 0.8), ZERO]);
        assert!(matches!(second_variation_check(&r, &x, VariationMode::HMin), Err(Error::UncertifiedMinimizer(_))));
    }

    #[test]
    fn normal_forms() {
        let fiber = HermitianFiber::identity(4).unwrap();
        let mut a = CMat::zeros(4, 4);
        a[(0, 1)] = c64(2.0, 0.0);
        a[(1, 0)] = c64(-2.0, 0.0);
        a[(2, 3)] = c64(1.0, 0.0);
        a[(3, 2)] = c64(-1.0, 0.0);
        let phi = two_form_from_matrix(&fiber, &a).unwrap();
        let nf = normal_form_2form(&fiber, &phi).unwrap();
        assert_eq!(nf.rank, 2);
        assert_eq!(nf.wedge_rank, 2);
        assert!((nf.pairs[0] - 2.0).abs() < 1e-12 && (nf.pairs[1] - 1.0).abs() < 1e-12);
        assert_eq!(nf.simple_terms, 1);
        // ∧²φ = 2·(2·1) dz¹∧dz²∧dz³∧dz⁴
        let s = wedge_power(&fiber, &phi, 2).unwrap();
        assert!((s.coeffs[0].norm() - 4.0).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let fiber5 = HermitianFiber::identity(5).unwrap();
        let phi = two_form_from_matrix(&fiber5, &random_complex_matrix(5, 5, &mut rng)).unwrap();
        let nf = normal_form_2form(&fiber5, &phi).unwrap();
        assert!(nf.reconstruction < 1e-10);
        assert_eq!((nf.rank, nf.wedge_rank, nf.simple_terms), (2, 2, 1));

        let zero = two_form_from_matrix(&fiber, &CMat::zeros(4, 4)).unwrap();
        let nf = normal_form_2form(&fiber, &zero).unwrap();
        assert_eq!((nf.rank, nf.wedge_rank), (0, 0));
        assert!(nf.pairs.is_empty());
    }

    #[test]
    fn bochner_chain_terms() {
        let fiber = HermitianFiber::identity(4).unwrap();
        let mut a = CMat::zeros(4, 4);
        a[(0, 1)] = c64(1.0, 0.0);
        a[(1, 0)] = c64(-1.0, 0.0);
        let phi = two_form_from_matrix(&fiber, &a).unwrap();
        let zero = bochner_chain_pointwise(&KaehlerCurvature::zero(4), &phi).unwrap();
        assert_eq!((zero.ricci_term, zero.curvature_term), (0.0, 0.0));
        assert!(zero.beta_residual.unwrap() < 1e-12);
        let c = bochner_chain_pointwise(&fs(4), &phi).unwrap();
        assert!((c.ricci_term - 10.0).abs() < 1e-12);
        // Σ_{i,j≤2} R_{iījj̄} = 2 + 2 + 1 + 1
        assert!((c.curvature_term - 3.0).abs() < 1e-12);
    }
}
