//! Induced actions of `U(m)` on `∧^p ℂ^m` and `⊗^p ℂ^m`, torus weight
//! projection on an exact grid, and commutant-based irreducibility certificates.

use crate::error::{Error, Result};
use crate::fiber::exterior::sort_sign;
use crate::linalg::{
    binomial, compound_matrix, null_space_c, random_special_unitary, random_unitary, subsets, CMat, CVec, RankTol, C64, ONE, ZERO,
};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// `∧^p ℂ^m` with basis `e_I`, `I` strictly increasing in lexicographic order.
#[derive(Debug, Clone)]
pub struct WedgeRep {
    pub m: usize,
    pub p: usize,
    pub basis: Vec<Vec<usize>>,
}

impl WedgeRep {
    pub fn new(m: usize, p: usize) -> Result<Self> {
        if m == 0 || p == 0 || p > m || m > 8 {
            return Err(Error::InvalidParams(format!("need 1 <= p <= m <= 8, got p = {p}, m = {m}")));
        }
        Ok(Self { m, p, basis: subsets(m, p) })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, multi: &[usize]) -> Option<usize> {
        self.basis.iter().position(|b| b == multi)
    }

    /// `∧^p g` in the `e_I` basis: entries are `p×p` minors.
    pub fn action(&self, g: &CMat) -> CMat {
        compound_matrix(g, self.p)
    }

    /// Derivative of the action at the identity, `Σ_s e_{j_1} ∧ … ∧ a e_{j_s} ∧ …`.
    pub fn daction(&self, a: &CMat) -> CMat {
        let d = self.dim();
        let mut out = CMat::zeros(d, d);
        for (col, multi) in self.basis.iter().enumerate() {
            for s in 0..self.p {
                for i in 0..self.m {
                    let coef = a[(i, multi[s])];
                    if coef == ZERO {
                        continue;
                    }
                    let mut t = multi.clone();
                    t[s] = i;
                    let sign = sort_sign(&mut t);
                    if t.windows(2).any(|w| w[0] == w[1]) {
                        continue;
                    }
                    let row = self.index_of(&t).expect("sorted subset is a basis index");
                    out[(row, col)] += coef * sign;
                }
            }
        }
        out
    }

    /// `χ_I(z) = Π_{i∈I} z_i`
    pub fn character(&self, multi: &[usize], z: &[C64]) -> C64 {
        multi.iter().fold(ONE, |acc, &i| acc * z[i])
    }
}

/// `⊗^p ℂ^m` with the Kronecker-power action.
#[derive(Debug, Clone)]
pub struct TensorRep {
    pub m: usize,
    pub p: usize,
}

impl TensorRep {
    pub fn action(&self, g: &CMat) -> CMat {
        let mut out = CMat::identity(1, 1);
        for _ in 0..self.p {
            out = out.kronecker(g);
        }
        out
    }
}

/// `(1/N^m) Σ_z χ_I(z)^{-1} ρ(z) v` over the `N`-th roots of unity in each
/// coordinate; exact for exponent differences in `{-1, 0, 1}` once `N ≥ 3`.
pub fn torus_project(rep: &WedgeRep, v: &[C64], multi: &[usize], grid: usize) -> Result<CVec> {
    if grid < 3 {
        return Err(Error::GridTooCoarse(grid));
    }
    if v.len() != rep.dim() || multi.len() != rep.p {
        return Err(Error::DimensionMismatch("vector or multi-index does not match the representation".into()));
    }
    let m = rep.m;
    let total = grid.pow(m as u32);
    let roots: Vec<C64> = (0..grid).map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / grid as f64)).collect();
    let vv = CVec::from_column_slice(v);
    // collected in grid order so the float sum does not depend on scheduling
    let terms: Vec<CVec> = (0..total)
        .into_par_iter()
        .map(|code| {
            let mut c = code;
            let z: Vec<C64> = (0..m)
                .map(|_| {
                    let r = roots[c % grid];
                    c /= grid;
                    r
                })
                .collect();
            let rho = rep.action(&CMat::from_diagonal(&CVec::from_vec(z.clone())));
            (rho * &vv) * rep.character(multi, &z).conj()
        })
        .collect();
    let sum = terms.into_iter().fold(CVec::zeros(rep.dim()), |a, b| a + b);
    Ok(sum / C64::new(total as f64, 0.0))
}

/// Commutant of a set of matrices (group action) as an orthonormal list.
pub fn group_commutant(mats: &[CMat]) -> Vec<CMat> {
    let d = mats.first().map(|a| a.nrows()).unwrap_or(0);
    let id = CMat::identity(d, d);
    let mut stacked = CMat::zeros(mats.len() * d * d, d * d);
    for (s, a) in mats.iter().enumerate() {
        let op = id.kronecker(a) - a.transpose().kronecker(&id);
        stacked.view_mut((s * d * d, 0), (d * d, d * d)).copy_from(&op);
    }
    let ns = null_space_c(&stacked, RankTol { rel: 1e-9, abs: 1e-12 });
    (0..ns.ncols()).map(|c| CMat::from_column_slice(d, d, ns.column(c).as_slice())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupSampler {
    /// Random unitaries, permutation matrices and torus elements.
    Unitary,
    SpecialUnitary,
    Torus,
    /// `U(k) × U(m − k)` block-diagonal unitaries.
    Block {
        k: usize,
    },
}

pub fn permutation_matrix(perm: &[usize]) -> CMat {
    let m = perm.len();
    CMat::from_fn(m, m, |i, j| if perm[j] == i { ONE } else { ZERO })
}

fn random_torus<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CMat {
    CMat::from_diagonal(&CVec::from_fn(m, |_, _| C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))))
}

pub fn sample_group<R: Rng + ?Sized>(sampler: GroupSampler, m: usize, count: usize, rng: &mut R) -> Result<Vec<CMat>> {
    let mut out = Vec::with_capacity(count);
    match sampler {
        GroupSampler::Unitary => {
            // the permutation subgroup is generated by adjacent transpositions
            for s in 0..m.saturating_sub(1) {
                let mut perm: Vec<usize> = (0..m).collect();
                perm.swap(s, s + 1);
                out.push(permutation_matrix(&perm));
            }
            out.push(random_torus(m, rng));
            while out.len() < count {
                out.push(random_unitary(m, rng));
            }
        }
        GroupSampler::SpecialUnitary => {
            for _ in 0..count {
                out.push(random_special_unitary(m, rng));
            }
        }
        GroupSampler::Torus => {
            for _ in 0..count {
                out.push(random_torus(m, rng));
            }
        }
        GroupSampler::Block { k } => {
            if k == 0 || k >= m {
                return Err(Error::InvalidParams(format!("block split {k} must lie in 1..{m}")));
            }
            for _ in 0..count {
                let mut g = CMat::zeros(m, m);
                g.view_mut((0, 0), (k, k)).copy_from(&random_unitary(k, rng));
                g.view_mut((k, k), (m - k, m - k)).copy_from(&random_unitary(m - k, rng));
                out.push(g);
            }
        }
    }
    Ok(out)
}

/// Outcome of the constructive argument: project a vector onto one weight,
/// then spread the weight vector with permutations.
#[derive(Debug, Clone, Serialize)]
pub struct ConstructiveCheck {
    /// `|projection − v_I e_I|` for the chosen weight.
    pub projection_residual: f64,
    /// Basis vectors reached from `e_I` by permutation matrices (up to sign).
    pub reached: usize,
    /// Some permutation sends `e_I` to `−e_{s(I)}`.
    pub sign_observed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IrreducibilityCertificate {
    pub irreducible: bool,
    pub commutant_dim: usize,
    /// Commutant dimension recomputed with twice the samples.
    pub commutant_dim_recheck: usize,
    pub samples: usize,
    pub witness_dim: Option<usize>,
    pub constructive: Option<ConstructiveCheck>,
}

/// Schur test for `g ↦ ∧^p g` over sampled group elements.
pub fn irreducibility_certificate<R: Rng + ?Sized>(
    rep: &WedgeRep,
    sampler: GroupSampler,
    samples: usize,
    rng: &mut R,
) -> Result<IrreducibilityCertificate> {
    let group = sample_group(sampler, rep.m, samples, rng)?;
    let distinct = group.iter().enumerate().any(|(i, a)| group[..i].iter().any(|b| (a - b).norm() > 1e-12));
    if group.len() < 2 || !distinct {
        return Err(Error::DegenerateSampler(format!("{} sample(s), need two distinct elements", group.len())));
    }
    let actions: Vec<CMat> = group.iter().map(|g| rep.action(g)).collect();
    let comm = group_commutant(&actions);
    let mut more = group.clone();
    more.extend(sample_group(sampler, rep.m, samples, rng)?);
    let recheck = group_commutant(&more.iter().map(|g| rep.action(g)).collect::<Vec<_>>()).len();
    let irreducible = comm.len() == 1;
    let witness_dim = if irreducible { None } else { Some(smallest_invariant_block(&comm, rep.dim())) };
    let constructive = if matches!(sampler, GroupSampler::Unitary) { Some(constructive_check(rep, rng)?) } else { None };
    Ok(IrreducibilityCertificate {
        irreducible,
        commutant_dim: comm.len(),
        commutant_dim_recheck: recheck,
        samples: group.len(),
        witness_dim,
        constructive,
    })
}

fn smallest_invariant_block(comm: &[CMat], d: usize) -> usize {
    let mut h = CMat::zeros(d, d);
    for (k, c) in comm.iter().enumerate() {
        let w = 1.0 + 0.37 * k as f64;
        h += (c + c.adjoint()) * C64::new(w, 0.0) + (c - c.adjoint()) * C64::new(0.0, 1.0 / w);
    }
    let (vals, _) = crate::linalg::hermitian_eigen(&h);
    let spread = (vals[d - 1] - vals[0]).max(1e-12);
    let mut best = d;
    let mut run = 1;
    for i in 1..d {
        if vals[i] - vals[i - 1] < 1e-6 * spread {
            run += 1;
        } else {
            best = best.min(run);
            run = 1;
        }
    }
    best.min(run)
}

fn constructive_check<R: Rng + ?Sized>(rep: &WedgeRep, rng: &mut R) -> Result<ConstructiveCheck> {
    let d = rep.dim();
    let v: Vec<C64> = (0..d).map(|_| crate::linalg::complex_gaussian(rng)).collect();
    let best = (0..d).max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm())).expect("nonempty basis");
    let proj = torus_project(rep, &v, &rep.basis[best], 3)?;
    let mut expect = CVec::zeros(d);
    expect[best] = v[best];
    let projection_residual = (proj - expect).norm();

    let mut reached = vec![false; d];
    let mut sign_observed = false;
    for perm in permutations(rep.m) {
        let img = rep.action(&permutation_matrix(&perm)).column(best).into_owned();
        if let Some(j) = (0..d).find(|&j| (img[j].norm() - 1.0).abs() < 1e-12) {
            reached[j] = true;
            if img[j].re < 0.0 {
                sign_observed = true;
            }
        }
    }
    Ok(ConstructiveCheck { projection_residual, reached: reached.iter().filter(|&&b| b).count(), sign_observed })
}

/// All permutations of `0..m` (Heap's algorithm).
pub fn permutations(m: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..m).collect();
    let mut c = vec![0usize; m];
    let mut out = vec![a.clone()];
    let mut i = 0;
    while i < m {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Commutant dimension of `⊗^p ℂ^m` under sampled unitaries (reported, not asserted).
pub fn tensor_commutant_dim<R: Rng + ?Sized>(m: usize, p: usize, samples: usize, rng: &mut R) -> Result<usize> {
    let rep = TensorRep { m, p };
    let group = sample_group(GroupSampler::Unitary, m, samples, rng)?;
    Ok(group_commutant(&group.iter().map(|g| rep.action(g)).collect::<Vec<_>>()).len())
}

pub fn wedge_dim(m: usize, p: usize) -> usize {
    binomial(m, p)
}
