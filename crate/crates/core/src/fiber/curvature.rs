use crate::error::{Error, Result};
use crate::linalg::{complex_gaussian, hermitian_power, max_abs_c, CMat, C64, ZERO};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ModelDerived,
    RandomSymmetrized,
    FsShifted,
    Given,
}

/// Components `R_{ij̄kl̄}` of a curvature tensor with the Kähler symmetries,
/// taken against a reference Hermitian metric.
#[derive(Debug, Clone)]
pub struct KaehlerCurvature {
    pub m: usize,
    pub metric: CMat,
    pub r: Vec<C64>,
    pub provenance: Provenance,
}

impl KaehlerCurvature {
    #[inline]
    pub fn idx(m: usize, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * m + j) * m + k) * m + l
    }

    pub fn new(metric: CMat, r: Vec<C64>, provenance: Provenance) -> Result<Self> {
        let m = metric.nrows();
        if r.len() != m * m * m * m {
            return Err(Error::DimensionMismatch(format!("need {} components, got {}", m.pow(4), r.len())));
        }
        Ok(Self { m, metric, r, provenance })
    }

    pub fn zero(m: usize) -> Self {
        Self { m, metric: CMat::identity(m, m), r: vec![ZERO; m.pow(4)], provenance: Provenance::Given }
    }

    /// `g_{ij̄} g_{kl̄} + g_{il̄} g_{kj̄}`: constant holomorphic sectional curvature 2.
    pub fn fubini_study(metric: &CMat) -> Self {
        let m = metric.nrows();
        let mut r = vec![ZERO; m.pow(4)];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        r[Self::idx(m, i, j, k, l)] = metric[(i, j)] * metric[(k, l)] + metric[(i, l)] * metric[(k, j)];
                    }
                }
            }
        }
        Self { m, metric: metric.clone(), r, provenance: Provenance::Given }
    }

    /// Random tensor projected onto the Kähler symmetries (identity metric).
    pub fn random_symmetrized<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let n = m.pow(4);
        let a: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        let id = |i, j, k, l| Self::idx(m, i, j, k, l);
        let mut b = vec![ZERO; n];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        b[id(i, j, k, l)] = (a[id(i, j, k, l)] + a[id(k, j, i, l)] + a[id(i, l, k, j)] + a[id(k, l, i, j)]) * 0.25;
                    }
                }
            }
        }
        let mut r = vec![ZERO; n];
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        r[id(i, j, k, l)] = (b[id(i, j, k, l)] + b[id(j, i, l, k)].conj()) * 0.5;
                    }
                }
            }
        }
        Self { m, metric: CMat::identity(m, m), r, provenance: Provenance::RandomSymmetrized }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> C64 {
        self.r[Self::idx(self.m, i, j, k, l)]
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { r: self.r.iter().map(|z| z * c).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.m != other.m || max_abs_c(&(&self.metric - &other.metric)) > 1e-12 {
            return Err(Error::DimensionMismatch("curvature tensors on different fibers".into()));
        }
        Ok(Self { r: self.r.iter().zip(&other.r).map(|(a, b)| a + b).collect(), ..self.clone() })
    }

    pub fn max_abs(&self) -> f64 {
        self.r.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Largest violation of the conjugation and Kähler symmetries.
    pub fn symmetry_residual(&self) -> f64 {
        let m = self.m;
        let mut res: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for l in 0..m {
                        let v = self.get(i, j, k, l);
                        res = res
                            .max((v - self.get(j, i, l, k).conj()).norm())
                            .max((v - self.get(k, j, i, l)).norm())
                            .max((v - self.get(i, l, k, j)).norm());
                    }
                }
            }
        }
        res
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let res = self.symmetry_residual();
        if res > tol * self.max_abs().max(1.0) {
            return Err(Error::SymmetryViolation(res));
        }
        Ok(())
    }

    /// `R(x, ȳ, z, w̄)` for (1,0) vectors in coordinates.
    pub fn eval(&self, x: &[C64], y: &[C64], z: &[C64], w: &[C64]) -> C64 {
        let m = self.m;
        let mut acc = ZERO;
        for i in 0..m {
            for j in 0..m {
                let a = x[i] * y[j].conj();
                if a == ZERO {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        acc += self.get(i, j, k, l) * a * z[k] * w[l].conj();
                    }
                }
            }
        }
        acc
    }

    /// Components in the frame `e_a = Σ_i f[i,a] ∂_i`; the metric becomes `fᵀ g f̄`.
    pub fn in_frame(&self, f: &CMat) -> Self {
        let m = self.m;
        let fb = f.map(|z| z.conj());
        // contract one index at a time
        let mut cur = self.r.clone();
        for slot in 0..4 {
            let mut next = vec![ZERO; m.pow(4)];
            let mat = if slot % 2 == 0 { f } else { &fb };
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        for l in 0..m {
                            let mut acc = ZERO;
                            for s in 0..m {
                                let (src, coef) = match slot {
                                    0 => (Self::idx(m, s, j, k, l), mat[(s, i)]),
                                    1 => (Self::idx(m, i, s, k, l), mat[(s, j)]),
                                    2 => (Self::idx(m, i, j, s, l), mat[(s, k)]),
                                    _ => (Self::idx(m, i, j, k, s), mat[(s, l)]),
                                };
                                acc += cur[src] * coef;
                            }
                            next[Self::idx(m, i, j, k, l)] = acc;
                        }
                    }
                }
            }
            cur = next;
        }
        let metric = f.transpose() * &self.metric * &fb;
        Self { m, metric, r: cur, provenance: self.provenance }
    }

    /// Components in the unitary frame `conj(g^{-1/2})` of the reference metric.
    pub fn in_unitary_frame(&self) -> Self {
        let u = hermitian_power(&self.metric, -0.5).map(|z| z.conj());
        let mut out = self.in_frame(&u);
        out.metric = CMat::identity(self.m, self.m);
        out
    }

    /// `Ric_{ij̄} = Σ R_{ij̄kl̄} g^{l̄k}`.
    pub fn ricci(&self) -> CMat {
        let m = self.m;
        let ginv = self.metric.clone().try_inverse().expect("metric invertible");
        CMat::from_fn(m, m, |i, j| {
            let mut acc = ZERO;
            for k in 0..m {
                for l in 0..m {
                    acc += self.get(i, j, k, l) * ginv[(l, k)];
                }
            }
            acc
        })
    }

    /// `R(X, X̄, X, X̄) / |X|^4`.
    pub fn holomorphic_sectional(&self, x: &[C64]) -> f64 {
        let n2 = self.norm_sq(x);
        self.eval(x, x, x, x).re / (n2 * n2)
    }

    pub fn norm_sq(&self, x: &[C64]) -> f64 {
        let m = self.m;
        let mut acc = ZERO;
        for i in 0..m {
            for j in 0..m {
                acc += self.metric[(i, j)] * x[i] * x[j].conj();
            }
        }
        acc.re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, random_pd_hermitian};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn fubini_study_values() {
        let r = KaehlerCurvature::fubini_study(&CMat::identity(3, 3));
        assert!(r.symmetry_residual() < 1e-15);
        let ric = r.ricci();
        assert!(max_abs_c(&(ric - CMat::identity(3, 3) * c64(4.0, 0.0))) < 1e-13);
        let x = [c64(0.3, 0.1), c64(-0.2, 0.5), c64(0.7, 0.0)];
        assert!((r.holomorphic_sectional(&x) - 2.0).abs() < 1e-13);
    }

    #[test]
    fn random_symmetrized_has_symmetries() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = KaehlerCurvature::random_symmetrized(3, &mut rng);
        assert!(r.symmetry_residual() < 1e-14);
        assert!(r.max_abs() > 0.1);
        let ric = r.ricci();
        assert!(max_abs_c(&(&ric - ric.adjoint())) < 1e-13);
    }

    #[test]
    fn unitary_frame_of_fs_is_standard() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = random_pd_hermitian(3, &mut rng);
        let r = KaehlerCurvature::fubini_study(&g).in_unitary_frame();
        let std = KaehlerCurvature::fubini_study(&CMat::identity(3, 3));
        let diff = r.r.iter().zip(&std.r).fold(0.0f64, |a, (x, y)| a.max((x - y).norm()));
        assert!(diff < 1e-12);
    }
}
