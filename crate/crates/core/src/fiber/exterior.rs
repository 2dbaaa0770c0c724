//! Bitmask exterior algebra on `2m` generators: bits `0..m` are `dz^i`,
//! bits `m..2m` are `dz̄^i`. A canonical basis element is the wedge of its
//! generators in increasing bit order.

use crate::error::{Error, Result};
pub use crate::linalg::subsets;
use crate::linalg::{C64, ZERO};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type Mask = u32;

pub fn mask_of(indices: &[usize]) -> Mask {
    indices.iter().fold(0, |acc, &i| acc | (1 << i))
}

pub fn bits_of(mask: Mask) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

/// Sign of `e_a ∧ e_b` relative to `e_{a|b}`, or `None` when they overlap.
#[inline]
pub fn wedge_sign(a: Mask, b: Mask) -> Option<f64> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if swaps % 2 == 0 { 1.0 } else { -1.0 })
}

pub fn bidegree_of(mask: Mask, m: usize) -> (usize, usize) {
    let low = (1u32 << m) - 1;
    ((mask & low).count_ones() as usize, (mask >> m).count_ones() as usize)
}

/// Swap holomorphic and antiholomorphic bits.
#[inline]
pub fn conj_mask(mask: Mask, m: usize) -> Mask {
    let low = (1u32 << m) - 1;
    ((mask & low) << m) | (mask >> m)
}

/// `conj(e_S) = sign * e_{conj S}`; the sign is `(-1)^{pq}`.
#[inline]
pub fn conj_sign(mask: Mask, m: usize) -> f64 {
    let (p, q) = bidegree_of(mask, m);
    if (p * q) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Canonical basis of every bidegree for a fixed `m`.
#[derive(Debug, Clone)]
pub struct ExteriorBasis {
    pub m: usize,
    blocks: Vec<Vec<Mask>>,
    position: Vec<usize>,
}

impl ExteriorBasis {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1 && m <= 8, "exterior algebra supports 1 <= m <= 8");
        let mut blocks = Vec::with_capacity((m + 1) * (m + 1));
        let mut position = vec![0usize; 1 << (2 * m)];
        for p in 0..=m {
            for q in 0..=m {
                let mut block = Vec::new();
                for i in subsets(m, p) {
                    for j in subsets(m, q) {
                        let mask = mask_of(&i) | (mask_of(&j) << m);
                        position[mask as usize] = block.len();
                        block.push(mask);
                    }
                }
                blocks.push(block);
            }
        }
        Self { m, blocks, position }
    }

    pub fn block(&self, p: usize, q: usize) -> &[Mask] {
        &self.blocks[p * (self.m + 1) + q]
    }

    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.block(p, q).len()
    }

    #[inline]
    pub fn position(&self, mask: Mask) -> usize {
        self.position[mask as usize]
    }
}

/// Coefficients of a `(p,q)`-form on the canonical basis of the coordinate
/// coframe `dz^I ∧ dz̄^J`, `I`, `J` strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberForm {
    pub m: usize,
    pub p: usize,
    pub q: usize,
    pub coeffs: Vec<C64>,
}

impl FiberForm {
    pub fn zero(basis: &ExteriorBasis, p: usize, q: usize) -> Result<Self> {
        let m = basis.m;
        if p > m || q > m {
            return Err(Error::BidegreeOverflow { p, q, m });
        }
        Ok(Self { m, p, q, coeffs: vec![ZERO; basis.dim(p, q)] })
    }

    pub fn from_coeffs(basis: &ExteriorBasis, p: usize, q: usize, coeffs: Vec<C64>) -> Result<Self> {
        let z = Self::zero(basis, p, q)?;
        if coeffs.len() != z.coeffs.len() {
            return Err(Error::DimensionMismatch(format!("({p},{q})-form needs {} coefficients, got {}", z.coeffs.len(), coeffs.len())));
        }
        Ok(Self { coeffs, ..z })
    }

    /// Single basis element `c · dz^I ∧ dz̄^J` with 0-based increasing indices.
    pub fn monomial(basis: &ExteriorBasis, holo: &[usize], anti: &[usize], c: C64) -> Result<Self> {
        let m = basis.m;
        let mut f = Self::zero(basis, holo.len(), anti.len())?;
        if holo.iter().chain(anti).any(|&i| i >= m) {
            return Err(Error::DimensionMismatch(format!("index out of range for m = {m}")));
        }
        let mut h = holo.to_vec();
        let mut a = anti.to_vec();
        let sign = sort_sign(&mut h) * sort_sign(&mut a);
        if h.windows(2).any(|w| w[0] == w[1]) || a.windows(2).any(|w| w[0] == w[1]) {
            return Ok(f);
        }
        let mask = mask_of(&h) | (mask_of(&a) << m);
        f.coeffs[basis.position(mask)] = c * sign;
        Ok(f)
    }

    pub fn degree(&self) -> usize {
        self.p + self.q
    }

    pub fn get(&self, basis: &ExteriorBasis, mask: Mask) -> C64 {
        self.coeffs[basis.position(mask)]
    }

    pub fn scale(&self, c: C64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|z| z * c).collect(), ..self.clone() }
    }

    /// Sum; an identically zero operand of another bidegree acts as zero.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.p, self.q) != (other.p, other.q) && self.m == other.m {
            if other.is_zero() {
                return Ok(self.clone());
            }
            if self.is_zero() {
                return Ok(other.clone());
            }
        }
        self.check_same(other)?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(), ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|z| *z == ZERO)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if (self.m, self.p, self.q) != (other.m, other.p, other.q) {
            return Err(Error::DimensionMismatch(format!("bidegrees ({},{}) and ({},{})", self.p, self.q, other.p, other.q)));
        }
        Ok(())
    }

    /// Complex conjugate, a `(q,p)`-form.
    pub fn conj(&self, basis: &ExteriorBasis) -> Self {
        let m = self.m;
        let mut out = vec![ZERO; basis.dim(self.q, self.p)];
        for (k, &mask) in basis.block(self.p, self.q).iter().enumerate() {
            let c = conj_mask(mask, m);
            out[basis.position(c)] = self.coeffs[k].conj() * conj_sign(mask, m);
        }
        Self { m, p: self.q, q: self.p, coeffs: out }
    }

    /// Metric-independent wedge product.
    pub fn wedge(&self, other: &Self, basis: &ExteriorBasis) -> Result<Self> {
        let (p, q) = (self.p + other.p, self.q + other.q);
        let mut out = Self::zero(basis, p, q)?;
        let left = basis.block(self.p, self.q);
        let right = basis.block(other.p, other.q);
        for (a, fa) in left.iter().zip(&self.coeffs) {
            if *fa == ZERO {
                continue;
            }
            for (b, gb) in right.iter().zip(&other.coeffs) {
                if let Some(s) = wedge_sign(*a, *b) {
                    out.coeffs[basis.position(a | b)] += fa * gb * s;
                }
            }
        }
        Ok(out)
    }

    /// Multi-index label `"i1,i2|j1"` (1-based) to `[re, im]`, zero entries dropped.
    pub fn to_index_map(&self, basis: &ExteriorBasis) -> BTreeMap<String, [f64; 2]> {
        let m = self.m;
        let mut map = BTreeMap::new();
        for (mask, c) in basis.block(self.p, self.q).iter().zip(&self.coeffs) {
            if c.norm() == 0.0 {
                continue;
            }
            let bits = bits_of(*mask);
            let holo: Vec<String> = bits.iter().filter(|&&b| b < m).map(|b| (b + 1).to_string()).collect();
            let anti: Vec<String> = bits.iter().filter(|&&b| b >= m).map(|b| (b - m + 1).to_string()).collect();
            map.insert(format!("{}|{}", holo.join(","), anti.join(",")), [c.re, c.im]);
        }
        map
    }
}

/// Sorts in place and returns the permutation sign.
pub fn sort_sign(v: &mut [usize]) -> f64 {
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    sign
}

/// Serializable form payload used in reports.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormRecord {
    pub p: usize,
    pub q: usize,
    pub coefficients: BTreeMap<String, [f64; 2]>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    #[test]
    fn subset_counts() {
        assert_eq!(subsets(5, 2).len(), 10);
        assert_eq!(subsets(4, 0), vec![Vec::<usize>::new()]);
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge_sign(0b01, 0b10), Some(1.0));
        assert_eq!(wedge_sign(0b10, 0b01), Some(-1.0));
        assert_eq!(wedge_sign(0b11, 0b01), None);
        assert_eq!(wedge_sign(0b101, 0b010), Some(-1.0));
    }

    #[test]
    fn wedge_is_graded_commutative() {
        let b = ExteriorBasis::new(3);
        let f = FiberForm::monomial(&b, &[0], &[1], c64(1.0, 2.0)).unwrap();
        let g = FiberForm::monomial(&b, &[2], &[], c64(0.5, 0.0)).unwrap();
        let fg = f.wedge(&g, &b).unwrap();
        let gf = g.wedge(&f, &b).unwrap();
        assert!(fg.sub(&gf).unwrap().max_abs() < 1e-15);
        let g1 = FiberForm::monomial(&b, &[1], &[], c64(1.0, 0.0)).unwrap();
        let g2 = FiberForm::monomial(&b, &[2], &[], c64(1.0, 0.0)).unwrap();
        let a = g1.wedge(&g2, &b).unwrap();
        let c = g2.wedge(&g1, &b).unwrap();
        assert!(a.add(&c).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn monomial_sorting_sign() {
        let b = ExteriorBasis::new(3);
        let f = FiberForm::monomial(&b, &[1, 0], &[], c64(1.0, 0.0)).unwrap();
        assert_eq!(f.get(&b, 0b11), c64(-1.0, 0.0));
    }

    #[test]
    fn conj_is_involution() {
        let b = ExteriorBasis::new(3);
        let f = FiberForm::monomial(&b, &[0, 2], &[1], c64(0.3, -0.7)).unwrap();
        let back = f.conj(&b).conj(&b);
        assert_eq!(back, f);
    }
}
