use std::fmt;

use super::laurent::{parse_terms, write_terms};
use super::{check_prime, impl_std_ops, mul_mod, reduce_signed, Fp, RingElem, RingError};

/// Element of `F_p[xi]/(xi^m - 1)`: a dense coefficient vector indexed by
/// `xi^0 .. xi^(m-1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycloRing {
    p: u64,
    coeffs: Vec<u64>,
}

impl CycloRing {
    pub fn zero(p: u64, m: usize) -> Result<Self, RingError> {
        check_prime(p)?;
        if m == 0 {
            return Err(RingError::ModulusTooSmall { min: 1, got: 0 });
        }
        Ok(CycloRing { p, coeffs: vec![0; m] })
    }

    pub fn one(p: u64, m: usize) -> Result<Self, RingError> {
        Self::monomial(p, m, 1, 0)
    }

    /// `coeff * xi^exp`, exponent taken mod `m`.
    pub fn monomial(p: u64, m: usize, coeff: i64, exp: i64) -> Result<Self, RingError> {
        let mut out = Self::zero(p, m)?;
        out.add_raw(reduce_signed(exp, m as u64) as usize, reduce_signed(coeff, p));
        Ok(out)
    }

    pub(crate) fn add_raw(&mut self, idx: usize, c: u64) {
        let slot = &mut self.coeffs[idx];
        *slot = (*slot + c) % self.p;
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Order `m` of `xi`.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: usize) -> Fp {
        Fp::from_raw(self.p, self.coeffs[k % self.order()])
    }

    /// Nonzero terms as `(exponent, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(e, &c)| (e, c))
    }

    /// Copy with the coefficients of `xi^k` for `k < len` cleared.
    pub fn clear_below(&self, len: usize) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut().take(len) {
            *c = 0;
        }
        out
    }

    /// Parses literals such as `1 + xi^5`.
    pub fn parse(p: u64, m: usize, s: &str) -> Result<Self, RingError> {
        let mut out = Self::zero(p, m)?;
        for (c, e) in parse_terms(s, "xi")? {
            out.add_raw(reduce_signed(e, m as u64) as usize, reduce_signed(c, p));
        }
        Ok(out)
    }
}

impl RingElem for CycloRing {
    fn same_ring(&self, other: &Self) -> bool {
        self.p == other.p && self.coeffs.len() == other.coeffs.len()
    }

    fn ring_name(&self) -> String {
        format!("F_{}[xi]/(xi^{} - 1)", self.p, self.order())
    }

    fn zero_like(&self) -> Self {
        CycloRing {
            p: self.p,
            coeffs: vec![0; self.coeffs.len()],
        }
    }

    fn one_like(&self) -> Self {
        let mut out = self.zero_like();
        out.add_raw(0, 1);
        out
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn add(&self, other: &Self) -> Self {
        assert!(self.same_ring(other), "modulus mismatch");
        CycloRing {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| (a + b) % self.p)
                .collect(),
        }
    }

    fn mul(&self, other: &Self) -> Self {
        assert!(self.same_ring(other), "modulus mismatch");
        let m = self.order();
        let mut out = self.zero_like();
        let rhs: Vec<(usize, u64)> = other.terms().collect();
        for (ea, ca) in self.terms() {
            for &(eb, cb) in &rhs {
                out.add_raw((ea + eb) % m, mul_mod(ca, cb, self.p));
            }
        }
        out
    }

    fn neg(&self) -> Self {
        CycloRing {
            p: self.p,
            coeffs: self.coeffs.iter().map(|&c| (self.p - c) % self.p).collect(),
        }
    }
}

impl_std_ops!(CycloRing);

impl fmt::Display for CycloRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms().map(|(e, c)| (e as i64, c)), "xi")
    }
}
