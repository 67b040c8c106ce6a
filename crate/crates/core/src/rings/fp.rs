use std::fmt;

use super::{check_prime, impl_std_ops, mul_mod, reduce_signed, RingElem, RingError};

/// Element of the prime field `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u64,
    value: u64,
}

impl Fp {
    pub fn new(p: u64, value: i64) -> Result<Self, RingError> {
        check_prime(p)?;
        Ok(Self::from_raw(p, reduce_signed(value, p)))
    }

    pub(crate) fn from_raw(p: u64, value: u64) -> Self {
        debug_assert!(value < p);
        Fp { p, value }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn parse(p: u64, s: &str) -> Result<Self, RingError> {
        let v: i64 = s
            .trim()
            .parse()
            .map_err(|_| RingError::parse(s, "expected an integer"))?;
        Fp::new(p, v)
    }
}

impl RingElem for Fp {
    fn same_ring(&self, other: &Self) -> bool {
        self.p == other.p
    }

    fn ring_name(&self) -> String {
        format!("F_{}", self.p)
    }

    fn zero_like(&self) -> Self {
        Fp::from_raw(self.p, 0)
    }

    fn one_like(&self) -> Self {
        Fp::from_raw(self.p, 1 % self.p)
    }

    fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn add(&self, other: &Self) -> Self {
        assert!(self.same_ring(other), "modulus mismatch");
        Fp::from_raw(self.p, (self.value + other.value) % self.p)
    }

    fn mul(&self, other: &Self) -> Self {
        assert!(self.same_ring(other), "modulus mismatch");
        Fp::from_raw(self.p, mul_mod(self.value, other.value, self.p))
    }

    fn neg(&self) -> Self {
        Fp::from_raw(self.p, (self.p - self.value) % self.p)
    }
}

impl_std_ops!(Fp);

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
