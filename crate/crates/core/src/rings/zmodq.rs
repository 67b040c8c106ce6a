use std::fmt;

use super::{impl_std_ops, mul_mod, reduce_signed, RingElem, RingError};

/// Residue class in `Z/qZ` (`q` need not be prime).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZModQ {
    q: u64,
    value: u64,
}

impl ZModQ {
    pub fn new(q: u64, value: i64) -> Result<Self, RingError> {
        if q < 2 {
            return Err(RingError::ModulusTooSmall { min: 2, got: q });
        }
        Ok(ZModQ {
            q,
            value: reduce_signed(value, q),
        })
    }

    pub(crate) fn from_raw(q: u64, value: u64) -> Self {
        debug_assert!(value < q);
        ZModQ { q, value }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn parse(q: u64, s: &str) -> Result<Self, RingError> {
        let v: i64 = s
            .trim()
            .parse()
            .map_err(|_| RingError::parse(s, "expected an integer"))?;
        ZModQ::new(q, v)
    }
}

impl RingElem for ZModQ {
    fn same_ring(&self, other: &Self) -> bool {
        self.q == other.q
    }

    fn ring_name(&self) -> String {
        format!("Z/{}Z", self.q)
    }

    fn zero_like(&self) -> Self {
        ZModQ::from_raw(self.q, 0)
    }

    fn one_like(&self) -> Self {
        ZModQ::from_raw(self.q, 1)
    }

    fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn add(&self, other: &Self) -> Self {
        assert!(self.same_ring(other), "modulus mismatch");
        ZModQ::from_raw(
            self.q,
            ((self.value as u128 + other.value as u128) % self.q as u128) as u64,
        )
    }

    fn mul(&self, other: &Self) -> Self {
        assert!(self.same_ring(other), "modulus mismatch");
        ZModQ::from_raw(self.q, mul_mod(self.value, other.value, self.q))
    }

    fn neg(&self) -> Self {
        ZModQ::from_raw(self.q, (self.q - self.value) % self.q)
    }
}

impl_std_ops!(ZModQ);

impl fmt::Display for ZModQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
