//! Exact coefficient rings.
//!
//! Five commutative rings appear in the constructions: the prime field
//! `F_p`, Laurent polynomials `F_p[t, t^-1]`, the truncated cyclotomic ring
//! `F_p[xi]` with `xi^m = 1`, residues `Z/qZ` and the localization `Z[1/p]`.
//! Every element carries its own modulus, so arithmetic between elements of
//! different rings is detected at runtime.

mod cyclo;
mod fp;
mod laurent;
mod matrix;
mod padic;
mod zmodq;

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;

pub use cyclo::CycloRing;
pub use fp::Fp;
pub use laurent::LaurentPoly;
pub use matrix::{determinant, sl_inverse, SquareMatrix};
pub use padic::PAdicRat;
pub use zmodq::ZModQ;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RingError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus must be at least {min}, got {got}")]
    ModulusTooSmall { min: u64, got: u64 },
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: String, right: String },
    #[error("{q} is not coprime to {p}")]
    NotCoprime { p: u64, q: u64 },
    #[error("determinant is not 1")]
    DeterminantNotOne,
    #[error("matrix dimension mismatch")]
    DimensionMismatch,
    #[error("cannot parse ring literal {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
}

impl RingError {
    pub(crate) fn parse(literal: &str, reason: impl Into<String>) -> Self {
        RingError::Parse {
            literal: literal.to_string(),
            reason: reason.into(),
        }
    }
}

/// An element of a commutative unital ring whose modulus travels with the
/// value.
///
/// The arithmetic methods assume both operands live in the same ring and
/// panic otherwise; the `checked_*` variants report the mismatch instead.
pub trait RingElem: Clone + PartialEq + Eq + Hash + Debug + Display + Send + Sync {
    /// Whether `self` and `other` are elements of the same ring.
    fn same_ring(&self, other: &Self) -> bool;
    /// Short description of the ring, used in error messages.
    fn ring_name(&self) -> String;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn is_one(&self) -> bool {
        *self == self.one_like()
    }

    /// `self` added to itself `n` times (negative `n` negates).
    fn times(&self, n: i64) -> Self {
        let mut acc = self.zero_like();
        let step = if n < 0 { self.neg() } else { self.clone() };
        for _ in 0..n.unsigned_abs() {
            acc = acc.add(&step);
        }
        acc
    }

    fn checked_add(&self, other: &Self) -> Result<Self, RingError> {
        self.check_same(other)?;
        Ok(self.add(other))
    }

    fn checked_mul(&self, other: &Self) -> Result<Self, RingError> {
        self.check_same(other)?;
        Ok(self.mul(other))
    }

    fn check_same(&self, other: &Self) -> Result<(), RingError> {
        if self.same_ring(other) {
            Ok(())
        } else {
            Err(RingError::ModulusMismatch {
                left: self.ring_name(),
                right: other.ring_name(),
            })
        }
    }
}

macro_rules! impl_std_ops {
    ($ty:ty) => {
        impl std::ops::Add for &$ty {
            type Output = $ty;
            fn add(self, rhs: Self) -> $ty {
                $crate::rings::RingElem::add(self, rhs)
            }
        }
        impl std::ops::Sub for &$ty {
            type Output = $ty;
            fn sub(self, rhs: Self) -> $ty {
                $crate::rings::RingElem::sub(self, rhs)
            }
        }
        impl std::ops::Mul for &$ty {
            type Output = $ty;
            fn mul(self, rhs: Self) -> $ty {
                $crate::rings::RingElem::mul(self, rhs)
            }
        }
        impl std::ops::Neg for &$ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                $crate::rings::RingElem::neg(self)
            }
        }
    };
}
pub(crate) use impl_std_ops;

/// Trial-division primality test; moduli here are small.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<u64, RingError> {
    if is_prime(p) {
        Ok(p)
    } else {
        Err(RingError::NotPrime(p))
    }
}

/// Inverse of `a` modulo `q` via the extended Euclidean algorithm.
pub fn mod_inverse(a: u64, q: u64) -> Option<u64> {
    let a = (a % q) as i128;
    let q_i = q as i128;
    let egcd = a.extended_gcd(&q_i);
    if egcd.gcd != 1 {
        return None;
    }
    Some(egcd.x.rem_euclid(q_i) as u64)
}

pub(crate) fn reduce_signed(v: i64, m: u64) -> u64 {
    (v as i128).rem_euclid(m as i128) as u64
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Ring selector used by the command line (`fp`, `laurent`, `cyclo:m`,
/// `zmod:q`, `zinvp`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingSpec {
    Fp,
    Laurent,
    Cyclo(usize),
    ZMod(u64),
    ZInvP,
}

impl FromStr for RingSpec {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s {
            "fp" => return Ok(RingSpec::Fp),
            "laurent" => return Ok(RingSpec::Laurent),
            "zinvp" => return Ok(RingSpec::ZInvP),
            _ => {}
        }
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| RingError::parse(s, "expected fp|laurent|cyclo:m|zmod:q|zinvp"))?;
        let value: u64 = arg
            .trim()
            .parse()
            .map_err(|_| RingError::parse(s, "modulus is not an integer"))?;
        match kind.trim() {
            "cyclo" if value >= 1 => Ok(RingSpec::Cyclo(value as usize)),
            "zmod" if value >= 2 => Ok(RingSpec::ZMod(value)),
            "cyclo" | "zmod" => Err(RingError::parse(s, "modulus too small")),
            _ => Err(RingError::parse(s, "unknown ring kind")),
        }
    }
}

impl Display for RingSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RingSpec::Fp => write!(f, "fp"),
            RingSpec::Laurent => write!(f, "laurent"),
            RingSpec::Cyclo(m) => write!(f, "cyclo:{m}"),
            RingSpec::ZMod(q) => write!(f, "zmod:{q}"),
            RingSpec::ZInvP => write!(f, "zinvp"),
        }
    }
}
