use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{check_prime, impl_std_ops, mod_inverse, RingElem, RingError, ZModQ};

/// Element `num / p^exp` of `Z[1/p]`, kept canonical: `exp == 0` or `p` does
/// not divide `num`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PAdicRat {
    p: u64,
    num: BigInt,
    exp: u32,
}

impl PAdicRat {
    pub fn new(p: u64, num: i64, exp: u32) -> Result<Self, RingError> {
        check_prime(p)?;
        Ok(Self::canonical(p, BigInt::from(num), exp))
    }

    pub fn integer(p: u64, n: i64) -> Result<Self, RingError> {
        Self::new(p, n, 0)
    }

    fn canonical(p: u64, mut num: BigInt, mut exp: u32) -> Self {
        if num.is_zero() {
            return PAdicRat { p, num, exp: 0 };
        }
        let bp = BigInt::from(p);
        while exp > 0 {
            let (q, r) = num.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            num = q;
            exp -= 1;
        }
        PAdicRat { p, num, exp }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    /// Power of `p` in the reduced denominator.
    pub fn denominator_exponent(&self) -> u32 {
        self.exp
    }

    fn p_pow(&self, e: u32) -> BigInt {
        num_traits::pow(BigInt::from(self.p), e as usize)
    }

    /// Representative of `self + Z` in `[0, 1)`: `(num mod p^exp) / p^exp`.
    pub fn fractional_part(&self) -> Self {
        let den = self.p_pow(self.exp);
        Self::canonical(self.p, self.num.mod_floor(&den), self.exp)
    }

    pub fn is_integer(&self) -> bool {
        self.exp == 0
    }

    /// The reduction `Z[1/p] -> Z/qZ`, `num/p^exp -> num * (p^-1)^exp mod q`.
    pub fn reduce_mod_q(&self, q: u64) -> Result<ZModQ, RingError> {
        if q < 2 {
            return Err(RingError::ModulusTooSmall { min: 2, got: q });
        }
        let inv = mod_inverse(self.p, q).ok_or(RingError::NotCoprime { p: self.p, q })?;
        let num_mod = self
            .num
            .mod_floor(&BigInt::from(q))
            .to_u64()
            .expect("residue fits in u64");
        let scale = num_bigint::BigUint::from(inv).modpow(&self.exp.into(), &q.into());
        let scale = scale.to_u64().expect("residue fits in u64");
        Ok(ZModQ::from_raw(q, super::mul_mod(num_mod, scale, q)))
    }

    pub fn to_f64(&self) -> f64 {
        let num = self.num.to_f64().unwrap_or(f64::NAN);
        num / (self.p as f64).powi(self.exp as i32)
    }

    /// Parses `n`, `n/d` or `-n/d` where `d` is a power of `p`, written out
    /// or as `p` / `p^k`.
    pub fn parse(p: u64, s: &str) -> Result<Self, RingError> {
        check_prime(p)?;
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (num_s, den_s) = t.split_once('/').unwrap_or((&t, "1"));
        if let Some(k) = den_s.strip_prefix('p') {
            let k: u32 = match k.strip_prefix('^') {
                Some(k) => k.parse().map_err(|_| RingError::parse(s, "bad exponent of p"))?,
                None if k.is_empty() => 1,
                None => return Err(RingError::parse(s, "bad denominator")),
            };
            let num: BigInt = num_s
                .parse()
                .map_err(|_| RingError::parse(s, "numerator is not an integer"))?;
            return Ok(Self::canonical(p, num, k));
        }
        let num: BigInt = num_s
            .parse()
            .map_err(|_| RingError::parse(s, "numerator is not an integer"))?;
        let mut den: BigInt = den_s
            .parse()
            .map_err(|_| RingError::parse(s, "denominator is not an integer"))?;
        if !den.is_positive() {
            return Err(RingError::parse(s, "denominator must be positive"));
        }
        let bp = BigInt::from(p);
        let mut exp = 0u32;
        while !den.is_one() {
            let (q, r) = den.div_rem(&bp);
            if !r.is_zero() {
                return Err(RingError::parse(s, format!("denominator is not a power of {p}")));
            }
            den = q;
            exp += 1;
        }
        Ok(Self::canonical(p, num, exp))
    }
}

impl RingElem for PAdicRat {
    fn same_ring(&self, other: &Self) -> bool {
        self.p == other.p
    }

    fn ring_name(&self) -> String {
        format!("Z[1/{}]", self.p)
    }

    fn zero_like(&self) -> Self {
        PAdicRat {
            p: self.p,
            num: BigInt::zero(),
            exp: 0,
        }
    }

    fn one_like(&self) -> Self {
        PAdicRat {
            p: self.p,
            num: BigInt::one(),
            exp: 0,
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn add(&self, other: &Self) -> Self {
        assert!(self.same_ring(other), "modulus mismatch");
        let e = self.exp.max(other.exp);
        let a = &self.num * self.p_pow(e - self.exp);
        let b = &other.num * self.p_pow(e - other.exp);
        Self::canonical(self.p, a + b, e)
    }

    fn mul(&self, other: &Self) -> Self {
        assert!(self.same_ring(other), "modulus mismatch");
        if self.is_zero() || other.is_zero() {
            return self.zero_like();
        }
        Self::canonical(self.p, &self.num * &other.num, self.exp + other.exp)
    }

    fn neg(&self) -> Self {
        PAdicRat {
            p: self.p,
            num: -&self.num,
            exp: self.exp,
        }
    }
}

impl_std_ops!(PAdicRat);

impl fmt::Display for PAdicRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.p_pow(self.exp))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: u64, s: &str) -> PAdicRat {
        PAdicRat::parse(p, s).unwrap()
    }

    #[test]
    fn canonical_form() {
        assert_eq!(r(2, "6/4"), r(2, "3/2"));
        assert_eq!(r(2, "6/4").denominator_exponent(), 1);
        assert_eq!(r(2, "4/4"), PAdicRat::integer(2, 1).unwrap());
        assert_eq!(r(3, "0/9").denominator_exponent(), 0);
        assert!(PAdicRat::parse(2, "1/3").is_err());
        assert_eq!(r(2, "-3/8").to_string(), "-3/8");
        assert_eq!(r(3, "2/p^2"), r(3, "2/9"));
        assert_eq!(r(5, "1/p"), r(5, "1/5"));
        assert!(PAdicRat::parse(2, "1/q").is_err());
    }

    #[test]
    fn halves_sum_to_one() {
        let h = r(2, "1/2");
        assert_eq!(&h + &h, PAdicRat::integer(2, 1).unwrap());
        assert_eq!(&h * &h, r(2, "1/4"));
    }

    #[test]
    fn fractional_parts() {
        assert_eq!(r(2, "5/2").fractional_part(), r(2, "1/2"));
        assert_eq!(r(2, "-1/2").fractional_part(), r(2, "1/2"));
        assert_eq!(r(3, "7").fractional_part(), r(3, "0"));
    }

    #[test]
    fn reduction_mod_q() {
        assert_eq!(r(2, "1").reduce_mod_q(13).unwrap().value(), 1);
        assert_eq!(r(2, "1/2").reduce_mod_q(13).unwrap().value(), 7);
        assert_eq!(r(2, "3/4").reduce_mod_q(5).unwrap().value(), 2);
        assert_eq!(r(2, "-1/2").reduce_mod_q(13).unwrap().value(), 6);
        assert_eq!(r(2, "1/2").reduce_mod_q(6), Err(RingError::NotCoprime { p: 2, q: 6 }));
    }
}
