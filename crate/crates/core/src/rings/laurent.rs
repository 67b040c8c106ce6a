use std::collections::BTreeMap;
use std::fmt;

use super::{check_prime, impl_std_ops, mul_mod, reduce_signed, CycloRing, Fp, RingElem, RingError};

/// Laurent polynomial over `F_p`, stored as a sparse exponent map with no
/// zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    p: u64,
    coeffs: BTreeMap<i64, u64>,
}

impl LaurentPoly {
    pub fn zero(p: u64) -> Result<Self, RingError> {
        check_prime(p)?;
        Ok(LaurentPoly {
            p,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn one(p: u64) -> Result<Self, RingError> {
        Self::monomial(p, 1, 0)
    }

    /// The variable `t`.
    pub fn t(p: u64) -> Result<Self, RingError> {
        Self::monomial(p, 1, 1)
    }

    /// `coeff * t^exp`.
    pub fn monomial(p: u64, coeff: i64, exp: i64) -> Result<Self, RingError> {
        Self::from_terms(p, [(coeff, exp)])
    }

    /// Sum of `coeff * t^exp` over the given terms; repeated exponents add up.
    pub fn from_terms(p: u64, terms: impl IntoIterator<Item = (i64, i64)>) -> Result<Self, RingError> {
        let mut out = Self::zero(p)?;
        for (c, e) in terms {
            out.add_term(e, reduce_signed(c, p));
        }
        Ok(out)
    }

    fn add_term(&mut self, exp: i64, c: u64) {
        if c == 0 {
            return;
        }
        let p = self.p;
        let slot = self.coeffs.entry(exp).or_insert(0);
        *slot = (*slot + c) % p;
        if *slot == 0 {
            self.coeffs.remove(&exp);
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeff(&self, exp: i64) -> Fp {
        Fp::from_raw(self.p, self.coeffs.get(&exp).copied().unwrap_or(0))
    }

    /// Nonzero terms as `(exponent, coefficient)` in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Largest `|k|` with a nonzero `t^k` coefficient; 0 for the zero polynomial.
    pub fn max_abs_exponent(&self) -> u64 {
        self.coeffs.keys().map(|e| e.unsigned_abs()).max().unwrap_or(0)
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly {
            p: self.p,
            coeffs: self.coeffs.iter().map(|(&e, &c)| (e + k, c)).collect(),
        }
    }

    /// Keeps only the terms whose exponent satisfies `keep`.
    pub fn filter_exponents(&self, keep: impl Fn(i64) -> bool) -> Self {
        LaurentPoly {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&e, _)| keep(e))
                .map(|(&e, &c)| (e, c))
                .collect(),
        }
    }

    /// Ring homomorphism `F_p[t, t^-1] -> F_p[xi]/(xi^m - 1)`, `t^k -> xi^(k mod m)`.
    pub fn subst_cyclotomic(&self, m: usize) -> Result<CycloRing, RingError> {
        let mut out = CycloRing::zero(self.p, m)?;
        for (e, c) in self.terms() {
            out.add_raw(reduce_signed(e, m as u64) as usize, c);
        }
        Ok(out)
    }

    /// Parses literals such as `1 + t^-1 + 2*t^3`.
    pub fn parse(p: u64, s: &str) -> Result<Self, RingError> {
        let terms = parse_terms(s, "t")?;
        Self::from_terms(p, terms)
    }
}

impl RingElem for LaurentPoly {
    fn same_ring(&self, other: &Self) -> bool {
        self.p == other.p
    }

    fn ring_name(&self) -> String {
        format!("F_{}[t,t^-1]", self.p)
    }

    fn zero_like(&self) -> Self {
        LaurentPoly {
            p: self.p,
            coeffs: BTreeMap::new(),
        }
    }

    fn one_like(&self) -> Self {
        let mut out = self.zero_like();
        out.add_term(0, 1);
        out
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        assert!(self.same_ring(other), "modulus mismatch");
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c);
        }
        out
    }

    fn mul(&self, other: &Self) -> Self {
        assert!(self.same_ring(other), "modulus mismatch");
        let mut out = self.zero_like();
        for (ea, ca) in self.terms() {
            for (eb, cb) in other.terms() {
                out.add_term(ea + eb, mul_mod(ca, cb, self.p));
            }
        }
        out
    }

    fn neg(&self) -> Self {
        LaurentPoly {
            p: self.p,
            coeffs: self.coeffs.iter().map(|(&e, &c)| (e, self.p - c)).collect(),
        }
    }
}

impl_std_ops!(LaurentPoly);

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms(), "t")
    }
}

pub(crate) fn write_terms(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (i64, u64)>,
    var: &str,
) -> fmt::Result {
    let mut first = true;
    for (e, c) in terms {
        if !first {
            write!(f, " + ")?;
        }
        first = false;
        match (c, e) {
            (c, 0) => write!(f, "{c}")?,
            (1, 1) => write!(f, "{var}")?,
            (1, e) => write!(f, "{var}^{e}")?,
            (c, 1) => write!(f, "{c}*{var}")?,
            (c, e) => write!(f, "{c}*{var}^{e}")?,
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Splits a polynomial literal in `var` into `(coefficient, exponent)` pairs.
pub(crate) fn parse_terms(s: &str, var: &str) -> Result<Vec<(i64, i64)>, RingError> {
    let mut compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    while compact.starts_with('(') && compact.ends_with(')') && encloses(&compact) {
        compact = compact[1..compact.len() - 1].to_string();
    }
    if compact.is_empty() {
        return Err(RingError::parse(s, "empty literal"));
    }
    // Split on '+'/'-' that start a new term (not an exponent sign).
    let mut pieces: Vec<String> = Vec::new();
    let mut current = String::new();
    let mut prev: Option<char> = None;
    let mut depth = 0i32;
    for ch in compact.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let starts_term = (ch == '+' || ch == '-') && depth == 0 && !matches!(prev, Some('^') | None);
        if starts_term {
            pieces.push(std::mem::take(&mut current));
        }
        current.push(ch);
        prev = Some(ch);
    }
    pieces.push(current);

    let mut terms = Vec::with_capacity(pieces.len());
    for piece in pieces {
        let (sign, body) = match piece.strip_prefix('-') {
            Some(rest) => (-1i64, rest),
            None => (1i64, piece.strip_prefix('+').unwrap_or(&piece)),
        };
        if body.is_empty() {
            return Err(RingError::parse(s, "dangling sign"));
        }
        let (coeff, exp) =
            parse_monomial(body, var).ok_or_else(|| RingError::parse(s, format!("bad term {body:?}")))?;
        terms.push((sign * coeff, exp));
    }
    Ok(terms)
}

/// Whether the leading '(' is matched by the final ')'.
fn encloses(s: &str) -> bool {
    let mut depth = 0i32;
    for (pos, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth == 0 {
            return pos == s.len() - 1;
        }
    }
    false
}

fn parse_monomial(body: &str, var: &str) -> Option<(i64, i64)> {
    let Some(pos) = body.find(var) else {
        return body.parse::<i64>().ok().map(|c| (c, 0));
    };
    let coeff_part = body[..pos].strip_suffix('*').unwrap_or(&body[..pos]);
    let coeff = if coeff_part.is_empty() {
        1
    } else {
        coeff_part.parse::<i64>().ok()?
    };
    let rest = &body[pos + var.len()..];
    let exp = if rest.is_empty() {
        1
    } else {
        let e = rest.strip_prefix('^')?;
        let e = e.strip_prefix('(').and_then(|x| x.strip_suffix(')')).unwrap_or(e);
        e.parse::<i64>().ok()?
    };
    Some((coeff, exp))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(p: u64, s: &str) -> LaurentPoly {
        LaurentPoly::parse(p, s).unwrap()
    }

    #[test]
    fn one_is_identity() {
        let b = lp(5, "t^-1 + t^3");
        assert_eq!(&LaurentPoly::one(5).unwrap() * &b, b);
    }

    #[test]
    fn middle_terms_cancel_in_char_two() {
        // (1 + t)(1 + t^-1) = t^-1 + 2 + t
        assert_eq!(&lp(2, "1 + t") * &lp(2, "1 + t^-1"), lp(2, "t^-1 + t"));
        assert_eq!(&lp(3, "1 + t") * &lp(3, "1 + t^-1"), lp(3, "t^-1 + 2 + t"));
    }

    #[test]
    fn times_zero() {
        let z = LaurentPoly::zero(3).unwrap();
        assert!((&lp(3, "t + 2*t^2") * &z).is_zero());
    }

    #[test]
    fn no_stored_zero_coefficients() {
        let a = lp(3, "t + 2*t");
        assert!(a.is_zero());
        assert_eq!(a, LaurentPoly::zero(3).unwrap());
        let b = &lp(3, "1 + t") + &lp(3, "2*t");
        assert_eq!(b.num_terms(), 1);
    }

    #[test]
    fn parse_and_display() {
        let a = lp(5, "1 + t^-1 + 2*t^3");
        assert_eq!(a.to_string(), "t^-1 + 1 + 2*t^3");
        assert_eq!(lp(5, &a.to_string()), a);
        assert_eq!(lp(5, "-t"), lp(5, "4*t"));
        assert_eq!(lp(5, "3t^(-2) - 1"), lp(5, "3*t^-2 + 4"));
        assert!(LaurentPoly::parse(5, "1 + ").is_err());
        assert!(LaurentPoly::parse(5, "x^2").is_err());
        assert!(LaurentPoly::parse(6, "1").is_err());
    }

    #[test]
    fn substitution_wraps_negative_exponents() {
        let xi11 = lp(2, "t^-1").subst_cyclotomic(12).unwrap();
        assert_eq!(xi11, CycloRing::monomial(2, 12, 1, 11).unwrap());
        // 1 + t^6 + t^18 -> 1 + xi^6 + xi^6 = 1 in characteristic 2
        let one = lp(2, "1 + t^6 + t^18").subst_cyclotomic(12).unwrap();
        assert!(one.is_one());
    }

    #[test]
    fn mismatch_detected() {
        assert!(lp(2, "t").checked_mul(&lp(3, "t")).is_err());
    }
}
