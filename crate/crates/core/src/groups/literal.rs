//! Element literals: products of elementary matrices such as
//! `e[1,5](t^-1)*e[1,2](1)`, and marked-set files with one literal per line.

use super::{CentralReduction, GroupError, GroupShape, QuotientElem, Retract, ShapedMatrix};
use crate::rings::{LaurentPoly, PAdicRat, RingElem, RingError};

pub const DEFAULT_G_MARKED_SET: &str = include_str!("../../data/g_default.txt");
pub const DEFAULT_K_MARKED_SET: &str = include_str!("../../data/k_default.txt");

fn parse_err(literal: &str, reason: impl Into<String>) -> GroupError {
    GroupError::Parse {
        literal: literal.to_string(),
        reason: reason.into(),
    }
}

/// Parses a product of elementary factors `e[i,j](expr)`; `id` denotes the
/// identity. `entry` parses the ring expressions.
pub fn parse_element<R: RingElem>(
    shape: &GroupShape,
    literal: &str,
    proto: &R,
    entry: impl Fn(&str) -> Result<R, RingError>,
) -> Result<ShapedMatrix<R>, GroupError> {
    let mut acc = ShapedMatrix::identity(shape.clone(), proto);
    let mut rest = literal.trim();
    if rest.is_empty() {
        return Err(parse_err(literal, "empty literal"));
    }
    loop {
        rest = rest.trim_start();
        let factor;
        if let Some(r) = rest.strip_prefix("id") {
            factor = ShapedMatrix::identity(shape.clone(), proto);
            rest = r;
        } else if let Some(r) = rest.strip_prefix("e[") {
            let close = r.find(']').ok_or_else(|| parse_err(literal, "missing ']'"))?;
            let (i, j) = r[..close]
                .split_once(',')
                .ok_or_else(|| parse_err(literal, "expected e[i,j]"))?;
            let i: usize = i.trim().parse().map_err(|_| parse_err(literal, "bad row index"))?;
            let j: usize = j.trim().parse().map_err(|_| parse_err(literal, "bad column index"))?;
            let r = r[close + 1..].trim_start();
            let r = r
                .strip_prefix('(')
                .ok_or_else(|| parse_err(literal, "expected '(' after e[i,j]"))?;
            let mut depth = 1usize;
            let mut end = None;
            for (pos, ch) in r.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => {
                        depth -= 1;
                        if depth == 0 {
                            end = Some(pos);
                            break;
                        }
                    }
                    _ => {}
                }
            }
            let end = end.ok_or_else(|| parse_err(literal, "unbalanced parentheses"))?;
            let value = entry(&r[..end])?;
            factor = ShapedMatrix::elementary(shape.clone(), i, j, value)?;
            rest = &r[end + 1..];
        } else {
            return Err(parse_err(literal, format!("unexpected input {rest:?}")));
        }
        acc = acc.mul(&factor)?;
        rest = rest.trim_start();
        if rest.is_empty() {
            return Ok(acc);
        }
        rest = rest
            .strip_prefix('*')
            .ok_or_else(|| parse_err(literal, "expected '*' between factors"))?;
    }
}

/// Parses a marked set: one element literal per line, blank lines and lines
/// starting with `#` ignored.
pub fn parse_marked_set<R: Retract>(
    text: &str,
    shape: &GroupShape,
    proto: &R,
    reduction: CentralReduction,
    entry: impl Fn(&str) -> Result<R, RingError>,
) -> Result<Vec<QuotientElem<R>>, GroupError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let g = parse_element(shape, line, proto, &entry)?;
        out.push(QuotientElem::normal_form(g, reduction)?);
    }
    if out.is_empty() {
        return Err(parse_err(text, "marked set is empty"));
    }
    Ok(out)
}

/// Default marked set of `G` over `F_p`.
pub fn default_g_marked_set(p: u64) -> Result<Vec<QuotientElem<LaurentPoly>>, GroupError> {
    parse_marked_set(
        DEFAULT_G_MARKED_SET,
        &GroupShape::g0(),
        &LaurentPoly::zero(p)?,
        CentralReduction::NonNegativePowers,
        |s| LaurentPoly::parse(p, s),
    )
}

/// Default marked set of `K` over `Z[1/p]`.
pub fn default_k_marked_set(p: u64) -> Result<Vec<QuotientElem<PAdicRat>>, GroupError> {
    parse_marked_set(
        DEFAULT_K_MARKED_SET,
        &GroupShape::k0(),
        &PAdicRat::integer(p, 0)?,
        CentralReduction::Integers,
        |s| PAdicRat::parse(p, s),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_g(s: &str) -> Result<ShapedMatrix<LaurentPoly>, GroupError> {
        parse_element(&GroupShape::g0(), s, &LaurentPoly::zero(2).unwrap(), |x| {
            LaurentPoly::parse(2, x)
        })
    }

    #[test]
    fn products_of_elementaries() {
        let g = parse_g("e[1,5](t^-1)*e[1,2](1)").unwrap();
        let a = ShapedMatrix::elementary(GroupShape::g0(), 1, 5, LaurentPoly::parse(2, "t^-1").unwrap()).unwrap();
        let b = ShapedMatrix::elementary(GroupShape::g0(), 1, 2, LaurentPoly::parse(2, "1").unwrap()).unwrap();
        assert_eq!(g, a.mul(&b).unwrap());
        assert_eq!(
            parse_g(" e[1,2]( 1 + t ) * id ").unwrap().entry(0, 1),
            &LaurentPoly::parse(2, "1+t").unwrap()
        );
        assert_eq!(parse_g("e[1,2]((1 + t))").unwrap(), parse_g("e[1,2](1+t)").unwrap());
    }

    #[test]
    fn rejects_malformed_literals() {
        for bad in [
            "",
            "e[1,5]",
            "e[1,5](t",
            "e[5,1](1)",
            "e[1,2](1) e[2,5](1)",
            "f[1,2](1)",
            "e[1;2](1)",
        ] {
            assert!(parse_g(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn default_sets() {
        let g = default_g_marked_set(2).unwrap();
        assert_eq!(g.len(), 8);
        assert!(g.iter().all(|x| !x.is_identity()));
        let k = default_k_marked_set(2).unwrap();
        assert_eq!(k.len(), 5);
        assert_eq!(k[0].lift().corner(), &PAdicRat::parse(2, "1/2").unwrap());
        assert_eq!(
            default_k_marked_set(3).unwrap()[0].lift().corner(),
            &PAdicRat::parse(3, "1/3").unwrap()
        );
    }

    #[test]
    fn empty_marked_set_rejected() {
        let r = parse_marked_set(
            "# nothing\n\n",
            &GroupShape::g0(),
            &LaurentPoly::zero(2).unwrap(),
            CentralReduction::NonNegativePowers,
            |s| LaurentPoly::parse(2, s),
        );
        assert!(r.is_err());
    }
}
