//! Random ring elements and group elements for randomized checks.

use rand::Rng;

use crate::groups::{GroupShape, ShapedMatrix};
use crate::rings::{CycloRing, LaurentPoly, PAdicRat, RingElem, ZModQ};

pub fn laurent<G: Rng + ?Sized>(rng: &mut G, p: u64, max_exp: i64, max_terms: usize) -> LaurentPoly {
    let terms = (0..rng.gen_range(0..=max_terms))
        .map(|_| (rng.gen_range(0..p as i64), rng.gen_range(-max_exp..=max_exp)))
        .collect::<Vec<_>>();
    LaurentPoly::from_terms(p, terms).expect("p prime")
}

pub fn cyclo<G: Rng + ?Sized>(rng: &mut G, p: u64, m: usize, max_terms: usize) -> CycloRing {
    let mut out = CycloRing::zero(p, m).expect("p prime, m >= 1");
    for _ in 0..rng.gen_range(0..=max_terms) {
        let t = CycloRing::monomial(p, m, rng.gen_range(0..p as i64), rng.gen_range(0..m as i64)).expect("valid");
        out = out.add(&t);
    }
    out
}

/// `a / p^e` with `|a| <= max_num`, `e <= max_exp`.
pub fn padic<G: Rng + ?Sized>(rng: &mut G, p: u64, max_num: i64, max_exp: u32) -> PAdicRat {
    PAdicRat::new(p, rng.gen_range(-max_num..=max_num), rng.gen_range(0..=max_exp)).expect("p prime")
}

pub fn zmodq<G: Rng + ?Sized>(rng: &mut G, q: u64) -> ZModQ {
    ZModQ::new(q, rng.gen_range(0..q as i64)).expect("q >= 2")
}

/// Product of `factors` elementary matrices at random allowed off-diagonal
/// positions, including positions inside a diagonal block.
pub fn shaped<G: Rng + ?Sized, R: RingElem>(
    rng: &mut G,
    shape: &GroupShape,
    factors: usize,
    mut entry: impl FnMut(&mut G) -> R,
) -> ShapedMatrix<R> {
    let n = shape.dim();
    let positions: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && shape.allows(i, j))
        .collect();
    let first = entry(rng);
    let mut acc = ShapedMatrix::identity(shape.clone(), &first);
    for _ in 0..factors {
        let (i, j) = positions[rng.gen_range(0..positions.len())];
        acc = acc.mul_elementary(i + 1, j + 1, &entry(rng)).expect("allowed position");
    }
    acc
}
