//! Finite approximations of `G` by the groups `G0(F_p[xi]) / C'`.
//!
//! For `xi` a formal `6n`-th root of unity and `C'` the span of
//! `xi^0 .. xi^(3n-1)` in the corner, the substitution `t^k -> xi^k` is
//! injective and multiplicative on any finite `F` whose products only involve
//! exponents of absolute value below `n`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::groups::{CentralReduction, GroupError, QuotientElem};
use crate::rings::{CycloRing, LaurentPoly, RingError};

pub type GElem = QuotientElem<LaurentPoly>;
pub type LefElem = QuotientElem<CycloRing>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LefError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("degree bound must be at least 1")]
    ZeroDegree,
    #[error("element {0} is not covered by the witness")]
    Missing(String),
    #[error("element {element} lives over F_{got}, expected F_{expected}")]
    PrimeMismatch { element: String, expected: u64, got: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LefParams {
    pub p: u64,
    pub n: usize,
    pub m: usize,
    pub reduction: CentralReduction,
}

impl LefParams {
    pub fn new(p: u64, n: usize) -> Result<Self, LefError> {
        if n == 0 {
            return Err(LefError::ZeroDegree);
        }
        crate::rings::Fp::new(p, 0)?;
        Ok(LefParams {
            p,
            n,
            m: 6 * n,
            reduction: CentralReduction::CycloWindow { len: 3 * n },
        })
    }
}

fn require_g_mode(g: &GElem, p: u64) -> Result<(), LefError> {
    if g.reduction() != CentralReduction::NonNegativePowers {
        return Err(GroupError::NotGMode.into());
    }
    let got = g.lift().proto().modulus();
    if got != p {
        return Err(LefError::PrimeMismatch {
            element: g.to_string(),
            expected: p,
            got,
        });
    }
    Ok(())
}

/// The substitution `t^k -> xi^k` applied to the normal-form representative,
/// followed by the finite-side normal form.
pub fn embed(g: &GElem, params: &LefParams) -> Result<LefElem, LefError> {
    require_g_mode(g, params.p)?;
    let m = params.m;
    let rep = g.lift().map_entries(|x| x.subst_cyclotomic(m).expect("m >= 6"))?;
    Ok(QuotientElem::normal_form(rep, params.reduction)?)
}

fn max_exponent(g: &GElem) -> u64 {
    let rep = g.lift();
    let d = rep.dim();
    (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| rep.entry(i, j).max_abs_exponent())
        .max()
        .unwrap_or(0)
}

/// `F ∪ F·F`, without repetitions, in a deterministic order.
pub fn square_set(f: &[GElem]) -> Result<Vec<GElem>, LefError> {
    let products: Vec<GElem> = f
        .par_iter()
        .flat_map_iter(|a| f.iter().map(move |b| a.mul(b)))
        .collect::<Result<_, _>>()?;
    let mut seen = std::collections::HashSet::new();
    Ok(f.iter()
        .cloned()
        .chain(products)
        .filter(|g| seen.insert(g.clone()))
        .collect())
}

fn degree_of(domain: &[GElem]) -> usize {
    1 + domain.iter().map(max_exponent).max().unwrap_or(0) as usize
}

/// `1 +` the largest `|t|`-exponent in the normal forms of `F ∪ F·F`.
pub fn choose_degree_bound(f: &[GElem]) -> Result<usize, LefError> {
    for g in f {
        if g.reduction() != CentralReduction::NonNegativePowers {
            return Err(GroupError::NotGMode.into());
        }
    }
    Ok(degree_of(&square_set(f)?))
}

/// A degree bound valid for every product of at most `max_len` generators or
/// inverses: `1 + max_len * E`, with `E` the largest `|t|`-exponent among the
/// generators and their inverses. Unreduced entries of such products stay
/// inside `(-3n, 3n)`, so the embedding is exact on all of them.
pub fn word_degree_bound(gens: &[GElem], max_len: usize) -> Result<usize, LefError> {
    let mut e = 0;
    for g in gens {
        if g.reduction() != CentralReduction::NonNegativePowers {
            return Err(GroupError::NotGMode.into());
        }
        e = e.max(max_exponent(g)).max(max_exponent(&g.inverse()));
    }
    Ok(1 + max_len * e as usize)
}

/// A map from `F ∪ F·F` into the finite group.
#[derive(Debug, Clone)]
pub struct LefWitness {
    params: LefParams,
    phi: HashMap<GElem, LefElem>,
}

impl LefWitness {
    pub fn params(&self) -> &LefParams {
        &self.params
    }

    pub fn phi(&self, g: &GElem) -> Option<&LefElem> {
        self.phi.get(g)
    }

    pub fn domain_len(&self) -> usize {
        self.phi.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GElem, &LefElem)> {
        self.phi.iter()
    }
}

pub fn build_lef_witness(f: &[GElem], p: u64) -> Result<LefWitness, LefError> {
    for g in f {
        require_g_mode(g, p)?;
    }
    let domain = square_set(f)?;
    let n = degree_of(&domain);
    witness_on(domain, LefParams::new(p, n)?)
}

/// Same as [`build_lef_witness`] with the degree bound imposed rather than
/// computed; too small a bound gives an invalid witness.
pub fn build_lef_witness_with_degree(f: &[GElem], p: u64, n: usize) -> Result<LefWitness, LefError> {
    for g in f {
        require_g_mode(g, p)?;
    }
    witness_on(square_set(f)?, LefParams::new(p, n)?)
}

fn witness_on(domain: Vec<GElem>, params: LefParams) -> Result<LefWitness, LefError> {
    let images: Vec<LefElem> = domain.par_iter().map(|g| embed(g, &params)).collect::<Result<_, _>>()?;
    Ok(LefWitness {
        params,
        phi: domain.into_iter().zip(images).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LefViolation {
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LefReport {
    pub n: usize,
    pub m: usize,
    /// `|F|`.
    pub domain_size: usize,
    /// `|F ∪ F·F|`.
    pub square_size: usize,
    pub injective: bool,
    /// Pairs `(f1, f2)` with `phi(f1 f2) != phi(f1) phi(f2)`.
    pub violations: Vec<LefViolation>,
}

impl LefReport {
    pub fn passed(&self) -> bool {
        self.injective && self.violations.is_empty()
    }
}

/// Checks injectivity on `F ∪ F·F` and multiplicativity on `F × F`.
pub fn check_lef(f: &[GElem], witness: &LefWitness) -> Result<LefReport, LefError> {
    let domain = square_set(f)?;
    let look = |g: &GElem| witness.phi(g).ok_or_else(|| LefError::Missing(g.to_string()));
    let mut images = std::collections::HashSet::with_capacity(domain.len());
    for g in &domain {
        images.insert(look(g)?);
    }
    let injective = images.len() == domain.len();

    let pairs: Vec<(usize, usize)> = (0..f.len()).flat_map(|i| (0..f.len()).map(move |j| (i, j))).collect();
    let results: Vec<Option<LefViolation>> = pairs
        .par_iter()
        .map(|&(i, j)| -> Result<Option<LefViolation>, LefError> {
            let (a, b) = (&f[i], &f[j]);
            let prod = look(&a.mul(b)?)?;
            let ok = look(a)?.mul(look(b)?)? == *prod;
            Ok((!ok).then(|| LefViolation {
                left: a.to_string(),
                right: b.to_string(),
            }))
        })
        .collect::<Result<_, _>>()?;
    Ok(LefReport {
        n: witness.params.n,
        m: witness.params.m,
        domain_size: f.len(),
        square_size: domain.len(),
        injective,
        violations: results.into_iter().flatten().collect(),
    })
}
