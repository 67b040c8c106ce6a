//! Sofic and microstate verification.
//!
//! Fixed-point ratios are exact rationals. A left translation of a finite
//! group by `k` fixes every point when `k = e` and none otherwise, so
//! [`PermAction::LazyLeftReg`] never needs the group to be enumerated.

use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::groups::GroupElement;
use crate::lef::{embed, word_degree_bound, GElem, LefElem, LefError, LefParams, LefWitness};
use crate::words::{check_budget, enumerate_words, Word, WordError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ApproxError {
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Lef(#[from] LefError),
    #[error("not a permutation of 0..{0}")]
    NotBijection(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("cannot compose a dense permutation with a lazy translation")]
    MixedActions,
    #[error("no image for {0}")]
    MissingImage(String),
    #[error("assignment has {got} matrices for {expected} generators")]
    AssignmentSize { expected: usize, got: usize },
    #[error("epsilon must be finite and non-negative, got {0}")]
    BadEpsilon(f64),
    #[error("element {0} is not in the enumerated group")]
    NotInGroup(String),
}

/// Serializes a complex number as `[re, im]`.
pub fn serialize_complex<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, ApproxError> {
        let m = images.len();
        let mut hit = vec![false; m];
        for &i in &images {
            if i >= m || std::mem::replace(&mut hit[i], true) {
                return Err(ApproxError::NotBijection(m));
            }
        }
        Ok(Permutation { images })
    }

    pub fn identity(m: usize) -> Self {
        Permutation {
            images: (0..m).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    /// `self ∘ other` (apply `other` first), matching the matrix product.
    pub fn compose(&self, other: &Self) -> Result<Self, ApproxError> {
        if self.degree() != other.degree() {
            return Err(ApproxError::DimensionMismatch(self.degree(), other.degree()));
        }
        Ok(Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        })
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Permutation { images: inv }
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|(i, j)| i == *j).count()
    }

    /// The permutation matrix `P e_i = e_{sigma(i)}`.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let m = self.degree();
        DMatrix::from_fn(m, m, |r, c| {
            if self.images[c] == r {
                Complex64::one()
            } else {
                Complex64::zero()
            }
        })
    }
}

/// A permutation of `{0..m-1}`, or left translation by an element of a
/// finite group that is never enumerated.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PermAction<E> {
    Dense(Permutation),
    LazyLeftReg(E),
}

impl<E: GroupElement> PermAction<E> {
    pub fn fixed_point_ratio(&self) -> Ratio<u64> {
        match self {
            PermAction::Dense(s) if s.degree() == 0 => Ratio::one(),
            PermAction::Dense(s) => Ratio::new(s.fixed_points() as u64, s.degree() as u64),
            PermAction::LazyLeftReg(k) if k.is_identity() => Ratio::one(),
            PermAction::LazyLeftReg(_) => Ratio::zero(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.fixed_point_ratio().is_one()
    }

    pub fn compose(&self, other: &Self) -> Result<Self, ApproxError> {
        match (self, other) {
            (PermAction::Dense(a), PermAction::Dense(b)) => Ok(PermAction::Dense(a.compose(b)?)),
            (PermAction::LazyLeftReg(a), PermAction::LazyLeftReg(b)) => Ok(PermAction::LazyLeftReg(a.op(b))),
            _ => Err(ApproxError::MixedActions),
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            PermAction::Dense(a) => PermAction::Dense(a.inverse()),
            PermAction::LazyLeftReg(k) => PermAction::LazyLeftReg(k.inverse()),
        }
    }
}

fn ratio_key(r: &Ratio<u64>) -> String {
    r.to_string()
}

fn to_big(r: &Ratio<u64>) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

fn eps_rational(eps: f64) -> Result<BigRational, ApproxError> {
    if !eps.is_finite() || eps < 0.0 {
        return Err(ApproxError::BadEpsilon(eps));
    }
    BigRational::from_float(eps).ok_or(ApproxError::BadEpsilon(eps))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SoficFailure {
    pub condition: &'static str,
    pub elements: Vec<String>,
    pub ratio: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SoficReport {
    pub eps: f64,
    pub set_size: usize,
    /// Multiset of ratios `#fix(phi(g)phi(h)phi(gh)^-1) / m` over `g, h in F`.
    pub pair_ratios: BTreeMap<String, usize>,
    pub identity_ok: bool,
    /// Multiset of ratios `#fix(phi(g)) / m` over `e != g in F`.
    pub element_ratios: BTreeMap<String, usize>,
    pub failures: Vec<SoficFailure>,
    pub passed: bool,
}

const MAX_LISTED_FAILURES: usize = 20;

/// Definition of soficity restricted to `F`, in normalized form:
/// (i) ratio of `phi(g)phi(h)phi(gh)^-1 >= 1 - eps`, (ii) `phi(e)` is the
/// identity, (iii) ratio of `phi(g) <= eps` for `g != e`.
pub fn sofic_check<E, L>(
    f: &[E],
    phi: impl Fn(&E) -> Option<PermAction<L>> + Sync,
    eps: f64,
) -> Result<SoficReport, ApproxError>
where
    E: GroupElement + std::fmt::Display,
    L: GroupElement,
{
    let eps_q = eps_rational(eps)?;
    let one = BigRational::one();
    let image = |g: &E| phi(g).ok_or_else(|| ApproxError::MissingImage(g.to_string()));
    let images: Vec<PermAction<L>> = f.iter().map(image).collect::<Result<_, _>>()?;

    let mut failures = Vec::new();
    let identity_ok = match f.first() {
        Some(g) => image(&g.identity_like())?.is_identity(),
        None => true,
    };
    if !identity_ok {
        failures.push(SoficFailure {
            condition: "identity",
            elements: vec!["e".into()],
            ratio: "<1".into(),
        });
    }

    let pairs: Vec<(usize, usize)> = (0..f.len()).flat_map(|i| (0..f.len()).map(move |j| (i, j))).collect();
    let pair_ratios: Vec<Ratio<u64>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let gh = image(&f[i].op(&f[j]))?;
            Ok(images[i]
                .compose(&images[j])?
                .compose(&gh.inverse())?
                .fixed_point_ratio())
        })
        .collect::<Result<_, ApproxError>>()?;

    let mut pair_hist = BTreeMap::new();
    for (&(i, j), r) in pairs.iter().zip(&pair_ratios) {
        *pair_hist.entry(ratio_key(r)).or_insert(0) += 1;
        if to_big(r) < &one - &eps_q && failures.len() < MAX_LISTED_FAILURES {
            failures.push(SoficFailure {
                condition: "multiplicativity",
                elements: vec![f[i].to_string(), f[j].to_string()],
                ratio: ratio_key(r),
            });
        }
    }
    let mut pair_ok = pair_ratios.iter().all(|r| to_big(r) >= &one - &eps_q);

    let mut elem_hist = BTreeMap::new();
    let mut elem_ok = true;
    for (g, a) in f.iter().zip(&images) {
        if g.is_identity() {
            continue;
        }
        let r = a.fixed_point_ratio();
        *elem_hist.entry(ratio_key(&r)).or_insert(0) += 1;
        if to_big(&r) > eps_q {
            elem_ok = false;
            if failures.len() < MAX_LISTED_FAILURES {
                failures.push(SoficFailure {
                    condition: "fixed points",
                    elements: vec![g.to_string()],
                    ratio: ratio_key(&r),
                });
            }
        }
    }
    pair_ok &= identity_ok;
    Ok(SoficReport {
        eps,
        set_size: f.len(),
        pair_ratios: pair_hist,
        identity_ok,
        element_ratios: elem_hist,
        failures,
        passed: pair_ok && elem_ok,
    })
}

/// `g -> LazyLeftReg(phi(g))` on the domain of the witness.
pub fn lef_to_sofic(witness: &LefWitness) -> impl Fn(&GElem) -> Option<PermAction<LefElem>> + Sync + '_ {
    move |g| witness.phi(g).cloned().map(PermAction::LazyLeftReg)
}

/// Microstates for `G` from one finite quotient: `s -> LazyLeftReg(phi(s))`
/// with the degree bound from [`word_degree_bound`] for words of length
/// `<= max_len`, or `forced_n` when given.
pub fn lef_microstates(
    gens: &[GElem],
    max_len: usize,
    forced_n: Option<usize>,
) -> Result<(LefParams, Vec<PermAction<LefElem>>), ApproxError> {
    let first = gens.first().ok_or(WordError::EmptyAssignment)?;
    let n = match forced_n {
        Some(n) => n,
        None => word_degree_bound(gens, max_len)?,
    };
    let params = LefParams::new(first.lift().proto().modulus(), n)?;
    let actions = gens
        .iter()
        .map(|g| Ok(PermAction::LazyLeftReg(embed(g, &params)?)))
        .collect::<Result<_, ApproxError>>()?;
    Ok((params, actions))
}

/// The left-regular permutation of `g` on an enumerated group:
/// `i -> index(g * elements[i])`.
pub fn dense_left_regular<E: GroupElement + std::fmt::Display>(
    elements: &[E],
    index: &HashMap<E, usize>,
    g: &E,
) -> Result<Permutation, ApproxError> {
    let images = elements
        .iter()
        .map(|x| {
            let y = g.op(x);
            index
                .get(&y)
                .copied()
                .ok_or_else(|| ApproxError::NotInGroup(y.to_string()))
        })
        .collect::<Result<_, _>>()?;
    Permutation::new(images)
}

/// Something that can stand in for a unitary matrix in a word-trace check.
pub trait Microstate: Clone + Send + Sync {
    fn compose(&self, other: &Self) -> Result<Self, ApproxError>;
    fn adjoint(&self) -> Self;
    fn identity_like(&self) -> Self;
    /// `Tr / dim`.
    fn normalized_trace(&self) -> Complex64;
}

impl<E: GroupElement> Microstate for PermAction<E> {
    fn compose(&self, other: &Self) -> Result<Self, ApproxError> {
        PermAction::compose(self, other)
    }

    fn adjoint(&self) -> Self {
        self.inverse()
    }

    fn identity_like(&self) -> Self {
        match self {
            PermAction::Dense(s) => PermAction::Dense(Permutation::identity(s.degree())),
            PermAction::LazyLeftReg(k) => PermAction::LazyLeftReg(k.identity_like()),
        }
    }

    fn normalized_trace(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.fixed_point_ratio()), 0.0)
    }
}

/// A dense complex matrix, used as an independent oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseUnitary(pub DMatrix<Complex64>);

impl Microstate for DenseUnitary {
    fn compose(&self, other: &Self) -> Result<Self, ApproxError> {
        if self.0.ncols() != other.0.nrows() {
            return Err(ApproxError::DimensionMismatch(self.0.ncols(), other.0.nrows()));
        }
        Ok(DenseUnitary(&self.0 * &other.0))
    }

    fn adjoint(&self) -> Self {
        DenseUnitary(self.0.adjoint())
    }

    fn identity_like(&self) -> Self {
        DenseUnitary(DMatrix::identity(self.0.nrows(), self.0.ncols()))
    }

    fn normalized_trace(&self) -> Complex64 {
        let n = self.0.nrows();
        if n == 0 {
            return Complex64::one();
        }
        self.0.trace() / n as f64
    }
}

/// Evaluates a word on an assignment: `s_i -> a[i]`, `s_i* -> a[i]^*`.
pub fn eval_microstate<M: Microstate>(w: &Word, assignment: &[M]) -> Result<M, ApproxError> {
    let first = assignment.first().ok_or(WordError::EmptyAssignment)?;
    let mut acc = first.identity_like();
    for l in w.letters() {
        let a = assignment.get(l.generator).ok_or(WordError::IndexOutOfRange {
            index: l.generator + 1,
            size: assignment.len(),
        })?;
        acc = if l.star {
            acc.compose(&a.adjoint())?
        } else {
            acc.compose(a)?
        };
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordTrace {
    pub word: Word,
    pub length: usize,
    pub trivial: bool,
    #[serde(serialize_with = "serialize_complex")]
    pub trace: Complex64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MicrostateReport {
    pub n: usize,
    pub eps: f64,
    pub words_checked: usize,
    pub trivial_words: usize,
    pub max_deviation: f64,
    pub worst_word: Word,
    pub passed: bool,
    pub words: Vec<WordTrace>,
}

impl MicrostateReport {
    /// The entry for `w`, if it was checked.
    pub fn word(&self, w: &Word) -> Option<&WordTrace> {
        self.words.iter().find(|t| &t.word == w)
    }
}

/// `max deviation < eps`; at `eps = 0` exact agreement is required instead.
pub fn microstate_passes(max_deviation: f64, eps: f64) -> bool {
    max_deviation < eps || (eps == 0.0 && max_deviation == 0.0)
}

/// Checks every free-monoid word of length `<= n` on the generators:
/// `|tr - 1| < eps` for words trivial in the group, `|tr| < eps` otherwise.
pub fn microstate_check<M: Microstate>(
    assignment: &[M],
    n: usize,
    eps: f64,
    is_trivial: impl Fn(&Word) -> bool + Sync,
    budget: u128,
) -> Result<MicrostateReport, ApproxError> {
    eps_rational(eps)?;
    if assignment.is_empty() {
        return Err(WordError::EmptyAssignment.into());
    }
    let k = assignment.len();
    check_budget(k, n, budget)?;
    let words: Vec<Word> = enumerate_words(k, n).collect();
    let traces: Vec<WordTrace> = words
        .into_par_iter()
        .map(|w| {
            let tr = eval_microstate(&w, assignment)?.normalized_trace();
            let trivial = is_trivial(&w);
            let target = if trivial { Complex64::one() } else { Complex64::zero() };
            Ok(WordTrace {
                length: w.len(),
                trivial,
                trace: tr,
                deviation: (tr - target).norm(),
                word: w,
            })
        })
        .collect::<Result<_, ApproxError>>()?;
    let (worst_idx, max_deviation) =
        traces.iter().enumerate().fold(
            (0, 0.0f64),
            |(bi, bd), (i, t)| if t.deviation > bd { (i, t.deviation) } else { (bi, bd) },
        );
    Ok(MicrostateReport {
        n,
        eps,
        words_checked: traces.len(),
        trivial_words: traces.iter().filter(|t| t.trivial).count(),
        max_deviation,
        worst_word: traces[worst_idx].word.clone(),
        passed: microstate_passes(max_deviation, eps),
        words: traces,
    })
}

/// Deviation of a ratio from its target, exactly; used where floating
/// point must be avoided.
pub fn exact_ratio_deviation(r: &Ratio<u64>, trivial: bool) -> Ratio<u64> {
    if trivial {
        Ratio::one() - *r
    } else {
        *r
    }
}

/// Exact test that every ratio is 0 or 1.
pub fn ratios_are_boolean(hist: &BTreeMap<String, usize>) -> bool {
    hist.keys().all(|k| k == "0" || k == "1")
}

fn ratio_to_f64(r: &Ratio<u64>) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{enumerate_unitriangular, CentralReduction, GroupShape, QuotientElem};
    use crate::rings::ZModQ;
    use crate::words::eval_word;

    fn heis(q: u64) -> Vec<QuotientElem<ZModQ>> {
        enumerate_unitriangular(&GroupShape::heisenberg(), q, CentralReduction::Trivial, 1000).unwrap()
    }

    fn heis_gen(q: u64, i: usize, j: usize) -> QuotientElem<ZModQ> {
        QuotientElem::elementary(
            GroupShape::heisenberg(),
            i,
            j,
            ZModQ::new(q, 1).unwrap(),
            CentralReduction::Trivial,
        )
        .unwrap()
    }

    #[test]
    fn ratios() {
        let id: PermAction<QuotientElem<ZModQ>> = PermAction::Dense(Permutation::identity(6));
        assert_eq!(id.fixed_point_ratio(), Ratio::one());
        let c: PermAction<QuotientElem<ZModQ>> = PermAction::Dense(Permutation::new(vec![1, 2, 0, 3, 4, 5]).unwrap());
        assert_eq!(c.fixed_point_ratio(), Ratio::new(1, 2));
        let g = heis_gen(3, 1, 2);
        assert_eq!(PermAction::LazyLeftReg(g.clone()).fixed_point_ratio(), Ratio::zero());
        assert_eq!(
            PermAction::LazyLeftReg(g.identity_like()).fixed_point_ratio(),
            Ratio::one()
        );
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![2, 0]).is_err());
    }

    #[test]
    fn permutation_matrix_trace_matches_ratio() {
        let s = Permutation::new(vec![1, 2, 0, 3, 5, 4]).unwrap();
        let t = Permutation::new(vec![0, 2, 1, 4, 3, 5]).unwrap();
        let st = s.compose(&t).unwrap();
        let m = s.to_matrix() * t.to_matrix();
        assert!((m - st.to_matrix()).norm() < 1e-12);
        let a: PermAction<QuotientElem<ZModQ>> = PermAction::Dense(st.clone());
        let tr = DenseUnitary(st.to_matrix()).normalized_trace();
        assert!((tr - a.normalized_trace()).norm() < 1e-12);
    }

    #[test]
    fn trivial_sofic_set() {
        let e = heis_gen(3, 1, 2).identity_like();
        let phi = |_: &QuotientElem<ZModQ>| Some(PermAction::<QuotientElem<ZModQ>>::Dense(Permutation::identity(4)));
        for eps in [0.1, 0.5, 0.9] {
            assert!(sofic_check(std::slice::from_ref(&e), phi, eps).unwrap().passed);
        }
    }

    #[test]
    fn cyclic_group_regular_rep() {
        // Z/3 as the centre of the Heisenberg group over Z/3.
        let z = QuotientElem::elementary(
            GroupShape::heisenberg(),
            1,
            3,
            ZModQ::new(3, 1).unwrap(),
            CentralReduction::Trivial,
        )
        .unwrap();
        let f = vec![z.identity_like(), z.clone(), z.op(&z)];
        let index: HashMap<_, _> = f.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let phi = |g: &QuotientElem<ZModQ>| {
            dense_left_regular(&f, &index, g)
                .ok()
                .map(PermAction::<QuotientElem<ZModQ>>::Dense)
        };
        let r = sofic_check(&f, phi, 0.0).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(ratios_are_boolean(&r.pair_ratios));
        // Not a homomorphism: z and z^2 share an image.
        let bad = |g: &QuotientElem<ZModQ>| {
            let i = index[g];
            dense_left_regular(&f, &index, &f[[0, 1, 1][i]])
                .ok()
                .map(PermAction::<QuotientElem<ZModQ>>::Dense)
        };
        assert!(!sofic_check(&f, bad, 0.5).unwrap().passed);
    }

    #[test]
    fn lazy_dense_agreement_on_heisenberg() {
        let elems = heis(3);
        assert_eq!(elems.len(), 27);
        let index: HashMap<_, _> = elems.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let gens = vec![heis_gen(3, 1, 2), heis_gen(3, 2, 3)];
        let dense: Vec<PermAction<QuotientElem<ZModQ>>> = gens
            .iter()
            .map(|g| PermAction::Dense(dense_left_regular(&elems, &index, g).unwrap()))
            .collect();
        let lazy: Vec<PermAction<QuotientElem<ZModQ>>> = gens.iter().cloned().map(PermAction::LazyLeftReg).collect();
        for w in enumerate_words(2, 4) {
            let d = eval_microstate(&w, &dense).unwrap().fixed_point_ratio();
            let l = eval_microstate(&w, &lazy).unwrap().fixed_point_ratio();
            assert_eq!(d, l, "word {w}");
            let trivial = eval_word(&w, &gens).unwrap().is_identity();
            assert_eq!(l.is_one(), trivial);
        }
    }

    #[test]
    fn microstates_on_heisenberg() {
        let gens = vec![heis_gen(3, 1, 2), heis_gen(3, 2, 3)];
        let lazy: Vec<PermAction<QuotientElem<ZModQ>>> = gens.iter().cloned().map(PermAction::LazyLeftReg).collect();
        let oracle = |w: &Word| eval_word(w, &gens).unwrap().is_identity();
        let r = microstate_check(&lazy, 3, 0.0, oracle, 1_000_000).unwrap();
        assert!(r.passed);
        assert_eq!(r.words_checked, 85);
        let empty = r.word(&Word::empty()).unwrap();
        assert_eq!((empty.trace, empty.deviation), (Complex64::one(), 0.0));
        let ss: Word = "s1 s1*".parse().unwrap();
        assert_eq!(r.word(&ss).unwrap().deviation, 0.0);
        // A lying oracle is caught.
        let r = microstate_check(&lazy, 2, 0.5, |_: &Word| true, 1_000_000).unwrap();
        assert!(!r.passed);
        assert_eq!(r.max_deviation, 1.0);
        assert!(microstate_check(&lazy, 6, 0.5, oracle, 1000).is_err());
    }

    #[test]
    fn g_microstates_are_exact() {
        let gens = crate::groups::default_g_marked_set(2).unwrap();
        let (params, acts) = lef_microstates(&gens, 2, None).unwrap();
        assert_eq!(params.n, 3);
        let oracle = |w: &Word| eval_word(w, &gens).unwrap().is_identity();
        let r = microstate_check(&acts, 2, 0.0, oracle, 1_000_000).unwrap();
        assert!(r.passed && r.max_deviation == 0.0);
        assert!(r.trivial_words > 1);
    }

    #[test]
    fn pass_rule() {
        assert!(microstate_passes(0.0, 0.0));
        assert!(!microstate_passes(1e-300, 0.0));
        assert!(microstate_passes(0.09, 0.1));
        assert!(!microstate_passes(0.1, 0.1));
        assert_eq!(exact_ratio_deviation(&Ratio::new(1, 3), true), Ratio::new(2, 3));
        assert_eq!(ratio_to_f64(&Ratio::new(1, 4)), 0.25);
    }
}
