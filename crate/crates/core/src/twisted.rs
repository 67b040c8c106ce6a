//! Twisted group algebras of `K1(Z/q) = K0(Z/q) / centre` and the resulting
//! microstates for `K`.
//!
//! `phi_l(g) = beta_l(pi_q(g_z)) [pi_q(g-bar)]`, where `g_z` is the corner of
//! `g` and `g-bar` its class modulo the whole centre; the product is
//! `[g][h] = beta_l(alpha(g, h)) [gh]`. The tuple `Phi = (phi_l)_l` is
//! multiplicative, and averaging the traces over `l` approximates the
//! indicator of the identity of `K` once the characters `beta_l` approximate
//! the characters of `Z[1/p]/Z` of order `p^k`.

use std::collections::{HashMap, HashSet};
use std::f64::consts::PI;

use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_traits::{Float, FloatConst, One, Zero};
use serde::Serialize;

use crate::approx::{microstate_check, ApproxError, Microstate, MicrostateReport};
use crate::groups::{
    enumerate_unitriangular, CentralReduction, GroupElement, GroupError, GroupShape, QuotientElem, ShapedMatrix,
};
use crate::rings::{mod_inverse, PAdicRat, RingError, ZModQ};
use crate::words::{check_budget, enumerate_words, eval_word, Word, WordError};

pub type KElem = QuotientElem<PAdicRat>;
/// An element of `K1(Z/q)`.
pub type BaseElem = QuotientElem<ZModQ>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TwistedError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error("epsilon must lie in (0, 2), got {0}")]
    BadEpsilon(f64),
    #[error("twisted elements belong to different summands or moduli")]
    SummandMismatch,
    #[error("expected a K0-shaped matrix")]
    NotK0Shape,
    #[error("empty generating set")]
    EmptySet,
    #[error("no modulus below {limit} separates the products")]
    NoModulus { limit: u64 },
}

/// The character `m -> exp(2 pi i c m / q)` of `Z/qZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Character {
    pub q: u64,
    pub c: u64,
}

impl Character {
    pub fn new(q: u64, c: u64) -> Self {
        Character { q, c: c % q }
    }

    /// `c * m mod q`: the phase in units of `2 pi / q`.
    pub fn exponent(&self, m: &ZModQ) -> u64 {
        crate::rings::mul_mod(self.c, m.value(), self.q)
    }

    pub fn eval<F: Float + FloatConst>(&self, m: &ZModQ) -> Complex<F> {
        debug_assert_eq!(m.modulus(), self.q);
        unit::<F>(self.exponent(m), self.q)
    }
}

/// `exp(2 pi i a / q)`.
fn unit<F: Float + FloatConst>(a: u64, q: u64) -> Complex<F> {
    let theta = F::TAU() * F::from(a).unwrap() / F::from(q).unwrap();
    Complex::from_polar(F::one(), theta)
}

fn to_c64<F: Float>(z: Complex<F>) -> Complex64 {
    Complex64::new(z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))
}

/// Characters `beta_1 .. beta_{p^k}` of `Z/qZ` with
/// `|beta_l(pi_q(j / p^k)) - exp(2 pi i j l / p^k)| < eps` for all `j, l`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharApproxSolution {
    pub p: u64,
    pub k: u32,
    pub eps: f64,
    pub q: u64,
    /// `c_l` for `l = 1 ..= p^k`.
    pub residues: Vec<u64>,
    pub worst_deviation: f64,
}

impl CharApproxSolution {
    pub fn order(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn characters(&self) -> Vec<Character> {
        self.residues.iter().map(|&c| Character::new(self.q, c)).collect()
    }

    /// The same modulus with every character trivial.
    pub fn with_trivial_characters(&self) -> Self {
        let residues = vec![0; self.residues.len()];
        CharApproxSolution {
            worst_deviation: worst_deviation(self.p, self.k, self.q, &residues),
            residues,
            ..self.clone()
        }
    }

    /// Recomputes the largest deviation over all `j, l`.
    pub fn verify(&self) -> f64 {
        worst_deviation(self.p, self.k, self.q, &self.residues)
    }

    /// `ceil(pi p^{2k} / eps)`: a modulus this large always works.
    pub fn modulus_bound(p: u64, k: u32, eps: f64) -> u64 {
        (PI * (p.pow(2 * k)) as f64 / eps).ceil() as u64
    }
}

/// `|beta_c(pi_q(j / P)) - exp(2 pi i j l / P)|`.
pub fn deviation(p_k: u64, q: u64, c: u64, j: u64, l: u64) -> f64 {
    let inv = mod_inverse(p_k % q, q).expect("q prime to p");
    let a = crate::rings::mul_mod(crate::rings::mul_mod(j % q, c, q), inv, q);
    let got: Complex64 = unit(a, q);
    let want: Complex64 = unit((j * l) % p_k, p_k);
    (got - want).norm()
}

fn row_deviation(p_k: u64, q: u64, c: u64, l: u64) -> f64 {
    (1..=p_k).map(|j| deviation(p_k, q, c, j, l)).fold(0.0, f64::max)
}

fn worst_deviation(p: u64, k: u32, q: u64, residues: &[u64]) -> f64 {
    let p_k = p.pow(k);
    residues
        .iter()
        .zip(1..)
        .map(|(&c, l)| row_deviation(p_k, q, c, l))
        .fold(0.0, f64::max)
}

/// `c_l = round(l q / P) * P mod q`, rounding halves up.
fn candidate_residues(p_k: u64, q: u64) -> Vec<u64> {
    (1..=p_k)
        .map(|l| {
            let r = (2 * l as u128 * q as u128 + p_k as u128) / (2 * p_k as u128);
            ((r * p_k as u128) % q as u128) as u64
        })
        .collect()
}

/// Smallest `q >= from`, prime to `p`, for which the rounded residues satisfy
/// every inequality.
fn search_from(p: u64, k: u32, eps: f64, from: u64) -> Result<CharApproxSolution, TwistedError> {
    if !(eps > 0.0 && eps < 2.0) {
        return Err(TwistedError::BadEpsilon(eps));
    }
    crate::rings::Fp::new(p, 0)?;
    let p_k = p.pow(k);
    let mut q = from.max(2);
    loop {
        if q.gcd(&p) == 1 {
            let residues = candidate_residues(p_k, q);
            let worst = worst_deviation(p, k, q, &residues);
            if worst < eps {
                return Ok(CharApproxSolution {
                    p,
                    k,
                    eps,
                    q,
                    residues,
                    worst_deviation: worst,
                });
            }
        }
        q += 1;
    }
}

/// Characters of a cyclic group approximating those of `Z[1/p]/Z` of order
/// `p^k` to within `eps` (`0 < eps < 2`).
pub fn char_approx(p: u64, k: u32, eps: f64) -> Result<CharApproxSolution, TwistedError> {
    search_from(p, k, eps, 2)
}

fn check_k0(g: &ShapedMatrix<PAdicRat>) -> Result<(), TwistedError> {
    if g.shape() != &GroupShape::k0() {
        return Err(TwistedError::NotK0Shape);
    }
    Ok(())
}

/// Entrywise reduction `Z[1/p] -> Z/q`, followed by the class modulo the centre.
pub fn reduce_class(g: &ShapedMatrix<PAdicRat>, q: u64) -> Result<BaseElem, TwistedError> {
    let p = g.proto().modulus();
    if q.gcd(&p) != 1 {
        return Err(RingError::NotCoprime { p, q }.into());
    }
    let m = g.map_entries(|x| x.reduce_mod_q(q).expect("q prime to p"))?;
    Ok(QuotientElem::normal_form(m, CentralReduction::Full)?)
}

/// `phase * [base]` in the twisted group algebra of `chi`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistedElem<F> {
    pub phase: Complex<F>,
    pub base: BaseElem,
    pub chi: Character,
}

impl<F: Float + FloatConst> TwistedElem<F> {
    pub fn basis(base: BaseElem, chi: Character) -> Self {
        TwistedElem {
            phase: Complex::one(),
            base,
            chi,
        }
    }

    pub fn one_like(&self) -> Self {
        Self::basis(self.base.identity_like(), self.chi)
    }

    /// `[g]* = conj(beta(alpha(g, g^-1))) [g^-1]`, so that `x x* = 1`.
    pub fn star(&self) -> Self {
        let inv = self.base.inverse();
        let a = self.base.cocycle(&inv).expect("same group");
        TwistedElem {
            phase: (self.phase * self.chi.eval::<F>(&a)).conj(),
            base: inv,
            chi: self.chi,
        }
    }
}

/// `phi_l(g) = beta_l(pi_q(corner of g)) [class of pi_q(g)]`.
pub fn phi_l<F: Float + FloatConst>(
    g: &ShapedMatrix<PAdicRat>,
    chi: Character,
) -> Result<TwistedElem<F>, TwistedError> {
    check_k0(g)?;
    let z = g.corner().reduce_mod_q(chi.q)?;
    Ok(TwistedElem {
        phase: chi.eval(&z),
        base: reduce_class(g, chi.q)?,
        chi,
    })
}

/// `(x [g]) (y [h]) = x y beta(alpha(g, h)) [gh]`.
pub fn twisted_mul<F: Float + FloatConst>(
    x: &TwistedElem<F>,
    y: &TwistedElem<F>,
) -> Result<TwistedElem<F>, TwistedError> {
    if x.chi != y.chi {
        return Err(TwistedError::SummandMismatch);
    }
    let a = x.base.cocycle(&y.base)?;
    Ok(TwistedElem {
        phase: x.phase * y.phase * x.chi.eval(&a),
        base: x.base.mul(&y.base)?,
        chi: x.chi,
    })
}

/// One twisted element per character: an element of the direct sum.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistedTuple<F> {
    pub parts: Vec<TwistedElem<F>>,
}

impl<F: Float + FloatConst> TwistedTuple<F> {
    pub fn basis(base: &BaseElem, family: &[Character]) -> Self {
        TwistedTuple {
            parts: family
                .iter()
                .map(|&chi| TwistedElem::basis(base.clone(), chi))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, TwistedError> {
        if self.parts.len() != other.parts.len() {
            return Err(TwistedError::SummandMismatch);
        }
        let parts = self
            .parts
            .iter()
            .zip(&other.parts)
            .map(|(a, b)| twisted_mul(a, b))
            .collect::<Result<_, _>>()?;
        Ok(TwistedTuple { parts })
    }

    pub fn star(&self) -> Self {
        TwistedTuple {
            parts: self.parts.iter().map(TwistedElem::star).collect(),
        }
    }
}

/// `Phi(g) = (phi_l(g))_l` for the characters of `sol`.
pub fn big_phi<F: Float + FloatConst>(
    g: &ShapedMatrix<PAdicRat>,
    sol: &CharApproxSolution,
) -> Result<TwistedTuple<F>, TwistedError> {
    let parts = sol
        .characters()
        .into_iter()
        .map(|chi| phi_l(g, chi))
        .collect::<Result<_, _>>()?;
    Ok(TwistedTuple { parts })
}

/// `tau(x) = (1/P) sum_l phase_l [base_l = e]`.
pub fn trace_tau<F: Float + FloatConst>(x: &TwistedTuple<F>) -> Complex<F> {
    if x.parts.is_empty() {
        return Complex::one();
    }
    let sum = x
        .parts
        .iter()
        .filter(|e| e.base.is_identity())
        .fold(Complex::<F>::zero(), |acc, e| acc + e.phase);
    sum / F::from(x.parts.len()).unwrap()
}

impl<F: Float + FloatConst + Send + Sync> Microstate for TwistedTuple<F> {
    fn compose(&self, other: &Self) -> Result<Self, ApproxError> {
        self.mul(other)
            .map_err(|_| ApproxError::DimensionMismatch(self.parts.len(), other.parts.len()))
    }

    fn adjoint(&self) -> Self {
        self.star()
    }

    fn identity_like(&self) -> Self {
        TwistedTuple {
            parts: self.parts.iter().map(TwistedElem::one_like).collect(),
        }
    }

    fn normalized_trace(&self) -> Complex64 {
        to_c64(trace_tau(self))
    }
}

/// `M e_i = phases[i] e_{perm[i]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialMatrix<F> {
    perm: Vec<usize>,
    phases: Vec<Complex<F>>,
}

impl<F: Float + FloatConst> MonomialMatrix<F> {
    pub fn identity(dim: usize) -> Self {
        MonomialMatrix {
            perm: (0..dim).collect(),
            phases: vec![Complex::one(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ApproxError> {
        if self.dim() != other.dim() {
            return Err(ApproxError::DimensionMismatch(self.dim(), other.dim()));
        }
        let (perm, phases) = (0..self.dim())
            .map(|i| {
                let j = other.perm[i];
                (self.perm[j], self.phases[j] * other.phases[i])
            })
            .unzip();
        Ok(MonomialMatrix { perm, phases })
    }

    pub fn adjoint(&self) -> Self {
        let mut perm = vec![0; self.dim()];
        let mut phases = vec![Complex::zero(); self.dim()];
        for (i, (&j, z)) in self.perm.iter().zip(&self.phases).enumerate() {
            perm[j] = i;
            phases[j] = z.conj();
        }
        MonomialMatrix { perm, phases }
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        let mut m = nalgebra::DMatrix::zeros(self.dim(), self.dim());
        for (i, (&j, z)) in self.perm.iter().zip(&self.phases).enumerate() {
            m[(j, i)] = to_c64(*z);
        }
        m
    }
}

impl<F: Float + FloatConst + Send + Sync> Microstate for MonomialMatrix<F> {
    fn compose(&self, other: &Self) -> Result<Self, ApproxError> {
        self.mul(other)
    }

    fn adjoint(&self) -> Self {
        MonomialMatrix::adjoint(self)
    }

    fn identity_like(&self) -> Self {
        Self::identity(self.dim())
    }

    fn normalized_trace(&self) -> Complex64 {
        if self.dim() == 0 {
            return Complex64::one();
        }
        let sum = self
            .perm
            .iter()
            .zip(&self.phases)
            .enumerate()
            .filter(|(i, (j, _))| i == *j)
            .fold(Complex64::zero(), |acc, (_, (_, z))| acc + to_c64(*z));
        sum / self.dim() as f64
    }
}

/// Checks that a dense matrix is monomial with unit-modulus entries and
/// unitary, to within `tol`.
pub fn is_unitary_monomial(m: &nalgebra::DMatrix<Complex64>, tol: f64) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let lines_ok = |line: Vec<Complex64>| {
        let big: Vec<&Complex64> = line.iter().filter(|z| z.norm() > tol).collect();
        big.len() == 1 && (big[0].norm() - 1.0).abs() < tol
    };
    let rows_ok = (0..m.nrows()).all(|r| lines_ok(m.row(r).iter().copied().collect()));
    let cols_ok = (0..m.ncols()).all(|c| lines_ok(m.column(c).iter().copied().collect()));
    let id = nalgebra::DMatrix::<Complex64>::identity(m.nrows(), m.ncols());
    rows_ok && cols_ok && (m.adjoint() * m - id).norm() < tol * m.nrows() as f64
}

/// A small group of the form `K1(Z/q)` on some unitriangular shape, fully
/// enumerated.
#[derive(Debug, Clone)]
pub struct ToyGroup {
    pub elements: Vec<BaseElem>,
    index: HashMap<BaseElem, usize>,
}

impl ToyGroup {
    pub fn new(shape: &GroupShape, q: u64, budget: u128) -> Result<Self, TwistedError> {
        let elements = enumerate_unitriangular(shape, q, CentralReduction::Full, budget)?;
        let index = elements.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        Ok(ToyGroup { elements, index })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, g: &BaseElem) -> Option<usize> {
        self.index.get(g).copied()
    }
}

/// The representation on `l^2(group) ⊗ C^P`: summand `j` acts on
/// `delta_h ⊗ delta_j` by `phase_j beta_j(alpha(g_j, h)) delta_{g_j h} ⊗ delta_j`.
pub fn dense_regular_rep<F: Float + FloatConst>(
    x: &TwistedTuple<F>,
    toy: &ToyGroup,
) -> Result<MonomialMatrix<F>, TwistedError> {
    let width = x.parts.len();
    let dim = toy.len() * width;
    let mut perm = vec![0; dim];
    let mut phases = vec![Complex::zero(); dim];
    for (j, part) in x.parts.iter().enumerate() {
        for (hi, h) in toy.elements.iter().enumerate() {
            let gh = part.base.mul(h)?;
            let target = toy
                .index_of(&gh)
                .ok_or_else(|| ApproxError::NotInGroup(gh.to_string()))?;
            let a = part.base.cocycle(h)?;
            perm[hi * width + j] = target * width + j;
            phases[hi * width + j] = part.phase * part.chi.eval(&a);
        }
    }
    Ok(MonomialMatrix { perm, phases })
}

/// How the characters of a K microstate are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CharacterMode {
    Approximating,
    /// Every `beta_l` trivial; a designed failure.
    Trivial,
}

#[derive(Debug, Clone)]
pub struct KMicrostates<F> {
    /// Largest power of `p` in a corner of a product of length `<= n`.
    pub k: u32,
    pub solution: CharApproxSolution,
    pub products: usize,
    pub assignment: Vec<TwistedTuple<F>>,
}

impl<F> KMicrostates<F> {
    pub fn q(&self) -> u64 {
        self.solution.q
    }
}

/// Distinct products of length `<= n` of the lifts of `s` and their inverses.
fn lift_products(s: &[KElem], n: usize, budget: u128) -> Result<Vec<ShapedMatrix<PAdicRat>>, TwistedError> {
    check_budget(s.len(), n, budget)?;
    let lifts: Vec<ShapedMatrix<PAdicRat>> = s.iter().map(|g| g.lift().clone()).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for w in enumerate_words(s.len(), n) {
        let g = eval_word(&w, &lifts)?;
        if seen.insert(g.clone()) {
            out.push(g);
        }
    }
    Ok(out)
}

fn separates(products: &[ShapedMatrix<PAdicRat>], q: u64) -> Result<bool, TwistedError> {
    let exact: HashSet<QuotientElem<PAdicRat>> = products
        .iter()
        .map(|g| QuotientElem::normal_form(g.clone(), CentralReduction::Full))
        .collect::<Result<_, _>>()?;
    let reduced: HashSet<BaseElem> = products.iter().map(|g| reduce_class(g, q)).collect::<Result<_, _>>()?;
    Ok(exact.len() == reduced.len())
}

const MODULUS_LIMIT: u64 = 1 << 24;

/// Microstates `s -> Phi(lift(s))` for words of length `<= n`: `k` from the
/// corners of all products, `q` from [`char_approx`], enlarged until reduction
/// mod `q` separates the classes of the products modulo the centre.
pub fn build_k_microstates<F: Float + FloatConst>(
    s: &[KElem],
    n: usize,
    eps: f64,
    budget: u128,
    mode: CharacterMode,
) -> Result<KMicrostates<F>, TwistedError> {
    let first = s.first().ok_or(TwistedError::EmptySet)?;
    let p = first.lift().proto().modulus();
    for g in s {
        check_k0(g.lift())?;
    }
    let products = lift_products(s, n, budget)?;
    let k = products
        .iter()
        .map(|g| g.corner().denominator_exponent())
        .max()
        .unwrap_or(0);
    let mut solution = char_approx(p, k, eps)?;
    while !separates(&products, solution.q)? {
        if solution.q >= MODULUS_LIMIT {
            return Err(TwistedError::NoModulus { limit: MODULUS_LIMIT });
        }
        solution = search_from(p, k, eps, solution.q + 1)?;
    }
    if mode == CharacterMode::Trivial {
        solution = solution.with_trivial_characters();
    }
    let assignment = s
        .iter()
        .map(|g| big_phi(g.lift(), &solution))
        .collect::<Result<_, _>>()?;
    Ok(KMicrostates {
        k,
        solution,
        products: products.len(),
        assignment,
    })
}

/// Word-trace check of K microstates against the normal-form oracle of `K`.
pub fn check_k_microstates<F: Float + FloatConst + Send + Sync>(
    s: &[KElem],
    ms: &KMicrostates<F>,
    n: usize,
    eps: f64,
    budget: u128,
) -> Result<MicrostateReport, TwistedError> {
    let oracle = |w: &Word| eval_word(w, s).map(|g| g.is_identity()).unwrap_or(false);
    Ok(microstate_check(&ms.assignment, n, eps, oracle, budget)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::default_k_marked_set;
    use crate::rings::RingElem;

    fn kmat(p: u64, i: usize, j: usize, s: &str) -> ShapedMatrix<PAdicRat> {
        ShapedMatrix::elementary(GroupShape::k0(), i, j, PAdicRat::parse(p, s).unwrap()).unwrap()
    }

    fn kelem(p: u64, i: usize, j: usize, s: &str) -> KElem {
        QuotientElem::normal_form(kmat(p, i, j, s), CentralReduction::Integers).unwrap()
    }

    #[test]
    fn characters_are_homomorphisms() {
        let chi = Character::new(13, 5);
        for a in 0..13 {
            for b in 0..13 {
                let (x, y) = (ZModQ::new(13, a).unwrap(), ZModQ::new(13, b).unwrap());
                let lhs: Complex64 = chi.eval(&(&x + &y));
                let rhs: Complex64 = chi.eval::<f64>(&x) * chi.eval::<f64>(&y);
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn geometric_sums() {
        for p_k in [2u64, 4, 3, 9] {
            for j in 0..3 * p_k {
                let s: Complex64 = (1..=p_k).map(|l| unit::<f64>((j * l) % p_k, p_k)).sum::<Complex64>() / p_k as f64;
                let want = if j % p_k == 0 { 1.0 } else { 0.0 };
                assert!((s - Complex64::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn small_char_approx() {
        let sol = char_approx(2, 1, 0.5).unwrap();
        assert_eq!((sol.q, sol.residues.clone()), (13, vec![1, 0]));
        assert!((sol.worst_deviation - 2.0 * (PI / 13.0).sin()).abs() < 1e-12);
        assert_eq!(sol.verify(), sol.worst_deviation);
        // The last row is the trivial character.
        for (p, k, eps) in [(2, 2, 0.1), (3, 1, 0.2), (5, 1, 0.3)] {
            let sol = char_approx(p, k, eps).unwrap();
            assert_eq!(*sol.residues.last().unwrap(), 0);
            assert!(sol.verify() < eps);
            assert!(sol.q <= CharApproxSolution::modulus_bound(p, k, eps));
            assert_eq!(sol.q.gcd(&p), 1);
        }
        assert!(char_approx(2, 1, 0.0).is_err());
        assert!(char_approx(2, 1, 2.0).is_err());
    }

    #[test]
    fn phi_examples() {
        let sol = char_approx(2, 1, 0.5).unwrap();
        let chi = sol.characters()[0];
        let x: TwistedElem<f64> = phi_l(&kmat(2, 1, 8, "1/2"), chi).unwrap();
        assert!(x.base.is_identity());
        assert!((x.phase - unit::<f64>(7, 13)).norm() < 1e-12);
        let y: TwistedElem<f64> = phi_l(&kmat(2, 1, 2, "1"), chi).unwrap();
        assert_eq!(y.phase, Complex64::one());
        assert_eq!(y.base.lift().entry(0, 1), &ZModQ::new(13, 1).unwrap());
        let e: TwistedElem<f64> = phi_l(&kmat(2, 1, 2, "0"), chi).unwrap();
        assert!(e.base.is_identity() && e.phase == Complex64::one());
        let bad = Character::new(4, 1);
        assert!(phi_l::<f64>(&kmat(2, 1, 2, "1"), bad).is_err());
    }

    #[test]
    fn phi_is_multiplicative_and_star_preserving() {
        let sol = char_approx(2, 2, 0.1).unwrap();
        let mats = [
            kmat(2, 1, 2, "3/4").mul(&kmat(2, 2, 5, "1/2")).unwrap(),
            kmat(2, 5, 8, "5").mul(&kmat(2, 1, 8, "1/4")).unwrap(),
            kmat(2, 2, 3, "1").mul(&kmat(2, 1, 4, "-3/2")).unwrap(),
            kmat(2, 3, 6, "1/2").mul(&kmat(2, 6, 8, "7/4")).unwrap(),
        ];
        let close = |a: &TwistedTuple<f64>, b: &TwistedTuple<f64>| {
            a.parts
                .iter()
                .zip(&b.parts)
                .all(|(x, y)| x.base == y.base && (x.phase - y.phase).norm() < 1e-12)
        };
        for g in &mats {
            for h in &mats {
                let lhs = big_phi::<f64>(g, &sol)
                    .unwrap()
                    .mul(&big_phi(h, &sol).unwrap())
                    .unwrap();
                let rhs = big_phi::<f64>(&g.mul(h).unwrap(), &sol).unwrap();
                assert!(close(&lhs, &rhs));
            }
            let star = big_phi::<f64>(g, &sol).unwrap().star();
            assert!(close(&star, &big_phi(&g.inverse(), &sol).unwrap()));
        }
    }

    #[test]
    fn twisted_identity_and_associativity() {
        let chi = Character::new(7, 3);
        let b = |i, j, v| {
            QuotientElem::elementary(
                GroupShape::k0(),
                i,
                j,
                ZModQ::new(7, v).unwrap(),
                CentralReduction::Full,
            )
            .unwrap()
        };
        let x: TwistedElem<f64> = TwistedElem {
            phase: unit(2, 7),
            base: b(1, 2, 3),
            chi,
        };
        let y: TwistedElem<f64> = TwistedElem::basis(b(2, 8, 5), chi);
        let z: TwistedElem<f64> = TwistedElem::basis(b(2, 5, 1), chi);
        let e = x.one_like();
        assert_eq!(twisted_mul(&x, &e).unwrap(), x);
        assert_eq!(twisted_mul(&e, &x).unwrap(), x);
        let l = twisted_mul(&twisted_mul(&x, &y).unwrap(), &z).unwrap();
        let r = twisted_mul(&x, &twisted_mul(&y, &z).unwrap()).unwrap();
        assert_eq!(l.base, r.base);
        assert!((l.phase - r.phase).norm() < 1e-12);
        let xx = twisted_mul(&x, &x.star()).unwrap();
        assert!(xx.base.is_identity() && (xx.phase - Complex64::one()).norm() < 1e-12);
        let other = TwistedElem::<f64>::basis(b(1, 2, 1), Character::new(7, 1));
        assert_eq!(twisted_mul(&x, &other), Err(TwistedError::SummandMismatch));
    }

    #[test]
    fn central_traces() {
        let sol = char_approx(2, 2, 0.1).unwrap();
        let id: TwistedTuple<f64> = big_phi(&kmat(2, 1, 2, "0"), &sol).unwrap();
        assert_eq!(trace_tau(&id), Complex64::one());
        for j in 1..4 {
            let t = trace_tau(&big_phi::<f64>(&kmat(2, 1, 8, &format!("{j}/4")), &sol).unwrap());
            assert!(t.norm() < 0.1, "j = {j}: {t}");
        }
        let t = trace_tau(&big_phi::<f64>(&kmat(2, 1, 8, "1"), &sol).unwrap());
        assert!((t - 1.0).norm() < 0.1);
    }

    fn toy_family() -> Vec<Character> {
        vec![Character::new(3, 1), Character::new(3, 2), Character::new(3, 0)]
    }

    #[test]
    fn monomial_rep_of_toy() {
        let toy = ToyGroup::new(&GroupShape::heisenberg(), 3, 1000).unwrap();
        assert_eq!(toy.len(), 9);
        let fam = toy_family();
        let id = TwistedTuple::<f64>::basis(&toy.elements[0], &fam);
        let m = dense_regular_rep(&id, &toy).unwrap();
        assert_eq!(m, MonomialMatrix::identity(27));
        for g in &toy.elements {
            let x = TwistedTuple::<f64>::basis(g, &fam);
            let d = dense_regular_rep(&x, &toy).unwrap();
            assert!(is_unitary_monomial(&d.to_dense(), 1e-12));
            let tr = Microstate::normalized_trace(&d);
            assert!((tr - to_c64(trace_tau(&x))).norm() < 1e-12);
            let dd = d.to_dense();
            assert!((dd.trace() / 27.0 - tr).norm() < 1e-12);
            assert!((dense_regular_rep(&x.star(), &toy).unwrap().to_dense() - dd.adjoint()).norm() < 1e-12);
        }
        assert!(!is_unitary_monomial(
            &(MonomialMatrix::<f64>::identity(3).to_dense() * Complex64::new(2.0, 0.0)),
            1e-12
        ));
    }

    #[test]
    fn k_microstates_single_central_generator() {
        let s = vec![kelem(2, 1, 8, "1/2")];
        let ms = build_k_microstates::<f64>(&s, 2, 0.5, 1000, CharacterMode::Approximating).unwrap();
        assert_eq!((ms.k, ms.q()), (1, 13));
        let r = check_k_microstates(&s, &ms, 2, 0.5, 1000).unwrap();
        assert!(r.passed, "{r:?}");
        let ss = r.word(&"s1 s1".parse().unwrap()).unwrap();
        assert!(ss.trivial && ss.deviation < 0.5);
        assert!(!r.word(&"s1".parse().unwrap()).unwrap().trivial);
        let bad = build_k_microstates::<f64>(&s, 2, 0.5, 1000, CharacterMode::Trivial).unwrap();
        assert!(!check_k_microstates(&s, &bad, 2, 0.5, 1000).unwrap().passed);
    }

    #[test]
    fn k_microstates_identity_set() {
        let s = vec![kelem(3, 1, 2, "0")];
        let ms = build_k_microstates::<f64>(&s, 2, 0.3, 1000, CharacterMode::Approximating).unwrap();
        let r = check_k_microstates(&s, &ms, 2, 0.3, 1000).unwrap();
        assert!(r.words.iter().all(|t| t.trace == Complex64::one()));
    }

    #[test]
    fn k_microstates_default_set_small() {
        let s = default_k_marked_set(2).unwrap();
        let ms = build_k_microstates::<f64>(&s, 2, 0.2, 1_000_000, CharacterMode::Approximating).unwrap();
        let r = check_k_microstates(&s, &ms, 2, 0.2, 1_000_000).unwrap();
        assert!(r.passed, "max {} at {}", r.max_deviation, r.worst_word);
        assert!(s[0].lift().corner().denominator_exponent() == 1 && !s[0].lift().corner().is_zero());
        assert!(s.iter().all(|g| !g.is_identity()));
    }
}
