//! Words over a marked generating set.
//!
//! Two word models coexist and are never mixed: free-monoid words on the
//! symbols `s, s*` (no cancellation; used for microstate checks) and freely
//! reduced words in the free group (used for kernel balls and the marked-group
//! metric). Both share [`Word`]; only [`free_ball`] produces reduced words.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::groups::GroupElement;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WordError {
    #[error("letter s{index} is outside the alphabet of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("cannot evaluate with an empty assignment")]
    EmptyAssignment,
    #[error("alphabet sizes differ: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("cannot parse word {0:?}")]
    Parse(String),
    #[error("{count} words exceed the budget of {budget}")]
    BudgetExceeded { count: u128, budget: u128 },
}

/// A generator `s_i` or its adjoint `s_i*` (the inverse, in a group).
/// `generator` is 0-based: `s1` has `generator == 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub star: bool,
}

impl Letter {
    pub fn new(generator: usize, star: bool) -> Self {
        Letter { generator, star }
    }

    pub fn inverse(self) -> Self {
        Letter {
            generator: self.generator,
            star: !self.star,
        }
    }

    fn from_code(code: usize) -> Self {
        Letter::new(code / 2, code % 2 == 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).copied().collect())
    }

    /// Formal inverse: reversed, with every star toggled.
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[1] != w[0].inverse())
    }

    /// Free reduction.
    pub fn reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Sum of exponents of each generator (`s` counts +1, `s*` counts -1).
    pub fn exponent_sum(&self) -> i64 {
        self.0.iter().map(|l| if l.star { -1 } else { 1 }).sum()
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator).max()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|l| format!("s{}{}", l.generator + 1, if l.star { "*" } else { "" }))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromStr for Word {
    type Err = WordError;

    /// Whitespace-separated letters `s1`, `s2*`, ...; `ε` or an empty string
    /// is the empty word.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "ε" {
                continue;
            }
            let body = tok.strip_prefix('s').ok_or_else(|| WordError::Parse(s.to_string()))?;
            let (num, star) = match body.strip_suffix('*') {
                Some(n) => (n, true),
                None => (body, false),
            };
            let idx: usize = num.parse().map_err(|_| WordError::Parse(s.to_string()))?;
            if idx == 0 {
                return Err(WordError::Parse(s.to_string()));
            }
            letters.push(Letter::new(idx - 1, star));
        }
        Ok(Word(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// `sum_{i <= max_len} (2k)^i`, the number of monoid words of length at most
/// `max_len` on `k` generators and their stars; `None` on overflow.
pub fn word_count(k: usize, max_len: usize) -> Option<u128> {
    let base = 2 * k as u128;
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for i in 0..=max_len {
        total = total.checked_add(term)?;
        if i < max_len {
            term = term.checked_mul(base)?;
        }
    }
    Some(total)
}

/// Fails when more than `budget` words would be produced.
pub fn check_budget(k: usize, max_len: usize, budget: u128) -> Result<u128, WordError> {
    let count = word_count(k, max_len).unwrap_or(u128::MAX);
    if count > budget {
        return Err(WordError::BudgetExceeded { count, budget });
    }
    Ok(count)
}

/// All free-monoid words of length `<= max_len` in length-lexicographic
/// order, letters ordered `s1 < s1* < s2 < ...`.
pub fn enumerate_words(k: usize, max_len: usize) -> WordIter {
    WordIter {
        alphabet: 2 * k,
        max_len,
        next: Some(Vec::new()),
    }
}

pub struct WordIter {
    alphabet: usize,
    max_len: usize,
    next: Option<Vec<usize>>,
}

impl Iterator for WordIter {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let current = self.next.take()?;
        let word = Word(current.iter().map(|&c| Letter::from_code(c)).collect());
        // Odometer increment; roll over to the next length when exhausted.
        let mut succ = current;
        let mut pos = succ.len();
        loop {
            if pos == 0 {
                let len = succ.len() + 1;
                if len <= self.max_len && self.alphabet > 0 {
                    self.next = Some(vec![0; len]);
                }
                break;
            }
            pos -= 1;
            succ[pos] += 1;
            if succ[pos] < self.alphabet {
                self.next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(word)
    }
}

/// The ball of radius `radius` in the free group of rank `rank`: all freely
/// reduced words of length `<= radius`, in length-lexicographic order.
pub fn free_ball(rank: usize, radius: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &frontier {
            for code in 0..2 * rank {
                let l = Letter::from_code(code);
                if w.0.last() == Some(&l.inverse()) {
                    continue;
                }
                let mut letters = w.0.clone();
                letters.push(l);
                next.push(Word(letters));
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Evaluates `w` under `s_i -> gens[i]`, `s_i* -> gens[i]^-1`, multiplying
/// left to right.
pub fn eval_word<E: GroupElement>(w: &Word, gens: &[E]) -> Result<E, WordError> {
    let first = gens.first().ok_or(WordError::EmptyAssignment)?;
    let mut acc = first.identity_like();
    for l in w.letters() {
        let g = gens.get(l.generator).ok_or(WordError::IndexOutOfRange {
            index: l.generator + 1,
            size: gens.len(),
        })?;
        acc = if l.star { acc.op(&g.inverse()) } else { acc.op(g) };
    }
    Ok(acc)
}

/// Distinct elements represented by reduced words of length `<= radius`, in
/// order of first appearance along the length-lexicographic ball.
pub fn ball_elements<E: GroupElement>(gens: &[E], radius: usize) -> Result<Vec<E>, WordError> {
    let values: Vec<E> = free_ball(gens.len(), radius)
        .par_iter()
        .map(|w| eval_word(w, gens))
        .collect::<Result<_, _>>()?;
    let mut seen = std::collections::HashSet::with_capacity(values.len());
    Ok(values.into_iter().filter(|g| seen.insert(g.clone())).collect())
}

type Oracle = Arc<dyn Fn(&Word) -> bool + Send + Sync>;

/// A group presented by a surjection from the free group of rank `rank`,
/// known only through a triviality oracle for reduced words.
#[derive(Clone)]
pub struct MarkedGroup {
    name: String,
    rank: usize,
    oracle: Oracle,
}

impl fmt::Debug for MarkedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarkedGroup")
            .field("name", &self.name)
            .field("rank", &self.rank)
            .finish_non_exhaustive()
    }
}

impl MarkedGroup {
    pub fn new(name: impl Into<String>, rank: usize, oracle: impl Fn(&Word) -> bool + Send + Sync + 'static) -> Self {
        MarkedGroup {
            name: name.into(),
            rank,
            oracle: Arc::new(oracle),
        }
    }

    /// `(Z, {1})`.
    pub fn integers() -> Self {
        Self::new("Z", 1, |w| w.exponent_sum() == 0)
    }

    /// `(Z/mZ, {1})`.
    pub fn cyclic(m: i64) -> Self {
        Self::new(format!("Z/{m}"), 1, move |w| w.exponent_sum().rem_euclid(m) == 0)
    }

    /// The subgroup generated by `gens`, marked by them; triviality is decided
    /// by evaluating the word.
    pub fn from_generators<E: GroupElement + 'static>(name: impl Into<String>, gens: Vec<E>) -> Self {
        let rank = gens.len();
        Self::new(name, rank, move |w| {
            eval_word(w, &gens).map(|g| g.is_identity()).unwrap_or(false)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_trivial(&self, w: &Word) -> bool {
        (self.oracle)(w)
    }

    /// `N ∩ B(radius)`: reduced words of length `<= radius` that are trivial.
    pub fn kernel_ball(&self, radius: usize) -> Vec<Word> {
        free_ball(self.rank, radius)
            .into_par_iter()
            .filter(|w| self.is_trivial(w))
            .collect()
    }
}

/// Outcome of comparing kernel balls up to a maximal radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarkedDistance {
    /// Kernels agree up to radius `k` and differ at `k + 1`: distance `2^-k`.
    Exact { k: u32 },
    /// Kernels agree on every radius checked: distance `<= 2^-k`.
    AtMost { k: u32 },
}

impl MarkedDistance {
    pub fn exponent(&self) -> u32 {
        match *self {
            MarkedDistance::Exact { k } | MarkedDistance::AtMost { k } => k,
        }
    }

    pub fn value(&self) -> f64 {
        2f64.powi(-(self.exponent() as i32))
    }
}

/// Grigorchuk distance between two marked groups, resolved up to `k_max`.
pub fn marked_distance(a: &MarkedGroup, b: &MarkedGroup, k_max: u32) -> Result<MarkedDistance, WordError> {
    if a.rank != b.rank {
        return Err(WordError::RankMismatch(a.rank, b.rank));
    }
    // Balls are nested, so it suffices to compare one sphere at a time.
    let ball = free_ball(a.rank, k_max as usize);
    for r in 1..=k_max as usize {
        let differs = ball
            .par_iter()
            .filter(|w| w.len() == r)
            .any(|w| a.is_trivial(w) != b.is_trivial(w));
        if differs {
            return Ok(MarkedDistance::Exact { k: r as u32 - 1 });
        }
    }
    Ok(MarkedDistance::AtMost { k: k_max })
}
