//! One pipeline per subcommand; each returns a pass flag and the JSON details.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use gal_core::approx::{
    lef_microstates, lef_to_sofic, microstate_check, microstate_passes, sofic_check, MicrostateReport, WordTrace,
};
use gal_core::groups::{
    default_g_marked_set, default_k_marked_set, kernel_witness, parse_marked_set, shift_endo, shift_preimage,
    CentralReduction, GroupElement, GroupShape, QuotientElem, Retract,
};
use gal_core::lef::{build_lef_witness, build_lef_witness_with_degree, check_lef, embed, word_degree_bound, LefParams};
use gal_core::rings::{Fp, LaurentPoly, PAdicRat, RingSpec};
use gal_core::sample;
use gal_core::twisted::{build_k_microstates, check_k_microstates, CharacterMode};
use gal_core::words::{ball_elements, check_budget, eval_word, marked_distance, MarkedDistance, MarkedGroup, Word};
use gal_core::{GElem, KElem};

use crate::{CliError, GroupArg, GroupSet};

pub(crate) struct Outcome {
    pub passed: bool,
    pub details: Value,
}

const MAX_LISTED: usize = 20;

fn to_json(x: &impl Serialize) -> Result<Value, CliError> {
    serde_json::to_value(x).map_err(CliError::input)
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn g_set(set: &GroupSet) -> Result<Vec<GElem>, CliError> {
    let p = set.p;
    match &set.marked_set {
        Some(path) => parse_marked_set(
            &read(path)?,
            &GroupShape::g0(),
            &LaurentPoly::zero(p).map_err(CliError::input)?,
            CentralReduction::NonNegativePowers,
            |s| LaurentPoly::parse(p, s),
        ),
        None => default_g_marked_set(p),
    }
    .map_err(CliError::input)
}

fn k_set(set: &GroupSet) -> Result<Vec<KElem>, CliError> {
    let p = set.p;
    match &set.marked_set {
        Some(path) => parse_marked_set(
            &read(path)?,
            &GroupShape::k0(),
            &PAdicRat::integer(p, 0).map_err(CliError::input)?,
            CentralReduction::Integers,
            |s| PAdicRat::parse(p, s),
        ),
        None => default_k_marked_set(p),
    }
    .map_err(CliError::input)
}

fn g_ball(set: &GroupSet, radius: usize, budget: u128) -> Result<(Vec<GElem>, Vec<GElem>), CliError> {
    let gens = g_set(set)?;
    check_budget(gens.len(), radius, budget).map_err(CliError::input)?;
    let ball = ball_elements(&gens, radius).map_err(CliError::input)?;
    Ok((gens, ball))
}

pub(crate) fn nonhopf(set: &GroupSet, radius: usize, budget: u128) -> Result<Outcome, CliError> {
    let (_, ball) = g_ball(set, radius, budget)?;
    let w = kernel_witness(set.p).map_err(CliError::input)?;
    let image = shift_endo(&w).map_err(CliError::input)?;
    let mut failures = Vec::new();
    for g in &ball {
        let back = shift_endo(&shift_preimage(g).map_err(CliError::input)?).map_err(CliError::input)?;
        if back != *g && failures.len() < MAX_LISTED {
            failures.push(g.to_string());
        }
    }
    let passed = !w.is_identity() && image.is_identity() && failures.is_empty();
    Ok(Outcome {
        passed,
        details: json!({
            "kernel_witness": w.to_string(),
            "witness_is_identity": w.is_identity(),
            "shift_of_witness_is_identity": image.is_identity(),
            "ball_size": ball.len(),
            "preimages_verified": ball.len() - failures.len(),
            "preimage_failures": failures,
        }),
    })
}

pub(crate) fn lef(set: &GroupSet, radius: usize, small_n: bool, budget: u128) -> Result<Outcome, CliError> {
    let (_, f) = g_ball(set, radius, budget)?;
    let witness = if small_n {
        build_lef_witness_with_degree(&f, set.p, 1)
    } else {
        build_lef_witness(&f, set.p)
    }
    .map_err(CliError::input)?;
    let report = check_lef(&f, &witness).map_err(CliError::input)?;
    Ok(Outcome {
        passed: report.passed(),
        details: to_json(&report)?,
    })
}

pub(crate) fn sofic(set: &GroupSet, radius: usize, eps: f64, small_n: bool, budget: u128) -> Result<Outcome, CliError> {
    let (_, f) = g_ball(set, radius, budget)?;
    let witness = if small_n {
        build_lef_witness_with_degree(&f, set.p, 1)
    } else {
        build_lef_witness(&f, set.p)
    }
    .map_err(CliError::input)?;
    let report = sofic_check(&f, lef_to_sofic(&witness), eps).map_err(CliError::input)?;
    let params = witness.params();
    Ok(Outcome {
        passed: report.passed,
        details: json!({
            "lef_n": params.n,
            "lef_m": params.m,
            "report": to_json(&report)?,
        }),
    })
}

/// The report without the per-word table, which can hold a million rows.
#[derive(Serialize)]
struct MicrostateSummary<'a> {
    n: usize,
    eps: f64,
    words_checked: usize,
    trivial_words: usize,
    max_deviation: f64,
    worst_word: &'a Word,
    worst: Option<&'a WordTrace>,
    failing_words: Vec<&'a WordTrace>,
    passed: bool,
}

fn summarize(r: &MicrostateReport) -> MicrostateSummary<'_> {
    MicrostateSummary {
        n: r.n,
        eps: r.eps,
        words_checked: r.words_checked,
        trivial_words: r.trivial_words,
        max_deviation: r.max_deviation,
        worst_word: &r.worst_word,
        worst: r.word(&r.worst_word),
        failing_words: r
            .words
            .iter()
            .filter(|t| !microstate_passes(t.deviation, r.eps))
            .take(MAX_LISTED)
            .collect(),
        passed: r.passed,
    }
}

pub(crate) fn microstates_g(set: &GroupSet, n: usize, eps: f64, budget: u128) -> Result<Outcome, CliError> {
    let gens = g_set(set)?;
    check_budget(gens.len(), n, budget).map_err(CliError::input)?;
    let (params, actions) = lef_microstates(&gens, n, None).map_err(CliError::input)?;
    let oracle = |w: &Word| eval_word(w, &gens).map(|g| g.is_identity()).unwrap_or(false);
    let report = microstate_check(&actions, n, eps, oracle, budget).map_err(CliError::input)?;
    Ok(Outcome {
        passed: report.passed,
        details: json!({
            "lef_n": params.n,
            "lef_m": params.m,
            "report": to_json(&summarize(&report))?,
        }),
    })
}

pub(crate) fn microstates_k(
    set: &GroupSet,
    n: usize,
    eps: f64,
    trivial: bool,
    budget: u128,
) -> Result<Outcome, CliError> {
    let s = k_set(set)?;
    let mode = if trivial {
        CharacterMode::Trivial
    } else {
        CharacterMode::Approximating
    };
    let ms = build_k_microstates::<f64>(&s, n, eps, budget, mode).map_err(CliError::input)?;
    let report = check_k_microstates(&s, &ms, n, eps, budget).map_err(CliError::input)?;
    Ok(Outcome {
        passed: report.passed,
        details: json!({
            "k": ms.k,
            "q": ms.q(),
            "character_mode": mode,
            "residues": ms.solution.residues,
            "distinct_products": ms.products,
            "report": to_json(&summarize(&report))?,
        }),
    })
}

pub(crate) fn char_approx(p: u64, k: u32, eps: f64) -> Result<Outcome, CliError> {
    let sol = gal_core::twisted::char_approx(p, k, eps).map_err(CliError::input)?;
    let worst = sol.verify();
    Ok(Outcome {
        passed: worst < eps,
        details: to_json(&sol)?,
    })
}

pub(crate) fn default_ring(group: GroupArg) -> RingSpec {
    match group {
        GroupArg::G0 => RingSpec::Laurent,
        GroupArg::K0 => RingSpec::ZInvP,
        GroupArg::Heis => RingSpec::ZMod(3),
    }
}

fn triples<R: Retract>(
    samples: usize,
    seed: u64,
    shape: &GroupShape,
    red: CentralReduction,
    mut entry: impl FnMut(&mut ChaCha8Rng) -> R,
) -> Result<(usize, Vec<String>), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors = 2 * shape.dim();
    let mut make = |r: &mut ChaCha8Rng| {
        QuotientElem::normal_form(sample::shaped(r, shape, factors, &mut entry), red).expect("reduction matches ring")
    };
    let mut failures = Vec::new();
    let mut bad = 0;
    for _ in 0..samples {
        let (g, h, k) = (make(&mut rng), make(&mut rng), make(&mut rng));
        let err = CliError::input;
        let (gh, a_gh) = g.mul_with_cocycle(&h).map_err(err)?;
        let (hk, a_hk) = h.mul_with_cocycle(&k).map_err(err)?;
        let lhs = a_gh.add(&gh.cocycle(&k).map_err(err)?);
        let rhs = a_hk.add(&g.cocycle(&hk).map_err(err)?);
        let e = g.identity_like();
        let normalized = e.cocycle(&g).map_err(err)?.is_zero() && g.cocycle(&e).map_err(err)?.is_zero();
        if lhs != rhs || !normalized {
            bad += 1;
            if failures.len() < MAX_LISTED {
                failures.push(format!("({g}, {h}, {k})"));
            }
        }
    }
    Ok((bad, failures))
}

pub(crate) fn cocycle_check(
    group: GroupArg,
    ring: &str,
    p: u64,
    samples: usize,
    seed: u64,
) -> Result<Outcome, CliError> {
    let spec: RingSpec = ring.parse().map_err(CliError::input)?;
    let shape = match group {
        GroupArg::G0 => GroupShape::g0(),
        GroupArg::K0 => GroupShape::k0(),
        GroupArg::Heis => GroupShape::heisenberg(),
    };
    let needs_prime = !matches!(spec, RingSpec::ZMod(_));
    if needs_prime && !gal_core::rings::is_prime(p) {
        return Err(CliError::Usage(format!("--p must be prime, got {p}")));
    }
    let (reduction, (bad, failures)) = match spec {
        RingSpec::Laurent => {
            let red = CentralReduction::NonNegativePowers;
            (
                red,
                triples(samples, seed, &shape, red, |r| sample::laurent(r, p, 3, 3))?,
            )
        }
        RingSpec::Cyclo(m) => {
            let red = CentralReduction::CycloWindow { len: (m / 2).max(1) };
            (red, triples(samples, seed, &shape, red, |r| sample::cyclo(r, p, m, 3))?)
        }
        RingSpec::ZInvP => {
            let red = CentralReduction::Integers;
            (red, triples(samples, seed, &shape, red, |r| sample::padic(r, p, 7, 3))?)
        }
        RingSpec::ZMod(q) => {
            let red = CentralReduction::Full;
            (red, triples(samples, seed, &shape, red, |r| sample::zmodq(r, q))?)
        }
        RingSpec::Fp => {
            let red = CentralReduction::Full;
            let entry = |r: &mut ChaCha8Rng| Fp::new(p, r.gen_range(0..p as i64)).expect("p prime");
            (red, triples(samples, seed, &shape, red, entry)?)
        }
    };
    Ok(Outcome {
        passed: bad == 0,
        details: json!({
            "reduction": to_json(&reduction)?,
            "triples": samples,
            "failed_triples": bad,
            "failures": failures,
        }),
    })
}

pub(crate) fn marked_dist(set: &GroupSet, radius: usize, budget: u128) -> Result<Outcome, CliError> {
    let gens = g_set(set)?;
    check_budget(2 * gens.len(), radius, budget).map_err(CliError::input)?;
    let n = word_degree_bound(&gens, radius).map_err(CliError::input)?;
    let params = LefParams::new(set.p, n).map_err(CliError::input)?;
    let images = gens
        .iter()
        .map(|g| embed(g, &params))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::input)?;
    let g_marked = MarkedGroup::from_generators("G", gens);
    let q_marked = MarkedGroup::from_generators(format!("G0(F_{}[xi_{}])/C", set.p, params.m), images);
    let d = marked_distance(&g_marked, &q_marked, radius as u32).map_err(CliError::input)?;
    Ok(Outcome {
        passed: d == MarkedDistance::AtMost { k: radius as u32 },
        details: json!({
            "lef_n": params.n,
            "lef_m": params.m,
            "distance": to_json(&d)?,
            "distance_value": d.value(),
        }),
    })
}
