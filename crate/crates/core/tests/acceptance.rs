//! Acceptance suite: one check per criterion, run one after another, each
//! printing a PASS/FAIL line with its tolerance and time limit. Run with
//! `cargo test -p gal-core --test acceptance`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use gal_core::approx::{
    eval_microstate, lef_microstates, lef_to_sofic, microstate_check, ratios_are_boolean, sofic_check, DenseUnitary,
    Microstate,
};
use gal_core::groups::{
    default_g_marked_set, default_k_marked_set, kernel_witness, shift_endo, shift_preimage, CentralReduction,
    GroupElement, GroupShape, QuotientElem, Retract, ShapedMatrix,
};
use gal_core::lef::{
    build_lef_witness, build_lef_witness_with_degree, check_lef, choose_degree_bound, embed, LefParams,
};
use gal_core::rings::{LaurentPoly, PAdicRat};
use gal_core::sample;
use gal_core::twisted::{
    big_phi, build_k_microstates, char_approx, check_k_microstates, dense_regular_rep, is_unitary_monomial, trace_tau,
    CharApproxSolution, Character, CharacterMode, ToyGroup, TwistedTuple,
};
use gal_core::words::{ball_elements, enumerate_words, eval_word, marked_distance, MarkedDistance, MarkedGroup, Word};

fn verdict(id: u32, name: &str, ok: bool, detail: &str, elapsed: Duration, limit: Duration) -> bool {
    let within = elapsed < limit;
    let tag = if ok && within { "PASS" } else { "FAIL" };
    println!(
        "[{tag}] criterion {id} {name}: {detail} ({:.3} s, limit {} s)",
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    ok && within
}

fn criterion_1_non_hopfian_certificate() -> bool {
    let start = Instant::now();
    let mut checked = 0;
    let mut ok = true;
    for p in [2, 3] {
        let w = kernel_witness(p).unwrap();
        ok &= !w.is_identity() && shift_endo(&w).unwrap().is_identity();
        let ball = ball_elements(&default_g_marked_set(p).unwrap(), 2).unwrap();
        for g in &ball {
            ok &= shift_endo(&shift_preimage(g).unwrap()).unwrap() == *g;
        }
        checked += ball.len();
    }
    let detail =
        format!("witness != e, psi(witness) = e, psi(preimage(g)) = g on {checked} ball elements (p = 2, 3); exact");
    verdict(1, "non-hopfian", ok, &detail, start.elapsed(), Duration::from_secs(1))
}

fn criterion_2_lef_lemma() -> bool {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [2, 3] {
        let f = ball_elements(&default_g_marked_set(p).unwrap(), 2).unwrap();
        let r = check_lef(&f, &build_lef_witness(&f, p).unwrap()).unwrap();
        ok &= r.passed();
        parts.push(format!(
            "p={p}: |F|={} n={} m={} violations={}",
            r.domain_size,
            r.n,
            r.m,
            r.violations.len()
        ));
    }
    let g = |s: &str, i, j| {
        QuotientElem::elementary(
            GroupShape::g0(),
            i,
            j,
            LaurentPoly::parse(2, s).unwrap(),
            CentralReduction::NonNegativePowers,
        )
        .unwrap()
    };
    let adversarial = vec![g("t^2", 1, 2), g("t^2", 2, 5)];
    let needed = choose_degree_bound(&adversarial).unwrap();
    let forced = check_lef(
        &adversarial,
        &build_lef_witness_with_degree(&adversarial, 2, 1).unwrap(),
    )
    .unwrap();
    ok &= needed == 3 && !forced.violations.is_empty();
    parts.push(format!(
        "control needs n={needed}, forced n=1 gives {} violation(s)",
        forced.violations.len()
    ));
    verdict(
        2,
        "LEF lemma",
        ok,
        &format!("{}; exact", parts.join("; ")),
        start.elapsed(),
        Duration::from_secs(10),
    )
}

fn criterion_3_sofic_eps_zero() -> bool {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [2, 3] {
        let f = ball_elements(&default_g_marked_set(p).unwrap(), 2).unwrap();
        let wit = build_lef_witness(&f, p).unwrap();
        let r = sofic_check(&f, lef_to_sofic(&wit), 0.0).unwrap();
        let kw = lef_to_sofic(&wit)(&kernel_witness(p).unwrap()).unwrap();
        ok &= r.passed
            && ratios_are_boolean(&r.pair_ratios)
            && ratios_are_boolean(&r.element_ratios)
            && kw.fixed_point_ratio() == num_rational::Ratio::from_integer(0);
        parts.push(format!(
            "p={p}: pair ratios {:?}, element ratios {:?}",
            r.pair_ratios, r.element_ratios
        ));
    }
    verdict(
        3,
        "sofic with eps = 0",
        ok,
        &format!("{}; exact", parts.join("; ")),
        start.elapsed(),
        Duration::from_secs(10),
    )
}

fn criterion_4_g_microstates() -> bool {
    let start = Instant::now();
    let gens = default_g_marked_set(2).unwrap();
    let (params, acts) = lef_microstates(&gens, 3, None).unwrap();
    let oracle = |w: &Word| eval_word(w, &gens).unwrap().is_identity();
    let r = microstate_check(&acts, 3, 0.0, oracle, 1_000_000).unwrap();
    let exact = r
        .words
        .iter()
        .all(|t| t.trace == Complex64::new(if t.trivial { 1.0 } else { 0.0 }, 0.0));
    let ok = r.passed && exact && r.words_checked == 4369;
    let detail = format!(
        "p=2, n=3, LEF degree {}: {} words ({} trivial), max deviation {}; exact",
        params.n, r.words_checked, r.trivial_words, r.max_deviation
    );
    verdict(
        4,
        "(0,3)-microstates for G",
        ok,
        &detail,
        start.elapsed(),
        Duration::from_secs(60),
    )
}

/// Minimal `q` (prime to `p`) admitting residues with every deviation below
/// `eps`, choosing per row the residue with the smallest worst deviation
/// (ties, up to rounding, to the smallest residue).
fn brute_force_char_approx(p: u64, k: u32, eps: f64) -> (u64, Vec<u64>, f64) {
    let pk = p.pow(k);
    for q in 2u64.. {
        if num_integer::gcd(q, p) != 1 {
            continue;
        }
        let inv = (1..q).find(|x| (x * pk) % q == 1).unwrap();
        let row = |c: u64, l: u64| {
            (1..=pk)
                .map(|j| {
                    let a = (j * inv % q) * c % q;
                    let got = Complex64::from_polar(1.0, 2.0 * PI * a as f64 / q as f64);
                    let want = Complex64::from_polar(1.0, 2.0 * PI * (j * l) as f64 / pk as f64);
                    (got - want).norm()
                })
                .fold(0.0, f64::max)
        };
        let mut residues = Vec::new();
        let mut worst: f64 = 0.0;
        for l in 1..=pk {
            let (c, d) = (0..q).map(|c| (c, row(c, l))).fold((0, f64::INFINITY), |best, cur| {
                if cur.1 < best.1 - 1e-12 {
                    cur
                } else {
                    best
                }
            });
            residues.push(c);
            worst = worst.max(d);
        }
        if worst < eps {
            return (q, residues, worst);
        }
    }
    unreachable!()
}

fn independent_worst(sol: &CharApproxSolution) -> f64 {
    let pk = sol.p.pow(sol.k);
    let q = sol.q;
    let inv = (1..q).find(|x| (x * pk) % q == 1).unwrap();
    let mut worst: f64 = 0.0;
    for (l, &c) in (1..=pk).zip(&sol.residues) {
        for j in 1..=pk {
            let a = (j * inv % q) * c % q;
            let got = Complex64::from_polar(1.0, 2.0 * PI * a as f64 / q as f64);
            let want = Complex64::from_polar(1.0, 2.0 * PI * (j * l) as f64 / pk as f64);
            worst = worst.max((got - want).norm());
        }
    }
    worst
}

fn criterion_5_character_approximation() -> bool {
    let start = Instant::now();
    let sol = char_approx(2, 1, 0.5).unwrap();
    let (bq, bres, bworst) = brute_force_char_approx(2, 1, 0.5);
    let target = 2.0 * (PI / 13.0).sin();
    let mut ok = sol.q == 13
        && sol.residues == vec![1, 0]
        && (bq, bres.clone()) == (13, vec![1, 0])
        && (sol.worst_deviation - target).abs() < 1e-12
        && (bworst - target).abs() < 1e-12;
    let mut parts = vec![format!(
        "(2,1,0.5): construction q={} {:?}, brute force q={bq} {:?}, worst {:.6}",
        sol.q, sol.residues, bres, sol.worst_deviation
    )];
    for (p, k, eps) in [(2, 2, 0.1), (3, 1, 0.2)] {
        let sol = char_approx(p, k, eps).unwrap();
        let worst = independent_worst(&sol);
        let bound = CharApproxSolution::modulus_bound(p, k, eps);
        ok &= worst < eps && sol.q <= bound && num_integer::gcd(sol.q, p) == 1;
        parts.push(format!(
            "({p},{k},{eps}): q={} <= {bound}, worst {worst:.6} < {eps}",
            sol.q
        ));
    }
    verdict(
        5,
        "character approximation",
        ok,
        &parts.join("; "),
        start.elapsed(),
        Duration::from_secs(5),
    )
}

fn criterion_6_k_microstates() -> bool {
    let start = Instant::now();
    let (p, n, eps) = (2, 3, 0.1);
    let s = default_k_marked_set(p).unwrap();
    let ms = build_k_microstates::<f64>(&s, n, eps, 1_000_000, CharacterMode::Approximating).unwrap();
    let r = check_k_microstates(&s, &ms, n, eps, 1_000_000).unwrap();
    let central = r.word(&"s1".parse().unwrap()).unwrap();
    let central2 = r.word(&"s1 s1".parse().unwrap()).unwrap();
    let sol = &ms.solution;
    let pk = sol.order() as i64;
    let e18 =
        |num: i64, e: u32| ShapedMatrix::elementary(GroupShape::k0(), 1, 8, PAdicRat::new(p, num, e).unwrap()).unwrap();
    let fractions_ok = (1..pk).all(|j| trace_tau(&big_phi::<f64>(&e18(j, sol.k), sol).unwrap()).norm() < eps);
    let one_ok = (trace_tau(&big_phi::<f64>(&e18(1, 0), sol).unwrap()) - 1.0).norm() < eps;
    let bad_ms = build_k_microstates::<f64>(&s, n, eps, 1_000_000, CharacterMode::Trivial).unwrap();
    let bad = check_k_microstates(&s, &bad_ms, n, eps, 1_000_000).unwrap();
    let ok = r.passed
        && !central.trivial
        && central.deviation < eps
        && central2.trivial
        && central2.deviation < eps
        && fractions_ok
        && one_ok
        && !bad.passed;
    let detail = format!(
        "p=2, n=3, eps=0.1: k={}, q={}, {} words, max deviation {:.6} at '{}'; |tr(s1)|={:.6}, |tr(s1 s1)-1|={:.6}; trivial-character control max deviation {:.3}",
        ms.k,
        ms.q(),
        r.words_checked,
        r.max_deviation,
        r.worst_word,
        central.deviation,
        central2.deviation,
        bad.max_deviation
    );
    verdict(
        6,
        "microstates for K",
        ok,
        &detail,
        start.elapsed(),
        Duration::from_secs(120),
    )
}

fn cocycle_ok<R: Retract>(g: &QuotientElem<R>, h: &QuotientElem<R>, k: &QuotientElem<R>) -> bool {
    let (gh, a_gh) = g.mul_with_cocycle(h).unwrap();
    let (hk, a_hk) = h.mul_with_cocycle(k).unwrap();
    let lhs = a_gh.add(&gh.cocycle(k).unwrap());
    let rhs = a_hk.add(&g.cocycle(&hk).unwrap());
    let e = g.identity_like();
    let in_kernel = a_gh.retract(g.reduction()).unwrap().is_zero();
    lhs == rhs && e.cocycle(g).unwrap().is_zero() && g.cocycle(&e).unwrap().is_zero() && in_kernel
}

fn triples<R: Retract>(n: usize, seed: u64, make: impl Fn(&mut ChaCha8Rng) -> QuotientElem<R> + Sync) -> bool {
    (0..n).into_par_iter().all(|i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let (g, h, k) = (make(&mut rng), make(&mut rng), make(&mut rng));
        cocycle_ok(&g, &h, &k)
    })
}

fn criterion_7_cocycle_identity() -> bool {
    let start = Instant::now();
    let n = 10_000;
    let g_mode = triples(n, 1, |r| {
        let m = sample::shaped(r, &GroupShape::g0(), 8, |r| sample::laurent(r, 3, 3, 3));
        QuotientElem::normal_form(m, CentralReduction::NonNegativePowers).unwrap()
    });
    let params = LefParams::new(2, 3).unwrap();
    let lef_mode = triples(n, 2, |r| {
        let m = sample::shaped(r, &GroupShape::g0(), 8, |r| sample::cyclo(r, 2, params.m, 3));
        QuotientElem::normal_form(m, params.reduction).unwrap()
    });
    let k_mode = triples(n, 3, |r| {
        let m = sample::shaped(r, &GroupShape::k0(), 10, |r| sample::padic(r, 2, 7, 3));
        QuotientElem::normal_form(m, CentralReduction::Integers).unwrap()
    });
    let ok = g_mode && lef_mode && k_mode;
    let detail =
        format!("{n} random triples each: G-mode {g_mode}, LEF-mode {lef_mode}, K-mode {k_mode}; normalized; exact");
    verdict(
        7,
        "cocycle identity",
        ok,
        &detail,
        start.elapsed(),
        Duration::from_secs(10),
    )
}

fn criterion_8_monomial_representation() -> bool {
    let start = Instant::now();
    let tol = 1e-12;
    let toy = ToyGroup::new(&GroupShape::heisenberg(), 3, 1000).unwrap();
    let family: Vec<Character> = [1, 2, 0].iter().map(|&c| Character::new(3, c)).collect();
    let gen = |i, j| {
        let b = QuotientElem::elementary(
            GroupShape::heisenberg(),
            i,
            j,
            gal_core::rings::ZModQ::new(3, 1).unwrap(),
            CentralReduction::Full,
        )
        .unwrap();
        TwistedTuple::<f64>::basis(&b, &family)
    };
    let lazy = vec![gen(1, 2), gen(2, 3)];
    let mono: Vec<_> = lazy.iter().map(|x| dense_regular_rep(x, &toy).unwrap()).collect();
    let dense: Vec<DenseUnitary> = mono.iter().map(|m| DenseUnitary(m.to_dense())).collect();
    let mut ok = mono.iter().all(|m| is_unitary_monomial(&m.to_dense(), tol));
    let mut worst: f64 = 0.0;
    let mut words = 0;
    for w in enumerate_words(2, 4) {
        let t_lazy = eval_microstate(&w, &lazy).unwrap().normalized_trace();
        let m = eval_microstate(&w, &mono).unwrap();
        let d = eval_microstate(&w, &dense).unwrap();
        ok &= is_unitary_monomial(&d.0, tol);
        worst = worst
            .max((m.normalized_trace() - t_lazy).norm())
            .max((d.normalized_trace() - t_lazy).norm());
        words += 1;
    }
    ok &= worst < tol && toy.len() == 9;
    let detail =
        format!("Heisenberg over Z/3, 3 summands, dim 27: {words} words, max |dense - lazy| = {worst:.2e} < {tol:e}");
    verdict(
        8,
        "monomial representation oracle",
        ok,
        &detail,
        start.elapsed(),
        Duration::from_secs(30),
    )
}

fn criterion_9_marked_group_metric() -> bool {
    let start = Instant::now();
    let d = marked_distance(&MarkedGroup::integers(), &MarkedGroup::cyclic(2), 3).unwrap();
    let mut ok = d == MarkedDistance::Exact { k: 1 } && d.value() == 0.5;
    let mut parts = vec![format!("d(Z, Z/2) = 2^-{} ({:?})", d.exponent(), d)];
    for p in [2, 3] {
        let gens = default_g_marked_set(p).unwrap();
        let f = ball_elements(&gens, 1).unwrap();
        let wit = build_lef_witness(&f, p).unwrap();
        let images: Vec<_> = gens.iter().map(|g| embed(g, wit.params()).unwrap()).collect();
        let g_marked = MarkedGroup::from_generators("G", gens);
        let k_marked = MarkedGroup::from_generators("K_n", images);
        let dk = marked_distance(&g_marked, &k_marked, 2).unwrap();
        ok &= dk == MarkedDistance::AtMost { k: 2 };
        parts.push(format!("p={p}: d(G, K_{}) <= 2^-{}", wit.params().n, dk.exponent()));
    }
    verdict(
        9,
        "marked-group metric",
        ok,
        &parts.join("; "),
        start.elapsed(),
        Duration::from_secs(30),
    )
}

fn main() {
    let criteria: [fn() -> bool; 9] = [
        criterion_1_non_hopfian_certificate,
        criterion_2_lef_lemma,
        criterion_3_sofic_eps_zero,
        criterion_4_g_microstates,
        criterion_5_character_approximation,
        criterion_6_k_microstates,
        criterion_7_cocycle_identity,
        criterion_8_monomial_representation,
        criterion_9_marked_group_metric,
    ];
    let mut failed = 0;
    for (i, criterion) in criteria.iter().enumerate() {
        let ok = std::panic::catch_unwind(criterion).unwrap_or_else(|_| {
            println!("[FAIL] criterion {}: panicked", i + 1);
            false
        });
        failed += usize::from(!ok);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
