//! The acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sigmaball::maps::{coverage, phi_forward, phi_power_forward, ChainConfig, MapId};
use sigmaball::model::{
    b_membership, count_vector, exclusion_certificate, k_membership, BitPoint, WeightedBudget,
    Weights,
};
use sigmaball::norms::{
    disjointness_check, in_u, lp_norm, prime_norm, witness_point, NormParams, PairVector,
    SierpinskiGraph, Verdict, TOLERANCE,
};
use sigmaball::ramsey::{
    ceil_sqrt, erdos_szekeres_check, max_homogeneous, q_report, relations_from_graph,
    scaling_experiment, EsMode, Method, Mode,
};
use sigmaball::Dyadic;

use common::{all_bit_points, perturbation_run, random_bit_point, random_pair};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn exact_surjectivity() -> Outcome {
    let mut parts = Vec::new();
    let mut passed = true;
    for depth in [3, 4] {
        match coverage(2, depth) {
            Ok(r) => {
                passed &= r.is_complete();
                parts.push(format!(
                    "d={depth}: {}/{} ({:.1}%)",
                    r.hits,
                    r.grid_size,
                    r.percent()
                ));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("d={depth}: {e}"));
            }
        }
    }
    outcome(passed, parts.join(", "))
}

fn membership_chain() -> Outcome {
    let chain_agrees = |x: &BitPoint| {
        let image = phi_power_forward(x, &Weights::standard(x.depth())).unwrap();
        k_membership(x, &WeightedBudget::standard(x.depth())) == b_membership(&image, true)
    };
    let mut checked = 0usize;
    let mut disagreements = 0usize;
    for size in 1..=3 {
        for depth in 1..=4 {
            for x in all_bit_points(size, depth) {
                checked += 1;
                disagreements += usize::from(!chain_agrees(&x));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut inside = 0usize;
    for _ in 0..100_000 {
        let x = random_bit_point(&mut rng, 8, 8, 0.3);
        inside += usize::from(k_membership(&x, &WeightedBudget::standard(8)));
        checked += 1;
        disagreements += usize::from(!chain_agrees(&x));
    }
    outcome(
        disagreements == 0,
        format!(
            "{checked} points, {disagreements} disagreements, {inside}/100000 random points in L0"
        ),
    )
}

fn certificate_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let depth = 8;
    let w = Weights::standard(depth);
    let l0 = WeightedBudget::standard(depth);
    let (mut excluded, mut failures) = (0usize, 0usize);
    while excluded < 10_000 {
        let x = random_bit_point(&mut rng, 8, depth, 0.5);
        let Some(levels) = exclusion_certificate(&x, &w).unwrap() else {
            continue;
        };
        excluded += 1;
        for _ in 0..100 {
            let mut y = random_bit_point(&mut rng, 8, depth, 0.5);
            for (g, n) in x.support() {
                y.set(g, n, true).unwrap();
            }
            let counts = count_vector(&y);
            let partial: Dyadic = levels
                .iter()
                .map(|&n| w.get(n) * counts.get(n) as i64)
                .sum();
            if partial <= Dyadic::ONE || k_membership(&y, &l0) {
                failures += 1;
            }
        }
    }
    outcome(
        failures == 0,
        format!("{excluded} excluded points x 100 extensions, {failures} failures"),
    )
}

fn norm_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut failures = 0usize;
    for p in [1.5, 2.0, 3.0] {
        let params = NormParams::with_default_levels(p, SierpinskiGraph::seeded(16, 104)).unwrap();
        let lp = |v: &PairVector| {
            let x = lp_norm(v.x_entries().map(|(_, a)| a), p).unwrap();
            let y = lp_norm(v.y_entries().map(|(_, a)| a), p).unwrap();
            x.max(y)
        };
        for _ in 0..10_000 {
            let (u, v) = (random_pair(&mut rng, 16), random_pair(&mut rng, 16));
            let (nu, nv) = (prime_norm(&u, &params), prime_norm(&v, &params));
            let base = lp(&u);
            let c: f64 = rng.gen_range(-4.0..4.0);
            let ok = base <= nu + TOLERANCE
                && nu <= 2.0 * base + TOLERANCE
                && prime_norm(&u.add(&v), &params) <= nu + nv + TOLERANCE
                && (prime_norm(&u.scaled(c), &params) - c.abs() * nu).abs() <= TOLERANCE;
            failures += usize::from(!ok);
        }
    }
    outcome(
        failures == 0,
        format!("30000 vectors over p in {{1.5, 2, 3}}, {failures} failures"),
    )
}

fn witness_dichotomy() -> Outcome {
    let (n, samples) = (100, 10_000);
    let mut failures = 0usize;
    let (mut edges, mut non_edges) = (0usize, 0usize);
    for seed in 0..10u64 {
        let params =
            NormParams::with_default_levels(2.0, SierpinskiGraph::seeded(n, 1000 + seed)).unwrap();
        let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
        let results: Vec<(bool, bool)> = pairs
            .par_iter()
            .map(|&(a, b)| {
                if params.graph().contains(a, b) {
                    let ok = matches!(
                        disjointness_check(a, b, &params, samples, seed),
                        Ok(Verdict::Disjoint {
                            counterexamples: 0,
                            ..
                        })
                    );
                    (true, ok)
                } else {
                    let w = witness_point(a, b, &params).unwrap();
                    let ok = (prime_norm(&w, &params) - 1.0).abs() <= TOLERANCE
                        && in_u(&w, a, &params).unwrap()
                        && in_u(&w, b, &params).unwrap();
                    (false, ok)
                }
            })
            .collect();
        for (edge, ok) in results {
            if edge {
                edges += 1;
            } else {
                non_edges += 1;
            }
            failures += usize::from(!ok);
        }
    }
    outcome(
        failures == 0,
        format!("n={n}, 10 seeds: {non_edges} witnesses, {edges} certified edges x {samples} samples, {failures} violations"),
    )
}

fn q_failure_at_scale() -> Outcome {
    let sizes = [100, 400, 1600, 6400];
    let rows = match scaling_experiment(&sizes, 20, 106) {
        Ok(rows) => rows,
        Err(e) => return outcome(false, e.to_string()),
    };
    let lower_bad = rows.iter().filter(|r| r.m < ceil_sqrt(r.n)).count();
    let per_size = sizes
        .iter()
        .map(|&n| {
            let of_n: Vec<_> = rows.iter().filter(|r| r.n == n).collect();
            let over = of_n.iter().filter(|r| r.m * 10 >= n).count();
            let ratio = of_n.iter().map(|r| r.m_over_sqrt_n).sum::<f64>() / of_n.len() as f64;
            format!(
                "n={n}: {over}/{} with m >= n/10, mean m/sqrt(n)={ratio:.2}",
                of_n.len()
            )
        })
        .join("; ");
    let upper_bad = rows.iter().filter(|r| r.m * 10 >= r.n).count();
    outcome(
        lower_bad + upper_bad == 0,
        format!(
            "{} trials, {lower_bad} below ceil(sqrt(n)); {per_size}",
            rows.len()
        ),
    )
}

fn oracle_agreement() -> Outcome {
    let methods = [Method::Exhaustive, Method::Dp, Method::Fast];
    let sizes_for = |perm: &[usize], methods: &[Method]| -> Vec<Vec<usize>> {
        let graph = SierpinskiGraph::new(perm.iter().map(|&v| v as f64).collect()).unwrap();
        let rel = relations_from_graph(&graph);
        [Mode::Disjoint, Mode::Meeting]
            .iter()
            .map(|&mode| {
                methods
                    .iter()
                    .map(|&m| max_homogeneous(&rel, mode, m).unwrap().len())
                    .collect()
            })
            .collect()
    };
    let mut small = 0usize;
    let mut mismatches = 0usize;
    for n in 1..=7usize {
        for perm in (0..n).permutations(n) {
            small += usize::from(n == 7);
            mismatches += sizes_for(&perm, &methods)
                .iter()
                .filter(|s| !s.iter().all_equal())
                .count();
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    for _ in 0..1000 {
        let mut perm: Vec<usize> = (0..500).collect();
        perm.shuffle(&mut rng);
        let graph = SierpinskiGraph::new(perm.iter().map(|&v| v as f64).collect()).unwrap();
        let rel = relations_from_graph(&graph);
        let dp = q_report(&rel, Method::Dp).unwrap();
        let fast = q_report(&rel, Method::Fast).unwrap();
        mismatches += usize::from(
            (dp.disjoint_size, dp.meeting_size) != (fast.disjoint_size, fast.meeting_size),
        );
    }
    let es = erdos_szekeres_check(3, 3, EsMode::Exhaustive, 0, 0).unwrap();
    outcome(
        mismatches == 0 && es.violations == 0,
        format!(
            "{small} permutations at n=7 (all n<=7 checked), 1000 at n=500 (dp vs fast), {mismatches} mismatches; \
             ES r=s=3: {} permutations, {} violations",
            es.checked, es.violations
        ),
    )
}

fn locality() -> Outcome {
    let config = ChainConfig::new(4, 5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let mut parts = Vec::new();
    let mut violations = 0usize;
    for map in [MapId::Psi, MapId::PhiPower, MapId::G, MapId::Compose] {
        let run = perturbation_run(&mut rng, map, &config, 10_000);
        violations += run.violations;
        parts.push(format!("{map}: {}/{}", run.violations, run.trials));
    }
    let depth = 12;
    let w = Weights::standard(depth);
    let mut phi_failures = 0usize;
    for _ in 0..10_000 {
        let agree = rng.gen_range(0..=depth);
        let a: Vec<bool> = (0..depth).map(|_| rng.gen()).collect();
        let mut b = a.clone();
        for bit in b.iter_mut().skip(agree) {
            *bit = rng.gen();
        }
        let gap = (phi_forward(&a, &w).unwrap() - phi_forward(&b, &w).unwrap()).abs();
        phi_failures += usize::from(gap > Dyadic::pow2_inv(agree as u32));
    }
    parts.push(format!("phi bound: {phi_failures}/10000"));
    outcome(
        violations + phi_failures == 0,
        format!("violations {}", parts.join(", ")),
    )
}

/// Criteria that cannot hold as stated. They still run and print FAIL, but do
/// not fail the process; a PASS here is reported as unexpected.
const UNATTAINABLE: [(usize, &str); 1] = [(
    6,
    "at n=100 every injection has m >= ceil(sqrt(100)) = 10 = n/10, so m < n/10 is impossible",
)];

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("exact surjectivity", exact_surjectivity),
        ("membership chain", membership_chain),
        ("certificate soundness", certificate_soundness),
        ("norm equivalence", norm_equivalence),
        ("witness dichotomy", witness_dichotomy),
        ("property (Q) failure at scale", q_failure_at_scale),
        ("oracle agreement", oracle_agreement),
        ("locality and continuity", locality),
    ];
    let (mut passed, mut failed, mut known) = (0, 0, 0);
    for (k, (name, run)) in criteria.iter().enumerate() {
        let number = k + 1;
        let start = Instant::now();
        let result = run();
        let verdict = if result.passed { "PASS" } else { "FAIL" };
        println!(
            "{verdict} criterion {number} ({name}): {} [{:.2}s]",
            result.detail,
            start.elapsed().as_secs_f64()
        );
        let reason = UNATTAINABLE
            .iter()
            .find(|(c, _)| *c == number)
            .map(|(_, r)| r);
        match (result.passed, reason) {
            (true, None) => passed += 1,
            (true, Some(_)) => {
                println!("  unexpected PASS of a criterion listed as unattainable");
                failed += 1;
            }
            (false, Some(reason)) => {
                println!("  known unattainable: {reason}");
                known += 1;
            }
            (false, None) => failed += 1,
        }
    }
    println!("acceptance: {passed} passed, {known} failed as known unattainable, {failed} failed");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
