//! A condensed invariant suite over the current configuration.

use rand::seq::SliceRandom;
use rand::Rng;
use sigmaball::maps::{
    compose_forward, compose_section, coverage, grid_approximation, phi_power_forward, ChainConfig,
};
use sigmaball::model::{b_membership, k_membership, BitPoint, IndexSet, WeightedBudget, Weights};
use sigmaball::norms::SierpinskiGraph;
use sigmaball::norms::{
    disjointness_check, in_u, prime_norm, witness_point, PairVector, Verdict, TOLERANCE,
};
use sigmaball::ramsey::{
    ceil_sqrt, erdos_szekeres_check, max_homogeneous, relations_from_graph, scaling_experiment,
    EsMode, Method, Mode,
};
use sigmaball::seed::task_rng;

use crate::commands::norm_params;
use crate::config::Config;
use crate::failure::Failure;

struct Line {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn membership_chain() -> Result<Line, Failure> {
    let mut disagreements = 0;
    let mut checked = 0;
    for size in 1..=2 {
        for depth in 1..=4 {
            let index_set = IndexSet::new(size)?;
            let cells = size * depth;
            for mask in 0u32..1 << cells {
                let support = (0..cells)
                    .filter(|c| mask >> c & 1 == 1)
                    .map(|c| (c / depth, c % depth));
                let x = BitPoint::from_support(index_set, depth, support)?;
                let image = phi_power_forward(&x, &Weights::standard(depth))?;
                checked += 1;
                disagreements += usize::from(
                    k_membership(&x, &WeightedBudget::standard(depth))
                        != b_membership(&image, true),
                );
            }
        }
    }
    Ok(Line {
        name: "membership chain",
        passed: disagreements == 0,
        detail: format!("{checked} points, {disagreements} disagreements"),
    })
}

fn compose_round_trips(config: &Config) -> Result<Line, Failure> {
    let chain = ChainConfig::new(config.gamma_size, config.depth)?;
    let mut rng = task_rng(config.seed, 1);
    let mut misses = 0;
    for _ in 0..1000 {
        let raw: Vec<f64> = (0..config.gamma_size)
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let l1: f64 = raw.iter().map(|v| v.abs()).sum();
        let t: Vec<f64> = raw.iter().map(|v| v / l1.max(1.0)).collect();
        let grid = grid_approximation(&t, config.depth)?;
        let back = compose_forward(&compose_section(&grid, &chain)?, &chain)?;
        misses += usize::from(back != grid);
    }
    Ok(Line {
        name: "compose round trip",
        passed: misses == 0,
        detail: format!(
            "1000 random grid points at |Gamma|={}, d={}, {misses} misses",
            config.gamma_size, config.depth
        ),
    })
}

fn dichotomy(config: &Config) -> Result<Line, Failure> {
    let params = norm_params(config)?;
    let n = config.graph_n.min(40);
    let mut violations = 0;
    let mut pairs = 0;
    for a in 0..n {
        for b in (a + 1)..n {
            pairs += 1;
            if params.graph().contains(a, b) {
                let ok = matches!(
                    disjointness_check(a, b, &params, 200, config.seed)?,
                    Verdict::Disjoint {
                        counterexamples: 0,
                        ..
                    }
                );
                violations += usize::from(!ok);
            } else {
                let w = witness_point(a, b, &params)?;
                let ok = (prime_norm(&w, &params) - 1.0).abs() <= TOLERANCE
                    && in_u(&w, a, &params)?
                    && in_u(&w, b, &params)?;
                violations += usize::from(!ok);
            }
        }
    }
    Ok(Line {
        name: "witness dichotomy",
        passed: violations == 0,
        detail: format!("{pairs} pairs among the first {n} indices, {violations} violations"),
    })
}

fn norm_bounds(config: &Config) -> Result<Line, Failure> {
    let params = norm_params(config)?;
    let mut rng = task_rng(config.seed, 2);
    let n = config.graph_n;
    let mut failures = 0;
    for _ in 0..1000 {
        let mut coords = || -> Vec<(usize, f64)> {
            (0..rng.gen_range(0..5))
                .map(|_| (rng.gen_range(0..n), rng.gen_range(-2.0..2.0)))
                .collect()
        };
        let v = PairVector::new(coords(), coords());
        let lp = |it: Vec<f64>| {
            it.iter()
                .map(|a: &f64| a.abs().powf(config.p))
                .sum::<f64>()
                .powf(1.0 / config.p)
        };
        let base =
            lp(v.x_entries().map(|e| e.1).collect()).max(lp(v.y_entries().map(|e| e.1).collect()));
        let norm = prime_norm(&v, &params);
        failures += usize::from(!(base <= norm + TOLERANCE && norm <= 2.0 * base + TOLERANCE));
    }
    Ok(Line {
        name: "norm equivalence",
        passed: failures == 0,
        detail: format!("1000 vectors, {failures} failures"),
    })
}

fn oracles(config: &Config) -> Result<Line, Failure> {
    let mut rng = task_rng(config.seed, 3);
    let mut mismatches = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=10);
        let mut perm: Vec<f64> = (0..n).map(|v| v as f64).collect();
        perm.shuffle(&mut rng);
        let rel = relations_from_graph(&SierpinskiGraph::new(perm)?);
        for mode in [Mode::Disjoint, Mode::Meeting] {
            let sizes = [Method::Exhaustive, Method::Dp, Method::Fast]
                .into_iter()
                .map(|m| max_homogeneous(&rel, mode, m).map(|s| s.len()))
                .collect::<Result<Vec<_>, _>>()?;
            mismatches += usize::from(sizes[0] != sizes[1] || sizes[1] != sizes[2]);
        }
    }
    let es = erdos_szekeres_check(3, 3, EsMode::Exhaustive, 0, 0)?;
    Ok(Line {
        name: "homogeneous-set oracles",
        passed: mismatches == 0 && es.violations == 0,
        detail: format!(
            "500 random families, {mismatches} mismatches; ES r=s=3 violations: {}",
            es.violations
        ),
    })
}

fn square_root_bound(config: &Config) -> Result<Line, Failure> {
    let rows = scaling_experiment(&[config.graph_n], 5, config.seed)?;
    let below = rows.iter().filter(|r| r.m < ceil_sqrt(r.n)).count();
    Ok(Line {
        name: "square-root lower bound",
        passed: below == 0,
        detail: format!(
            "n={}, 5 trials, m = {:?}",
            config.graph_n,
            rows.iter().map(|r| r.m).collect::<Vec<_>>()
        ),
    })
}

pub fn run(config: &Config) -> Result<String, Failure> {
    let cov = coverage(2, 3)?;
    let mut lines = vec![Line {
        name: "coverage |Gamma|=2, d=3",
        passed: cov.is_complete(),
        detail: format!("{}/{}", cov.hits, cov.grid_size),
    }];
    lines.push(membership_chain()?);
    lines.push(compose_round_trips(config)?);
    lines.push(norm_bounds(config)?);
    lines.push(dichotomy(config)?);
    lines.push(oracles(config)?);
    lines.push(square_root_bound(config)?);
    let mut text = String::new();
    for line in &lines {
        let verdict = if line.passed { "PASS" } else { "FAIL" };
        text += &format!("{verdict} {}: {}\n", line.name, line.detail);
    }
    let failed: Vec<&str> = lines.iter().filter(|l| !l.passed).map(|l| l.name).collect();
    if failed.is_empty() {
        Ok(text)
    } else {
        print!("{text}");
        Err(Failure::Invariant(failed.join(", ")))
    }
}
