mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sigmaball::norms::{
    default_levels, disjointness_check, grid_refutation, in_u, in_v, level_ceiling, lp_norm,
    prime_norm, witness_point, NormParams, PairVector, SierpinskiGraph, Verdict, TOLERANCE,
};

use common::random_pair;

fn params(p: f64, n: usize, seed: u64) -> NormParams {
    NormParams::with_default_levels(p, SierpinskiGraph::seeded(n, seed)).unwrap()
}

fn max_lp(v: &PairVector, p: f64) -> f64 {
    let x = lp_norm(v.x_entries().map(|(_, a)| a), p).unwrap();
    let y = lp_norm(v.y_entries().map(|(_, a)| a), p).unwrap();
    x.max(y)
}

#[test]
fn norm_axioms_and_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for p in [1.5, 2.0, 3.0] {
        let par = params(p, 12, 5);
        for _ in 0..3000 {
            let (u, v) = (random_pair(&mut rng, 12), random_pair(&mut rng, 12));
            let nu = prime_norm(&u, &par);
            let base = max_lp(&u, p);
            assert!(base <= nu + TOLERANCE && nu <= 2.0 * base + TOLERANCE);
            assert!(prime_norm(&u.add(&v), &par) <= nu + prime_norm(&v, &par) + TOLERANCE);
            for c in [-3.0, -0.5, 0.0, 0.25, 7.0] {
                let scaled = prime_norm(&u.scaled(c), &par);
                assert!((scaled - c.abs() * nu).abs() <= TOLERANCE * (1.0 + nu * c.abs()));
            }
        }
    }
}

#[test]
fn graph_symmetric_and_irreflexive() {
    for (n, seed) in [(1, 0), (2, 1), (17, 2), (200, 3)] {
        let g = SierpinskiGraph::seeded(n, seed);
        for a in 0..n {
            assert!(!g.contains(a, a));
            for b in 0..n {
                assert_eq!(g.contains(a, b), g.contains(b, a));
                let phi = g.phi_values();
                if a != b {
                    assert_eq!(g.contains(a, b), (phi[a] < phi[b]) == (a < b));
                }
            }
        }
        assert!(g.edges().all(|(a, b)| a < b && g.contains(a, b)));
    }
}

#[test]
fn levels_nest() {
    for p in [1.01, 1.5, 2.0, 3.0, 10.0] {
        let (xi1, xi2) = default_levels(p).unwrap();
        assert!(1.0 < xi1 && xi1 < xi2 && xi2 < level_ceiling(p));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let par = params(2.0, 10, 9);
    for _ in 0..5000 {
        let v = random_pair(&mut rng, 10);
        let norm = prime_norm(&v, &par);
        let v = if norm > 1.0 { v.scaled(1.0 / norm) } else { v };
        for a in 0..10 {
            if in_u(&v, a, &par).unwrap() {
                assert!(in_v(&v, a, &par).unwrap());
            }
        }
    }
}

#[test]
fn witnesses_for_every_non_edge() {
    for (p, seed) in [(1.5, 1), (2.0, 2), (3.0, 3)] {
        let par = params(p, 100, seed);
        for a in 0..100 {
            for b in 0..100 {
                if a == b || par.graph().contains(a, b) {
                    continue;
                }
                let w = witness_point(a, b, &par).unwrap();
                assert!((prime_norm(&w, &par) - 1.0).abs() <= TOLERANCE);
                assert!(in_u(&w, a, &par).unwrap() && in_u(&w, b, &par).unwrap());
            }
        }
    }
}

#[test]
fn edges_resist_grid_and_sampling() {
    for (p, seed) in [(1.5, 4), (2.0, 5), (3.0, 6)] {
        let par = params(p, 30, seed);
        for (a, b) in par.graph().edges() {
            let (in_ball, hits) = grid_refutation(a, b, &par).unwrap();
            assert!(in_ball > 0);
            assert_eq!(hits, 0);
            match disjointness_check(a, b, &par, 500, seed).unwrap() {
                Verdict::Disjoint {
                    counterexamples,
                    certificate,
                    ..
                } => {
                    assert_eq!(counterexamples, 0);
                    assert!(certificate.forced_sum > certificate.edge_bound);
                }
                other => panic!("edge ({a}, {b}) judged {other:?}"),
            }
        }
    }
}

#[test]
fn non_edges_share_grid_points() {
    let par = params(2.0, 30, 8);
    for a in 0..30 {
        for b in (a + 1)..30 {
            if !par.graph().contains(a, b) {
                assert!(grid_refutation(a, b, &par).unwrap().1 > 0);
            }
        }
    }
}

proptest! {
    #[test]
    fn unit_vectors_across_an_edge(values in proptest::collection::btree_set(-1000i32..1000, 2..12)) {
        let phi: Vec<f64> = values.into_iter().map(f64::from).collect();
        let n = phi.len();
        let par = NormParams::with_default_levels(2.0, SierpinskiGraph::new(phi).unwrap()).unwrap();
        for a in 0..n {
            for b in 0..n {
                let v = PairVector::new([(a, 1.0)], [(b, 1.0)]);
                let expected = if par.graph().contains(a, b) { 2.0 } else { 1.0 };
                prop_assert!((prime_norm(&v, &par) - expected).abs() <= TOLERANCE);
            }
        }
    }
}
