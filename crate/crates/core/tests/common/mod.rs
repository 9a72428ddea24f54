#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use sigmaball::maps::{
    compose_forward, g_forward, locality_report, phi_power_forward, psi_forward, ChainConfig,
    InputCoord, MapId, OutputCoord, SourcePoint,
};
use sigmaball::model::{
    BitPoint, CountPredicate, CountVector, GridVector, IndexSet, L1Element, SigmaSet, Weights,
};
use sigmaball::norms::PairVector;
use sigmaball::Dyadic;

/// Bits set independently with a per-point density drawn from `0..max_density`,
/// so samples land on both sides of the `Σ r_n N_n ≤ 1` boundary.
pub fn random_bit_point<R: Rng>(
    rng: &mut R,
    size: usize,
    depth: usize,
    max_density: f64,
) -> BitPoint {
    let density = rng.gen_range(0.0..max_density);
    let index_set = IndexSet::new(size).unwrap();
    let support: Vec<(usize, usize)> = (0..size)
        .flat_map(|g| (0..depth).map(move |n| (g, n)))
        .filter(|_| rng.gen_bool(density))
        .collect();
    BitPoint::from_support(index_set, depth, support).unwrap()
}

/// Every point of `{0,1}^{size × depth}`.
pub fn all_bit_points(size: usize, depth: usize) -> impl Iterator<Item = BitPoint> {
    let cells = size * depth;
    let index_set = IndexSet::new(size).unwrap();
    (0u64..1 << cells).map(move |mask| {
        let support = (0..cells)
            .filter(|c| mask >> c & 1 == 1)
            .map(|c| (c / depth, c % depth));
        BitPoint::from_support(index_set, depth, support).unwrap()
    })
}

pub fn random_source<R: Rng>(rng: &mut R, config: &ChainConfig) -> SourcePoint {
    let doubled = config.doubled();
    let fill = rng.gen_range(0.0..1.0);
    let members: Vec<Option<usize>> = (0..config.source_len())
        .map(|_| rng.gen_bool(fill).then(|| rng.gen_range(0..doubled.size())))
        .collect();
    SourcePoint::from_members(doubled, &members).unwrap()
}

pub fn random_pair<R: Rng>(rng: &mut R, n: usize) -> PairVector {
    let k = rng.gen_range(0..6);
    let x: Vec<(usize, f64)> = (0..k)
        .map(|_| (rng.gen_range(0..n + 3), rng.gen_range(-2.0..2.0)))
        .collect();
    let k = rng.gen_range(0..6);
    let y: Vec<(usize, f64)> = (0..k)
        .map(|_| (rng.gen_range(0..n + 3), rng.gen_range(-2.0..2.0)))
        .collect();
    PairVector::new(x, y)
}

/// A random grid point of `B(Δ)` (or `B⁺`) with denominator `2^exp`, no `±1` coordinate.
pub fn random_grid<R: Rng>(
    rng: &mut R,
    index_set: IndexSet,
    exp: u32,
    positive: bool,
) -> GridVector {
    let unit = 1i128 << exp;
    let mut budget = rng.gen_range(0..=unit);
    let mut coords = Vec::new();
    let mut order: Vec<usize> = (0..index_set.size()).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), rng);
    for g in order {
        let k = rng.gen_range(0..=budget.min(unit - 1));
        budget -= k;
        let signed = if !positive && rng.gen_bool(0.5) {
            -k
        } else {
            k
        };
        coords.push((g, Dyadic::new(signed, exp).unwrap()));
    }
    GridVector::new(index_set, coords).unwrap()
}

/// A random point of `L₁` for the chain configuration.
pub fn random_l1<R: Rng>(
    rng: &mut R,
    config: &ChainConfig,
    z_members: &[CountVector],
) -> L1Element {
    let z = z_members[rng.gen_range(0..z_members.len())].clone();
    let doubled = config.doubled();
    let mut e = L1Element::empty(doubled, z, config.z()).unwrap();
    for m in 0..config.depth() {
        for cap in 1..=config.z().level_bound(m) as usize {
            let size = rng.gen_range(0..=cap.min(doubled.size()));
            let members: Vec<usize> = (0..size)
                .map(|_| rng.gen_range(0..doubled.size()))
                .collect();
            e.set_factor(m, cap, SigmaSet::new(doubled, cap, members).unwrap())
                .unwrap();
        }
    }
    e
}

/// Outcome counts of a perturbation run.
#[derive(Debug, Default)]
pub struct Perturbations {
    pub trials: usize,
    pub violations: usize,
}

/// Runs `trials` perturbations of `map`, each changing only input coordinates
/// outside the declared dependency set of a random output coordinate, and
/// counts how often that output coordinate moved.
pub fn perturbation_run<R: Rng>(
    rng: &mut R,
    map: MapId,
    config: &ChainConfig,
    trials: usize,
) -> Perturbations {
    let doubled = config.doubled();
    let z_members = config.z().enumerate(usize::MAX).unwrap();
    let weights: &Weights = config.weights();
    let mut out = Perturbations::default();
    while out.trials < trials {
        match map {
            MapId::Psi => {
                let x = random_grid(rng, doubled, config.depth() as u32, true);
                let g = rng.gen_range(0..config.gamma_size());
                let deps = locality_report(map, OutputCoord::Index(g), config).unwrap();
                let j = rng.gen_range(0..doubled.size());
                if deps.contains(&InputCoord::Grid(j)) {
                    continue;
                }
                let slack = Dyadic::ONE - x.l1_norm() + x.get(j);
                let k = rng.gen_range(0..=slack.scaled_numerator(config.depth() as u32).unwrap());
                let mut y = x.clone();
                y.set(j, Dyadic::new(k, config.depth() as u32).unwrap())
                    .unwrap();
                let before = psi_forward(&x).unwrap().get(g);
                let after = psi_forward(&y).unwrap().get(g);
                out.trials += 1;
                out.violations += usize::from(before != after);
            }
            MapId::PhiPower => {
                let x = random_bit_point(rng, doubled.size(), config.depth(), 1.0);
                let x = BitPoint::from_support(doubled, config.depth(), x.support()).unwrap();
                let i = rng.gen_range(0..doubled.size());
                let deps = locality_report(map, OutputCoord::Index(i), config).unwrap();
                let (j, n) = (
                    rng.gen_range(0..doubled.size()),
                    rng.gen_range(0..config.depth()),
                );
                if deps.contains(&InputCoord::Bit { index: j, level: n }) {
                    continue;
                }
                let mut y = x.clone();
                y.set(j, n, !x.bit(j, n)).unwrap();
                let before = phi_power_forward(&x, weights).unwrap().get(i);
                let after = phi_power_forward(&y, weights).unwrap().get(i);
                out.trials += 1;
                out.violations += usize::from(before != after);
            }
            MapId::G => {
                let e = random_l1(rng, config, &z_members);
                let (g, m) = (
                    rng.gen_range(0..doubled.size()),
                    rng.gen_range(0..config.depth()),
                );
                let deps =
                    locality_report(map, OutputCoord::Bit { index: g, level: m }, config).unwrap();
                let mut f = e.clone();
                let changed: BTreeSet<InputCoord> = if rng.gen_bool(0.3) {
                    let z2 = z_members[rng.gen_range(0..z_members.len())].clone();
                    let changed = (0..config.depth())
                        .filter(|&k| z2.get(k) != e.z().get(k))
                        .map(InputCoord::Count)
                        .collect();
                    f.set_z(z2, config.z()).unwrap();
                    changed
                } else {
                    let level = rng.gen_range(0..config.depth());
                    let cap = rng.gen_range(0..=config.z().level_bound(level) as usize);
                    let index = rng.gen_range(0..doubled.size());
                    let mut members: Vec<usize> = e.factor(level, cap).members().to_vec();
                    if let Some(pos) = members.iter().position(|&v| v == index) {
                        members.remove(pos);
                    } else {
                        members.push(index);
                    }
                    match SigmaSet::new(doubled, cap, members) {
                        Ok(set) => f.set_factor(level, cap, set).unwrap(),
                        Err(_) => continue,
                    }
                    [InputCoord::Factor { level, cap, index }].into()
                };
                if changed.is_empty() || !changed.is_disjoint(&deps) {
                    continue;
                }
                out.trials += 1;
                out.violations += usize::from(g_forward(&e).bit(g, m) != g_forward(&f).bit(g, m));
            }
            MapId::Compose => {
                let s = random_source(rng, config);
                let g = rng.gen_range(0..config.gamma_size());
                let deps = locality_report(map, OutputCoord::Index(g), config).unwrap();
                let block = rng.gen_range(0..config.source_len());
                let current = s.member(block);
                let next = rng.gen_bool(0.2).then(|| rng.gen_range(0..doubled.size()));
                let changed: BTreeSet<InputCoord> = if current == next {
                    BTreeSet::new()
                } else {
                    current
                        .into_iter()
                        .chain(next)
                        .map(|index| InputCoord::Source { block, index })
                        .collect()
                };
                if changed.is_empty() || !changed.is_disjoint(&deps) {
                    continue;
                }
                let mut t = s.clone();
                t.set_member(block, next).unwrap();
                let before = compose_forward(&s, config).unwrap().get(g);
                let after = compose_forward(&t, config).unwrap().get(g);
                out.trials += 1;
                out.violations += usize::from(before != after);
            }
            other => panic!("no perturbation model for {other}"),
        }
    }
    out
}
