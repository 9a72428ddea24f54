//! Finite analyzer for the open-family dichotomy.
//!
//! Given `n` indices and the relations "`U_α ∩ U_β = ∅`" and "`V_α ∩ V_β = ∅`",
//! find the largest set of indices that is pairwise `U`-disjoint and the
//! largest that is pairwise `V`-meeting. For relations coming from a
//! Sierpiński graph these are a longest increasing and a longest decreasing
//! subsequence of `φ`, both of size `Θ(√n)` for random `φ`.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::norms::SierpinskiGraph;
use crate::seed::{derive_seed, task_rng};

/// Largest `n` accepted by [`Method::Exhaustive`].
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Largest permutation length accepted by exhaustive Erdős–Szekeres checks.
pub const ES_EXHAUSTIVE_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RamseyError {
    #[error("exhaustive search supports n <= {EXHAUSTIVE_LIMIT}, got {0}")]
    ExhaustiveTooLarge(usize),
    #[error("the fast path needs relations derived from a Sierpiński graph")]
    NeedsSierpinski,
    #[error("relation is not transitive along the index order at ({0}, {1}, {2})")]
    NotTransitive(usize, usize, usize),
    #[error("invalid relation: {0}")]
    Relation(String),
    #[error("exhaustive Erdős–Szekeres check supports length <= {ES_EXHAUSTIVE_LIMIT}, got {0}")]
    EsTooLong(usize),
    #[error("subsequence lengths r and s must be positive")]
    ZeroLength,
    #[error("experiment sizes must be positive")]
    ZeroSize,
}

#[derive(Debug, Clone, PartialEq)]
enum Relations {
    /// Row-major `n × n` matrices.
    Explicit { u: Vec<bool>, v: Vec<bool> },
    /// `u = v = G`, evaluated on demand from the `φ` values.
    Sierpinski(Vec<f64>),
}

/// The disjointness pattern of a family `{U_α, V_α}_{α<n}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRelations {
    n: usize,
    relations: Relations,
}

impl FamilyRelations {
    /// Builds relations from unordered pairs. Both are symmetrized; they must
    /// be irreflexive and `v_disjoint ⊆ u_disjoint`.
    pub fn explicit(
        n: usize,
        u_disjoint: &[(usize, usize)],
        v_disjoint: &[(usize, usize)],
    ) -> Result<Self, RamseyError> {
        let fill = |pairs: &[(usize, usize)]| -> Result<Vec<bool>, RamseyError> {
            let mut m = vec![false; n * n];
            for &(a, b) in pairs {
                if a >= n || b >= n {
                    return Err(RamseyError::Relation(format!(
                        "pair ({a}, {b}) out of range"
                    )));
                }
                if a == b {
                    return Err(RamseyError::Relation(format!(
                        "pair ({a}, {a}) is reflexive"
                    )));
                }
                m[a * n + b] = true;
                m[b * n + a] = true;
            }
            Ok(m)
        };
        let u = fill(u_disjoint)?;
        let v = fill(v_disjoint)?;
        if let Some(k) = (0..n * n).find(|&k| v[k] && !u[k]) {
            return Err(RamseyError::Relation(format!(
                "V-disjoint pair ({}, {}) is not U-disjoint",
                k / n,
                k % n
            )));
        }
        Ok(FamilyRelations {
            n,
            relations: Relations::Explicit { u, v },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_sierpinski(&self) -> bool {
        matches!(self.relations, Relations::Sierpinski(_))
    }

    pub fn u_disjoint(&self, a: usize, b: usize) -> bool {
        match &self.relations {
            Relations::Explicit { u, .. } => u[a * self.n + b],
            Relations::Sierpinski(phi) => a != b && (phi[a] < phi[b]) == (a < b),
        }
    }

    pub fn v_disjoint(&self, a: usize, b: usize) -> bool {
        match &self.relations {
            Relations::Explicit { v, .. } => v[a * self.n + b],
            Relations::Sierpinski(_) => self.u_disjoint(a, b),
        }
    }

    /// Whether distinct `a`, `b` may sit together in a homogeneous set of `mode`.
    pub fn compatible(&self, mode: Mode, a: usize, b: usize) -> bool {
        a != b
            && match mode {
                Mode::Disjoint => self.u_disjoint(a, b),
                Mode::Meeting => !self.v_disjoint(a, b),
            }
    }
}

/// `U_α ∩ U_β = ∅ ⟺ (α, β) ∈ G ⟺ V_α ∩ V_β = ∅`.
pub fn relations_from_graph(g: &SierpinskiGraph) -> FamilyRelations {
    FamilyRelations {
        n: g.n(),
        relations: Relations::Sierpinski(g.phi_values().to_vec()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Pairwise `U`-disjoint.
    Disjoint,
    /// Pairwise `V`-meeting.
    Meeting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Branch and bound over all subsets; `n ≤ 20`.
    Exhaustive,
    /// Longest chain along the index order; needs the relation to be
    /// transitive along that order, which holds for Sierpiński relations.
    Dp,
    /// Patience sorting on `φ`; Sierpiński relations only.
    Fast,
}

/// A maximum homogeneous set of the given kind, in increasing index order.
pub fn max_homogeneous(
    rel: &FamilyRelations,
    mode: Mode,
    method: Method,
) -> Result<Vec<usize>, RamseyError> {
    match method {
        Method::Exhaustive => exhaustive_clique(rel, mode),
        Method::Dp => chain_dp(rel, mode),
        Method::Fast => match &rel.relations {
            Relations::Sierpinski(phi) => Ok(match mode {
                Mode::Disjoint => longest_increasing(phi),
                Mode::Meeting => longest_decreasing(phi),
            }),
            Relations::Explicit { .. } => Err(RamseyError::NeedsSierpinski),
        },
    }
}

fn exhaustive_clique(rel: &FamilyRelations, mode: Mode) -> Result<Vec<usize>, RamseyError> {
    let n = rel.n;
    if n > EXHAUSTIVE_LIMIT {
        return Err(RamseyError::ExhaustiveTooLarge(n));
    }
    let adj: Vec<u32> = (0..n)
        .map(|a| {
            (0..n)
                .filter(|&b| rel.compatible(mode, a, b))
                .fold(0u32, |m, b| m | 1 << b)
        })
        .collect();

    fn search(candidates: u32, chosen: u32, best: &mut u32, adj: &[u32]) {
        if candidates == 0 {
            if chosen.count_ones() > best.count_ones() {
                *best = chosen;
            }
            return;
        }
        if chosen.count_ones() + candidates.count_ones() <= best.count_ones() {
            return;
        }
        let v = candidates.trailing_zeros() as usize;
        let bit = 1u32 << v;
        search(candidates & adj[v], chosen | bit, best, adj);
        search(candidates & !bit, chosen, best, adj);
    }

    let mut best = 0u32;
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    search(all, 0, &mut best, &adj);
    Ok((0..n).filter(|b| best >> b & 1 == 1).collect())
}

fn chain_dp(rel: &FamilyRelations, mode: Mode) -> Result<Vec<usize>, RamseyError> {
    let n = rel.n;
    if !rel.is_sierpinski() {
        for i in 0..n {
            for j in (i + 1)..n {
                if !rel.compatible(mode, i, j) {
                    continue;
                }
                for k in (j + 1)..n {
                    if rel.compatible(mode, j, k) && !rel.compatible(mode, i, k) {
                        return Err(RamseyError::NotTransitive(i, j, k));
                    }
                }
            }
        }
    }
    let mut length = vec![1usize; n];
    let mut prev = vec![usize::MAX; n];
    for j in 0..n {
        for i in 0..j {
            if length[i] + 1 > length[j] && rel.compatible(mode, i, j) {
                length[j] = length[i] + 1;
                prev[j] = i;
            }
        }
    }
    let Some(mut end) = (0..n).max_by_key(|&j| (length[j], std::cmp::Reverse(j))) else {
        return Ok(Vec::new());
    };
    let mut chain = vec![end];
    while prev[end] != usize::MAX {
        end = prev[end];
        chain.push(end);
    }
    chain.reverse();
    Ok(chain)
}

/// Indices of a longest strictly increasing subsequence, `O(n log n)`.
pub fn longest_increasing(values: &[f64]) -> Vec<usize> {
    // tails[k]: index of the smallest tail of an increasing run of length k+1
    let mut tails: Vec<usize> = Vec::new();
    let mut prev = vec![usize::MAX; values.len()];
    for (i, &v) in values.iter().enumerate() {
        let k = tails.partition_point(|&t| values[t] < v);
        if k > 0 {
            prev[i] = tails[k - 1];
        }
        if k == tails.len() {
            tails.push(i);
        } else {
            tails[k] = i;
        }
    }
    let mut out = Vec::with_capacity(tails.len());
    let mut cur = tails.last().copied();
    while let Some(i) = cur {
        out.push(i);
        cur = (prev[i] != usize::MAX).then_some(prev[i]);
    }
    out.reverse();
    out
}

/// Indices of a longest strictly decreasing subsequence.
pub fn longest_decreasing(values: &[f64]) -> Vec<usize> {
    let negated: Vec<f64> = values.iter().map(|v| -v).collect();
    longest_increasing(&negated)
}

/// Checks the pairwise property a homogeneous set claims.
pub fn verify_homogeneous(rel: &FamilyRelations, mode: Mode, set: &[usize]) -> bool {
    set.iter().all(|&a| a < rel.n)
        && set
            .iter()
            .enumerate()
            .all(|(k, &a)| set[k + 1..].iter().all(|&b| rel.compatible(mode, a, b)))
}

/// Both alternatives of the dichotomy at once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QReport {
    pub n: usize,
    pub best_disjoint_set: Vec<usize>,
    pub best_meeting_set: Vec<usize>,
    pub disjoint_size: usize,
    pub meeting_size: usize,
}

impl QReport {
    /// The larger of the two homogeneous sets.
    pub fn m(&self) -> usize {
        self.disjoint_size.max(self.meeting_size)
    }
}

pub fn q_report(rel: &FamilyRelations, method: Method) -> Result<QReport, RamseyError> {
    let disjoint = max_homogeneous(rel, Mode::Disjoint, method)?;
    let meeting = max_homogeneous(rel, Mode::Meeting, method)?;
    for (mode, set) in [(Mode::Disjoint, &disjoint), (Mode::Meeting, &meeting)] {
        if !verify_homogeneous(rel, mode, set) {
            return Err(RamseyError::Relation(format!(
                "{mode:?} set {set:?} fails verification"
            )));
        }
    }
    Ok(QReport {
        n: rel.n,
        disjoint_size: disjoint.len(),
        meeting_size: meeting.len(),
        best_disjoint_set: disjoint,
        best_meeting_set: meeting,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EsMode {
    Exhaustive,
    Random,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EsReport {
    pub r: usize,
    pub s: usize,
    pub length: usize,
    pub checked: u64,
    pub violations: u64,
    pub first_violation: Option<Vec<usize>>,
}

/// Every permutation of length `(r-1)(s-1)+1` has an increasing subsequence
/// of length `r` or a decreasing one of length `s`; counts the exceptions.
pub fn erdos_szekeres_check(
    r: usize,
    s: usize,
    mode: EsMode,
    trials: u64,
    seed: u64,
) -> Result<EsReport, RamseyError> {
    if r == 0 || s == 0 {
        return Err(RamseyError::ZeroLength);
    }
    let length = (r - 1) * (s - 1) + 1;
    let mut report = EsReport {
        r,
        s,
        length,
        checked: 0,
        violations: 0,
        first_violation: None,
    };
    let check = |perm: &[usize], report: &mut EsReport| {
        let values: Vec<f64> = perm.iter().map(|&v| v as f64).collect();
        report.checked += 1;
        if longest_increasing(&values).len() < r && longest_decreasing(&values).len() < s {
            report.violations += 1;
            report.first_violation.get_or_insert_with(|| perm.to_vec());
        }
    };
    match mode {
        EsMode::Exhaustive => {
            if length > ES_EXHAUSTIVE_LIMIT {
                return Err(RamseyError::EsTooLong(length));
            }
            // Heap's algorithm
            let mut perm: Vec<usize> = (0..length).collect();
            let mut c = vec![0usize; length];
            check(&perm, &mut report);
            let mut i = 0;
            while i < length {
                if c[i] < i {
                    if i % 2 == 0 {
                        perm.swap(0, i);
                    } else {
                        perm.swap(c[i], i);
                    }
                    check(&perm, &mut report);
                    c[i] += 1;
                    i = 0;
                } else {
                    c[i] = 0;
                    i += 1;
                }
            }
        }
        EsMode::Random => {
            let mut rng = task_rng(seed, length as u64);
            let mut perm: Vec<usize> = (0..length).collect();
            for _ in 0..trials {
                perm.shuffle(&mut rng);
                check(&perm, &mut report);
            }
        }
    }
    Ok(report)
}

/// One `(n, trial)` measurement of the scaling experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub lis: usize,
    pub lds: usize,
    pub m: usize,
    pub m_over_n: f64,
    pub m_over_sqrt_n: f64,
}

/// Seed of task `(n, trial)` under a global seed.
pub fn scaling_task_seed(global: u64, n: usize, trial: usize) -> u64 {
    derive_seed(global, ((n as u64) << 32) ^ trial as u64)
}

/// For each size and trial, draws a random `φ` and records the largest
/// homogeneous set `m(n) = max(LIS, LDS)`. Rows come out in input order.
pub fn scaling_experiment(
    sizes: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<ScalingRow>, RamseyError> {
    if sizes.contains(&0) {
        return Err(RamseyError::ZeroSize);
    }
    let tasks: Vec<(usize, usize)> = sizes
        .iter()
        .flat_map(|&n| (0..trials).map(move |t| (n, t)))
        .collect();
    Ok(tasks
        .into_par_iter()
        .map(|(n, trial)| {
            let task_seed = scaling_task_seed(seed, n, trial);
            let graph = SierpinskiGraph::random(n, &mut task_rng(task_seed, 0));
            let lis = longest_increasing(graph.phi_values()).len();
            let lds = longest_decreasing(graph.phi_values()).len();
            let m = lis.max(lds);
            ScalingRow {
                n,
                trial,
                seed: task_seed,
                lis,
                lds,
                m,
                m_over_n: m as f64 / n as f64,
                m_over_sqrt_n: m as f64 / (n as f64).sqrt(),
            }
        })
        .collect())
}

/// `⌈√n⌉`, the Erdős–Szekeres lower bound on `max(LIS, LDS)`.
pub fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}
