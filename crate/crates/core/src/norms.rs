//! An equivalent norm on `ℓ_p(Γ) × ℓ_p(Γ)` whose unit ball `K` carries open
//! families `U_α ⊂ V_α` with no large homogeneous subfamily.
//!
//! The norm is
//!
//! ```text
//! ‖(x, y)‖′ = sup { ‖x‖_p, ‖y‖_p, |x_α| + |y_β| : (α, β) ∈ G }
//! ```
//!
//! where `G` is the Sierpiński graph of an injection `φ : {0..n} → ℝ`: a pair
//! is an edge when `φ` preserves its order. Everything here is floating
//! point; comparisons against `1` allow [`TOLERANCE`], comparisons against the
//! levels `ξ₁ < ξ₂` are strict because `U_α` and `V_α` are open.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed::task_rng;

pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormError {
    #[error("exponent p = {0} must exceed 1")]
    InvalidExponent(f64),
    #[error("level constraint violated: {0}")]
    Levels(String),
    #[error("phi values must be finite and pairwise distinct ({0})")]
    NotInjective(String),
    #[error("index {index} outside the graph range 0..{n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("point is not in the unit ball K (norm {0})")]
    NotInBall(f64),
    #[error("diagonal pair ({0}, {0}) has no dichotomy")]
    Diagonal(usize),
    #[error("({0}, {1}) is an edge of G, so U_{0} and U_{1} are disjoint")]
    InGraph(usize, usize),
}

/// The graph `G` on `{0, …, n-1}`: `(α, β) ∈ G` iff `α ≠ β` and
/// `φ(α) < φ(β) ⟺ α < β`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SierpinskiGraph {
    n: usize,
    phi_values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawGraph {
    n: usize,
    phi_values: Vec<f64>,
}

impl<'de> Deserialize<'de> for SierpinskiGraph {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = RawGraph::deserialize(de)?;
        if raw.n != raw.phi_values.len() {
            return Err(serde::de::Error::custom(format!(
                "n = {} but {} phi values given",
                raw.n,
                raw.phi_values.len()
            )));
        }
        SierpinskiGraph::new(raw.phi_values).map_err(serde::de::Error::custom)
    }
}

impl SierpinskiGraph {
    pub fn new(phi_values: Vec<f64>) -> Result<Self, NormError> {
        if let Some(v) = phi_values.iter().find(|v| !v.is_finite()) {
            return Err(NormError::NotInjective(format!("{v} is not finite")));
        }
        let mut sorted = phi_values.clone();
        sorted.sort_by(f64::total_cmp);
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(NormError::NotInjective(format!("{} repeats", w[0])));
        }
        Ok(SierpinskiGraph {
            n: phi_values.len(),
            phi_values,
        })
    }

    /// `φ` a uniformly random permutation of `{0, …, n-1}`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut values: Vec<f64> = (0..n).map(|i| i as f64).collect();
        values.shuffle(rng);
        SierpinskiGraph {
            n,
            phi_values: values,
        }
    }

    pub fn seeded(n: usize, seed: u64) -> Self {
        SierpinskiGraph::random(n, &mut task_rng(seed, n as u64))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phi_values(&self) -> &[f64] {
        &self.phi_values
    }

    pub fn contains(&self, alpha: usize, beta: usize) -> bool {
        alpha != beta
            && alpha < self.n
            && beta < self.n
            && (self.phi_values[alpha] < self.phi_values[beta]) == (alpha < beta)
    }

    /// Edges `(α, β)` with `α < β`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| {
            ((a + 1)..self.n)
                .filter(move |&b| self.contains(a, b))
                .map(move |b| (a, b))
        })
    }
}

/// A finitely supported point `(x, y)` of `ℓ_p(Γ) × ℓ_p(Γ)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairVector {
    x: BTreeMap<usize, f64>,
    y: BTreeMap<usize, f64>,
}

impl PairVector {
    pub fn zero() -> Self {
        PairVector::default()
    }

    pub fn new<I, J>(x: I, y: J) -> Self
    where
        I: IntoIterator<Item = (usize, f64)>,
        J: IntoIterator<Item = (usize, f64)>,
    {
        let mut v = PairVector::zero();
        for (i, a) in x {
            v.set_x(i, a);
        }
        for (i, b) in y {
            v.set_y(i, b);
        }
        v
    }

    pub fn set_x(&mut self, index: usize, value: f64) {
        insert_nonzero(&mut self.x, index, value);
    }

    pub fn set_y(&mut self, index: usize, value: f64) {
        insert_nonzero(&mut self.y, index, value);
    }

    pub fn x(&self, index: usize) -> f64 {
        self.x.get(&index).copied().unwrap_or(0.0)
    }

    pub fn y(&self, index: usize) -> f64 {
        self.y.get(&index).copied().unwrap_or(0.0)
    }

    pub fn x_entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.x.iter().map(|(&i, &v)| (i, v))
    }

    pub fn y_entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.y.iter().map(|(&i, &v)| (i, v))
    }

    pub fn scaled(&self, c: f64) -> PairVector {
        PairVector::new(
            self.x_entries().map(|(i, v)| (i, c * v)),
            self.y_entries().map(|(i, v)| (i, c * v)),
        )
    }

    pub fn add(&self, other: &PairVector) -> PairVector {
        let mut out = self.clone();
        for (i, v) in other.x_entries() {
            out.set_x(i, self.x(i) + v);
        }
        for (i, v) in other.y_entries() {
            out.set_y(i, self.y(i) + v);
        }
        out
    }
}

fn insert_nonzero(map: &mut BTreeMap<usize, f64>, index: usize, value: f64) {
    if value == 0.0 {
        map.remove(&index);
    } else {
        map.insert(index, value);
    }
}

#[derive(Serialize, Deserialize)]
struct PairVectorJson {
    #[serde(default)]
    x: Vec<(usize, f64)>,
    #[serde(default)]
    y: Vec<(usize, f64)>,
}

impl Serialize for PairVector {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        PairVectorJson {
            x: self.x_entries().collect(),
            y: self.y_entries().collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for PairVector {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = PairVectorJson::deserialize(de)?;
        if raw.x.iter().chain(&raw.y).any(|(_, v)| !v.is_finite()) {
            return Err(serde::de::Error::custom("coordinates must be finite"));
        }
        Ok(PairVector::new(raw.x, raw.y))
    }
}

/// Exponent, levels `1 < ξ₁ < ξ₂ < 2^{1-1/p}` and the graph.
#[derive(Debug, Clone, PartialEq)]
pub struct NormParams {
    p: f64,
    xi1: f64,
    xi2: f64,
    graph: SierpinskiGraph,
}

/// `2^{1-1/p}`, the value of `|x_α| + |y_α|` at the witness point.
pub fn level_ceiling(p: f64) -> f64 {
    2f64.powf(1.0 - p.recip())
}

impl NormParams {
    pub fn new(p: f64, xi1: f64, xi2: f64, graph: SierpinskiGraph) -> Result<Self, NormError> {
        check_levels(p, xi1, xi2)?;
        Ok(NormParams { p, xi1, xi2, graph })
    }

    /// Levels spaced evenly: `ξ₁ = 1 + (c-1)/3`, `ξ₂ = 1 + 2(c-1)/3`, `c = 2^{1-1/p}`.
    pub fn with_default_levels(p: f64, graph: SierpinskiGraph) -> Result<Self, NormError> {
        let (xi1, xi2) = default_levels(p)?;
        NormParams::new(p, xi1, xi2, graph)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn xi1(&self) -> f64 {
        self.xi1
    }

    pub fn xi2(&self) -> f64 {
        self.xi2
    }

    pub fn graph(&self) -> &SierpinskiGraph {
        &self.graph
    }
}

pub fn default_levels(p: f64) -> Result<(f64, f64), NormError> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(NormError::InvalidExponent(p));
    }
    let gap = level_ceiling(p) - 1.0;
    Ok((1.0 + gap / 3.0, 1.0 + 2.0 * gap / 3.0))
}

/// Validates `p > 1` and `1 < ξ₁ < ξ₂ < 2^{1-1/p}`, naming the failed inequality.
/// NaN levels fail every check.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn check_levels(p: f64, xi1: f64, xi2: f64) -> Result<(), NormError> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(NormError::InvalidExponent(p));
    }
    let ceiling = level_ceiling(p);
    if !(1.0 < xi1) {
        return Err(NormError::Levels(format!("1 < xi1 fails for xi1 = {xi1}")));
    }
    if !(xi1 < xi2) {
        return Err(NormError::Levels(format!(
            "xi1 < xi2 fails for xi1 = {xi1}, xi2 = {xi2}"
        )));
    }
    if !(xi2 < ceiling) {
        return Err(NormError::Levels(format!(
            "xi2 < 2^(1-1/p) fails for xi2 = {xi2}, 2^(1-1/p) = {ceiling}"
        )));
    }
    Ok(())
}

/// `(Σ |v_γ|^p)^{1/p}`.
pub fn lp_norm<I: IntoIterator<Item = f64>>(v: I, p: f64) -> Result<f64, NormError> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(NormError::InvalidExponent(p));
    }
    Ok(v.into_iter()
        .map(|a| a.abs().powf(p))
        .sum::<f64>()
        .powf(p.recip()))
}

/// Largest `|x_α| + |y_β|` over edges `(α, β)` of `G`, or 0 when there is none.
pub fn graph_term(v: &PairVector, graph: &SierpinskiGraph) -> f64 {
    let mut best = 0.0f64;
    for (a, xa) in v.x_entries().filter(|(a, _)| *a < graph.n()) {
        for (b, yb) in v.y_entries() {
            if graph.contains(a, b) {
                best = best.max(xa.abs() + yb.abs());
            }
        }
    }
    best
}

/// `‖(x, y)‖′`.
pub fn prime_norm(v: &PairVector, params: &NormParams) -> f64 {
    let p = params.p;
    let nx = lp_norm(v.x_entries().map(|(_, a)| a), p).expect("validated exponent");
    let ny = lp_norm(v.y_entries().map(|(_, a)| a), p).expect("validated exponent");
    nx.max(ny).max(graph_term(v, &params.graph))
}

/// `‖(x, y)‖′ ≤ 1`, up to [`TOLERANCE`].
pub fn ball_membership(v: &PairVector, params: &NormParams) -> bool {
    prime_norm(v, params) <= 1.0 + TOLERANCE
}

/// Membership in `{(x, y) ∈ K : |x_α| + |y_α| > level}`; `level = ξ₂` gives
/// `U_α`, `level = ξ₁` gives `V_α`.
pub fn uv_membership(
    v: &PairVector,
    alpha: usize,
    level: f64,
    params: &NormParams,
) -> Result<bool, NormError> {
    let norm = prime_norm(v, params);
    if norm > 1.0 + TOLERANCE {
        return Err(NormError::NotInBall(norm));
    }
    Ok(v.x(alpha).abs() + v.y(alpha).abs() > level)
}

pub fn in_u(v: &PairVector, alpha: usize, params: &NormParams) -> Result<bool, NormError> {
    uv_membership(v, alpha, params.xi2, params)
}

pub fn in_v(v: &PairVector, alpha: usize, params: &NormParams) -> Result<bool, NormError> {
    uv_membership(v, alpha, params.xi1, params)
}

fn check_pair(alpha: usize, beta: usize, graph: &SierpinskiGraph) -> Result<(), NormError> {
    for index in [alpha, beta] {
        if index >= graph.n() {
            return Err(NormError::IndexOutOfRange {
                index,
                n: graph.n(),
            });
        }
    }
    if alpha == beta {
        return Err(NormError::Diagonal(alpha));
    }
    Ok(())
}

/// The point with `x_α = x_β = y_α = y_β = 2^{-1/p}`, which lies in `U_α ∩ U_β`
/// whenever `(α, β) ∉ G`.
pub fn witness_point(
    alpha: usize,
    beta: usize,
    params: &NormParams,
) -> Result<PairVector, NormError> {
    check_pair(alpha, beta, &params.graph)?;
    if params.graph.contains(alpha, beta) {
        return Err(NormError::InGraph(alpha, beta));
    }
    let c = 2f64.powf(-params.p.recip());
    Ok(PairVector::new(
        [(alpha, c), (beta, c)],
        [(alpha, c), (beta, c)],
    ))
}

/// Why `V_α ∩ V_β = ∅` for an edge `(α, β)`: a common point would have
/// `|x_α|+|y_α|+|x_β|+|y_β| > 2ξ₁ > 2`, while the edge terms give
/// `|x_α|+|y_β| ≤ 1` and `|x_β|+|y_α| ≤ 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisjointnessCertificate {
    pub alpha: usize,
    pub beta: usize,
    pub xi1: f64,
    /// `2ξ₁`, the forced lower bound on the four-term sum.
    pub forced_sum: f64,
    /// The bound the two edge constraints put on the same sum.
    pub edge_bound: f64,
}

impl fmt::Display for DisjointnessCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = (self.alpha, self.beta);
        write!(
            f,
            "any (x,y) in V_{a} and V_{b} has |x_{a}|+|y_{a}|+|x_{b}|+|y_{b}| > 2*xi1 = {:.6} > 2, \
             but ({a},{b}) and ({b},{a}) in G give |x_{a}|+|y_{b}| <= 1 and |x_{b}|+|y_{a}| <= 1, \
             so the sum is <= {}",
            self.forced_sum, self.edge_bound
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Intersecting {
        witness: PairVector,
    },
    Disjoint {
        certificate: DisjointnessCertificate,
        samples: usize,
        /// Sampled points of `V_α ∩ V_β`; always zero unless the theory is wrong.
        counterexamples: usize,
    },
}

impl Verdict {
    pub fn is_disjoint(&self) -> bool {
        matches!(self, Verdict::Disjoint { .. })
    }
}

/// Decides whether `U_α ∩ U_β` is empty, returning either the witness point or
/// the analytic certificate backed by `budget` random points of `K`.
pub fn disjointness_check(
    alpha: usize,
    beta: usize,
    params: &NormParams,
    budget: usize,
    seed: u64,
) -> Result<Verdict, NormError> {
    check_pair(alpha, beta, &params.graph)?;
    if !params.graph.contains(alpha, beta) {
        let witness = witness_point(alpha, beta, params)?;
        return Ok(Verdict::Intersecting { witness });
    }
    let mut rng = task_rng(seed, (alpha * params.graph.n() + beta) as u64);
    let mut counterexamples = 0;
    for _ in 0..budget {
        let v = sample_ball_point(&mut rng, &[alpha, beta], params);
        let above = |i: usize| v.x(i).abs() + v.y(i).abs() > params.xi1;
        if above(alpha) && above(beta) && ball_membership(&v, params) {
            counterexamples += 1;
        }
    }
    Ok(Verdict::Disjoint {
        certificate: DisjointnessCertificate {
            alpha,
            beta,
            xi1: params.xi1,
            forced_sum: 2.0 * params.xi1,
            edge_bound: 2.0,
        },
        samples: budget,
        counterexamples,
    })
}

/// A random point of `K` concentrated on `focus`, with occasional extra
/// coordinates. Half the samples are pushed to the boundary `‖·‖′ = 1`.
pub fn sample_ball_point<R: Rng + ?Sized>(
    rng: &mut R,
    focus: &[usize],
    params: &NormParams,
) -> PairVector {
    let n = params.graph.n().max(1);
    let mut support: Vec<usize> = focus.to_vec();
    while rng.gen_bool(0.3) {
        support.push(rng.gen_range(0..n + 2));
    }
    let mut v = PairVector::zero();
    for &i in &support {
        if rng.gen_bool(0.9) {
            v.set_x(i, rng.gen_range(-1.0..=1.0));
        }
        if rng.gen_bool(0.9) {
            v.set_y(i, rng.gen_range(-1.0..=1.0));
        }
    }
    let norm = prime_norm(&v, params);
    if norm == 0.0 {
        return v;
    }
    if norm > 1.0 || rng.gen_bool(0.5) {
        v.scaled(1.0 / norm)
    } else {
        v
    }
}

/// Counts points of `V_α ∩ V_β` among the in-ball points whose coordinates on
/// `{α, β}` take values in `{0, ±2^{-1/p}, ±ξ₁/2, ±1}`; returns `(in_ball, hits)`.
pub fn grid_refutation(
    alpha: usize,
    beta: usize,
    params: &NormParams,
) -> Result<(usize, usize), NormError> {
    check_pair(alpha, beta, &params.graph)?;
    let c = 2f64.powf(-params.p.recip());
    let h = params.xi1 / 2.0;
    let values = [0.0, c, -c, h, -h, 1.0, -1.0];
    let (mut in_ball, mut hits) = (0, 0);
    for &xa in &values {
        for &xb in &values {
            for &ya in &values {
                for &yb in &values {
                    let v = PairVector::new([(alpha, xa), (beta, xb)], [(alpha, ya), (beta, yb)]);
                    if !ball_membership(&v, params) {
                        continue;
                    }
                    in_ball += 1;
                    if in_v(&v, alpha, params)? && in_v(&v, beta, params)? {
                        hits += 1;
                    }
                }
            }
        }
    }
    Ok((in_ball, hits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(values: Vec<f64>, p: f64) -> NormParams {
        NormParams::with_default_levels(p, SierpinskiGraph::new(values).unwrap()).unwrap()
    }

    #[test]
    fn graph_definition() {
        let g = SierpinskiGraph::new(vec![2.0, 0.0, 1.0, 3.0]).unwrap();
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, vec![(0, 3), (1, 2), (1, 3), (2, 3)]);
        assert!(g.contains(3, 0));
        assert!(!g.contains(0, 0));
        assert!(!g.contains(0, 7));
        assert!(SierpinskiGraph::new(vec![1.0, 1.0]).is_err());
        assert!(SierpinskiGraph::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn graph_json() {
        let g = SierpinskiGraph::new(vec![1.5, -2.0]).unwrap();
        let v = serde_json::to_value(&g).unwrap();
        assert_eq!(v, serde_json::json!({"n": 2, "phi_values": [1.5, -2.0]}));
        assert_eq!(serde_json::from_value::<SierpinskiGraph>(v).unwrap(), g);
        assert!(serde_json::from_str::<SierpinskiGraph>(r#"{"n":3,"phi_values":[1,2]}"#).is_err());
    }

    #[test]
    fn lp_norm_examples() {
        for p in [1.5, 2.0, 3.0] {
            assert!((lp_norm([0.0, 1.0], p).unwrap() - 1.0).abs() < TOLERANCE);
            assert_eq!(lp_norm([0.0; 3], p).unwrap(), 0.0);
        }
        let s = 0.5f64.sqrt();
        assert!((lp_norm([s, s], 2.0).unwrap() - 1.0).abs() < TOLERANCE);
        assert_eq!(lp_norm([1.0], 1.0), Err(NormError::InvalidExponent(1.0)));
    }

    #[test]
    fn level_validation() {
        let g = SierpinskiGraph::new(vec![0.0, 1.0]).unwrap();
        let (xi1, xi2) = default_levels(2.0).unwrap();
        assert!(1.0 < xi1 && xi1 < xi2 && xi2 < 2f64.sqrt());
        assert!(NormParams::new(2.0, 1.0, 1.2, g.clone())
            .unwrap_err()
            .to_string()
            .contains("1 < xi1"));
        assert!(NormParams::new(2.0, 1.2, 1.1, g.clone())
            .unwrap_err()
            .to_string()
            .contains("xi1 < xi2"));
        assert!(NormParams::new(2.0, 1.1, 1.5, g.clone())
            .unwrap_err()
            .to_string()
            .contains("xi2 < 2^(1-1/p)"));
        assert_eq!(
            NormParams::new(1.0, 1.1, 1.2, g).unwrap_err(),
            NormError::InvalidExponent(1.0)
        );
    }

    #[test]
    fn prime_norm_examples() {
        // (0, 1) is an edge for increasing phi
        let prm = params(vec![0.0, 1.0, 2.0], 2.0);
        let e = PairVector::new([(0, 1.0)], [(1, 1.0)]);
        assert!((prime_norm(&e, &prm) - 2.0).abs() < TOLERANCE);
        assert!(!ball_membership(&e, &prm));

        assert_eq!(prime_norm(&PairVector::zero(), &prm), 0.0);
        assert!(ball_membership(&PairVector::zero(), &prm));

        // decreasing phi: (0, 1) is not an edge
        let prm = params(vec![1.0, 0.0], 2.0);
        let w = witness_point(0, 1, &prm).unwrap();
        assert!((prime_norm(&w, &prm) - 1.0).abs() < TOLERANCE);
        assert!(ball_membership(&w, &prm));
    }

    #[test]
    fn coordinates_outside_graph_only_enter_lp_terms() {
        let prm = params(vec![0.0, 1.0], 2.0);
        let v = PairVector::new([(0, 0.9)], [(5, 0.9)]);
        assert!((prime_norm(&v, &prm) - 0.9).abs() < TOLERANCE);
    }

    #[test]
    fn uv_examples() {
        let g = SierpinskiGraph::new(vec![1.0, 0.0]).unwrap();
        let prm = NormParams::new(2.0, 1.1, 1.2, g).unwrap();
        let w = witness_point(0, 1, &prm).unwrap();
        assert!(uv_membership(&w, 0, 1.2, &prm).unwrap());
        assert!(!uv_membership(&PairVector::zero(), 0, 1.1, &prm).unwrap());
        let unit = PairVector::new([(0, 1.0)], []);
        assert!(!in_v(&unit, 0, &prm).unwrap());
        let outside = PairVector::new([(0, 1.5)], []);
        assert!(matches!(
            in_u(&outside, 0, &prm),
            Err(NormError::NotInBall(_))
        ));
    }

    #[test]
    fn witness_examples() {
        let prm = params(vec![0.0, 1.0, 2.0], 2.0);
        assert_eq!(witness_point(0, 1, &prm), Err(NormError::InGraph(0, 1)));
        assert_eq!(witness_point(1, 1, &prm), Err(NormError::Diagonal(1)));

        let prm = params(vec![2.0, 1.0, 0.0], 3.0);
        let w = witness_point(0, 2, &prm).unwrap();
        let sum = w.x(0).abs() + w.y(0).abs();
        assert!((sum - 2f64.powf(2.0 / 3.0)).abs() < TOLERANCE);
        assert!(sum > 1.587 && sum > prm.xi2());
        assert!(in_u(&w, 0, &prm).unwrap() && in_u(&w, 2, &prm).unwrap());
    }

    #[test]
    fn disjointness_examples() {
        let prm = params(vec![0.0, 2.0, 1.0], 2.0);
        // (1, 2) decreasing, not an edge
        match disjointness_check(1, 2, &prm, 100, 3).unwrap() {
            Verdict::Intersecting { witness } => assert!(in_u(&witness, 1, &prm).unwrap()),
            other => panic!("expected intersecting, got {other:?}"),
        }
        match disjointness_check(0, 1, &prm, 10_000, 3).unwrap() {
            Verdict::Disjoint {
                certificate,
                samples,
                counterexamples,
            } => {
                assert_eq!((samples, counterexamples), (10_000, 0));
                assert!(certificate.forced_sum > certificate.edge_bound);
                assert!(certificate.to_string().contains("2*xi1"));
            }
            other => panic!("expected disjoint, got {other:?}"),
        }
        assert_eq!(
            disjointness_check(2, 2, &prm, 10, 0),
            Err(NormError::Diagonal(2))
        );
    }

    #[test]
    fn grid_refutation_on_edge() {
        let prm = params(vec![0.0, 1.0], 2.0);
        let (in_ball, hits) = grid_refutation(0, 1, &prm).unwrap();
        assert!(in_ball > 0);
        assert_eq!(hits, 0);
        // a non-edge does have grid points in both V's
        let prm = params(vec![1.0, 0.0], 2.0);
        assert!(grid_refutation(0, 1, &prm).unwrap().1 > 0);
    }

    #[test]
    fn pair_vector_json() {
        let v = PairVector::new([(0, 0.5)], [(3, -0.25)]);
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(
            json,
            serde_json::json!({"x": [[0, 0.5]], "y": [[3, -0.25]]})
        );
        assert_eq!(serde_json::from_value::<PairVector>(json).unwrap(), v);
    }
}
