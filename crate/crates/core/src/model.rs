//! Finite models of the spaces involved in the construction.
//!
//! `Γ` is truncated to an [`IndexSet`] `{0, …, size-1}` and `ℕ` to the levels
//! `{0, …, depth-1}`. Points of `{0,1}^{Δ×ℕ}` are [`BitPoint`]s, elements of
//! `σ_k(Δ)` are [`SigmaSet`]s, and points of the cube `[-1,1]^Δ` are
//! [`GridVector`]s with exact dyadic coordinates. Membership in `B`, `B⁺`,
//! `Z₀` and `K(Z,Δ)` is always computed, never materialized.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::{Dyadic, DyadicError};

/// Upper bound on the number of candidate points [`enumerate_grid`] will scan.
pub const GRID_GUARD: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
    #[error("index set size must be positive")]
    EmptyIndexSet,
    #[error("depth must be positive")]
    ZeroDepth,
    #[error("index {index} outside index set of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("level {level} outside depth {depth}")]
    LevelOutOfRange { level: usize, depth: usize },
    #[error("set of {len} members exceeds cap {cap}")]
    CapExceeded { len: usize, cap: usize },
    #[error("coordinate {index} = {value} lies outside [-1, 1]")]
    CoordinateOutOfCube { index: usize, value: Dyadic },
    #[error("weight family has {weights} entries but depth {depth} was requested")]
    WeightLength { weights: usize, depth: usize },
    #[error("weights must be positive (entry {0} is not)")]
    NonPositiveWeight(usize),
    #[error("weights sum to {0}, which exceeds 1")]
    WeightSum(Dyadic),
    #[error("grid of {candidates} candidates exceeds the enumeration guard of {GRID_GUARD}")]
    GuardExceeded { candidates: u128 },
    #[error("index sets differ: {0:?} vs {1:?}")]
    IndexSetMismatch(IndexSet, IndexSet),
    #[error("depths differ: {0} vs {1}")]
    DepthMismatch(usize, usize),
    #[error("count vector {entries:?} is not a member of Z")]
    NotInZ { entries: Vec<u64> },
    #[error("factor {cap} of level {level} has cap {found}")]
    FactorCap {
        level: usize,
        cap: usize,
        found: usize,
    },
    #[error("block for level {level} has {found} factors, expected {expected}")]
    BlockShape {
        level: usize,
        found: usize,
        expected: usize,
    },
}

/// `Δ = {0, …, size-1}`; when `doubled`, index `2γ` stands for `(γ,a)` and
/// `2γ+1` for `(γ,b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawIndexSet")]
pub struct IndexSet {
    size: usize,
    #[serde(default)]
    doubled: bool,
}

#[derive(Deserialize)]
struct RawIndexSet {
    size: usize,
    #[serde(default)]
    doubled: bool,
}

impl TryFrom<RawIndexSet> for IndexSet {
    type Error = String;

    fn try_from(raw: RawIndexSet) -> Result<Self, Self::Error> {
        if raw.size == 0 {
            return Err(ModelError::EmptyIndexSet.to_string());
        }
        if raw.doubled && !raw.size.is_multiple_of(2) {
            return Err(format!(
                "doubled index set must have even size, got {}",
                raw.size
            ));
        }
        Ok(IndexSet {
            size: raw.size,
            doubled: raw.doubled,
        })
    }
}

/// The two copies of a base index inside a doubled index set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    A,
    B,
}

impl IndexSet {
    pub fn new(size: usize) -> Result<Self, ModelError> {
        if size == 0 {
            return Err(ModelError::EmptyIndexSet);
        }
        Ok(IndexSet {
            size,
            doubled: false,
        })
    }

    /// `Γ × {a, b}` for `|Γ| = base_size`.
    pub fn doubled(base_size: usize) -> Result<Self, ModelError> {
        if base_size == 0 {
            return Err(ModelError::EmptyIndexSet);
        }
        Ok(IndexSet {
            size: 2 * base_size,
            doubled: true,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_doubled(&self) -> bool {
        self.doubled
    }

    /// Size of the undoubled base set.
    pub fn base_size(&self) -> usize {
        if self.doubled {
            self.size / 2
        } else {
            self.size
        }
    }

    pub fn tagged(gamma: usize, tag: Tag) -> usize {
        match tag {
            Tag::A => 2 * gamma,
            Tag::B => 2 * gamma + 1,
        }
    }

    pub fn untag(index: usize) -> (usize, Tag) {
        (
            index / 2,
            if index.is_multiple_of(2) {
                Tag::A
            } else {
                Tag::B
            },
        )
    }

    pub fn check(&self, index: usize) -> Result<(), ModelError> {
        if index < self.size {
            Ok(())
        } else {
            Err(ModelError::IndexOutOfRange {
                index,
                size: self.size,
            })
        }
    }
}

/// A point of `{0,1}^{Δ×{0..depth}}`, stored by its support.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitPoint {
    index_set: IndexSet,
    depth: usize,
    bits: BTreeSet<(usize, usize)>,
}

impl BitPoint {
    pub fn zero(index_set: IndexSet, depth: usize) -> Result<Self, ModelError> {
        if depth == 0 {
            return Err(ModelError::ZeroDepth);
        }
        Ok(BitPoint {
            index_set,
            depth,
            bits: BTreeSet::new(),
        })
    }

    /// Builds a point from its set bits, given as `(γ, n)` pairs.
    pub fn from_support<I>(
        index_set: IndexSet,
        depth: usize,
        support: I,
    ) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut point = BitPoint::zero(index_set, depth)?;
        for (gamma, level) in support {
            point.set(gamma, level, true)?;
        }
        Ok(point)
    }

    /// Builds a point row by row; `rows[γ][n]` is bit `(γ, n)`.
    pub fn from_rows(index_set: IndexSet, rows: &[Vec<bool>]) -> Result<Self, ModelError> {
        let depth = rows.first().map_or(0, Vec::len);
        let mut point = BitPoint::zero(index_set, depth)?;
        for (gamma, row) in rows.iter().enumerate() {
            if row.len() != depth {
                return Err(ModelError::DepthMismatch(depth, row.len()));
            }
            for (level, &bit) in row.iter().enumerate() {
                point.set(gamma, level, bit)?;
            }
        }
        Ok(point)
    }

    pub fn index_set(&self) -> IndexSet {
        self.index_set
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn bit(&self, gamma: usize, level: usize) -> bool {
        self.bits.contains(&(gamma, level))
    }

    pub fn set(&mut self, gamma: usize, level: usize, value: bool) -> Result<(), ModelError> {
        self.index_set.check(gamma)?;
        if level >= self.depth {
            return Err(ModelError::LevelOutOfRange {
                level,
                depth: self.depth,
            });
        }
        if value {
            self.bits.insert((gamma, level));
        } else {
            self.bits.remove(&(gamma, level));
        }
        Ok(())
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits.iter().copied()
    }

    pub fn row(&self, gamma: usize) -> Vec<bool> {
        (0..self.depth).map(|n| self.bit(gamma, n)).collect()
    }

    /// `true` when every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BitPoint) -> bool {
        self.bits.is_subset(&other.bits)
    }
}

/// The column counts `N_n(x) = |{γ : x(γ,n) = 1}|` for `n < depth`.
pub fn count_vector(x: &BitPoint) -> CountVector {
    let mut entries = vec![0u64; x.depth];
    for (_, level) in x.support() {
        entries[level] += 1;
    }
    CountVector { entries }
}

/// An element of `σ_cap(Δ)`: a subset of `Δ` with at most `cap` members.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SigmaSet {
    index_set: IndexSet,
    cap: usize,
    members: Vec<usize>,
}

#[derive(Deserialize)]
struct RawSigmaSet {
    index_set: IndexSet,
    cap: usize,
    members: Vec<usize>,
}

impl<'de> Deserialize<'de> for SigmaSet {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = RawSigmaSet::deserialize(de)?;
        SigmaSet::new(raw.index_set, raw.cap, raw.members).map_err(serde::de::Error::custom)
    }
}

impl SigmaSet {
    /// Sorts and deduplicates `members`, then checks range and cap.
    pub fn new(index_set: IndexSet, cap: usize, members: Vec<usize>) -> Result<Self, ModelError> {
        let members: Vec<usize> = members
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        for &m in &members {
            index_set.check(m)?;
        }
        if members.len() > cap {
            return Err(ModelError::CapExceeded {
                len: members.len(),
                cap,
            });
        }
        Ok(SigmaSet {
            index_set,
            cap,
            members,
        })
    }

    pub fn empty(index_set: IndexSet, cap: usize) -> Self {
        SigmaSet {
            index_set,
            cap,
            members: Vec::new(),
        }
    }

    pub fn singleton(index_set: IndexSet, member: usize) -> Result<Self, ModelError> {
        SigmaSet::new(index_set, 1, vec![member])
    }

    pub fn index_set(&self) -> IndexSet {
        self.index_set
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }
}

/// A finitely supported point of `[-1,1]^Δ` with exact coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridVector {
    index_set: IndexSet,
    coords: BTreeMap<usize, Dyadic>,
}

impl GridVector {
    pub fn zero(index_set: IndexSet) -> Self {
        GridVector {
            index_set,
            coords: BTreeMap::new(),
        }
    }

    /// Builds a vector from `(γ, value)` pairs; zero values are dropped.
    pub fn new<I>(index_set: IndexSet, coords: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (usize, Dyadic)>,
    {
        let mut v = GridVector::zero(index_set);
        for (index, value) in coords {
            v.set(index, value)?;
        }
        Ok(v)
    }

    /// Dense constructor, coordinate `γ` taken from `values[γ]`.
    pub fn from_dense(index_set: IndexSet, values: &[Dyadic]) -> Result<Self, ModelError> {
        GridVector::new(index_set, values.iter().copied().enumerate())
    }

    pub fn set(&mut self, index: usize, value: Dyadic) -> Result<(), ModelError> {
        self.index_set.check(index)?;
        if value.abs() > Dyadic::ONE {
            return Err(ModelError::CoordinateOutOfCube { index, value });
        }
        if value.is_zero() {
            self.coords.remove(&index);
        } else {
            self.coords.insert(index, value);
        }
        Ok(())
    }

    pub fn index_set(&self) -> IndexSet {
        self.index_set
    }

    pub fn get(&self, index: usize) -> Dyadic {
        self.coords.get(&index).copied().unwrap_or(Dyadic::ZERO)
    }

    /// Nonzero coordinates in index order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, Dyadic)> + '_ {
        self.coords.iter().map(|(&i, &v)| (i, v))
    }

    pub fn dense(&self) -> Vec<Dyadic> {
        (0..self.index_set.size()).map(|i| self.get(i)).collect()
    }

    pub fn l1_norm(&self) -> Dyadic {
        self.coords.values().map(|v| v.abs()).sum()
    }

    /// Largest denominator exponent among the coordinates.
    pub fn max_exponent(&self) -> u32 {
        self.coords
            .values()
            .map(Dyadic::exponent)
            .max()
            .unwrap_or(0)
    }
}

/// Membership in `B(Δ)` (or `B⁺(Δ)` when `positive_only`): `Σ|v_γ| ≤ 1` exactly.
pub fn b_membership(v: &GridVector, positive_only: bool) -> bool {
    if positive_only && v.nonzero().any(|(_, c)| c.is_negative()) {
        return false;
    }
    v.l1_norm() <= Dyadic::ONE
}

/// A truncated element `(s_0, …, s_{d-1})` of `ℕ^ℕ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CountVector {
    entries: Vec<u64>,
}

impl CountVector {
    pub fn new(entries: Vec<u64>) -> Self {
        CountVector { entries }
    }

    pub fn zeros(depth: usize) -> Self {
        CountVector {
            entries: vec![0; depth],
        }
    }

    pub fn depth(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, n: usize) -> u64 {
        self.entries[n]
    }

    /// Coordinatewise `self ≤ other`.
    pub fn dominated_by(&self, other: &CountVector) -> bool {
        self.entries.len() == other.entries.len()
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a <= b)
    }
}

/// A positive dyadic weight sequence `r_0, r_1, …` with `Σ r_n ≤ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Dyadic>", into = "Vec<Dyadic>")]
pub struct Weights {
    values: Vec<Dyadic>,
}

impl TryFrom<Vec<Dyadic>> for Weights {
    type Error = ModelError;

    fn try_from(values: Vec<Dyadic>) -> Result<Self, Self::Error> {
        Weights::new(values)
    }
}

impl From<Weights> for Vec<Dyadic> {
    fn from(w: Weights) -> Self {
        w.values
    }
}

impl Weights {
    pub fn new(values: Vec<Dyadic>) -> Result<Self, ModelError> {
        if let Some(i) = values.iter().position(|w| *w <= Dyadic::ZERO) {
            return Err(ModelError::NonPositiveWeight(i));
        }
        let total: Dyadic = values.iter().sum();
        if total > Dyadic::ONE {
            return Err(ModelError::WeightSum(total));
        }
        Ok(Weights { values })
    }

    /// `r_n = 2^-(n+1)` for `n < depth`.
    pub fn standard(depth: usize) -> Self {
        Weights {
            values: (0..depth).map(|n| Dyadic::pow2_inv(n as u32 + 1)).collect(),
        }
    }

    pub fn is_standard(&self) -> bool {
        self.values
            .iter()
            .enumerate()
            .all(|(n, w)| *w == Dyadic::pow2_inv(n as u32 + 1))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, n: usize) -> Dyadic {
        self.values[n]
    }

    pub fn as_slice(&self) -> &[Dyadic] {
        &self.values
    }

    /// `M_n`, the integer part of `1 / r_n`.
    pub fn level_bound(&self, n: usize) -> u64 {
        let r = self.values[n];
        // 1/r = 2^e / k for r = k / 2^e
        ((1i128 << r.exponent()) / r.numerator()) as u64
    }

    fn check_depth(&self, depth: usize) -> Result<(), ModelError> {
        if self.values.len() < depth {
            Err(ModelError::WeightLength {
                weights: self.values.len(),
                depth,
            })
        } else {
            Ok(())
        }
    }

    /// `Σ_{n<d} r_n s_n`.
    pub fn weighted_sum(&self, s: &CountVector) -> Result<Dyadic, ModelError> {
        self.check_depth(s.depth())?;
        Ok(s.entries
            .iter()
            .zip(&self.values)
            .map(|(&c, &r)| r * c as i64)
            .sum())
    }
}

/// `s ∈ Z₀` iff `Σ_{n<d} r_n s_n ≤ 1`.
pub fn z0_membership(s: &CountVector, weights: &Weights) -> Result<bool, ModelError> {
    Ok(weights.weighted_sum(s)? <= Dyadic::ONE)
}

/// A downward closed set `Z` of count vectors, given by its membership test.
///
/// Implementations must satisfy: `contains(σ)` and `τ ≤ σ` coordinatewise
/// imply `contains(τ)`. `level_bound(n)` bounds `σ_n` over all members.
pub trait CountPredicate {
    fn contains(&self, s: &CountVector) -> bool;

    fn level_bound(&self, level: usize) -> u64;
}

/// `Z₀ = {s : Σ r_n s_n ≤ 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedBudget {
    weights: Weights,
}

impl WeightedBudget {
    pub fn new(weights: Weights) -> Self {
        WeightedBudget { weights }
    }

    pub fn standard(depth: usize) -> Self {
        WeightedBudget::new(Weights::standard(depth))
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }
}

impl CountPredicate for WeightedBudget {
    fn contains(&self, s: &CountVector) -> bool {
        // Levels beyond the weight family carry no budget; treat as excluded.
        z0_membership(s, &self.weights).unwrap_or(false)
    }

    fn level_bound(&self, level: usize) -> u64 {
        self.weights.level_bound(level)
    }
}

/// The box `Π_n {0, …, bound_n}`, the simplest downward closed `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountBox {
    bounds: Vec<u64>,
}

impl CountBox {
    pub fn new(bounds: Vec<u64>) -> Self {
        CountBox { bounds }
    }
}

impl CountPredicate for CountBox {
    fn contains(&self, s: &CountVector) -> bool {
        s.depth() <= self.bounds.len() && s.entries().iter().zip(&self.bounds).all(|(a, b)| a <= b)
    }

    fn level_bound(&self, level: usize) -> u64 {
        self.bounds.get(level).copied().unwrap_or(0)
    }
}

/// `x ∈ K(Z, Δ)` iff `(N_n(x))_n ∈ Z`.
pub fn k_membership<Z: CountPredicate + ?Sized>(x: &BitPoint, z: &Z) -> bool {
    z.contains(&count_vector(x))
}

/// For `x ∉ K(Z₀, Δ)`, a set `F` of levels with `Σ_{n∈F} r_n N_n(x) > 1`.
///
/// Levels are added greedily by decreasing `r_n N_n(x)` (ties by level) until
/// the partial sum exceeds 1. Any `y` whose bits contain those of `x` on
/// `F × Δ` is then also outside `K(Z₀, Δ)`. Returns `None` for members.
pub fn exclusion_certificate(
    x: &BitPoint,
    weights: &Weights,
) -> Result<Option<Vec<usize>>, ModelError> {
    let counts = count_vector(x);
    weights.check_depth(counts.depth())?;
    let mut terms: Vec<(usize, Dyadic)> = counts
        .entries()
        .iter()
        .enumerate()
        .map(|(n, &c)| (n, weights.get(n) * c as i64))
        .collect();
    terms.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut partial = Dyadic::ZERO;
    let mut levels = Vec::new();
    for (n, term) in terms {
        if term.is_zero() {
            break;
        }
        partial = partial + term;
        levels.push(n);
        if partial > Dyadic::ONE {
            levels.sort_unstable();
            return Ok(Some(levels));
        }
    }
    Ok(None)
}

/// Iterator over the members of `B(Δ)` (or `B⁺(Δ)`) whose coordinates lie in
/// `{k / 2^d : |k| < 2^d}`. Coordinate 0 varies fastest.
#[derive(Debug, Clone)]
pub struct GridEnumeration {
    index_set: IndexSet,
    exponent: u32,
    low: i128,
    high: i128,
    current: Option<Vec<i128>>,
}

/// Enumerates the depth-`d` dyadic grid of `B(Δ)`, excluding coordinates `±1`.
pub fn enumerate_grid(
    index_set: IndexSet,
    exponent: u32,
    positive_only: bool,
) -> Result<GridEnumeration, ModelError> {
    let high = (1i128 << exponent) - 1;
    let low = if positive_only { 0 } else { -high };
    let per_coord = (high - low + 1) as u128;
    let candidates = (0..index_set.size()).try_fold(1u128, |acc, _| {
        acc.checked_mul(per_coord).filter(|c| *c <= GRID_GUARD)
    });
    match candidates {
        Some(_) => Ok(GridEnumeration {
            index_set,
            exponent,
            low,
            high,
            current: Some(vec![low; index_set.size()]),
        }),
        None => Err(ModelError::GuardExceeded {
            candidates: per_coord.saturating_pow(index_set.size().min(u32::MAX as usize) as u32),
        }),
    }
}

impl GridEnumeration {
    fn advance(&mut self) {
        let Some(cur) = self.current.as_mut() else {
            return;
        };
        for k in cur.iter_mut() {
            if *k < self.high {
                *k += 1;
                return;
            }
            *k = self.low;
        }
        self.current = None;
    }
}

impl Iterator for GridEnumeration {
    type Item = GridVector;

    fn next(&mut self) -> Option<GridVector> {
        let budget = 1i128 << self.exponent;
        loop {
            let cur = self.current.as_ref()?;
            let l1: i128 = cur.iter().map(|k| k.abs()).sum();
            let item = (l1 <= budget).then(|| {
                let coords = cur
                    .iter()
                    .enumerate()
                    .map(|(i, &k)| (i, Dyadic::new(k, self.exponent).expect("grid exponent")));
                GridVector::new(self.index_set, coords).expect("grid point inside cube")
            });
            self.advance();
            if item.is_some() {
                return item;
            }
        }
    }
}

/// One block of an [`L1Element`]: the factors `x^{m,0}, …, x^{m,M_m}`, with
/// `x^{m,i} ∈ σ_i(Δ)`.
pub type L1Block = Vec<SigmaSet>;

/// A point `(z, x)` of `L₁ = Z × Π_m Π_{i=0}^{M_m} σ_i(Δ)` truncated at depth `d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct L1Element {
    z: CountVector,
    blocks: Vec<L1Block>,
}

#[derive(Deserialize)]
struct RawL1Element {
    z: CountVector,
    blocks: Vec<L1Block>,
}

impl<'de> Deserialize<'de> for L1Element {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = RawL1Element::deserialize(de)?;
        L1Element::from_parts(raw.z, raw.blocks).map_err(serde::de::Error::custom)
    }
}

impl L1Element {
    /// Checks `z ∈ Z`, the block count, and that factor `i` of each block has cap `i`.
    pub fn new<Z: CountPredicate + ?Sized>(
        z: CountVector,
        blocks: Vec<L1Block>,
        z_set: &Z,
    ) -> Result<Self, ModelError> {
        if !z_set.contains(&z) {
            return Err(ModelError::NotInZ {
                entries: z.entries().to_vec(),
            });
        }
        L1Element::from_parts(z, blocks)
    }

    fn from_parts(z: CountVector, blocks: Vec<L1Block>) -> Result<Self, ModelError> {
        if blocks.len() != z.depth() {
            return Err(ModelError::DepthMismatch(z.depth(), blocks.len()));
        }
        let index_set = blocks
            .first()
            .and_then(|b| b.first())
            .map(SigmaSet::index_set);
        for (m, block) in blocks.iter().enumerate() {
            if (z.get(m) as usize) >= block.len() {
                return Err(ModelError::BlockShape {
                    level: m,
                    found: block.len(),
                    expected: z.get(m) as usize + 1,
                });
            }
            for (i, factor) in block.iter().enumerate() {
                if factor.cap() != i {
                    return Err(ModelError::FactorCap {
                        level: m,
                        cap: i,
                        found: factor.cap(),
                    });
                }
                if Some(factor.index_set()) != index_set {
                    return Err(ModelError::IndexSetMismatch(
                        factor.index_set(),
                        index_set.expect("nonempty block"),
                    ));
                }
            }
        }
        Ok(L1Element { z, blocks })
    }

    /// The point whose factors are all empty, with blocks sized by `bounds`.
    pub fn empty<Z: CountPredicate + ?Sized>(
        index_set: IndexSet,
        z: CountVector,
        z_set: &Z,
    ) -> Result<Self, ModelError> {
        let blocks = (0..z.depth())
            .map(|m| {
                (0..=z_set.level_bound(m) as usize)
                    .map(|i| SigmaSet::empty(index_set, i))
                    .collect()
            })
            .collect();
        L1Element::new(z, blocks, z_set)
    }

    pub fn z(&self) -> &CountVector {
        &self.z
    }

    pub fn blocks(&self) -> &[L1Block] {
        &self.blocks
    }

    pub fn factor(&self, level: usize, cap: usize) -> &SigmaSet {
        &self.blocks[level][cap]
    }

    pub fn depth(&self) -> usize {
        self.z.depth()
    }

    pub fn index_set(&self) -> IndexSet {
        self.blocks[0][0].index_set()
    }

    /// Replaces `x^{level,cap}`; the new set must have cap `cap`.
    pub fn set_factor(
        &mut self,
        level: usize,
        cap: usize,
        set: SigmaSet,
    ) -> Result<(), ModelError> {
        if set.cap() != cap {
            return Err(ModelError::FactorCap {
                level,
                cap,
                found: set.cap(),
            });
        }
        if set.index_set() != self.index_set() {
            return Err(ModelError::IndexSetMismatch(
                set.index_set(),
                self.index_set(),
            ));
        }
        let block = &mut self.blocks[level];
        if cap >= block.len() {
            return Err(ModelError::BlockShape {
                level,
                found: block.len(),
                expected: cap + 1,
            });
        }
        block[cap] = set;
        Ok(())
    }

    /// Replaces the `Z` component, keeping the factors.
    pub fn set_z<Z: CountPredicate + ?Sized>(
        &mut self,
        z: CountVector,
        z_set: &Z,
    ) -> Result<(), ModelError> {
        if !z_set.contains(&z) {
            return Err(ModelError::NotInZ {
                entries: z.entries().to_vec(),
            });
        }
        if z.depth() != self.z.depth() {
            return Err(ModelError::DepthMismatch(self.z.depth(), z.depth()));
        }
        if let Some(m) = (0..z.depth()).find(|&m| z.get(m) as usize >= self.blocks[m].len()) {
            return Err(ModelError::BlockShape {
                level: m,
                found: self.blocks[m].len(),
                expected: z.get(m) as usize + 1,
            });
        }
        self.z = z;
        Ok(())
    }
}

/// JSON form of a [`BitPoint`]: `{"index_set", "depth", "bits": [[γ, n], …]}`.
#[derive(Serialize, Deserialize)]
struct BitPointJson {
    index_set: IndexSet,
    depth: usize,
    bits: Vec<[usize; 2]>,
}

impl Serialize for BitPoint {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        BitPointJson {
            index_set: self.index_set,
            depth: self.depth,
            bits: self.support().map(|(g, n)| [g, n]).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BitPoint {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = BitPointJson::deserialize(de)?;
        BitPoint::from_support(
            raw.index_set,
            raw.depth,
            raw.bits.into_iter().map(|[g, n]| (g, n)),
        )
        .map_err(serde::de::Error::custom)
    }
}

/// JSON form of a [`GridVector`]: `{"index_set", "coords": [{"index", "num", "exp"}, …]}`.
#[derive(Serialize, Deserialize)]
struct GridVectorJson {
    index_set: IndexSet,
    coords: Vec<GridCoordJson>,
}

#[derive(Serialize, Deserialize)]
struct GridCoordJson {
    index: usize,
    num: i128,
    exp: u32,
}

impl Serialize for GridVector {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        GridVectorJson {
            index_set: self.index_set,
            coords: self
                .nonzero()
                .map(|(index, value)| GridCoordJson {
                    index,
                    num: value.numerator(),
                    exp: value.exponent(),
                })
                .collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for GridVector {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = GridVectorJson::deserialize(de)?;
        let coords = raw
            .coords
            .into_iter()
            .map(|c| Ok((c.index, Dyadic::new(c.num, c.exp)?)))
            .collect::<Result<Vec<_>, ModelError>>()
            .map_err(serde::de::Error::custom)?;
        GridVector::new(raw.index_set, coords).map_err(serde::de::Error::custom)
    }
}
