//! The maps of the surjection `σ₁(Γ)^ℕ → B(Γ)`, truncated at depth `d`.
//!
//! The chain runs
//!
//! ```text
//! source ──decode──▶ L₁ ──g──▶ K(Z,Γ°) = L₀ ──f = φ^Γ°──▶ B⁺(Γ°) ──ψ──▶ B(Γ)
//! ```
//!
//! Every stage has a forward evaluator and a section (right inverse) on the
//! dyadic grid of its target. Sections exist only for the standard weights
//! `r_n = 2^-(n+1)`, where `φ` is plain binary expansion.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::model::{
    b_membership, count_vector, enumerate_grid, k_membership, BitPoint, CountPredicate,
    CountVector, GridVector, IndexSet, L1Element, ModelError, SigmaSet, Tag, WeightedBudget,
    Weights,
};

/// Largest `|Z_d|` the chain configuration will enumerate.
pub const Z_GUARD: usize = 1_000_000;

/// Absolute tolerance for the floating point map `h`.
pub const H_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapId {
    H,
    Psi,
    Phi,
    PhiPower,
    F,
    Union,
    G,
    Compose,
}

impl MapId {
    pub const ALL: [MapId; 8] = [
        MapId::H,
        MapId::Psi,
        MapId::Phi,
        MapId::PhiPower,
        MapId::F,
        MapId::Union,
        MapId::G,
        MapId::Compose,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MapId::H => "h",
            MapId::Psi => "psi",
            MapId::Phi => "phi",
            MapId::PhiPower => "phi_power",
            MapId::F => "f",
            MapId::Union => "union",
            MapId::G => "g",
            MapId::Compose => "compose",
        }
    }
}

impl fmt::Display for MapId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MapId {
    type Err = MapError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MapId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| MapError::UnknownMap(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("exponent p = {0} must exceed 1")]
    InvalidExponent(f64),
    #[error("input is not in B⁺ over a doubled index set")]
    NotInPositiveBall,
    #[error("input is not in B")]
    NotInBall,
    #[error("{0} is unreachable at finite depth {1}")]
    UnreachableAtFiniteDepth(Dyadic, usize),
    #[error("{value} needs denominator 2^{exponent}, beyond depth {depth}")]
    TooFine {
        value: Dyadic,
        exponent: u32,
        depth: usize,
    },
    #[error("sections need the standard weights r_n = 2^-(n+1)")]
    UnsupportedWeights,
    #[error("bit point is not in L₀ = K(Z₀, Δ)")]
    NotInL0,
    #[error("bit point is not in K(Z, Δ)")]
    NotInK,
    #[error("union part {0} is not a cap-1 set over the shared index set")]
    BadUnionPart(usize),
    #[error("set of size {size} cannot be split into {parts} singletons")]
    UnionSectionTooSmall { size: usize, parts: usize },
    #[error("source layout mismatch: {0}")]
    Layout(String),
    #[error("|Z_d| = {0} exceeds the enumeration guard of {Z_GUARD}")]
    ZGuardExceeded(usize),
    #[error("unknown map id {0:?}")]
    UnknownMap(String),
    #[error("no locality report for map {0}")]
    NoLocality(MapId),
    #[error("output coordinate {0:?} does not belong to map {1}")]
    BadCoordinate(OutputCoord, MapId),
    #[error("{stage} stage: {source}")]
    Stage {
        stage: MapId,
        #[source]
        source: Box<MapError>,
    },
}

impl MapError {
    fn at(stage: MapId) -> impl FnOnce(MapError) -> MapError {
        move |e| MapError::Stage {
            stage,
            source: Box::new(e),
        }
    }

    /// The chain stage that raised this error, if it came out of `compose_section`.
    pub fn stage(&self) -> Option<MapId> {
        match self {
            MapError::Stage { stage, .. } => Some(*stage),
            _ => None,
        }
    }
}

fn check_p(p: f64) -> Result<(), MapError> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(MapError::InvalidExponent(p))
    }
}

/// `h(x)_γ = sign(x_γ) |x_γ|^p`, the homeomorphism from the `ℓ_p` ball onto `B`.
pub fn h_forward(x: &[f64], p: f64) -> Result<Vec<f64>, MapError> {
    check_p(p)?;
    Ok(x.iter().map(|v| v.signum() * v.abs().powf(p)).collect())
}

pub fn h_inverse(y: &[f64], p: f64) -> Result<Vec<f64>, MapError> {
    check_p(p)?;
    Ok(y.iter()
        .map(|v| v.signum() * v.abs().powf(p.recip()))
        .collect())
}

/// `ψ(x)_γ = x_(γ,a) - x_(γ,b)`, from `B⁺(Γ°)` onto `B(Γ)`.
pub fn psi_forward(x: &GridVector) -> Result<GridVector, MapError> {
    let doubled = x.index_set();
    if !doubled.is_doubled() || !b_membership(x, true) {
        return Err(MapError::NotInPositiveBall);
    }
    let base = IndexSet::new(doubled.base_size())?;
    let coords = (0..base.size()).map(|g| {
        let a = x.get(IndexSet::tagged(g, Tag::A));
        let b = x.get(IndexSet::tagged(g, Tag::B));
        (g, a - b)
    });
    Ok(GridVector::new(base, coords)?)
}

/// Splits `t` into positive and negative parts over `Γ°`.
pub fn psi_section(t: &GridVector) -> Result<GridVector, MapError> {
    if !b_membership(t, false) {
        return Err(MapError::NotInBall);
    }
    let doubled = IndexSet::doubled(t.index_set().size())?;
    let coords = t.nonzero().map(|(g, v)| {
        if v.is_negative() {
            (IndexSet::tagged(g, Tag::B), -v)
        } else {
            (IndexSet::tagged(g, Tag::A), v)
        }
    });
    Ok(GridVector::new(doubled, coords)?)
}

/// `φ(x) = Σ_n r_n x_n`.
pub fn phi_forward(bits: &[bool], weights: &Weights) -> Result<Dyadic, MapError> {
    if weights.len() < bits.len() {
        return Err(ModelError::WeightLength {
            weights: weights.len(),
            depth: bits.len(),
        }
        .into());
    }
    Ok(bits
        .iter()
        .zip(weights.as_slice())
        .filter(|(b, _)| **b)
        .map(|(_, r)| *r)
        .sum())
}

/// The depth-`depth` binary expansion of `t ∈ [0, 1)`.
pub fn phi_section(t: Dyadic, depth: usize, weights: &Weights) -> Result<Vec<bool>, MapError> {
    if weights.len() < depth
        || !weights.as_slice()[..depth]
            .iter()
            .enumerate()
            .all(|(n, w)| *w == Dyadic::pow2_inv(n as u32 + 1))
    {
        return Err(MapError::UnsupportedWeights);
    }
    if t.is_negative() || t >= Dyadic::ONE {
        return Err(MapError::UnreachableAtFiniteDepth(t, depth));
    }
    let k = t.scaled_numerator(depth as u32).ok_or(MapError::TooFine {
        value: t,
        exponent: t.exponent(),
        depth,
    })?;
    Ok((0..depth)
        .map(|n| (k >> (depth - 1 - n)) & 1 == 1)
        .collect())
}

/// `φ^Δ`: applies `φ` to every row of `x`.
pub fn phi_power_forward(x: &BitPoint, weights: &Weights) -> Result<GridVector, MapError> {
    let index_set = x.index_set();
    let mut out = GridVector::zero(index_set);
    for gamma in 0..index_set.size() {
        let value = phi_forward(&x.row(gamma), weights)?;
        // a single row sums to at most Σ r_n ≤ 1
        out.set(gamma, value)?;
    }
    Ok(out)
}

/// `f = φ^Δ` restricted to `L₀ = K(Z₀, Δ)`.
pub fn f_forward(x: &BitPoint, weights: &Weights) -> Result<GridVector, MapError> {
    if weights.len() < x.depth() {
        return Err(ModelError::WeightLength {
            weights: weights.len(),
            depth: x.depth(),
        }
        .into());
    }
    if !k_membership(x, &WeightedBudget::new(weights.clone())) {
        return Err(MapError::NotInL0);
    }
    phi_power_forward(x, weights)
}

/// Row-wise binary expansion of a grid point of `B⁺(Δ)`; the result lies in `L₀`.
pub fn f_section(t: &GridVector, depth: usize, weights: &Weights) -> Result<BitPoint, MapError> {
    if !b_membership(t, true) {
        return Err(MapError::NotInPositiveBall);
    }
    let mut x = BitPoint::zero(t.index_set(), depth)?;
    for (gamma, value) in t.nonzero() {
        for (level, bit) in phi_section(value, depth, weights)?.into_iter().enumerate() {
            if bit {
                x.set(gamma, level, true)?;
            }
        }
    }
    Ok(x)
}

/// `p(x_1, …, x_i) = x_1 ∪ ⋯ ∪ x_i`, from `σ₁(Δ)^i` onto `σ_i(Δ)`.
pub fn union_map(index_set: IndexSet, parts: &[SigmaSet]) -> Result<SigmaSet, MapError> {
    let mut members = BTreeSet::new();
    for (k, part) in parts.iter().enumerate() {
        if part.cap() != 1 || part.index_set() != index_set {
            return Err(MapError::BadUnionPart(k));
        }
        members.extend(part.members().iter().copied());
    }
    Ok(SigmaSet::new(
        index_set,
        parts.len(),
        members.into_iter().collect(),
    )?)
}

/// One member per part, padded with empty parts.
pub fn union_section(set: &SigmaSet, parts: usize) -> Result<Vec<SigmaSet>, MapError> {
    if set.len() > parts {
        return Err(MapError::UnionSectionTooSmall {
            size: set.len(),
            parts,
        });
    }
    let index_set = set.index_set();
    let mut out: Vec<SigmaSet> = set
        .members()
        .iter()
        .map(|&m| SigmaSet::singleton(index_set, m))
        .collect::<Result<_, _>>()?;
    out.resize(parts, SigmaSet::empty(index_set, 1));
    Ok(out)
}

/// `g(z, x)_(γ,m) = x^{m, z(m)}_γ`.
pub fn g_forward(e: &L1Element) -> BitPoint {
    let support = (0..e.depth()).flat_map(|m| {
        let chosen = e.factor(m, e.z().get(m) as usize);
        chosen.members().iter().map(move |&g| (g, m))
    });
    BitPoint::from_support(e.index_set(), e.depth(), support)
        .expect("factors live in the index set")
}

/// `z = N(y)`, with `x^{m, z(m)}` the `m`-th column of `y` and every other factor empty.
pub fn g_section<Z: CountPredicate + ?Sized>(
    y: &BitPoint,
    z_set: &Z,
) -> Result<L1Element, MapError> {
    if !k_membership(y, z_set) {
        return Err(MapError::NotInK);
    }
    let z = count_vector(y);
    let index_set = y.index_set();
    let mut e = L1Element::empty(index_set, z.clone(), z_set)?;
    for m in 0..y.depth() {
        let column: Vec<usize> = (0..index_set.size()).filter(|&g| y.bit(g, m)).collect();
        let cap = z.get(m) as usize;
        e.set_factor(m, cap, SigmaSet::new(index_set, cap, column)?)?;
    }
    Ok(e)
}

/// The downward closed set used by the chain: `Z₀ ∩ Π_n {0, …, min(M_n, |Δ|)}`.
///
/// Column counts never exceed `|Δ|`, so `K(·, Δ)` is the same as for `Z₀`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainZ {
    budget: WeightedBudget,
    bounds: Vec<u64>,
}

impl ChainZ {
    pub fn new(weights: Weights, index_size: usize) -> Self {
        let bounds = (0..weights.len())
            .map(|n| weights.level_bound(n).min(index_size as u64))
            .collect();
        ChainZ {
            budget: WeightedBudget::new(weights),
            bounds,
        }
    }

    pub fn bounds(&self) -> &[u64] {
        &self.bounds
    }

    /// All members of depth `bounds.len()`, in lexicographic order.
    pub fn enumerate(&self, limit: usize) -> Result<Vec<CountVector>, MapError> {
        let weights = self.budget.weights();
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(self.bounds.len());
        self.extend(weights, &mut prefix, Dyadic::ZERO, &mut out, limit)?;
        Ok(out)
    }

    fn extend(
        &self,
        weights: &Weights,
        prefix: &mut Vec<u64>,
        used: Dyadic,
        out: &mut Vec<CountVector>,
        limit: usize,
    ) -> Result<(), MapError> {
        let level = prefix.len();
        if level == self.bounds.len() {
            if out.len() == limit {
                return Err(MapError::ZGuardExceeded(limit + 1));
            }
            out.push(CountVector::new(prefix.clone()));
            return Ok(());
        }
        for s in 0..=self.bounds[level] {
            let total = used + weights.get(level) * s as i64;
            if total > Dyadic::ONE {
                break;
            }
            prefix.push(s);
            self.extend(weights, prefix, total, out, limit)?;
            prefix.pop();
        }
        Ok(())
    }
}

impl CountPredicate for ChainZ {
    fn contains(&self, s: &CountVector) -> bool {
        s.depth() <= self.bounds.len()
            && s.entries().iter().zip(&self.bounds).all(|(a, b)| a <= b)
            && self.budget.contains(s)
    }

    fn level_bound(&self, level: usize) -> u64 {
        self.bounds[level]
    }
}

/// Bookkeeping for the composed surjection at a fixed `|Γ|` and depth.
///
/// A source point is a sequence of cap-1 sets over `Γ°`. The first
/// `z_blocks` of them encode an index into the enumeration of `Z_d` (block
/// `j` nonempty ↦ bit `j`, reduced modulo `|Z_d|`). After that, for each level
/// `m` and each `1 ≤ i ≤ M_m`, come `i` blocks whose union is the factor
/// `x^{m,i}`. The factor `x^{m,0}` is always empty.
#[derive(Debug, Clone)]
pub struct ChainConfig {
    gamma_size: usize,
    depth: usize,
    weights: Weights,
    z: ChainZ,
    z_members: Vec<CountVector>,
    z_blocks: usize,
    factor_offsets: Vec<Vec<usize>>,
    source_len: usize,
}

impl ChainConfig {
    pub fn new(gamma_size: usize, depth: usize) -> Result<Self, MapError> {
        ChainConfig::with_weights(gamma_size, depth, Weights::standard(depth))
    }

    pub fn with_weights(
        gamma_size: usize,
        depth: usize,
        weights: Weights,
    ) -> Result<Self, MapError> {
        let doubled = IndexSet::doubled(gamma_size)?;
        if depth == 0 {
            return Err(ModelError::ZeroDepth.into());
        }
        if weights.len() != depth {
            return Err(ModelError::WeightLength {
                weights: weights.len(),
                depth,
            }
            .into());
        }
        let z = ChainZ::new(weights.clone(), doubled.size());
        let z_members = z.enumerate(Z_GUARD)?;
        let z_blocks = z_members.len().next_power_of_two().trailing_zeros() as usize;
        let mut next = z_blocks;
        let factor_offsets = z
            .bounds()
            .iter()
            .map(|&bound| {
                (0..=bound as usize)
                    .map(|i| {
                        let start = next;
                        next += i;
                        start
                    })
                    .collect()
            })
            .collect();
        Ok(ChainConfig {
            gamma_size,
            depth,
            weights,
            z,
            z_members,
            z_blocks,
            factor_offsets,
            source_len: next,
        })
    }

    pub fn gamma_size(&self) -> usize {
        self.gamma_size
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn weights(&self) -> &Weights {
        &self.weights
    }

    pub fn z(&self) -> &ChainZ {
        &self.z
    }

    pub fn gamma(&self) -> IndexSet {
        IndexSet::new(self.gamma_size).expect("positive size")
    }

    pub fn doubled(&self) -> IndexSet {
        IndexSet::doubled(self.gamma_size).expect("positive size")
    }

    /// `|Z_d|`.
    pub fn z_count(&self) -> usize {
        self.z_members.len()
    }

    pub fn z_blocks(&self) -> usize {
        self.z_blocks
    }

    /// Total number of cap-1 blocks in a source point.
    pub fn source_len(&self) -> usize {
        self.source_len
    }

    /// Source block range feeding the factor `x^{level, cap}`.
    pub fn factor_blocks(&self, level: usize, cap: usize) -> std::ops::Range<usize> {
        let start = self.factor_offsets[level][cap];
        start..start + cap
    }
}

/// A truncated point of `σ₁(Γ°)^ℕ`, laid out per [`ChainConfig`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourcePoint {
    index_set: IndexSet,
    blocks: Vec<SigmaSet>,
}

impl SourcePoint {
    pub fn empty(config: &ChainConfig) -> Self {
        SourcePoint {
            index_set: config.doubled(),
            blocks: vec![SigmaSet::empty(config.doubled(), 1); config.source_len()],
        }
    }

    pub fn new(index_set: IndexSet, blocks: Vec<SigmaSet>) -> Result<Self, MapError> {
        if let Some(k) = blocks
            .iter()
            .position(|b| b.cap() != 1 || b.index_set() != index_set)
        {
            return Err(MapError::Layout(format!(
                "block {k} is not a cap-1 set over {index_set:?}"
            )));
        }
        Ok(SourcePoint { index_set, blocks })
    }

    /// Builds a point from the optional member of each block.
    pub fn from_members(index_set: IndexSet, members: &[Option<usize>]) -> Result<Self, MapError> {
        let blocks = members
            .iter()
            .map(|m| match m {
                Some(g) => SigmaSet::singleton(index_set, *g),
                None => Ok(SigmaSet::empty(index_set, 1)),
            })
            .collect::<Result<_, _>>()?;
        Ok(SourcePoint { index_set, blocks })
    }

    pub fn index_set(&self) -> IndexSet {
        self.index_set
    }

    pub fn blocks(&self) -> &[SigmaSet] {
        &self.blocks
    }

    pub fn member(&self, block: usize) -> Option<usize> {
        self.blocks[block].members().first().copied()
    }

    pub fn set_member(&mut self, block: usize, member: Option<usize>) -> Result<(), MapError> {
        self.blocks[block] = match member {
            Some(g) => SigmaSet::singleton(self.index_set, g)?,
            None => SigmaSet::empty(self.index_set, 1),
        };
        Ok(())
    }

    fn check_layout(&self, config: &ChainConfig) -> Result<(), MapError> {
        if self.index_set != config.doubled() {
            return Err(MapError::Layout(format!(
                "source over {:?}, configuration expects {:?}",
                self.index_set,
                config.doubled()
            )));
        }
        if self.blocks.len() != config.source_len() {
            return Err(MapError::Layout(format!(
                "{} blocks, configuration expects {}",
                self.blocks.len(),
                config.source_len()
            )));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct SourcePointJson {
    index_set: IndexSet,
    blocks: Vec<Vec<usize>>,
}

impl Serialize for SourcePoint {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        SourcePointJson {
            index_set: self.index_set,
            blocks: self.blocks.iter().map(|b| b.members().to_vec()).collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for SourcePoint {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = SourcePointJson::deserialize(de)?;
        let blocks = raw
            .blocks
            .into_iter()
            .map(|m| SigmaSet::new(raw.index_set, 1, m))
            .collect::<Result<_, _>>()
            .map_err(serde::de::Error::custom)?;
        SourcePoint::new(raw.index_set, blocks).map_err(serde::de::Error::custom)
    }
}

/// Reads the `L₁` point encoded by a source point.
pub fn decode_source(s: &SourcePoint, config: &ChainConfig) -> Result<L1Element, MapError> {
    s.check_layout(config)?;
    let code = (0..config.z_blocks())
        .filter(|&j| !s.blocks[j].is_empty())
        .fold(0usize, |acc, j| acc | (1 << j));
    let z = config.z_members[code % config.z_count()].clone();
    let index_set = s.index_set;
    let blocks = config
        .z
        .bounds()
        .iter()
        .enumerate()
        .map(|(m, &bound)| {
            (0..=bound as usize)
                .map(|i| union_map(index_set, &s.blocks[config.factor_blocks(m, i)]))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(L1Element::new(z, blocks, &config.z)?)
}

/// Inverse of [`decode_source`] on its image.
pub fn encode_source(e: &L1Element, config: &ChainConfig) -> Result<SourcePoint, MapError> {
    if e.index_set() != config.doubled() || e.depth() != config.depth() {
        return Err(MapError::Layout(
            "L₁ point does not match the configuration".into(),
        ));
    }
    let code = config.z_members.binary_search(e.z()).map_err(|_| {
        MapError::from(ModelError::NotInZ {
            entries: e.z().entries().to_vec(),
        })
    })?;
    let mut s = SourcePoint::empty(config);
    for j in 0..config.z_blocks() {
        if code >> j & 1 == 1 {
            s.set_member(j, Some(0))?;
        }
    }
    for (m, block) in e.blocks().iter().enumerate() {
        if block.len() != config.z.bounds()[m] as usize + 1 {
            return Err(MapError::Layout(format!(
                "level {m} has {} factors",
                block.len()
            )));
        }
        for (i, factor) in block.iter().enumerate() {
            let range = config.factor_blocks(m, i);
            for (slot, part) in range.zip(union_section(factor, i)?) {
                s.blocks[slot] = part;
            }
        }
    }
    Ok(s)
}

/// `ψ ∘ f ∘ g ∘ decode`, from the truncated `σ₁(Γ°)^ℕ` onto `B(Γ)`.
pub fn compose_forward(s: &SourcePoint, config: &ChainConfig) -> Result<GridVector, MapError> {
    let e = decode_source(s, config)?;
    let y = g_forward(&e);
    let x = f_forward(&y, config.weights()).map_err(MapError::at(MapId::F))?;
    psi_forward(&x).map_err(MapError::at(MapId::Psi))
}

/// A source point whose image under [`compose_forward`] is exactly `t`.
pub fn compose_section(t: &GridVector, config: &ChainConfig) -> Result<SourcePoint, MapError> {
    if t.index_set() != config.gamma() {
        return Err(MapError::Layout(format!(
            "target over {:?}, configuration expects {:?}",
            t.index_set(),
            config.gamma()
        )));
    }
    let x = psi_section(t).map_err(MapError::at(MapId::Psi))?;
    let y = f_section(&x, config.depth(), config.weights()).map_err(|e| match e {
        e @ (MapError::UnreachableAtFiniteDepth(..) | MapError::TooFine { .. }) => {
            MapError::at(MapId::Phi)(e)
        }
        e => MapError::at(MapId::F)(e),
    })?;
    let e = g_section(&y, &config.z).map_err(MapError::at(MapId::G))?;
    encode_source(&e, config).map_err(MapError::at(MapId::Compose))
}

/// Result of an exhaustive round trip over the dyadic grid of `B(Γ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub gamma_size: usize,
    pub depth: usize,
    pub grid_size: usize,
    pub hits: usize,
    /// Grid points whose lift failed or did not map back exactly.
    pub misses: Vec<GridVector>,
}

impl CoverageReport {
    pub fn percent(&self) -> f64 {
        if self.grid_size == 0 {
            100.0
        } else {
            100.0 * self.hits as f64 / self.grid_size as f64
        }
    }

    pub fn is_complete(&self) -> bool {
        self.hits == self.grid_size
    }
}

/// Lifts every grid point of `B(Γ)` at denominator `2^depth` through
/// [`compose_section`] and checks that [`compose_forward`] returns it.
pub fn coverage(gamma_size: usize, depth: usize) -> Result<CoverageReport, MapError> {
    let grid: Vec<GridVector> =
        enumerate_grid(IndexSet::new(gamma_size)?, depth as u32, false)?.collect();
    let config = ChainConfig::new(gamma_size, depth)?;
    let misses: Vec<GridVector> = grid
        .par_iter()
        .filter(|t| {
            !compose_section(t, &config)
                .and_then(|s| compose_forward(&s, &config))
                .is_ok_and(|image| &image == *t)
        })
        .cloned()
        .collect();
    Ok(CoverageReport {
        gamma_size,
        depth,
        grid_size: grid.len(),
        hits: grid.len() - misses.len(),
        misses,
    })
}

/// Nearest grid point of depth `depth` inside `B(Γ)`, rounding magnitudes down
/// and away from `±1`; the sup-norm error is at most `2^-depth`.
pub fn grid_approximation(t: &[f64], depth: usize) -> Result<GridVector, MapError> {
    let index_set = IndexSet::new(t.len().max(1))?;
    let scale = 2f64.powi(depth as i32);
    let top = (1i128 << depth) - 1;
    let coords =
        t.iter()
            .map(|&v| {
                if !v.is_finite() {
                    return Err(MapError::NotInBall);
                }
                let k = ((v.abs() * scale).floor() as i128).min(top);
                Ok(Dyadic::new(if v < 0.0 { -k } else { k }, depth as u32)
                    .map_err(ModelError::from)?)
            })
            .collect::<Result<Vec<_>, MapError>>()?;
    let g = GridVector::from_dense(index_set, &coords).map_err(|_| MapError::NotInBall)?;
    if !b_membership(&g, false) {
        return Err(MapError::NotInBall);
    }
    Ok(g)
}

/// A coordinate of a map's output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputCoord {
    Index(usize),
    Bit { index: usize, level: usize },
}

/// A coordinate of a map's input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputCoord {
    /// Coordinate of a grid vector.
    Grid(usize),
    /// Bit `(index, level)` of a bit point.
    Bit { index: usize, level: usize },
    /// Entry `z(level)` of an `L₁` point.
    Count(usize),
    /// Coordinate `x^{level,cap}_index` of an `L₁` point.
    Factor {
        level: usize,
        cap: usize,
        index: usize,
    },
    /// Membership of `index` in source block `block`.
    Source { block: usize, index: usize },
}

/// The input coordinates an output coordinate depends on.
pub fn locality_report(
    map: MapId,
    output: OutputCoord,
    config: &ChainConfig,
) -> Result<BTreeSet<InputCoord>, MapError> {
    let doubled = config.doubled();
    let depth = config.depth();
    match (map, output) {
        (MapId::Psi, OutputCoord::Index(g)) if g < config.gamma_size() => Ok([
            InputCoord::Grid(IndexSet::tagged(g, Tag::A)),
            InputCoord::Grid(IndexSet::tagged(g, Tag::B)),
        ]
        .into()),
        (MapId::PhiPower, OutputCoord::Index(i)) if i < doubled.size() => Ok((0..depth)
            .map(|level| InputCoord::Bit { index: i, level })
            .collect()),
        (MapId::G, OutputCoord::Bit { index, level })
            if index < doubled.size() && level < depth =>
        {
            let mut deps: BTreeSet<_> = (0..=config.z().bounds()[level] as usize)
                .map(|cap| InputCoord::Factor { level, cap, index })
                .collect();
            deps.insert(InputCoord::Count(level));
            Ok(deps)
        }
        (MapId::Compose, OutputCoord::Index(g)) if g < config.gamma_size() => {
            let mut deps: BTreeSet<_> = (0..config.z_blocks())
                .flat_map(|block| {
                    (0..doubled.size()).map(move |index| InputCoord::Source { block, index })
                })
                .collect();
            let rows = [IndexSet::tagged(g, Tag::A), IndexSet::tagged(g, Tag::B)];
            for (level, &bound) in config.z().bounds().iter().enumerate() {
                for cap in 0..=bound as usize {
                    for block in config.factor_blocks(level, cap) {
                        deps.extend(
                            rows.iter()
                                .map(|&index| InputCoord::Source { block, index }),
                        );
                    }
                }
            }
            Ok(deps)
        }
        (MapId::Psi | MapId::PhiPower | MapId::G | MapId::Compose, c) => {
            Err(MapError::BadCoordinate(c, map))
        }
        (other, _) => Err(MapError::NoLocality(other)),
    }
}
