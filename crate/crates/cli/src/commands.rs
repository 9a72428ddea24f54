use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sigmaball::maps::{
    compose_forward, compose_section, coverage, f_forward, f_section, g_forward, g_section,
    h_forward, h_inverse, phi_forward, phi_power_forward, phi_section, psi_forward, psi_section,
    union_map, union_section, ChainConfig, ChainZ, MapId, SourcePoint,
};
use sigmaball::model::{BitPoint, GridVector, IndexSet, L1Element, SigmaSet, Weights};
use sigmaball::norms::{
    ball_membership, disjointness_check, in_u, in_v, lp_norm, prime_norm, NormParams, PairVector,
    SierpinskiGraph,
};
use sigmaball::ramsey::{erdos_szekeres_check, scaling_experiment, EsMode, ScalingRow};
use sigmaball::Dyadic;

use crate::config::{Config, OutputFormat};
use crate::failure::Failure;

/// Where command output goes: `output_path` if set, stdout otherwise.
pub fn emit(config: &Config, text: &str) -> Result<(), Failure> {
    match &config.output_path {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(config: &Config, value: &T) -> Result<(), Failure> {
    emit(config, &(serde_json::to_string_pretty(value)? + "\n"))
}

fn read_input<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?)
}

fn dyadic_json(value: Dyadic) -> Value {
    json!({ "num": value.numerator(), "exp": value.exponent(), "value": value.to_string() })
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Bits {
    Flags(Vec<bool>),
    Digits(Vec<u8>),
}

impl Bits {
    fn into_bools(self) -> Result<Vec<bool>, Failure> {
        match self {
            Bits::Flags(b) => Ok(b),
            Bits::Digits(d) => d
                .into_iter()
                .map(|v| match v {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(Failure::Domain(format!("bit {other} is not 0 or 1"))),
                })
                .collect(),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DyadicInput {
    Text(String),
    Exact(Dyadic),
}

#[derive(Deserialize)]
struct UnionInput {
    index_set: IndexSet,
    parts: Vec<SigmaSet>,
}

#[derive(Deserialize)]
struct UnionLift {
    set: SigmaSet,
    parts: usize,
}

fn source_config(index_set: IndexSet, config: &Config) -> Result<ChainConfig, Failure> {
    if !index_set.is_doubled() {
        return Err(Failure::Domain(
            "source points live over a doubled index set".into(),
        ));
    }
    Ok(ChainConfig::new(index_set.base_size(), config.depth)?)
}

/// Forward evaluation of one map on a JSON input.
pub fn map(config: &Config, id: MapId, input: &Path) -> Result<(), Failure> {
    let out: Value = match id {
        MapId::H => json!(h_forward(&read_input::<Vec<f64>>(input)?, config.p)?),
        MapId::Psi => json!(psi_forward(&read_input::<GridVector>(input)?)?),
        MapId::Phi => {
            let bits = read_input::<Bits>(input)?.into_bools()?;
            dyadic_json(phi_forward(&bits, &Weights::standard(bits.len()))?)
        }
        MapId::PhiPower | MapId::F => {
            let x: BitPoint = read_input(input)?;
            let w = Weights::standard(x.depth());
            json!(if id == MapId::F {
                f_forward(&x, &w)?
            } else {
                phi_power_forward(&x, &w)?
            })
        }
        MapId::Union => {
            let u: UnionInput = read_input(input)?;
            json!(union_map(u.index_set, &u.parts)?)
        }
        MapId::G => json!(g_forward(&read_input::<L1Element>(input)?)),
        MapId::Compose => {
            let s: SourcePoint = read_input(input)?;
            json!(compose_forward(&s, &source_config(s.index_set(), config)?)?)
        }
    };
    emit_json(config, &out)
}

/// A preimage under one map of a JSON point of its target.
pub fn lift(config: &Config, id: MapId, input: &Path) -> Result<(), Failure> {
    let depth = config.depth;
    let out: Value = match id {
        MapId::H => json!(h_inverse(&read_input::<Vec<f64>>(input)?, config.p)?),
        MapId::Psi => json!(psi_section(&read_input::<GridVector>(input)?)?),
        MapId::Phi => {
            let t = match read_input::<DyadicInput>(input)? {
                DyadicInput::Exact(t) => t,
                DyadicInput::Text(s) => s.parse().map_err(|e| Failure::Domain(format!("{e}")))?,
            };
            let bits = phi_section(t, depth, &Weights::standard(depth))?;
            json!(bits.iter().map(|&b| u8::from(b)).collect::<Vec<_>>())
        }
        MapId::F => json!(f_section(
            &read_input::<GridVector>(input)?,
            depth,
            &Weights::standard(depth)
        )?),
        MapId::Union => {
            let u: UnionLift = read_input(input)?;
            json!(union_section(&u.set, u.parts)?)
        }
        MapId::G => {
            let y: BitPoint = read_input(input)?;
            let z = ChainZ::new(Weights::standard(y.depth()), y.index_set().size());
            json!(g_section(&y, &z)?)
        }
        MapId::Compose => {
            let t: GridVector = read_input(input)?;
            json!(compose_section(
                &t,
                &ChainConfig::new(t.index_set().size(), depth)?
            )?)
        }
        MapId::PhiPower => {
            return Err(Failure::Domain(
                "phi_power has no section; lift through f".into(),
            ))
        }
    };
    emit_json(config, &out)
}

#[derive(Serialize)]
struct CoverageRow {
    gamma_size: usize,
    depth: usize,
    grid_size: usize,
    hits: usize,
    coverage_percent: f64,
    elapsed_ms: u128,
}

pub fn coverage_cmd(config: &Config) -> Result<(), Failure> {
    let start = Instant::now();
    let report = coverage(config.gamma_size, config.depth)?;
    let row = CoverageRow {
        gamma_size: report.gamma_size,
        depth: report.depth,
        grid_size: report.grid_size,
        hits: report.hits,
        coverage_percent: report.percent(),
        elapsed_ms: start.elapsed().as_millis(),
    };
    match config.output_format {
        OutputFormat::Json => emit_json(config, &row)?,
        OutputFormat::Csv => emit(config, &csv_table(std::slice::from_ref(&row), None)?)?,
    }
    if !report.is_complete() {
        let first = serde_json::to_string(&report.misses[0])?;
        return Err(Failure::Invariant(format!(
            "{} of {} grid points not recovered, first {first}",
            report.misses.len(),
            report.grid_size
        )));
    }
    Ok(())
}

fn csv_table<T: Serialize>(rows: &[T], header: Option<&[&str]>) -> Result<String, Failure> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(header.is_none())
        .from_writer(Vec::new());
    if let Some(h) = header {
        writer.write_record(h)?;
    }
    for row in rows {
        writer.serialize(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(String::from_utf8(bytes).context("csv output")?)
}

pub fn norm_params(config: &Config) -> Result<NormParams, Failure> {
    let (xi1, xi2) = config.levels().map_err(Failure::Domain)?;
    let graph = SierpinskiGraph::seeded(config.graph_n, config.seed);
    Ok(NormParams::new(config.p, xi1, xi2, graph)?)
}

pub fn norm(
    config: &Config,
    input: Option<&Path>,
    alphas: &[usize],
    pair: Option<(usize, usize)>,
    budget: usize,
) -> Result<(), Failure> {
    let params = norm_params(config)?;
    let mut out = json!({ "p": params.p(), "xi1": params.xi1(), "xi2": params.xi2(), "graph_n": config.graph_n });
    if let Some(path) = input {
        let v: PairVector = read_input(path)?;
        let in_k = ball_membership(&v, &params);
        let memberships = alphas
            .iter()
            .map(|&a| {
                let u = in_k.then(|| in_u(&v, a, &params)).transpose()?;
                let w = in_k.then(|| in_v(&v, a, &params)).transpose()?;
                Ok(json!({ "alpha": a, "in_u": u, "in_v": w }))
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        out["norm_x"] = json!(lp_norm(v.x_entries().map(|(_, a)| a), params.p())?);
        out["norm_y"] = json!(lp_norm(v.y_entries().map(|(_, a)| a), params.p())?);
        out["prime_norm"] = json!(prime_norm(&v, &params));
        out["in_k"] = json!(in_k);
        out["memberships"] = json!(memberships);
    }
    if let Some((a, b)) = pair {
        let verdict = disjointness_check(a, b, &params, budget, config.seed)?;
        out["pair"] = serde_json::to_value(&verdict)?;
        if let sigmaball::norms::Verdict::Disjoint { certificate, .. } = &verdict {
            out["pair"]["explanation"] = json!(certificate.to_string());
        }
    }
    emit_json(config, &out)
}

pub const SCALING_HEADER: [&str; 8] = [
    "n",
    "trial",
    "seed",
    "lis",
    "lds",
    "m",
    "m_over_n",
    "m_over_sqrt_n",
];

pub fn propq(config: &Config, sizes: &[usize], trials: usize) -> Result<(), Failure> {
    let rows: Vec<ScalingRow> = scaling_experiment(sizes, trials, config.seed)?;
    match config.output_format {
        OutputFormat::Json => emit_json(config, &rows),
        OutputFormat::Csv => emit(config, &csv_table(&rows, Some(&SCALING_HEADER))?),
    }
}

pub fn propq_es(
    config: &Config,
    r: usize,
    s: usize,
    mode: EsMode,
    trials: u64,
) -> Result<(), Failure> {
    let report = erdos_szekeres_check(r, s, mode, trials, config.seed)?;
    match config.output_format {
        OutputFormat::Json => emit_json(config, &report)?,
        OutputFormat::Csv => {
            let mode_name = serde_json::to_value(mode)?;
            emit(
                config,
                &format!(
                    "r: {}\ns: {}\nlength: {}\nmode: {}\nchecked: {}\nviolations: {}\n",
                    report.r,
                    report.s,
                    report.length,
                    mode_name.as_str().unwrap_or_default(),
                    report.checked,
                    report.violations
                ),
            )?;
        }
    }
    match report.first_violation {
        Some(perm) => Err(Failure::Invariant(format!(
            "permutation {perm:?} breaks Erdős–Szekeres"
        ))),
        None => Ok(()),
    }
}
