//! `sigmaball`: command-line front end for the maps, norms and property-(Q) tools.

mod check;
mod commands;
mod config;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sigmaball::maps::MapId;
use sigmaball::ramsey::EsMode;

use config::{Config, ConfigArgs};
use failure::Failure;

#[derive(Parser)]
#[command(
    name = "sigmaball",
    version,
    about = "Finite-depth surjection onto B(Gamma), renorming and property-(Q) experiments"
)]
#[command(
    after_help = "Exit codes: 0 success, 1 usage/parse/IO error, 2 domain violation, 3 guard exceeded, 4 invariant failure."
)]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MapName {
    H,
    Psi,
    Phi,
    PhiPower,
    F,
    Union,
    G,
    Compose,
}

impl From<MapName> for MapId {
    fn from(m: MapName) -> Self {
        match m {
            MapName::H => MapId::H,
            MapName::Psi => MapId::Psi,
            MapName::Phi => MapId::Phi,
            MapName::PhiPower => MapId::PhiPower,
            MapName::F => MapId::F,
            MapName::Union => MapId::Union,
            MapName::G => MapId::G,
            MapName::Compose => MapId::Compose,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EsModeArg {
    Exhaustive,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a map on a JSON point of its domain
    Map {
        #[arg(value_enum)]
        map: MapName,
        #[arg(long)]
        input: PathBuf,
    },
    /// Compute a preimage of a JSON point under a map
    Lift {
        #[arg(value_enum)]
        map: MapName,
        #[arg(long)]
        input: PathBuf,
    },
    /// Round-trip every grid point of B(Gamma) through the full chain
    Coverage,
    /// Norms, membership in K and in U_alpha / V_alpha for a point
    Norm {
        /// PairVector JSON: {"x": [[index, value], ...], "y": [...]}
        #[arg(long)]
        input: Option<PathBuf>,
        /// Indices whose U/V membership is reported
        #[arg(long, value_delimiter = ',')]
        alpha: Vec<usize>,
        /// Decide whether U_a and U_b meet, e.g. --pair 3,7
        #[arg(long, value_delimiter = ',')]
        pair: Option<Vec<usize>>,
        /// Random points of K searched for each disjoint pair
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
    },
    /// Property-(Q) scaling table, or an Erdős–Szekeres check with --es
    Propq {
        /// Family sizes; defaults to graph_n
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<String>>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Run the Erdős–Szekeres check for lengths r,s instead
        #[arg(long, value_delimiter = ',')]
        es: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value = "exhaustive")]
        es_mode: EsModeArg,
        #[arg(long, default_value_t = 1000)]
        es_trials: u64,
    },
    /// Run the condensed invariant suite
    Check,
}

fn parse_sizes(raw: &[String]) -> Result<Vec<usize>, Failure> {
    raw.iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|e| Failure::Usage(anyhow::anyhow!("size {s:?}: {e}")))
        })
        .collect()
}

fn two(values: Vec<usize>, flag: &str) -> Result<(usize, usize), Failure> {
    match values[..] {
        [a, b] => Ok((a, b)),
        _ => Err(Failure::Usage(anyhow::anyhow!(
            "--{flag} takes exactly two comma-separated values"
        ))),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let config = Config::load(&cli.config)?;
    config
        .validate()
        .map_err(|e| Failure::Domain(format!("invalid config: {e}")))?;
    match cli.command {
        Command::Map { map, input } => commands::map(&config, map.into(), &input),
        Command::Lift { map, input } => commands::lift(&config, map.into(), &input),
        Command::Coverage => commands::coverage_cmd(&config),
        Command::Norm {
            input,
            alpha,
            pair,
            budget,
        } => {
            let pair = pair.map(|p| two(p, "pair")).transpose()?;
            commands::norm(&config, input.as_deref(), &alpha, pair, budget)
        }
        Command::Propq {
            sizes,
            trials,
            es,
            es_mode,
            es_trials,
        } => match es {
            Some(rs) => {
                let (r, s) = two(rs, "es")?;
                let mode = match es_mode {
                    EsModeArg::Exhaustive => EsMode::Exhaustive,
                    EsModeArg::Random => EsMode::Random,
                };
                commands::propq_es(&config, r, s, mode, es_trials)
            }
            None => {
                let sizes = match sizes {
                    Some(raw) => parse_sizes(&raw)?,
                    None => vec![config.graph_n],
                };
                commands::propq(&config, &sizes, trials)
            }
        },
        Command::Check => commands::emit(&config, &check::run(&config)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sigmaball: {e}");
            e.exit_code()
        }
    }
}
