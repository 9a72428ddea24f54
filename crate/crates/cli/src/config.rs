use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use sigmaball::norms::{check_levels, default_levels};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Run configuration, read from a JSON file and then overridden by flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub gamma_size: usize,
    pub depth: usize,
    pub p: f64,
    pub xi1: Option<f64>,
    pub xi2: Option<f64>,
    pub graph_n: usize,
    pub seed: u64,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            gamma_size: 2,
            depth: 4,
            p: 2.0,
            xi1: None,
            xi2: None,
            graph_n: 100,
            seed: 0,
            output_format: OutputFormat::Csv,
            output_path: None,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON config file; flags override its fields
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub gamma_size: Option<usize>,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    #[arg(long, global = true)]
    pub xi1: Option<f64>,
    #[arg(long, global = true)]
    pub xi2: Option<f64>,
    #[arg(long, global = true)]
    pub graph_n: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub output_format: Option<OutputFormat>,
    #[arg(long, global = true)]
    pub output_path: Option<PathBuf>,
}

impl Config {
    pub fn load(args: &ConfigArgs) -> anyhow::Result<Config> {
        let mut config = match &args.config {
            Some(path) => Config::from_file(path)?,
            None => Config::default(),
        };
        config.apply(args);
        Ok(config)
    }

    fn from_file(path: &Path) -> anyhow::Result<Config> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    fn apply(&mut self, args: &ConfigArgs) {
        if let Some(v) = args.gamma_size {
            self.gamma_size = v;
        }
        if let Some(v) = args.depth {
            self.depth = v;
        }
        if let Some(v) = args.p {
            self.p = v;
        }
        if args.xi1.is_some() {
            self.xi1 = args.xi1;
        }
        if args.xi2.is_some() {
            self.xi2 = args.xi2;
        }
        if let Some(v) = args.graph_n {
            self.graph_n = v;
        }
        if let Some(v) = args.seed {
            self.seed = v;
        }
        if let Some(v) = args.output_format {
            self.output_format = v;
        }
        if args.output_path.is_some() {
            self.output_path = args.output_path.clone();
        }
    }

    /// `(ξ₁, ξ₂)`, filling unset levels with the evenly spaced defaults.
    pub fn levels(&self) -> Result<(f64, f64), String> {
        let (d1, d2) =
            default_levels(self.p).map_err(|_| format!("p > 1 fails for p = {}", self.p))?;
        Ok((self.xi1.unwrap_or(d1), self.xi2.unwrap_or(d2)))
    }

    /// Checks every constraint, naming the first violated inequality.
    pub fn validate(&self) -> Result<(), String> {
        if self.gamma_size < 1 {
            return Err("gamma_size >= 1 fails for gamma_size = 0".into());
        }
        if self.depth < 1 {
            return Err("depth >= 1 fails for depth = 0".into());
        }
        if self.graph_n < 1 {
            return Err("graph_n >= 1 fails for graph_n = 0".into());
        }
        let (xi1, xi2) = self.levels()?;
        check_levels(self.p, xi1, xi2).map_err(|e| e.to_string())
    }
}
