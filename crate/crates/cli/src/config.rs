use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "hyperdefect",
    version,
    about = "Defect statistics of random spherical eigenfunctions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Exact variance series over a range of degrees
    Variance,
    /// Limiting constant C_d by series, integral or both
    Constant,
    /// Chaos coefficients c_{2q+1;d}
    Ccoef,
    /// Gaunt coefficient table in text form
    Gaunt,
    /// Double-sum Gaunt identity residuals
    Lemcg,
    /// Circulant-diagram sum, closed form and cumulant ratio
    Circulant,
    /// Monte Carlo CLT diagnostics of the defect
    #[command(name = "mc-clt")]
    McClt,
    /// Gegenbauer moments of a degree
    Moments,
    /// Exact check of the combinatorial inequalities
    Facile,
    /// Runs every acceptance criterion
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Variance => "variance",
            Command::Constant => "constant",
            Command::Ccoef => "ccoef",
            Command::Gaunt => "gaunt",
            Command::Lemcg => "lemcg",
            Command::Circulant => "circulant",
            Command::McClt => "mc-clt",
            Command::Moments => "moments",
            Command::Facile => "facile",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Series,
    Integral,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RangeArg {
    Full,
    Half,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerArg {
    SpectralBasis,
    CovarianceFactorization,
}

/// Flags shared by every command. Each one, when given, overrides the
/// value from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// sphere dimension
    #[arg(long, global = true)]
    pub d: Option<u32>,
    /// single degree ℓ
    #[arg(long, global = true)]
    pub l: Option<u32>,
    /// degrees as `a:b[:step]`, inclusive
    #[arg(long, global = true)]
    pub l_range: Option<String>,
    /// chaos orders as `a:b[:step]`, inclusive
    #[arg(long, global = true)]
    pub q_range: Option<String>,
    /// relative tolerance
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// master seed
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// number of realizations
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// grid nodes per great-circle direction
    #[arg(long, global = true)]
    pub grid_resolution: Option<u32>,
    /// output file; relative paths are placed under DEFECT_OUTPUT_DIR when set
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, value_enum)]
    pub method: Option<MethodArg>,
    /// field sampler for mc-clt
    #[arg(long, global = true, value_enum)]
    pub sampler: Option<SamplerArg>,
    /// integration range for moments
    #[arg(long, global = true, value_enum)]
    pub range: Option<RangeArg>,
    /// highest moment power
    #[arg(long, global = true)]
    pub k_max: Option<u32>,
    /// also evaluate the circulant sum from the Gaunt table
    #[arg(long, global = true)]
    pub direct: bool,
    /// per-realization defects CSV for mc-clt
    #[arg(long, global = true)]
    pub defects: Option<PathBuf>,
    /// worker threads (default: all cores)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// JSON run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// omit the timestamp from output headers
    #[arg(long, global = true)]
    pub no_timestamp: bool,
}

/// Fully resolved configuration of one run; embedded in every output.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub d: Option<u32>,
    pub l: Option<u32>,
    pub l_range: Option<String>,
    pub q_range: Option<String>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub grid_resolution: Option<u32>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub method: Option<MethodArg>,
    pub sampler: Option<SamplerArg>,
    pub range: Option<RangeArg>,
    pub k_max: Option<u32>,
    pub direct: Option<bool>,
    pub defects: Option<PathBuf>,
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self, CliError> {
        let mut cfg = match &cli.flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str::<RunConfig>(&text)
                    .map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(c) = cfg.command {
            if c != cli.command {
                return Err(CliError::Usage(format!(
                    "config is for `{}`, not `{}`",
                    c.name(),
                    cli.command.name()
                )));
            }
        }
        let f = &cli.flags;
        cfg.command = Some(cli.command);
        macro_rules! take {
            ($($field:ident),*) => { $( if f.$field.is_some() { cfg.$field = f.$field.clone(); } )* };
        }
        take!(
            d,
            l,
            l_range,
            q_range,
            tol,
            seed,
            n,
            grid_resolution,
            output,
            format,
            method,
            sampler,
            range,
            k_max,
            defects,
            workers
        );
        if f.direct {
            cfg.direct = Some(true);
        }
        cfg.timestamp = if f.no_timestamp {
            None
        } else {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .ok()
                .map(|t| t.as_secs())
        };
        Ok(cfg)
    }

    pub fn command(&self) -> Command {
        self.command.expect("resolved config has a command")
    }

    pub fn d_or(&self, default: u32) -> u32 {
        self.d.unwrap_or(default)
    }

    /// Degrees from `--l` or `--l-range`.
    pub fn degrees(&self) -> Result<Vec<u32>, CliError> {
        match (&self.l, &self.l_range) {
            (Some(_), Some(_)) => Err(CliError::Usage("give either --l or --l-range".into())),
            (Some(l), None) => Ok(vec![*l]),
            (None, Some(r)) => parse_range(r),
            (None, None) => Err(CliError::Usage("missing --l or --l-range".into())),
        }
    }

    pub fn orders(&self, default: &str) -> Result<Vec<u32>, CliError> {
        parse_range(self.q_range.as_deref().unwrap_or(default))
    }
}

/// Parses `a`, `a:b` or `a:b:step` into an inclusive list.
pub fn parse_range(text: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Usage(format!("bad range {text:?}; expected a:b[:step]"));
    let parts: Vec<u32> = text
        .split(':')
        .map(|p| p.trim().parse::<u32>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let (a, b, step) = match parts[..] {
        [a] => (a, a, 1),
        [a, b] => (a, b, 1),
        [a, b, s] => (a, b, s),
        _ => return Err(bad()),
    };
    if step == 0 || b < a {
        return Err(bad());
    }
    Ok((a..=b).step_by(step as usize).collect())
}
