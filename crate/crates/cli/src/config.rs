use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tradenet::robustness::{default_p_grid, validate_p_grid, DEFAULT_SAMPLE_BUDGET};
use tradenet::{Kind, Mode, Strategy};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOP: usize = 10;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(
    name = "analyze",
    version,
    about = "Efficiency, criticality and robustness of yearly trade networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Efficiency,
    Criticality,
    Robustness,
    Correlate,
    Volumes,
}

impl fmt::Display for CommandName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CommandName::Efficiency => "efficiency",
            CommandName::Criticality => "criticality",
            CommandName::Robustness => "robustness",
            CommandName::Correlate => "correlate",
            CommandName::Volumes => "volumes",
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-year N, N_e, V and the three efficiency measures.
    Efficiency(CommonArgs),
    /// Economy or relationship criticality rankings.
    Criticality(CommonArgs),
    /// Robustness curves under attack strategies.
    Robustness(CommonArgs),
    /// Correlation of economy criticality with import/export volume.
    Correlate(CommonArgs),
    /// Import/export volume time series of the top economies.
    Volumes(CommonArgs),
}

impl Command {
    pub fn split(self) -> (CommandName, CommonArgs) {
        match self {
            Command::Efficiency(a) => (CommandName::Efficiency, a),
            Command::Criticality(a) => (CommandName::Criticality, a),
            Command::Robustness(a) => (CommandName::Robustness, a),
            Command::Correlate(a) => (CommandName::Correlate, a),
            Command::Volumes(a) => (CommandName::Volumes, a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Trade CSV with header `year,exporter,importer,volume`.
    #[arg(long)]
    pub input: PathBuf,
    /// Group CSV with header `economy,group`.
    #[arg(long)]
    pub groups: Option<PathBuf>,
    /// Years to analyse, e.g. `2001,2008,2015-2017`. Default: all.
    #[arg(long)]
    pub years: Option<String>,
    /// Comma-separated modes: unweighted, weighted, normalized.
    #[arg(long, default_value = "unweighted,weighted")]
    pub mode: String,
    #[arg(long, default_value = "node")]
    pub kind: String,
    /// Number of entries in ranking tables and volume series.
    #[arg(long, default_value_t = DEFAULT_TOP)]
    pub top: usize,
    /// Comma-separated attack strategies. Default: every strategy valid for `--kind`.
    #[arg(long)]
    pub strategies: Option<String>,
    /// Attack fractions as `start:stop:step` or a comma-separated list.
    #[arg(long, default_value = "0:0.5:0.02")]
    pub p_grid: String,
    /// Monte Carlo subsets per fraction for the random strategy.
    #[arg(long, default_value_t = DEFAULT_SAMPLE_BUDGET)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, default_value = "out")]
    pub out_dir: PathBuf,
    /// Economies whose top relationships are listed (edge criticality).
    #[arg(long)]
    pub economies: Option<String>,
    /// Skip malformed input rows instead of failing.
    #[arg(long)]
    pub lenient: bool,
    /// Worker threads (0 = one per core). Does not affect results.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

/// Fully resolved settings of one run. Written into every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandName,
    pub tool_version: String,
    pub input: PathBuf,
    pub groups: Option<PathBuf>,
    /// `None` selects every year present in the input.
    pub years: Option<Vec<i32>>,
    pub modes: Vec<Mode>,
    pub kind: Kind,
    pub top: usize,
    pub strategies: Vec<Strategy>,
    pub p_grid: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub format: Format,
    pub out_dir: PathBuf,
    pub economies: Vec<String>,
    pub lenient: bool,
}

impl RunConfig {
    /// Defaults for `command` reading `input`.
    pub fn new(command: CommandName, input: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            tool_version: TOOL_VERSION.to_string(),
            input: input.into(),
            groups: None,
            years: None,
            modes: vec![Mode::Unweighted, Mode::Weighted],
            kind: Kind::Node,
            top: DEFAULT_TOP,
            strategies: Strategy::for_kind(Kind::Node),
            p_grid: default_p_grid(),
            samples: DEFAULT_SAMPLE_BUDGET,
            seed: DEFAULT_SEED,
            format: Format::Csv,
            out_dir: PathBuf::from("out"),
            economies: Vec::new(),
            lenient: false,
        }
    }

    pub fn resolve(command: CommandName, args: &CommonArgs) -> Result<Self, CliError> {
        let kind: Kind = args.kind.parse().map_err(CliError::Usage)?;
        let modes = parse_list::<Mode>(&args.mode)?;
        if modes.is_empty() {
            return Err(CliError::Usage("--mode needs at least one mode".into()));
        }
        let strategies = match &args.strategies {
            Some(s) => parse_list::<Strategy>(s)?,
            None => Strategy::for_kind(kind),
        };
        if command == CommandName::Robustness {
            if let Some(s) = strategies.iter().find(|s| !s.supports(kind)) {
                return Err(CliError::Usage(format!(
                    "strategy `{s}` cannot be used for {kind} attacks"
                )));
            }
            if modes.contains(&Mode::Normalized) {
                return Err(CliError::Usage(
                    "robustness supports unweighted and weighted modes".into(),
                ));
            }
        }
        let p_grid = parse_p_grid(&args.p_grid)?;
        if args.top == 0 {
            return Err(CliError::Usage("--top must be at least 1".into()));
        }
        if args.samples == 0 {
            return Err(CliError::Usage("--samples must be at least 1".into()));
        }
        let economies = match &args.economies {
            Some(s) => s
                .split(',')
                .map(|c| c.trim().to_string())
                .filter(|c| !c.is_empty())
                .collect(),
            None => Vec::new(),
        };
        Ok(RunConfig {
            command,
            tool_version: TOOL_VERSION.to_string(),
            input: args.input.clone(),
            groups: args.groups.clone(),
            years: args.years.as_deref().map(parse_years).transpose()?,
            modes,
            kind,
            top: args.top,
            strategies,
            p_grid,
            samples: args.samples,
            seed: args.seed,
            format: args.format,
            out_dir: args.out_dir.clone(),
            economies,
            lenient: args.lenient,
        })
    }
}

fn parse_list<T: std::str::FromStr<Err = String>>(s: &str) -> Result<Vec<T>, CliError> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        out.push(item.parse::<T>().map_err(CliError::Usage)?);
    }
    Ok(out)
}

/// `2001,2008,2015-2017` -> sorted, deduplicated years.
pub fn parse_years(s: &str) -> Result<Vec<i32>, CliError> {
    let bad = || CliError::Usage(format!("invalid --years `{s}`"));
    let mut years = Vec::new();
    for part in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (i32, i32) = (
                    a.trim().parse().map_err(|_| bad())?,
                    b.trim().parse().map_err(|_| bad())?,
                );
                if a > b {
                    return Err(bad());
                }
                years.extend(a..=b);
            }
            None => years.push(part.parse().map_err(|_| bad())?),
        }
    }
    years.sort_unstable();
    years.dedup();
    Ok(years)
}

/// `start:stop:step` (inclusive of `stop`) or an explicit comma list.
pub fn parse_p_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Usage(format!("invalid --p-grid `{s}`: {why}"));
    let grid: Vec<f64> = if let [start, stop, step] = s.split(':').collect::<Vec<_>>()[..] {
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad("not a number"));
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(bad("need start <= stop and step > 0"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=count).map(|i| start + i as f64 * step).collect()
    } else {
        s.split(',')
            .map(|x| x.trim().parse::<f64>().map_err(|_| bad("not a number")))
            .collect::<Result<_, _>>()?
    };
    validate_p_grid(&grid).map_err(|e| bad(&e.to_string()))?;
    Ok(grid)
}
