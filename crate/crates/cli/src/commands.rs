//! The `analyze` subcommands. Each one loads the input named in the
//! [`RunConfig`], processes the selected years in parallel and returns the
//! rendered files in a fixed order.
//!
//! File names follow `<command>_<year>_<mode>[_<strategy>].<ext>`, where the
//! command part carries the attack kind for criticality and robustness
//! (`criticality-node`, `robustness-edge`, ...).

use std::collections::BTreeMap;
use std::fs::File;

use rayon::prelude::*;
use serde_json::Value;

use tradenet::criticality::{economy_top_relationships, edge_criticality, group_criticality, node_criticality};
use tradenet::efficiency::efficiency;
use tradenet::ingest::{build_yearly_networks, load_group_map, parse_trade_records, parse_trade_records_lenient};
use tradenet::robustness::{random_robustness, robustness_curve, AttackPlan, RandomSampling};
use tradenet::stats::{criticality_volume_correlation, volume_time_series};
use tradenet::{CriticalityTable, GroupMap, Kind, Mode, Network, Strategy, VolumeSide};

use crate::config::{CommandName, RunConfig};
use crate::output::{num, opt_num, text, Artifact, Table};
use crate::CliError;

/// Files produced by a command plus non-fatal problems (per-year failures,
/// skipped rows, empty selections).
#[derive(Debug, Default)]
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub warnings: Vec<String>,
}

pub struct Dataset {
    pub networks: BTreeMap<i32, Network>,
    pub groups: Option<GroupMap>,
    pub warnings: Vec<String>,
}

fn open(path: &std::path::Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Reads the trade (and optional group) files and applies the year filter.
pub fn load(config: &RunConfig) -> Result<Dataset, CliError> {
    let in_context = |e: tradenet::Error| CliError::Data(format!("{}: {e}", config.input.display()));
    let mut warnings = Vec::new();
    let records = if config.lenient {
        let (records, rejected) = parse_trade_records_lenient(open(&config.input)?).map_err(in_context)?;
        for r in rejected {
            warnings.push(format!(
                "{}: line {}: skipped, {}",
                config.input.display(),
                r.line,
                r.reason
            ));
        }
        records
    } else {
        parse_trade_records(open(&config.input)?).map_err(in_context)?
    };
    let built = build_yearly_networks(&records).map_err(in_context)?;
    if built.self_loops_dropped > 0 {
        warnings.push(format!("dropped {} self-loop records", built.self_loops_dropped));
    }
    let mut networks = built.networks;
    if let Some(years) = &config.years {
        networks.retain(|y, _| years.binary_search(y).is_ok());
        if networks.is_empty() {
            warnings.push("no year in the input matches --years".into());
        }
    }
    let groups = match &config.groups {
        Some(path) => {
            Some(load_group_map(open(path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?)
        }
        None => None,
    };
    Ok(Dataset {
        networks,
        groups,
        warnings,
    })
}

pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    match config.command {
        CommandName::Efficiency => cmd_efficiency(config),
        CommandName::Criticality => cmd_criticality(config),
        CommandName::Robustness => cmd_robustness(config),
        CommandName::Correlate => cmd_correlate(config),
        CommandName::Volumes => cmd_volumes(config),
    }
}

fn years_of(data: &Dataset) -> Vec<(i32, &Network)> {
    data.networks.iter().map(|(y, n)| (*y, n)).collect()
}

/// One row per year: `year,N,N_e,V,E_A,E_W,E_Wbar`.
pub fn cmd_efficiency(config: &RunConfig) -> Result<Outcome, CliError> {
    let data = load(config)?;
    let rows: Vec<Vec<Value>> = years_of(&data)
        .par_iter()
        .map(|&(year, net)| {
            vec![
                Value::from(year),
                Value::from(net.node_count()),
                Value::from(net.edge_count()),
                num(net.total_volume()),
                num(efficiency(net, Mode::Unweighted)),
                num(efficiency(net, Mode::Weighted)),
                num(efficiency(net, Mode::Normalized)),
            ]
        })
        .collect();
    let mut table = Table::new(["year", "N", "N_e", "V", "E_A", "E_W", "E_Wbar"]);
    rows.into_iter().for_each(|r| table.push(r));
    Ok(Outcome {
        artifacts: vec![Artifact::render(config, "efficiency", &table)?],
        warnings: data.warnings,
    })
}

fn criticality_table(net: &Network, kind: Kind, mode: Mode) -> tradenet::Result<CriticalityTable> {
    match kind {
        Kind::Node => node_criticality(net, mode),
        Kind::Edge => edge_criticality(net, mode),
    }
}

/// Per year and mode: the full ranking (`key,criticality,rank`). Per mode:
/// the top-K layout with one column per year. Optional per-group sums and
/// per-economy relationship rankings.
pub fn cmd_criticality(config: &RunConfig) -> Result<Outcome, CliError> {
    let data = load(config)?;
    let mut warnings = data.warnings.clone();
    let kind = config.kind;
    let years = years_of(&data);
    let jobs: Vec<(i32, &Network, Mode)> = years
        .iter()
        .flat_map(|&(y, n)| config.modes.iter().map(move |&m| (y, n, m)))
        .collect();
    let tables: Vec<tradenet::Result<CriticalityTable>> = jobs
        .par_iter()
        .map(|&(_, net, mode)| criticality_table(net, kind, mode))
        .collect();

    let mut artifacts = Vec::new();
    let mut by_mode: BTreeMap<Mode, Vec<(i32, Option<&CriticalityTable>)>> = BTreeMap::new();
    for (&(year, net, mode), result) in jobs.iter().zip(&tables) {
        let table = match result {
            Ok(t) => t,
            Err(e) => {
                warnings.push(format!("{year} {mode}: {e}"));
                by_mode.entry(mode).or_default().push((year, None));
                continue;
            }
        };
        by_mode.entry(mode).or_default().push((year, Some(table)));

        let mut full = Table::new(["key", "criticality", "rank"]);
        for (rank, s) in table.ranked().iter().enumerate() {
            full.push(vec![text(s.key.to_string()), num(s.criticality), Value::from(rank + 1)]);
        }
        artifacts.push(Artifact::render(
            config,
            &format!("criticality-{kind}_{year}_{mode}"),
            &full,
        )?);

        if let (Some(groups), Kind::Node) = (&data.groups, kind) {
            let mut t = Table::new(["group", "criticality"]);
            for (group, sum) in group_criticality(table, groups).map_err(|e| CliError::Data(e.to_string()))? {
                t.push(vec![text(group), num(sum)]);
            }
            artifacts.push(Artifact::render(
                config,
                &format!("criticality-groups_{year}_{mode}"),
                &t,
            )?);
        }

        if kind == Kind::Edge && !config.economies.is_empty() {
            let mut t = Table::new(["economy", "rank", "key", "criticality"]);
            for economy in &config.economies {
                if net.index_of(economy).is_none() {
                    warnings.push(format!("{year}: economy `{economy}` is not in the network"));
                    continue;
                }
                let top =
                    economy_top_relationships(table, economy, config.top).map_err(|e| CliError::Data(e.to_string()))?;
                for (rank, (key, c)) in top.into_iter().enumerate() {
                    t.push(vec![
                        text(economy.clone()),
                        Value::from(rank + 1),
                        text(key.to_string()),
                        num(c),
                    ]);
                }
            }
            artifacts.push(Artifact::render(
                config,
                &format!("criticality-economy_{year}_{mode}"),
                &t,
            )?);
        }
    }
    if data.groups.is_some() && kind == Kind::Edge {
        warnings.push("--groups only applies to node criticality".into());
    }

    for (mode, per_year) in by_mode {
        let mut columns = vec!["rank".to_string()];
        columns.extend(per_year.iter().map(|(y, _)| y.to_string()));
        let mut layout = Table::new(columns);
        for rank in 0..config.top {
            let mut row = vec![Value::from(rank + 1)];
            row.extend(per_year.iter().map(|(_, t)| {
                t.and_then(|t| t.ranked().get(rank))
                    .map_or(Value::Null, |s| text(s.key.to_string()))
            }));
            layout.push(row);
        }
        artifacts.push(Artifact::render(
            config,
            &format!("criticality-{kind}_table_{mode}"),
            &layout,
        )?);
    }
    Ok(Outcome { artifacts, warnings })
}

/// One `p,n_removed,R,stderr` curve per year, mode and strategy.
pub fn cmd_robustness(config: &RunConfig) -> Result<Outcome, CliError> {
    let data = load(config)?;
    let mut warnings = data.warnings.clone();
    let kind = config.kind;
    let years = years_of(&data);
    let jobs: Vec<(i32, &Network, Mode, Strategy)> = years
        .iter()
        .flat_map(|&(y, n)| {
            config
                .modes
                .iter()
                .flat_map(move |&m| config.strategies.iter().map(move |&s| (y, n, m, s)))
        })
        .collect();
    let curves: Vec<tradenet::Result<_>> = jobs
        .par_iter()
        .map(|&(_, net, mode, strategy)| {
            if strategy == Strategy::Random {
                random_robustness(
                    net,
                    kind,
                    mode,
                    &config.p_grid,
                    RandomSampling::new(config.samples, config.seed),
                )
            } else {
                let plan = AttackPlan::new(net, kind, strategy, mode, config.p_grid.clone())?;
                robustness_curve(net, &plan)
            }
        })
        .collect();

    let mut artifacts = Vec::new();
    for (&(year, _, mode, strategy), curve) in jobs.iter().zip(curves) {
        let curve = match curve {
            Ok(c) => c,
            Err(e) => {
                warnings.push(format!("{year} {mode} {strategy}: {e}"));
                continue;
            }
        };
        let mut t = Table::new(["p", "n_removed", "R", "stderr"]);
        for s in &curve.samples {
            t.push(vec![num(s.p), Value::from(s.n_removed), num(s.r), opt_num(s.stderr)]);
        }
        let stem = format!("robustness-{kind}_{year}_{mode}_{strategy}");
        artifacts.push(Artifact::render(config, &stem, &t)?);
    }
    Ok(Outcome { artifacts, warnings })
}

/// Per year and mode: criticality against import and export volume.
pub fn cmd_correlate(config: &RunConfig) -> Result<Outcome, CliError> {
    let data = load(config)?;
    let mut warnings = data.warnings.clone();
    let years = years_of(&data);
    let sides = [VolumeSide::Import, VolumeSide::Export];
    let jobs: Vec<(i32, &Network, Mode)> = years
        .iter()
        .flat_map(|&(y, n)| config.modes.iter().map(move |&m| (y, n, m)))
        .collect();
    let reports: Vec<Vec<tradenet::Result<_>>> = jobs
        .par_iter()
        .map(|&(_, net, mode)| {
            sides
                .iter()
                .map(|&side| criticality_volume_correlation(net, side, mode))
                .collect()
        })
        .collect();

    let mut artifacts = Vec::new();
    let columns = [
        "year",
        "mode",
        "volume",
        "n",
        "pearson",
        "pearson_p",
        "spearman",
        "spearman_p",
        "note",
    ];
    for (&(year, net, mode), per_side) in jobs.iter().zip(reports) {
        let mut t = Table::new(columns);
        for (side, report) in sides.iter().zip(per_side) {
            match report {
                Ok(r) => t.push(vec![
                    Value::from(year),
                    text(mode.as_str()),
                    text(side.as_str()),
                    Value::from(r.n),
                    num(r.pearson),
                    num(r.pearson_p),
                    num(r.spearman),
                    num(r.spearman_p),
                    Value::Null,
                ]),
                Err(e) => {
                    warnings.push(format!("{year} {mode} {side}: {e}"));
                    t.push(vec![
                        Value::from(year),
                        text(mode.as_str()),
                        text(side.as_str()),
                        Value::from(net.node_count()),
                        Value::Null,
                        Value::Null,
                        Value::Null,
                        Value::Null,
                        text(e.to_string()),
                    ]);
                }
            }
        }
        artifacts.push(Artifact::render(config, &format!("correlate_{year}_{mode}"), &t)?);
    }
    Ok(Outcome { artifacts, warnings })
}

/// Long-format `side,rank,economy,year,volume` for the top economies.
pub fn cmd_volumes(config: &RunConfig) -> Result<Outcome, CliError> {
    let data = load(config)?;
    let series = volume_time_series(data.networks.values(), config.top);
    let mut t = Table::new(["side", "rank", "economy", "year", "volume"]);
    for (side, list) in [("import", &series.importers), ("export", &series.exporters)] {
        for (rank, s) in list.iter().enumerate() {
            for (year, v) in series.years.iter().zip(&s.per_year) {
                t.push(vec![
                    text(side),
                    Value::from(rank + 1),
                    text(s.economy.clone()),
                    Value::from(*year),
                    num(*v),
                ]);
            }
        }
    }
    Ok(Outcome {
        artifacts: vec![Artifact::render(config, "volumes", &t)?],
        warnings: data.warnings,
    })
}
