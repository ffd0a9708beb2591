//! Reading trade edge lists and economy group maps.
//!
//! Trade CSV: header `year,exporter,importer,volume`, one flow per row.
//! Group CSV: header `economy,group`.

use std::collections::BTreeMap;
use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::Network;

const TRADE_HEADER: [&str; 4] = ["year", "exporter", "importer", "volume"];
const GROUP_HEADER: [&str; 2] = ["economy", "group"];

/// Group label used for economies missing from a [`GroupMap`].
pub const UNMAPPED_GROUP: &str = "unmapped";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeRecord {
    pub year: i32,
    pub exporter: String,
    pub importer: String,
    pub volume: f64,
}

/// A row that was skipped in lenient mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RejectedRow {
    pub line: u64,
    pub reason: String,
}

fn reader_for<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn check_header(record: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    if record.iter().eq(expected.iter().copied()) {
        Ok(())
    } else {
        Err(Error::MalformedRow {
            line: line_of(record),
            reason: format!("expected header `{}`", expected.join(",")),
        })
    }
}

fn parse_row(record: &csv::StringRecord) -> std::result::Result<TradeRecord, String> {
    if record.len() != 4 {
        return Err(format!("expected 4 columns, found {}", record.len()));
    }
    let year = record[0]
        .parse::<i32>()
        .map_err(|_| format!("year `{}` is not an integer", &record[0]))?;
    let exporter = &record[1];
    let importer = &record[2];
    if exporter.is_empty() || importer.is_empty() {
        return Err("empty economy code".to_string());
    }
    let volume = record[3]
        .parse::<f64>()
        .map_err(|_| format!("volume `{}` is not a number", &record[3]))?;
    if !(volume.is_finite() && volume > 0.0) {
        return Err(format!("volume {volume} is not positive"));
    }
    Ok(TradeRecord {
        year,
        exporter: exporter.to_string(),
        importer: importer.to_string(),
        volume,
    })
}

fn parse_inner<R: Read>(input: R, lenient: bool) -> Result<(Vec<TradeRecord>, Vec<RejectedRow>)> {
    let mut reader = reader_for(input);
    let mut rows = reader.records();
    let mut records = Vec::new();
    let mut rejected = Vec::new();
    match rows.next() {
        None => return Ok((records, rejected)),
        Some(header) => check_header(&header?, &TRADE_HEADER)?,
    }
    for row in rows {
        let row = row?;
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        match parse_row(&row) {
            Ok(record) => records.push(record),
            Err(reason) if lenient => rejected.push(RejectedRow {
                line: line_of(&row),
                reason,
            }),
            Err(reason) => {
                return Err(Error::MalformedRow {
                    line: line_of(&row),
                    reason,
                })
            }
        }
    }
    Ok((records, rejected))
}

/// Parses a trade CSV, failing on the first malformed row.
pub fn parse_trade_records<R: Read>(input: R) -> Result<Vec<TradeRecord>> {
    parse_inner(input, false).map(|(records, _)| records)
}

/// Parses a trade CSV, skipping malformed rows and returning them alongside
/// the valid records. A bad header is still an error.
pub fn parse_trade_records_lenient<R: Read>(input: R) -> Result<(Vec<TradeRecord>, Vec<RejectedRow>)> {
    parse_inner(input, true)
}

/// Networks built from a batch of records, keyed by year.
#[derive(Debug, Clone)]
pub struct YearlyNetworks {
    pub networks: BTreeMap<i32, Network>,
    /// Number of self-loop records that were discarded.
    pub self_loops_dropped: usize,
}

/// Groups records by year into networks. Repeated `(year, exporter, importer)`
/// flows are summed and self-loops are dropped.
pub fn build_yearly_networks(records: &[TradeRecord]) -> Result<YearlyNetworks> {
    let mut flows: BTreeMap<(i32, &str, &str), Vec<f64>> = BTreeMap::new();
    let mut self_loops_dropped = 0;
    for r in records {
        if r.exporter == r.importer {
            self_loops_dropped += 1;
            continue;
        }
        flows
            .entry((r.year, &r.exporter, &r.importer))
            .or_default()
            .push(r.volume);
    }
    if flows.is_empty() {
        return Err(Error::EmptyInput);
    }

    let mut by_year: BTreeMap<i32, Vec<(&str, &str, f64)>> = BTreeMap::new();
    for ((year, s, t), mut volumes) in flows {
        // sum in sorted order so the aggregate does not depend on record order
        volumes.sort_by(f64::total_cmp);
        by_year.entry(year).or_default().push((s, t, volumes.iter().sum()));
    }
    let networks = by_year
        .into_iter()
        .map(|(year, flows)| Ok((year, Network::from_flows(year, flows)?)))
        .collect::<Result<_>>()?;
    Ok(YearlyNetworks {
        networks,
        self_loops_dropped,
    })
}

/// Mapping from economy code to a group label such as a continent.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GroupMap {
    entries: BTreeMap<String, String>,
}

impl GroupMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, code: impl Into<String>, group: impl Into<String>) -> Option<String> {
        self.entries.insert(code.into(), group.into())
    }

    pub fn group_of(&self, code: &str) -> Option<&str> {
        self.entries.get(code).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for GroupMap {
    fn from_iter<T: IntoIterator<Item = (K, V)>>(iter: T) -> Self {
        GroupMap {
            entries: iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect(),
        }
    }
}

/// Reads a group CSV. An empty input yields an empty map.
pub fn load_group_map<R: Read>(input: R) -> Result<GroupMap> {
    let mut reader = reader_for(input);
    let mut rows = reader.records();
    let mut map = GroupMap::new();
    match rows.next() {
        None => return Ok(map),
        Some(header) => check_header(&header?, &GROUP_HEADER)?,
    }
    for row in rows {
        let row = row?;
        let line = line_of(&row);
        if row.len() == 1 && row[0].is_empty() {
            continue;
        }
        if row.len() != 2 || row[0].is_empty() || row[1].is_empty() {
            return Err(Error::MalformedRow {
                line,
                reason: "expected `economy,group` with non-empty fields".into(),
            });
        }
        if map.insert(&row[0], &row[1]).is_some() {
            return Err(Error::DuplicateCode {
                line,
                code: row[0].to_string(),
            });
        }
    }
    Ok(map)
}
