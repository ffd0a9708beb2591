//! Immutable yearly trade network snapshots.
//!
//! Economies are stored sorted by code and edges sorted by `(source, target)`,
//! so two networks built from the same set of flows are identical regardless
//! of input order. Because edges are sorted by source, the edge list doubles
//! as the outgoing adjacency (CSR) of the graph.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// A directed trade relationship between two economies, by node index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub volume: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    year: i32,
    codes: Vec<String>,
    edges: Vec<Edge>,
    /// `out_offsets[i]..out_offsets[i + 1]` is the range of `edges` leaving node `i`.
    out_offsets: Vec<usize>,
    /// Edge ids grouped by target, `in_offsets` indexes into it like `out_offsets`.
    in_edges: Vec<usize>,
    in_offsets: Vec<usize>,
}

impl Network {
    /// Builds a snapshot from `(exporter, importer, volume)` flows.
    ///
    /// Flows must already be aggregated: a repeated pair, a self-loop or a
    /// non-positive volume is rejected. Every economy that appears in a flow
    /// becomes a node.
    pub fn from_flows<I, S>(year: i32, flows: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S, f64)>,
        S: Into<String>,
    {
        let flows: Vec<(String, String, f64)> = flows.into_iter().map(|(s, t, v)| (s.into(), t.into(), v)).collect();
        if flows.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut codes: Vec<String> = flows.iter().flat_map(|(s, t, _)| [s.clone(), t.clone()]).collect();
        codes.sort();
        codes.dedup();

        let lookup = |code: &str| codes.binary_search_by(|c| c.as_str().cmp(code)).unwrap();
        let mut edges = Vec::with_capacity(flows.len());
        for (s, t, volume) in &flows {
            if s.is_empty() || t.is_empty() {
                return Err(Error::InvalidNetwork("empty economy code".into()));
            }
            if s == t {
                return Err(Error::InvalidNetwork(format!("self-loop on `{s}`")));
            }
            if !(volume.is_finite() && *volume > 0.0) {
                return Err(Error::InvalidNetwork(format!(
                    "volume {volume} on `{s}` -> `{t}` is not a positive number"
                )));
            }
            edges.push(Edge {
                source: lookup(s),
                target: lookup(t),
                volume: *volume,
            });
        }
        Self::from_parts(year, codes, edges)
    }

    /// Assembles a snapshot from sorted codes and index-based edges. Nodes
    /// without edges are allowed here (they arise from removals).
    fn from_parts(year: i32, codes: Vec<String>, mut edges: Vec<Edge>) -> Result<Self> {
        let n = codes.len();
        edges.sort_by_key(|e| (e.source, e.target));
        for pair in edges.windows(2) {
            if pair[0].source == pair[1].source && pair[0].target == pair[1].target {
                return Err(Error::InvalidNetwork(format!(
                    "duplicate relationship `{}` -> `{}`",
                    codes[pair[0].source], codes[pair[0].target]
                )));
            }
        }

        let mut out_offsets = vec![0usize; n + 1];
        let mut in_offsets = vec![0usize; n + 1];
        for e in &edges {
            out_offsets[e.source + 1] += 1;
            in_offsets[e.target + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let mut in_edges = vec![0usize; edges.len()];
        let mut cursor = in_offsets.clone();
        for (id, e) in edges.iter().enumerate() {
            in_edges[cursor[e.target]] = id;
            cursor[e.target] += 1;
        }

        Ok(Network {
            year,
            codes,
            edges,
            out_offsets,
            in_edges,
            in_offsets,
        })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    /// Number of economies, `N`.
    pub fn node_count(&self) -> usize {
        self.codes.len()
    }

    /// Number of trade relationships, `N_e`.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn codes(&self) -> &[String] {
        &self.codes
    }

    pub fn code(&self, node: usize) -> &str {
        &self.codes[node]
    }

    pub fn index_of(&self, code: &str) -> Option<usize> {
        self.codes.binary_search_by(|c| c.as_str().cmp(code)).ok()
    }

    fn require(&self, code: &str) -> Result<usize> {
        self.index_of(code).ok_or_else(|| Error::UnknownNode(code.to_string()))
    }

    /// All edges, sorted by `(source, target)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, node: usize) -> &[Edge] {
        &self.edges[self.out_offsets[node]..self.out_offsets[node + 1]]
    }

    /// Id of the first edge leaving `node`; ids of `out_edges(node)` are consecutive.
    pub(crate) fn out_edge_start(&self, node: usize) -> usize {
        self.out_offsets[node]
    }

    /// Ids (positions in [`Network::edges`]) of the edges entering `node`.
    pub fn in_edge_ids(&self, node: usize) -> &[usize] {
        &self.in_edges[self.in_offsets[node]..self.in_offsets[node + 1]]
    }

    pub fn edge_id(&self, source: usize, target: usize) -> Option<usize> {
        let start = self.out_offsets[source];
        self.out_edges(source)
            .binary_search_by_key(&target, |e| e.target)
            .ok()
            .map(|k| start + k)
    }

    pub fn export_volume_at(&self, node: usize) -> f64 {
        self.out_edges(node).iter().map(|e| e.volume).sum()
    }

    pub fn import_volume_at(&self, node: usize) -> f64 {
        self.in_edge_ids(node).iter().map(|&id| self.edges[id].volume).sum()
    }

    /// Total export volume `V_out` of an economy.
    pub fn export_volume(&self, code: &str) -> Result<f64> {
        Ok(self.export_volume_at(self.require(code)?))
    }

    /// Total import volume `V_in` of an economy.
    pub fn import_volume(&self, code: &str) -> Result<f64> {
        Ok(self.import_volume_at(self.require(code)?))
    }

    /// Total trade volume `V` of the network (0 when there are no edges).
    pub fn total_volume(&self) -> f64 {
        self.edges.iter().map(|e| e.volume).sum()
    }

    /// Average relationship volume `<v>`.
    pub fn mean_edge_volume(&self) -> Result<f64> {
        if self.edges.is_empty() {
            return Err(Error::NoEdges);
        }
        Ok(self.total_volume() / self.edges.len() as f64)
    }

    /// Snapshot without `code` and all relationships touching it.
    pub fn remove_node(&self, code: &str) -> Result<Network> {
        let removed = self.require(code)?;
        let reindex = |i: usize| if i > removed { i - 1 } else { i };
        let codes = self
            .codes
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != removed)
            .map(|(_, c)| c.clone())
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| e.source != removed && e.target != removed)
            .map(|e| Edge {
                source: reindex(e.source),
                target: reindex(e.target),
                volume: e.volume,
            })
            .collect();
        Network::from_parts(self.year, codes, edges)
    }

    /// Snapshot without the relationship `source -> target`; both economies stay.
    pub fn remove_edge(&self, source: &str, target: &str) -> Result<Network> {
        let unknown = || Error::UnknownEdge(source.to_string(), target.to_string());
        let s = self.index_of(source).ok_or_else(unknown)?;
        let t = self.index_of(target).ok_or_else(unknown)?;
        let id = self.edge_id(s, t).ok_or_else(unknown)?;
        let mut edges = self.edges.clone();
        edges.remove(id);
        Network::from_parts(self.year, self.codes.clone(), edges)
    }

    /// Writes the network in the trade CSV format (`year,exporter,importer,volume`).
    ///
    /// Volumes use the shortest representation that parses back to the same
    /// `f64`, so re-ingesting the output reproduces the network exactly.
    /// Economies without any relationship cannot be represented and are lost.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["year", "exporter", "importer", "volume"])?;
        for e in &self.edges {
            out.write_record([
                self.year.to_string(),
                self.codes[e.source].clone(),
                self.codes[e.target].clone(),
                e.volume.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}
