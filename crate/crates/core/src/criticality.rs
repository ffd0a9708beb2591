//! Criticality of economies and trade relationships: the relative efficiency
//! loss `C = 1 - E(G') / E(G)` when one economy (with all its relationships)
//! or one relationship is deleted.
//!
//! Sweeps reuse the shortest-path trees of the intact network. A removal can
//! only change distances from a source if it deletes the unique tight
//! predecessor of some node in that source's tree, so only those sources are
//! searched again; every other row of the efficiency sum is taken from the
//! intact network. The result is identical to recomputing each reduced
//! network from scratch.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::efficiency::{Evaluator, Mode};
use crate::error::{Error, Result};
use crate::ingest::{GroupMap, UNMAPPED_GROUP};
use crate::network::Network;
use crate::par;
use crate::paths::{self, Exclusion, SourceTree};

/// Whether economies or relationships are removed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Node,
    Edge,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Node => "node",
            Kind::Edge => "edge",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "node" => Ok(Kind::Node),
            "edge" => Ok(Kind::Edge),
            other => Err(format!("unknown kind `{other}` (expected node or edge)")),
        }
    }
}

/// An economy or a directed relationship, identified by economy codes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Key {
    Node(String),
    Edge(String, String),
}

impl Key {
    pub fn involves(&self, code: &str) -> bool {
        match self {
            Key::Node(c) => c == code,
            Key::Edge(s, t) => s == code || t == code,
        }
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Key::Node(c) => f.write_str(c),
            Key::Edge(s, t) => write!(f, "{s}->{t}"),
        }
    }
}

impl Serialize for Key {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// One scored entry. `volume` is the tie-break: import plus export volume
/// for an economy, the relationship's own volume for an edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scored {
    pub key: Key,
    pub criticality: f64,
    pub volume: f64,
}

/// Descending score, then descending volume, then ascending key.
pub(crate) fn rank_order(a: &Scored, b: &Scored) -> Ordering {
    b.criticality
        .total_cmp(&a.criticality)
        .then_with(|| b.volume.total_cmp(&a.volume))
        .then_with(|| a.key.cmp(&b.key))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalityTable {
    mode: Mode,
    kind: Kind,
    baseline: f64,
    ranked: Vec<Scored>,
    #[serde(skip)]
    economies: Vec<String>,
}

impl CriticalityTable {
    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// Efficiency of the intact network.
    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    /// Entries in rank order.
    pub fn ranked(&self) -> &[Scored] {
        &self.ranked
    }

    pub fn get(&self, key: &Key) -> Option<f64> {
        self.ranked.iter().find(|s| &s.key == key).map(|s| s.criticality)
    }

    pub fn len(&self) -> usize {
        self.ranked.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranked.is_empty()
    }
}

struct Sweep<'a> {
    ev: Evaluator<'a>,
    trees: Vec<SourceTree>,
    baseline: f64,
}

impl<'a> Sweep<'a> {
    fn new(net: &'a Network, mode: Mode) -> Result<Self> {
        let ev = Evaluator::new(net, mode);
        let trees = par::map_range(net.node_count(), |s| {
            SourceTree::build(net, ev.metric(), &ev.lengths, s)
        });
        let baseline = ev.finish(trees.iter().map(|t| t.row), &Exclusion::none());
        if baseline <= 0.0 {
            return Err(Error::DegenerateBaseline);
        }
        Ok(Sweep { ev, trees, baseline })
    }

    fn criticality(&self, reduced: f64) -> f64 {
        1.0 - reduced / self.baseline
    }
}

/// Criticality of every economy, `C_i = 1 - E(G_i) / E(G)`.
///
/// Scores can be negative: removing a peripheral economy may raise the
/// average over the remaining `(N-1)(N-2)` pairs.
pub fn node_criticality(net: &Network, mode: Mode) -> Result<CriticalityTable> {
    let n = net.node_count();
    if n < 3 {
        return Err(Error::TooFewNodes { required: 3, found: n });
    }
    let sweep = Sweep::new(net, mode)?;

    // relays[s * n + i]: removing economy i can change distances from s
    let mut relays = vec![false; n * n];
    for (s, tree) in sweep.trees.iter().enumerate() {
        let row = &mut relays[s * n..(s + 1) * n];
        if tree.fragile {
            row.fill(true);
            continue;
        }
        for k in tree.sole_pred_edges() {
            row[net.edges()[k].source] = true;
        }
    }

    let scores = par::map_range(n, |i| {
        let excl = Exclusion::of_nodes(net, [i]);
        let rows = (0..n).map(|s| {
            if s == i {
                0.0
            } else if relays[s * n + i] {
                paths::row_efficiency(&sweep.ev.distances(s, &excl), s, &excl)
            } else {
                paths::row_efficiency(&sweep.trees[s].dist, s, &excl)
            }
        });
        sweep.criticality(sweep.ev.finish(rows, &excl))
    });

    let ranked = scores
        .into_iter()
        .enumerate()
        .map(|(i, criticality)| Scored {
            key: Key::Node(net.code(i).to_string()),
            criticality,
            volume: net.import_volume_at(i) + net.export_volume_at(i),
        })
        .collect();
    Ok(table(net, mode, Kind::Node, sweep.baseline, ranked))
}

/// Criticality of every relationship, `C_ij = 1 - E(G_ij) / E(G)`.
pub fn edge_criticality(net: &Network, mode: Mode) -> Result<CriticalityTable> {
    let n = net.node_count();
    if n < 2 {
        return Err(Error::TooFewNodes { required: 2, found: n });
    }
    if net.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let sweep = Sweep::new(net, mode)?;

    let fragile: Vec<usize> = (0..n).filter(|&s| sweep.trees[s].fragile).collect();
    let mut affected: Vec<Vec<u32>> = vec![Vec::new(); net.edge_count()];
    for (s, tree) in sweep.trees.iter().enumerate() {
        if !tree.fragile {
            for k in tree.sole_pred_edges() {
                affected[k].push(s as u32);
            }
        }
    }
    let intact_rows: Vec<f64> = sweep.trees.iter().map(|t| t.row).collect();

    let scores = par::map_range(net.edge_count(), |k| {
        let excl = Exclusion::of_edges(net, [k]);
        let mut rows = intact_rows.clone();
        let sources = affected[k].iter().map(|&s| s as usize).chain(fragile.iter().copied());
        for s in sources {
            rows[s] = paths::row_efficiency(&sweep.ev.distances(s, &excl), s, &excl);
        }
        sweep.criticality(sweep.ev.finish(rows.into_iter(), &excl))
    });

    let ranked = scores
        .into_iter()
        .zip(net.edges())
        .map(|(criticality, e)| Scored {
            key: Key::Edge(net.code(e.source).to_string(), net.code(e.target).to_string()),
            criticality,
            volume: e.volume,
        })
        .collect();
    Ok(table(net, mode, Kind::Edge, sweep.baseline, ranked))
}

fn table(net: &Network, mode: Mode, kind: Kind, baseline: f64, mut ranked: Vec<Scored>) -> CriticalityTable {
    ranked.sort_by(rank_order);
    CriticalityTable {
        mode,
        kind,
        baseline,
        ranked,
        economies: net.codes().to_vec(),
    }
}

/// The first `k` entries in rank order (all of them if `k` exceeds the size).
pub fn rank_top(table: &CriticalityTable, k: usize) -> Vec<(Key, f64)> {
    table
        .ranked
        .iter()
        .take(k)
        .map(|s| (s.key.clone(), s.criticality))
        .collect()
}

/// Sum of economy criticalities per group. Economies missing from `groups`
/// are collected under [`UNMAPPED_GROUP`].
pub fn group_criticality(table: &CriticalityTable, groups: &GroupMap) -> Result<BTreeMap<String, f64>> {
    if table.kind != Kind::Node {
        return Err(Error::IncompatibleStrategy {
            strategy: "group aggregation".into(),
            kind: table.kind.to_string(),
        });
    }
    let mut by_code: Vec<(&str, f64)> = table
        .ranked
        .iter()
        .filter_map(|s| match &s.key {
            Key::Node(c) => Some((c.as_str(), s.criticality)),
            Key::Edge(..) => None,
        })
        .collect();
    by_code.sort_by(|a, b| a.0.cmp(b.0));
    let mut sums = BTreeMap::new();
    for (code, c) in by_code {
        let group = groups.group_of(code).unwrap_or(UNMAPPED_GROUP);
        *sums.entry(group.to_string()).or_insert(0.0) += c;
    }
    Ok(sums)
}

/// The `k` most critical relationships touching `economy`, imports and
/// exports pooled into one ranking.
pub fn economy_top_relationships(table: &CriticalityTable, economy: &str, k: usize) -> Result<Vec<(Key, f64)>> {
    if table.kind != Kind::Edge {
        return Err(Error::IncompatibleStrategy {
            strategy: "relationship ranking".into(),
            kind: table.kind.to_string(),
        });
    }
    if table.economies.binary_search_by(|c| c.as_str().cmp(economy)).is_err() {
        return Err(Error::UnknownNode(economy.to_string()));
    }
    Ok(table
        .ranked
        .iter()
        .filter(|s| s.key.involves(economy))
        .take(k)
        .map(|s| (s.key.clone(), s.criticality))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn net(flows: &[(&str, &str, f64)]) -> Network {
        Network::from_flows(2017, flows.iter().copied()).unwrap()
    }

    fn complete(n: usize) -> Network {
        let mut flows = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b {
                    flows.push((format!("N{a}"), format!("N{b}"), 1.0));
                }
            }
        }
        Network::from_flows(2017, flows).unwrap()
    }

    fn node(c: &str) -> Key {
        Key::Node(c.into())
    }

    fn edge(s: &str, t: &str) -> Key {
        Key::Edge(s.into(), t.into())
    }

    fn table_of(kind: Kind, scores: &[(Key, f64, f64)]) -> CriticalityTable {
        let ranked = scores
            .iter()
            .map(|(key, c, v)| Scored {
                key: key.clone(),
                criticality: *c,
                volume: *v,
            })
            .collect();
        let mut economies: Vec<String> = scores
            .iter()
            .flat_map(|(k, _, _)| match k {
                Key::Node(c) => vec![c.clone()],
                Key::Edge(s, t) => vec![s.clone(), t.clone()],
            })
            .collect();
        economies.sort();
        economies.dedup();
        let mut t = table(&complete(3), Mode::Unweighted, kind, 1.0, ranked);
        t.economies = economies;
        t
    }

    #[test]
    fn out_star_node_scores() {
        let star = net(&[("c", "1", 1.0), ("c", "2", 1.0), ("c", "3", 1.0)]);
        let t = node_criticality(&star, Mode::Unweighted).unwrap();
        assert_eq!(t.get(&node("c")), Some(1.0));
        let leaf = t.get(&node("2")).unwrap();
        assert!((leaf + 1.0 / 3.0).abs() < TOL);
        assert_eq!(t.ranked()[0].key, node("c"));
        assert!((t.baseline() - 0.25).abs() < TOL);
    }

    #[test]
    fn complete_graph_is_symmetric() {
        let k4 = complete(4);
        for mode in Mode::ALL {
            let t = node_criticality(&k4, mode).unwrap();
            let first = t.ranked()[0].criticality;
            assert!(t.ranked().iter().all(|s| (s.criticality - first).abs() < TOL));
        }
    }

    #[test]
    fn path_edge_scores() {
        let path = net(&[("A", "B", 1.0), ("B", "C", 1.0)]);
        let t = edge_criticality(&path, Mode::Unweighted).unwrap();
        assert!((t.get(&edge("A", "B")).unwrap() - 0.6).abs() < TOL);
        assert!((t.get(&edge("B", "C")).unwrap() - 0.6).abs() < TOL);
    }

    #[test]
    fn complete_graph_edge_scores() {
        let t = edge_criticality(&complete(3), Mode::Unweighted).unwrap();
        for s in t.ranked() {
            assert!((s.criticality - 0.5 / 6.0).abs() < TOL, "{s:?}");
        }
    }

    #[test]
    fn degenerate_inputs() {
        let tiny = net(&[("A", "B", 1.0)]);
        assert!(matches!(
            node_criticality(&tiny, Mode::Unweighted),
            Err(Error::TooFewNodes { .. })
        ));
        let edgeless = net(&[("c", "1", 1.0), ("c", "2", 1.0), ("c", "3", 1.0)])
            .remove_node("c")
            .unwrap();
        assert!(matches!(
            node_criticality(&edgeless, Mode::Weighted),
            Err(Error::DegenerateBaseline)
        ));
        assert!(matches!(
            edge_criticality(&edgeless, Mode::Weighted),
            Err(Error::NoEdges)
        ));
    }

    #[test]
    fn rank_top_cases() {
        let t = table_of(
            Kind::Node,
            &[(node("A"), 0.5, 0.0), (node("B"), 0.2, 0.0), (node("C"), 0.9, 0.0)],
        );
        assert_eq!(rank_top(&t, 2), [(node("C"), 0.9), (node("A"), 0.5)]);
        assert_eq!(rank_top(&t, 10).len(), 3);
    }

    #[test]
    fn ties_break_on_volume_then_code() {
        let t = table_of(
            Kind::Node,
            &[
                (node("B"), 0.5, 1.0),
                (node("A"), 0.5, 1.0),
                (node("C"), 0.5, 9.0),
                (node("D"), 0.7, 0.0),
            ],
        );
        let keys: Vec<String> = t.ranked().iter().map(|s| s.key.to_string()).collect();
        assert_eq!(keys, ["D", "C", "A", "B"]);
    }

    #[test]
    fn group_sums() {
        let t = table_of(
            Kind::Node,
            &[(node("A"), 0.2, 0.0), (node("B"), 0.3, 0.0), (node("C"), -0.1, 0.0)],
        );
        let groups: GroupMap = [("A", "X"), ("B", "X"), ("C", "Y")].into_iter().collect();
        let sums = group_criticality(&t, &groups).unwrap();
        assert!((sums["X"] - 0.5).abs() < TOL);
        assert!((sums["Y"] + 0.1).abs() < TOL);
        assert_eq!(sums.len(), 2);

        let sums = group_criticality(&t, &GroupMap::new()).unwrap();
        assert_eq!(sums.keys().collect::<Vec<_>>(), [UNMAPPED_GROUP]);
        assert!((sums[UNMAPPED_GROUP] - 0.4).abs() < TOL);

        let one: GroupMap = [("A", "g"), ("B", "g"), ("C", "g")].into_iter().collect();
        assert!((group_criticality(&t, &one).unwrap()["g"] - 0.4).abs() < TOL);
    }

    #[test]
    fn top_relationships_of_an_economy() {
        let t = table_of(
            Kind::Edge,
            &[
                (edge("A", "B"), 0.5, 1.0),
                (edge("B", "A"), 0.4, 1.0),
                (edge("C", "D"), 0.9, 1.0),
            ],
        );
        assert_eq!(
            economy_top_relationships(&t, "A", 2).unwrap(),
            [(edge("A", "B"), 0.5), (edge("B", "A"), 0.4)]
        );
        assert_eq!(economy_top_relationships(&t, "A", 1).unwrap(), [(edge("A", "B"), 0.5)]);
        assert!(matches!(
            economy_top_relationships(&t, "Q", 1),
            Err(Error::UnknownNode(_))
        ));

        let mut t = t;
        t.economies.push("E".into());
        t.economies.sort();
        assert!(economy_top_relationships(&t, "E", 3).unwrap().is_empty());
    }

    #[test]
    fn normalized_edge_criticality_can_be_negative() {
        // A->C is bypassed by the heavier A->B->C route but its volume is
        // above the mean, so dropping it lowers <v> more than it lowers E^W.
        let n = net(&[
            ("A", "B", 1000.0),
            ("B", "C", 1000.0),
            ("A", "C", 400.0),
            ("X", "Y", 1.0),
            ("Y", "X", 1.0),
            ("Z", "X", 1.0),
            ("X", "Z", 1.0),
            ("Y", "Z", 1.0),
        ]);
        let t = edge_criticality(&n, Mode::Normalized).unwrap();
        assert!(t.get(&edge("A", "C")).unwrap() < 0.0);
        let t = edge_criticality(&n, Mode::Weighted).unwrap();
        assert!(t.get(&edge("A", "C")).unwrap().abs() < TOL);
    }
}
