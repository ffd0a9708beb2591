//! Network efficiency: the mean over ordered pairs of economies of the
//! reciprocal shortest-path length.
//!
//! * unweighted `E^A`: path length is the hop count;
//! * weighted `E^W`: path length is the sum of `1 / volume` along the path
//!   that minimises it, so heavy trade routes are "short";
//! * normalized `E^W̄ = E^W / <v>`, which removes the overall volume scale.
//!
//! Unreachable pairs contribute zero. Networks with fewer than two economies
//! have efficiency zero in every mode.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Network;
use crate::par;
use crate::paths::{self, Exclusion, Metric};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Unweighted,
    Weighted,
    Normalized,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Unweighted, Mode::Weighted, Mode::Normalized];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Unweighted => "unweighted",
            Mode::Weighted => "weighted",
            Mode::Normalized => "normalized",
        }
    }

    pub(crate) fn metric(self) -> Metric {
        match self {
            Mode::Unweighted => Metric::Hops,
            Mode::Weighted | Mode::Normalized => Metric::InverseVolume,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "unweighted" => Ok(Mode::Unweighted),
            "weighted" => Ok(Mode::Weighted),
            "normalized" => Ok(Mode::Normalized),
            other => Err(format!(
                "unknown mode `{other}` (expected unweighted, weighted or normalized)"
            )),
        }
    }
}

/// Shortest-path lengths from one economy.
#[derive(Debug, Clone, PartialEq)]
pub struct PathLengths {
    source: usize,
    dist: Vec<f64>,
}

impl PathLengths {
    pub fn source(&self) -> usize {
        self.source
    }

    /// Length to `target`, or `None` if it cannot be reached.
    pub fn get(&self, target: usize) -> Option<f64> {
        let d = self.dist[target];
        d.is_finite().then_some(d)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Option<f64>)> + '_ {
        (0..self.dist.len()).map(|t| (t, self.get(t)))
    }
}

fn lengths_from(net: &Network, code: &str, metric: Metric) -> Result<PathLengths> {
    let source = net.index_of(code).ok_or_else(|| Error::UnknownNode(code.to_string()))?;
    let lengths = paths::edge_lengths(net, metric);
    Ok(PathLengths {
        source,
        dist: paths::distances(net, metric, &lengths, source, &Exclusion::none()),
    })
}

/// Hop counts along directed relationships from `code`.
pub fn shortest_lengths_unweighted(net: &Network, code: &str) -> Result<PathLengths> {
    lengths_from(net, code, Metric::Hops)
}

/// Minimal sums of `1 / volume` along directed relationships from `code`.
pub fn shortest_lengths_weighted(net: &Network, code: &str) -> Result<PathLengths> {
    lengths_from(net, code, Metric::InverseVolume)
}

/// Evaluates efficiency of one network, and of that network with parts
/// excluded, without rebuilding it.
pub(crate) struct Evaluator<'a> {
    pub net: &'a Network,
    pub mode: Mode,
    pub lengths: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(net: &'a Network, mode: Mode) -> Self {
        Evaluator {
            net,
            mode,
            lengths: paths::edge_lengths(net, mode.metric()),
        }
    }

    pub fn metric(&self) -> Metric {
        self.mode.metric()
    }

    pub fn distances(&self, source: usize, excl: &Exclusion) -> Vec<f64> {
        paths::distances(self.net, self.metric(), &self.lengths, source, excl)
    }

    /// Efficiency with `excl` removed, computing every source row afresh.
    pub fn evaluate(&self, excl: &Exclusion) -> f64 {
        let n = self.net.node_count();
        let rows = par::map_range(n, |s| {
            if excl.node_removed(s) {
                0.0
            } else {
                paths::row_efficiency(&self.distances(s, excl), s, excl)
            }
        });
        self.finish(rows.iter().copied(), excl)
    }

    /// Combines per-source row sums (in node-index order) into the efficiency.
    pub fn finish(&self, rows: impl Iterator<Item = f64>, excl: &Exclusion) -> f64 {
        let alive = excl.surviving_nodes(self.net);
        if alive < 2 {
            return 0.0;
        }
        let sum: f64 = rows.sum();
        let raw = sum / (alive as f64 * (alive - 1) as f64);
        match self.mode {
            Mode::Unweighted | Mode::Weighted => raw,
            Mode::Normalized => match self.surviving_mean_volume(excl) {
                Some(mean) => raw / mean,
                None => 0.0,
            },
        }
    }

    fn surviving_mean_volume(&self, excl: &Exclusion) -> Option<f64> {
        let mut total = 0.0;
        let mut count = 0usize;
        for (k, e) in self.net.edges().iter().enumerate() {
            if !excl.edge_removed(self.net, k) {
                total += e.volume;
                count += 1;
            }
        }
        (count > 0).then(|| total / count as f64)
    }
}

/// Efficiency of `net` in the given mode.
pub fn efficiency(net: &Network, mode: Mode) -> f64 {
    Evaluator::new(net, mode).evaluate(&Exclusion::none())
}

/// `E^A`.
pub fn efficiency_unweighted(net: &Network) -> f64 {
    efficiency(net, Mode::Unweighted)
}

/// `E^W`.
pub fn efficiency_weighted(net: &Network) -> f64 {
    efficiency(net, Mode::Weighted)
}

/// `E^W̄`, zero for a network without relationships.
pub fn efficiency_normalized(net: &Network) -> f64 {
    efficiency(net, Mode::Normalized)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn net(flows: &[(&str, &str, f64)]) -> Network {
        Network::from_flows(2017, flows.iter().copied()).unwrap()
    }

    fn complete(n: usize, v: f64) -> Network {
        let names: Vec<String> = (0..n).map(|i| format!("N{i}")).collect();
        let mut flows = Vec::new();
        for a in &names {
            for b in &names {
                if a != b {
                    flows.push((a.clone(), b.clone(), v));
                }
            }
        }
        Network::from_flows(2017, flows).unwrap()
    }

    fn path(v: f64) -> Network {
        net(&[("A", "B", v), ("B", "C", v)])
    }

    fn star() -> Network {
        net(&[("c", "1", 1.0), ("c", "2", 1.0), ("c", "3", 1.0)])
    }

    #[test]
    fn unweighted_lengths() {
        let p = path(1.0);
        let from_a = shortest_lengths_unweighted(&p, "A").unwrap();
        assert_eq!(
            from_a.iter().collect::<Vec<_>>(),
            [(0, Some(0.0)), (1, Some(1.0)), (2, Some(2.0))]
        );
        let from_c = shortest_lengths_unweighted(&p, "C").unwrap();
        assert_eq!(
            from_c.iter().collect::<Vec<_>>(),
            [(0, None), (1, None), (2, Some(0.0))]
        );
        let k3 = complete(3, 1.0);
        let d = shortest_lengths_unweighted(&k3, "N1").unwrap();
        assert_eq!(d.iter().filter_map(|(_, d)| d).sum::<f64>(), 2.0);
        assert!(shortest_lengths_unweighted(&k3, "X").is_err());
    }

    #[test]
    fn weighted_lengths() {
        let n = net(&[("1", "2", 1.0), ("2", "3", 1.0), ("1", "3", 0.25)]);
        let d = shortest_lengths_weighted(&n, "1").unwrap();
        assert_eq!(d.get(1), Some(1.0));
        assert_eq!(d.get(2), Some(2.0));
        let single = net(&[("A", "B", 4.0)]);
        assert_eq!(shortest_lengths_weighted(&single, "A").unwrap().get(1), Some(0.25));
        assert_eq!(shortest_lengths_weighted(&single, "B").unwrap().get(0), None);
    }

    #[test]
    fn unweighted_examples() {
        assert_eq!(efficiency_unweighted(&complete(3, 1.0)), 1.0);
        assert!((efficiency_unweighted(&path(1.0)) - 2.5 / 6.0).abs() < TOL);
        assert!((efficiency_unweighted(&star()) - 0.25).abs() < TOL);
    }

    #[test]
    fn weighted_examples() {
        assert!((efficiency_weighted(&path(2.0)) - 5.0 / 6.0).abs() < TOL);
        let n = net(&[("1", "2", 1.0), ("2", "3", 1.0), ("1", "3", 0.25)]);
        assert!((efficiency_weighted(&n) - 2.5 / 6.0).abs() < TOL);
        assert_eq!(efficiency_weighted(&star()), efficiency_unweighted(&star()));
    }

    #[test]
    fn normalized_examples() {
        assert!((efficiency_normalized(&path(2.0)) - 2.5 / 6.0).abs() < TOL);
        let n = net(&[("A", "B", 3.0), ("B", "C", 0.5), ("C", "A", 7.0)]);
        let scaled = net(&[("A", "B", 30.0), ("B", "C", 5.0), ("C", "A", 70.0)]);
        let (a, b) = (efficiency_normalized(&n), efficiency_normalized(&scaled));
        assert!((a - b).abs() <= TOL * a);
        let constant = net(&[("A", "B", 3.5), ("B", "C", 3.5), ("A", "C", 3.5), ("D", "A", 3.5)]);
        let diff = efficiency_normalized(&constant) - efficiency_unweighted(&constant);
        assert!(diff.abs() < TOL);
    }

    #[test]
    fn degenerate_networks() {
        let g = path(1.0).remove_node("A").unwrap().remove_node("B").unwrap();
        assert_eq!(g.node_count(), 1);
        for mode in Mode::ALL {
            assert_eq!(efficiency(&g, mode), 0.0);
        }
        let edgeless = star().remove_node("c").unwrap();
        assert_eq!(efficiency_normalized(&edgeless), 0.0);
    }

    #[test]
    fn mode_parsing() {
        for mode in Mode::ALL {
            assert_eq!(mode.as_str().parse::<Mode>().unwrap(), mode);
        }
        assert!("fast".parse::<Mode>().is_err());
    }
}
