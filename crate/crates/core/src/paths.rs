//! Single-source shortest paths over a [`Network`], optionally with some
//! economies or relationships excluded.
//!
//! Edge length is 1 (hop count) for the unweighted view and `1 / volume` for
//! the weighted view. Distances are the minimum, over directed paths, of the
//! left-to-right floating point sum of edge lengths; both the breadth-first
//! and the Dijkstra routines produce exactly that value, so results do not
//! depend on which route or which removal representation computed them.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::network::Network;

/// How edges are measured when searching for shortest paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Metric {
    Hops,
    InverseVolume,
}

/// Per-edge lengths for `metric`, indexed by edge id.
pub(crate) fn edge_lengths(net: &Network, metric: Metric) -> Vec<f64> {
    match metric {
        Metric::Hops => vec![1.0; net.edge_count()],
        Metric::InverseVolume => net.edges().iter().map(|e| 1.0 / e.volume).collect(),
    }
}

/// Economies and relationships treated as absent from a network.
#[derive(Debug, Clone, Default)]
pub(crate) struct Exclusion {
    nodes: Vec<bool>,
    edges: Vec<bool>,
    removed_nodes: usize,
}

impl Exclusion {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn of_nodes(net: &Network, nodes: impl IntoIterator<Item = usize>) -> Self {
        let mut mask = vec![false; net.node_count()];
        let mut removed_nodes = 0;
        for i in nodes {
            if !mask[i] {
                mask[i] = true;
                removed_nodes += 1;
            }
        }
        Exclusion {
            nodes: mask,
            edges: Vec::new(),
            removed_nodes,
        }
    }

    pub fn of_edges(net: &Network, edges: impl IntoIterator<Item = usize>) -> Self {
        let mut mask = vec![false; net.edge_count()];
        for k in edges {
            mask[k] = true;
        }
        Exclusion {
            nodes: Vec::new(),
            edges: mask,
            removed_nodes: 0,
        }
    }

    #[inline]
    pub fn node_removed(&self, i: usize) -> bool {
        self.nodes.get(i).copied().unwrap_or(false)
    }

    #[inline]
    pub fn edge_removed(&self, net: &Network, k: usize) -> bool {
        if self.edges.get(k).copied().unwrap_or(false) {
            return true;
        }
        if self.nodes.is_empty() {
            return false;
        }
        let e = &net.edges()[k];
        self.nodes[e.source] || self.nodes[e.target]
    }

    pub fn surviving_nodes(&self, net: &Network) -> usize {
        net.node_count() - self.removed_nodes
    }
}

/// Hop-count distances from `source`; unreachable entries are infinite.
pub(crate) fn bfs(net: &Network, source: usize, excl: &Exclusion) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; net.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = 0.0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let next = dist[u] + 1.0;
        let start = net.out_edge_start(u);
        for (offset, e) in net.out_edges(u).iter().enumerate() {
            if dist[e.target].is_finite() || excl.edge_removed(net, start + offset) {
                continue;
            }
            dist[e.target] = next;
            queue.push_back(e.target);
        }
    }
    dist
}

/// Dijkstra distances from `source` under per-edge `lengths`.
pub(crate) fn dijkstra(net: &Network, lengths: &[f64], source: usize, excl: &Exclusion) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; net.node_count()];
    let mut done = vec![false; net.node_count()];
    // non-negative f64 values order the same way as their bit patterns
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((0u64, source)));
    while let Some(Reverse((_, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        let du = dist[u];
        let start = net.out_edge_start(u);
        for (offset, e) in net.out_edges(u).iter().enumerate() {
            let k = start + offset;
            if done[e.target] || excl.edge_removed(net, k) {
                continue;
            }
            let candidate = du + lengths[k];
            if candidate < dist[e.target] {
                dist[e.target] = candidate;
                heap.push(Reverse((candidate.to_bits(), e.target)));
            }
        }
    }
    dist
}

/// Distances from `source` under `metric`.
pub(crate) fn distances(net: &Network, metric: Metric, lengths: &[f64], source: usize, excl: &Exclusion) -> Vec<f64> {
    match metric {
        Metric::Hops => bfs(net, source, excl),
        Metric::InverseVolume => dijkstra(net, lengths, source, excl),
    }
}

/// Sum of pairwise efficiencies `1 / d` from `source` to every other
/// surviving node, accumulated in node-index order.
pub(crate) fn row_efficiency(dist: &[f64], source: usize, excl: &Exclusion) -> f64 {
    let mut sum = 0.0;
    for (t, &d) in dist.iter().enumerate() {
        if t != source && d.is_finite() && !excl.node_removed(t) {
            sum += 1.0 / d;
        }
    }
    sum
}

/// Sentinel in [`SourceTree::sole_pred`]: zero or several strict predecessors.
const NO_SOLE_PRED: u32 = u32::MAX;

/// Shortest-path summary of one source on the intact network, used to decide
/// which removals can change distances from that source.
///
/// A tight predecessor edge `u -> v` satisfies `d(u) < d(v)` and
/// `d(u) + len == d(v)`. If every reachable node keeps at least one tight
/// predecessor edge after a removal, no distance from this source changes.
pub(crate) struct SourceTree {
    pub dist: Vec<f64>,
    pub row: f64,
    /// For each node, the id of its only tight predecessor edge, if unique.
    sole_pred: Vec<u32>,
    /// Some reachable node has no tight predecessor with strictly smaller
    /// distance (a zero-length step after rounding); treat every removal as
    /// affecting this source.
    pub fragile: bool,
}

impl SourceTree {
    pub fn build(net: &Network, metric: Metric, lengths: &[f64], source: usize) -> Self {
        let excl = Exclusion::none();
        let dist = distances(net, metric, lengths, source, &excl);
        let row = row_efficiency(&dist, source, &excl);
        let n = net.node_count();
        let mut count = vec![0u8; n];
        let mut sole_pred = vec![NO_SOLE_PRED; n];
        for u in 0..n {
            let du = dist[u];
            if !du.is_finite() {
                continue;
            }
            let start = net.out_edge_start(u);
            for (offset, e) in net.out_edges(u).iter().enumerate() {
                let k = start + offset;
                let v = e.target;
                if du < dist[v] && du + lengths[k] == dist[v] {
                    count[v] = count[v].saturating_add(1);
                    sole_pred[v] = k as u32;
                }
            }
        }
        let mut fragile = false;
        for v in 0..n {
            if count[v] != 1 {
                sole_pred[v] = NO_SOLE_PRED;
            }
            if v != source && dist[v].is_finite() && count[v] == 0 {
                fragile = true;
            }
        }
        SourceTree {
            dist,
            row,
            sole_pred,
            fragile,
        }
    }

    /// Ids of edges that are the only tight predecessor of some node.
    pub fn sole_pred_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.sole_pred
            .iter()
            .filter(|&&k| k != NO_SOLE_PRED)
            .map(|&k| k as usize)
    }
}
