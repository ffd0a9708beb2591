//! Brute-force reference computations for tests.
//!
//! Everything here enumerates every simple directed path and rebuilds
//! reduced networks explicitly through [`Network::remove_node`] and
//! [`Network::remove_edge`]; none of it goes through the shortest-path
//! engine. Only practical for a handful of economies.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::criticality::{Key, Kind};
use crate::efficiency::Mode;
use crate::network::Network;

/// Shortest length from `source` to every node by enumerating all simple
/// paths; `None` when unreachable.
pub fn all_paths_lengths(net: &Network, source: usize, weighted: bool) -> Vec<Option<f64>> {
    fn walk(net: &Network, u: usize, len: f64, weighted: bool, on_path: &mut [bool], best: &mut [Option<f64>]) {
        for e in net.out_edges(u) {
            if on_path[e.target] {
                continue;
            }
            let step = if weighted { 1.0 / e.volume } else { 1.0 };
            let next = len + step;
            if best[e.target].is_none_or(|b| next < b) {
                best[e.target] = Some(next);
            }
            on_path[e.target] = true;
            walk(net, e.target, next, weighted, on_path, best);
            on_path[e.target] = false;
        }
    }
    let n = net.node_count();
    let mut best = vec![None; n];
    best[source] = Some(0.0);
    let mut on_path = vec![false; n];
    on_path[source] = true;
    walk(net, source, 0.0, weighted, &mut on_path, &mut best);
    best
}

/// Efficiency straight from its definition, over all ordered pairs.
pub fn efficiency(net: &Network, mode: Mode) -> f64 {
    let n = net.node_count();
    if n < 2 {
        return 0.0;
    }
    let weighted = mode != Mode::Unweighted;
    let mut sum = 0.0;
    for s in 0..n {
        for (t, d) in all_paths_lengths(net, s, weighted).into_iter().enumerate() {
            if t != s {
                if let Some(d) = d {
                    sum += 1.0 / d;
                }
            }
        }
    }
    let e = sum / (n * (n - 1)) as f64;
    match mode {
        Mode::Normalized if net.edge_count() == 0 => 0.0,
        Mode::Normalized => {
            let mean = net.edges().iter().map(|e| e.volume).sum::<f64>() / net.edge_count() as f64;
            e / mean
        }
        _ => e,
    }
}

/// Criticality of every economy by rebuilding each reduced network.
pub fn node_criticality(net: &Network, mode: Mode) -> Vec<(Key, f64)> {
    let base = efficiency(net, mode);
    net.codes()
        .iter()
        .map(|c| {
            let reduced = net.remove_node(c).unwrap();
            (Key::Node(c.clone()), 1.0 - efficiency(&reduced, mode) / base)
        })
        .collect()
}

/// Criticality of every relationship by rebuilding each reduced network.
pub fn edge_criticality(net: &Network, mode: Mode) -> Vec<(Key, f64)> {
    let base = efficiency(net, mode);
    net.edges()
        .iter()
        .map(|e| {
            let (s, t) = (net.code(e.source), net.code(e.target));
            let reduced = net.remove_edge(s, t).unwrap();
            (Key::Edge(s.into(), t.into()), 1.0 - efficiency(&reduced, mode) / base)
        })
        .collect()
}

/// Network with the given economies or relationships deleted one by one.
pub fn remove_all(net: &Network, kind: Kind, keys: &[Key]) -> Network {
    let mut g = net.clone();
    for key in keys {
        g = match (kind, key) {
            (Kind::Node, Key::Node(c)) => g.remove_node(c).unwrap(),
            (Kind::Edge, Key::Edge(s, t)) => g.remove_edge(s, t).unwrap(),
            _ => panic!("key {key} does not match kind {kind}"),
        };
    }
    g
}

/// All candidates of a kind, in index order.
pub fn candidates(net: &Network, kind: Kind) -> Vec<Key> {
    match kind {
        Kind::Node => net.codes().iter().map(|c| Key::Node(c.clone())).collect(),
        Kind::Edge => net
            .edges()
            .iter()
            .map(|e| Key::Edge(net.code(e.source).into(), net.code(e.target).into()))
            .collect(),
    }
}

/// Mean robustness over every subset of `removed` candidates.
pub fn exact_random_robustness(net: &Network, kind: Kind, mode: Mode, removed: usize) -> f64 {
    let base = efficiency(net, mode);
    let all = candidates(net, kind);
    let mut sum = 0.0;
    let mut count = 0usize;
    for subset in all.iter().cloned().combinations(removed) {
        sum += efficiency(&remove_all(net, kind, &subset), mode) / base;
        count += 1;
    }
    sum / count as f64
}

/// Random directed network on `n` economies: each ordered pair is linked
/// with probability `density`, volumes uniform in `(0, max_volume]`. Every
/// economy gets at least one relationship.
#[allow(clippy::needless_range_loop)]
pub fn random_network(seed: u64, n: usize, density: f64, max_volume: f64) -> Network {
    assert!(n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let volume = |rng: &mut ChaCha8Rng| max_volume * (1.0 - rng.random::<f64>());
    let mut linked = vec![vec![false; n]; n];
    let mut flows = Vec::new();
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.random_bool(density) {
                linked[s][t] = true;
                flows.push((s, t, volume(&mut rng)));
            }
        }
    }
    for i in 0..n {
        let touched = (0..n).any(|j| linked[i][j] || linked[j][i]);
        if !touched {
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let (s, t) = if rng.random_bool(0.5) { (i, j) } else { (j, i) };
            linked[s][t] = true;
            flows.push((s, t, volume(&mut rng)));
        }
    }
    Network::from_flows(
        2000,
        flows.into_iter().map(|(s, t, v)| (format!("E{s}"), format!("E{t}"), v)),
    )
    .unwrap()
}

/// Same topology with every volume replaced by `volume`.
pub fn with_constant_volume(net: &Network, volume: f64) -> Network {
    rescaled(net, |_| volume)
}

/// Same topology with volumes mapped through `f`.
pub fn rescaled(net: &Network, f: impl Fn(f64) -> f64) -> Network {
    Network::from_flows(
        net.year(),
        net.edges()
            .iter()
            .map(|e| (net.code(e.source), net.code(e.target), f(e.volume))),
    )
    .unwrap()
}

/// Full-scale synthetic trade year: `n` economies and about `edges`
/// relationships with heavy-tailed volumes and hub-biased endpoints.
pub fn synthetic_year(seed: u64, year: i32, n: usize, edges: usize) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (year as u64).wrapping_mul(0x9e37_79b9));
    let mut linked = std::collections::HashSet::new();
    let mut flows = Vec::with_capacity(edges);
    // ring keeps every economy connected
    for i in 0..n {
        linked.insert((i, (i + 1) % n));
    }
    let pick = |rng: &mut ChaCha8Rng| {
        let u: f64 = rng.random();
        ((u * u) * n as f64) as usize % n
    };
    while linked.len() < edges.min(n * (n - 1)) {
        let (s, t) = (pick(&mut rng), rng.random_range(0..n));
        if s != t {
            linked.insert((s, t));
        }
    }
    let mut pairs: Vec<_> = linked.into_iter().collect();
    pairs.sort_unstable();
    for (s, t) in pairs {
        let z: f64 = (0..6).map(|_| rng.random::<f64>()).sum::<f64>() - 3.0;
        flows.push((format!("C{s:03}"), format!("C{t:03}"), (8.0 + 2.5 * z).exp()));
    }
    Network::from_flows(year, flows).unwrap()
}
