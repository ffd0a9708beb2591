//! Robustness curves `R(p) = E(G(p)) / E(G)` under node and edge attacks.
//!
//! Targeted strategies remove candidates in a fixed order ranked once on the
//! intact network. The random strategy averages `R` over all subsets of the
//! given size when there are few enough of them, and otherwise over seeded
//! uniform samples.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::criticality::{edge_criticality, node_criticality, rank_order, Key, Kind, Scored};
use crate::efficiency::{Evaluator, Mode};
use crate::error::{Error, Result};
use crate::network::Network;
use crate::par;
use crate::paths::Exclusion;

pub const DEFAULT_SAMPLE_BUDGET: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Random,
    Criticality,
    /// Economies by total import volume.
    In,
    /// Economies by total export volume.
    Out,
    /// Relationships by volume.
    Value,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Random,
        Strategy::Criticality,
        Strategy::In,
        Strategy::Out,
        Strategy::Value,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Criticality => "criticality",
            Strategy::In => "in",
            Strategy::Out => "out",
            Strategy::Value => "value",
        }
    }

    pub fn supports(self, kind: Kind) -> bool {
        match self {
            Strategy::Random | Strategy::Criticality => true,
            Strategy::In | Strategy::Out => kind == Kind::Node,
            Strategy::Value => kind == Kind::Edge,
        }
    }

    /// Strategies applicable to `kind`, in canonical order.
    pub fn for_kind(kind: Kind) -> Vec<Strategy> {
        Strategy::ALL.into_iter().filter(|s| s.supports(kind)).collect()
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown strategy `{s}` (expected random, criticality, in, out or value)"))
    }
}

/// `0, 0.02, ..., 0.5`.
pub fn default_p_grid() -> Vec<f64> {
    (0..=25).map(|i| i as f64 * 0.02).collect()
}

pub fn validate_p_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidPGrid("grid is empty".into()));
    }
    if let Some(p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidPGrid(format!("{p} is outside [0, 1]")));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidPGrid("values must be strictly ascending".into()));
    }
    Ok(())
}

/// `round(p * candidates)`, halves rounded away from zero.
pub fn removal_count(p: f64, candidates: usize) -> usize {
    ((p * candidates as f64).round() as usize).min(candidates)
}

fn check_strategy(kind: Kind, strategy: Strategy) -> Result<()> {
    if strategy.supports(kind) {
        Ok(())
    } else {
        Err(Error::IncompatibleStrategy {
            strategy: strategy.to_string(),
            kind: kind.to_string(),
        })
    }
}

fn candidate_count(net: &Network, kind: Kind) -> usize {
    match kind {
        Kind::Node => net.node_count(),
        Kind::Edge => net.edge_count(),
    }
}

/// Full removal order for a targeted strategy, most important first.
pub fn attack_order(net: &Network, kind: Kind, strategy: Strategy, mode: Mode) -> Result<Vec<Key>> {
    check_strategy(kind, strategy)?;
    let mut scored: Vec<Scored> = match (strategy, kind) {
        (Strategy::Random, _) => {
            return Err(Error::IncompatibleStrategy {
                strategy: "random".into(),
                kind: "ordered".into(),
            })
        }
        (Strategy::Criticality, Kind::Node) => node_criticality(net, mode)?.ranked().to_vec(),
        (Strategy::Criticality, Kind::Edge) => edge_criticality(net, mode)?.ranked().to_vec(),
        (Strategy::In | Strategy::Out, _) => (0..net.node_count())
            .map(|i| {
                let (imports, exports) = (net.import_volume_at(i), net.export_volume_at(i));
                Scored {
                    key: Key::Node(net.code(i).to_string()),
                    criticality: if strategy == Strategy::In { imports } else { exports },
                    volume: imports + exports,
                }
            })
            .collect(),
        (Strategy::Value, _) => net
            .edges()
            .iter()
            .map(|e| Scored {
                key: Key::Edge(net.code(e.source).to_string(), net.code(e.target).to_string()),
                criticality: e.volume,
                volume: e.volume,
            })
            .collect(),
    };
    scored.sort_by(rank_order);
    Ok(scored.into_iter().map(|s| s.key).collect())
}

/// One attack experiment. `order` is empty for the random strategy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackPlan {
    pub kind: Kind,
    pub strategy: Strategy,
    pub mode: Mode,
    pub order: Vec<Key>,
    pub p_grid: Vec<f64>,
}

impl AttackPlan {
    /// Validates the combination and computes the removal order on `net`.
    pub fn new(net: &Network, kind: Kind, strategy: Strategy, mode: Mode, p_grid: Vec<f64>) -> Result<Self> {
        check_strategy(kind, strategy)?;
        validate_p_grid(&p_grid)?;
        let order = if strategy == Strategy::Random {
            Vec::new()
        } else {
            attack_order(net, kind, strategy, mode)?
        };
        Ok(AttackPlan {
            kind,
            strategy,
            mode,
            order,
            p_grid,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub p: f64,
    /// Number of economies or relationships actually removed, `N_p`.
    pub n_removed: usize,
    #[serde(rename = "R")]
    pub r: f64,
    /// Standard error of the Monte Carlo mean; absent when exact.
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RobustnessCurve {
    pub kind: Kind,
    pub strategy: Strategy,
    pub mode: Mode,
    pub samples: Vec<CurvePoint>,
}

fn resolve(net: &Network, kind: Kind, key: &Key) -> Result<usize> {
    match (kind, key) {
        (Kind::Node, Key::Node(c)) => net.index_of(c).ok_or_else(|| Error::UnknownNode(c.clone())),
        (Kind::Edge, Key::Edge(s, t)) => {
            let unknown = || Error::UnknownEdge(s.clone(), t.clone());
            let si = net.index_of(s).ok_or_else(unknown)?;
            let ti = net.index_of(t).ok_or_else(unknown)?;
            net.edge_id(si, ti).ok_or_else(unknown)
        }
        _ => Err(Error::InvalidNetwork(format!("`{key}` is not a {kind} key"))),
    }
}

fn exclusion(net: &Network, kind: Kind, removed: &[usize]) -> Exclusion {
    match kind {
        Kind::Node => Exclusion::of_nodes(net, removed.iter().copied()),
        Kind::Edge => Exclusion::of_edges(net, removed.iter().copied()),
    }
}

fn baseline(ev: &Evaluator) -> Result<f64> {
    let e = ev.evaluate(&Exclusion::none());
    if e > 0.0 {
        Ok(e)
    } else {
        Err(Error::DegenerateBaseline)
    }
}

/// Robustness along a targeted plan: at each `p` the first `N_p` entries of
/// the order are removed.
pub fn robustness_curve(net: &Network, plan: &AttackPlan) -> Result<RobustnessCurve> {
    check_strategy(plan.kind, plan.strategy)?;
    validate_p_grid(&plan.p_grid)?;
    if plan.strategy == Strategy::Random {
        return Err(Error::IncompatibleStrategy {
            strategy: "random".into(),
            kind: "ordered".into(),
        });
    }
    let total = candidate_count(net, plan.kind);
    let order: Vec<usize> = plan
        .order
        .iter()
        .map(|k| resolve(net, plan.kind, k))
        .collect::<Result<_>>()?;
    let mut seen = order.clone();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != total || order.len() != total {
        return Err(Error::InvalidNetwork(
            "attack order is not a permutation of the candidates".into(),
        ));
    }

    let ev = Evaluator::new(net, plan.mode);
    let base = baseline(&ev)?;
    let mut samples: Vec<CurvePoint> = Vec::with_capacity(plan.p_grid.len());
    for &p in &plan.p_grid {
        let n_removed = removal_count(p, total);
        let r = match samples.last() {
            Some(prev) if prev.n_removed == n_removed => prev.r,
            _ => ev.evaluate(&exclusion(net, plan.kind, &order[..n_removed])) / base,
        };
        samples.push(CurvePoint {
            p,
            n_removed,
            r,
            stderr: None,
        });
    }
    Ok(RobustnessCurve {
        kind: plan.kind,
        strategy: plan.strategy,
        mode: plan.mode,
        samples,
    })
}

/// Settings for the random strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RandomSampling {
    /// Subsets evaluated per `p` when sampling.
    pub budget: usize,
    pub seed: u64,
    /// Sample even when all subsets could be enumerated within the budget.
    pub force_sampling: bool,
}

impl RandomSampling {
    pub fn new(budget: usize, seed: u64) -> Self {
        RandomSampling {
            budget,
            seed,
            force_sampling: false,
        }
    }
}

/// `C(n, k)` if it does not exceed `limit`.
fn binomial_within(n: usize, k: usize, limit: usize) -> Option<usize> {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
        if c > limit as u128 {
            return None;
        }
    }
    Some(c as usize)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent generator for one `(p, sample)` cell, so results do not
/// depend on evaluation order or on the rest of the grid.
fn sample_rng(seed: u64, p: f64, sample: usize) -> ChaCha8Rng {
    let mixed = splitmix(splitmix(splitmix(seed) ^ p.to_bits()) ^ sample as u64);
    ChaCha8Rng::seed_from_u64(mixed)
}

/// Mean robustness over random removals of `N_p` candidates.
pub fn random_robustness(
    net: &Network,
    kind: Kind,
    mode: Mode,
    p_grid: &[f64],
    sampling: RandomSampling,
) -> Result<RobustnessCurve> {
    validate_p_grid(p_grid)?;
    if sampling.budget == 0 {
        return Err(Error::ZeroBudget);
    }
    let total = candidate_count(net, kind);
    let ev = Evaluator::new(net, mode);
    let base = baseline(&ev)?;
    let ratio = |removed: &[usize]| ev.evaluate(&exclusion(net, kind, removed)) / base;

    let mut samples = Vec::with_capacity(p_grid.len());
    for &p in p_grid {
        let n_removed = removal_count(p, total);
        let exact = binomial_within(total, n_removed, sampling.budget).filter(|&c| c == 1 || !sampling.force_sampling);
        let point = match exact {
            Some(count) => {
                let subsets: Vec<Vec<usize>> = (0..total).combinations(n_removed).collect();
                debug_assert_eq!(subsets.len(), count);
                let values = par::map_range(subsets.len(), |j| ratio(&subsets[j]));
                let r = if count == 1 {
                    values[0]
                } else {
                    values.iter().sum::<f64>() / count as f64
                };
                CurvePoint {
                    p,
                    n_removed,
                    r,
                    stderr: None,
                }
            }
            None => {
                let values = par::map_range(sampling.budget, |j| {
                    let mut rng = sample_rng(sampling.seed, p, j);
                    let subset = rand::seq::index::sample(&mut rng, total, n_removed).into_vec();
                    ratio(&subset)
                });
                let (r, stderr) = mean_and_stderr(&values);
                CurvePoint {
                    p,
                    n_removed,
                    r,
                    stderr: Some(stderr),
                }
            }
        };
        samples.push(point);
    }
    Ok(RobustnessCurve {
        kind,
        strategy: Strategy::Random,
        mode,
        samples,
    })
}

/// Sample mean and its standard error (`s / sqrt(n)` with the `n - 1`
/// variance). A single sample has standard error 0.
fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn net(flows: &[(&str, &str, f64)]) -> Network {
        Network::from_flows(2017, flows.iter().copied()).unwrap()
    }

    fn star() -> Network {
        net(&[("c", "1", 10.0), ("c", "2", 10.0), ("c", "3", 10.0)])
    }

    fn path() -> Network {
        net(&[("A", "B", 5.0), ("B", "C", 9.0)])
    }

    fn k3() -> Network {
        net(&[
            ("A", "B", 1.0),
            ("B", "A", 1.0),
            ("A", "C", 1.0),
            ("C", "A", 1.0),
            ("B", "C", 1.0),
            ("C", "B", 1.0),
        ])
    }

    fn keys(ks: &[Key]) -> Vec<String> {
        ks.iter().map(ToString::to_string).collect()
    }

    #[test]
    fn orders() {
        let o = attack_order(&star(), Kind::Node, Strategy::Out, Mode::Weighted).unwrap();
        assert_eq!(keys(&o), ["c", "1", "2", "3"]);
        let o = attack_order(&path(), Kind::Edge, Strategy::Value, Mode::Unweighted).unwrap();
        assert_eq!(keys(&o), ["B->C", "A->B"]);
        let o = attack_order(&path(), Kind::Node, Strategy::Criticality, Mode::Unweighted).unwrap();
        assert_eq!(o[0], Key::Node("B".into()));
    }

    #[test]
    fn incompatible_strategies() {
        assert!(matches!(
            attack_order(&path(), Kind::Node, Strategy::Value, Mode::Weighted),
            Err(Error::IncompatibleStrategy { .. })
        ));
        assert!(matches!(
            AttackPlan::new(&path(), Kind::Edge, Strategy::In, Mode::Weighted, vec![0.0]),
            Err(Error::IncompatibleStrategy { .. })
        ));
    }

    #[test]
    fn p_grid_validation() {
        assert!(validate_p_grid(&default_p_grid()).is_ok());
        assert_eq!(default_p_grid().len(), 26);
        assert!(validate_p_grid(&[]).is_err());
        assert!(validate_p_grid(&[0.0, 0.0]).is_err());
        assert!(validate_p_grid(&[0.5, 0.2]).is_err());
        assert!(validate_p_grid(&[0.0, 1.5]).is_err());
    }

    #[test]
    fn removal_count_rounds_half_away_from_zero() {
        assert_eq!(removal_count(0.5, 3), 2);
        assert_eq!(removal_count(0.25, 2), 1);
        assert_eq!(removal_count(0.1, 4), 0);
        assert_eq!(removal_count(1.0, 7), 7);
    }

    #[test]
    fn targeted_curves() {
        let plan = AttackPlan::new(
            &star(),
            Kind::Node,
            Strategy::Criticality,
            Mode::Unweighted,
            vec![0.0, 0.25, 1.0],
        )
        .unwrap();
        let curve = robustness_curve(&star(), &plan).unwrap();
        let r: Vec<f64> = curve.samples.iter().map(|s| s.r).collect();
        assert_eq!(r, [1.0, 0.0, 0.0]);

        let plan = AttackPlan::new(&path(), Kind::Edge, Strategy::Value, Mode::Unweighted, vec![0.0, 0.5]).unwrap();
        let mut plan = plan;
        plan.order.reverse(); // A->B first
        let curve = robustness_curve(&path(), &plan).unwrap();
        assert_eq!(curve.samples[0].r, 1.0);
        assert!((curve.samples[1].r - 0.4).abs() < TOL);
        assert_eq!(curve.samples[1].n_removed, 1);
    }

    #[test]
    fn node_attacks_can_raise_efficiency() {
        let plan = AttackPlan::new(&star(), Kind::Node, Strategy::In, Mode::Unweighted, vec![0.0, 0.25]).unwrap();
        let curve = robustness_curve(&star(), &plan).unwrap();
        assert!((curve.samples[1].r - 4.0 / 3.0).abs() < TOL);
    }

    #[test]
    fn random_on_complete_graph_is_exact() {
        let curve = random_robustness(
            &k3(),
            Kind::Node,
            Mode::Weighted,
            &[0.0, 1.0 / 3.0],
            RandomSampling::new(200, 7),
        )
        .unwrap();
        for point in &curve.samples {
            assert_eq!(point.r, 1.0);
            assert_eq!(point.stderr, None);
        }
        assert_eq!(curve.samples[1].n_removed, 1);
    }

    #[test]
    fn random_sampling_is_seeded() {
        let g = net(&[
            ("A", "B", 1.0),
            ("B", "C", 2.0),
            ("C", "D", 3.0),
            ("D", "A", 1.5),
            ("A", "C", 0.5),
            ("B", "D", 4.0),
        ]);
        let sampling = RandomSampling::new(5, 42);
        let a = random_robustness(&g, Kind::Edge, Mode::Weighted, &[0.0, 0.5], sampling).unwrap();
        let b = random_robustness(&g, Kind::Edge, Mode::Weighted, &[0.0, 0.5], sampling).unwrap();
        assert_eq!(a, b);
        assert!(a.samples[1].stderr.is_some());
        assert_eq!(a.samples[0].stderr, None);
        assert!(matches!(
            random_robustness(&g, Kind::Edge, Mode::Weighted, &[0.0], RandomSampling::new(0, 1)),
            Err(Error::ZeroBudget)
        ));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_within(6, 2, 1000), Some(15));
        assert_eq!(binomial_within(6, 0, 1), Some(1));
        assert_eq!(binomial_within(6, 3, 19), None);
        assert_eq!(binomial_within(10_000, 5_000, 200), None);
    }
}
