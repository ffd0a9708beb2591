//! Correlation of criticality with trade volume, and volume time series.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::criticality::{node_criticality, Key};
use crate::efficiency::Mode;
use crate::error::{Error, Result};
use crate::network::Network;

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 3 {
        return Err(Error::TooFewObservations(x.len()));
    }
    Ok(())
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// 1-based ranks, tied values sharing the average of their positions.
pub fn ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut out = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let avg = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            out[i] = avg;
        }
        start = end;
    }
    out
}

/// Spearman rank correlation: Pearson on average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&ranks(x), &ranks(y))
}

/// Two-sided p-value of a correlation coefficient from the Student t
/// approximation with `n - 2` degrees of freedom.
pub fn correlation_p_value(r: f64, n: usize) -> f64 {
    if n < 3 {
        return f64::NAN;
    }
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("degrees of freedom are positive");
    (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VolumeSide {
    Import,
    Export,
}

impl VolumeSide {
    pub fn as_str(self) -> &'static str {
        match self {
            VolumeSide::Import => "import",
            VolumeSide::Export => "export",
        }
    }

    pub fn of(self, net: &Network, node: usize) -> f64 {
        match self {
            VolumeSide::Import => net.import_volume_at(node),
            VolumeSide::Export => net.export_volume_at(node),
        }
    }
}

impl fmt::Display for VolumeSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VolumeSide {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "import" => Ok(VolumeSide::Import),
            "export" => Ok(VolumeSide::Export),
            other => Err(format!("unknown volume side `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub year: i32,
    pub mode: Mode,
    pub volume: VolumeSide,
    pub n: usize,
    pub pearson: f64,
    pub pearson_p: f64,
    pub spearman: f64,
    pub spearman_p: f64,
}

/// Correlates each economy's criticality with its import or export volume.
/// Economies with zero volume on that side are kept in the sample.
pub fn criticality_volume_correlation(net: &Network, side: VolumeSide, mode: Mode) -> Result<CorrelationReport> {
    let table = node_criticality(net, mode)?;
    let mut criticality = Vec::with_capacity(net.node_count());
    let mut volume = Vec::with_capacity(net.node_count());
    for (i, code) in net.codes().iter().enumerate() {
        let c = table.get(&Key::Node(code.clone())).expect("every economy is scored");
        criticality.push(c);
        volume.push(side.of(net, i));
    }
    correlation_report(net.year(), mode, side, &criticality, &volume)
}

pub(crate) fn correlation_report(
    year: i32,
    mode: Mode,
    side: VolumeSide,
    criticality: &[f64],
    volume: &[f64],
) -> Result<CorrelationReport> {
    let rho = pearson(criticality, volume)?;
    let rho_s = spearman(criticality, volume)?;
    let n = criticality.len();
    Ok(CorrelationReport {
        year,
        mode,
        volume: side,
        n,
        pearson: rho,
        pearson_p: correlation_p_value(rho, n),
        spearman: rho_s,
        spearman_p: correlation_p_value(rho_s, n),
    })
}

/// Yearly volume of one economy on one side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EconomySeries {
    pub economy: String,
    /// Sum over all years, used for ranking.
    pub total: f64,
    /// One value per year of [`VolumeSeries::years`]; 0 when absent.
    pub per_year: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeSeries {
    pub years: Vec<i32>,
    pub importers: Vec<EconomySeries>,
    pub exporters: Vec<EconomySeries>,
}

/// Import and export volume per year for the `top_k` economies on each side,
/// ranked by their volume summed over all years.
pub fn volume_time_series<'a, I>(networks: I, top_k: usize) -> VolumeSeries
where
    I: IntoIterator<Item = &'a Network>,
{
    let mut nets: Vec<&Network> = networks.into_iter().collect();
    nets.sort_by_key(|n| n.year());
    let years: Vec<i32> = nets.iter().map(|n| n.year()).collect();
    let side = |side: VolumeSide| {
        let mut table: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for (y, net) in nets.iter().enumerate() {
            for (i, code) in net.codes().iter().enumerate() {
                let v = side.of(net, i);
                if v > 0.0 {
                    table.entry(code).or_insert_with(|| vec![0.0; years.len()])[y] = v;
                }
            }
        }
        let mut series: Vec<EconomySeries> = table
            .into_iter()
            .map(|(code, per_year)| EconomySeries {
                economy: code.to_string(),
                total: per_year.iter().sum(),
                per_year,
            })
            .collect();
        series.sort_by(|a, b| b.total.total_cmp(&a.total).then_with(|| a.economy.cmp(&b.economy)));
        series.truncate(top_k);
        series
    };
    VolumeSeries {
        importers: side(VolumeSide::Import),
        exporters: side(VolumeSide::Export),
        years,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn pearson_examples() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < TOL);
        assert!((pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < TOL);
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]),
            Err(Error::ZeroVariance)
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[5.0, 5.0]),
            Err(Error::LengthMismatch(3, 2))
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0], &[5.0, 6.0]),
            Err(Error::TooFewObservations(2))
        ));
    }

    #[test]
    fn spearman_examples() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 100.0, 1000.0]).unwrap() - 1.0).abs() < TOL);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0]).unwrap() + 0.5).abs() < TOL);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < TOL);
    }

    #[test]
    fn average_ranks() {
        assert_eq!(ranks(&[10.0, 20.0, 10.0, 5.0]), [2.5, 4.0, 2.5, 1.0]);
        assert_eq!(ranks(&[1.0, 1.0, 1.0]), [2.0, 2.0, 2.0]);
    }

    #[test]
    fn p_values() {
        assert_eq!(correlation_p_value(1.0, 5), 0.0);
        assert!((correlation_p_value(0.0, 10) - 1.0).abs() < 1e-12);
        // r = 0.5, n = 10: t = 0.5 * sqrt(8 / 0.75) = 1.63299..., two-sided p ~ 0.1411
        let p = correlation_p_value(0.5, 10);
        assert!((p - 0.1411).abs() < 1e-3, "{p}");
    }

    #[test]
    fn out_star_correlation_is_positive() {
        let star = Network::from_flows(2017, [("c", "1", 1.0), ("c", "2", 1.0), ("c", "3", 1.0)]).unwrap();
        let report = criticality_volume_correlation(&star, VolumeSide::Export, Mode::Unweighted).unwrap();
        assert_eq!(report.n, 4);
        // criticality (1, -1/3, -1/3, -1/3) against exports (3, 0, 0, 0)
        assert!((report.pearson - 1.0).abs() < TOL);
        assert!(report.spearman > 0.0);
        let report = criticality_volume_correlation(&star, VolumeSide::Import, Mode::Unweighted).unwrap();
        assert!(report.pearson < 0.0);
    }

    #[test]
    fn time_series() {
        let y1 = Network::from_flows(2000, [("A", "B", 5.0)]).unwrap();
        let s = volume_time_series([&y1], 10);
        assert_eq!(s.importers[0].economy, "B");
        assert_eq!(s.importers[0].per_year, [5.0]);
        assert_eq!(s.exporters[0].economy, "A");

        let y2 = Network::from_flows(2001, [("A", "C", 7.0), ("B", "C", 1.0)]).unwrap();
        let s = volume_time_series([&y2, &y1], 10);
        assert_eq!(s.years, [2000, 2001]);
        assert_eq!(s.exporters[0].per_year, [5.0, 7.0]);
        assert_eq!(s.exporters[0].total, 12.0);
        assert_eq!(s.exporters.len(), 2);
        let s = volume_time_series([&y1, &y2], 1);
        assert_eq!(s.exporters.len(), 1);
        assert_eq!(s.exporters[0].economy, "A");
    }
}
