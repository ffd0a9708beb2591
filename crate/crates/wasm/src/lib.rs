//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes trade CSV text (`year,exporter,importer,volume`) and
//! returns a JSON string. The plain-Rust functions below do the work so they
//! can be tested natively.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use tradenet::criticality::{edge_criticality, node_criticality};
use tradenet::efficiency::efficiency;
use tradenet::ingest::{build_yearly_networks, parse_trade_records};
use tradenet::robustness::{random_robustness, robustness_curve, validate_p_grid, AttackPlan, RandomSampling};
use tradenet::{Kind, Mode, Network, Strategy};

fn networks(csv: &str) -> Result<Vec<Network>, String> {
    let records = parse_trade_records(csv.as_bytes()).map_err(|e| e.to_string())?;
    let built = build_yearly_networks(&records).map_err(|e| e.to_string())?;
    Ok(built.networks.into_values().collect())
}

/// The network for `year`, or the latest one when `year` is `None`.
fn network_for(csv: &str, year: Option<i32>) -> Result<Network, String> {
    let mut all = networks(csv)?;
    match year {
        Some(y) => all
            .into_iter()
            .find(|n| n.year() == y)
            .ok_or_else(|| format!("no data for {y}")),
        None => all.pop().ok_or_else(|| "no data".to_string()),
    }
}

fn finite(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// `[{year, N, N_e, V, E_A, E_W, E_Wbar}, ...]`
pub fn efficiency_summary(csv: &str) -> Result<String, String> {
    let rows: Vec<Value> = networks(csv)?
        .iter()
        .map(|n| {
            json!({
                "year": n.year(),
                "N": n.node_count(),
                "N_e": n.edge_count(),
                "V": finite(n.total_volume()),
                "E_A": finite(efficiency(n, Mode::Unweighted)),
                "E_W": finite(efficiency(n, Mode::Weighted)),
                "E_Wbar": finite(efficiency(n, Mode::Normalized)),
            })
        })
        .collect();
    Ok(Value::Array(rows).to_string())
}

/// `{year, baseline, ranked: [{key, criticality}, ...]}` with at most `top` entries.
pub fn criticality_ranking(csv: &str, year: Option<i32>, kind: &str, mode: &str, top: usize) -> Result<String, String> {
    let net = network_for(csv, year)?;
    let kind: Kind = kind.parse()?;
    let mode: Mode = mode.parse()?;
    let table = match kind {
        Kind::Node => node_criticality(&net, mode),
        Kind::Edge => edge_criticality(&net, mode),
    }
    .map_err(|e| e.to_string())?;
    let ranked: Vec<Value> = table
        .ranked()
        .iter()
        .take(top)
        .map(|s| json!({ "key": s.key.to_string(), "criticality": finite(s.criticality) }))
        .collect();
    Ok(json!({ "year": net.year(), "baseline": finite(table.baseline()), "ranked": ranked }).to_string())
}

/// `{year, curves: [{strategy, points: [{p, n_removed, R, stderr}]}]}` for
/// every strategy applicable to `kind`, on the grid `0, step, 2 step, ...,
/// max_p`.
#[allow(clippy::too_many_arguments)]
pub fn robustness_curves(
    csv: &str,
    year: Option<i32>,
    kind: &str,
    mode: &str,
    max_p: f64,
    step: f64,
    samples: usize,
    seed: u64,
) -> Result<String, String> {
    let net = network_for(csv, year)?;
    let kind: Kind = kind.parse()?;
    let mode: Mode = mode.parse()?;
    if step.is_nan() || step <= 0.0 {
        return Err("step must be positive".into());
    }
    let count = (max_p / step + 1e-9).floor() as usize;
    let grid: Vec<f64> = (0..=count).map(|i| i as f64 * step).collect();
    validate_p_grid(&grid).map_err(|e| e.to_string())?;

    let mut curves = Vec::new();
    for strategy in Strategy::for_kind(kind) {
        let curve = if strategy == Strategy::Random {
            random_robustness(&net, kind, mode, &grid, RandomSampling::new(samples, seed))
        } else {
            AttackPlan::new(&net, kind, strategy, mode, grid.clone()).and_then(|plan| robustness_curve(&net, &plan))
        }
        .map_err(|e| e.to_string())?;
        let points: Vec<Value> = curve
            .samples
            .iter()
            .map(|s| json!({ "p": s.p, "n_removed": s.n_removed, "R": finite(s.r), "stderr": s.stderr.map(finite) }))
            .collect();
        curves.push(json!({ "strategy": strategy.as_str(), "points": points }));
    }
    Ok(json!({ "year": net.year(), "curves": curves }).to_string())
}

fn year_arg(year: i32) -> Option<i32> {
    (year != 0).then_some(year)
}

#[wasm_bindgen(js_name = efficiencySummary)]
pub fn efficiency_summary_js(csv: &str) -> Result<String, JsValue> {
    efficiency_summary(csv).map_err(|e| JsValue::from_str(&e))
}

/// `year = 0` selects the latest year in the data.
#[wasm_bindgen(js_name = criticalityRanking)]
pub fn criticality_ranking_js(csv: &str, year: i32, kind: &str, mode: &str, top: usize) -> Result<String, JsValue> {
    criticality_ranking(csv, year_arg(year), kind, mode, top).map_err(|e| JsValue::from_str(&e))
}

/// `year = 0` selects the latest year in the data.
#[wasm_bindgen(js_name = robustnessCurves)]
#[allow(clippy::too_many_arguments)]
pub fn robustness_curves_js(
    csv: &str,
    year: i32,
    kind: &str,
    mode: &str,
    max_p: f64,
    step: f64,
    samples: usize,
    seed: u32,
) -> Result<String, JsValue> {
    robustness_curves(csv, year_arg(year), kind, mode, max_p, step, samples, seed.into())
        .map_err(|e| JsValue::from_str(&e))
}
