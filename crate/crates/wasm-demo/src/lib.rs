//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string; the `*_json` functions hold the logic
//! and are callable (and tested) natively.

use achlioptas_core::analytics::{first_moment_bound, threshold_alpha};
use achlioptas_core::branching::{symmetric_matrix, tail_curve, GwConfig};
use achlioptas_core::harness::{sweep_alpha, ExperimentConfig};
use achlioptas_core::rules::{RuleKind, RuleSpec};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Browser-side limits so a click cannot lock the tab for minutes.
pub const MAX_RUNS: usize = 200_000;
pub const MAX_WORK: usize = 20_000_000;

type Out = Result<String, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Certified density `1/Q` for `ell = 2..=ell_max` (`1..` for uniform)
/// beside `2^k ln 2`.
pub fn threshold_curve_json(rule: &str, k: usize, ell_max: usize) -> Out {
    let kind: RuleKind = rule.parse().map_err(err)?;
    if ell_max > 12 {
        return Err("ell_max is capped at 12".into());
    }
    let start = if kind == RuleKind::Uniform { 1 } else { 2 };
    let mut points = Vec::new();
    for ell in start..=ell_max {
        let r = threshold_alpha(&RuleSpec::new(kind, ell).map_err(err)?, k).map_err(err)?;
        points.push(json!({
            "l": ell,
            "alpha": if r.degenerate { None } else { Some(r.alpha) },
            "q": r.q,
            "p": r.frequencies,
            "beats_first_moment": r.beats_bound,
        }));
    }
    Ok(json!({ "rule": kind.name(), "k": k, "first_moment": first_moment_bound(k), "points": points }).to_string())
}

/// Galton–Watson total-progeny survival curve at spectral radius `rho`.
pub fn gw_tail_json(rho: f64, runs: usize, l_max: u64, seed: u64) -> Out {
    if runs > MAX_RUNS || l_max > 1000 {
        return Err(format!("runs <= {MAX_RUNS} and l_max <= 1000 in the browser"));
    }
    let cfg = GwConfig::new(symmetric_matrix(rho).map_err(err)?, runs, seed);
    let curve = tail_curve(&cfg, l_max).map_err(err)?;
    serde_json::to_string(&curve).map_err(err)
}

/// Certified-SAT fraction over `steps` densities between `from` and `to`.
#[allow(clippy::too_many_arguments)]
pub fn sweep_json(rule: &str, k: usize, ell: usize, n: usize, trials: usize, seed: u64, from: f64, to: f64, steps: usize) -> Out {
    let kind: RuleKind = rule.parse().map_err(err)?;
    let work = (to.max(0.0) * n as f64) as usize * ell * trials * steps;
    if work > MAX_WORK {
        return Err(format!("about {work} clause draws requested; the browser demo allows {MAX_WORK}"));
    }
    let cfg = ExperimentConfig::new(RuleSpec::new(kind, ell).map_err(err)?, k, n, 0.0, trials, seed);
    let rows = sweep_alpha(&cfg, from, to, steps).map_err(err)?;
    serde_json::to_string(&rows).map_err(err)
}

fn js(r: Out) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = thresholdCurve)]
pub fn threshold_curve(rule: &str, k: usize, ell_max: usize) -> Result<String, JsError> {
    js(threshold_curve_json(rule, k, ell_max))
}

#[wasm_bindgen(js_name = gwTail)]
pub fn gw_tail(rho: f64, runs: usize, l_max: u32, seed: u32) -> Result<String, JsError> {
    js(gw_tail_json(rho, runs, l_max as u64, seed as u64))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn sweep(rule: &str, k: usize, ell: usize, n: usize, trials: usize, seed: u32, from: f64, to: f64, steps: usize) -> Result<String, JsError> {
    js(sweep_json(rule, k, ell, n, trials, seed as u64, from, to, steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn curve_contains_known_threshold() {
        let v: Value = serde_json::from_str(&threshold_curve_json("middle-heavy", 4, 6).unwrap()).unwrap();
        let p = &v["points"][3];
        assert_eq!(p["l"], 5);
        assert!((p["alpha"].as_f64().unwrap() - 18.086).abs() < 5e-4);
        assert_eq!(p["beats_first_moment"], true);
        assert!(threshold_curve_json("nope", 4, 6).is_err());
        assert!(threshold_curve_json("hybrid", 2, 3).is_err());
    }

    #[test]
    fn tail_and_sweep() {
        let v: Value = serde_json::from_str(&gw_tail_json(0.5, 2000, 10, 1).unwrap()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 10);
        assert_eq!(v[0]["empirical_sf"], 1.0);
        assert!(gw_tail_json(1.5, 100, 10, 1).is_err());
        let v: Value = serde_json::from_str(&sweep_json("perkins", 3, 2, 300, 5, 1, 0.5, 2.5, 3).unwrap()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 3);
        assert!(sweep_json("perkins", 3, 2, 100_000, 500, 1, 0.5, 2.5, 30).is_err());
    }
}
