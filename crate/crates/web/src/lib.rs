//! Browser bindings for the demo page.
//!
//! Each exported function takes plain numbers and strings and returns a JSON
//! document, so the page needs no generated TypeScript types. The `*_json`
//! functions hold the logic and are testable natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use netgame::allocation::{allocate_budget, thresholds, Firm, PresetState};
use netgame::dynamics::QualityPair;
use netgame::equilibrium::{symmetric_nash_for, FirmBudget};
use netgame::extremal::{
    budget_regime_endpoints, max_sequence, min_sequence, symmetric_seeding_extremes,
};
use netgame::{centrality, generate, Error, GraphKind, ModelParams, Result};

/// Shared graph and parameter inputs.
#[derive(Debug, Clone, Copy)]
pub struct Setup<'a> {
    pub kind: &'a str,
    pub n: usize,
    pub l: usize,
    pub seed: u64,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
}

impl Setup<'_> {
    fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.alpha, self.beta, self.delta, netgame::params::DEFAULT_EPSILON)
    }

    fn kind(&self) -> Result<GraphKind> {
        GraphKind::parse(self.kind, Some(self.l))
    }
}

#[derive(Serialize)]
struct Profile {
    values: Vec<f64>,
    sorted: Vec<f64>,
    upper: Vec<f64>,
    lower: Vec<f64>,
    sum: f64,
}

pub fn centrality_profile_json(s: Setup) -> Result<String> {
    let p = s.params()?;
    let v = centrality(&generate(s.kind()?, s.n, s.seed)?, &p)?;
    let profile = Profile {
        sorted: v.sorted(),
        sum: v.sum(),
        upper: max_sequence(s.n, &p)?,
        lower: min_sequence(s.n, &p)?,
        values: v.values,
    };
    Ok(serde_json::to_string(&profile)?)
}

#[derive(Serialize)]
struct SweepPoint {
    budget: f64,
    seeding: f64,
    quality: f64,
    min_seeding: f64,
    max_seeding: f64,
}

#[derive(Serialize)]
struct Sweep {
    points: Vec<SweepPoint>,
    regime_endpoints: [f64; 4],
}

/// Symmetric-equilibrium seeding on the chosen graph for budgets
/// `k_min..=k_max`, next to the extremes over all graphs.
pub fn seeding_sweep_json(
    s: Setup,
    k_min: f64,
    k_max: f64,
    steps: usize,
    c_s: f64,
    c_q: f64,
) -> Result<String> {
    let p = s.params()?;
    if !(k_max >= k_min && (2..=2000).contains(&steps)) {
        return Err(Error::InvalidInput(
            "need k_max >= k_min and 2 <= steps <= 2000".into(),
        ));
    }
    let v = centrality(&generate(s.kind()?, s.n, s.seed)?, &p)?;
    let floor = c_q * p.epsilon;
    let mut points = Vec::with_capacity(steps);
    for i in 0..steps {
        let budget = (k_min + (k_max - k_min) * i as f64 / (steps - 1) as f64).max(floor);
        let out = symmetric_nash_for(&v, &p, FirmBudget::new(budget, c_s, c_q))?;
        let ext = symmetric_seeding_extremes(s.n, &p, budget, c_s, c_q)?;
        points.push(SweepPoint {
            budget,
            seeding: out.strategy_a.seeding_total,
            quality: out.strategy_a.quality,
            min_seeding: ext.min.seeding_total,
            max_seeding: ext.max.seeding_total,
        });
    }
    let regime_endpoints = budget_regime_endpoints(s.n, &p)?.map(|e| e * c_s);
    Ok(serde_json::to_string(&Sweep {
        points,
        regime_endpoints,
    })?)
}

#[derive(Serialize)]
struct ThresholdView {
    centralities: Vec<f64>,
    v_c_a: f64,
    v_c_b: f64,
    seeding_a: Vec<f64>,
    seeding_b: Vec<f64>,
    quality_gain_a: f64,
    quality_gain_b: f64,
}

/// Threshold-rule allocation of the same budget by both firms at preset
/// qualities.
pub fn allocation_threshold_json(
    s: Setup,
    q_a: f64,
    q_b: f64,
    budget: f64,
    c_s: f64,
    c_q: f64,
) -> Result<String> {
    let p = s.params()?;
    let v = centrality(&generate(s.kind()?, s.n, s.seed)?, &p)?;
    let q = QualityPair::new(q_a, q_b, &p)?;
    let state = PresetState::neutral(q, s.n, &p)?;
    let t = thresholds(&q, &p, s.n, c_s, c_q);
    let a = allocate_budget(&v, &state, Firm::A, budget, c_s, c_q, &p)?;
    let b = allocate_budget(&v, &state, Firm::B, budget, c_s, c_q, &p)?;
    Ok(serde_json::to_string(&ThresholdView {
        centralities: v.values,
        v_c_a: t.v_c_a,
        v_c_b: t.v_c_b,
        seeding_a: a.seeding,
        seeding_b: b.seeding,
        quality_gain_a: a.quality_improvement,
        quality_gain_b: b.quality_improvement,
    })?)
}

fn to_js(r: Result<String>) -> std::result::Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e.to_string()))
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn centrality_profile(
    kind: &str,
    n: usize,
    l: usize,
    seed: u32,
    alpha: f64,
    beta: f64,
    delta: f64,
) -> std::result::Result<String, JsValue> {
    to_js(centrality_profile_json(Setup {
        kind,
        n,
        l,
        seed: seed.into(),
        alpha,
        beta,
        delta,
    }))
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn seeding_sweep(
    kind: &str,
    n: usize,
    l: usize,
    seed: u32,
    alpha: f64,
    beta: f64,
    delta: f64,
    k_min: f64,
    k_max: f64,
    steps: usize,
    c_s: f64,
    c_q: f64,
) -> std::result::Result<String, JsValue> {
    let s = Setup {
        kind,
        n,
        l,
        seed: seed.into(),
        alpha,
        beta,
        delta,
    };
    to_js(seeding_sweep_json(s, k_min, k_max, steps, c_s, c_q))
}

#[allow(clippy::too_many_arguments)]
#[wasm_bindgen]
pub fn allocation_threshold(
    kind: &str,
    n: usize,
    l: usize,
    seed: u32,
    alpha: f64,
    beta: f64,
    delta: f64,
    q_a: f64,
    q_b: f64,
    budget: f64,
    c_s: f64,
    c_q: f64,
) -> std::result::Result<String, JsValue> {
    let s = Setup {
        kind,
        n,
        l,
        seed: seed.into(),
        alpha,
        beta,
        delta,
    };
    to_js(allocation_threshold_json(s, q_a, q_b, budget, c_s, c_q))
}
