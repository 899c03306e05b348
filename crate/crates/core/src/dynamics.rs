//! Myopic best-response consumption dynamics and the firms' discounted
//! utilities.
//!
//! Consumption is tracked in centered form: agent `i` consumes
//! `x_i = 1/2 + y_i` of product a and `1/2 − y_i` of product b. Each period
//! every agent best-responds to its neighbours' previous consumption, which
//! gives the linear update `y(t+1) = W·y(t) + u_a·1` with `W = G/(2β)`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{centrality, CentralityVector, SocialGraph};
use crate::params::ModelParams;

/// Slack allowed on the state bound |y_i| ≤ 1/2.
const STATE_TOL: f64 = 1e-12;

/// Tail bound targeted by the adaptive simulation horizon.
pub const SIMULATION_TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityPair {
    pub q_a: f64,
    pub q_b: f64,
}

impl QualityPair {
    pub fn new(q_a: f64, q_b: f64, p: &ModelParams) -> Result<Self> {
        let q = Self { q_a, q_b };
        q.validate(p)?;
        Ok(q)
    }

    pub fn validate(&self, p: &ModelParams) -> Result<()> {
        for (name, q) in [("q_a", self.q_a), ("q_b", self.q_b)] {
            if !q.is_finite() || q < p.epsilon {
                return Err(Error::InvalidInput(format!(
                    "{name} = {q} is below epsilon = {}",
                    p.epsilon
                )));
            }
        }
        Ok(())
    }

    pub fn swapped(&self) -> Self {
        Self {
            q_a: self.q_b,
            q_b: self.q_a,
        }
    }

    /// (q_a − q_b)/(q_a + q_b).
    pub fn advantage(&self) -> f64 {
        (self.q_a - self.q_b) / (self.q_a + self.q_b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsumptionState {
    pub y: Vec<f64>,
    pub t: usize,
}

impl ConsumptionState {
    pub fn new(y: Vec<f64>, t: usize) -> Result<Self> {
        check_state(&y)?;
        Ok(Self { y, t })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            y: vec![0.0; n],
            t: 0,
        }
    }

    /// Consumption of product a, x_i = 1/2 + y_i.
    pub fn consumption_a(&self) -> Vec<f64> {
        self.y.iter().map(|y| 0.5 + y).collect()
    }
}

fn check_state(y: &[f64]) -> Result<()> {
    match y
        .iter()
        .position(|v| !v.is_finite() || v.abs() > 0.5 + STATE_TOL)
    {
        Some(agent) => Err(Error::StateOutOfRange {
            agent,
            value: y[agent],
        }),
        None => Ok(()),
    }
}

/// Initial seeding by both firms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedingPair {
    pub s_a: Vec<f64>,
    pub s_b: Vec<f64>,
}

impl SeedingPair {
    pub fn new(s_a: Vec<f64>, s_b: Vec<f64>) -> Result<Self> {
        let s = Self { s_a, s_b };
        s.validate()?;
        Ok(s)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            s_a: vec![0.0; n],
            s_b: vec![0.0; n],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.s_a.len() != self.s_b.len() {
            return Err(Error::InvalidInput("seeding vectors differ in length".into()));
        }
        for (name, s) in [("S_a", &self.s_a), ("S_b", &self.s_b)] {
            if let Some(i) = s
                .iter()
                .position(|x| !x.is_finite() || *x < 0.0 || *x > 0.5 + STATE_TOL)
            {
                return Err(Error::InvalidInput(format!(
                    "{name}[{i}] = {} outside [0, 1/2]",
                    s[i]
                )));
            }
        }
        Ok(())
    }

    /// y(0) = S_a − S_b.
    pub fn initial_state(&self) -> Result<ConsumptionState> {
        let y = self
            .s_a
            .iter()
            .zip(&self.s_b)
            .map(|(a, b)| a - b)
            .collect();
        ConsumptionState::new(y, 0)
    }

    pub fn swapped(&self) -> Self {
        Self {
            s_a: self.s_b.clone(),
            s_b: self.s_a.clone(),
        }
    }
}

/// Constant drift u_a added to every agent each period.
pub fn externality_drift(q: &QualityPair, p: &ModelParams) -> f64 {
    (1.0 + 2.0 * (p.alpha - p.beta)) / (4.0 * p.beta) * q.advantage()
}

fn check_dims(g: &SocialGraph, y: &[f64]) -> Result<()> {
    if y.len() != g.n() {
        return Err(Error::InvalidInput(format!(
            "state has {} entries for {} agents",
            y.len(),
            g.n()
        )));
    }
    Ok(())
}

/// W·y.
fn apply_w(g: &SocialGraph, p: &ModelParams, y: &[f64]) -> Vec<f64> {
    let scale = p.influence_scale();
    g.rows()
        .map(|row| scale * row.iter().zip(y).map(|(w, y)| w * y).sum::<f64>())
        .collect()
}

/// One round of simultaneous best responses.
pub fn step(
    g: &SocialGraph,
    p: &ModelParams,
    q: &QualityPair,
    s: &ConsumptionState,
) -> Result<ConsumptionState> {
    check_dims(g, &s.y)?;
    check_state(&s.y)?;
    let u = externality_drift(q, p);
    let mut y = apply_w(g, p, &s.y);
    y.iter_mut().for_each(|v| *v += u);
    check_state(&y)?;
    Ok(ConsumptionState { y, t: s.t + 1 })
}

/// Per-period utility of agent `i` choosing `y_i` while the others play
/// `y` (the entry `y[i]` itself is ignored).
pub fn agent_utility(
    g: &SocialGraph,
    p: &ModelParams,
    q: &QualityPair,
    i: usize,
    y_i: f64,
    y: &[f64],
) -> f64 {
    let QualityPair { q_a, q_b } = *q;
    let ModelParams { alpha, beta, .. } = *p;
    let isolation = (q_a + q_b) * (alpha / 2.0 - beta / 4.0 - beta * y_i * y_i)
        + (q_a - q_b) * (alpha - beta) * y_i;
    let coordination: f64 = g
        .row(i)
        .iter()
        .zip(y)
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, (&w, &y_j))| {
            w * (q_a * (0.5 + y_i) * (0.5 + y_j) + q_b * (0.5 - y_i) * (0.5 - y_j))
        })
        .sum();
    isolation + coordination
}

/// States y(0), …, y(horizon) obtained by iterating [`step`].
pub fn simulate(
    g: &SocialGraph,
    p: &ModelParams,
    q: &QualityPair,
    y0: &ConsumptionState,
    horizon: usize,
) -> Result<Vec<ConsumptionState>> {
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(y0.clone());
    for _ in 0..horizon {
        let next = step(g, p, q, out.last().expect("non-empty"))?;
        out.push(next);
    }
    Ok(out)
}

/// y(t) = W^t·y(0) + Σ_{k<t} W^k·u_a·1, evaluated without going through
/// [`step`].
pub fn expanded_form(
    g: &SocialGraph,
    p: &ModelParams,
    q: &QualityPair,
    y0: &[f64],
    t: usize,
) -> Result<Vec<f64>> {
    check_dims(g, y0)?;
    let n = g.n();
    let mut free = y0.to_vec();
    for _ in 0..t {
        free = apply_w(g, p, &free);
    }
    let mut drift_term = vec![externality_drift(q, p); n];
    let mut forced = vec![0.0; n];
    for _ in 0..t {
        forced.iter_mut().zip(&drift_term).for_each(|(f, d)| *f += d);
        drift_term = apply_w(g, p, &drift_term);
    }
    Ok(free.iter().zip(&forced).map(|(a, b)| a + b).collect())
}

/// Long-run state y* = u_a/(1 − 1/(2β))·1 (the fixed point of the update).
pub fn steady_state(g: &SocialGraph, p: &ModelParams, q: &QualityPair) -> Vec<f64> {
    let u = externality_drift(q, p);
    vec![u / (1.0 - p.influence_scale()); g.n()]
}

/// Horizon T such that the discounted tail after T is below `tol`.
pub fn adaptive_horizon(n: usize, p: &ModelParams, tol: f64) -> usize {
    let t = (tol * (1.0 - p.delta) / n as f64).ln() / p.delta.ln();
    t.ceil().max(0.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum UtilityMode {
    /// Truncated sum of the simulated trajectory. `None` picks the horizon
    /// from [`adaptive_horizon`].
    Simulated { horizon: Option<usize> },
    ClosedForm,
}

/// Additive pieces of the closed-form utility of firm a.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UtilityBreakdown {
    /// n/(2(1−δ)).
    pub base: f64,
    /// vᵀS_a.
    pub seeding_a: f64,
    /// vᵀS_b.
    pub seeding_b: f64,
    /// λ(q_a − q_b)/(q_a + q_b).
    pub quality: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UtilityReport {
    pub u_a: f64,
    pub u_b: f64,
    pub lambda: f64,
    pub mode: UtilityMode,
    /// Horizon used by the simulated mode.
    pub horizon: Option<usize>,
    /// Only available in closed form.
    pub breakdown: Option<UtilityBreakdown>,
}

/// Closed-form utilities for a precomputed centrality vector.
pub fn closed_form_utilities(
    v: &CentralityVector,
    p: &ModelParams,
    q: &QualityPair,
    seeding: &SeedingPair,
) -> UtilityReport {
    let n = v.n();
    let lambda = p.lambda(n);
    let breakdown = UtilityBreakdown {
        base: n as f64 / (2.0 * (1.0 - p.delta)),
        seeding_a: v.dot(&seeding.s_a),
        seeding_b: v.dot(&seeding.s_b),
        quality: lambda * q.advantage(),
    };
    let spread = breakdown.seeding_a - breakdown.seeding_b + breakdown.quality;
    UtilityReport {
        u_a: breakdown.base + spread,
        u_b: breakdown.base - spread,
        lambda,
        mode: UtilityMode::ClosedForm,
        horizon: None,
        breakdown: Some(breakdown),
    }
}

pub fn discounted_utilities(
    g: &SocialGraph,
    p: &ModelParams,
    q: &QualityPair,
    seeding: &SeedingPair,
    mode: UtilityMode,
) -> Result<UtilityReport> {
    g.ensure_valid()?;
    p.validate()?;
    q.validate(p)?;
    seeding.validate()?;
    check_dims(g, &seeding.s_a)?;
    let n = g.n();
    match mode {
        UtilityMode::ClosedForm => {
            let v = centrality(g, p)?;
            Ok(closed_form_utilities(&v, p, q, seeding))
        }
        UtilityMode::Simulated { horizon } => {
            let horizon = horizon.unwrap_or_else(|| adaptive_horizon(n, p, SIMULATION_TAIL_TOL));
            let y0 = seeding.initial_state()?;
            let u = externality_drift(q, p);
            let (mut u_a, mut u_b) = (0.0, 0.0);
            let mut discount = 1.0;
            let mut y = y0.y;
            for t in 0..=horizon {
                let lead: f64 = y.iter().sum();
                let half = 0.5 * n as f64;
                u_a += discount * (half + lead);
                u_b += discount * (half - lead);
                discount *= p.delta;
                if t < horizon {
                    y = apply_w(g, p, &y);
                    y.iter_mut().for_each(|v| *v += u);
                    check_state(&y)?;
                }
            }
            Ok(UtilityReport {
                u_a,
                u_b,
                lambda: p.lambda(n),
                mode,
                horizon: Some(horizon),
                breakdown: None,
            })
        }
    }
}

/// Writes a trajectory as CSV with columns `t, y_1, …, y_n`.
pub fn write_trajectory_csv<W: Write>(trajectory: &[ConsumptionState], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let n = trajectory.first().map_or(0, |s| s.y.len());
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("y_{i}")));
    w.write_record(&header)?;
    for s in trajectory {
        let mut rec = vec![s.t.to_string()];
        rec.extend(s.y.iter().map(|y| y.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    fn unit() -> ModelParams {
        ModelParams::unit()
    }

    #[test]
    fn drift_examples() {
        let p = unit();
        assert_eq!(externality_drift(&QualityPair { q_a: 2.0, q_b: 2.0 }, &p), 0.0);
        assert!((externality_drift(&QualityPair { q_a: 3.0, q_b: 1.0 }, &p) - 0.125).abs() < 1e-15);
        assert!((externality_drift(&QualityPair { q_a: 1.0, q_b: 3.0 }, &p) + 0.125).abs() < 1e-15);
    }

    #[test]
    fn step_on_two_cycle() {
        let g = SocialGraph::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let q = QualityPair { q_a: 1.0, q_b: 1.0 };
        let s = ConsumptionState::new(vec![0.3, -0.3], 0).unwrap();
        let next = step(&g, &unit(), &q, &s).unwrap();
        assert!((next.y[0] + 0.15).abs() < 1e-15);
        assert!((next.y[1] - 0.15).abs() < 1e-15);
        assert_eq!(next.t, 1);
    }

    #[test]
    fn zero_is_fixed_under_equal_quality() {
        let g = generate(GraphKind::Random, 8, 5).unwrap();
        let q = QualityPair { q_a: 0.7, q_b: 0.7 };
        let traj = simulate(&g, &unit(), &q, &ConsumptionState::zeros(8), 100).unwrap();
        assert_eq!(traj.len(), 101);
        assert!(traj.iter().all(|s| s.y.iter().all(|&y| y == 0.0)));
    }

    #[test]
    fn symmetric_point_utility() {
        let g = generate(GraphKind::Star, 5, 0).unwrap();
        let p = ModelParams::new(1.5, 1.25, 0.5, 1e-6).unwrap();
        let q = QualityPair { q_a: 0.8, q_b: 0.8 };
        let u = agent_utility(&g, &p, &q, 0, 0.0, &[0.0; 5]);
        let expected = 2.0 * 0.8 * (1.5 / 2.0 - 1.25 / 4.0) + 0.8 / 2.0;
        assert!((u - expected).abs() < 1e-14);
    }

    #[test]
    fn isolation_payoff_nonnegative_at_endpoints() {
        let p = ModelParams::new(1.0, 1.0, 0.5, 1e-6).unwrap();
        for (q_a, q_b) in [(1.0, 1.0), (3.0, 0.5), (0.2, 2.0)] {
            for y in [-0.5, 0.5] {
                let iso = (q_a + q_b) * (p.alpha / 2.0 - p.beta / 4.0 - p.beta * y * y)
                    + (q_a - q_b) * (p.alpha - p.beta) * y;
                assert!(iso >= 0.0);
            }
        }
    }

    #[test]
    fn state_bounds_enforced() {
        assert!(ConsumptionState::new(vec![0.6], 0).is_err());
        assert!(SeedingPair::new(vec![0.7], vec![0.0]).is_err());
        assert!(SeedingPair::new(vec![0.1], vec![-0.1]).is_err());
    }

    #[test]
    fn lambda_and_symmetric_split() {
        let g = generate(GraphKind::Balanced, 15, 0).unwrap();
        let q = QualityPair { q_a: 1.0, q_b: 1.0 };
        let r = discounted_utilities(&g, &unit(), &q, &SeedingPair::zeros(15), UtilityMode::ClosedForm)
            .unwrap();
        assert!((r.lambda - 5.0).abs() < 1e-12);
        assert!((r.u_a - 15.0).abs() < 1e-12);
        assert!((r.u_b - 15.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_horizon_bounds_tail() {
        let p = ModelParams::new(1.0, 1.0, 0.9, 1e-6).unwrap();
        let t = adaptive_horizon(10, &p, 1e-10);
        let tail = p.delta.powi(t as i32 + 1) * 10.0 / (1.0 - p.delta);
        assert!(tail < 1e-10);
        let shorter = p.delta.powi(t as i32 - 1) * 10.0 / (1.0 - p.delta);
        assert!(shorter >= 1e-10 * p.delta);
    }

    #[test]
    fn trajectory_csv_layout() {
        let traj = vec![
            ConsumptionState { y: vec![0.0, 0.25], t: 0 },
            ConsumptionState { y: vec![0.125, 0.0], t: 1 },
        ];
        let mut buf = Vec::new();
        write_trajectory_csv(&traj, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,y_1,y_2\n0,0,0.25\n1,0.125,0\n");
    }
}
