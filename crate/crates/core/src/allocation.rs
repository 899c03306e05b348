//! Marginal budget allocation when qualities are already fixed.
//!
//! Each firm splits a new budget between seeding (up to each agent's
//! remaining demand capacity) and a small quality improvement Δq. Seeding
//! agent `j` beats improving quality exactly when its centrality exceeds the
//! firm's threshold `v_c`, so the optimum water-fills agents above the
//! threshold in centrality order and puts whatever is left into Δq.

use serde::{Deserialize, Serialize};

use crate::dynamics::QualityPair;
use crate::equilibrium::water_fill;
use crate::error::{Error, Result};
use crate::graph::CentralityVector;
use crate::params::ModelParams;

/// Centralities within this distance of the threshold are left unseeded.
pub const INDIFFERENCE_TOL: f64 = 1e-12;

/// Distance from a regime endpoint that is reported as a boundary.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Firm {
    A,
    B,
}

impl std::str::FromStr for Firm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "a" | "A" => Ok(Firm::A),
            "b" | "B" => Ok(Firm::B),
            _ => Err(Error::InvalidInput(format!("unknown firm `{s}`"))),
        }
    }
}

/// Preset qualities and the consumption agents have already settled on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PresetState {
    pub q_a: f64,
    pub q_b: f64,
    pub y0: Vec<f64>,
    /// 1/2 − y0, what firm a may still seed per agent.
    pub capacity_a: Vec<f64>,
    /// 1/2 + y0.
    pub capacity_b: Vec<f64>,
}

impl PresetState {
    pub fn new(q: QualityPair, y0: Vec<f64>, p: &ModelParams) -> Result<Self> {
        q.validate(p)?;
        if let Some(i) = y0.iter().position(|y| !y.is_finite() || y.abs() > 0.5) {
            return Err(Error::InvalidInput(format!(
                "y0[{i}] = {} outside [-1/2, 1/2]",
                y0[i]
            )));
        }
        Ok(Self {
            q_a: q.q_a,
            q_b: q.q_b,
            capacity_a: y0.iter().map(|y| 0.5 - y).collect(),
            capacity_b: y0.iter().map(|y| 0.5 + y).collect(),
            y0,
        })
    }

    /// Agents indifferent between the products (capacities 1/2).
    pub fn neutral(q: QualityPair, n: usize, p: &ModelParams) -> Result<Self> {
        Self::new(q, vec![0.0; n], p)
    }

    pub fn qualities(&self) -> QualityPair {
        QualityPair {
            q_a: self.q_a,
            q_b: self.q_b,
        }
    }

    pub fn capacity(&self, firm: Firm) -> &[f64] {
        match firm {
            Firm::A => &self.capacity_a,
            Firm::B => &self.capacity_b,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub v_c_a: f64,
    pub v_c_b: f64,
}

impl Thresholds {
    pub fn for_firm(&self, firm: Firm) -> f64 {
        match firm {
            Firm::A => self.v_c_a,
            Firm::B => self.v_c_b,
        }
    }
}

/// Centrality above which seeding beats quality improvement, per firm.
pub fn thresholds(q: &QualityPair, p: &ModelParams, n: usize, c_s: f64, c_q: f64) -> Thresholds {
    let weight = 2.0 * p.lambda(n) * c_s / c_q;
    let sum = q.q_a + q.q_b;
    Thresholds {
        v_c_a: weight * q.q_b / (sum * sum),
        v_c_b: weight * q.q_a / (sum * sum),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationResult {
    pub firm: Firm,
    /// Per agent, indexed like the graph.
    pub seeding: Vec<f64>,
    pub seeding_total: f64,
    pub quality_improvement: f64,
    /// Threshold v_c the allocation was built against.
    pub threshold: f64,
    /// Own-firm part of ΔU: vᵀS + 2λ q_rival Δq/(q_a + q_b)².
    pub marginal_utility: f64,
}

fn check_len(v: &CentralityVector, state: &PresetState) -> Result<()> {
    if state.y0.len() != v.n() {
        return Err(Error::InvalidInput(format!(
            "state covers {} agents, graph has {}",
            state.y0.len(),
            v.n()
        )));
    }
    Ok(())
}

fn check_costs(c_s: f64, c_q: f64) -> Result<()> {
    if c_s > 0.0 && c_q > 0.0 && c_s.is_finite() && c_q.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "unit costs must be positive (c_s = {c_s}, c_q = {c_q})"
        )))
    }
}

/// Own-firm marginal utility of seeding `seeding` and improving by `dq`.
pub fn own_marginal_utility(
    v: &CentralityVector,
    p: &ModelParams,
    q: &QualityPair,
    firm: Firm,
    seeding: &[f64],
    dq: f64,
) -> f64 {
    let rival = match firm {
        Firm::A => q.q_b,
        Firm::B => q.q_a,
    };
    let sum = q.q_a + q.q_b;
    v.dot(seeding) + 2.0 * p.lambda(v.n()) * rival * dq / (sum * sum)
}

/// Full (ΔU_a, ΔU_b) for a pair of actions, including the rival's terms.
pub fn marginal_utilities(
    v: &CentralityVector,
    p: &ModelParams,
    q: &QualityPair,
    a: (&[f64], f64),
    b: (&[f64], f64),
) -> (f64, f64) {
    let own_a = own_marginal_utility(v, p, q, Firm::A, a.0, a.1);
    let own_b = own_marginal_utility(v, p, q, Firm::B, b.0, b.1);
    (own_a - own_b, own_b - own_a)
}

/// Threshold-rule allocation of budget `k` for `firm`.
pub fn allocate_budget(
    v: &CentralityVector,
    state: &PresetState,
    firm: Firm,
    k: f64,
    c_s: f64,
    c_q: f64,
    p: &ModelParams,
) -> Result<AllocationResult> {
    check_len(v, state)?;
    check_costs(c_s, c_q)?;
    if !k.is_finite() || k < 0.0 {
        return Err(Error::InvalidInput(format!("budget {k} must be nonnegative")));
    }
    let q = state.qualities();
    let threshold = thresholds(&q, p, v.n(), c_s, c_q).for_firm(firm);
    let eligible: Vec<usize> = v
        .order
        .iter()
        .copied()
        .take_while(|&i| v.values[i] > threshold + INDIFFERENCE_TOL)
        .collect();
    let fill = water_fill(&eligible, state.capacity(firm), k / c_s);
    let seeding_total = fill.seeding.iter().fold(0.0, |a, s| a + s);
    let quality_improvement = ((k - c_s * seeding_total) / c_q).max(0.0);
    let marginal_utility = own_marginal_utility(v, p, &q, firm, &fill.seeding, quality_improvement);
    Ok(AllocationResult {
        firm,
        seeding: fill.seeding,
        seeding_total,
        quality_improvement,
        threshold,
        marginal_utility,
    })
}

/// Seeding an unlimited budget would place: the demand capacity of every
/// agent above the threshold.
pub fn seeding_capacity(
    v: &CentralityVector,
    state: &PresetState,
    firm: Firm,
    p: &ModelParams,
    c_s: f64,
    c_q: f64,
) -> Result<f64> {
    check_len(v, state)?;
    check_costs(c_s, c_q)?;
    let threshold = thresholds(&state.qualities(), p, v.n(), c_s, c_q).for_firm(firm);
    Ok(v.values
        .iter()
        .zip(state.capacity(firm))
        .filter(|(v, _)| **v > threshold + INDIFFERENCE_TOL)
        .fold(0.0, |acc, (_, c)| acc + c))
}

/// Smallest seeding capacity over all graphs for a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum MinCapacity {
    /// 1 < v_c < v_l^s: at least two agents always clear the threshold.
    /// The value assumes they are the two with the smallest capacities.
    TwoAgents { value: f64 },
    /// v_l^s < v_c < v̄: only the star's hub is guaranteed.
    OneAgent { value: f64 },
    /// v̄ < v_c < v_h^s: the balanced graph seeds nobody.
    Zero,
    /// v_c sits on v_l^s or v̄.
    Boundary { at: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityBound {
    /// Most agents whose centrality can exceed v_c at once.
    pub k: usize,
    /// Sum of the k largest demand capacities.
    pub max_capacity: f64,
    pub min_capacity: MinCapacity,
}

/// Bounds on seeding capacity over every graph on `n` agents.
pub fn max_seeding_capacity_bound(
    n: usize,
    p: &ModelParams,
    v_c: f64,
    capacities: &[f64],
) -> Result<CapacityBound> {
    p.validate()?;
    if capacities.len() != n || n < 2 {
        return Err(Error::InvalidInput(format!(
            "need {n} >= 2 capacities, got {}",
            capacities.len()
        )));
    }
    let (hub, periphery) = p.star_centralities(n);
    if !(v_c > 1.0 && v_c < hub) {
        return Err(Error::InvalidInput(format!(
            "threshold {v_c} outside (1, {hub})"
        )));
    }
    let excess = n as f64 * p.delta / (2.0 * p.beta - p.delta);
    let k = ((excess / (v_c - 1.0)).floor() as usize).min(n);
    let mut caps = capacities.to_vec();
    caps.sort_by(|a, b| b.total_cmp(a));
    let max_capacity = caps.iter().take(k).fold(0.0, |a, c| a + c);

    let mean = p.mean_centrality();
    let min_capacity = if (v_c - periphery).abs() <= BOUNDARY_TOL {
        MinCapacity::Boundary { at: periphery }
    } else if (v_c - mean).abs() <= BOUNDARY_TOL {
        MinCapacity::Boundary { at: mean }
    } else if v_c < periphery {
        MinCapacity::TwoAgents {
            value: caps[n - 1] + caps[n - 2],
        }
    } else if v_c < mean {
        MinCapacity::OneAgent { value: caps[n - 1] }
    } else {
        MinCapacity::Zero
    };
    Ok(CapacityBound {
        k,
        max_capacity,
        min_capacity,
    })
}

/// How star and balanced graphs compare for a given threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CapacityRegime {
    /// v_c < 1: every agent of every graph clears the threshold.
    AllSeedable,
    /// 1 < v_c < v_l^s.
    EqualCapacity,
    /// v_l^s < v_c < v̄.
    BalancedExceedsStar,
    /// v̄ < v_c < v_h^s.
    StarExceedsBalanced,
    /// v_c > v_h^s.
    NoneSeedable,
    /// Within tolerance of an endpoint.
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityRegimeReport {
    pub v_c: f64,
    /// 1, v_l^s, v̄, v_h^s.
    pub endpoints: [f64; 4],
    pub regime: CapacityRegime,
}

pub fn regime_classify(v_c: f64, n: usize, p: &ModelParams) -> Result<CapacityRegimeReport> {
    p.validate()?;
    if n < 2 {
        return Err(Error::InvalidInput(format!("n = {n} is below 2")));
    }
    if !v_c.is_finite() {
        return Err(Error::InvalidInput(format!("threshold {v_c} is not finite")));
    }
    let (hub, periphery) = p.star_centralities(n);
    let endpoints = [1.0, periphery, p.mean_centrality(), hub];
    let regimes = [
        CapacityRegime::AllSeedable,
        CapacityRegime::EqualCapacity,
        CapacityRegime::BalancedExceedsStar,
        CapacityRegime::StarExceedsBalanced,
        CapacityRegime::NoneSeedable,
    ];
    Ok(CapacityRegimeReport {
        v_c,
        endpoints,
        regime: locate(v_c, &endpoints, &regimes, CapacityRegime::Boundary),
    })
}

/// Picks the interval of `x` among sorted `endpoints`.
pub(crate) fn locate<T: Copy>(x: f64, endpoints: &[f64], regimes: &[T], boundary: T) -> T {
    debug_assert_eq!(regimes.len(), endpoints.len() + 1);
    if endpoints
        .iter()
        .any(|e| (x - e).abs() <= BOUNDARY_TOL * e.abs().max(1.0))
    {
        return boundary;
    }
    let idx = endpoints.iter().filter(|&&e| x > e).count();
    regimes[idx]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{centrality, generate, GraphKind};

    fn ex2_state(n: usize) -> PresetState {
        PresetState::neutral(QualityPair { q_a: 1.0, q_b: 1.0 }, n, &ModelParams::unit()).unwrap()
    }

    fn cent(kind: GraphKind) -> CentralityVector {
        centrality(&generate(kind, 15, 0).unwrap(), &ModelParams::unit()).unwrap()
    }

    #[test]
    fn example_two_thresholds() {
        let t = thresholds(&QualityPair { q_a: 1.0, q_b: 1.0 }, &ModelParams::unit(), 15, 1.0, 1.0);
        assert!((t.v_c_a - 2.5).abs() < 1e-12 && (t.v_c_b - 2.5).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_thresholds() {
        let p = ModelParams::unit();
        let t = thresholds(&QualityPair { q_a: 3.0, q_b: 1.0 }, &p, 15, 1.0, 1.0);
        assert!((t.v_c_a - 0.625).abs() < 1e-12);
        assert!((t.v_c_b - 1.875).abs() < 1e-12);
        let s = thresholds(&QualityPair { q_a: 1.0, q_b: 3.0 }, &p, 15, 1.0, 1.0);
        assert_eq!((s.v_c_a, s.v_c_b), (t.v_c_b, t.v_c_a));
    }

    #[test]
    fn example_two_allocations() {
        let p = ModelParams::unit();
        let state = ex2_state(15);
        let r = allocate_budget(&cent(GraphKind::LStar { l: 3 }), &state, Firm::A, 10.0, 1.0, 1.0, &p)
            .unwrap();
        assert!((r.seeding_total - 1.5).abs() < 1e-12);
        assert!(r.seeding[..3].iter().all(|&s| s == 0.5));
        assert!((r.quality_improvement - 8.5).abs() < 1e-12);

        let r = allocate_budget(&cent(GraphKind::Balanced), &state, Firm::A, 10.0, 1.0, 1.0, &p).unwrap();
        assert_eq!(r.seeding_total, 0.0);
        assert_eq!(r.quality_improvement, 10.0);

        let r = allocate_budget(&cent(GraphKind::Star), &state, Firm::B, 0.3, 1.0, 1.0, &p).unwrap();
        assert!((r.seeding[0] - 0.3).abs() < 1e-15);
        assert_eq!(r.quality_improvement, 0.0);
    }

    #[test]
    fn example_two_capacities() {
        let p = ModelParams::unit();
        let state = ex2_state(15);
        let cap = |kind| seeding_capacity(&cent(kind), &state, Firm::A, &p, 1.0, 1.0).unwrap();
        assert_eq!(cap(GraphKind::Star), 0.5);
        assert_eq!(cap(GraphKind::Balanced), 0.0);
        assert_eq!(cap(GraphKind::LStar { l: 3 }), 1.5);
    }

    #[test]
    fn ties_go_to_quality() {
        let p = ModelParams::unit();
        // Balanced graph with a threshold exactly at 4/3: q such that
        // λ/(2q) = 4/3.
        let q = 15.0 / 8.0;
        let state = PresetState::neutral(QualityPair { q_a: q, q_b: q }, 15, &p).unwrap();
        let r = allocate_budget(&cent(GraphKind::Balanced), &state, Firm::A, 1.0, 1.0, 1.0, &p).unwrap();
        assert_eq!(r.seeding_total, 0.0);
    }

    #[test]
    fn capacity_bound_example() {
        let p = ModelParams::unit();
        let b = max_seeding_capacity_bound(15, &p, 2.5, &[0.5; 15]).unwrap();
        assert_eq!(b.k, 3);
        assert_eq!(b.max_capacity, 1.5);
        assert_eq!(b.min_capacity, MinCapacity::Zero);

        let b = max_seeding_capacity_bound(15, &p, 1.0 + 1e-9, &[0.5; 15]).unwrap();
        assert_eq!(b.k, 15);
        assert_eq!(b.max_capacity, 7.5);
        assert_eq!(b.min_capacity, MinCapacity::TwoAgents { value: 1.0 });

        let b = max_seeding_capacity_bound(15, &p, 1.2, &[0.5; 15]).unwrap();
        assert_eq!(b.min_capacity, MinCapacity::OneAgent { value: 0.5 });

        assert!(max_seeding_capacity_bound(15, &p, 1.0, &[0.5; 15]).is_err());
        assert!(max_seeding_capacity_bound(15, &p, 4.8, &[0.5; 15]).is_err());
    }

    #[test]
    fn regimes() {
        let p = ModelParams::unit();
        let r = |v_c| regime_classify(v_c, 15, &p).unwrap().regime;
        assert_eq!(r(2.5), CapacityRegime::StarExceedsBalanced);
        assert_eq!(r(5.0), CapacityRegime::NoneSeedable);
        assert_eq!(r(0.5), CapacityRegime::AllSeedable);
        assert_eq!(r(1.05), CapacityRegime::EqualCapacity);
        assert_eq!(r(1.2), CapacityRegime::BalancedExceedsStar);
        assert_eq!(r(4.0 / 3.0), CapacityRegime::Boundary);
        assert_eq!(r(1.0), CapacityRegime::Boundary);
    }

    #[test]
    fn preset_state_capacities() {
        let p = ModelParams::unit();
        let s = PresetState::new(QualityPair { q_a: 1.0, q_b: 2.0 }, vec![0.2, -0.5], &p).unwrap();
        assert_eq!(s.capacity_a, vec![0.3, 1.0]);
        assert_eq!(s.capacity_b, vec![0.7, 0.0]);
        assert!(PresetState::new(QualityPair { q_a: 1.0, q_b: 2.0 }, vec![0.6], &p).is_err());
    }
}
