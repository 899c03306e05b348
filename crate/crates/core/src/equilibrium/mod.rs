//! Budget split between seeding and quality when both firms choose their
//! quality simultaneously.
//!
//! Given its quality, a firm spends the rest of its budget on seeding, and
//! seeding is always water-filled along the centrality order (each agent up
//! to 1/2 before the next). A firm's whole strategy is therefore a single
//! number, and its payoff as a function of the seeding amount `s` is
//!
//! ```text
//! V(s) + λ (q(s) − q_rival) / (q(s) + q_rival),   q(s) = (K − c_s s) / c_q
//! ```
//!
//! where `V` is the piecewise-linear concave value of water-filling `s`
//! units. Optimality says the marginal value of quality expressed in seeding
//! units, the *effective centrality*
//!
//! ```text
//! ṽ = 2λ (c_s/c_q) q_rival / (q_own + q_rival)²,
//! ```
//!
//! must lie in the superdifferential of `V` at `s`: equal to the marginal
//! agent's centrality inside a piece, anywhere between the two neighbouring
//! centralities at a kink.

mod best_response;
mod iterative;
mod nash;
mod symmetric;

pub use best_response::{best_response_quality, firm_objective, BestResponse};
pub use iterative::{solve_nash_iterative, IterativeConfig};
pub use nash::{solve_nash, solve_nash_for};
pub use symmetric::{symmetric_level, symmetric_nash, symmetric_nash_for, SymmetricLevel};

use serde::{Deserialize, Serialize};

use crate::dynamics::{closed_form_utilities, QualityPair, SeedingPair};
use crate::error::{Error, Result};
use crate::graph::CentralityVector;
use crate::params::ModelParams;

/// Tolerance for equilibrium conditions.
pub const CONDITION_TOL: f64 = 1e-9;

/// Gaps in seeding below this are treated as the same point.
const SNAP_TOL: f64 = 1e-12;

/// Seeding cap per agent.
pub const SEED_CAP: f64 = 0.5;

/// Budgets and unit costs for both firms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetSpec {
    pub k_a: f64,
    pub k_b: f64,
    pub c_s: f64,
    pub c_q: f64,
}

impl BudgetSpec {
    pub fn symmetric(k: f64, c_s: f64, c_q: f64) -> Self {
        Self {
            k_a: k,
            k_b: k,
            c_s,
            c_q,
        }
    }

    pub fn validate(&self, p: &ModelParams) -> Result<()> {
        self.firm_a().validate(p)?;
        self.firm_b().validate(p)
    }

    pub fn firm_a(&self) -> FirmBudget {
        FirmBudget::new(self.k_a, self.c_s, self.c_q)
    }

    pub fn firm_b(&self) -> FirmBudget {
        FirmBudget::new(self.k_b, self.c_s, self.c_q)
    }
}

/// One firm's budget constraint c_s‖S‖₁ + c_q q = K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FirmBudget {
    pub budget: f64,
    pub c_s: f64,
    pub c_q: f64,
}

impl FirmBudget {
    pub fn new(budget: f64, c_s: f64, c_q: f64) -> Self {
        Self { budget, c_s, c_q }
    }

    pub fn validate(&self, p: &ModelParams) -> Result<()> {
        if !(self.c_s.is_finite() && self.c_s > 0.0 && self.c_q.is_finite() && self.c_q > 0.0) {
            return Err(Error::InvalidInput(format!(
                "unit costs must be positive (c_s = {}, c_q = {})",
                self.c_s, self.c_q
            )));
        }
        if !self.budget.is_finite() || self.budget < self.c_q * p.epsilon {
            return Err(Error::InvalidInput(format!(
                "budget {} cannot pay for the minimum quality (c_q·ε = {})",
                self.budget,
                self.c_q * p.epsilon
            )));
        }
        Ok(())
    }

    /// Quality left over after seeding `s` units.
    pub fn quality_for(&self, s: f64) -> f64 {
        (self.budget - self.c_s * s) / self.c_q
    }

    /// [`Self::quality_for`] kept inside the feasible set `q >= epsilon`.
    pub fn feasible_quality(&self, s: f64, p: &ModelParams) -> f64 {
        self.quality_for(s).max(p.epsilon)
    }

    /// Seeding affordable next to quality `q`.
    pub fn seeding_for(&self, q: f64) -> f64 {
        (self.budget - self.c_q * q) / self.c_s
    }

    /// Largest feasible seeding amount: either every agent is full or the
    /// quality sits at epsilon.
    pub fn max_seeding(&self, n: usize, p: &ModelParams) -> f64 {
        (n as f64 * SEED_CAP).min(self.seeding_for(p.epsilon)).max(0.0)
    }

    /// Smallest feasible quality.
    pub fn min_quality(&self, n: usize, p: &ModelParams) -> f64 {
        self.feasible_quality(self.max_seeding(n, p), p)
    }

    pub fn max_quality(&self) -> f64 {
        self.budget / self.c_q
    }
}

/// 2λ·c_s/c_q, the factor turning quality ratios into effective centralities.
pub(crate) fn quality_weight(n: usize, p: &ModelParams, c_s: f64, c_q: f64) -> f64 {
    2.0 * p.lambda(n) * c_s / c_q
}

/// Effective centrality of a firm with quality `own` facing `rival`.
pub fn effective_centrality(weight: f64, own: f64, rival: f64) -> f64 {
    weight * rival / ((own + rival) * (own + rival))
}

/// Which part of the seeding profile the firm's optimum sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseTag {
    /// Marginal agent partially seeded; ṽ equals its centrality.
    Interior,
    /// Marginal agent not seeded at all; ṽ lies between its centrality and
    /// the previous one.
    BoundaryZero,
    /// Every agent fully seeded; ṽ ≤ v_n.
    Saturated,
    /// Quality pinned at epsilon with seeding capacity left; ṽ ≤ v_k.
    QualityFloor,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirmStrategy {
    /// Per agent, indexed like the graph.
    pub seeding: Vec<f64>,
    pub quality: f64,
    pub seeding_total: f64,
}

impl FirmStrategy {
    pub fn new(seeding: Vec<f64>, quality: f64) -> Self {
        let seeding_total = seeding.iter().sum();
        Self {
            seeding,
            quality,
            seeding_total,
        }
    }

    /// Budget actually used, c_s‖S‖₁ + c_q q.
    pub fn spend(&self, c_s: f64, c_q: f64) -> f64 {
        c_s * self.seeding_total + c_q * self.quality
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UtilityPair {
    pub u_a: f64,
    pub u_b: f64,
}

/// Equilibrium strategies with the marginal-agent description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashOutcome {
    pub strategy_a: FirmStrategy,
    pub strategy_b: FirmStrategy,
    /// 1-based position of firm a's marginal agent in the centrality order.
    pub k: usize,
    /// 1-based position of firm b's marginal agent.
    pub l: usize,
    pub v_tilde_k: f64,
    pub v_tilde_l: f64,
    pub case_a: CaseTag,
    pub case_b: CaseTag,
    pub lambda: f64,
    pub utilities: UtilityPair,
}

impl NashOutcome {
    pub fn qualities(&self) -> QualityPair {
        QualityPair {
            q_a: self.strategy_a.quality,
            q_b: self.strategy_b.quality,
        }
    }
}

/// Result of water-filling an amount of seeding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaterFill {
    /// Per agent, indexed like the graph.
    pub seeding: Vec<f64>,
    /// 1-based position of the first agent that is not full (n when every
    /// agent is full).
    pub marginal: usize,
    pub saturated: bool,
}

/// Fills agents in `order` up to `caps[agent]` until `amount` is spent.
pub fn water_fill(order: &[usize], caps: &[f64], amount: f64) -> WaterFill {
    let n = order.len();
    let mut seeding = vec![0.0; caps.len()];
    let mut left = amount.max(0.0);
    let mut marginal = None;
    for (pos, &agent) in order.iter().enumerate() {
        if left <= SNAP_TOL {
            marginal.get_or_insert(pos + 1);
            break;
        }
        let take = caps[agent].min(left);
        seeding[agent] = take;
        left -= take;
        if take < caps[agent] - SNAP_TOL {
            marginal.get_or_insert(pos + 1);
        }
    }
    WaterFill {
        seeding,
        saturated: marginal.is_none(),
        marginal: marginal.unwrap_or(n),
    }
}

/// Water-fills `amount` units at 1/2 per agent along the centrality order.
pub fn water_fill_seeding(v: &CentralityVector, amount: f64) -> Result<WaterFill> {
    let n = v.n();
    let cap = n as f64 * SEED_CAP;
    if !amount.is_finite() || amount < 0.0 || amount > cap + SNAP_TOL {
        return Err(Error::InvalidInput(format!(
            "seeding amount {amount} outside [0, {cap}]"
        )));
    }
    Ok(water_fill(&v.order, &vec![SEED_CAP; n], amount.min(cap)))
}

/// Sorted centralities with prefix sums.
#[derive(Debug, Clone)]
pub(crate) struct Ladder {
    sorted: Vec<f64>,
    prefix: Vec<f64>,
}

impl Ladder {
    pub fn new(sorted: Vec<f64>) -> Self {
        let mut prefix = Vec::with_capacity(sorted.len() + 1);
        prefix.push(0.0);
        for v in &sorted {
            prefix.push(prefix.last().unwrap() + v);
        }
        Self { sorted, prefix }
    }

    pub fn n(&self) -> usize {
        self.sorted.len()
    }

    /// 1-based centrality with v_0 = +∞ and v_{n+1} = −∞.
    pub fn v(&self, pos: usize) -> f64 {
        if pos == 0 {
            f64::INFINITY
        } else if pos > self.n() {
            f64::NEG_INFINITY
        } else {
            self.sorted[pos - 1]
        }
    }

    /// Value Σ v_i S_i of water-filling `s` units.
    pub fn value(&self, s: f64) -> f64 {
        let n = self.n();
        let full = ((s / SEED_CAP).floor() as usize).min(n);
        let mut val = SEED_CAP * self.prefix[full];
        if full < n {
            val += (s - SEED_CAP * full as f64) * self.sorted[full];
        }
        val
    }
}

/// Where a firm's seeding amount sits on its ladder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Placement {
    pub k: usize,
    pub case: CaseTag,
}

/// Classifies a seeding amount `s` with slack `tol`.
pub(crate) fn classify(s: f64, s_max: f64, n: usize, tol: f64) -> Placement {
    let full = n as f64 * SEED_CAP;
    if s >= full - tol {
        return Placement {
            k: n,
            case: CaseTag::Saturated,
        };
    }
    let k = ((((s + tol) / SEED_CAP).floor() as usize) + 1).min(n);
    if s >= s_max - tol {
        return Placement {
            k,
            case: CaseTag::QualityFloor,
        };
    }
    let nearest = (s / SEED_CAP).round();
    if (s - nearest * SEED_CAP).abs() <= tol {
        Placement {
            k: nearest as usize + 1,
            case: CaseTag::BoundaryZero,
        }
    } else {
        Placement {
            k: (s / SEED_CAP).floor() as usize + 1,
            case: CaseTag::Interior,
        }
    }
}

/// Assembles a [`NashOutcome`] from the two seeding amounts.
#[allow(clippy::too_many_arguments)]
pub(crate) fn assemble_outcome(
    v: &CentralityVector,
    p: &ModelParams,
    budgets: &BudgetSpec,
    s_a: f64,
    s_b: f64,
    place_a: Placement,
    place_b: Placement,
) -> NashOutcome {
    let n = v.n();
    let (fa, fb) = (budgets.firm_a(), budgets.firm_b());
    let cap = n as f64 * SEED_CAP;
    let s_a = s_a.clamp(0.0, cap);
    let s_b = s_b.clamp(0.0, cap);
    let seeding_a = water_fill(&v.order, &vec![SEED_CAP; n], s_a).seeding;
    let seeding_b = water_fill(&v.order, &vec![SEED_CAP; n], s_b).seeding;
    let q_a = fa.feasible_quality(s_a, p);
    let q_b = fb.feasible_quality(s_b, p);
    let weight = quality_weight(n, p, budgets.c_s, budgets.c_q);
    let q = QualityPair { q_a, q_b };
    let report = closed_form_utilities(
        v,
        p,
        &q,
        &SeedingPair {
            s_a: seeding_a.clone(),
            s_b: seeding_b.clone(),
        },
    );
    NashOutcome {
        strategy_a: FirmStrategy::new(seeding_a, q_a),
        strategy_b: FirmStrategy::new(seeding_b, q_b),
        k: place_a.k,
        l: place_b.k,
        v_tilde_k: effective_centrality(weight, q_a, q_b),
        v_tilde_l: effective_centrality(weight, q_b, q_a),
        case_a: place_a.case,
        case_b: place_b.case,
        lambda: report.lambda,
        utilities: UtilityPair {
            u_a: report.u_a,
            u_b: report.u_b,
        },
    }
}
