//! Equal budgets: both firms play the same strategy, so only the level `l`
//! and effective centrality ṽ_l have to be found. With q_a = q_b = q the
//! effective centrality is λ(c_s/c_q)/(2q), so the seeding amount is
//! K/c_s − λ/(2ṽ_l).

use serde::Serialize;

use super::{
    assemble_outcome, quality_weight, BudgetSpec, CaseTag, FirmBudget, Ladder, NashOutcome,
    Placement, CONDITION_TOL, SEED_CAP, SNAP_TOL,
};
use crate::error::{Error, Result};
use crate::graph::{centrality, CentralityVector, SocialGraph};
use crate::params::ModelParams;

/// Relative slack when checking that a sequence is nonincreasing.
const SORT_TOL: f64 = 1e-12;

/// Solution of the symmetric game on a nonincreasing centrality sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricLevel {
    /// 1-based position of the marginal agent.
    pub l: usize,
    pub v_tilde: f64,
    pub quality: f64,
    pub seeding_total: f64,
    pub case: CaseTag,
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    let slack = CONDITION_TOL * x.abs().max(1.0);
    x >= lo - slack && x <= hi + slack
}

/// Finds the unique `(l, ṽ_l)` for a nonincreasing sequence of centralities.
///
/// The sequence need not come from a graph; the extremal analysis runs this
/// on the pointwise maximal and minimal centrality sequences.
pub fn symmetric_level(
    sorted: &[f64],
    p: &ModelParams,
    budget: FirmBudget,
) -> Result<SymmetricLevel> {
    p.validate()?;
    budget.validate(p)?;
    if sorted
        .windows(2)
        .any(|w| w[1] > w[0] + SORT_TOL * w[0].abs().max(1.0))
    {
        return Err(Error::InvalidInput(
            "centralities must be sorted in nonincreasing order".into(),
        ));
    }
    let ladder = Ladder::new(sorted.to_vec());
    let n = ladder.n();
    // ṽ = weight/(4q)
    let weight = quality_weight(n, p, budget.c_s, budget.c_q);
    let s_max = budget.max_seeding(n, p);

    for l in 1..=n {
        let start = (l - 1) as f64 * SEED_CAP;
        if start >= s_max - SNAP_TOL {
            break;
        }
        let v_l = ladder.v(l);
        let q = weight / (4.0 * v_l);
        let s = budget.seeding_for(q);
        if within(s, start, (l as f64 * SEED_CAP).min(s_max)) {
            return Ok(SymmetricLevel {
                l,
                v_tilde: v_l,
                quality: q,
                seeding_total: s,
                case: CaseTag::Interior,
            });
        }
        let q = budget.feasible_quality(start, p);
        let v_tilde = weight / (4.0 * q);
        if within(v_tilde, v_l, ladder.v(l - 1)) {
            return Ok(SymmetricLevel {
                l,
                v_tilde,
                quality: q,
                seeding_total: start,
                case: CaseTag::BoundaryZero,
            });
        }
    }

    let full = n as f64 * SEED_CAP;
    let q = budget.feasible_quality(s_max, p);
    let v_tilde = weight / (4.0 * q);
    let (l, hi, case) = if s_max >= full - SNAP_TOL {
        (n, ladder.v(n), CaseTag::Saturated)
    } else {
        let steps = s_max / SEED_CAP;
        let j = steps.floor() as usize;
        if (steps - steps.round()).abs() * SEED_CAP <= SNAP_TOL {
            let j = steps.round() as usize;
            ((j + 1).min(n), ladder.v(j), CaseTag::QualityFloor)
        } else {
            ((j + 1).min(n), ladder.v(j + 1), CaseTag::QualityFloor)
        }
    };
    if v_tilde <= hi + CONDITION_TOL * v_tilde.abs().max(1.0) {
        return Ok(SymmetricLevel {
            l,
            v_tilde,
            quality: q,
            seeding_total: s_max.min(full),
            case,
        });
    }
    Err(Error::NoEquilibrium)
}

/// Symmetric equilibrium for equal budgets `k`.
pub fn symmetric_nash(
    g: &SocialGraph,
    p: &ModelParams,
    k: f64,
    c_s: f64,
    c_q: f64,
) -> Result<NashOutcome> {
    let v = centrality(g, p)?;
    symmetric_nash_for(&v, p, FirmBudget::new(k, c_s, c_q))
}

pub fn symmetric_nash_for(
    v: &CentralityVector,
    p: &ModelParams,
    budget: FirmBudget,
) -> Result<NashOutcome> {
    let level = symmetric_level(&v.sorted(), p, budget)?;
    let place = Placement {
        k: level.l,
        case: level.case,
    };
    let spec = BudgetSpec::symmetric(budget.budget, budget.c_s, budget.c_q);
    Ok(assemble_outcome(
        v,
        p,
        &spec,
        level.seeding_total,
        level.seeding_total,
        place,
        place,
    ))
}
