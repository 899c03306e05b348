//! Extreme centrality sequences and the graphs that attain the largest and
//! smallest symmetric-equilibrium seeding.
//!
//! Because every graph on `n` agents has the same centrality sum, the `l`-th
//! largest centrality is bounded above and below by closed forms. Solving the
//! symmetric game against those pointwise bounds gives the extreme seeding
//! amounts, and a concrete graph from [`crate::graph::generate`] attains each.

use serde::Serialize;

use crate::allocation::locate;
use crate::equilibrium::{symmetric_level, symmetric_nash, CaseTag, FirmBudget, CONDITION_TOL};
use crate::error::{Error, Result};
use crate::graph::{centrality, generate, GraphFile, GraphKind};
use crate::params::ModelParams;

/// Witness seeding must match the extreme within this.
pub const WITNESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremalCentrality {
    pub l: usize,
    pub v_max: f64,
    pub v_min: f64,
}

fn check_level(l: usize, n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("n = {n} is below 2")));
    }
    if l == 0 || l > n {
        return Err(Error::InvalidInput(format!("level {l} outside 1..={n}")));
    }
    Ok(())
}

fn v_max(l: usize, n: usize, p: &ModelParams) -> f64 {
    if l == 1 {
        p.star_centralities(n).0
    } else {
        n as f64 * p.delta / (l as f64 * (2.0 * p.beta - p.delta)) + 1.0
    }
}

fn v_min(l: usize, n: usize, p: &ModelParams) -> f64 {
    match l {
        1 => p.mean_centrality(),
        2 => p.star_centralities(n).1,
        _ => 1.0,
    }
}

/// Largest and smallest value the `l`-th largest centrality can take.
pub fn extremal_centrality(l: usize, n: usize, p: &ModelParams) -> Result<ExtremalCentrality> {
    p.validate()?;
    check_level(l, n)?;
    Ok(ExtremalCentrality {
        l,
        v_max: v_max(l, n, p),
        v_min: v_min(l, n, p),
    })
}

/// Pointwise upper bound on the sorted centralities of any graph.
pub fn max_sequence(n: usize, p: &ModelParams) -> Result<Vec<f64>> {
    p.validate()?;
    check_level(1, n)?;
    Ok((1..=n).map(|l| v_max(l, n, p)).collect())
}

/// Pointwise lower bound on the sorted centralities of any graph.
pub fn min_sequence(n: usize, p: &ModelParams) -> Result<Vec<f64>> {
    p.validate()?;
    check_level(1, n)?;
    Ok((1..=n).map(|l| v_min(l, n, p)).collect())
}

/// One end of the seeding range together with a graph attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedingExtreme {
    pub seeding_total: f64,
    pub l: usize,
    pub v_tilde: f64,
    pub case: CaseTag,
    pub witness_kind: GraphKind,
    pub witness: GraphFile,
    /// Equilibrium seeding computed on the witness graph.
    pub witness_seeding_total: f64,
    pub discrepancy: f64,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeedingExtremes {
    pub max: SeedingExtreme,
    pub min: SeedingExtreme,
}

fn star_family(l: usize, n: usize) -> GraphKind {
    match l {
        0 | 1 => GraphKind::Star,
        l if l >= n => GraphKind::Balanced,
        l => GraphKind::LStar { l },
    }
}

fn max_witness(l: usize, v_tilde: f64, n: usize, p: &ModelParams) -> GraphKind {
    let on_level = (v_tilde - v_max(l, n, p)).abs() <= CONDITION_TOL * v_tilde.abs().max(1.0);
    if on_level || v_tilde < v_max(l, n, p) {
        star_family(l, n)
    } else {
        star_family(l - 1, n)
    }
}

fn min_witness(l: usize, n: usize) -> GraphKind {
    match l {
        1 => GraphKind::Balanced,
        2 => GraphKind::Star,
        _ if n >= 3 => GraphKind::NearStarOneBidirectional,
        _ => GraphKind::Star,
    }
}

fn build_extreme(
    sequence: &[f64],
    p: &ModelParams,
    budget: FirmBudget,
    pick: impl Fn(usize, f64) -> GraphKind,
) -> Result<SeedingExtreme> {
    let n = sequence.len();
    let level = symmetric_level(sequence, p, budget)?;
    let witness_kind = pick(level.l, level.v_tilde);
    let g = generate(witness_kind, n, 0)?;
    let on_witness = symmetric_nash(&g, p, budget.budget, budget.c_s, budget.c_q)?;
    let discrepancy = (on_witness.strategy_a.seeding_total - level.seeding_total).abs();
    if discrepancy > WITNESS_TOL {
        log::warn!(
            "witness {witness_kind} seeds {} instead of {}",
            on_witness.strategy_a.seeding_total,
            level.seeding_total
        );
    }
    Ok(SeedingExtreme {
        seeding_total: level.seeding_total,
        l: level.l,
        v_tilde: level.v_tilde,
        case: level.case,
        witness_kind,
        witness: GraphFile::from(&g),
        witness_seeding_total: on_witness.strategy_a.seeding_total,
        discrepancy,
        verified: discrepancy <= WITNESS_TOL,
    })
}

/// Largest and smallest symmetric-equilibrium seeding over all graphs on
/// `n` agents for equal budgets `k`.
pub fn symmetric_seeding_extremes(
    n: usize,
    p: &ModelParams,
    k: f64,
    c_s: f64,
    c_q: f64,
) -> Result<SeedingExtremes> {
    let budget = FirmBudget::new(k, c_s, c_q);
    let max = build_extreme(&max_sequence(n, p)?, p, budget, |l, vt| max_witness(l, vt, n, p))?;
    let min = build_extreme(&min_sequence(n, p)?, p, budget, |l, _| min_witness(l, n))?;
    Ok(SeedingExtremes { max, min })
}

/// Sorted centralities of a witness must equal the extreme sequence where the
/// witness is meant to attain it. Returns the largest deviation.
pub fn witness_centrality_gap(kind: GraphKind, n: usize, p: &ModelParams) -> Result<f64> {
    let v = centrality(&generate(kind, n, 0)?, p)?.sorted();
    let expected: Vec<(usize, f64)> = match kind {
        GraphKind::Star => vec![(1, v_max(1, n, p)), (2, v_min(2, n, p))],
        GraphKind::Balanced => (1..=n).map(|l| (l, v_max(n, n, p))).collect(),
        GraphKind::LStar { l } => (1..=l)
            .map(|i| (i, v_max(l, n, p)))
            .chain((l + 1..=n).map(|i| (i, 1.0)))
            .collect(),
        GraphKind::NearStarOneBidirectional => {
            let hub = v_max(1, n, p);
            let r = p.delta / (2.0 * p.beta);
            let mut e = vec![(1, hub), (2, 1.0 + r * hub)];
            e.extend((3..=n).map(|i| (i, 1.0)));
            e
        }
        GraphKind::Random => {
            return Err(Error::InvalidKind("random graphs are not witnesses".into()))
        }
    };
    Ok(expected
        .into_iter()
        .map(|(pos, x)| (v[pos - 1] - x).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetRegime {
    /// K/c_s below λ/(2v_h^s).
    NoGraphSeedable,
    StarExceedsBalanced,
    BalancedExceedsStar,
    /// Star and balanced graphs both fully seeded.
    StarAndBalancedSaturated,
    /// K/c_s above n/2 + λ/2.
    AllSaturated,
    Boundary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetRegimeReport {
    /// K/c_s.
    pub seeding_units: f64,
    /// λ/(2v_h^s), 1/2 + λ/(2v̄), n/2 + λ/(2v_l^s), n/2 + λ/2.
    pub endpoints: [f64; 4],
    pub regime: BudgetRegime,
}

pub fn budget_regime_endpoints(n: usize, p: &ModelParams) -> Result<[f64; 4]> {
    p.validate()?;
    check_level(1, n)?;
    let lambda = p.lambda(n);
    let (hub, periphery) = p.star_centralities(n);
    let half = n as f64 / 2.0;
    Ok([
        lambda / (2.0 * hub),
        0.5 + lambda / (2.0 * p.mean_centrality()),
        half + lambda / (2.0 * periphery),
        half + lambda / 2.0,
    ])
}

/// Compares star and balanced seeding for equal budgets `k`.
pub fn budget_regime(n: usize, p: &ModelParams, k: f64, c_s: f64) -> Result<BudgetRegimeReport> {
    if !(k.is_finite() && c_s.is_finite() && c_s > 0.0) {
        return Err(Error::InvalidInput(format!(
            "budget {k} and seeding cost {c_s} must be finite, cost positive"
        )));
    }
    let endpoints = budget_regime_endpoints(n, p)?;
    let units = k / c_s;
    let regimes = [
        BudgetRegime::NoGraphSeedable,
        BudgetRegime::StarExceedsBalanced,
        BudgetRegime::BalancedExceedsStar,
        BudgetRegime::StarAndBalancedSaturated,
        BudgetRegime::AllSaturated,
    ];
    Ok(BudgetRegimeReport {
        seeding_units: units,
        endpoints,
        regime: locate(units, &endpoints, &regimes, BudgetRegime::Boundary),
    })
}
