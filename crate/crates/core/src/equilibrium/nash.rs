//! Equilibrium by enumeration of marginal-agent placements.
//!
//! Each firm's seeding amount is either strictly inside piece `k` (then
//! ṽ = v_k and its quality follows from the rival's) or pinned at a
//! breakpoint, at full saturation or at the quality floor (then its quality
//! is fixed by the budget and ṽ only has to fall in an interval). Every pair
//! of placements reduces to closed forms; the first pair, in lexicographic
//! `(k, l)` order, that satisfies all conditions is the equilibrium.

use super::{
    assemble_outcome, effective_centrality, quality_weight, BudgetSpec, CaseTag, FirmBudget,
    Ladder, NashOutcome, Placement, CONDITION_TOL, SEED_CAP, SNAP_TOL,
};
use crate::error::{Error, Result};
use crate::graph::{centrality, CentralityVector, SocialGraph};
use crate::params::ModelParams;

#[derive(Debug, Clone, Copy)]
enum Slot {
    /// Strictly inside piece `k`.
    Interior { k: usize },
    /// Seeding pinned at `s`; ṽ may lie anywhere in `[lo, hi]`.
    Pinned {
        s: f64,
        k: usize,
        case: CaseTag,
        lo: f64,
        hi: f64,
    },
}

impl Slot {
    fn k(&self) -> usize {
        match *self {
            Slot::Interior { k } | Slot::Pinned { k, .. } => k,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Slot::Interior { .. } => 0,
            Slot::Pinned { case, .. } => match case {
                CaseTag::Interior => 0,
                CaseTag::BoundaryZero => 1,
                CaseTag::Saturated => 2,
                CaseTag::QualityFloor => 3,
            },
        }
    }
}

fn slots(ladder: &Ladder, p: &ModelParams, budget: FirmBudget) -> Vec<Slot> {
    let n = ladder.n();
    let s_max = budget.max_seeding(n, p);
    let mut out = Vec::with_capacity(2 * n + 1);
    for k in 1..=n {
        let start = (k - 1) as f64 * SEED_CAP;
        if start < s_max - SNAP_TOL {
            out.push(Slot::Interior { k });
            out.push(Slot::Pinned {
                s: start,
                k,
                case: CaseTag::BoundaryZero,
                lo: ladder.v(k),
                hi: ladder.v(k - 1),
            });
        }
    }
    let full = n as f64 * SEED_CAP;
    if s_max >= full - SNAP_TOL {
        out.push(Slot::Pinned {
            s: full,
            k: n,
            case: CaseTag::Saturated,
            lo: f64::NEG_INFINITY,
            hi: ladder.v(n),
        });
    } else {
        let steps = s_max / SEED_CAP;
        let at_kink = (steps - steps.round()).abs() * SEED_CAP <= SNAP_TOL;
        let (k, hi) = if at_kink {
            let j = steps.round() as usize;
            (j + 1, ladder.v(j))
        } else {
            let j = steps.floor() as usize;
            (j + 1, ladder.v(j + 1))
        };
        out.push(Slot::Pinned {
            s: s_max,
            k: k.min(n),
            case: CaseTag::QualityFloor,
            lo: f64::NEG_INFINITY,
            hi,
        });
    }
    out
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    let slack = CONDITION_TOL * x.abs().max(1.0);
    x >= lo - slack && x <= hi + slack
}

/// Seeding implied by `q` if it lands in piece `k` and is feasible.
fn interior_seeding(budget: FirmBudget, s_max: f64, k: usize, q: f64) -> Option<f64> {
    if !(q.is_finite() && q > 0.0) {
        return None;
    }
    let s = budget.seeding_for(q);
    let lo = (k - 1) as f64 * SEED_CAP;
    let hi = (k as f64 * SEED_CAP).min(s_max);
    within(s, lo, hi).then_some(s)
}

/// Tries one pair of placements; returns the seeding amounts on success.
#[allow(clippy::too_many_arguments)]
fn try_pair(
    ladder: &Ladder,
    weight: f64,
    fa: FirmBudget,
    fb: FirmBudget,
    s_max_a: f64,
    s_max_b: f64,
    a: Slot,
    b: Slot,
) -> Option<(f64, f64)> {
    match (a, b) {
        (Slot::Interior { k }, Slot::Interior { k: l }) => {
            let (vk, vl) = (ladder.v(k), ladder.v(l));
            let denom = (vk + vl) * (vk + vl);
            let q_a = weight * vl / denom;
            let q_b = weight * vk / denom;
            let s_a = interior_seeding(fa, s_max_a, k, q_a)?;
            let s_b = interior_seeding(fb, s_max_b, l, q_b)?;
            Some((s_a, s_b))
        }
        (Slot::Interior { k }, Slot::Pinned { s: s_b, lo, hi, .. }) => {
            let q_b = fb.quality_for(s_b);
            // ṽ_k = weight q_b/(q_a + q_b)² = v_k
            let q_a = (weight * q_b / ladder.v(k)).sqrt() - q_b;
            let s_a = interior_seeding(fa, s_max_a, k, q_a)?;
            within(effective_centrality(weight, q_b, q_a), lo, hi).then_some((s_a, s_b))
        }
        (Slot::Pinned { .. }, Slot::Interior { .. }) => {
            let (s_b, s_a) = try_pair(ladder, weight, fb, fa, s_max_b, s_max_a, b, a)?;
            Some((s_a, s_b))
        }
        (
            Slot::Pinned {
                s: s_a,
                lo: lo_a,
                hi: hi_a,
                ..
            },
            Slot::Pinned {
                s: s_b,
                lo: lo_b,
                hi: hi_b,
                ..
            },
        ) => {
            let (q_a, q_b) = (fa.quality_for(s_a), fb.quality_for(s_b));
            let ok = within(effective_centrality(weight, q_a, q_b), lo_a, hi_a)
                && within(effective_centrality(weight, q_b, q_a), lo_b, hi_b);
            ok.then_some((s_a, s_b))
        }
    }
}

fn placement(slot: Slot) -> Placement {
    match slot {
        Slot::Interior { k } => Placement {
            k,
            case: CaseTag::Interior,
        },
        Slot::Pinned { k, case, .. } => Placement { k, case },
    }
}

/// Unique equilibrium of the budget game on `g`.
pub fn solve_nash(g: &SocialGraph, p: &ModelParams, budgets: &BudgetSpec) -> Result<NashOutcome> {
    let v = centrality(g, p)?;
    solve_nash_for(&v, p, budgets)
}

/// [`solve_nash`] for precomputed centralities.
pub fn solve_nash_for(
    v: &CentralityVector,
    p: &ModelParams,
    budgets: &BudgetSpec,
) -> Result<NashOutcome> {
    p.validate()?;
    budgets.validate(p)?;
    let n = v.n();
    let ladder = Ladder::new(v.sorted());
    let (fa, fb) = (budgets.firm_a(), budgets.firm_b());
    let (s_max_a, s_max_b) = (fa.max_seeding(n, p), fb.max_seeding(n, p));
    let weight = quality_weight(n, p, budgets.c_s, budgets.c_q);

    let slots_a = slots(&ladder, p, fa);
    let slots_b = slots(&ladder, p, fb);
    let mut pairs: Vec<(Slot, Slot)> = slots_a
        .iter()
        .flat_map(|&a| slots_b.iter().map(move |&b| (a, b)))
        .collect();
    pairs.sort_by_key(|(a, b)| (a.k(), b.k(), a.rank(), b.rank()));

    for (a, b) in pairs {
        if let Some((s_a, s_b)) = try_pair(&ladder, weight, fa, fb, s_max_a, s_max_b, a, b) {
            log::debug!("equilibrium at k = {}, l = {} ({a:?}, {b:?})", a.k(), b.k());
            return Ok(assemble_outcome(
                v,
                p,
                budgets,
                s_a,
                s_b,
                placement(a),
                placement(b),
            ));
        }
    }
    Err(Error::NoEquilibrium)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    fn example1(kind: GraphKind) -> NashOutcome {
        let g = generate(kind, 15, 0).unwrap();
        solve_nash(&g, &ModelParams::unit(), &BudgetSpec::symmetric(2.0, 1.0, 1.0)).unwrap()
    }

    #[test]
    fn balanced_example() {
        let out = example1(GraphKind::Balanced);
        for s in [&out.strategy_a, &out.strategy_b] {
            assert!((s.seeding_total - 0.125).abs() < 1e-9);
            assert!((s.quality - 1.875).abs() < 1e-9);
        }
        assert_eq!((out.k, out.l), (1, 1));
        assert_eq!(out.case_a, CaseTag::Interior);
    }

    #[test]
    fn three_star_example() {
        let out = example1(GraphKind::LStar { l: 3 });
        let s = &out.strategy_a;
        assert!((s.seeding_total - 17.0 / 16.0).abs() < 1e-9);
        assert!((s.quality - 15.0 / 16.0).abs() < 1e-9);
        let expected = [0.5, 0.5, 1.0 / 16.0];
        for (i, e) in expected.iter().enumerate() {
            assert!((s.seeding[i] - e).abs() < 1e-9);
        }
        assert!(s.seeding[3..].iter().all(|&x| x.abs() < 1e-12));
        assert_eq!(out.l, 3);
    }

    #[test]
    fn star_example() {
        let out = example1(GraphKind::Star);
        assert!((out.strategy_a.seeding_total - 0.5).abs() < 1e-9);
        assert!((out.v_tilde_l - 5.0 / 3.0).abs() < 1e-9);
        assert_eq!(out.l, 2);
        assert_eq!(out.case_b, CaseTag::BoundaryZero);
    }

    #[test]
    fn saturated_when_budget_is_large() {
        let g = generate(GraphKind::Star, 6, 0).unwrap();
        let p = ModelParams::unit();
        let lambda = p.lambda(6);
        let k = 3.0 + lambda / 2.0 + 1.0;
        let out = solve_nash(&g, &p, &BudgetSpec::symmetric(k, 1.0, 1.0)).unwrap();
        assert_eq!(out.case_a, CaseTag::Saturated);
        assert!((out.strategy_a.seeding_total - 3.0).abs() < 1e-12);
        assert!((out.strategy_a.quality - (k - 3.0)).abs() < 1e-12);
    }

    #[test]
    fn quality_floor_against_a_rich_rival() {
        let g = generate(GraphKind::Star, 5, 0).unwrap();
        let p = ModelParams::unit();
        let out = solve_nash(
            &g,
            &p,
            &BudgetSpec {
                k_a: 1.0,
                k_b: 500.0,
                c_s: 1.0,
                c_q: 1.0,
            },
        )
        .unwrap();
        assert_eq!(out.case_a, CaseTag::QualityFloor);
        assert!((out.strategy_a.quality - p.epsilon).abs() < 1e-12);
        assert_eq!(out.case_b, CaseTag::Saturated);
    }

    #[test]
    fn budgets_are_spent() {
        let g = generate(GraphKind::Random, 7, 1).unwrap();
        let b = BudgetSpec {
            k_a: 1.3,
            k_b: 2.9,
            c_s: 0.7,
            c_q: 1.6,
        };
        let out = solve_nash(&g, &ModelParams::unit(), &b).unwrap();
        assert!((out.strategy_a.spend(b.c_s, b.c_q) - b.k_a).abs() < 1e-9);
        assert!((out.strategy_b.spend(b.c_s, b.c_q) - b.k_b).abs() < 1e-9);
    }
}
