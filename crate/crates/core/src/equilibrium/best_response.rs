use serde::Serialize;

use super::{water_fill, FirmBudget, Ladder, SEED_CAP};
use crate::error::{Error, Result};
use crate::graph::CentralityVector;
use crate::params::ModelParams;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestResponse {
    pub quality: f64,
    /// Per agent, indexed like the graph.
    pub seeding: Vec<f64>,
    pub seeding_total: f64,
    /// vᵀS + λ(q − q_rival)/(q + q_rival).
    pub utility: f64,
}

/// The part of a firm's utility it controls: vᵀS + λ(q − q_rival)/(q + q_rival).
pub fn firm_objective(v: &CentralityVector, p: &ModelParams, seeding: &[f64], q: f64, rival: f64) -> f64 {
    v.dot(seeding) + p.lambda(v.n()) * (q - rival) / (q + rival)
}

/// Best quality (and water-filled seeding) against a rival quality.
///
/// The objective is concave and smooth between consecutive breakpoints
/// `s = j/2` of the seeding amount. On each piece the stationary point has a
/// closed form; it is clamped to the piece and the best of all clamped
/// stationary points and breakpoints wins.
pub fn best_response_quality(
    v: &CentralityVector,
    p: &ModelParams,
    budget: FirmBudget,
    rival: f64,
) -> Result<BestResponse> {
    p.validate()?;
    budget.validate(p)?;
    if !rival.is_finite() || rival < p.epsilon {
        return Err(Error::InvalidInput(format!(
            "rival quality {rival} is below epsilon = {}",
            p.epsilon
        )));
    }
    let ladder = Ladder::new(v.sorted());
    let s = best_seeding_amount(&ladder, p, budget, rival);
    let n = v.n();
    let quality = budget.feasible_quality(s, p);
    let seeding = water_fill(&v.order, &vec![SEED_CAP; n], s).seeding;
    Ok(BestResponse {
        quality,
        utility: firm_objective(v, p, &seeding, quality, rival),
        seeding_total: seeding.iter().sum(),
        seeding,
    })
}

pub(crate) fn best_seeding_amount(
    ladder: &Ladder,
    p: &ModelParams,
    budget: FirmBudget,
    rival: f64,
) -> f64 {
    let n = ladder.n();
    let lambda = p.lambda(n);
    let s_max = budget.max_seeding(n, p);
    let objective = |s: f64| {
        let q = budget.feasible_quality(s, p);
        ladder.value(s) + lambda * (q - rival) / (q + rival)
    };

    let mut candidates = vec![0.0, s_max];
    let mut lo = 0.0;
    let mut pos = 1;
    while lo < s_max && pos <= n {
        let hi = (pos as f64 * SEED_CAP).min(s_max);
        // 2λ q_r / (q + q_r)² = (c_q/c_s) v  =>  q = sqrt(2λ q_r c_s / (c_q v)) − q_r
        let vm = ladder.v(pos);
        let q_star = (2.0 * lambda * rival * budget.c_s / (budget.c_q * vm)).sqrt() - rival;
        candidates.push(budget.seeding_for(q_star).clamp(lo, hi));
        candidates.push(hi);
        lo = hi;
        pos += 1;
    }

    let mut best = candidates[0];
    let mut best_val = objective(best);
    for &s in &candidates[1..] {
        let val = objective(s);
        if val > best_val {
            best = s;
            best_val = val;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{centrality, generate, GraphKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn symmetric_fixed_point_on_balanced() {
        let p = ModelParams::unit();
        let v = centrality(&generate(GraphKind::Balanced, 15, 0).unwrap(), &p).unwrap();
        let br = best_response_quality(&v, &p, FirmBudget::new(2.0, 1.0, 1.0), 15.0 / 8.0).unwrap();
        assert!((br.quality - 15.0 / 8.0).abs() < 1e-12);
        assert!((br.seeding_total - 0.125).abs() < 1e-12);

        // Fine grid confirms the maximizer.
        let lambda = p.lambda(15);
        let f = |q: f64| (2.0 - q) * 4.0 / 3.0 + lambda * (q - 1.875) / (q + 1.875);
        let grid_best = (0..=200_000)
            .map(|i| 1e-6 + (2.0 - 1e-6) * i as f64 / 200_000.0)
            .max_by(|a, b| f(*a).total_cmp(&f(*b)))
            .unwrap();
        assert!((grid_best - br.quality).abs() < 1e-4);
    }

    #[test]
    fn no_slack_budget() {
        let p = ModelParams::unit();
        let v = centrality(&generate(GraphKind::Star, 6, 0).unwrap(), &p).unwrap();
        let br = best_response_quality(&v, &p, FirmBudget::new(p.epsilon, 1.0, 1.0), 1.0).unwrap();
        assert_eq!(br.quality, p.epsilon);
        assert!(br.seeding.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn rejects_unaffordable_budget() {
        let p = ModelParams::unit();
        let v = centrality(&generate(GraphKind::Star, 6, 0).unwrap(), &p).unwrap();
        assert!(best_response_quality(&v, &p, FirmBudget::new(1e-9, 1.0, 1.0), 1.0).is_err());
        assert!(best_response_quality(&v, &p, FirmBudget::new(1.0, 1.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn beats_random_deviations() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let p = ModelParams::new(1.4, 1.2, 0.7, 1e-6).unwrap();
        for trial in 0..10 {
            let g = generate(GraphKind::Random, 8, trial).unwrap();
            let v = centrality(&g, &p).unwrap();
            let budget = FirmBudget::new(rng.random_range(0.1..6.0), 1.0, rng.random_range(0.3..3.0));
            let rival = rng.random_range(0.05..4.0);
            let br = best_response_quality(&v, &p, budget, rival).unwrap();
            let (q_lo, q_hi) = (budget.min_quality(8, &p), budget.max_quality());
            for _ in 0..1000 {
                let q = rng.random_range(q_lo..=q_hi);
                let s = water_fill(&v.order, &[0.5; 8], budget.seeding_for(q)).seeding;
                assert!(firm_objective(&v, &p, &s, q, rival) <= br.utility + 1e-12);
            }
        }
    }
}
