use super::best_response::best_seeding_amount;
use super::{assemble_outcome, classify, BudgetSpec, Ladder, NashOutcome};
use crate::error::{Error, Result};
use crate::graph::{centrality, SocialGraph};
use crate::params::ModelParams;

#[derive(Debug, Clone, PartialEq)]
pub struct IterativeConfig {
    pub max_iterations: usize,
    /// Stop once neither quality moves by more than this.
    pub tolerance: f64,
    /// Relaxation factors tried in turn; 1.0 is plain alternation.
    pub dampings: Vec<f64>,
    /// Converged runs from different starts must agree within this.
    pub agreement: f64,
}

impl Default for IterativeConfig {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            tolerance: 1e-10,
            dampings: vec![1.0, 0.5, 0.25],
            agreement: 1e-6,
        }
    }
}

/// Equilibrium by alternating best responses from several starting points.
///
/// Starts are the cross product of {ε, K/(2c_q), K/c_q} for each firm. For
/// each start the plain alternation is tried first and damped variants only
/// if it fails to settle. Converged runs must agree with each other.
pub fn solve_nash_iterative(
    g: &SocialGraph,
    p: &ModelParams,
    budgets: &BudgetSpec,
    config: &IterativeConfig,
) -> Result<NashOutcome> {
    p.validate()?;
    budgets.validate(p)?;
    let v = centrality(g, p)?;
    let n = v.n();
    let ladder = Ladder::new(v.sorted());
    let (fa, fb) = (budgets.firm_a(), budgets.firm_b());

    let starts = |k: f64| {
        [
            p.epsilon,
            (k / (2.0 * budgets.c_q)).max(p.epsilon),
            k / budgets.c_q,
        ]
    };

    let mut found: Option<(f64, f64)> = None;
    let mut last_step = f64::INFINITY;
    for q_a0 in starts(budgets.k_a) {
        for q_b0 in starts(budgets.k_b) {
            let mut settled = None;
            for &theta in &config.dampings {
                let (mut q_a, mut q_b) = (q_a0, q_b0);
                for _ in 0..config.max_iterations {
                    let next_a = fa.feasible_quality(best_seeding_amount(&ladder, p, fa, q_b), p);
                    let new_a = q_a + theta * (next_a - q_a);
                    let next_b = fb.feasible_quality(best_seeding_amount(&ladder, p, fb, new_a), p);
                    let new_b = q_b + theta * (next_b - q_b);
                    last_step = (new_a - q_a).abs().max((new_b - q_b).abs());
                    q_a = new_a;
                    q_b = new_b;
                    if last_step < config.tolerance {
                        settled = Some((q_a, q_b));
                        break;
                    }
                }
                if settled.is_some() {
                    break;
                }
                log::debug!("start ({q_a0}, {q_b0}) did not settle with damping {theta}");
            }
            let Some((q_a, q_b)) = settled else { continue };
            match found {
                None => found = Some((q_a, q_b)),
                Some((fa_q, fb_q)) => {
                    let gap = (fa_q - q_a).abs().max((fb_q - q_b).abs());
                    if gap > config.agreement {
                        return Err(Error::SolverDisagreement(format!(
                            "starts converged to ({fa_q}, {fb_q}) and ({q_a}, {q_b})"
                        )));
                    }
                }
            }
        }
    }

    let (q_a, q_b) = found.ok_or(Error::NotConverged {
        iterations: config.max_iterations,
        last_step,
    })?;
    let (s_a, s_b) = (fa.seeding_for(q_a), fb.seeding_for(q_b));
    let tol = 1e-7;
    let place_a = classify(s_a, fa.max_seeding(n, p), n, tol);
    let place_b = classify(s_b, fb.max_seeding(n, p), n, tol);
    Ok(assemble_outcome(&v, p, budgets, s_a, s_b, place_a, place_b))
}
