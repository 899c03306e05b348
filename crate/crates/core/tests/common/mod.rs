#![allow(dead_code)]

use netgame::equilibrium::BudgetSpec;
use netgame::graph::random_graph;
use netgame::{ModelParams, SocialGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parameters satisfying beta <= alpha <= 2 beta - 1.
pub fn random_params<R: Rng>(rng: &mut R) -> ModelParams {
    let beta = rng.random_range(1.0..2.0);
    let alpha = rng.random_range(beta..=2.0 * beta - 1.0);
    let delta = rng.random_range(0.05..0.95);
    ModelParams::new(alpha, beta, delta, 1e-6).expect("sampled params are valid")
}

pub fn random_instance<R: Rng>(rng: &mut R, n_max: usize) -> (SocialGraph, ModelParams) {
    let n = rng.random_range(2..=n_max);
    let density = rng.random_range(0.2..=1.0);
    let g = random_graph(n, density, rng).expect("random graph");
    (g, random_params(rng))
}

pub fn random_budgets<R: Rng>(rng: &mut R, k_max: f64) -> BudgetSpec {
    BudgetSpec {
        k_a: rng.random_range(0.05..k_max),
        k_b: rng.random_range(0.05..k_max),
        c_s: rng.random_range(0.3..3.0),
        c_q: rng.random_range(0.3..3.0),
    }
}

/// Golden-section maximum of a unimodal function on [lo, hi].
pub fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Value of seeding the top agents 1/2 each, in order, up to `s` units,
/// computed directly from sorted centralities.
pub fn greedy_value(sorted: &[f64], s: f64) -> f64 {
    let mut left = s;
    let mut total = 0.0;
    for v in sorted {
        let take = left.min(0.5);
        if take <= 0.0 {
            break;
        }
        total += take * v;
        left -= take;
    }
    total
}

/// A firm's controllable payoff when it picks quality `q` and spends the
/// rest on greedy seeding.
pub fn payoff_at_quality(sorted: &[f64], lambda: f64, k: f64, c_s: f64, c_q: f64, q: f64, rival: f64) -> f64 {
    let s = (k - c_q * q) / c_s;
    greedy_value(sorted, s) + lambda * (q - rival) / (q + rival)
}
