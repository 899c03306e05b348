use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default minimum admissible quality.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Payoff and discount parameters shared by every part of the model.
///
/// `alpha` and `beta` shape the quadratic isolation payoff, `delta` discounts
/// the firms' consumption streams and `epsilon` is the smallest quality a
/// firm may choose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub epsilon: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64, delta: f64, epsilon: f64) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            delta,
            epsilon,
        };
        p.validate()?;
        Ok(p)
    }

    /// alpha = beta = 1, delta = 1/2, the setting used in the worked examples.
    pub fn unit() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            delta: 0.5,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let Self {
            alpha,
            beta,
            delta,
            epsilon,
        } = *self;
        if ![alpha, beta, delta, epsilon].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if beta > alpha {
            return Err(Error::InvalidParams(format!(
                "beta ({beta}) must not exceed alpha ({alpha})"
            )));
        }
        // Keeps every best response inside [0, 1]; together with beta <= alpha
        // it also forces beta >= 1.
        if 1.0 + alpha > 2.0 * beta {
            return Err(Error::InvalidParams(format!(
                "1 + alpha ({}) must not exceed 2 beta ({})",
                1.0 + alpha,
                2.0 * beta
            )));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParams(format!(
                "delta ({delta}) must lie in (0, 1)"
            )));
        }
        if epsilon <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "epsilon ({epsilon}) must be positive"
            )));
        }
        Ok(())
    }

    /// Scale 1/(2 beta) applied to the influence matrix.
    pub fn influence_scale(&self) -> f64 {
        1.0 / (2.0 * self.beta)
    }

    /// Coefficient of the quality term in the firms' discounted utilities.
    pub fn lambda(&self, n: usize) -> f64 {
        let Self {
            alpha, beta, delta, ..
        } = *self;
        delta * (1.0 + 2.0 * (alpha - beta)) * n as f64
            / (2.0 * (1.0 - delta) * (2.0 * beta - delta))
    }

    /// Sum of all centralities, identical for every graph on `n` agents.
    pub fn centrality_sum(&self, n: usize) -> f64 {
        n as f64 * self.mean_centrality()
    }

    /// Centrality of every agent in a balanced graph, 2β/(2β−δ).
    pub fn mean_centrality(&self) -> f64 {
        2.0 * self.beta / (2.0 * self.beta - self.delta)
    }

    /// (hub, periphery) centralities of the star graph on `n` agents.
    pub fn star_centralities(&self, n: usize) -> (f64, f64) {
        let r = self.delta / (2.0 * self.beta);
        let m = (n - 1) as f64;
        let denom = 1.0 - r * r;
        ((1.0 + r * m) / denom, (1.0 + r / m) / denom)
    }

    /// Total discounted consumption n/(1−δ) shared by the two firms.
    pub fn total_utility(&self, n: usize) -> f64 {
        n as f64 / (1.0 - self.delta)
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::unit()
    }
}
