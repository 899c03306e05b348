//! Discounted influence centrality v = (I − δWᵀ)⁻¹·1 with W = G/(2β).
//!
//! `v_i` is the discounted number of consumption units that one unit of
//! initial preference at agent `i` generates across the whole network, so it
//! is exactly the marginal value of seeding that agent.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::{GraphKind, SocialGraph};
use crate::error::{Error, Result};
use crate::params::ModelParams;

/// Relative gap under which two centralities are treated as tied when
/// building the order.
const TIE_TOL: f64 = 1e-12;

/// Per-agent centralities plus the agents sorted by decreasing centrality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentralityVector {
    pub values: Vec<f64>,
    /// `order[p]` is the agent at (0-based) position `p`; ties go to the
    /// smaller agent index.
    pub order: Vec<usize>,
}

impl CentralityVector {
    pub fn from_values(values: Vec<f64>) -> Self {
        let order = centrality_order(&values);
        Self { values, order }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Centralities in decreasing order.
    pub fn sorted(&self) -> Vec<f64> {
        self.order.iter().map(|&i| self.values[i]).collect()
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.values[self.order[0]]
    }

    pub fn min(&self) -> f64 {
        self.values[*self.order.last().expect("empty centrality vector")]
    }

    /// Σ v_i s_i.
    pub fn dot(&self, s: &[f64]) -> f64 {
        self.values.iter().zip(s).map(|(v, s)| v * s).sum()
    }
}

fn centrality_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    // Values that differ only by rounding noise count as equal: re-sort each
    // such run by agent index.
    let mut start = 0;
    while start < order.len() {
        let head = values[order[start]];
        let mut end = start + 1;
        while end < order.len()
            && (head - values[order[end]]).abs() <= TIE_TOL * head.abs().max(1.0)
        {
            end += 1;
        }
        order[start..end].sort_unstable();
        start = end;
    }
    order
}

/// Solves (I − δWᵀ) v = 1 by LU decomposition.
pub fn centrality(g: &SocialGraph, p: &ModelParams) -> Result<CentralityVector> {
    g.ensure_valid()?;
    p.validate()?;
    let n = g.n();
    let c = p.delta * p.influence_scale();
    // (δWᵀ)_{ij} = δ g_ji / (2β)
    let a = DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - c * g.weight(j, i)
    });
    let v = a
        .lu()
        .solve(&DVector::from_element(n, 1.0))
        .ok_or_else(|| Error::InvalidInput("centrality system is singular".into()))?;
    Ok(CentralityVector::from_values(v.iter().copied().collect()))
}

/// Sums the series Σ_k (δWᵀ)^k·1 until the tail is below `tol`.
///
/// Every term is nonnegative and its entries sum to n·(δ/2β)^k, which bounds
/// the remaining tail entrywise.
pub fn neumann_centrality(g: &SocialGraph, p: &ModelParams, tol: f64) -> Result<Vec<f64>> {
    g.ensure_valid()?;
    p.validate()?;
    let n = g.n();
    let c = p.delta * p.influence_scale();
    let mut total = vec![1.0; n];
    let mut term = vec![1.0; n];
    let mut next = vec![0.0; n];
    loop {
        // next = δWᵀ term, next_i = c Σ_j g_ji term_j
        next.fill(0.0);
        for (j, row) in g.rows().enumerate() {
            let tj = term[j];
            for (i, &w) in row.iter().enumerate() {
                next[i] += c * w * tj;
            }
        }
        std::mem::swap(&mut term, &mut next);
        let mass: f64 = term.iter().sum();
        for (t, x) in total.iter_mut().zip(&term) {
            *t += x;
        }
        if mass * c / (1.0 - c) < tol {
            break;
        }
    }
    Ok(total)
}

/// Closed-form centralities by role.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum RoleCentrality {
    /// Every agent has the same centrality.
    Uniform { value: f64 },
    HubAndPeriphery { hub: f64, periphery: f64 },
}

impl RoleCentrality {
    pub fn max(&self) -> f64 {
        match *self {
            RoleCentrality::Uniform { value } => value,
            RoleCentrality::HubAndPeriphery { hub, .. } => hub,
        }
    }

    /// Expected per-agent values for the layout produced by
    /// [`generate`](super::generate) (hubs first).
    pub fn expand(&self, kind: GraphKind, n: usize) -> Vec<f64> {
        match (*self, kind) {
            (RoleCentrality::Uniform { value }, _) => vec![value; n],
            (RoleCentrality::HubAndPeriphery { hub, periphery }, GraphKind::LStar { l }) => {
                (0..n).map(|i| if i < l { hub } else { periphery }).collect()
            }
            (RoleCentrality::HubAndPeriphery { hub, periphery }, _) => {
                (0..n).map(|i| if i == 0 { hub } else { periphery }).collect()
            }
        }
    }
}

pub fn closed_form_centrality(kind: GraphKind, n: usize, p: &ModelParams) -> Result<RoleCentrality> {
    kind.check(n)?;
    match kind {
        GraphKind::Balanced => Ok(RoleCentrality::Uniform {
            value: p.mean_centrality(),
        }),
        GraphKind::Star => {
            let (hub, periphery) = p.star_centralities(n);
            Ok(RoleCentrality::HubAndPeriphery { hub, periphery })
        }
        GraphKind::LStar { l } => Ok(RoleCentrality::HubAndPeriphery {
            hub: n as f64 * p.delta / (l as f64 * (2.0 * p.beta - p.delta)) + 1.0,
            periphery: 1.0,
        }),
        other => Err(Error::InvalidKind(format!(
            "no closed-form centrality for {other}"
        ))),
    }
}
