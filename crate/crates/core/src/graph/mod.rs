//! Influence graphs, canonical generators and centrality.
//!
//! A [`SocialGraph`] stores a row-stochastic weight matrix where
//! `weight(i, j)` is the influence of agent `j` on agent `i`. Rows sum to one
//! and the diagonal is zero.

mod centrality;
mod io;

pub use centrality::{
    centrality, closed_form_centrality, neumann_centrality, CentralityVector, RoleCentrality,
};
pub use io::{load_graph, read_graph, write_graph, GraphFile};

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on row sums.
pub const ROW_SUM_TOL: f64 = 1e-9;

/// Edge probability used by [`GraphKind::Random`].
pub const DEFAULT_RANDOM_DENSITY: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct SocialGraph {
    n: usize,
    weights: Vec<f64>,
}

/// A single failed graph invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    TooFewAgents { n: usize },
    NonFinite { row: usize, col: usize },
    NonzeroDiagonal { agent: usize, weight: f64 },
    NegativeWeight { row: usize, col: usize, weight: f64 },
    RowSum { row: usize, sum: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewAgents { n } => write!(f, "too few agents ({n} < 2)"),
            Violation::NonFinite { row, col } => write!(f, "non-finite weight at ({row}, {col})"),
            Violation::NonzeroDiagonal { agent, .. } => write!(f, "nonzero diagonal at {agent}"),
            Violation::NegativeWeight { row, col, weight } => {
                write!(f, "negative weight {weight} at ({row}, {col})")
            }
            Violation::RowSum { row, sum } => write!(f, "row {row} sum {sum}"),
        }
    }
}

/// Result of [`SocialGraph::validate`].
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl SocialGraph {
    /// Builds a graph from dense rows. Only the shape is checked here; call
    /// [`validate`](Self::validate) or [`ensure_valid`](Self::ensure_valid)
    /// for the stochastic invariants.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(format!(
                "weight matrix must be square ({n} rows)"
            )));
        }
        Ok(Self {
            n,
            weights: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a graph from `(influenced, influencer, weight)` triples.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut weights = vec![0.0; n * n];
        let mut seen = vec![false; n * n];
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            if seen[i * n + j] {
                return Err(Error::InvalidInput(format!("duplicate edge ({i}, {j})")));
            }
            seen[i * n + j] = true;
            weights[i * n + j] = w;
        }
        Ok(Self { n, weights })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weights[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.weights[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.weights.chunks(self.n.max(1))
    }

    /// Nonzero entries as `(influenced, influencer, weight)`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let w = self.weight(i, j);
                if w != 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.n < 2 {
            violations.push(Violation::TooFewAgents { n: self.n });
        }
        for i in 0..self.n {
            let mut sum = 0.0;
            for j in 0..self.n {
                let w = self.weight(i, j);
                if !w.is_finite() {
                    violations.push(Violation::NonFinite { row: i, col: j });
                    continue;
                }
                if i == j && w != 0.0 {
                    violations.push(Violation::NonzeroDiagonal { agent: i, weight: w });
                }
                if w < 0.0 {
                    violations.push(Violation::NegativeWeight {
                        row: i,
                        col: j,
                        weight: w,
                    });
                }
                sum += w;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                violations.push(Violation::RowSum { row: i, sum });
            }
        }
        ValidationReport { violations }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(report.violations))
        }
    }
}

/// Graph families with a known construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    /// Directed n-cycle; every agent has unit in- and out-weight.
    Balanced,
    /// Agent 0 is the hub.
    Star,
    /// Agents `0..l` are hubs with equal, maximal centrality.
    LStar { l: usize },
    /// Star whose hub sends its whole out-weight to agent 1.
    NearStarOneBidirectional,
    Random,
}

impl GraphKind {
    pub fn check(&self, n: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::InvalidKind(format!("n = {n} is below 2")));
        }
        match *self {
            GraphKind::LStar { l } if l < 2 || l + 1 > n => Err(Error::InvalidKind(format!(
                "l_star requires 2 <= l <= n - 1 (l = {l}, n = {n})"
            ))),
            GraphKind::NearStarOneBidirectional if n < 3 => Err(Error::InvalidKind(
                "near_star_one_bidirectional requires n >= 3".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Parses the CLI spelling; `l` is only consulted for `l_star`.
    pub fn parse(name: &str, l: Option<usize>) -> Result<Self> {
        match name {
            "l_star" | "lstar" => l
                .map(|l| GraphKind::LStar { l })
                .ok_or_else(|| Error::InvalidKind("l_star requires --l".into())),
            other => other.parse(),
        }
    }
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "balanced" => Ok(GraphKind::Balanced),
            "star" => Ok(GraphKind::Star),
            "near_star" | "near_star_one_bidirectional" => Ok(GraphKind::NearStarOneBidirectional),
            "random" => Ok(GraphKind::Random),
            _ => Err(Error::InvalidKind(format!("unknown graph kind `{s}`"))),
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::Balanced => f.write_str("balanced"),
            GraphKind::Star => f.write_str("star"),
            GraphKind::LStar { l } => write!(f, "l_star({l})"),
            GraphKind::NearStarOneBidirectional => f.write_str("near_star_one_bidirectional"),
            GraphKind::Random => f.write_str("random"),
        }
    }
}

/// Generates a member of `kind` on `n` agents. `seed` only matters for
/// [`GraphKind::Random`].
pub fn generate(kind: GraphKind, n: usize, seed: u64) -> Result<SocialGraph> {
    kind.check(n)?;
    let mut rows = vec![vec![0.0; n]; n];
    match kind {
        GraphKind::Balanced => {
            for (i, row) in rows.iter_mut().enumerate() {
                row[(i + 1) % n] = 1.0;
            }
        }
        GraphKind::Star => {
            let spread = 1.0 / (n - 1) as f64;
            for (i, row) in rows.iter_mut().enumerate() {
                if i == 0 {
                    row[1..].fill(spread);
                } else {
                    row[0] = 1.0;
                }
            }
        }
        GraphKind::LStar { l } => {
            let among_hubs = 1.0 / (l - 1) as f64;
            let to_hub = 1.0 / l as f64;
            for (i, row) in rows.iter_mut().enumerate() {
                for (j, w) in row.iter_mut().enumerate().take(l) {
                    if i < l {
                        if i != j {
                            *w = among_hubs;
                        }
                    } else {
                        *w = to_hub;
                    }
                }
            }
        }
        GraphKind::NearStarOneBidirectional => {
            rows[0][1] = 1.0;
            for row in rows.iter_mut().skip(1) {
                row[0] = 1.0;
            }
        }
        GraphKind::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            return random_graph(n, DEFAULT_RANDOM_DENSITY, &mut rng);
        }
    }
    SocialGraph::from_rows(rows)
}

/// Random row-stochastic graph: each off-diagonal entry is present with
/// probability `density` and carries a uniform weight, then rows are
/// normalized. Rows that come out empty are drawn again.
pub fn random_graph<R: Rng + ?Sized>(n: usize, density: f64, rng: &mut R) -> Result<SocialGraph> {
    if n < 2 {
        return Err(Error::InvalidKind(format!("n = {n} is below 2")));
    }
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "density {density} outside (0, 1]"
        )));
    }
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let row = loop {
            let mut row = vec![0.0; n];
            for (j, w) in row.iter_mut().enumerate() {
                if j != i && rng.random_bool(density) {
                    *w = rng.random::<f64>();
                }
            }
            let sum: f64 = row.iter().sum();
            if sum > 1e-12 {
                row.iter_mut().for_each(|w| *w /= sum);
                break row;
            }
        };
        rows.push(row);
    }
    SocialGraph::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycle_is_valid() {
        let g = SocialGraph::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(g.validate().is_ok());
    }

    #[test]
    fn reports_nonzero_diagonal() {
        let g = SocialGraph::from_rows(vec![vec![0.5, 0.5], vec![1.0, 0.0]]).unwrap();
        let report = g.validate();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].to_string(), "nonzero diagonal at 0");
    }

    #[test]
    fn reports_row_sum() {
        let g = SocialGraph::from_rows(vec![
            vec![0.0, 0.4, 0.5],
            vec![0.5, 0.0, 0.5],
            vec![0.5, 0.5, 0.0],
        ])
        .unwrap();
        let report = g.validate();
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].to_string(), "row 0 sum 0.9");
    }

    #[test]
    fn reports_negative_and_small() {
        let g = SocialGraph::from_rows(vec![vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let v = g.validate().violations;
        assert!(v.iter().any(|x| matches!(x, Violation::NegativeWeight { row: 1, col: 0, .. })));
        assert!(v.iter().any(|x| matches!(x, Violation::RowSum { row: 1, .. })));

        let g = SocialGraph::from_rows(vec![vec![0.0]]).unwrap();
        assert!(g
            .validate()
            .violations
            .contains(&Violation::TooFewAgents { n: 1 }));
    }

    #[test]
    fn non_square_rejected() {
        assert!(SocialGraph::from_rows(vec![vec![0.0, 1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn generators_are_valid() {
        for n in [3, 4, 7, 15] {
            let mut kinds = vec![
                GraphKind::Balanced,
                GraphKind::Star,
                GraphKind::NearStarOneBidirectional,
                GraphKind::Random,
            ];
            kinds.extend((2..n).map(|l| GraphKind::LStar { l }));
            for kind in kinds {
                let g = generate(kind, n, 7).unwrap();
                assert!(g.validate().is_ok(), "{kind} n={n}: {:?}", g.validate());
            }
        }
    }

    #[test]
    fn balanced_is_cycle() {
        let g = generate(GraphKind::Balanced, 15, 0).unwrap();
        for i in 0..15 {
            assert_eq!(g.weight(i, (i + 1) % 15), 1.0);
        }
        assert_eq!(g.edges().len(), 15);
    }

    #[test]
    fn kind_constraints() {
        assert!(generate(GraphKind::LStar { l: 1 }, 15, 0).is_err());
        assert!(generate(GraphKind::LStar { l: 15 }, 15, 0).is_err());
        assert!(generate(GraphKind::LStar { l: 14 }, 15, 0).is_ok());
        assert!(generate(GraphKind::Balanced, 1, 0).is_err());
        assert!(generate(GraphKind::NearStarOneBidirectional, 2, 0).is_err());
    }

    #[test]
    fn random_is_deterministic_in_seed() {
        let a = generate(GraphKind::Random, 9, 42).unwrap();
        let b = generate(GraphKind::Random, 9, 42).unwrap();
        let c = generate(GraphKind::Random, 9, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!(GraphKind::parse("star", None).unwrap(), GraphKind::Star);
        assert_eq!(
            GraphKind::parse("l_star", Some(3)).unwrap(),
            GraphKind::LStar { l: 3 }
        );
        assert!(GraphKind::parse("l_star", None).is_err());
        assert!(GraphKind::parse("wheel", None).is_err());
    }

    #[test]
    fn edges_out_of_range_or_duplicate() {
        assert!(SocialGraph::from_edges(2, &[(0, 2, 1.0)]).is_err());
        assert!(SocialGraph::from_edges(2, &[(0, 1, 0.5), (0, 1, 0.5)]).is_err());
    }
}
