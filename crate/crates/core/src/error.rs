use thiserror::Error;

use crate::graph::Violation;

/// Errors surfaced by the library.
///
/// The variants are grouped by cause so that callers (the CLI in particular)
/// can map them onto distinct exit codes: bad input, solver failure, and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid graph: {}", format_violations(.0))]
    InvalidGraph(Vec<Violation>),

    #[error("invalid graph kind: {0}")]
    InvalidKind(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("consumption left [-1/2, 1/2] at agent {agent}: y = {value}")]
    StateOutOfRange { agent: usize, value: f64 },

    #[error("no equilibrium candidate satisfied the optimality conditions")]
    NoEquilibrium,

    #[error("best-response iteration did not converge after {iterations} iterations (last step {last_step:e})")]
    NotConverged { iterations: usize, last_step: f64 },

    #[error("solver runs disagree: {0}")]
    SolverDisagreement(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by the caller's input rather than the solvers.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::InvalidGraph(_)
                | Error::InvalidKind(_)
                | Error::InvalidInput(_)
                | Error::StateOutOfRange { .. }
        )
    }

    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::NoEquilibrium | Error::NotConverged { .. } | Error::SolverDisagreement(_)
        )
    }
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
