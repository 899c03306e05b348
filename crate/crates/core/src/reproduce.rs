//! Worked-example pipelines that compare computed values with reference
//! values and report a pass/fail table.

use serde::Serialize;

use crate::allocation::{
    allocate_budget, max_seeding_capacity_bound, seeding_capacity, thresholds, Firm, PresetState,
};
use crate::dynamics::QualityPair;
use crate::equilibrium::symmetric_nash;
use crate::error::{Error, Result};
use crate::extremal::{extremal_centrality, symmetric_seeding_extremes};
use crate::graph::{centrality, generate, GraphKind};
use crate::params::ModelParams;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub computed: f64,
    pub tol: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: f64, computed: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            expected,
            computed,
            tol,
            passed: (expected - computed).abs() <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproReport {
    pub example: Example,
    pub checks: Vec<Check>,
}

impl ReproReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Fixed-width table, one row per check.
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<34} {:>22} {:>22} {:>8}  result\n",
            "check", "expected", "computed", "tol"
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{:<34} {:>22.15} {:>22.15} {:>8.0e}  {}\n",
                c.name,
                c.expected,
                c.computed,
                c.tol,
                if c.passed { "pass" } else { "FAIL" }
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Example {
    Example1,
    Example2,
}

impl std::str::FromStr for Example {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example1" => Ok(Example::Example1),
            "example2" => Ok(Example::Example2),
            _ => Err(Error::InvalidInput(format!("unknown example `{s}`"))),
        }
    }
}

const N: usize = 15;

pub fn reproduce(which: Example) -> Result<ReproReport> {
    let checks = match which {
        Example::Example1 => example1()?,
        Example::Example2 => example2()?,
    };
    Ok(ReproReport {
        example: which,
        checks,
    })
}

fn example1() -> Result<Vec<Check>> {
    let p = ModelParams::unit();
    let (k, c_s, c_q) = (2.0, 1.0, 1.0);
    let mut checks = vec![Check::new("lambda", 5.0, p.lambda(N), 1e-12)];

    let balanced = centrality(&generate(GraphKind::Balanced, N, 0)?, &p)?;
    checks.push(Check::new("balanced centrality", 4.0 / 3.0, balanced.max(), 1e-9));
    let star = centrality(&generate(GraphKind::Star, N, 0)?, &p)?;
    checks.push(Check::new("star hub centrality", 4.8, star.max(), 1e-9));
    // (1 + r/(n−1))/(1 − r²) with r = 1/4
    checks.push(Check::new(
        "star peripheral centrality",
        (1.0 + 0.25 / 14.0) / (1.0 - 0.0625),
        star.min(),
        1e-9,
    ));
    checks.push(Check::new(
        "3rd centrality upper bound",
        8.0 / 3.0,
        extremal_centrality(3, N, &p)?.v_max,
        1e-9,
    ));

    let extremes = symmetric_seeding_extremes(N, &p, k, c_s, c_q)?;
    checks.push(Check::new("max seeding budget", 17.0 / 16.0, extremes.max.seeding_total, 1e-6));
    checks.push(Check::new("min seeding budget", 1.0 / 8.0, extremes.min.seeding_total, 1e-6));

    let three = symmetric_nash(&generate(GraphKind::LStar { l: 3 }, N, 0)?, &p, k, c_s, c_q)?;
    checks.push(Check::new("3-star seeding budget", 17.0 / 16.0, three.strategy_a.seeding_total, 1e-6));
    checks.push(Check::new("3-star third hub seeding", 1.0 / 16.0, three.strategy_a.seeding[2], 1e-6));
    let bal = symmetric_nash(&generate(GraphKind::Balanced, N, 0)?, &p, k, c_s, c_q)?;
    checks.push(Check::new("balanced seeding budget", 1.0 / 8.0, bal.strategy_a.seeding_total, 1e-6));
    checks.push(Check::new("balanced quality", 15.0 / 8.0, bal.strategy_a.quality, 1e-6));
    let st = symmetric_nash(&generate(GraphKind::Star, N, 0)?, &p, k, c_s, c_q)?;
    checks.push(Check::new("star seeding budget", 0.5, st.strategy_a.seeding_total, 1e-6));
    checks.push(Check::new("star effective centrality", 5.0 / 3.0, st.v_tilde_l, 1e-6));
    Ok(checks)
}

fn example2() -> Result<Vec<Check>> {
    let p = ModelParams::unit();
    let q = QualityPair { q_a: 1.0, q_b: 1.0 };
    let (c_s, c_q) = (1.0, 1.0);
    let t = thresholds(&q, &p, N, c_s, c_q);
    let mut checks = vec![
        Check::new("threshold firm a", 2.5, t.v_c_a, 1e-9),
        Check::new("threshold firm b", 2.5, t.v_c_b, 1e-9),
    ];
    let state = PresetState::neutral(q, N, &p)?;
    let bound = max_seeding_capacity_bound(N, &p, t.v_c_a, &state.capacity_a)?;
    checks.push(Check::new("max seeded agents", 3.0, bound.k as f64, 0.0));
    checks.push(Check::new("max capacity bound", 1.5, bound.max_capacity, 1e-9));

    for (label, kind, expected) in [
        ("3-star", GraphKind::LStar { l: 3 }, 1.5),
        ("star", GraphKind::Star, 0.5),
        ("balanced", GraphKind::Balanced, 0.0),
    ] {
        let v = centrality(&generate(kind, N, 0)?, &p)?;
        let cap = seeding_capacity(&v, &state, Firm::A, &p, c_s, c_q)?;
        checks.push(Check::new(format!("{label} seeding capacity"), expected, cap, 1e-9));
        let alloc = allocate_budget(&v, &state, Firm::A, 10.0, c_s, c_q, &p)?;
        checks.push(Check::new(
            format!("{label} seeding at K = 10"),
            expected,
            alloc.seeding_total,
            1e-9,
        ));
    }
    Ok(checks)
}
