//! Acceptance suite: one line per check, grouped by criterion.
//!
//! Runs without the libtest harness so the table always reaches stdout.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{payoff_at_quality, random_budgets, random_instance, random_params, rng};
use netgame::allocation::{
    allocate_budget, max_seeding_capacity_bound, seeding_capacity, thresholds, Firm, PresetState,
};
use netgame::dynamics::{
    agent_utility, closed_form_utilities, discounted_utilities, step, ConsumptionState,
    QualityPair, SeedingPair, UtilityMode,
};
use netgame::equilibrium::{
    solve_nash, solve_nash_iterative, symmetric_nash, water_fill_seeding, BudgetSpec,
    IterativeConfig,
};
use netgame::extremal::{extremal_centrality, max_sequence, min_sequence};
use netgame::{centrality, generate, GraphKind, ModelParams, SocialGraph};
use rand::Rng;

const N: usize = 15;
const SLACK: f64 = 1e-9;

/// Checks that are expected to fail, with the reason printed next to them.
const KNOWN_RED: &[(&str, &str)] = &[(
    "star peripheral vs published 1.08",
    "the published value is rounded down; 1.0857 is 5.7e-3 away",
)];

struct Line {
    criterion: u8,
    name: String,
    passed: bool,
    detail: String,
}

#[derive(Default)]
struct Suite {
    lines: Vec<Line>,
}

impl Suite {
    fn check(&mut self, criterion: u8, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.lines.push(Line {
            criterion,
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn close(&mut self, criterion: u8, name: &str, expected: f64, computed: f64, tol: f64) {
        let gap = (expected - computed).abs();
        let detail = format!("expected {expected}, computed {computed}, |gap| {gap:.3e} (tol {tol:e})");
        self.check(criterion, name, gap <= tol, detail);
    }

    fn fast(&mut self, criterion: u8, name: &str, took: Duration, limit: Duration) {
        let detail = format!("{:.3} ms (limit {:.0} ms)", took.as_secs_f64() * 1e3, limit.as_secs_f64() * 1e3);
        self.check(criterion, name, took < limit, detail);
    }

    fn violations(&mut self, criterion: u8, name: &str, instances: usize, bad: Vec<String>) {
        let detail = match bad.first() {
            None => format!("{instances} instances, 0 violations"),
            Some(first) => format!("{instances} instances, {} violations; first: {first}", bad.len()),
        };
        self.check(criterion, name, bad.is_empty(), detail);
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn graph(kind: GraphKind) -> SocialGraph {
    generate(kind, N, 0).expect("example graph")
}

fn budgets(k_a: f64, k_b: f64) -> BudgetSpec {
    BudgetSpec {
        k_a,
        k_b,
        c_s: 1.0,
        c_q: 1.0,
    }
}

fn sweep(lo: f64, hi: f64, steps: usize) -> impl Iterator<Item = f64> {
    (0..steps).map(move |i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
}

fn lambda(s: &mut Suite) {
    s.close(1, "lambda on the 15-agent example", 5.0, ModelParams::unit().lambda(N), 1e-12);
}

fn centralities(s: &mut Suite) {
    let p = ModelParams::unit();
    let (bal, t_bal) = timed(|| centrality(&graph(GraphKind::Balanced), &p).unwrap());
    let (star, t_star) = timed(|| centrality(&graph(GraphKind::Star), &p).unwrap());
    let (three, t_three) = timed(|| centrality(&graph(GraphKind::LStar { l: 3 }), &p).unwrap());
    s.close(2, "balanced centrality", 4.0 / 3.0, bal.max(), 1e-9);
    s.close(2, "balanced centrality is uniform", 4.0 / 3.0, bal.min(), 1e-9);
    s.close(2, "star hub", 4.8, star.max(), 1e-9);
    let (_, periphery) = p.star_centralities(N);
    s.close(2, "star peripheral vs closed form", periphery, star.min(), 1e-9);
    s.close(2, "star peripheral vs published 1.08", 1.08, star.min(), 5e-3);
    let hubs = three.sorted();
    s.close(2, "3-star hubs", 8.0 / 3.0, hubs[0], 1e-9);
    s.close(2, "3-star third hub", 8.0 / 3.0, hubs[2], 1e-9);
    s.close(2, "3-star hub bound", 8.0 / 3.0, extremal_centrality(3, N, &p).unwrap().v_max, 1e-9);
    let limit = Duration::from_millis(100);
    s.fast(2, "balanced centrality runtime", t_bal, limit);
    s.fast(2, "star centrality runtime", t_star, limit);
    s.fast(2, "3-star centrality runtime", t_three, limit);
}

fn symmetric_example(s: &mut Suite) {
    let p = ModelParams::unit();
    let limit = Duration::from_secs(1);
    let (bal, t) = timed(|| symmetric_nash(&graph(GraphKind::Balanced), &p, 2.0, 1.0, 1.0).unwrap());
    s.close(3, "balanced seeding budget", 1.0 / 8.0, bal.strategy_a.seeding_total, 1e-6);
    s.close(3, "balanced quality", 15.0 / 8.0, bal.strategy_a.quality, 1e-6);
    s.fast(3, "balanced solve runtime", t, limit);

    let (three, t) = timed(|| symmetric_nash(&graph(GraphKind::LStar { l: 3 }), &p, 2.0, 1.0, 1.0).unwrap());
    s.close(3, "3-star seeding budget", 17.0 / 16.0, three.strategy_a.seeding_total, 1e-6);
    let mut expected = vec![0.0; N];
    expected[..3].copy_from_slice(&[0.5, 0.5, 1.0 / 16.0]);
    let along: Vec<f64> = three.strategy_a.seeding.clone();
    let gap = along.iter().zip(&expected).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    s.check(
        3,
        "3-star seeding vector (1/2, 1/2, 1/16, 0, ...)",
        gap <= 1e-6,
        format!("max |gap| {gap:.3e} (tol 1e-6)"),
    );
    s.fast(3, "3-star solve runtime", t, limit);

    let (star, t) = timed(|| symmetric_nash(&graph(GraphKind::Star), &p, 2.0, 1.0, 1.0).unwrap());
    s.close(3, "star seeding budget", 0.5, star.strategy_a.seeding_total, 1e-6);
    s.close(3, "star effective centrality", 5.0 / 3.0, star.v_tilde_l, 1e-6);
    s.fast(3, "star solve runtime", t, limit);
}

fn threshold_example(s: &mut Suite) {
    let p = ModelParams::unit();
    let q = QualityPair { q_a: 1.0, q_b: 1.0 };
    let t = thresholds(&q, &p, N, 1.0, 1.0);
    s.close(4, "threshold firm a", 2.5, t.v_c_a, 1e-9);
    s.close(4, "threshold firm b", 2.5, t.v_c_b, 1e-9);
    let state = PresetState::neutral(q, N, &p).unwrap();
    let bound = max_seeding_capacity_bound(N, &p, t.v_c_a, &state.capacity_a).unwrap();
    s.close(4, "agents above threshold", 3.0, bound.k as f64, 0.0);
    for (label, kind, expected) in [
        ("3-star", GraphKind::LStar { l: 3 }, 1.5),
        ("star", GraphKind::Star, 0.5),
        ("balanced", GraphKind::Balanced, 0.0),
    ] {
        let v = centrality(&graph(kind), &p).unwrap();
        let cap = seeding_capacity(&v, &state, Firm::A, &p, 1.0, 1.0).unwrap();
        s.close(4, &format!("{label} seeding capacity"), expected, cap, 1e-9);
    }
}

fn solver_oracles(s: &mut Suite) {
    let mut r = rng(5);
    let (mut agree, mut deviate) = (Vec::new(), Vec::new());
    let mut worst_gain = 0.0f64;
    for case in 0..50 {
        let (g, p) = random_instance(&mut r, 10);
        let b = random_budgets(&mut r, 10.0);
        let e = solve_nash(&g, &p, &b).unwrap();
        let i = solve_nash_iterative(&g, &p, &b, &IterativeConfig::default()).unwrap();
        let gap = [
            (e.strategy_a.quality, i.strategy_a.quality),
            (e.strategy_b.quality, i.strategy_b.quality),
            (e.strategy_a.seeding_total, i.strategy_a.seeding_total),
            (e.strategy_b.seeding_total, i.strategy_b.seeding_total),
        ]
        .iter()
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        if gap > 1e-4 {
            agree.push(format!("case {case}: gap {gap:.3e}"));
        }

        let n = g.n();
        let sorted = centrality(&g, &p).unwrap().sorted();
        let q = e.qualities();
        for (budget, own, rival) in [(b.firm_a(), q.q_a, q.q_b), (b.firm_b(), q.q_b, q.q_a)] {
            let f = |x: f64| payoff_at_quality(&sorted, p.lambda(n), budget.budget, b.c_s, b.c_q, x, rival);
            let base = f(own);
            let (lo, hi) = (budget.min_quality(n, &p), budget.max_quality());
            let gain = sweep(lo, hi, 200).map(|x| f(x) - base).fold(f64::NEG_INFINITY, f64::max);
            worst_gain = worst_gain.max(gain);
            if gain > 1e-6 {
                deviate.push(format!("case {case}: gain {gain:.3e}"));
            }
        }
    }
    s.violations(5, "enumeration vs iteration within 1e-4", 50, agree);
    s.violations(5, "no profitable deviation (200 per firm)", 50, deviate);
    s.check(5, "largest deviation gain", worst_gain <= 1e-6, format!("{worst_gain:.3e} (tol 1e-6)"));
}

fn utility_consistency(s: &mut Suite) {
    let mut r = rng(6);
    let (mut rel, mut fixed_sum) = (Vec::new(), Vec::new());
    for case in 0..20 {
        let (g, p) = random_instance(&mut r, 10);
        let n = g.n();
        let v = centrality(&g, &p).unwrap();
        let q = QualityPair { q_a: r.random_range(0.1..5.0), q_b: r.random_range(0.1..5.0) };
        let sd = SeedingPair::new(
            water_fill_seeding(&v, r.random_range(0.0..n as f64 / 2.0)).unwrap().seeding,
            water_fill_seeding(&v, r.random_range(0.0..n as f64 / 2.0)).unwrap().seeding,
        )
        .unwrap();
        let sim = discounted_utilities(&g, &p, &q, &sd, UtilityMode::Simulated { horizon: None }).unwrap();
        let closed = closed_form_utilities(&v, &p, &q, &sd);
        for (a, b) in [(sim.u_a, closed.u_a), (sim.u_b, closed.u_b)] {
            let e = (a - b).abs() / b.abs();
            if e > 1e-8 {
                rel.push(format!("case {case}: relative error {e:.3e}"));
            }
        }
        let total = p.total_utility(n);
        for u in [&sim, &closed] {
            let e = (u.u_a + u.u_b - total).abs();
            if e > 1e-9 * total.max(1.0) {
                fixed_sum.push(format!("case {case}: |U_a + U_b - n/(1-delta)| = {e:.3e}"));
            }
        }
    }
    s.violations(6, "simulated vs closed-form utilities (rel 1e-8)", 20, rel);
    s.violations(6, "utilities sum to n/(1-delta) (1e-9)", 20, fixed_sum);
}

fn best_response_consistency(s: &mut Suite) {
    let mut r = rng(7);
    let mut bad = Vec::new();
    for case in 0..20 {
        let (g, p) = random_instance(&mut r, 10);
        let n = g.n();
        let q = QualityPair { q_a: r.random_range(0.1..5.0), q_b: r.random_range(0.1..5.0) };
        let y: Vec<f64> = (0..n).map(|_| r.random_range(-0.5..=0.5)).collect();
        let next = step(&g, &p, &q, &ConsumptionState::new(y.clone(), 0).unwrap()).unwrap();
        for i in 0..n {
            let best = common::golden_max(|yi| agent_utility(&g, &p, &q, i, yi, &y), -0.5, 0.5, 1e-12);
            let gap = (next.y[i] - best).abs();
            if gap > 1e-6 {
                bad.push(format!("case {case}, agent {i}: gap {gap:.3e}"));
            }
        }
    }
    s.violations(7, "step vs per-agent numeric maximum (1e-6)", 20, bad);
}

fn property_suites(s: &mut Suite) {
    const CASES: usize = 200;
    let mut r = rng(8);

    let mut bad = Vec::new();
    for case in 0..CASES {
        let (g, p) = random_instance(&mut r, 10);
        let b = random_budgets(&mut r, 12.0);
        let out = solve_nash(&g, &p, &b).unwrap();
        let (sa, sb) = (out.strategy_a.seeding_total, out.strategy_b.seeding_total);
        let (qa, qb) = (out.strategy_a.quality, out.strategy_b.quality);
        if (qa < qb - SLACK && sa > sb + SLACK) || (qb < qa - SLACK && sb > sa + SLACK) {
            bad.push(format!("case {case}: q = ({qa}, {qb}), S = ({sa}, {sb})"));
        }
    }
    s.violations(8, "lower-quality firm never seeds more", CASES, bad);

    let mut bad = Vec::new();
    for case in 0..CASES {
        let (g, p) = random_instance(&mut r, 10);
        let mut b = random_budgets(&mut r, 12.0);
        if b.k_a < b.k_b {
            std::mem::swap(&mut b.k_a, &mut b.k_b);
        }
        let out = solve_nash(&g, &p, &b).unwrap();
        if out.strategy_b.seeding_total > out.strategy_a.seeding_total + SLACK
            || out.strategy_b.quality > out.strategy_a.quality + SLACK
        {
            bad.push(format!("case {case}"));
        }
    }
    s.violations(8, "larger budget gives more seeding and quality", CASES, bad);

    let mut bad = Vec::new();
    for case in 0..CASES {
        let (g, p) = random_instance(&mut r, 9);
        let kb = r.random_range(0.05..10.0);
        let own: Vec<(f64, f64)> = sweep(0.05, 14.0, 30)
            .map(|ka| {
                let o = solve_nash(&g, &p, &budgets(ka, kb)).unwrap();
                (o.strategy_a.seeding_total, o.strategy_a.quality)
            })
            .collect();
        if !own.windows(2).all(|w| w[1].0 >= w[0].0 - SLACK && w[1].1 >= w[0].1 - SLACK) {
            bad.push(format!("case {case}: own-budget sweep not monotone"));
        }
        let ka = r.random_range(0.3..10.0);
        let at = |kb: f64| solve_nash(&g, &p, &budgets(ka, kb)).unwrap().strategy_a.seeding_total;
        let below: Vec<f64> = sweep(0.05, ka, 15).map(at).collect();
        let above: Vec<f64> = sweep(ka, ka + 12.0, 15).map(at).collect();
        if !below.windows(2).all(|w| w[1] <= w[0] + SLACK) || !above.windows(2).all(|w| w[1] >= w[0] - SLACK) {
            bad.push(format!("case {case}: rival-budget sweep has the wrong shape"));
        }
    }
    s.violations(8, "budget monotonicity sweeps", CASES, bad);

    let mut bad = Vec::new();
    for case in 0..CASES {
        let (g, p) = random_instance(&mut r, 10);
        let v = centrality(&g, &p).unwrap();
        let (q1, q2): (f64, f64) = (r.random_range(0.05..5.0), r.random_range(0.05..5.0));
        let k = r.random_range(0.0..8.0);
        let state = PresetState::neutral(QualityPair { q_a: q1.min(q2), q_b: q1.max(q2) }, g.n(), &p).unwrap();
        let a = allocate_budget(&v, &state, Firm::A, k, 1.0, 1.0, &p).unwrap();
        let b = allocate_budget(&v, &state, Firm::B, k, 1.0, 1.0, &p).unwrap();
        if a.seeding_total > b.seeding_total + SLACK {
            bad.push(format!("case {case}: {} > {}", a.seeding_total, b.seeding_total));
        }
    }
    s.violations(8, "higher quality seeds more at equal budget", CASES, bad);

    let mut bad = Vec::new();
    for case in 0..CASES {
        let (g, p) = random_instance(&mut r, 10);
        let n = g.n();
        let v = centrality(&g, &p).unwrap();
        let (qb, k) = (r.random_range(0.1..4.0), r.random_range(0.5..8.0));
        let seeding = |qa: f64, qb: f64| {
            let state = PresetState::neutral(QualityPair { q_a: qa, q_b: qb }, n, &p).unwrap();
            allocate_budget(&v, &state, Firm::A, k, 1.0, 1.0, &p).unwrap().seeding_total
        };
        let up: Vec<f64> = sweep(0.05, 6.0, 20).map(|qa| seeding(qa, qb)).collect();
        let below: Vec<f64> = sweep(0.05, qb, 15).map(|x| seeding(qb, x)).collect();
        let above: Vec<f64> = sweep(qb, qb + 6.0, 15).map(|x| seeding(qb, x)).collect();
        if !up.windows(2).all(|w| w[1] >= w[0] - SLACK)
            || !below.windows(2).all(|w| w[1] <= w[0] + SLACK)
            || !above.windows(2).all(|w| w[1] >= w[0] - SLACK)
        {
            bad.push(format!("case {case}"));
        }
    }
    s.violations(8, "quality monotonicity sweeps", CASES, bad);

    let (mut bounds, mut domination) = (Vec::new(), Vec::new());
    for case in 0..CASES {
        let (g, p) = random_instance(&mut r, 12);
        let n = g.n();
        let v = centrality(&g, &p).unwrap();
        let (hub, _) = p.star_centralities(n);
        let sum = p.centrality_sum(n);
        if v.max() < p.mean_centrality() - SLACK || v.max() > hub + SLACK || (v.sum() - sum).abs() > SLACK * sum {
            bounds.push(format!("case {case}: max {}, sum {}", v.max(), v.sum()));
        }
        let sorted = v.sorted();
        let hi = max_sequence(n, &p).unwrap();
        let lo = min_sequence(n, &p).unwrap();
        if let Some(l) = (0..n).find(|&l| sorted[l] > hi[l] + SLACK || sorted[l] < lo[l] - SLACK) {
            domination.push(format!("case {case}: rank {}", l + 1));
        }
    }
    s.violations(8, "centrality bounds and sum identity", CASES, bounds);
    s.violations(8, "extremal sequences bound sorted centralities", CASES, domination);
}

/// Largest subset that fits strictly above `v_c` with every other agent at 1.
fn brute_force_count(n: usize, total: f64, v_c: f64) -> usize {
    (0u32..(1 << n))
        .map(|mask| mask.count_ones() as usize)
        .filter(|&m| m == 0 || (m as f64 * v_c + (n - m) as f64) < total)
        .max()
        .unwrap_or(0)
}

fn count_formula(s: &mut Suite) {
    let mut r = rng(9);
    let (mut bad, mut checked, mut skipped) = (Vec::new(), 0, 0);
    for _ in 0..20 {
        let p = random_params(&mut r);
        for n in 2..=8 {
            let (hub, _) = p.star_centralities(n);
            let excess = n as f64 * p.delta / (2.0 * p.beta - p.delta);
            for j in 1..50 {
                let v_c = 1.0 + (hub - 1.0) * j as f64 / 50.0;
                let x = excess / (v_c - 1.0);
                if (x - x.round()).abs() < 1e-9 {
                    skipped += 1;
                    continue;
                }
                let k = max_seeding_capacity_bound(n, &p, v_c, &vec![0.5; n]).unwrap().k;
                let brute = brute_force_count(n, p.centrality_sum(n), v_c);
                if k != brute {
                    bad.push(format!("n = {n}, v_c = {v_c}: formula {k}, brute force {brute}"));
                }
                checked += 1;
            }
        }
    }
    s.violations(9, &format!("closed-form count vs brute force ({skipped} integer points skipped)"), checked, bad);

    let p = ModelParams::unit();
    let v_c = 1.0 + 6.0 * p.delta / (2.0 * p.beta - p.delta) / 2.0;
    let k = max_seeding_capacity_bound(6, &p, v_c, &[0.5; 6]).unwrap().k;
    let brute = brute_force_count(6, p.centrality_sum(6), v_c);
    s.check(
        9,
        "integer point: formula counts one agent more than fits strictly",
        k == 2 && brute == 1,
        format!("formula {k}, brute force {brute}"),
    );
}

fn reproduce_cli(s: &mut Suite) {
    let bin = env!("CARGO_BIN_EXE_netgame");
    let start = Instant::now();
    for which in ["example1", "example2"] {
        let out = Command::new(bin).args(["reproduce", which]).output().expect("run netgame");
        let table = String::from_utf8_lossy(&out.stderr);
        let fails = table.lines().filter(|l| l.trim_end().ends_with("FAIL")).count();
        let rows = table.lines().filter(|l| l.trim_end().ends_with("pass")).count() + fails;
        s.check(
            10,
            format!("reproduce {which}"),
            out.status.success() && fails == 0 && rows > 0,
            format!("exit {:?}, {rows} checks, {fails} failed", out.status.code()),
        );
    }
    s.fast(10, "reproduce runtime", start.elapsed(), Duration::from_secs(10));
}

fn main() -> ExitCode {
    let mut s = Suite::default();
    lambda(&mut s);
    centralities(&mut s);
    symmetric_example(&mut s);
    threshold_example(&mut s);
    solver_oracles(&mut s);
    utility_consistency(&mut s);
    best_response_consistency(&mut s);
    property_suites(&mut s);
    count_formula(&mut s);
    reproduce_cli(&mut s);

    let mut unexpected = 0;
    let mut reds = 0;
    for line in &s.lines {
        let known = KNOWN_RED.iter().find(|(name, _)| *name == line.name);
        let tag = if line.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {:>2}: {} ({})", line.criterion, line.name, line.detail);
        match (line.passed, known) {
            (false, Some((_, why))) => {
                reds += 1;
                println!("       known: {why}");
            }
            (false, None) => unexpected += 1,
            (true, Some(_)) => {
                unexpected += 1;
                println!("       a known-red check passed; update the known list");
            }
            (true, None) => {}
        }
    }
    let total = s.lines.len();
    println!(
        "acceptance: {} of {total} checks pass, {reds} known red, {unexpected} unexpected",
        total - reds - unexpected
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
