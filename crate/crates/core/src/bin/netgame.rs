use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use netgame::allocation::{
    allocate_budget, max_seeding_capacity_bound, regime_classify, seeding_capacity, thresholds,
    Firm, PresetState,
};
use netgame::dynamics::{
    adaptive_horizon, closed_form_utilities, discounted_utilities, simulate, write_trajectory_csv,
    QualityPair, SeedingPair, UtilityMode, SIMULATION_TAIL_TOL,
};
use netgame::equilibrium::{
    solve_nash, solve_nash_iterative, symmetric_nash, water_fill_seeding, BudgetSpec, FirmBudget,
    IterativeConfig,
};
use netgame::extremal::{budget_regime, extremal_centrality, symmetric_seeding_extremes};
use netgame::graph::{closed_form_centrality, load_graph};
use netgame::reproduce::{reproduce, Example};
use netgame::{centrality, generate, Error, GraphKind, ModelParams, SocialGraph};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "netgame", version, about = "Quality versus seeding competition on social networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Centrality vector of a graph.
    Centrality {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Consumption trajectory and discounted utilities.
    Simulate {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        qa: f64,
        #[arg(long)]
        qb: f64,
        /// Budgets; when given, each firm seeds (K − c_q q)/c_s units.
        #[arg(long = "Ka", requires = "kb")]
        ka: Option<f64>,
        #[arg(long = "Kb", requires = "ka")]
        kb: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        cs: f64,
        #[arg(long, default_value_t = 1.0)]
        cq: f64,
        /// Horizon; defaults to one where the discounted tail is negligible.
        #[arg(long = "T")]
        horizon: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Equilibrium of the budget game.
    Nash {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        budgets: BudgetArgs,
        #[arg(long, value_enum, default_value_t = Solver::Enumerate)]
        solver: Solver,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Split a budget between seeding and quality at preset qualities.
    Allocate {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        qa: f64,
        #[arg(long)]
        qb: f64,
        #[arg(long)]
        budget: f64,
        #[arg(long, default_value = "a")]
        firm: Firm,
        #[arg(long, default_value_t = 1.0)]
        cs: f64,
        #[arg(long, default_value_t = 1.0)]
        cq: f64,
        /// Comma-separated prior consumption y0 (defaults to zeros).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y0: Option<Vec<f64>>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Extreme centralities and seeding over all graphs on n agents.
    Extremal {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        params: ParamArgs,
        /// Common budget of both firms.
        #[arg(long, visible_alias = "Ka")]
        budget: f64,
        #[arg(long, default_value_t = 1.0)]
        cs: f64,
        #[arg(long, default_value_t = 1.0)]
        cq: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the worked examples.
    Reproduce {
        #[arg(value_parser = ["example1", "example2"])]
        which: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args, Serialize, Clone)]
#[group(required = true, multiple = false, id = "source")]
struct SourceArgs {
    /// Graph file.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Generator: balanced, star, l_star, near_star_one_bidirectional, random.
    #[arg(long)]
    generate: Option<String>,
}

#[derive(Args, Serialize, Clone)]
struct GraphArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, requires = "generate")]
    n: Option<usize>,
    #[arg(long, requires = "generate")]
    l: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize, Clone, Copy)]
struct ParamArgs {
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = netgame::params::DEFAULT_EPSILON)]
    epsilon: f64,
}

#[derive(Args, Serialize, Clone, Copy)]
struct BudgetArgs {
    #[arg(long = "Ka")]
    #[serde(rename = "Ka")]
    ka: f64,
    #[arg(long = "Kb")]
    #[serde(rename = "Kb")]
    kb: f64,
    #[arg(long, default_value_t = 1.0)]
    cs: f64,
    #[arg(long, default_value_t = 1.0)]
    cq: f64,
}

#[derive(Args, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
enum Solver {
    Enumerate,
    Iterative,
    Symmetric,
}

enum Failure {
    Lib(Error),
    ChecksFailed,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

type CliResult = Result<(), Failure>;

impl ParamArgs {
    fn resolve(&self) -> netgame::Result<ModelParams> {
        ModelParams::new(self.alpha, self.beta, self.delta, self.epsilon)
    }
}

impl GraphArgs {
    fn kind(&self) -> netgame::Result<Option<GraphKind>> {
        self.source
            .generate
            .as_deref()
            .map(|name| GraphKind::parse(name, self.l))
            .transpose()
    }

    fn load(&self) -> netgame::Result<SocialGraph> {
        match (&self.source.graph, self.kind()?) {
            (Some(path), _) => load_graph(path),
            (None, Some(kind)) => {
                let n = self
                    .n
                    .ok_or_else(|| Error::InvalidInput("--generate requires --n".into()))?;
                generate(kind, n, self.seed)
            }
            (None, None) => Err(Error::InvalidInput("no graph source".into())),
        }
    }
}

fn sink(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit_json<C: Serialize, R: Serialize>(
    output: &OutputArgs,
    command: &str,
    config: &C,
    result: &R,
) -> CliResult {
    let doc = json!({
        "schema": SCHEMA,
        "command": command,
        "config": config,
        "result": result,
    });
    let mut w = sink(&output.out)?;
    serde_json::to_writer_pretty(&mut w, &doc).map_err(Error::from)?;
    writeln!(w)?;
    Ok(())
}

fn emit_csv(output: &OutputArgs, header: &[&str], rows: Vec<Vec<String>>) -> CliResult {
    let mut w = csv::Writer::from_writer(sink(&output.out)?);
    w.write_record(header).map_err(Error::from)?;
    for row in rows {
        w.write_record(&row).map_err(Error::from)?;
    }
    w.flush()?;
    Ok(())
}

fn per_agent(columns: &[&[f64]]) -> Vec<Vec<String>> {
    let n = columns.first().map_or(0, |c| c.len());
    (0..n)
        .map(|i| {
            std::iter::once(i.to_string())
                .chain(columns.iter().map(|c| c[i].to_string()))
                .collect()
        })
        .collect()
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Centrality {
            graph,
            params,
            output,
        } => {
            let p = params.resolve()?;
            let g = graph.load()?;
            let v = centrality(&g, &p)?;
            let closed_form = match graph.kind()? {
                Some(kind) if kind != GraphKind::Random => closed_form_centrality(kind, g.n(), &p)
                    .ok()
                    .map(|roles| (roles, roles.expand(kind, g.n()))),
                _ => None,
            };
            if output.format == Format::Csv {
                let mut header = vec!["agent", "centrality"];
                let expanded = closed_form.as_ref().map(|(_, e)| e.clone());
                let rows = match &expanded {
                    Some(e) => {
                        header.push("closed_form");
                        per_agent(&[&v.values, e])
                    }
                    None => per_agent(&[&v.values]),
                };
                return emit_csv(&output, &header, rows);
            }
            let max_gap = closed_form.as_ref().map(|(_, e)| {
                e.iter()
                    .zip(&v.values)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            });
            let result = json!({
                "n": g.n(),
                "values": v.values,
                "order": v.order,
                "sum": v.sum(),
                "expected_sum": p.centrality_sum(g.n()),
                "closed_form": closed_form.as_ref().map(|(roles, _)| roles),
                "closed_form_max_gap": max_gap,
            });
            emit_json(&output, "centrality", &json!({"graph": graph, "params": p}), &result)
        }
        Command::Simulate {
            graph,
            params,
            qa,
            qb,
            ka,
            kb,
            cs,
            cq,
            horizon,
            output,
        } => {
            let p = params.resolve()?;
            let g = graph.load()?;
            let q = QualityPair::new(qa, qb, &p)?;
            let seeding = match (ka, kb) {
                (Some(ka), Some(kb)) => {
                    let v = centrality(&g, &p)?;
                    let fill = |k: f64, q: f64| -> netgame::Result<Vec<f64>> {
                        let budget = FirmBudget::new(k, cs, cq);
                        budget.validate(&p)?;
                        let s = budget.seeding_for(q);
                        if s < -1e-12 {
                            return Err(Error::InvalidInput(format!(
                                "quality {q} costs more than budget {k}"
                            )));
                        }
                        Ok(water_fill_seeding(&v, s.max(0.0))?.seeding)
                    };
                    SeedingPair::new(fill(ka, qa)?, fill(kb, qb)?)?
                }
                _ => SeedingPair::zeros(g.n()),
            };
            let horizon =
                horizon.unwrap_or_else(|| adaptive_horizon(g.n(), &p, SIMULATION_TAIL_TOL));
            let y0 = seeding.initial_state()?;
            let trajectory = simulate(&g, &p, &q, &y0, horizon)?;
            if output.format == Format::Csv {
                write_trajectory_csv(&trajectory, sink(&output.out)?)?;
                return Ok(());
            }
            let simulated = discounted_utilities(
                &g,
                &p,
                &q,
                &seeding,
                UtilityMode::Simulated {
                    horizon: Some(horizon),
                },
            )?;
            let closed = closed_form_utilities(&centrality(&g, &p)?, &p, &q, &seeding);
            let states: Vec<&Vec<f64>> = trajectory.iter().map(|s| &s.y).collect();
            let result = json!({
                "horizon": horizon,
                "seeding": seeding,
                "trajectory": states,
                "simulated_utilities": simulated,
                "closed_form_utilities": closed,
            });
            let config = json!({
                "graph": graph, "params": p, "qa": qa, "qb": qb,
                "Ka": ka, "Kb": kb, "cs": cs, "cq": cq, "T": horizon,
            });
            emit_json(&output, "simulate", &config, &result)
        }
        Command::Nash {
            graph,
            params,
            budgets,
            solver,
            output,
        } => {
            let p = params.resolve()?;
            let g = graph.load()?;
            let spec = BudgetSpec {
                k_a: budgets.ka,
                k_b: budgets.kb,
                c_s: budgets.cs,
                c_q: budgets.cq,
            };
            let outcome = match solver {
                Solver::Enumerate => solve_nash(&g, &p, &spec)?,
                Solver::Iterative => solve_nash_iterative(&g, &p, &spec, &IterativeConfig::default())?,
                Solver::Symmetric => {
                    if spec.k_a != spec.k_b {
                        return Err(Error::InvalidInput(
                            "the symmetric solver needs --Ka equal to --Kb".into(),
                        )
                        .into());
                    }
                    symmetric_nash(&g, &p, spec.k_a, spec.c_s, spec.c_q)?
                }
            };
            if output.format == Format::Csv {
                let rows = per_agent(&[&outcome.strategy_a.seeding, &outcome.strategy_b.seeding]);
                return emit_csv(&output, &["agent", "seeding_a", "seeding_b"], rows);
            }
            let config = json!({"graph": graph, "params": p, "budgets": budgets, "solver": solver});
            emit_json(&output, "nash", &config, &outcome)
        }
        Command::Allocate {
            graph,
            params,
            qa,
            qb,
            budget,
            firm,
            cs,
            cq,
            y0,
            output,
        } => {
            let p = params.resolve()?;
            let g = graph.load()?;
            let v = centrality(&g, &p)?;
            let q = QualityPair::new(qa, qb, &p)?;
            let y0 = y0.unwrap_or_else(|| vec![0.0; g.n()]);
            let state = PresetState::new(q, y0, &p)?;
            let alloc = allocate_budget(&v, &state, firm, budget, cs, cq, &p)?;
            if output.format == Format::Csv {
                return emit_csv(&output, &["agent", "seeding"], per_agent(&[&alloc.seeding]));
            }
            let capacity = seeding_capacity(&v, &state, firm, &p, cs, cq)?;
            let v_c = alloc.threshold;
            let bound = max_seeding_capacity_bound(g.n(), &p, v_c, state.capacity(firm)).ok();
            let result = json!({
                "thresholds": thresholds(&q, &p, g.n(), cs, cq),
                "allocation": alloc,
                "seeding_capacity": capacity,
                "capacity_bound": bound,
                "regime": regime_classify(v_c, g.n(), &p)?,
            });
            let config = json!({
                "graph": graph, "params": p, "qa": qa, "qb": qb, "budget": budget,
                "firm": firm, "cs": cs, "cq": cq, "y0": state.y0,
            });
            emit_json(&output, "allocate", &config, &result)
        }
        Command::Extremal {
            n,
            params,
            budget,
            cs,
            cq,
            output,
        } => {
            let p = params.resolve()?;
            let levels = (1..=n)
                .map(|l| extremal_centrality(l, n, &p))
                .collect::<netgame::Result<Vec<_>>>()?;
            if output.format == Format::Csv {
                let rows = levels
                    .iter()
                    .map(|e| vec![e.l.to_string(), e.v_max.to_string(), e.v_min.to_string()])
                    .collect();
                return emit_csv(&output, &["l", "v_max", "v_min"], rows);
            }
            let extremes = symmetric_seeding_extremes(n, &p, budget, cs, cq)?;
            let result = json!({
                "centrality_bounds": levels,
                "seeding": extremes,
                "budget_regime": budget_regime(n, &p, budget, cs)?,
            });
            let config = json!({"n": n, "params": p, "budget": budget, "cs": cs, "cq": cq});
            emit_json(&output, "extremal", &config, &result)
        }
        Command::Reproduce { which, output } => {
            let example: Example = which.parse()?;
            let report = reproduce(example)?;
            match output.format {
                Format::Json => {
                    let result = json!({"all_passed": report.all_passed(), "checks": report.checks});
                    emit_json(&output, "reproduce", &json!({"example": example}), &result)?;
                }
                Format::Csv => {
                    let rows = report
                        .checks
                        .iter()
                        .map(|c| {
                            vec![
                                c.name.clone(),
                                c.expected.to_string(),
                                c.computed.to_string(),
                                c.tol.to_string(),
                                c.passed.to_string(),
                            ]
                        })
                        .collect();
                    emit_csv(&output, &["check", "expected", "computed", "tol", "passed"], rows)?;
                }
            }
            eprint!("{}", report.table());
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::ChecksFailed)
            }
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_validation() {
        3
    } else if e.is_solver_failure() {
        4
    } else {
        5
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("NETGAME_LOG")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ChecksFailed) => {
            eprintln!("error: some checks failed");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

