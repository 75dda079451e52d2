//! `kappa`: batch frontend for kappa-core.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage error, 3 input that
//! violates a schema, 4 I/O failure. Errors are reported as JSON on stderr.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use kappa_core::{
    annihilator, axiom_suite, build_constraint_set, check_interval_order, cone_feasibility, constrained_fit,
    dual_kappa_norm_sampled, duality_axiom_suite, equivalence_constants, find_representation, kappa_form,
    metric_d_estimate, monotone_project_sup, operator_axiom_suite, polar, rho, rho_L_bracket, rho_bar_estimate,
    rho_tilde_sampled, solve_point_ode, solve_set_ode, verify_representation, ChainFamily, ClosedSet, ConstraintSet,
    Euclidean, FunctionOnT, IntervalOrder, KappaError, Operator, OperatorSet, ProbeFamily, Quadrature, SetTrajectory,
    SolverConfig, SuiteConfig, TestFamily, Vector, VectorField,
};

#[derive(Parser, Debug)]
#[command(
    name = "kappa",
    version,
    about = "Point-to-set kappa-norms, duality, set ODEs and interval orders"
)]
struct Cli {
    /// Write the JSON report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add wall-clock time to the report (the output then differs between runs).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a seeded axiom suite.
    Axioms {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = Suite::Kappa)]
        suite: Suite,
    },
    /// rho(x, B), rho_bar(A, B) or D(A, B) between JSON inputs.
    Distance {
        /// A point (for `--metric rho`) or a set.
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = Metric::D)]
        metric: Metric,
    },
    /// Kappa-form, polar, annihilator, sampled dual norms or equivalence constants.
    Duality {
        #[arg(long)]
        input: PathBuf,
        /// Seed for the default probe family when the input has none.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Conditional operator kappa-norm rho_L(A, S).
    Opnorm {
        #[arg(long)]
        input: PathBuf,
        /// Seed for the default probe family when the input has none.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Point or set-valued ODE from a scenario file.
    Ode {
        #[arg(long)]
        input: PathBuf,
        /// Step size, overriding the scenario.
        #[arg(long)]
        h: Option<f64>,
        /// Final time, overriding the scenario.
        #[arg(long)]
        tend: Option<f64>,
        /// Write the trajectory as CSV (`t,vertex_index,x1,..,xd`).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Interval orders, monotone projection, cone feasibility and slope fits.
    Order {
        #[arg(value_enum)]
        action: OrderAction,
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Suite {
    Kappa,
    Dual,
    Operator,
    All,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
enum Metric {
    #[value(name = "rho")]
    #[serde(rename = "rho")]
    Rho,
    #[value(name = "rhobar")]
    #[serde(rename = "rhobar")]
    RhoBar,
    #[value(name = "D")]
    #[serde(rename = "D")]
    D,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OrderAction {
    Check,
    Represent,
    Project,
    Feasible,
    Fit,
}

enum Failure {
    Usage(String),
    Schema(String),
    Compute(KappaError),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Compute(e) if e.is_validation() || matches!(e, KappaError::InvalidOrder(_)) => 3,
            Failure::Compute(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Schema(_) => 3,
            Failure::Io(_) => 4,
        }
    }

    fn report(&self) -> Value {
        let (kind, message, detail) = match self {
            Failure::Usage(m) => ("usage", m.clone(), Value::Null),
            Failure::Schema(m) => ("schema", m.clone(), Value::Null),
            Failure::Io(m) => ("io", m.clone(), Value::Null),
            Failure::Compute(e) => {
                let detail = match e {
                    KappaError::NoConvergence { history, .. } => json!({ "residual_history": history }),
                    _ => Value::Null,
                };
                (
                    if self.code() == 3 { "schema" } else { "computation" },
                    e.to_string(),
                    detail,
                )
            }
        };
        let mut v = json!({ "error": kind, "message": message, "exit_code": self.code() });
        if !detail.is_null() {
            v["detail"] = detail;
        }
        v
    }
}

impl From<KappaError> for Failure {
    fn from(e: KappaError) -> Self {
        Failure::Compute(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    version: &'static str,
    config: Value,
    results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_s: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let outcome = run(&cli.command).and_then(|(command, config, results)| {
        let report = RunReport {
            command,
            version: env!("CARGO_PKG_VERSION"),
            config,
            results,
            wall_time_s: cli.timing.then(|| start.elapsed().as_secs_f64()),
        };
        emit(&report, cli.out.as_deref())
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!(
                "{}",
                serde_json::to_string(&f.report()).expect("error report serializes")
            );
            ExitCode::from(f.code())
        }
    }
}

fn emit(report: &RunReport, out: Option<&Path>) -> Outcome<()> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| Failure::Io(e.to_string()))?;
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Io(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Io(format!("stdout: {e}")))
        }
    }
}

fn read<T: DeserializeOwned>(path: &Path) -> Outcome<T> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Schema(format!("{}: {e}", path.display())))
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

fn run(cmd: &Command) -> Outcome<(&'static str, Value, Value)> {
    match cmd {
        Command::Axioms {
            seed,
            instances,
            dim,
            suite,
        } => {
            if *dim == 0 {
                return Err(Failure::Usage("--dim must be at least 1".into()));
            }
            let cfg = SuiteConfig::new(*seed, *dim, *instances);
            let reports = match suite {
                Suite::Kappa => vec![axiom_suite(&Euclidean, &cfg)],
                Suite::Dual => vec![duality_axiom_suite(&cfg)],
                Suite::Operator => vec![operator_axiom_suite(&cfg)],
                Suite::All => vec![
                    axiom_suite(&Euclidean, &cfg),
                    duality_axiom_suite(&cfg),
                    operator_axiom_suite(&cfg),
                ],
            };
            let results = if reports.len() == 1 {
                to_value(&reports[0])
            } else {
                to_value(&reports)
            };
            let config = json!({ "seed": seed, "instances": instances, "dim": dim, "suite": suite });
            Ok(("axioms", config, results))
        }
        Command::Distance { a, b, metric } => {
            let set_b: ClosedSet = read(b)?;
            let results = match metric {
                Metric::Rho => {
                    let x: Vector = read(a)?;
                    json!({ "value": rho(&x, &set_b)? })
                }
                Metric::RhoBar => to_value(rho_bar_estimate(&read(a)?, &set_b)?),
                Metric::D => to_value(metric_d_estimate(&read(a)?, &set_b)?),
            };
            let config = json!({ "a": a, "b": b, "metric": metric });
            Ok(("distance", config, results))
        }
        Command::Duality { input, seed } => {
            let inp: DualityInput = read(input)?;
            let results = run_duality(inp, *seed)?;
            Ok(("duality", json!({ "input": input, "seed": seed }), results))
        }
        Command::Opnorm { input, seed } => {
            let inp: OpnormInput = read(input)?;
            let family = match inp.family {
                Some(f) => f,
                None => {
                    let seed =
                        seed.ok_or_else(|| Failure::Usage("--seed is required without an explicit family".into()))?;
                    ProbeFamily::generate(seed, inp.a.dim(), kappa_core::operator::SUITE_PROBES)?
                }
            };
            let bracket = to_value(rho_L_bracket(&inp.a, &inp.s, &family)?);
            let results = json!({
                "value": bracket["coarse"],
                "bracket": bracket,
                "condition_number": inp.a.condition_number(),
                "probes": family.probes().len(),
            });
            Ok(("opnorm", json!({ "input": input, "seed": seed }), results))
        }
        Command::Ode { input, h, tend, csv } => {
            let sc: Scenario = read(input)?;
            let results = run_ode(sc, *h, *tend, csv.as_deref())?;
            Ok((
                "ode",
                json!({ "input": input, "h": h, "tend": tend, "csv": csv }),
                results,
            ))
        }
        Command::Order { action, input } => {
            let results = run_order(*action, input)?;
            Ok(("order", json!({ "action": action, "input": input }), results))
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PointSet {
    x: Vector,
    #[serde(rename = "A")]
    a: ClosedSet,
}

#[derive(Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum DualityInput {
    Form {
        x: Vector,
        #[serde(rename = "A")]
        a: ClosedSet,
        y: Vector,
        #[serde(rename = "B")]
        b: ClosedSet,
    },
    Polar {
        #[serde(rename = "A")]
        a: ClosedSet,
    },
    Annihilator {
        #[serde(rename = "M")]
        m: ClosedSet,
    },
    DualNorm {
        y: Vector,
        #[serde(rename = "B")]
        b: ClosedSet,
        #[serde(default)]
        family: Option<TestFamily>,
    },
    RhoTilde {
        x: Vector,
        #[serde(rename = "A")]
        a: ClosedSet,
        #[serde(default)]
        family: Option<TestFamily>,
    },
    Equivalence {
        samples: Vec<PointSet>,
        #[serde(default)]
        family: Option<TestFamily>,
    },
}

fn family_or_default(family: Option<TestFamily>, seed: Option<u64>, dim: usize) -> Outcome<TestFamily> {
    match family {
        Some(f) => Ok(f),
        None => {
            let seed = seed.ok_or_else(|| Failure::Usage("--seed is required without an explicit family".into()))?;
            Ok(TestFamily::generate(seed, dim, kappa_core::dual::DEFAULT_PROBES)?)
        }
    }
}

fn run_duality(inp: DualityInput, seed: Option<u64>) -> Outcome<Value> {
    Ok(match inp {
        DualityInput::Form { x, a, y, b } => json!({ "form": kappa_form(&x, &a, &y, &b)? }),
        DualityInput::Polar { a } => json!({ "polar": polar(&a)? }),
        DualityInput::Annihilator { m } => json!({ "annihilator": annihilator(&m)? }),
        DualityInput::DualNorm { y, b, family } => {
            let t = family_or_default(family, seed, y.dim())?;
            json!({ "dual_norm": dual_kappa_norm_sampled(&y, &b, &t)?, "probes": t.probes().len() })
        }
        DualityInput::RhoTilde { x, a, family } => {
            let t = family_or_default(family, seed, x.dim())?;
            json!({ "rho_tilde": rho_tilde_sampled(&x, &a, &t)?, "rho": rho(&x, &a)?, "probes": t.probes().len() })
        }
        DualityInput::Equivalence { samples, family } => {
            let dim = samples
                .first()
                .map(|s| s.x.dim())
                .ok_or_else(|| Failure::Schema("equivalence needs at least one sample".into()))?;
            let t = family_or_default(family, seed, dim)?;
            let pairs: Vec<(Vector, ClosedSet)> = samples.into_iter().map(|s| (s.x, s.a)).collect();
            to_value(equivalence_constants(&pairs, &t)?)
        }
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct OpnormInput {
    #[serde(rename = "A")]
    a: Operator,
    #[serde(rename = "S")]
    s: OperatorSet,
    #[serde(default)]
    family: Option<ProbeFamily>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Scenario {
    field: VectorField,
    #[serde(rename = "A0", default)]
    a0: Option<ClosedSet>,
    #[serde(default)]
    x0: Option<Vector>,
    t_end: f64,
    #[serde(default)]
    h: Option<f64>,
    #[serde(default)]
    picard_tol: Option<f64>,
    #[serde(default)]
    max_picard_iters: Option<usize>,
    #[serde(default)]
    quadrature: Option<Quadrature>,
}

fn run_ode(sc: Scenario, h: Option<f64>, tend: Option<f64>, csv: Option<&Path>) -> Outcome<Value> {
    let mut cfg = SolverConfig::default();
    if let Some(v) = h.or(sc.h) {
        cfg.h = v;
    }
    if let Some(v) = sc.picard_tol {
        cfg.picard_tol = v;
    }
    if let Some(v) = sc.max_picard_iters {
        cfg.max_picard_iters = v;
    }
    if let Some(v) = sc.quadrature {
        cfg.quadrature = v;
    }
    let t_end = tend.unwrap_or(sc.t_end);
    let (results, table) = match (sc.a0, sc.x0) {
        (Some(a0), None) => {
            let sol = solve_set_ode(&sc.field, &a0, t_end, &cfg)?;
            let table = sol.trajectory.to_csv(cfg.ball_vertices)?;
            let results = json!({
                "kind": "set",
                "final_time": sol.trajectory.times.last(),
                "final_set": sol.trajectory.last(),
                "nodes": sol.trajectory.times.len(),
                "c_hat": sol.c_hat,
                "segments": sol.segments,
                "hypothesis_warning": sol.hypothesis_warning,
                "solver": cfg,
            });
            (results, table)
        }
        (None, Some(x0)) => {
            let tr = solve_point_ode(&sc.field, &x0, t_end, &cfg)?;
            let sets = tr.states.iter().map(|x| ClosedSet::point(x.clone())).collect();
            let table = SetTrajectory::new(tr.times.clone(), sets)?.to_csv(cfg.ball_vertices)?;
            let results = json!({
                "kind": "point",
                "final_time": tr.times.last(),
                "final_state": tr.last(),
                "nodes": tr.times.len(),
                "iterations": tr.iterations,
                "residual": tr.residual,
                "solver": cfg,
            });
            (results, table)
        }
        _ => {
            return Err(Failure::Schema(
                "a scenario needs exactly one of \"A0\" and \"x0\"".into(),
            ))
        }
    };
    if let Some(p) = csv {
        fs::write(p, table).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(results)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectInput {
    function: FunctionOnT,
    chains: ChainFamily,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FeasibleInput {
    chains: ChainFamily,
    #[serde(default)]
    constraints: Option<ConstraintSet>,
    #[serde(default)]
    function: Option<FunctionOnT>,
    #[serde(default)]
    radii: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FitInput {
    function: FunctionOnT,
    positions: BTreeMap<String, f64>,
    #[serde(rename = "C1")]
    c1: f64,
    #[serde(rename = "C2")]
    c2: f64,
}

fn run_order(action: OrderAction, input: &Path) -> Outcome<Value> {
    Ok(match action {
        OrderAction::Check => {
            let p: IntervalOrder = read(input)?;
            let witness = p
                .two_plus_two()
                .map(|(a, b, c, d)| [a, b, c, d].map(|i| p.elements()[i].clone()));
            json!({ "interval_order": check_interval_order(&p), "two_plus_two": witness })
        }
        OrderAction::Represent => {
            let p: IntervalOrder = read(input)?;
            let r = find_representation(&p)?;
            let check = verify_representation(&p, &r)?;
            json!({ "representation": r, "verification": check })
        }
        OrderAction::Project => {
            let inp: ProjectInput = read(input)?;
            to_value(monotone_project_sup(&inp.function, &inp.chains)?)
        }
        OrderAction::Feasible => {
            let inp: FeasibleInput = read(input)?;
            let c = match (inp.constraints, inp.function, inp.radii) {
                (Some(c), None, None) => c,
                (None, Some(f), Some(r)) => build_constraint_set(&f, &inp.chains, &r)?,
                _ => {
                    return Err(Failure::Schema(
                        "give either \"constraints\" or both \"function\" and \"radii\"".into(),
                    ))
                }
            };
            to_value(cone_feasibility(&c, &inp.chains)?)
        }
        OrderAction::Fit => {
            let inp: FitInput = read(input)?;
            to_value(constrained_fit(&inp.function, &inp.positions, inp.c1, inp.c2)?)
        }
    })
}
