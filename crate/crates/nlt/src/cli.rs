//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use nlt_core::diffusion::{monte_carlo_influence, rng};
use nlt_core::exact::{exact_indicators_cells, expected_indicator_dag, DEFAULT_CELL_BUDGET};
use nlt_core::network::random_dag;
use nlt_core::optimize::{brute_force_opt, greedy_max, Budget, Evaluator, DEFAULT_SEARCH_LIMIT};
use nlt_core::verify::{
    check_equivalences, check_submodularity, hardness_report, hardness_sweep, random_dag_sweep, search_counterexample,
    Family, Scope, SearchParams, SubmodularityOptions,
};
use nlt_core::{run_nlt, sample_thresholds, Error, InfoNetwork, SeedSets};
use rand::Rng;
use serde_json::{json, Value};

use crate::io::{self, IoError};
use crate::report;

#[derive(Debug, Parser)]
#[command(name = "nlt", version, about = "Non-progressive linear threshold diffusion: evaluation, seeding, verification")]
pub struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Walk recursion, acyclic networks only
    ExactDag,
    /// Threshold-cell integration, any network
    Cells,
    /// Monte-Carlo sampling
    #[value(alias = "monte-carlo")]
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScopeArg {
    FirstArg,
    SecondArg,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    GeneralCycles,
    SelfLoopOnly,
    Acyclic,
}

#[derive(Debug, Args)]
pub struct SeedArgs {
    /// Network file (JSON, or CSV edge list with a .csv extension)
    #[arg(long)]
    pub network: PathBuf,
    /// Transient seeds: comma-separated labels or @file
    #[arg(long, default_value = "")]
    pub transient: String,
    /// Permanent seeds: comma-separated labels or @file
    #[arg(long, default_value = "")]
    pub permanent: String,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, default_value_t = 10)]
    pub horizon: usize,
    #[arg(long, alias = "evaluator", value_enum, default_value_t = Method::ExactDag)]
    pub method: Method,
    /// Monte-Carlo sample count
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Box limit for the cell method
    #[arg(long, default_value_t = DEFAULT_CELL_BUDGET)]
    pub cell_budget: u64,
}

impl EvalArgs {
    fn evaluator(&self) -> Evaluator {
        match self.method {
            Method::ExactDag => Evaluator::ExactDag,
            Method::Cells => Evaluator::Cells {
                budget: self.cell_budget,
            },
            Method::Mc => Evaluator::MonteCarlo {
                samples: self.samples,
                seed: self.seed,
            },
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected influence of a seed pair
    Evaluate {
        #[command(flatten)]
        seeds: SeedArgs,
        #[command(flatten)]
        eval: EvalArgs,
        /// Also write the per-(t, node) expected activity table as CSV (exact methods)
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Choose transient and permanent seeds under a budget
    Optimize {
        #[arg(long)]
        network: PathBuf,
        #[command(flatten)]
        eval: EvalArgs,
        /// Total budget K
        #[arg(long)]
        budget: f64,
        #[arg(long, default_value_t = 1.0)]
        cost_transient: f64,
        #[arg(long, default_value_t = 1.0)]
        cost_permanent: f64,
        /// Re-evaluate only elements whose stale gain could still win
        #[arg(long)]
        lazy: bool,
        /// Exhaustive search instead of greedy
        #[arg(long)]
        exhaustive: bool,
        /// Add wall-clock milliseconds to the report
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the process: one trajectory (--samples 1) or a Monte-Carlo estimate
    Simulate {
        #[command(flatten)]
        seeds: SeedArgs,
        #[arg(long, default_value_t = 10)]
        horizon: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verification reports
    #[command(subcommand)]
    Check(CheckCommand),
}

#[derive(Debug, Subcommand)]
pub enum CheckCommand {
    /// Submodularity and monotonicity of the expected influence
    Submodularity {
        /// Check one network; otherwise sweep random DAGs
        #[arg(long)]
        network: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        random_dags: usize,
        #[arg(long, default_value_t = 7)]
        max_n: usize,
        #[arg(long, default_value_t = 4)]
        max_horizon: usize,
        #[arg(long, value_enum, default_value_t = ScopeArg::Both)]
        scope: ScopeArg,
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for, or re-verify, a non-submodular instance
    Counterexample {
        #[arg(long, value_enum, default_value_t = FamilyArg::GeneralCycles)]
        family: FamilyArg,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, default_value_t = 2)]
        min_horizon: usize,
        #[arg(long, default_value_t = 8)]
        max_horizon: usize,
        /// Random networks tried per node count
        #[arg(long, default_value_t = 20_000)]
        attempts: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200_000)]
        cell_budget: u64,
        /// Re-verify a saved witness instead of searching
        #[arg(long)]
        verify: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Agreement between the process, its path description and the walk
    Equivalence {
        /// Check one network; otherwise sweep random DAGs
        #[arg(long)]
        network: Option<PathBuf>,
        #[arg(long, default_value = "")]
        transient: String,
        #[arg(long, default_value = "")]
        permanent: String,
        #[arg(long, default_value_t = 20)]
        random_dags: usize,
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        #[arg(long, default_value_t = 5)]
        max_horizon: usize,
        #[arg(long, default_value_t = 10)]
        horizon: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Vertex-cover reduction: cover of size k iff k+1 permanent seeds reach n+1
    Hardness {
        /// Undirected graph JSON: {"nodes": [...], "edges": [[u, v], ...]}
        #[arg(long, required_unless_present = "all_graphs")]
        graph: Option<PathBuf>,
        #[arg(long, required_unless_present = "all_graphs")]
        k: Option<usize>,
        /// Every labeled graph up to --max-n vertices and every k
        #[arg(long)]
        all_graphs: bool,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failed run and its exit code.
#[derive(Debug)]
pub enum Failure {
    Io(IoError),
    Core(Error),
    Write(String, std::io::Error),
    /// The report was produced but records a failure.
    Check,
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Check => 1,
            Failure::Io(_) | Failure::Write(..) => 2,
            Failure::Core(e) => match e {
                Error::CyclicNetwork { .. } => 3,
                Error::UnknownNode(_)
                | Error::VoidInSeedSet
                | Error::VoidInPermanentSet
                | Error::CandidateAlreadySeeded(_) => 4,
                Error::CellBudgetExceeded { .. } | Error::SearchBudgetExceeded { .. } => 5,
                Error::NotFound => 1,
                _ => 2,
            },
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Io(e) => write!(f, "{e}"),
            Failure::Core(Error::NotFound) => write!(f, "search exhausted without a witness"),
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Write(p, e) => write!(f, "cannot write {p}: {e}"),
            Failure::Check => write!(f, "check failed"),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Network(e) => Failure::Io(IoError::Network(e)),
            e => Failure::Io(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<(), Failure>;

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Write(p.display().to_string(), e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(out: Option<&Path>, value: &Value) -> Outcome {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    emit(out, &text)
}

fn load_seeds(net: &InfoNetwork, transient: &str, permanent: &str) -> Result<SeedSets, Failure> {
    let t = io::parse_label_list(transient)?;
    let p = io::parse_label_list(permanent)?;
    Ok(SeedSets::from_labels(net, &t, &p)?)
}

fn labels(net: &InfoNetwork, nodes: &[nlt_core::NodeId]) -> Vec<String> {
    nodes.iter().map(|&v| net.label(v).to_string()).collect()
}

fn positive_horizon(h: usize) -> Result<(), Failure> {
    if h == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()).into());
    }
    Ok(())
}

fn evaluate(seeds: &SeedArgs, eval: &EvalArgs, table: Option<&Path>, out: Option<&Path>) -> Outcome {
    let net = io::read_network(&seeds.network)?;
    let evaluator = eval.evaluator();
    evaluator.check(&net)?;
    let s = load_seeds(&net, &seeds.transient, &seeds.permanent)?;
    positive_horizon(eval.horizon)?;
    info!("evaluating with {} over horizon {}", evaluator.tag(), eval.horizon);
    let mut doc = json!({
        "evaluator": evaluator.tag(),
        "horizon": eval.horizon,
        "transient": labels(&net, s.transient()),
        "permanent": labels(&net, s.permanent()),
    });
    let exact_table = match eval.method {
        Method::ExactDag => Some(expected_indicator_dag(&net, &s, eval.horizon)?),
        Method::Cells => {
            let c = exact_indicators_cells(&net, &s, eval.horizon, eval.cell_budget)?;
            doc["cells"] = json!(c.cells);
            Some(c.table)
        }
        Method::Mc => {
            let e = monte_carlo_influence(&net, &s, eval.horizon, eval.samples, eval.seed)?;
            doc["value"] = json!(e.mean);
            doc["stderr"] = json!(e.stderr);
            doc["samples"] = json!(e.samples);
            doc["seed"] = json!(e.seed);
            None
        }
    };
    if let Some(t) = &exact_table {
        doc["value"] = json!(t.influence(&net));
        if let Some(path) = table {
            emit(Some(path), &io::reach_table_csv(&net, t))?;
        }
    }
    emit_json(out, &doc)
}

#[allow(clippy::too_many_arguments)]
fn optimize(
    network: &Path,
    eval: &EvalArgs,
    budget: f64,
    cost_transient: f64,
    cost_permanent: f64,
    lazy: bool,
    exhaustive: bool,
    timing: bool,
    out: Option<&Path>,
) -> Outcome {
    let start = Instant::now();
    let net = io::read_network(network)?;
    let evaluator = eval.evaluator();
    evaluator.check(&net)?;
    positive_horizon(eval.horizon)?;
    let b = Budget::new(budget, cost_transient, cost_permanent)?;
    let sol = if exhaustive {
        brute_force_opt(&net, b, eval.horizon, evaluator, DEFAULT_SEARCH_LIMIT)?
    } else {
        greedy_max(&net, b, eval.horizon, evaluator, lazy)?
    };
    let mut doc = report::solution_json(&net, &sol);
    doc["horizon"] = json!(eval.horizon);
    doc["budget"] = json!(budget);
    doc["cost_transient"] = json!(cost_transient);
    doc["cost_permanent"] = json!(cost_permanent);
    doc["lazy"] = json!(lazy);
    doc["exhaustive"] = json!(exhaustive);
    if evaluator.tag() == "monte-carlo" {
        doc["samples"] = json!(eval.samples);
        doc["seed"] = json!(eval.seed);
    }
    if timing {
        doc["wall_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    emit_json(out, &doc)
}

fn simulate(seeds: &SeedArgs, horizon: usize, samples: usize, seed: u64, out: Option<&Path>) -> Outcome {
    let net = io::read_network(&seeds.network)?;
    let s = load_seeds(&net, &seeds.transient, &seeds.permanent)?;
    positive_horizon(horizon)?;
    if samples <= 1 {
        let theta = sample_thresholds(&net, seed);
        let traj = run_nlt(&net, &s, &theta, horizon)?;
        emit(out, &io::trajectory_csv(&net, &traj))
    } else {
        let e = monte_carlo_influence(&net, &s, horizon, samples, seed)?;
        emit_json(out, &report::estimate_json(&e, horizon))
    }
}

fn finish(passed: bool) -> Outcome {
    if passed {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn check(cmd: &CheckCommand) -> Outcome {
    match cmd {
        CheckCommand::Submodularity {
            network,
            random_dags,
            max_n,
            max_horizon,
            scope,
            eval,
            out,
        } => {
            let scope = match scope {
                ScopeArg::FirstArg => Scope::FirstArg,
                ScopeArg::SecondArg => Scope::SecondArg,
                ScopeArg::Both => Scope::Both,
            };
            match network {
                Some(path) => {
                    let net = io::read_network(path)?;
                    let evaluator = eval.evaluator();
                    evaluator.check(&net)?;
                    let mut opts = SubmodularityOptions::new(scope);
                    opts.seed = eval.seed;
                    let rep = check_submodularity(&net, eval.horizon, evaluator, &opts)?;
                    emit_json(out.as_deref(), &report::submodularity_json(&net, &rep))?;
                    finish(rep.passed())
                }
                None => {
                    let rep = random_dag_sweep(*random_dags, *max_n, *max_horizon, scope, eval.seed)?;
                    emit_json(out.as_deref(), &report::sweep_json(&rep))?;
                    finish(rep.passed())
                }
            }
        }
        CheckCommand::Counterexample {
            family,
            max_n,
            min_horizon,
            max_horizon,
            attempts,
            seed,
            cell_budget,
            verify,
            out,
        } => {
            if let Some(path) = verify {
                let text = fs::read_to_string(path).map_err(|source| IoError::Read {
                    path: path.display().to_string(),
                    source,
                })?;
                let r = report::reverify_counterexample(&text, (*cell_budget).max(DEFAULT_CELL_BUDGET))?;
                emit_json(out.as_deref(), &r.to_json())?;
                return finish(r.passed());
            }
            let mut p = SearchParams::new(match family {
                FamilyArg::GeneralCycles => Family::GeneralCycles,
                FamilyArg::SelfLoopOnly => Family::SelfLoopOnly,
                FamilyArg::Acyclic => Family::Acyclic,
            });
            p.max_nodes = *max_n;
            p.horizons = (*min_horizon, *max_horizon);
            p.attempts = *attempts;
            p.seed = *seed;
            p.cell_budget = *cell_budget;
            info!("searching {} networks up to {} nodes", p.family.tag(), p.max_nodes);
            let ce = search_counterexample(&p)?;
            emit_json(out.as_deref(), &report::counterexample_json(&ce))
        }
        CheckCommand::Equivalence {
            network,
            transient,
            permanent,
            random_dags,
            max_n,
            max_horizon,
            horizon,
            samples,
            seed,
            out,
        } => match network {
            Some(path) => {
                let net = io::read_network(path)?;
                let s = load_seeds(&net, transient, permanent)?;
                let rep = check_equivalences(&net, &s, *horizon, *samples, *seed)?;
                emit_json(out.as_deref(), &report::equivalence_json(&rep))?;
                finish(rep.passed())
            }
            None => {
                let mut reports = Vec::new();
                let mut passed = true;
                for i in 0..*random_dags {
                    let (net, s, h) = random_instance(*max_n, *max_horizon, rng::sub_seed(*seed, i as u64));
                    let rep = check_equivalences(&net, &s, h, *samples, rng::sub_seed(*seed ^ 1, i as u64))?;
                    passed &= rep.passed();
                    let mut doc = report::equivalence_json(&rep);
                    doc["instance"] = json!(i);
                    doc["nodes"] = json!(net.node_count() - 1);
                    reports.push(doc);
                }
                emit_json(
                    out.as_deref(),
                    &json!({ "instances": reports, "seed": seed, "passed": passed }),
                )?;
                finish(passed)
            }
        },
        CheckCommand::Hardness {
            graph,
            k,
            all_graphs,
            max_n,
            out,
        } => {
            if *all_graphs {
                let sweep = hardness_sweep(*max_n)?;
                emit_json(out.as_deref(), &report::hardness_sweep_json(&sweep))?;
                return finish(sweep.passed());
            }
            let (Some(path), Some(k)) = (graph, k) else {
                return Err(Error::InvalidArgument("--graph and --k are required".into()).into());
            };
            let g = io::read_graph(path)?;
            let rep = hardness_report(&g, *k)?;
            emit_json(out.as_deref(), &report::hardness_json(g.labels(), &rep))?;
            finish(rep.consistent)
        }
    }
}

/// A random DAG with random transient and permanent seeds and horizon.
pub fn random_instance(max_n: usize, max_horizon: usize, seed: u64) -> (InfoNetwork, SeedSets, usize) {
    let mut r = rng::stream(seed);
    let n = r.random_range(2..=max_n.max(2));
    let net = random_dag(&mut r, n, 2 * n);
    let mut t = Vec::new();
    let mut p = Vec::new();
    for v in net.non_void_nodes() {
        match r.random_range(0..10) {
            0..=2 => t.push(v),
            3 | 4 => p.push(v),
            _ => {}
        }
    }
    let seeds = SeedSets::new(&net, t, p).expect("generated seeds are valid");
    (net, seeds, r.random_range(1..=max_horizon.max(1)))
}

pub fn run(cli: &Cli) -> Outcome {
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already configured: {e}");
        }
    }
    match &cli.command {
        Command::Evaluate { seeds, eval, table, out } => evaluate(seeds, eval, table.as_deref(), out.as_deref()),
        Command::Optimize {
            network,
            eval,
            budget,
            cost_transient,
            cost_permanent,
            lazy,
            exhaustive,
            timing,
            out,
        } => optimize(
            network,
            eval,
            *budget,
            *cost_transient,
            *cost_permanent,
            *lazy,
            *exhaustive,
            *timing,
            out.as_deref(),
        ),
        Command::Simulate {
            seeds,
            horizon,
            samples,
            seed,
            out,
        } => simulate(seeds, *horizon, *samples, *seed, out.as_deref()),
        Command::Check(c) => check(c),
    }
}
