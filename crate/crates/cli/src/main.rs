//! `anneal`: estimate partition-function ratios, build cooling schedules,
//! and compute exact reference values for small instances.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anneal::models::random_cluster::ising_rc_identity_check;
use anneal::models::{self, oracle_from_glauber, Instance, SpinModelSpec};
use anneal::schedule::curvature_bound;
use anneal::schedules::{pseudo_tpa, static_schedule, tpa_union};
use anneal::{
    estimate, median_boost, Algorithm, Beta, Bounds, Error, EstimatorOptions, GibbsOracle, GrossGibbsModel,
    Schedule, ScheduleDiagnostics,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "anneal", version, about = "Annealing estimators for Gibbs partition functions")]
struct Cli {
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true, env = "ANNEAL_WORKERS")]
    workers: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate ln Q = ln Z(β_max)/Z(β_min) and report JSON.
    Estimate(EstimateArgs),
    /// Build a cooling schedule, with diagnostics when a model is known.
    Schedule(ScheduleArgs),
    /// Exact reference values by enumeration.
    Exact(SourceArgs),
}

#[derive(Args, Debug, Clone)]
struct SourceArgs {
    /// Built-in instance name.
    #[arg(long)]
    model: Option<String>,
    /// Histogram file of `x log_c` lines.
    #[arg(long)]
    histogram: Option<PathBuf>,
    /// Edge-list graph file; requires --spec.
    #[arg(long, requires = "spec")]
    graph: Option<PathBuf>,
    /// Key-value model spec file; requires --graph.
    #[arg(long, requires = "graph")]
    spec: Option<PathBuf>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    h: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    beta_min: Option<Beta>,
    #[arg(long, allow_hyphen_values = true)]
    beta_max: Option<Beta>,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Static)]
    algorithm: AlgorithmArg,
    #[arg(long)]
    eps: f64,
    /// Failure probability; enables median boosting.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    kappa_cap: Option<f64>,
    /// Run even when the per-segment sample count is impractically large.
    #[arg(long)]
    allow_infeasible: bool,
    #[arg(long, value_enum, default_value_t = OracleArg::Exact)]
    oracle: OracleArg,
    #[arg(long)]
    steps_per_sample: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScheduleArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long, value_enum, default_value_t = ScheduleKind::Static)]
    algorithm: ScheduleKind,
    /// Defaults to 1/(4 ln max(h, 2)).
    #[arg(long)]
    theta: Option<f64>,
    /// TPA runs for `--algorithm tpa`; defaults to ⌈2/θ⌉.
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Schedule file to write; printed to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum AlgorithmArg {
    Static,
    ThreeRound,
    Tpa,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScheduleKind {
    Static,
    Tpa,
    PseudoTpa,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum OracleArg {
    Exact,
    Glauber,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Static => Algorithm::Static,
            AlgorithmArg::ThreeRound => Algorithm::ThreeRound,
            AlgorithmArg::Tpa => Algorithm::Tpa,
        }
    }
}

/// Failure modes mapped to exit codes.
enum Failure {
    Infeasible(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible { k } => Failure::Infeasible(format!(
                "per-segment sample count {k:.4e} is infeasible; lower --kappa-cap or pass --allow-infeasible"
            )),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn input(msg: impl Into<String>) -> Failure {
    Failure::Input(msg.into())
}

/// A resolved model source.
struct Source {
    instance: Option<Instance>,
    model: Option<GrossGibbsModel>,
    bounds: Option<Bounds>,
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn resolve(args: &SourceArgs, need_model: bool) -> Result<Source, Failure> {
    let given = [args.model.is_some(), args.histogram.is_some(), args.graph.is_some()];
    if given.iter().filter(|&&b| b).count() > 1 {
        return Err(input("give exactly one of --model, --histogram, or --graph/--spec"));
    }
    let instance = if let Some(name) = &args.model {
        Some(models::named_instance(name)?)
    } else if let (Some(g), Some(s)) = (&args.graph, &args.spec) {
        let graph = models::Graph::parse(&read(g)?)?;
        let spec = anneal::io::parse_spec(&read(s)?, &graph)?;
        Some(Instance::new(graph, spec)?)
    } else {
        None
    };
    let model = match (&instance, &args.histogram) {
        (Some(inst), _) if need_model => Some(inst.gross_model()?),
        (_, Some(path)) => Some(anneal::io::parse_histogram(&read(path)?)?),
        _ => None,
    };
    let base = match &instance {
        Some(inst) => Some(inst.bounds()?),
        None => None,
    };
    let beta_min = args.beta_min.or(base.map(|b| b.beta_min)).unwrap_or(Beta::NEG_INFINITY);
    let beta_max = args.beta_max.or(base.map(|b| b.beta_max));
    let bounds = match beta_max {
        None => None,
        Some(beta_max) => {
            let exact = match (&model, args.q.or(base.map(|b| b.q)), args.h.or(base.map(|b| b.h))) {
                (Some(m), None, _) | (Some(m), _, None) => Some(Bounds::exact(m, beta_min, beta_max)?),
                _ => None,
            };
            let q = args.q.or(base.map(|b| b.q)).or(exact.map(|b| b.q));
            let h = args.h.or(base.map(|b| b.h)).or(exact.map(|b| b.h));
            match (q, h) {
                (Some(q), Some(h)) => Some(Bounds::new(q, h, beta_min, beta_max)?),
                _ => return Err(input("--q and --h are required without a model")),
            }
        }
    };
    Ok(Source {
        instance,
        model,
        bounds,
    })
}

fn emit(value: &Value, out: &Option<PathBuf>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("json") + "\n";
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_estimate(args: &EstimateArgs) -> Result<(), Failure> {
    if !(args.eps > 0.0 && args.eps < 0.5) {
        return Err(input(format!("--eps must lie in (0, 1/2), got {}", args.eps)));
    }
    let use_glauber = args.oracle == OracleArg::Glauber;
    let src = resolve(&args.source, !use_glauber)?;
    let bounds = src.bounds.ok_or_else(|| input("--beta-max is required for a histogram model"))?;
    let algorithm: Algorithm = args.algorithm.into();
    let mut opts = EstimatorOptions {
        allow_infeasible: args.allow_infeasible,
        ..Default::default()
    };
    if let Some(k) = args.kappa_cap {
        opts.kappa_cap = k;
    }
    let oracle: Box<dyn GibbsOracle> = if use_glauber {
        let inst = src
            .instance
            .clone()
            .ok_or_else(|| input("--oracle glauber needs --model or --graph/--spec"))?;
        let steps = args
            .steps_per_sample
            .unwrap_or_else(|| models::glauber::default_steps(inst.model.sites(&inst.graph)));
        Box::new(oracle_from_glauber(inst.graph, inst.model, steps, args.seed)?)
    } else {
        let model = src.model.clone().ok_or_else(|| input("no model to sample from"))?;
        Box::new(anneal::make_exact_oracle(model, args.seed))
    };
    let oracle = oracle.as_ref();
    let report = match args.delta {
        None => estimate(oracle, algorithm, &bounds, args.eps, args.seed, &opts)?,
        Some(delta) => median_boost(|s| estimate(oracle, algorithm, &bounds, args.eps, s, &opts), delta, args.seed)?,
    };
    let mut value = serde_json::to_value(&report).expect("report");
    value["oracle_draws"] = json!(oracle.draws());
    let log_c0 = match (&src.model, &src.instance) {
        (Some(m), _) => m.log_c0(),
        (None, Some(inst)) => inst.gross_model().ok().and_then(|m| m.log_c0()),
        _ => None,
    };
    if let Some(c0) = log_c0.filter(|_| bounds.beta_min.is_neg_infinite()) {
        let lz = match &src.instance {
            Some(inst) => inst.log_partition_from_log_q(report.log_q_hat, c0),
            None => report.log_q_hat + c0,
        };
        value["log_z_hat"] = json!(lz);
    }
    emit(&value, &args.out)
}

fn cmd_schedule(args: &ScheduleArgs) -> Result<(), Failure> {
    let src = resolve(&args.source, true)?;
    let bounds = src.bounds.ok_or_else(|| input("--beta-max is required"))?;
    let theta = args
        .theta
        .unwrap_or_else(|| anneal::pipeline::schedule_theta(&bounds));
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let oracle = src.model.clone().map(|m| anneal::make_exact_oracle(m, args.seed));
    let need_oracle = || oracle.as_ref().ok_or_else(|| input("this schedule needs a model to sample from"));
    let (schedule, rounds): (Schedule, usize) = match args.algorithm {
        ScheduleKind::Static => (static_schedule(&bounds, theta)?, 0),
        ScheduleKind::Tpa => {
            let runs = args.runs.unwrap_or((2.0 / theta).ceil() as usize);
            (tpa_union(need_oracle()?, &bounds, runs, &mut rng)?, 1)
        }
        ScheduleKind::PseudoTpa => (pseudo_tpa(need_oracle()?, &bounds, theta, &mut rng)?.0, 2),
    };
    let text = schedule.to_text();
    let mut diag = json!({ "length": schedule.len(), "theta": theta });
    if let Some(model) = &src.model {
        let used = oracle.as_ref().map_or(0, |o| o.draws());
        let d = ScheduleDiagnostics::compute(&schedule, model, used, rounds)?;
        let h = model.mean_hamiltonian(bounds.beta_max)?.max(2.0);
        let bound = curvature_bound(d.maxwidth, h);
        diag = serde_json::to_value(d).expect("diagnostics");
        diag["theta"] = json!(theta);
        diag["curvature_bound"] = json!(bound);
        diag["bound_holds"] = json!(d.maxwidth > 1.0 || d.curvature <= bound + 1e-9);
    }
    match &args.out {
        Some(path) => {
            fs::write(path, &text)?;
            println!("{}", serde_json::to_string_pretty(&diag).expect("json"));
        }
        None => {
            print!("{text}");
            eprintln!("{}", serde_json::to_string(&diag).expect("json"));
        }
    }
    Ok(())
}

fn cmd_exact(args: &SourceArgs) -> Result<(), Failure> {
    let src = resolve(args, true)?;
    let model = src.model.as_ref().ok_or_else(|| input("no model given"))?;
    let mut out = json!({
        "support_size": model.support().len(),
        "log_c0": model.log_c0(),
    });
    if let Some(b) = &src.bounds {
        let lq = model.log_ratio(b.beta_min, b.beta_max)?;
        let exact = Bounds::exact(model, b.beta_min, b.beta_max)?;
        out["log_q"] = json!(lq);
        out["bounds"] = json!(b);
        out["exact_q"] = json!(exact.q);
        out["exact_h"] = json!(exact.h);
        out["log_z_max"] = json!(model.log_partition(b.beta_max)?);
    }
    if let Some(inst) = &src.instance {
        out["log_z"] = json!(inst.exact_log_partition()?);
        if let SpinModelSpec::Ising { spec } = &inst.model {
            out["ising_rc_identity"] = json!(ising_rc_identity_check(&inst.graph, spec)?);
            out["marginal_violation"] = json!(models::ising::ising_marginal_bound_check(&inst.graph, spec)?);
        }
    } else if let Some(b) = &src.bounds {
        out["log_z"] = json!(model.log_partition(b.beta_max)?);
    }
    emit(&out, &None)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(w) = cli.workers {
        if rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global().is_err() {
            eprintln!("warning: worker pool already initialized");
        }
    }
    let result = match &cli.cmd {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Schedule(a) => cmd_schedule(a),
        Command::Exact(a) => cmd_exact(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Infeasible(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
