//! `scenerywalk`: phase diagrams, Monte Carlo runs, chemical distances and
//! the acceptance suite from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 refused.

mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{resolve_seed, FileConfig, Format, Grid, ModelKind, Task, Which};
use scenerywalk::calibration::Calibration;
use scenerywalk::chemdist::chemdist_scaling;
use scenerywalk::exponents::{chemdist_exponent, phase_diagram, DiagramKind};
use scenerywalk::montecarlo::{
    chen_verify, level_mean_occupation, lln_check_law, scaling_exponent_estimate_law,
    strategy_lower_bound, tail_prob_scan, LevelOccupationConfig, LocalTimeTail, StrategyConfig,
    TailModel,
};
use scenerywalk::output::{create_new, fmt_f64, write_csv, write_json, Provenance, Table, Tolerance};
use scenerywalk::rng::{derive_seed, purpose, purpose_seed};
use scenerywalk::scenery::SceneryField;
use scenerywalk::verify::{run_suite, SUITES};
use scenerywalk::Error;

#[derive(Parser)]
#[command(name = "scenerywalk", version, about = "Random walks in heavy-tailed random scenery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the tail exponents over (alpha, x) grids.
    Exponents {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        /// Exponent to tabulate; x is rho for p and delta otherwise.
        #[arg(long, value_enum)]
        which: Option<Which>,
    },
    /// Run a Monte Carlo estimator.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Chemical distances to t^delta e1 + t^gamma e2 and their growth exponent.
    Chemdist {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        model: ModelArgs,
        /// Number of independent fields.
        #[arg(long)]
        fields: Option<u64>,
    },
    /// Run acceptance criteria; exit 1 if any fails.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated suite names; all by default.
        #[arg(long, value_delimiter = ',')]
        suite: Option<Vec<String>>,
    },
}

#[derive(Args)]
struct Common {
    /// TOML file with the same keys as the long flags; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed [fallback: SCENERYWALK_SEED, then 0].
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<u64>,
    /// Output file, created once; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ModelArgs {
    /// Tail index: a list `a,b`, `lin:lo:hi:n` or `geom:lo:hi:n`.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    t_grid: Option<String>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, value_enum)]
    task: Option<Task>,
    /// Tail event for `--task tail`.
    #[arg(long, value_enum)]
    model: Option<ModelKind>,
    /// Seed of the fixed field for quenched tasks; defaults to the master seed.
    #[arg(long)]
    field_seed: Option<u64>,
    /// Quantile level for `--task scaling`.
    #[arg(long)]
    quantile: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    k_eps: Option<f64>,
    /// b values for `--task chen`.
    #[arg(long)]
    b: Option<String>,
    /// lambda values for `--task chen`.
    #[arg(long)]
    lambda: Option<String>,
    /// Fields for `--task level`.
    #[arg(long)]
    fields: Option<u64>,
    /// Paths per site for `--task level`.
    #[arg(long)]
    paths: Option<u64>,
    /// Strategy bound that also returns to the origin.
    #[arg(long)]
    bridge: bool,
}

enum Failure {
    Usage(String),
    Refused(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Refused(m) => Failure::Refused(m),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(m: String) -> Self {
        Failure::Usage(m)
    }
}

impl From<&str> for Failure {
    fn from(m: &str) -> Self {
        Failure::Usage(m.into())
    }
}

type Outcome =Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Exponents { common, model, which } => run_exponents(common, model, which),
        Command::Simulate { common, model, sim } => run_simulate(common, model, sim),
        Command::Chemdist { common, model, fields } => run_chemdist(common, model, fields),
        Command::Verify { common, suite } => run_verify(common, suite),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Refused(m)) => {
            eprintln!("refused: {m}");
            ExitCode::from(3)
        }
    }
}

/// Settings shared by every subcommand after merging flags, file and environment.
#[derive(Clone, Debug, Serialize)]
struct Base {
    seed: u64,
    replicas: Option<u64>,
    #[serde(skip)]
    out: Option<PathBuf>,
    format: Format,
}

/// Flag and file values of the model parameters.
struct Model<'a> {
    args: &'a ModelArgs,
    file: &'a FileConfig,
}

impl Model<'_> {
    fn grid(flag: &Option<String>, file: &Option<Grid>, name: &str) -> Result<Option<Vec<f64>>, String> {
        let g = match flag {
            Some(s) => Some(Grid::Text(s.clone())),
            None => file.clone(),
        };
        g.map(|g| g.values().map_err(|e| format!("--{name}: {e}"))).transpose()
    }

    fn required(v: Option<Vec<f64>>, name: &str) -> Result<Vec<f64>, String> {
        v.ok_or_else(|| format!("--{name} is required"))
    }

    fn single(v: Vec<f64>, name: &str) -> Result<f64, String> {
        match v[..] {
            [x] => Ok(x),
            _ => Err(format!("--{name} takes a single value here")),
        }
    }

    fn alphas(&self) -> Result<Vec<f64>, String> {
        Self::required(Self::grid(&self.args.alpha, &self.file.alpha, "alpha")?, "alpha")
    }
    fn alpha(&self) -> Result<f64, String> {
        Self::single(self.alphas()?, "alpha")
    }
    fn rhos(&self) -> Result<Vec<f64>, String> {
        Self::required(Self::grid(&self.args.rho, &self.file.rho, "rho")?, "rho")
    }
    fn deltas(&self) -> Result<Vec<f64>, String> {
        Self::required(Self::grid(&self.args.delta, &self.file.delta, "delta")?, "delta")
    }
    fn t_grid(&self) -> Result<Vec<f64>, String> {
        Self::required(Self::grid(&self.args.t_grid, &self.file.t_grid, "t-grid")?, "t-grid")
    }
    fn dim(&self) -> Result<usize, String> {
        let d = self.args.dim.or(self.file.dim).unwrap_or(1);
        if d == 0 {
            return Err("--dim must be at least 1".into());
        }
        Ok(d)
    }
    fn gamma(&self) -> Option<f64> {
        self.args.gamma.or(self.file.gamma)
    }
}

fn setup(common: &Common) -> Result<(FileConfig, Base), Failure> {
    let file = FileConfig::load(common.config.as_deref())?;
    let base = Base {
        seed: resolve_seed(common.seed, file.seed)?,
        replicas: common.replicas.or(file.replicas),
        out: common.out.clone().or_else(|| file.out.clone()),
        format: common.format.or(file.format).unwrap_or_default(),
    };
    if let Some(out) = &base.out {
        if out.exists() {
            return Err(Failure::Usage(format!(
                "{} already exists; outputs are write-once",
                out.display()
            )));
        }
    }
    if let Some(jobs) = common.jobs.or(file.jobs) {
        if jobs == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?;
    }
    Ok((file, base))
}

fn replicas(base: &Base, default: u64) -> Result<u64, Failure> {
    match base.replicas.unwrap_or(default) {
        0 => Err(Failure::Usage("--replicas must be at least 1".into())),
        n => Ok(n),
    }
}

/// Renders the output in full, then writes it to a new file or stdout.
fn emit<T: Serialize>(
    base: &Base,
    replicas: u64,
    config: &impl Serialize,
    table: &Table,
    data: &T,
    tolerances: &[Tolerance],
) -> Outcome {
    let prov = Provenance::new(base.seed, replicas, config);
    let mut buf = Vec::new();
    match base.format {
        Format::Csv => write_csv(&mut buf, table, &prov)?,
        Format::Json => write_json(&mut buf, data, &prov, tolerances)?,
    }
    match &base.out {
        Some(path) => write_file(path, &buf),
        None => std::io::stdout()
            .lock()
            .write_all(&buf)
            .map_err(|e| Failure::Usage(e.to_string())),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome {
    let mut f = create_new(path)?;
    f.write_all(bytes).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(())
}

fn run_exponents(common: Common, args: ModelArgs, which: Option<Which>) -> Outcome {
    let (file, base) = setup(&common)?;
    let m = Model { args: &args, file: &file };
    let which = which.or(file.which).unwrap_or_default();
    let dim = m.dim()?;
    let alphas = m.alphas()?;
    let (kind, xs) = match which {
        Which::P => (DiagramKind::P, m.rhos()?),
        Which::Q => (DiagramKind::Q, m.deltas()?),
        Which::Displacement => {
            let gamma = m.gamma().ok_or("--gamma is required for the displacement diagram")?;
            (DiagramKind::Displacement { gamma }, m.deltas()?)
        }
    };
    let rows = phase_diagram(&alphas, &xs, kind, dim)?;
    let mut table = Table::new(&["alpha", "x", "value", "regime"]);
    for r in &rows {
        table.push(vec![fmt_f64(Some(r.alpha)), fmt_f64(Some(r.x)), fmt_f64(r.value), r.regime.clone()]);
    }
    #[derive(Serialize)]
    struct Cfg<'a> {
        command: &'static str,
        base: &'a Base,
        kind: DiagramKind,
        dim: usize,
        alpha: &'a [f64],
        x: &'a [f64],
    }
    let cfg = Cfg { command: "exponents", base: &base, kind, dim, alpha: &alphas, x: &xs };
    emit(&base, 0, &cfg, &table, &rows, &[])
}

fn run_chemdist(common: Common, args: ModelArgs, fields: Option<u64>) -> Outcome {
    let (file, base) = setup(&common)?;
    let m = Model { args: &args, file: &file };
    let alpha = m.alpha()?;
    let dim = m.dim()?;
    let delta = Model::single(m.deltas()?, "delta")?;
    let gamma = m.gamma().unwrap_or(0.0);
    let t_grid = m.t_grid()?;
    let n = fields.or(file.fields).unwrap_or(20);
    if n == 0 {
        return Err(Failure::Usage("--fields must be at least 1".into()));
    }
    let predicted = chemdist_exponent(alpha, delta, gamma, dim)?;
    let fs = purpose_seed(base.seed, purpose::FIELD);
    let envs = (0..n)
        .map(|i| {
            let s = derive_seed(fs, i);
            SceneryField::pareto(alpha, dim, s).map(|f| (s, f))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let res = chemdist_scaling(&envs, delta, gamma, &t_grid)?;
    let mut table = Table::new(&["t", "field_seed", "distance", "slope", "predicted"]);
    for r in &res.rows {
        table.push(vec![
            fmt_f64(Some(r.t)),
            r.seed.to_string(),
            fmt_f64(Some(r.distance)),
            fmt_f64(Some(res.fit.slope)),
            fmt_f64(Some(predicted)),
        ]);
    }
    #[derive(Serialize)]
    struct Cfg<'a> {
        command: &'static str,
        base: &'a Base,
        alpha: f64,
        dim: usize,
        delta: f64,
        gamma: f64,
        t_grid: &'a [f64],
        fields: u64,
    }
    #[derive(Serialize)]
    struct Data<'a> {
        predicted: f64,
        #[serde(flatten)]
        scaling: &'a scenerywalk::chemdist::ChemScaling,
    }
    let cfg = Cfg { command: "chemdist", base: &base, alpha, dim, delta, gamma, t_grid: &t_grid, fields: n };
    emit(&base, n, &cfg, &table, &Data { predicted, scaling: &res }, &[])
}

fn run_verify(common: Common, suite: Option<Vec<String>>) -> Outcome {
    let (file, base) = setup(&common)?;
    let names: Vec<String> = suite
        .or_else(|| file.suite.clone())
        .unwrap_or_else(|| SUITES.iter().map(|s| s.to_string()).collect());
    if names.is_empty() {
        return Err(Failure::Usage("no suite selected".into()));
    }
    if let Some(bad) = names.iter().find(|n| !SUITES.contains(&n.as_str())) {
        return Err(Failure::Usage(format!(
            "unknown suite {bad:?}; known suites: {}",
            SUITES.join(", ")
        )));
    }
    let mut reports = Vec::new();
    for name in &names {
        let r = run_suite(name, base.seed)?;
        eprintln!("{}", r.line());
        reports.push(r);
    }
    let mut table = Table::new(&["id", "name", "passed", "detail"]);
    for r in &reports {
        table.push(vec![r.id.to_string(), r.name.clone(), r.passed.to_string(), r.detail.clone()]);
    }
    let tolerances: Vec<Tolerance> = reports.iter().flat_map(|r| r.tolerances.clone()).collect();
    #[derive(Serialize)]
    struct Cfg<'a> {
        command: &'static str,
        base: &'a Base,
        suites: &'a [String],
    }
    let cfg = Cfg { command: "verify", base: &base, suites: &names };
    emit(&base, 0, &cfg, &table, &reports, &tolerances)?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failed.join(", ")))
    }
}

#[derive(Serialize)]
struct SimConfig<'a> {
    command: &'static str,
    base: &'a Base,
    task: Task,
    replicas: u64,
    params: serde_json::Value,
}

fn run_simulate(common: Common, args: ModelArgs, sim: SimArgs) -> Outcome {
    let (file, base) = setup(&common)?;
    let m = Model { args: &args, file: &file };
    let task = sim.task.or(file.task).ok_or("--task is required")?;
    let dim = m.dim()?;
    let t_grid = m.t_grid()?;
    if t_grid.iter().any(|&t| t <= 0.0) {
        return Err(Failure::Usage("--t-grid values must be positive".into()));
    }
    let seed = base.seed;
    let field_seed = sim.field_seed.or(file.field_seed).unwrap_or(seed);
    let cal = Calibration::pilot();
    let sim_config = |replicas: u64, params: serde_json::Value| SimConfig {
        command: "simulate",
        base: &base,
        task,
        replicas,
        params,
    };
    match task {
        Task::Lln => {
            let n = replicas(&base, 1000)?;
            let alpha = m.alpha()?;
            let law = file.law.unwrap_or_default();
            let reports = t_grid
                .iter()
                .map(|&t| lln_check_law(law, alpha, dim, t, n, seed))
                .collect::<Result<Vec<_>, _>>()?;
            let mut table = Table::new(&[
                "alpha", "dim", "t", "mean", "stderr", "ci_low", "ci_high", "target", "z_score",
            ]);
            for r in &reports {
                table.push(vec![
                    fmt_f64(Some(r.alpha)),
                    r.dim.to_string(),
                    fmt_f64(Some(r.t)),
                    fmt_f64(Some(r.mean)),
                    fmt_f64(Some(r.stderr)),
                    fmt_f64(Some(r.ci_low)),
                    fmt_f64(Some(r.ci_high)),
                    fmt_f64(Some(r.target)),
                    fmt_f64(Some(r.z_score)),
                ]);
            }
            let cfg = sim_config(n, serde_json::json!({"alpha": alpha, "dim": dim, "t_grid": t_grid, "law": law}));
            emit(&base, n, &cfg, &table, &reports, &[])
        }
        Task::Scaling => {
            let n = replicas(&base, 1000)?;
            let alpha = m.alpha()?;
            let q = sim.quantile.or(file.quantile).unwrap_or(0.5);
            let law = file.law.unwrap_or_default();
            let r = scaling_exponent_estimate_law(law, alpha, dim, &t_grid, n, q, seed)?;
            let mut table = Table::new(&[
                "alpha", "dim", "t", "quantile", "value", "slope", "slope_stderr", "predicted", "one_sided",
            ]);
            for (t, v) in r.t_grid.iter().zip(&r.quantiles) {
                table.push(vec![
                    fmt_f64(Some(alpha)),
                    dim.to_string(),
                    fmt_f64(Some(*t)),
                    fmt_f64(Some(q)),
                    fmt_f64(Some(*v)),
                    fmt_f64(Some(r.fit.slope)),
                    fmt_f64(Some(r.fit.stderr)),
                    fmt_f64(Some(r.predicted)),
                    r.one_sided.to_string(),
                ]);
            }
            let cfg = sim_config(
                n,
                serde_json::json!({"alpha": alpha, "dim": dim, "t_grid": t_grid, "quantile": q, "law": law}),
            );
            emit(&base, n, &cfg, &table, &r, &[])
        }
        Task::Tail => {
            let n = replicas(&base, 1000)?;
            let alpha = m.alpha()?;
            let model = match sim.model.or(file.model).unwrap_or_default() {
                ModelKind::Rwrs => TailModel::Rwrs { rho: Model::single(m.rhos()?, "rho")? },
                ModelKind::Rcm => TailModel::Rcm {
                    delta: Model::single(m.deltas()?, "delta")?,
                    gamma: m.gamma().ok_or("--gamma is required for the rcm model")?,
                },
            };
            let floor = cal.polynomial_floor.exponent;
            let s = tail_prob_scan(model, alpha, dim, &t_grid, n, field_seed, seed, floor)?;
            let mut table = Table::new(&[
                "t", "successes", "probability", "ci_low", "ci_high", "floor", "above_floor", "slope",
            ]);
            for ((t, e), above) in s.t_grid.iter().zip(&s.estimates).zip(&s.above_floor) {
                table.push(vec![
                    fmt_f64(Some(*t)),
                    e.successes.to_string(),
                    fmt_f64(Some(e.probability)),
                    fmt_f64(Some(e.ci_low)),
                    fmt_f64(Some(e.ci_high)),
                    fmt_f64(Some(t.powf(-floor))),
                    above.to_string(),
                    fmt_f64(s.fit.as_ref().map(|f| f.slope)),
                ]);
            }
            let tol = [Tolerance::new("polynomial_floor_exponent", floor, &cal.polynomial_floor.provenance)];
            let cfg = sim_config(
                n,
                serde_json::json!({"alpha": alpha, "dim": dim, "t_grid": t_grid, "model": model, "field_seed": field_seed}),
            );
            emit(&base, n, &cfg, &table, &s, &tol)
        }
        Task::Strategy => {
            let n = replicas(&base, 10_000)?;
            let alpha = m.alpha()?;
            let rho = Model::single(m.rhos()?, "rho")?;
            let cfg_s = StrategyConfig { bridge: sim.bridge || file.bridge.unwrap_or(false), ..Default::default() };
            let bounds = t_grid
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let tail = (dim >= 2).then(|| {
                        LocalTimeTail::simulate(dim, cfg_s.total_rate, 0.75 * t, n, derive_seed(seed, i as u64))
                    });
                    strategy_lower_bound(alpha, dim, rho, t, field_seed, &cfg_s, tail.as_ref())
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut table = Table::new(&[
                "alpha", "dim", "rho", "t", "field_seed", "log_bound", "exponent", "p_exponent", "site", "z",
                "local_time_needed",
            ]);
            for b in &bounds {
                table.push(vec![
                    fmt_f64(Some(b.alpha)),
                    b.dim.to_string(),
                    fmt_f64(Some(b.rho)),
                    fmt_f64(Some(b.t)),
                    b.field_seed.to_string(),
                    fmt_f64(Some(b.log_bound)),
                    fmt_f64(Some(b.exponent)),
                    fmt_f64(Some(b.p_exponent)),
                    b.site.to_string(),
                    fmt_f64(Some(b.z)),
                    fmt_f64(Some(b.local_time_needed)),
                ]);
            }
            let tol = [Tolerance::new("strategy_eps_tol", cal.strategy.eps_tol, &cal.strategy.provenance)];
            let cfg = sim_config(
                n,
                serde_json::json!({"alpha": alpha, "dim": dim, "rho": rho, "t_grid": t_grid,
                                   "field_seed": field_seed, "bridge": cfg_s.bridge}),
            );
            emit(&base, n, &cfg, &table, &bounds, &tol)
        }
        Task::Chen => {
            let n = replicas(&base, 10_000)?;
            let bs = Model::grid(&sim.b, &file.b, "b")?.unwrap_or_else(|| vec![3.0, 5.0, 11.0]);
            let lambdas = Model::grid(&sim.lambda, &file.lambda, "lambda")?.unwrap_or_else(|| vec![2.0, 4.0, 8.0]);
            let mut checks = Vec::new();
            for (i, &t) in t_grid.iter().enumerate() {
                checks.extend(chen_verify(dim, t, &bs, &lambdas, n, derive_seed(seed, i as u64))?);
            }
            let mut table = Table::new(&[
                "t", "b", "lambda", "a_value", "threshold", "probability", "ci_high", "bound", "violated",
            ]);
            for c in &checks {
                table.push(vec![
                    fmt_f64(Some(c.t)),
                    fmt_f64(Some(c.b_value)),
                    fmt_f64(Some(c.lambda)),
                    fmt_f64(Some(c.a_value)),
                    fmt_f64(Some(c.threshold)),
                    fmt_f64(Some(c.mc.probability)),
                    fmt_f64(Some(c.mc.ci_high)),
                    fmt_f64(Some(c.bound)),
                    c.violated.to_string(),
                ]);
            }
            let cfg = sim_config(n, serde_json::json!({"dim": dim, "t_grid": t_grid, "b": bs, "lambda": lambdas}));
            emit(&base, n, &cfg, &table, &checks, &[])
        }
        Task::Level => {
            let alpha = m.alpha()?;
            let eta = sim.eta.or(file.eta).ok_or("--eta is required")?;
            let k_eps = sim.k_eps.or(file.k_eps).ok_or("--k-eps is required")?;
            let defaults = LevelOccupationConfig::default();
            let lc = LevelOccupationConfig {
                fields: sim.fields.or(file.fields).unwrap_or(defaults.fields),
                paths_per_site: sim.paths.or(file.paths).unwrap_or(defaults.paths_per_site),
                ..defaults
            };
            let r = level_mean_occupation(alpha, dim, eta, k_eps, &t_grid, &lc, seed)?;
            let mut table = Table::new(&[
                "t", "threshold", "box_radius", "mean_sup", "stderr", "mean_level_size", "slope", "rate_exponent",
            ]);
            for p in &r.points {
                table.push(vec![
                    fmt_f64(Some(p.t)),
                    fmt_f64(Some(p.threshold)),
                    p.box_radius.to_string(),
                    fmt_f64(Some(p.mean_sup)),
                    fmt_f64(Some(p.stderr)),
                    fmt_f64(Some(p.mean_level_size)),
                    fmt_f64(Some(r.fit.slope)),
                    fmt_f64(Some(r.rate_exponent)),
                ]);
            }
            let n = lc.fields * lc.paths_per_site;
            let cfg = sim_config(
                n,
                serde_json::json!({"alpha": alpha, "dim": dim, "eta": eta, "k_eps": k_eps,
                                   "t_grid": t_grid, "level": lc}),
            );
            emit(&base, n, &cfg, &table, &r, &[])
        }
    }
}
