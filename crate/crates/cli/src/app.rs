//! Argument parsing and the subcommands behind the `hullsolve` binary.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hullsolve::generate::{gaussian_points, mixed_sign_system, nonneg_system, rng, uniform_point, MatrixKind};
use hullsolve::linalg::dist;
use hullsolve::oracle::{hull_membership_2d, solve_system};
use hullsolve::{
    analyze, run_hull, solve_incremental, solve_nonneg, tau_star_bounds, Delta0Policy, HullConfigF64, HullInstanceF64,
    HullOutcomeKind, IncrementPolicy, IncrementalConfigF64, InitRule, LinearSystemF64, PivotRule, SolveConfigF64,
    SolveOutcomeF64, SolveStatus, StopRule, TauBounds, Witness,
};
use rayon::prelude::*;
use thiserror::Error;

use crate::io::{load_matrix, load_vector, rows_of, IoError, MatrixFormat};
use crate::report::*;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CONVERGED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),

    #[error(transparent)]
    Solver(#[from] hullsolve::Error),

    #[error("{0}")]
    Usage(String),

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use hullsolve::Error as E;
        match self {
            CliError::Solver(E::CapExceeded { .. } | E::AlphaBVanishes { .. } | E::DegeneratePivot { .. }) => {
                EXIT_NOT_CONVERGED
            }
            // Bad files, bad flags and singular matrices are all input problems.
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hullsolve", version, about = "Convex hull membership and linear systems via the Triangle Algorithm")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Write a per-iteration CSV trace.
    #[arg(long, global = true, value_name = "CSV")]
    pub trace: Option<PathBuf>,

    /// Write a JSON report (`-` for stdout).
    #[arg(long, global = true, value_name = "JSON")]
    pub report: Option<PathBuf>,

    /// Seed for generated instances.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Override the derived iteration cap.
    #[arg(long, global = true, value_name = "N")]
    pub max_iters: Option<usize>,

    /// Input layout for matrix and vector files.
    #[arg(long, global = true, default_value = "auto")]
    pub format: MatrixFormat,

    /// Suppress the human-readable summary.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether a target lies in the convex hull of a point set.
    Hull(HullArgs),
    /// Solve a square system.
    Solve(SolveArgs),
    /// Eigenvalue, distance and shift bounds for a system.
    Analyze(SystemArgs),
    /// Reference answers: Gaussian elimination, or planar hull membership.
    Oracle(OracleArgs),
    /// Run a generated suite, in parallel across instances.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct HullArgs {
    /// One point per row.
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = PivotArg::MostViolated)]
    pub pivot_rule: PivotArg,
    #[arg(long, value_enum, default_value_t = InitArg::Nearest)]
    pub init: InitArg,
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub rhs: PathBuf,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon0: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Incremental)]
    pub mode: ModeArg,
    /// `quantized:N`, `double` or `raw`.
    #[arg(long, default_value = "quantized:1")]
    pub increment: IncrementArg,
    /// Known lower bound on the distance from the origin to the column hull.
    #[arg(long)]
    pub delta0: Option<f64>,
    /// Skip the witness phase and bound the distance from eigenvalues.
    #[arg(long, conflicts_with = "delta0")]
    pub skip_phase1: bool,
    #[arg(long, value_enum, default_value_t = StopArg::Residual)]
    pub stop: StopArg,
    #[arg(long, value_enum, default_value_t = InitArg::Nearest)]
    pub init: InitArg,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long, requires = "rhs", conflicts_with_all = ["points", "target"])]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub rhs: Option<PathBuf>,
    #[arg(long, requires = "target")]
    pub points: Option<PathBuf>,
    #[arg(long)]
    pub target: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::Nonneg)]
    pub suite: SuiteArg,
    #[arg(long, value_delimiter = ',', default_values_t = [5usize, 20])]
    pub sizes: Vec<usize>,
    /// Instances per size.
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PivotArg {
    MostViolated,
    FirstFound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Nearest,
    Centroid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Nonneg,
    Incremental,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StopArg {
    Residual,
    HullGap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Nonneg,
    Mixed,
    Hull,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IncrementArg(pub IncrementPolicy);

impl FromStr for IncrementArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let policy = match s {
            "double" => IncrementPolicy::DoublePlusOne,
            "raw" => IncrementPolicy::Raw,
            "quantized" => IncrementPolicy::Quantized(1),
            _ => {
                let n = s
                    .strip_prefix("quantized:")
                    .and_then(|n| n.parse::<u32>().ok())
                    .filter(|&n| n > 0)
                    .ok_or_else(|| format!("expected quantized:N (N ≥ 1), double or raw; got `{s}`"))?;
                IncrementPolicy::Quantized(n)
            }
        };
        Ok(Self(policy))
    }
}

impl std::fmt::Display for IncrementArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.0 {
            IncrementPolicy::Quantized(n) => write!(f, "quantized:{n}"),
            IncrementPolicy::Raw => f.write_str("raw"),
            IncrementPolicy::DoublePlusOne => f.write_str("double"),
        }
    }
}

impl From<PivotArg> for PivotRule {
    fn from(p: PivotArg) -> Self {
        match p {
            PivotArg::MostViolated => PivotRule::MostViolated,
            PivotArg::FirstFound => PivotRule::FirstFound,
        }
    }
}

fn init_rule(i: InitArg) -> InitRule<f64> {
    match i {
        InitArg::Nearest => InitRule::NearestVertex,
        InitArg::Centroid => InitRule::Centroid,
    }
}

fn name<V: ValueEnum>(v: &V) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

/// What a subcommand hands back for reporting.
struct Run {
    status: String,
    exit_code: i32,
    config: BTreeMap<String, String>,
    outcome: Outcome,
    trace: Option<Vec<TraceRow>>,
    diagnostics: Vec<String>,
    summary: String,
}

/// Parse `argv` (program name first), run, and return the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let echo: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(&cli, echo) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, command: Vec<String>) -> Result<i32, CliError> {
    let common = &cli.common;
    let start = Instant::now();
    let run = match &cli.command {
        Command::Hull(a) => hull(a, common)?,
        Command::Solve(a) => solve(a, common)?,
        Command::Analyze(a) => analyze_cmd(a, common)?,
        Command::Oracle(a) => oracle(a, common)?,
        Command::Bench(a) => bench(a, common)?,
    };
    let wall = start.elapsed().as_secs_f64();

    if let Some(path) = &common.trace {
        let rows = run.trace.as_deref().unwrap_or(&[]);
        write_out(path, &trace_csv(rows))?;
    }
    let report = RunReport {
        tool: format!("hullsolve {}", env!("CARGO_PKG_VERSION")),
        command,
        config: run.config,
        status: run.status,
        exit_code: run.exit_code,
        wall_time_s: fin(wall),
        outcome: run.outcome,
        trace: run.trace,
        diagnostics: run.diagnostics,
    };
    let to_stdout = common.report.as_deref() == Some(Path::new("-"));
    if let Some(path) = &common.report {
        if to_stdout {
            println!("{}", report.to_json());
        } else {
            write_out(path, &report.to_json())?;
        }
    }
    if !common.quiet && !to_stdout {
        print!("{}", run.summary);
        for d in &report.diagnostics {
            println!("note: {d}");
        }
    }
    Ok(run.exit_code)
}

fn write_out(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write { path: path.to_path_buf(), source })
}

fn load_system(a: &SystemArgs, format: MatrixFormat) -> Result<LinearSystemF64, CliError> {
    let m = load_matrix(&a.matrix, format)?;
    let b = load_vector(&a.rhs, format)?;
    if !m.is_square() {
        return Err(IoError::DimensionMismatch { expected: m.rows(), found: m.cols() }.into());
    }
    if b.len() != m.rows() {
        return Err(IoError::DimensionMismatch { expected: m.rows(), found: b.len() }.into());
    }
    Ok(LinearSystemF64::new(m, b)?)
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.10}")).collect();
    format!("({})", parts.join(", "))
}

fn witness_section(w: &Witness<f64>) -> WitnessSection {
    WitnessSection {
        point: fin_vec(w.iterate.point()),
        coefficients: fin_vec(w.iterate.coeffs()),
        margins: fin_vec(&w.margins),
        distance_lower: fin(w.distance_bracket.0),
        distance_upper: fin(w.distance_bracket.1),
    }
}

fn trace_rows(t: Option<&Vec<hullsolve::TraceRecord<f64>>>) -> Option<Vec<TraceRow>> {
    t.map(|t| t.iter().map(TraceRow::from).collect())
}

fn hull(a: &HullArgs, common: &Common) -> Result<Run, CliError> {
    let points = rows_of(&load_matrix(&a.points, common.format)?);
    let target = load_vector(&a.target, common.format)?;
    let instance = HullInstanceF64::new(points, target)?;
    let cfg = HullConfigF64 {
        max_iterations: common.max_iters,
        pivot_rule: a.pivot_rule.into(),
        init_rule: init_rule(a.init),
        record_trace: common.trace.is_some(),
        ..HullConfigF64::with_epsilon(a.epsilon)
    };
    let out = run_hull(&instance, &cfg)?;
    let (result, exit_code) = match &out.kind {
        HullOutcomeKind::InHullApprox(_) => ("in_hull", EXIT_OK),
        HullOutcomeKind::NotInHull(_) => ("not_in_hull", EXIT_NOT_CONVERGED),
        HullOutcomeKind::CapExceeded(_) => ("cap_exceeded", EXIT_NOT_CONVERGED),
    };
    let it = out.iterate();
    let mut summary = format!("{result} after {} iterations, gap {:e}\n", out.iterations, it.gap());
    if let Some(w) = out.witness() {
        summary.push_str(&format!("distance to hull in [{:e}, {:e}]\n", w.distance_bracket.0, w.distance_bracket.1));
    } else {
        summary.push_str(&format!("coefficients {}\n", fmt_vec(it.coeffs())));
    }
    let config = BTreeMap::from([
        ("epsilon".into(), a.epsilon.to_string()),
        ("pivot_rule".into(), name(&a.pivot_rule)),
        ("init".into(), name(&a.init)),
        ("max_iters".into(), cfg.iteration_cap().to_string()),
    ]);
    Ok(Run {
        status: result.into(),
        exit_code,
        config,
        outcome: Outcome::Hull(HullSection {
            result: result.into(),
            iterations: out.iterations,
            iteration_cap: cfg.iteration_cap(),
            epsilon: fin(a.epsilon),
            radius: fin(instance.radius()),
            initial_gap: fin(out.initial_gap),
            gap: fin(it.gap()),
            point: fin_vec(it.point()),
            coefficients: fin_vec(it.coeffs()),
            last_pivot: out.last_pivot,
            witness: out.witness().map(witness_section),
        }),
        trace: trace_rows(out.trace.as_ref()),
        diagnostics: Vec::new(),
        summary,
    })
}

fn shift_bounds(t: &TauBounds<f64>) -> ShiftBoundsSection {
    ShiftBoundsSection {
        log_tau_star: fin(t.log_tau_star),
        log_tau_star_prime: fin(t.log_tau_star_prime),
        tau_star: fin_opt(t.tau_star),
        tau_star_prime: fin_opt(t.tau_star_prime),
    }
}

fn status_name(s: &SolveStatus<f64>) -> &'static str {
    match s {
        SolveStatus::Converged => "converged",
        SolveStatus::InfeasibleNonneg(_) => "infeasible_nonneg",
        SolveStatus::CapExceeded => "cap_exceeded",
    }
}

fn solve(a: &SolveArgs, common: &Common) -> Result<Run, CliError> {
    let system = load_system(&a.system, common.format)?;
    let mut base = SolveConfigF64::with_epsilon0(a.epsilon0);
    base.hull.max_iterations = common.max_iters;
    base.hull.record_trace = common.trace.is_some();
    base.hull.init_rule = init_rule(a.init);
    base.stop_rule = match a.stop {
        StopArg::Residual => StopRule::ResidualFirst,
        StopArg::HullGap => StopRule::HullGap,
    };
    let mut config = BTreeMap::from([
        ("mode".into(), name(&a.mode)),
        ("epsilon0".into(), a.epsilon0.to_string()),
        ("stop".into(), name(&a.stop)),
        ("init".into(), name(&a.init)),
    ]);
    if let Some(m) = common.max_iters {
        config.insert("max_iters".into(), m.to_string());
    }
    let explicit = match (a.delta0, a.skip_phase1) {
        (Some(d), _) => Some(Delta0Policy::UserSupplied(d)),
        (None, true) => Some(Delta0Policy::SkipPhase1),
        _ => None,
    };
    let out: SolveOutcomeF64 = match a.mode {
        ModeArg::Nonneg => {
            if let Some(p) = explicit {
                base.delta0_policy = p;
            }
            config.insert("delta0_policy".into(), format!("{:?}", base.delta0_policy));
            solve_nonneg(&system, &base)?
        }
        ModeArg::Incremental => {
            let mut cfg =
                IncrementalConfigF64 { policy: a.increment.0, ..IncrementalConfigF64::with_epsilon0(a.epsilon0) };
            if let Some(p) = explicit {
                base.delta0_policy = p;
            } else {
                base.delta0_policy = cfg.base.delta0_policy;
            }
            cfg.base = base;
            config.insert("delta0_policy".into(), format!("{:?}", cfg.base.delta0_policy));
            config.insert("increment".into(), a.increment.to_string());
            solve_incremental(&system, &cfg)?
        }
    };

    let mut diagnostics = out.diagnostics.clone();
    let bounds = match tau_star_bounds(&system) {
        Ok(t) => Some(shift_bounds(&t)),
        Err(e) => {
            diagnostics.push(format!("shift bounds unavailable: {e}"));
            None
        }
    };
    let status = status_name(&out.status);
    let exit_code = if out.is_converged() { EXIT_OK } else { EXIT_NOT_CONVERGED };
    let mut summary = format!("{status} after {} iterations", out.iterations);
    if out.shift_t > 0.0 {
        summary.push_str(&format!(", final shift {}", out.shift_t));
    }
    summary.push('\n');
    if let (Some(x), Some(r)) = (&out.x, out.residual_norm) {
        summary.push_str(&format!("x = {}\nresidual {r:e} (relative {:e})\n", fmt_vec(x), r / system.rho()));
    }
    Ok(Run {
        status: status.into(),
        exit_code,
        config,
        outcome: Outcome::Solve(SolveSection {
            mode: name(&a.mode),
            status: status.into(),
            n: system.dim(),
            x: out.x.as_deref().map(fin_vec),
            residual_norm: fin_opt(out.residual_norm),
            relative_residual: fin_opt(out.relative_residual),
            rho: fin(system.rho()),
            epsilon0: fin(a.epsilon0),
            shift_t: fin(out.shift_t),
            delta0_prime: fin_opt(out.delta0_prime),
            inner_epsilon: fin_opt(out.inner_epsilon),
            epsilon_prime: fin_opt(out.epsilon_prime),
            iterations: out.iterations,
            phase1_iterations: out.phase1_iterations,
            iteration_cap: out.iteration_cap,
            shift_escalations: out.shift_escalations,
            reseeds: out.reseeds,
            sensitivity: out.sensitivity.as_ref().map(|s| SensitivitySection {
                iteration: s.iteration,
                hull_gap: fin(s.hull_gap),
                epsilon: fin(s.epsilon),
                epsilon_prime: fin(s.epsilon_prime),
                residual: fin(s.residual),
                holds: s.holds,
            }),
            witness: out.witness().map(witness_section),
            shift_bounds: bounds,
        }),
        trace: trace_rows(out.trace.as_ref()),
        diagnostics,
        summary,
    })
}

fn analyze_cmd(a: &SystemArgs, common: &Common) -> Result<Run, CliError> {
    let system = load_system(a, common.format)?;
    let s = analyze(&system)?;
    let summary = format!(
        "eigenvalues of AᵀA in [{:e}, {:e}]\ndistance from origin to column hull ≥ {:e}\nlog shift bound {:.6} (refined {:.6})\n",
        s.lambda_min, s.lambda_max, s.delta0.bound, s.tau.log_tau_star, s.tau.log_tau_star_prime
    );
    Ok(Run {
        status: "ok".into(),
        exit_code: EXIT_OK,
        config: BTreeMap::new(),
        outcome: Outcome::Analyze(AnalyzeSection {
            n: s.n,
            rho: fin(system.rho()),
            lambda_min: fin(s.lambda_min),
            lambda_max: fin(s.lambda_max),
            lambda_min_converged: s.lambda_min_converged,
            log_det_q: fin(s.log_det_q),
            delta0_stated: fin(s.delta0.stated),
            delta0_rayleigh: fin(s.delta0.rayleigh),
            delta0_bound: fin(s.delta0.bound),
            shift_bounds: shift_bounds(&s.tau),
            notes: s.notes.clone(),
        }),
        trace: None,
        diagnostics: s.notes,
        summary,
    })
}

fn oracle(a: &OracleArgs, common: &Common) -> Result<Run, CliError> {
    if let (Some(matrix), Some(rhs)) = (&a.matrix, &a.rhs) {
        let system = load_system(&SystemArgs { matrix: matrix.clone(), rhs: rhs.clone() }, common.format)?;
        let o = solve_system(&system)?;
        let r = system.residual_norm(&o.x_star);
        return Ok(Run {
            status: "ok".into(),
            exit_code: EXIT_OK,
            config: BTreeMap::from([("problem".into(), "system".into())]),
            outcome: Outcome::Oracle(OracleSection {
                problem: "system".into(),
                x: Some(fin_vec(&o.x_star)),
                t_star: fin(o.t_star),
                residual_norm: fin(r),
                inside: None,
                distance: None,
            }),
            trace: None,
            diagnostics: Vec::new(),
            summary: format!("x = {}\nt* = {}\nresidual {r:e}\n", fmt_vec(&o.x_star), o.t_star),
        });
    }
    let (Some(points), Some(target)) = (&a.points, &a.target) else {
        return Err(CliError::Usage("oracle needs --matrix/--rhs or --points/--target".into()));
    };
    let pts = rows_of(&load_matrix(points, common.format)?);
    let p = load_vector(target, common.format)?;
    if p.len() != 2 || pts.iter().any(|v| v.len() != 2) {
        return Err(CliError::Usage("the hull oracle is planar: points and target must be 2-D".into()));
    }
    let pts: Vec<[f64; 2]> = pts.iter().map(|v| [v[0], v[1]]).collect();
    let (inside, d) = hull_membership_2d(&pts, [p[0], p[1]]);
    Ok(Run {
        status: "ok".into(),
        exit_code: EXIT_OK,
        config: BTreeMap::from([("problem".into(), "hull".into())]),
        outcome: Outcome::Oracle(OracleSection {
            problem: "hull".into(),
            x: None,
            t_star: None,
            residual_norm: None,
            inside: Some(inside),
            distance: fin(d),
        }),
        trace: None,
        diagnostics: Vec::new(),
        summary: format!("{} (distance {d:e})\n", if inside { "inside" } else { "outside" }),
    })
}

/// Worker count from `HULLSOLVE_THREADS`, else rayon's default.
fn bench_threads() -> Result<usize, CliError> {
    match std::env::var("HULLSOLVE_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("HULLSOLVE_THREADS must be a positive integer, got `{v}`"))),
        Err(_) => Ok(rayon::current_num_threads()),
    }
}

fn instance_seed(seed: u64, id: usize) -> u64 {
    seed.wrapping_add((id as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn bench_one(suite: SuiteArg, id: usize, n: usize, seed: u64, eps0: f64, max_iters: Option<usize>) -> BenchRow {
    let mut r = rng(instance_seed(seed, id));
    let row = |status: &str, iterations, rel: Option<f64>, err: Option<f64>| BenchRow {
        id,
        n,
        status: status.into(),
        iterations,
        relative_residual: fin_opt(rel),
        error_to_planted: fin_opt(err),
    };
    let solved = |out: hullsolve::Result<SolveOutcomeF64>, x_star: &[f64]| match out {
        Ok(o) => {
            let err = o.x.as_deref().map(|x| dist(x, x_star));
            row(status_name(&o.status), o.iterations, o.relative_residual, err)
        }
        Err(e) => row(&format!("error: {e}"), 0, None, None),
    };
    match suite {
        SuiteArg::Nonneg => {
            let p = nonneg_system::<f64, _>(&mut r, n, MatrixKind::GaussianUnitColumns);
            let mut cfg = SolveConfigF64::with_epsilon0(eps0);
            cfg.hull.max_iterations = max_iters;
            solved(solve_nonneg(&p.system, &cfg), &p.x_star)
        }
        SuiteArg::Mixed => {
            let p = mixed_sign_system::<f64, _>(&mut r, n, MatrixKind::PerturbedIdentity);
            let mut cfg = IncrementalConfigF64::with_epsilon0(eps0);
            cfg.base.hull.max_iterations = max_iters;
            solved(solve_incremental(&p.system, &cfg), &p.x_star)
        }
        SuiteArg::Hull => {
            let pts = gaussian_points::<f64, _>(&mut r, 2 * n, n);
            let target = uniform_point::<f64, _>(&mut r, n, -1.0, 1.0);
            let cfg = HullConfigF64 { max_iterations: max_iters, ..HullConfigF64::with_epsilon(eps0) };
            match HullInstanceF64::new(pts, target).and_then(|inst| run_hull(&inst, &cfg)) {
                Ok(o) => {
                    let status = match o.kind {
                        HullOutcomeKind::InHullApprox(_) => "in_hull",
                        HullOutcomeKind::NotInHull(_) => "not_in_hull",
                        HullOutcomeKind::CapExceeded(_) => "cap_exceeded",
                    };
                    row(status, o.iterations, None, None)
                }
                Err(e) => row(&format!("error: {e}"), 0, None, None),
            }
        }
    }
}

fn bench(a: &BenchArgs, common: &Common) -> Result<Run, CliError> {
    if a.sizes.is_empty() || a.sizes.contains(&0) {
        return Err(CliError::Usage("--sizes needs positive sizes".into()));
    }
    if !(a.epsilon0 > 0.0 && a.epsilon0 < 1.0) {
        return Err(CliError::Usage("--epsilon0 must lie in (0,1)".into()));
    }
    let threads = bench_threads()?;
    let jobs: Vec<(usize, usize)> = a.sizes.iter().flat_map(|&n| std::iter::repeat_n(n, a.count)).enumerate().collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} workers: {e}")))?;
    let mut rows: Vec<BenchRow> = pool.install(|| {
        jobs.par_iter().map(|&(id, n)| bench_one(a.suite, id, n, common.seed, a.epsilon0, common.max_iters)).collect()
    });
    rows.sort_by_key(|r| r.id);

    let good = |r: &BenchRow| match a.suite {
        SuiteArg::Hull => !r.status.starts_with("error") && r.status != "cap_exceeded",
        _ => r.status == "converged",
    };
    let converged = rows.iter().filter(|r| good(r)).count();
    let exit_code = if converged == rows.len() { EXIT_OK } else { EXIT_NOT_CONVERGED };
    let mut summary = format!("{:>5} {:>5} {:>18} {:>10} {:>12}\n", "id", "n", "status", "iters", "rel.resid");
    for r in &rows {
        let rel = r.relative_residual.map(|v| format!("{v:.3e}")).unwrap_or_else(|| "-".into());
        summary.push_str(&format!("{:>5} {:>5} {:>18} {:>10} {:>12}\n", r.id, r.n, r.status, r.iterations, rel));
    }
    summary.push_str(&format!("{converged}/{} finished on {threads} threads\n", rows.len()));
    let sizes: Vec<String> = a.sizes.iter().map(usize::to_string).collect();
    Ok(Run {
        status: if exit_code == EXIT_OK { "ok" } else { "incomplete" }.into(),
        exit_code,
        config: BTreeMap::from([
            ("suite".into(), name(&a.suite)),
            ("sizes".into(), sizes.join(",")),
            ("count".into(), a.count.to_string()),
            ("epsilon0".into(), a.epsilon0.to_string()),
            ("seed".into(), common.seed.to_string()),
        ]),
        outcome: Outcome::Bench(BenchSection { suite: name(&a.suite), seed: common.seed, threads, converged, rows }),
        trace: None,
        diagnostics: Vec::new(),
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn increment_parsing() {
        assert_eq!("quantized:3".parse::<IncrementArg>().unwrap().0, IncrementPolicy::Quantized(3));
        assert_eq!("double".parse::<IncrementArg>().unwrap().0, IncrementPolicy::DoublePlusOne);
        assert_eq!("raw".parse::<IncrementArg>().unwrap().0, IncrementPolicy::Raw);
        assert!("quantized:0".parse::<IncrementArg>().is_err());
        assert!("triple".parse::<IncrementArg>().is_err());
        assert_eq!(IncrementArg(IncrementPolicy::Quantized(4)).to_string(), "quantized:4");
    }

    #[test]
    fn exit_codes_by_error() {
        assert_eq!(CliError::Solver(hullsolve::Error::CapExceeded { cap: 1 }).exit_code(), EXIT_NOT_CONVERGED);
        assert_eq!(CliError::Solver(hullsolve::Error::ZeroInColumnHull).exit_code(), EXIT_INPUT);
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_INPUT);
    }

    #[test]
    fn bench_rows_are_reproducible() {
        let a = bench_one(SuiteArg::Nonneg, 3, 5, 9, 1e-2, None);
        let b = bench_one(SuiteArg::Nonneg, 3, 5, 9, 1e-2, None);
        assert_eq!(a, b);
        assert_eq!(a.status, "converged");
    }
}
