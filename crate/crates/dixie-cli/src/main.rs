//! `dixie`: command-line interface to the coupon-collector laboratory.
//!
//! Every subcommand supports `--json` (a report envelope with echoed
//! parameters) and three of them (`gumbel`, `radial`, `case2`) also emit
//! `--csv` tables. Reports are deterministic: rerunning a command with the
//! same arguments reproduces the output byte for byte except for the
//! `elapsed_ms` field.
//!
//! Exit codes: 0 success, 1 verification-gate failure, 2 usage or parameter
//! error (also used by the argument parser), 3 numerical non-convergence
//! (a diagnostic JSON payload goes to stderr).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use dixie::acceptance::{run_all, AcceptanceConfig};
use dixie::asymptotics::{
    case1_limit, case2_powerlaw, gumbel_fit_equal, AsymptoticsError, SequenceFamily,
};
use dixie::centering::{solve_centering, CenteringError};
use dixie::exact_moments::{
    mean_variance, CollectorModel, ModelError, MomentError, ProbabilityVector,
};
use dixie::extremality::{
    hessian_constant, hessian_radial_fd, radial_variance_scan, ExtremalityError,
};
use dixie::gamma_kernel::{KernelError, ShapeParam};
use dixie::montecarlo::{
    simulate_active_clock, simulate_discrete, simulate_poissonized, transfer_check,
    SimConfig, SimError,
};
use dixie::poissonized::{DirectionError, RadialDirection};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Application error carrying the process exit code.
enum AppError {
    /// Invalid arguments or model parameters (exit 2).
    Usage(String),
    /// A verification gate failed (exit 1).
    Gate(String),
    /// A numerical routine did not converge (exit 3); the payload is
    /// printed to stderr as JSON.
    NonConverged { message: String, payload: Value },
}

impl AppError {
    fn usage(e: impl std::fmt::Display) -> Self {
        AppError::Usage(e.to_string())
    }
}

fn map_moment(e: MomentError) -> AppError {
    match e {
        MomentError::NonConvergence { value, abs_err, target } => AppError::NonConverged {
            message: e.to_string(),
            payload: json!({
                "kind": "non-convergence",
                "value": value,
                "abs_err": abs_err,
                "target": target,
            }),
        },
        other => AppError::usage(other),
    }
}

fn map_model(e: ModelError) -> AppError {
    AppError::usage(e)
}

fn map_kernel(e: KernelError) -> AppError {
    AppError::usage(e)
}

fn map_centering(e: CenteringError) -> AppError {
    AppError::usage(e)
}

fn map_direction(e: DirectionError) -> AppError {
    AppError::usage(e)
}

fn map_sim(e: SimError) -> AppError {
    match e {
        SimError::Moment(m) => map_moment(m),
        other => AppError::usage(other),
    }
}

fn map_extremality(e: ExtremalityError) -> AppError {
    match e {
        ExtremalityError::Moment(m) => map_moment(m),
        ExtremalityError::Sim(s) => map_sim(s),
        ExtremalityError::QuadratureFailed { ref context, value, abs_err } => {
            AppError::NonConverged {
                message: e.to_string(),
                payload: json!({
                    "kind": "non-convergence",
                    "context": context,
                    "value": value,
                    "abs_err": abs_err,
                }),
            }
        }
        other => AppError::usage(other),
    }
}

fn map_asymptotics(e: AsymptoticsError) -> AppError {
    match e {
        AsymptoticsError::Moment(m) => map_moment(m),
        AsymptoticsError::TruncationInsufficient { bound } => AppError::NonConverged {
            message: e.to_string(),
            payload: json!({
                "kind": "truncation-insufficient",
                "bound": bound,
            }),
        },
        AsymptoticsError::QuadratureFailed { ref context, value, abs_err } => {
            AppError::NonConverged {
                message: e.to_string(),
                payload: json!({
                    "kind": "non-convergence",
                    "context": context,
                    "value": value,
                    "abs_err": abs_err,
                }),
            }
        }
        other => AppError::usage(other),
    }
}

#[derive(Serialize)]
struct ReportEnvelope {
    command: String,
    parameters: BTreeMap<String, Value>,
    results: Value,
    tool_version: &'static str,
    elapsed_ms: u128,
}

/// Everything a subcommand produces; the output mode picks one rendering.
struct CommandOutput {
    command: &'static str,
    parameters: BTreeMap<String, Value>,
    results: Value,
    text: String,
    csv: Option<String>,
    /// Set when the command's verification gate failed: the report is
    /// still printed, then the process exits 1 with this message.
    gate: Option<String>,
}

#[derive(Parser)]
#[command(
    name = "dixie",
    version = TOOL_VERSION,
    about = "Numerical laboratory for the m-fold coupon collector",
    propagate_version = true
)]
struct Cli {
    /// Emit a JSON report envelope instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Emit a CSV table (gumbel, radial, and case2 only).
    #[arg(long, global = true)]
    csv: bool,
    /// Cap the worker thread pool (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Number of coupon types (required with --uniform or --powerlaw-alpha).
    #[arg(long)]
    n: Option<usize>,
    /// Copies required of each coupon type.
    #[arg(long, default_value_t = 1)]
    m: u32,
    /// Uniform probabilities 1/N.
    #[arg(long)]
    uniform: bool,
    /// Explicit comma-separated probabilities summing to 1 within 1e-6.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    p: Option<Vec<f64>>,
    /// Power-law weights j^-alpha for j = 1..N, normalized.
    #[arg(long, value_name = "ALPHA")]
    powerlaw_alpha: Option<f64>,
}

impl ModelArgs {
    fn resolve(&self) -> Result<(CollectorModel, BTreeMap<String, Value>), AppError> {
        let m = ShapeParam::new(self.m).map_err(map_kernel)?;
        let sources =
            usize::from(self.uniform) + usize::from(self.p.is_some())
                + usize::from(self.powerlaw_alpha.is_some());
        if sources != 1 {
            return Err(AppError::Usage(
                "specify exactly one of --uniform, --p, --powerlaw-alpha".into(),
            ));
        }
        let mut params = BTreeMap::new();
        params.insert("m".into(), json!(self.m));
        let p = if self.uniform {
            let n = self.n.ok_or_else(|| {
                AppError::Usage("--uniform requires --n".into())
            })?;
            params.insert("n".into(), json!(n));
            params.insert("model".into(), json!("uniform"));
            ProbabilityVector::uniform(n).map_err(map_model)?
        } else if let Some(ref entries) = self.p {
            if self.n.is_some_and(|n| n != entries.len()) {
                return Err(AppError::Usage(
                    "--n disagrees with the length of --p".into(),
                ));
            }
            params.insert("n".into(), json!(entries.len()));
            params.insert("model".into(), json!("explicit"));
            params.insert("p".into(), json!(entries));
            ProbabilityVector::normalized(entries.clone()).map_err(map_model)?
        } else {
            let alpha = self.powerlaw_alpha.expect("checked above");
            let n = self.n.ok_or_else(|| {
                AppError::Usage("--powerlaw-alpha requires --n".into())
            })?;
            params.insert("n".into(), json!(n));
            params.insert("model".into(), json!("powerlaw"));
            params.insert("alpha".into(), json!(alpha));
            ProbabilityVector::power_law(n, alpha).map_err(map_model)?
        };
        Ok((CollectorModel::new(p, m), params))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SimMode {
    Discrete,
    Poissonized,
    ActiveClock,
    Transfer,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Linear,
    Quadratic,
}

#[derive(Subcommand)]
enum Command {
    /// Exact mean and variance of the completion time T.
    Moments(ModelArgs),
    /// Solve the centering equation n Q_m(b) = 1 on a decade ladder.
    Centering {
        /// Starting number of coupon types.
        #[arg(long)]
        n: f64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Number of decade steps n, 10n, 100n, ...
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Compare the exact equal-weights law with its Gumbel limit.
    Gumbel {
        #[arg(long)]
        n: f64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
        x_min: f64,
        #[arg(long, default_value_t = 8.0)]
        x_max: f64,
        #[arg(long, default_value_t = 0.05)]
        x_step: f64,
    },
    /// Scan Var T along a centered ray away from the uniform vector.
    Radial {
        /// Comma-separated ray direction (centered to zero sum).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        h: Vec<f64>,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Largest theta (default: 45% of the simplex exit).
        #[arg(long)]
        theta_max: Option<f64>,
        #[arg(long, default_value_t = 16)]
        steps: usize,
    },
    /// Quadratic coefficient of Var T at the uniform vector.
    Hessian {
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Number of coupon types N.
        #[arg(long)]
        bign: usize,
        /// Also run the finite-difference cross-check at this theta.
        #[arg(long)]
        fd_theta: Option<f64>,
    },
    /// Fixed-sequence limit moments and finite-N gaps.
    Case1 {
        #[arg(long, value_enum, default_value_t = FamilyArg::Linear)]
        family: FamilyArg,
        #[arg(long, default_value_t = 1)]
        m: u32,
        /// Comma-separated list of N values.
        #[arg(long, value_delimiter = ',', required = true)]
        bign_list: Vec<usize>,
        /// Truncation length of the weight sequence.
        #[arg(long)]
        truncation_j: usize,
    },
    /// Power-law defect counts against the Gumbel prediction.
    Case2 {
        #[arg(long)]
        bign: u64,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
              default_values_t = [-1.0, 0.0, 1.0, 2.0])]
        x_grid: Vec<f64>,
    },
    /// Monte Carlo simulation with a counter-based deterministic stream.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = SimMode::Discrete)]
        mode: SimMode,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the full acceptance suite; exits 1 unless every criterion passes.
    VerifyAll {
        /// Shrink the power-law criterion to N = 1e5 (recorded in output).
        #[arg(long)]
        quick: bool,
    },
}

fn float_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, AppError> {
    if !(step > 0.0) || !(hi >= lo) {
        return Err(AppError::Usage("need x_max >= x_min and x_step > 0".into()));
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(AppError::Usage("x grid has more than 1e6 points".into()));
    }
    Ok((0..count).map(|i| lo + step * i as f64).collect())
}

fn run_moments(model_args: &ModelArgs) -> Result<CommandOutput, AppError> {
    let (model, params) = model_args.resolve()?;
    let report = mean_variance(&model).map_err(map_moment)?;
    let mut text = String::new();
    let _ = writeln!(text, "N = {}, m = {}", model.n(), model.m);
    let _ = writeln!(text, "mean E T        = {:.15e}", report.mean);
    let _ = writeln!(text, "rising E T(T+1) = {:.15e}", report.rising2);
    let _ = writeln!(text, "Var T           = {:.15e}", report.var_t);
    let _ = writeln!(text, "Var X (poisson) = {:.15e}", report.var_x);
    let _ = writeln!(text, "method          = {:?}", report.method);
    let _ = writeln!(text, "abs err (est)   = {:.3e}", report.abs_err_estimate);
    Ok(CommandOutput {
        command: "moments",
        parameters: params,
        results: serde_json::to_value(report).expect("serializable"),
        text,
        csv: None,
        gate: None,
    })
}

fn run_centering(n: f64, m: u32, count: usize) -> Result<CommandOutput, AppError> {
    let shape = ShapeParam::new(m).map_err(map_kernel)?;
    if count == 0 || count > 12 {
        return Err(AppError::Usage("--count must be in 1..=12".into()));
    }
    #[derive(Serialize)]
    struct Row {
        n: f64,
        b: f64,
        a: f64,
        clock_scale: f64,
    }
    let mut rows = Vec::new();
    let mut text = format!("{:>14} {:>20} {:>20} {:>20}\n", "n", "b", "a", "n a^2 / b");
    let mut nv = n;
    for _ in 0..count {
        let pair = solve_centering(nv, shape).map_err(map_centering)?;
        let _ = writeln!(
            text,
            "{:>14.6e} {:>20.15} {:>20.15} {:>20.15}",
            nv,
            pair.b,
            pair.a,
            pair.clock_scale()
        );
        rows.push(Row {
            n: nv,
            b: pair.b,
            a: pair.a,
            clock_scale: pair.clock_scale(),
        });
        nv *= 10.0;
    }
    let mut params = BTreeMap::new();
    params.insert("n".into(), json!(n));
    params.insert("m".into(), json!(m));
    params.insert("count".into(), json!(count));
    Ok(CommandOutput {
        command: "centering",
        parameters: params,
        results: serde_json::to_value(rows).expect("serializable"),
        text,
        csv: None,
        gate: None,
    })
}

fn run_gumbel(
    n: f64,
    m: u32,
    x_min: f64,
    x_max: f64,
    x_step: f64,
) -> Result<CommandOutput, AppError> {
    let shape = ShapeParam::new(m).map_err(map_kernel)?;
    let grid = float_grid(x_min, x_max, x_step)?;
    let report = gumbel_fit_equal(n, shape, &grid).map_err(map_asymptotics)?;
    let mut text = format!(
        "n = {}, m = {}, b = {:.15}, a = {:.15}\nsup |F_exact - Gumbel| = {:.6e}\n",
        report.n, report.m, report.b, report.a, report.sup_distance
    );
    let _ = writeln!(text, "{:>10} {:>22} {:>22}", "x", "exact", "gumbel");
    for row in &report.rows {
        let _ = writeln!(
            text,
            "{:>10.4} {:>22.15} {:>22.15}",
            row.x, row.exact, row.gumbel
        );
    }
    let mut csv = String::from("x,exact,gumbel\n");
    for row in &report.rows {
        let _ = writeln!(csv, "{},{},{}", row.x, row.exact, row.gumbel);
    }
    let mut params = BTreeMap::new();
    params.insert("n".into(), json!(n));
    params.insert("m".into(), json!(m));
    params.insert("x_min".into(), json!(x_min));
    params.insert("x_max".into(), json!(x_max));
    params.insert("x_step".into(), json!(x_step));
    Ok(CommandOutput {
        command: "gumbel",
        parameters: params,
        results: serde_json::to_value(report).expect("serializable"),
        text,
        csv: Some(csv),
        gate: None,
    })
}

fn run_radial(
    h: &[f64],
    m: u32,
    theta_max: Option<f64>,
    steps: usize,
) -> Result<CommandOutput, AppError> {
    let shape = ShapeParam::new(m).map_err(map_kernel)?;
    let direction = RadialDirection::centered(h.to_vec()).map_err(map_direction)?;
    let report =
        radial_variance_scan(&direction, shape, theta_max, steps).map_err(map_extremality)?;
    let mut text = format!(
        "direction (centered) = {:?}\nm = {}\nstrictly increasing = {}\nw-checks ok = {}\n",
        report.direction, report.m, report.strictly_increasing, report.w_checks_ok
    );
    let _ = writeln!(text, "{:>12} {:>22} {:>12}", "theta", "Var T", "abs err");
    for i in 0..report.thetas.len() {
        let _ = writeln!(
            text,
            "{:>12.8} {:>22.15e} {:>12.3e}",
            report.thetas[i], report.var_t[i], report.abs_err[i]
        );
    }
    for w in &report.w_checks {
        let _ = writeln!(
            text,
            "w-check theta {:.8}: integral {:.15e}, mean slope {:.15e}, gap {:.3e}, ok {}",
            w.theta, w.w_integral, w.mean_slope_fd, w.abs_gap, w.ok
        );
    }
    let mut csv = String::from("theta,var_t,abs_err\n");
    for i in 0..report.thetas.len() {
        let _ = writeln!(
            csv,
            "{},{},{}",
            report.thetas[i], report.var_t[i], report.abs_err[i]
        );
    }
    let mut params = BTreeMap::new();
    params.insert("h".into(), json!(h));
    params.insert("m".into(), json!(m));
    params.insert(
        "theta_max".into(),
        theta_max.map_or(Value::Null, |v| json!(v)),
    );
    params.insert("steps".into(), json!(steps));
    Ok(CommandOutput {
        command: "radial",
        parameters: params,
        results: serde_json::to_value(report).expect("serializable"),
        text,
        csv: Some(csv),
        gate: None,
    })
}

fn run_hessian(m: u32, bign: usize, fd_theta: Option<f64>) -> Result<CommandOutput, AppError> {
    let shape = ShapeParam::new(m).map_err(map_kernel)?;
    let report = hessian_constant(shape, bign).map_err(map_extremality)?;
    let mut results = serde_json::to_value(report).expect("serializable");
    let mut text = format!(
        "C({}, {}) = {:.15e}  (abs err {:.3e})\nE Y_N = {:.15}\nE a_m(Y_N) = {:.15}\nCov(Y_N, a_m(Y_N)) = {:.15}\n",
        report.m, report.n, report.constant, report.abs_err, report.mean_y, report.mean_a, report.cov
    );
    if let Some(theta) = fd_theta {
        let fd = hessian_radial_fd(shape, bign, theta).map_err(map_extremality)?;
        let _ = writeln!(
            text,
            "finite-difference check at theta = {theta}: {fd:.15e} (rel gap {:.3e})",
            (fd - report.constant).abs() / report.constant.abs().max(f64::MIN_POSITIVE)
        );
        results["fd_constant"] = json!(fd);
        results["fd_theta"] = json!(theta);
    }
    let mut params = BTreeMap::new();
    params.insert("m".into(), json!(m));
    params.insert("bign".into(), json!(bign));
    params.insert(
        "fd_theta".into(),
        fd_theta.map_or(Value::Null, |v| json!(v)),
    );
    Ok(CommandOutput {
        command: "hessian",
        parameters: params,
        results,
        text,
        csv: None,
        gate: None,
    })
}

fn run_case1(
    family: FamilyArg,
    m: u32,
    bign_list: &[usize],
    truncation_j: usize,
) -> Result<CommandOutput, AppError> {
    let shape = ShapeParam::new(m).map_err(map_kernel)?;
    let fam = match family {
        FamilyArg::Linear => SequenceFamily::Linear,
        FamilyArg::Quadratic => SequenceFamily::Quadratic,
    };
    let report =
        case1_limit(&fam, shape, bign_list, truncation_j).map_err(map_asymptotics)?;
    let mut text = format!(
        "family = {}, m = {}, truncation J = {} (tail bound {:.3e})\n",
        report.family, report.m, report.truncation_j, report.truncation_bound
    );
    let _ = writeln!(
        text,
        "limit: mean = {:.15}, second = {:.15}, variance = {:.15} (err {:.1e})",
        report.limit_mean, report.limit_second, report.limit_variance, report.limit_abs_err
    );
    let _ = writeln!(
        text,
        "{:>8} {:>20} {:>14} {:>14} {:>14}",
        "N", "scaled mean", "gap mean", "gap second", "Kolmogorov"
    );
    for row in &report.rows {
        let _ = writeln!(
            text,
            "{:>8} {:>20.15} {:>14.6e} {:>14.6e} {:>14.6e}",
            row.n, row.scaled_mean, row.gap_mean, row.gap_second, row.kolmogorov
        );
    }
    let mut params = BTreeMap::new();
    params.insert(
        "family".into(),
        json!(match family {
            FamilyArg::Linear => "linear",
            FamilyArg::Quadratic => "quadratic",
        }),
    );
    params.insert("m".into(), json!(m));
    params.insert("bign_list".into(), json!(bign_list));
    params.insert("truncation_j".into(), json!(truncation_j));
    Ok(CommandOutput {
        command: "case1",
        parameters: params,
        results: serde_json::to_value(report).expect("serializable"),
        text,
        csv: None,
        gate: None,
    })
}

fn run_case2(n: u64, alpha: f64, m: u32, x_grid: &[f64]) -> Result<CommandOutput, AppError> {
    let shape = ShapeParam::new(m).map_err(map_kernel)?;
    let report = case2_powerlaw(n, alpha, shape, x_grid).map_err(map_asymptotics)?;
    let mut text = format!(
        "N = {}, alpha = {}, m = {}\nA_N = {:.15}, C_N = {:.15}, rho = {:.15}, B_N = {:.15}\nnote: {}\n",
        report.n, report.alpha, report.m, report.a_n, report.c_n, report.rho, report.b_n, report.band_note
    );
    let _ = writeln!(
        text,
        "{:>8} {:>18} {:>18} {:>10} {:>10} {:>14} {:>14}",
        "x", "defects", "e^-x", "rel dev", "in band", "cdf exact", "gumbel"
    );
    for row in &report.rows {
        let _ = writeln!(
            text,
            "{:>8.3} {:>18.12} {:>18.12} {:>10.4} {:>10} {:>14.9} {:>14.9}",
            row.x,
            row.expected_defects,
            (-row.x).exp(),
            row.rel_dev,
            row.within_band,
            row.cdf_exact,
            row.gumbel
        );
    }
    let mut csv = String::from(
        "x,expected_defects,rel_dev,within_band,sum_sq,max_q,atomless_ok,cdf_exact,gumbel\n",
    );
    for row in &report.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            row.x,
            row.expected_defects,
            row.rel_dev,
            row.within_band,
            row.sum_sq,
            row.max_q,
            row.atomless_ok,
            row.cdf_exact,
            row.gumbel
        );
    }
    let mut params = BTreeMap::new();
    params.insert("bign".into(), json!(n));
    params.insert("alpha".into(), json!(alpha));
    params.insert("m".into(), json!(m));
    params.insert("x_grid".into(), json!(x_grid));
    Ok(CommandOutput {
        command: "case2",
        parameters: params,
        results: serde_json::to_value(report).expect("serializable"),
        text,
        csv: Some(csv),
        gate: None,
    })
}

fn run_simulate(
    model_args: &ModelArgs,
    mode: SimMode,
    trials: u64,
    seed: u64,
) -> Result<CommandOutput, AppError> {
    let (model, mut params) = model_args.resolve()?;
    params.insert("trials".into(), json!(trials));
    params.insert("seed".into(), json!(seed));
    let cfg = SimConfig {
        model: model.clone(),
        trials,
        seed,
    };
    let (mode_name, results, text) = match mode {
        SimMode::Discrete => {
            let stats = simulate_discrete(&cfg).map_err(map_sim)?;
            let exact = mean_variance(&model).map_err(map_moment)?;
            let z_mean = (stats.mean - exact.mean) / stats.std_error_mean;
            let z_var = (stats.variance - exact.var_t) / stats.std_error_variance;
            let text = format!(
                "discrete draws, {} trials, seed {}\nsample mean {:.10} (exact {:.10}, z = {:+.3})\nsample var  {:.10} (exact {:.10}, z = {:+.3})\n",
                trials, seed, stats.mean, exact.mean, z_mean, stats.variance, exact.var_t, z_var
            );
            (
                "discrete",
                json!({
                    "stats": stats,
                    "exact_mean": exact.mean,
                    "exact_var_t": exact.var_t,
                    "z_mean": z_mean,
                    "z_var": z_var,
                }),
                text,
            )
        }
        SimMode::Poissonized => {
            let stats = simulate_poissonized(&cfg).map_err(map_sim)?;
            let exact = mean_variance(&model).map_err(map_moment)?;
            let z_mean = (stats.mean - exact.mean) / stats.std_error_mean;
            let z_var = (stats.variance - exact.var_x) / stats.std_error_variance;
            let text = format!(
                "poissonized maxima, {} trials, seed {}\nsample mean {:.10} (exact {:.10}, z = {:+.3})\nsample var  {:.10} (exact Var X {:.10}, z = {:+.3})\n",
                trials, seed, stats.mean, exact.mean, z_mean, stats.variance, exact.var_x, z_var
            );
            (
                "poissonized",
                json!({
                    "stats": stats,
                    "exact_mean": exact.mean,
                    "exact_var_x": exact.var_x,
                    "z_mean": z_mean,
                    "z_var": z_var,
                }),
                text,
            )
        }
        SimMode::ActiveClock => {
            let report = simulate_active_clock(&cfg).map_err(map_sim)?;
            let text = format!(
                "active-clock decomposition, {} trials, seed {}\nvariance estimate {:.10} +/- {:.3e}\nexact Var T       {:.10} (z = {:+.3}, within 3 sigma: {})\n",
                trials,
                seed,
                report.var_estimate,
                report.var_std_error,
                report.exact_var_t,
                report.z_var,
                report.within_3_sigma
            );
            (
                "active-clock",
                serde_json::to_value(report).expect("serializable"),
                text,
            )
        }
        SimMode::Transfer => {
            let report = transfer_check(&cfg).map_err(map_sim)?;
            let text = format!(
                "rising-moment transfer, {} trials each leg, seed {}\nX: mean {:.10}, var {:.10}\nT: mean {:.10}, var {:.10}\nimplied Var T from X leg {:.10}\nz_mean = {:+.3}, z_var = {:+.3}, within 3 sigma: {}\n",
                trials,
                seed,
                report.x.mean,
                report.x.variance,
                report.t.mean,
                report.t.variance,
                report.implied_var_t,
                report.z_mean,
                report.z_var,
                report.within_3_sigma
            );
            (
                "transfer",
                serde_json::to_value(report).expect("serializable"),
                text,
            )
        }
    };
    params.insert("mode".into(), json!(mode_name));
    Ok(CommandOutput {
        command: "simulate",
        parameters: params,
        results,
        text,
        csv: None,
        gate: None,
    })
}

fn run_verify_all(quick: bool) -> Result<CommandOutput, AppError> {
    let outcomes = run_all(&AcceptanceConfig { quick });
    let passed = outcomes.iter().filter(|o| o.passed).count();
    let mut text = String::new();
    for o in &outcomes {
        let _ = writeln!(text, "{}", o.line());
    }
    let _ = writeln!(text, "acceptance: {passed}/{} criteria passed", outcomes.len());
    let all_passed = passed == outcomes.len();
    let mut params = BTreeMap::new();
    params.insert("quick".into(), json!(quick));
    let gate = if all_passed {
        None
    } else {
        Some(format!(
            "{}/{} acceptance criteria failed",
            outcomes.len() - passed,
            outcomes.len()
        ))
    };
    Ok(CommandOutput {
        command: "verify-all",
        parameters: params,
        results: json!({
            "criteria": outcomes,
            "passed": passed,
            "total": outcomes.len(),
            "all_passed": all_passed,
        }),
        text,
        csv: None,
        gate,
    })
}

fn finish(output: CommandOutput, as_json: bool, as_csv: bool, started: std::time::Instant)
    -> Result<(), AppError>
{
    if as_json && as_csv {
        return Err(AppError::Usage("choose at most one of --json, --csv".into()));
    }
    if as_csv {
        match output.csv {
            Some(csv) => print!("{csv}"),
            None => {
                return Err(AppError::Usage(format!(
                    "--csv is not available for `{}` (supported: gumbel, radial, case2)",
                    output.command
                )))
            }
        }
    } else if as_json {
        let envelope = ReportEnvelope {
            command: output.command.to_string(),
            parameters: output.parameters,
            results: output.results,
            tool_version: TOOL_VERSION,
            elapsed_ms: started.elapsed().as_millis(),
        };
        println!(
            "{}",
            serde_json::to_string_pretty(&envelope).expect("serializable envelope")
        );
    } else {
        print!("{}", output.text);
    }
    match output.gate {
        Some(msg) => Err(AppError::Gate(msg)),
        None => Ok(()),
    }
}

fn dispatch(cli: &Cli) -> Result<CommandOutput, AppError> {
    match &cli.command {
        Command::Moments(model) => run_moments(model),
        Command::Centering { n, m, count } => run_centering(*n, *m, *count),
        Command::Gumbel { n, m, x_min, x_max, x_step } => {
            run_gumbel(*n, *m, *x_min, *x_max, *x_step)
        }
        Command::Radial { h, m, theta_max, steps } => {
            run_radial(h, *m, *theta_max, *steps)
        }
        Command::Hessian { m, bign, fd_theta } => run_hessian(*m, *bign, *fd_theta),
        Command::Case1 { family, m, bign_list, truncation_j } => {
            run_case1(*family, *m, bign_list, *truncation_j)
        }
        Command::Case2 { bign, alpha, m, x_grid } => {
            run_case2(*bign, *alpha, *m, x_grid)
        }
        Command::Simulate { model, mode, trials, seed } => {
            run_simulate(model, *mode, *trials, *seed)
        }
        Command::VerifyAll { quick } => run_verify_all(*quick),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        // Ignore the error if a pool already exists; this runs first.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let started = std::time::Instant::now();
    match dispatch(&cli).and_then(|out| finish(out, cli.json, cli.csv, started)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(AppError::Gate(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::NonConverged { message, payload }) => {
            eprintln!("error: {message}");
            eprintln!(
                "{}",
                serde_json::to_string(&payload).expect("serializable payload")
            );
            ExitCode::from(3)
        }
    }
}
