//! `eatkit`: certified randomness rates, entropy-accumulation bounds,
//! variance curves and the numerical property suites, as CSV and
//! `RESULT key=value` reports.

mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eatkit::dire::{rate_curve, CurveConfig, CLASSICAL_WIN, QUANTUM_WIN};
use eatkit::eat::{eat_bound_alpha, eat_bound_theorem, optimize_alpha, v_constant, EatParams, TradeoffStats};
use eatkit::variance::bernoulli_entropy_variance;
use eatkit::verify::{run_suites, suite_names};

use table::{fmt_f64, CsvTable};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flag value; exit code 2.
    #[error("invalid value for {flag}: {reason}")]
    Usage { flag: &'static str, reason: String },
    /// A property suite failed; exit code 1.
    #[error("{0} suite(s) failed")]
    Property(usize),
    #[error(transparent)]
    Core(#[from] eatkit::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } => 2,
            _ => 1,
        }
    }
}

fn usage(flag: &'static str, reason: impl Into<String>) -> CliError {
    CliError::Usage {
        flag,
        reason: reason.into(),
    }
}

/// Accepts plain integers and integral scientific notation such as `1e10`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if x.fract() != 0.0 || !(0.0..=u64::MAX as f64).contains(&x) {
        return Err(format!("{s:?} is not a nonnegative integer"));
    }
    Ok(x as u64)
}

#[derive(Parser)]
#[command(
    name = "eatkit",
    version,
    about = "Finite-size entropy accumulation bounds and randomness rates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certified CHSH randomness rate as a function of the number of rounds.
    RateCurve(RateCurveArgs),
    /// Closed-form and order-optimized smooth min-entropy bounds.
    Bound(BoundArgs),
    /// The Bernoulli entropy variance v(q) on a uniform grid.
    VarianceCurve(VarianceCurveArgs),
    /// Runs the seeded property suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RateCurveArgs {
    /// Minimum tolerated winning fraction.
    #[arg(long, default_value_t = 0.8)]
    e: f64,
    /// Testing probability; repeat for several curves.
    #[arg(long = "gamma")]
    gamma: Vec<f64>,
    #[arg(long, default_value_t = 1e-5)]
    eps: f64,
    /// Lower bound on the probability of not aborting.
    #[arg(long, default_value_t = 1e-5)]
    pomega: f64,
    #[arg(long, default_value = "100000", value_parser = parse_count)]
    n_min: u64,
    #[arg(long, default_value = "1e10", value_parser = parse_count)]
    n_max: u64,
    #[arg(long, default_value_t = 20)]
    points: usize,
    /// Also optimize the tangent point below e.
    #[arg(long)]
    optimize_pb: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct BoundArgs {
    #[arg(long, value_parser = parse_count)]
    n: u64,
    /// Per-round entropy rate h.
    #[arg(long)]
    h: f64,
    #[arg(long)]
    max_f: f64,
    #[arg(long)]
    min_sigma_f: f64,
    /// Defaults to min-sigma-f.
    #[arg(long)]
    min_f: Option<f64>,
    /// Defaults to (max-f - min-sigma-f)^2 / 4.
    #[arg(long)]
    var_f: Option<f64>,
    #[arg(long)]
    d_a: usize,
    #[arg(long)]
    classical_a: bool,
    #[arg(long, default_value_t = 1e-5)]
    eps: f64,
    #[arg(long, default_value_t = 1e-5)]
    pomega: f64,
    /// Evaluate at this order instead of optimizing.
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args)]
struct VarianceCurveArgs {
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Run only the named suite; repeatable.
    #[arg(long = "suite")]
    suite: Vec<String>,
}

fn check_probability(flag: &'static str, x: f64) -> Result<(), CliError> {
    if x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(usage(flag, format!("{x} must lie in (0, 1]")))
    }
}

/// RESULT lines go to stdout unless the CSV itself does.
fn report(to_stderr: bool, key: &str, value: impl std::fmt::Display) {
    if to_stderr {
        eprintln!("RESULT {key}={value}");
    } else {
        println!("RESULT {key}={value}");
    }
}

fn cmd_rate_curve(args: RateCurveArgs) -> Result<(), CliError> {
    let gammas = if args.gamma.is_empty() { vec![1.0] } else { args.gamma };
    for &g in &gammas {
        check_probability("--gamma", g)?;
    }
    if !(args.e > CLASSICAL_WIN && args.e < QUANTUM_WIN) {
        return Err(usage("--e", format!("{} must lie in (3/4, cos^2(pi/8))", args.e)));
    }
    if !(args.eps > 0.0 && args.eps < 1.0) {
        return Err(usage("--eps", format!("{} must lie in (0, 1)", args.eps)));
    }
    check_probability("--pomega", args.pomega)?;
    if args.n_min == 0 {
        return Err(usage("--n-min", "must be positive"));
    }
    if args.n_max < args.n_min {
        return Err(usage(
            "--n-max",
            format!("{} is below --n-min {}", args.n_max, args.n_min),
        ));
    }
    if args.points < 2 {
        return Err(usage("--points", format!("{} is below 2", args.points)));
    }

    let mut table = CsvTable::new(&["n", "gamma", "rate", "alpha_star", "p_b"]);
    for &gamma in &gammas {
        let cfg = CurveConfig {
            gamma,
            e: args.e,
            eps: args.eps,
            p_omega: args.pomega,
            n_min: args.n_min,
            n_max: args.n_max,
            points: args.points,
            optimize_p_b: args.optimize_pb,
        };
        for p in rate_curve(&cfg)? {
            table.push(vec![
                p.n.to_string(),
                fmt_f64(p.gamma),
                fmt_f64(p.rate),
                fmt_f64(p.alpha_star),
                fmt_f64(p.p_b_used),
            ]);
        }
    }
    table.emit(args.out.as_deref())?;
    report(args.out.is_none(), "rows", table.len());
    Ok(())
}

fn cmd_bound(args: BoundArgs) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(usage("--n", "must be positive"));
    }
    if args.d_a == 0 {
        return Err(usage("--d-a", "must be at least 1"));
    }
    if !(args.eps > 0.0 && args.eps < 1.0) {
        return Err(usage("--eps", format!("{} must lie in (0, 1)", args.eps)));
    }
    check_probability("--pomega", args.pomega)?;
    if args.min_sigma_f > args.max_f {
        return Err(usage("--min-sigma-f", "exceeds --max-f"));
    }
    let min_f = args.min_f.unwrap_or(args.min_sigma_f);
    if min_f > args.min_sigma_f {
        return Err(usage("--min-f", "exceeds --min-sigma-f"));
    }
    let var_f = args.var_f.unwrap_or((args.max_f - args.min_sigma_f).powi(2) / 4.0);
    if var_f.is_nan() || var_f < 0.0 {
        return Err(usage("--var-f", format!("{var_f} is negative")));
    }
    if !args.h.is_finite() {
        return Err(usage("--h", "must be finite"));
    }
    if let Some(a) = args.alpha {
        if !(a > 1.0 && a < 2.0) {
            return Err(usage("--alpha", format!("{a} must lie in (1, 2)")));
        }
    }
    let stats = TradeoffStats::new(args.max_f, min_f, args.min_sigma_f, var_f)?;
    let params = EatParams::new(args.n, args.eps, args.pomega, args.d_a, args.classical_a, args.h)?;
    for w in params.warnings() {
        eprintln!("warning: {w}");
    }

    let d = args.d_a as f64;
    let log_term = (2.0 * d * d + 1.0).log2();
    let theorem = eat_bound_theorem(&params, &stats)?;
    println!(
        "V = sqrt(Var f + 2) + log2({}) = {}",
        2 * args.d_a * args.d_a + 1,
        fmt_f64(v_constant(&stats, args.d_a))
    );
    println!(
        "closed form: n h - c sqrt(n) - c' with c = {}, c' = {}",
        fmt_f64(theorem.c),
        fmt_f64(theorem.c_prime)
    );
    if theorem.small_n {
        println!("note: n is below the regime where the closed form is informative");
    }
    report(false, "dimension_term", fmt_f64(log_term));
    report(false, "v", fmt_f64(v_constant(&stats, args.d_a)));
    report(false, "c", fmt_f64(theorem.c));
    report(false, "c_prime", fmt_f64(theorem.c_prime));
    report(false, "small_n", theorem.small_n);
    report(false, "closed_form_bound", fmt_f64(theorem.bound));
    match args.alpha {
        Some(alpha) => {
            let b = eat_bound_alpha(&params, &stats, alpha)?;
            report(false, "alpha", fmt_f64(alpha));
            report(false, "bound_at_alpha", fmt_f64(b));
        }
        None => {
            let opt = optimize_alpha(&params, &stats)?;
            report(false, "alpha_star", fmt_f64(opt.alpha));
            report(false, "optimized_bound", fmt_f64(opt.bound));
            report(false, "rate", fmt_f64(opt.bound / args.n as f64));
        }
    }
    Ok(())
}

fn cmd_variance_curve(args: VarianceCurveArgs) -> Result<(), CliError> {
    if args.steps < 2 {
        return Err(usage("--steps", format!("{} is below 2", args.steps)));
    }
    let mut table = CsvTable::new(&["q", "v"]);
    let (mut q_max, mut v_max) = (0.0, f64::NEG_INFINITY);
    for i in 1..args.steps {
        let q = i as f64 / args.steps as f64;
        let v = bernoulli_entropy_variance(q);
        if v > v_max {
            (q_max, v_max) = (q, v);
        }
        table.push(vec![fmt_f64(q), fmt_f64(v)]);
    }
    table.emit(args.out.as_deref())?;
    let to_stderr = args.out.is_none();
    report(to_stderr, "q_max", fmt_f64(q_max));
    report(to_stderr, "v_max", fmt_f64(v_max));
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let known = suite_names();
    for s in &args.suite {
        if !known.contains(&s.as_str()) {
            return Err(usage(
                "--suite",
                format!("unknown suite {s:?}; known: {}", known.join(", ")),
            ));
        }
    }
    if args.trials == 0 {
        return Err(usage("--trials", "must be positive"));
    }
    let reports = run_suites(&args.suite, args.seed, args.trials)?;
    let mut failed = 0;
    for r in &reports {
        let status = if r.ok() { "ok" } else { "FAILED" };
        println!("{:<22} {:>5} passed {:>5} failed  {status}", r.name, r.passed, r.failed);
        for (trial, msg) in r.failures.iter().take(5) {
            println!("    trial {trial}: {msg}");
        }
        println!("RESULT suite={} passed={} failed={}", r.name, r.passed, r.failed);
        if !r.ok() {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(CliError::Property(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::RateCurve(a) => cmd_rate_curve(a),
        Command::Bound(a) => cmd_bound(a),
        Command::VarianceCurve(a) => cmd_variance_curve(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
