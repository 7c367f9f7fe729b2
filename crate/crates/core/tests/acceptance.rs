//! Acceptance run: one PASS/FAIL line per criterion, with its runtime
//! against the budget. Exits non-zero if any criterion fails.

use std::time::{Duration, Instant};

use eatkit::dire::{dire_rate, g_star, log_grid, protocol_tradeoff, DireConfig, QUANTUM_WIN, ROUND_DIM};
use eatkit::eat::{
    closed_form_alpha, eat_bound_theorem, optimize_alpha, optimize_alpha_with, v_constant, EatParams, Remainder,
};
use eatkit::variance::bernoulli_entropy_variance;
use eatkit::verify::run_suite;

const SEED: u64 = 42;
const GAMMAS: [f64; 6] = [1.0, 0.1, 0.01, 1e-3, 1e-4, 3e-5];
const FIRST_ORDER: f64 = 0.3461;

type Check = std::result::Result<(), String>;
type Criterion = (&'static str, Duration, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suites(names: &[&str], trials: usize) -> Check {
    let mut bad = Vec::new();
    for name in names {
        let r = run_suite(name, SEED, trials).map_err(|e| e.to_string())?;
        if !r.ok() {
            bad.push(format!(
                "{name}: {} of {trials} failed, first: {}",
                r.failed, r.failures[0].1
            ));
        }
    }
    ensure(bad.is_empty(), || bad.join("; "))
}

fn published_grid() -> Vec<u64> {
    log_grid(100_000, 10_000_000_000, 20).unwrap()
}

fn rate(n: u64, gamma: f64) -> Result<f64, String> {
    let cfg = DireConfig::new(n, gamma, 0.8).map_err(|e| e.to_string())?;
    Ok(dire_rate(&cfg).map_err(|e| e.to_string())?.rate)
}

fn published_params(n: u64, gamma: f64) -> (EatParams, eatkit::eat::TradeoffStats) {
    let (tangent, _, stats) = protocol_tradeoff(0.8, gamma).unwrap();
    let p = EatParams::new(n, 1e-5, 1e-5, ROUND_DIM, true, tangent.eval(0.8)).unwrap();
    (p, stats)
}

fn variance_peak() -> Check {
    let steps = 1000;
    let (mut q_max, mut v_max) = (0.0, f64::NEG_INFINITY);
    for i in 1..steps {
        let q = i as f64 / steps as f64;
        let v = bernoulli_entropy_variance(q);
        if v > v_max {
            (q_max, v_max) = (q, v);
        }
    }
    ensure((q_max - 0.083).abs() <= 0.002, || format!("peak at q = {q_max}"))?;
    ensure((v_max - 0.9142).abs() <= 1e-3, || format!("peak value {v_max}"))
}

fn first_order_rate() -> Check {
    let mid = g_star(0.8);
    ensure((mid - FIRST_ORDER).abs() <= 5e-4, || format!("g*(0.8) = {mid}"))?;
    ensure(g_star(0.75).abs() <= 1e-9, || format!("g*(3/4) = {}", g_star(0.75)))?;
    let top = g_star(QUANTUM_WIN);
    ensure((top - 1.0).abs() <= 1e-9, || format!("g*(cos^2(pi/8)) = {top}"))
}

fn rate_curve_shape() -> Check {
    let grid = published_grid();
    let mut curves = Vec::new();
    for gamma in GAMMAS {
        let rates: Vec<f64> = grid.iter().map(|&n| rate(n, gamma)).collect::<Result<_, _>>()?;
        for (n, r) in grid.iter().zip(&rates) {
            ensure(*r < FIRST_ORDER, || format!("(a) rate {r} at n = {n}, gamma = {gamma}"))?;
        }
        for (w, n) in rates.windows(2).zip(grid.windows(2)) {
            ensure(w[1] >= w[0], || {
                format!("(c) gamma = {gamma}: rate drops from n = {} to n = {}", n[0], n[1])
            })?;
        }
        curves.push(rates);
    }
    for (k, pair) in curves.windows(2).enumerate() {
        for (i, n) in grid.iter().enumerate() {
            ensure(pair[0][i] >= pair[1][i], || {
                format!("(b) gamma = {} below gamma = {} at n = {n}", GAMMAS[k], GAMMAS[k + 1])
            })?;
        }
    }
    for gamma in [3e-5, 1e-4] {
        let r = rate(10_000_000_000, gamma)?;
        ensure(r > 0.0, || format!("(d) rate {r} at gamma = {gamma}, n = 1e10"))?;
    }
    let far = rate(100_000_000_000_000, 1.0)?;
    ensure((far - FIRST_ORDER).abs() <= 5e-4, || {
        format!("(e) rate {far} at n = 1e14")
    })
}

fn variance_suites() -> Check {
    suites(
        &[
            "additivity",
            "classical-x",
            "markov",
            "var-decomp",
            "chain-rule",
            "orthogonal-branches",
            "dimension-bounds",
            "general-bound",
            "data-processing",
        ],
        100,
    )
}

fn continuity_chain() -> Check {
    suites(&["continuity", "nussbaum-szkola"], 100)
}

fn oracle_equivalences() -> Check {
    suites(&["commuting", "arimoto"], 100)?;
    for gamma in GAMMAS {
        for n in published_grid() {
            let (p, stats) = published_params(n, gamma);
            let target = closed_form_alpha(&p, &stats);
            let found = optimize_alpha_with(&p, &stats, Remainder::Dropped).map_err(|e| e.to_string())?;
            ensure((found.alpha - target).abs() <= 1e-6, || {
                format!(
                    "gamma = {gamma}, n = {n}: alpha {} vs closed form {target}",
                    found.alpha
                )
            })?;
        }
    }
    Ok(())
}

fn bound_consistency() -> Check {
    for gamma in GAMMAS {
        for n in published_grid() {
            let (p, stats) = published_params(n, gamma);
            let opt = optimize_alpha(&p, &stats).map_err(|e| e.to_string())?;
            let theorem = eat_bound_theorem(&p, &stats).map_err(|e| e.to_string())?;
            ensure(opt.bound >= theorem.bound, || {
                format!(
                    "gamma = {gamma}, n = {n}: optimized {} < closed form {}",
                    opt.bound, theorem.bound
                )
            })?;
            let unit = (2.0 * std::f64::consts::LN_2).sqrt() * p.smoothing_log().sqrt();
            let dimension_part = theorem.c / unit - (stats.var_f + 2.0).sqrt();
            ensure(
                (dimension_part - 33f64.log2()).abs() <= 1e-9 * v_constant(&stats, 4),
                || format!("c carries {dimension_part} instead of log 33"),
            )?;
        }
    }
    Ok(())
}

fn register_suites() -> Check {
    suites(&["mixture", "cq-dimension"], 50)
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 variance curve peak", Duration::from_secs(1), variance_peak),
        ("2 first-order rate", Duration::from_secs(1), first_order_rate),
        ("3 rate curve shape", Duration::from_secs(30), rate_curve_shape),
        ("4 variance identity suites", Duration::from_secs(120), variance_suites),
        ("5 continuity chain", Duration::from_secs(60), continuity_chain),
        ("6 oracle equivalences", Duration::from_secs(60), oracle_equivalences),
        ("7 bound consistency", Duration::from_secs(10), bound_consistency),
        ("8 mixture and cq-dimension", Duration::from_secs(60), register_suites),
    ];
    let mut failed = 0;
    for (name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = outcome.and_then(|()| ensure(took <= budget, || format!("took {took:.2?}, budget {budget:.0?}")));
        match outcome {
            Ok(()) => println!("PASS criterion {name} ({took:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} ({took:.2?}): {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
