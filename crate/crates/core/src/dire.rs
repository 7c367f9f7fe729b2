//! Device-independent randomness expansion from the CHSH game.
//!
//! A winning probability `ω` certifies `g*(ω) = 1 − h(1/2 + 1/2 √(16ω(ω−1)+3))`
//! bits per round. The accumulation bound needs an affine tradeoff function,
//! so `g*` is replaced by its tangent at some `p_b`, spread over test and
//! non-test rounds with [`infrequent_tradeoff`], and fed into the
//! α-optimized bound.

use rayon::prelude::*;

use crate::eat::{golden_section_max, infrequent_tradeoff, optimize_alpha, EatParams, TradeoffFunction, TradeoffStats};
use crate::error::{Error, Result};

/// Classical winning probability of the CHSH game.
pub const CLASSICAL_WIN: f64 = 0.75;

/// Quantum winning probability `cos²(π/8) = (2 + √2)/4`.
pub const QUANTUM_WIN: f64 = 0.853_553_390_593_273_8;

/// Each round accumulates the two output bits `A_i B_i`.
pub const ROUND_DIM: usize = 4;

/// Defaults used for the published rate curves.
pub const DEFAULT_EPS: f64 = 1e-5;
pub const DEFAULT_P_OMEGA: f64 = 1e-5;
pub const DEFAULT_E: f64 = 0.8;

const PB_GRID: usize = 32;
const PB_LOWER: f64 = CLASSICAL_WIN + 1e-4;

/// Binary entropy in bits; zero at the endpoints.
pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn chsh_radius(omega: f64) -> f64 {
    (16.0 * omega * (omega - 1.0) + 3.0).max(0.0).sqrt()
}

/// `g*(ω)`, clamped to 0 below 3/4 and to 1 above `cos²(π/8)`.
pub fn g_star(omega: f64) -> f64 {
    if omega <= CLASSICAL_WIN {
        return 0.0;
    }
    if omega >= QUANTUM_WIN {
        return 1.0;
    }
    1.0 - binary_entropy(0.5 + 0.5 * chsh_radius(omega).min(1.0))
}

/// `dg*/dω = (2 atanh(r)/ln2) · (8ω − 4)/r` with `r = √(16ω(ω−1)+3)`,
/// defined on the open interval. Tends to `4/ln2` at 3/4 and diverges at
/// `cos²(π/8)`.
pub fn g_star_derivative(omega: f64) -> Result<f64> {
    if !(omega > CLASSICAL_WIN && omega < QUANTUM_WIN) {
        return Err(Error::DomainError(format!(
            "dg*/domega needs omega in (3/4, cos^2(pi/8)), got {omega}"
        )));
    }
    let r = chsh_radius(omega);
    // atanh(r)/r through its series where the quotient loses precision.
    let ratio = if r < 1e-4 {
        let r2 = r * r;
        1.0 + r2 / 3.0 + r2 * r2 / 5.0
    } else {
        r.atanh() / r
    };
    Ok(2.0 * ratio / std::f64::consts::LN_2 * (8.0 * omega - 4.0))
}

/// Tangent to `g*` at `p_b`: `g_{p_b}(p) = g*(p_b) + (p − p_b) g*′(p_b)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tangent {
    pub p_b: f64,
    pub value: f64,
    pub slope: f64,
}

impl Tangent {
    pub fn at(p_b: f64) -> Result<Self> {
        Ok(Self {
            p_b,
            value: g_star(p_b),
            slope: g_star_derivative(p_b)?,
        })
    }

    pub fn eval(&self, p: f64) -> f64 {
        self.value + (p - self.p_b) * self.slope
    }

    /// As a tradeoff function on test outcomes `{0 = lost, 1 = won}`.
    pub fn tradeoff(&self) -> TradeoffFunction {
        TradeoffFunction::new(vec!["0".into(), "1".into()], vec![self.eval(0.0), self.eval(1.0)])
            .expect("tangent values are finite")
    }
}

/// [`Tangent::tradeoff`] for the tangent at `p_b`.
pub fn tangent_tradeoff(p_b: f64) -> Result<TradeoffFunction> {
    Ok(Tangent::at(p_b)?.tradeoff())
}

/// One point of a rate curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub n: u64,
    pub gamma: f64,
    /// Certified bits per round.
    pub rate: f64,
    pub alpha_star: f64,
    pub p_b_used: f64,
}

/// Protocol parameters for a single rate evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DireConfig {
    pub n: u64,
    pub gamma: f64,
    /// Minimum tolerated winning fraction.
    pub e: f64,
    pub eps: f64,
    pub p_omega: f64,
    /// Tangent point; `None` means `p_b = e`.
    pub p_b: Option<f64>,
}

impl DireConfig {
    pub fn new(n: u64, gamma: f64, e: f64) -> Result<Self> {
        let cfg = Self {
            n,
            gamma,
            e,
            eps: DEFAULT_EPS,
            p_omega: DEFAULT_P_OMEGA,
            p_b: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::GammaOutOfRange(self.gamma));
        }
        for (name, v) in [("e", self.e), ("p_b", self.p_b_used())] {
            if !(v > CLASSICAL_WIN && v < QUANTUM_WIN) {
                return Err(Error::InvalidParameter(format!(
                    "{name} = {v} outside (3/4, cos^2(pi/8))"
                )));
            }
        }
        EatParams::new(self.n, self.eps, self.p_omega, ROUND_DIM, true, 0.0).map(|_| ())
    }

    pub fn p_b_used(&self) -> f64 {
        self.p_b.unwrap_or(self.e)
    }
}

/// Tradeoff function and statistics for a protocol with testing rate `γ`
/// and tangent point `p_b`.
pub fn protocol_tradeoff(p_b: f64, gamma: f64) -> Result<(Tangent, TradeoffFunction, TradeoffStats)> {
    let tangent = Tangent::at(p_b)?;
    let (f, stats) = infrequent_tradeoff(&tangent.tradeoff(), gamma)?;
    Ok((tangent, f, stats))
}

/// Certified rate `bound / n` with the order `α` optimized numerically.
pub fn dire_rate(cfg: &DireConfig) -> Result<RatePoint> {
    cfg.validate()?;
    let p_b = cfg.p_b_used();
    let (tangent, _, stats) = protocol_tradeoff(p_b, cfg.gamma)?;
    let params = EatParams::new(cfg.n, cfg.eps, cfg.p_omega, ROUND_DIM, true, tangent.eval(cfg.e))?;
    let opt = optimize_alpha(&params, &stats)?;
    Ok(RatePoint {
        n: cfg.n,
        gamma: cfg.gamma,
        rate: opt.bound / cfg.n as f64,
        alpha_star: opt.alpha,
        p_b_used: p_b,
    })
}

/// Best rate over tangent points in `[3/4 + 1e-4, e]`: a 32-point grid,
/// golden refinement around the best grid point, and `p_b = e` itself.
pub fn optimize_p_b(cfg: &DireConfig) -> Result<RatePoint> {
    cfg.validate()?;
    let at = |p_b: f64| dire_rate(&DireConfig { p_b: Some(p_b), ..*cfg });
    let mut best = at(cfg.e)?;
    let lo = PB_LOWER.min(cfg.e);
    let step = (cfg.e - lo) / (PB_GRID - 1) as f64;
    if step <= 0.0 {
        return Ok(best);
    }
    let mut best_grid = best;
    for i in 0..PB_GRID {
        let point = at(lo + step * i as f64)?;
        if point.rate > best_grid.rate {
            best_grid = point;
        }
    }
    let center = best_grid.p_b_used;
    let (a, b) = ((center - step).max(lo), (center + step).min(cfg.e));
    let (p_star, _) = golden_section_max(|p| at(p).map(|r| r.rate).unwrap_or(f64::NEG_INFINITY), a, b, 1e-7);
    for candidate in [best_grid, at(p_star)?] {
        if candidate.rate > best.rate {
            best = candidate;
        }
    }
    Ok(best)
}

/// Inputs of a rate curve over a log-spaced range of `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveConfig {
    pub gamma: f64,
    pub e: f64,
    pub eps: f64,
    pub p_omega: f64,
    pub n_min: u64,
    pub n_max: u64,
    pub points: usize,
    pub optimize_p_b: bool,
}

impl CurveConfig {
    /// Published defaults: `e = 0.8`, `ε = pΩ = 1e-5`, `n ∈ [1e5, 1e10]`, 20 points.
    pub fn with_gamma(gamma: f64) -> Self {
        Self {
            gamma,
            e: DEFAULT_E,
            eps: DEFAULT_EPS,
            p_omega: DEFAULT_P_OMEGA,
            n_min: 100_000,
            n_max: 10_000_000_000,
            points: 20,
            optimize_p_b: false,
        }
    }
}

/// `points` values log-uniformly spaced on `[n_min, n_max]`, rounded to
/// integers; the endpoints are exact.
pub fn log_grid(n_min: u64, n_max: u64, points: usize) -> Result<Vec<u64>> {
    if points < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 points, got {points}")));
    }
    if n_min == 0 || n_max < n_min {
        return Err(Error::InvalidParameter(format!("invalid n range [{n_min}, {n_max}]")));
    }
    let (lo, hi) = ((n_min as f64).ln(), (n_max as f64).ln());
    Ok((0..points)
        .map(|k| match k {
            0 => n_min,
            k if k == points - 1 => n_max,
            k => (lo + (hi - lo) * k as f64 / (points - 1) as f64).exp().round() as u64,
        })
        .collect())
}

/// One rate per grid value of `n`, computed in parallel, in grid order.
pub fn rate_curve(cfg: &CurveConfig) -> Result<Vec<RatePoint>> {
    let grid = log_grid(cfg.n_min, cfg.n_max, cfg.points)?;
    grid.par_iter()
        .map(|&n| {
            let point = DireConfig {
                n,
                gamma: cfg.gamma,
                e: cfg.e,
                eps: cfg.eps,
                p_omega: cfg.p_omega,
                p_b: None,
            };
            if cfg.optimize_p_b {
                optimize_p_b(&point)
            } else {
                dire_rate(&point)
            }
        })
        .collect()
}

/// Value of the infrequent-sampling tradeoff function on the empirical
/// frequencies of `n` rounds with `wins` won and `losses` lost test rounds.
pub fn tradeoff_at_counts(tangent: &Tangent, gamma: f64, n: u64, wins: u64, losses: u64) -> Result<f64> {
    if wins + losses > n {
        return Err(Error::InvalidParameter(format!(
            "{wins} + {losses} test rounds exceed n = {n}"
        )));
    }
    let (_, stats) = infrequent_tradeoff(&tangent.tradeoff(), gamma)?;
    let f_lost = stats.max_f + (tangent.eval(0.0) - stats.max_f) / gamma;
    let f_won = stats.max_f + (tangent.eval(1.0) - stats.max_f) / gamma;
    let n_f = n as f64;
    let (w, l) = (wins as f64 / n_f, losses as f64 / n_f);
    Ok(w * f_won + l * f_lost + (1.0 - w - l) * stats.max_f)
}

/// The protocol accepts iff at most `(1 − e) γ n` test rounds were lost.
pub fn accepts(gamma: f64, e: f64, n: u64, losses: u64) -> bool {
    losses as f64 <= (1.0 - e) * gamma * n as f64
}
