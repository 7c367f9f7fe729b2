//! Entropy accumulation with an improved second-order term.
//!
//! Everything here works from four scalar statistics of an affine min-tradeoff
//! function (`Max f`, `Min f`, a lower bound on `Min_Σ f` and an upper bound
//! on `Var f`) plus the protocol parameters in [`EatParams`].

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::states::ProbDist;

/// Label of the "no test" symbol added by [`infrequent_tradeoff`].
pub const NO_TEST: &str = "⊥";

/// Search interval for the Rényi order, `α ∈ [1 + 1e-9, 2 − 1e-6]`.
pub const ALPHA_MIN: f64 = 1.0 + 1e-9;
pub const ALPHA_MAX: f64 = 2.0 - 1e-6;

const GRID_POINTS: usize = 64;
const STATS_TOL: f64 = 1e-12;

/// Affine function on distributions over a finite alphabet, stored through
/// its values on point masses.
#[derive(Clone, Debug, PartialEq)]
pub struct TradeoffFunction {
    alphabet: Vec<String>,
    values: Vec<f64>,
}

impl TradeoffFunction {
    pub fn new(alphabet: Vec<String>, values: Vec<f64>) -> Result<Self> {
        if alphabet.is_empty() || alphabet.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "{} symbols for {} values",
                alphabet.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("tradeoff values must be finite".into()));
        }
        Ok(Self { alphabet, values })
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `f(δ_x)`.
    pub fn value(&self, symbol: &str) -> Option<f64> {
        self.alphabet.iter().position(|a| a == symbol).map(|i| self.values[i])
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `f(q) = Σ_x q(x) f(δ_x)`; `q` must use the same alphabet.
    pub fn evaluate(&self, q: &ProbDist) -> Result<f64> {
        if q.alphabet() != self.alphabet.as_slice() {
            return Err(Error::DimensionMismatch(
                "distribution alphabet differs from tradeoff alphabet".into(),
            ));
        }
        Ok(q.weights().iter().zip(&self.values).map(|(p, v)| p * v).sum())
    }

    /// `Σ q f(δ_x)² − f(q)²`, the variance of `f` under `q`.
    pub fn variance_under(&self, q: &ProbDist) -> Result<f64> {
        let mean = self.evaluate(q)?;
        Ok(q.weights()
            .iter()
            .zip(&self.values)
            .map(|(p, v)| p * (v - mean).powi(2))
            .sum())
    }
}

/// The four statistics of a tradeoff function used by the bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TradeoffStats {
    pub max_f: f64,
    pub min_f: f64,
    /// Lower bound on `Min_Σ f`.
    pub min_sigma_f: f64,
    /// Upper bound on `Var f`, in bits².
    pub var_f: f64,
}

impl TradeoffStats {
    pub fn new(max_f: f64, min_f: f64, min_sigma_f: f64, var_f: f64) -> Result<Self> {
        let all = [max_f, min_f, min_sigma_f, var_f];
        if all.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("tradeoff statistics must be finite".into()));
        }
        let tol = STATS_TOL * max_f.abs().max(min_f.abs()).max(1.0);
        if min_f > min_sigma_f + tol || min_sigma_f > max_f + tol {
            return Err(Error::InvalidParameter(format!(
                "need min_f <= min_sigma_f <= max_f, got {min_f}, {min_sigma_f}, {max_f}"
            )));
        }
        if var_f < 0.0 {
            return Err(Error::InvalidParameter(format!("var_f = {var_f} is negative")));
        }
        Ok(Self {
            max_f,
            min_f,
            min_sigma_f,
            var_f,
        })
    }

    /// `Max f − Min_Σ f`.
    pub fn spread(&self) -> f64 {
        self.max_f - self.min_sigma_f
    }
}

/// Statistics of `f`. Without hints, `Min_Σ f` falls back to `Min f` and
/// `Var f` to the unconstrained maximum `(Max f − Min f)²/4`.
pub fn tradeoff_stats(
    f: &TradeoffFunction,
    min_sigma_hint: Option<f64>,
    var_hint: Option<f64>,
) -> Result<TradeoffStats> {
    let (max_f, min_f) = (f.max(), f.min());
    let min_sigma_f = min_sigma_hint.unwrap_or(min_f);
    let var_f = var_hint.unwrap_or((max_f - min_f).powi(2) / 4.0);
    TradeoffStats::new(max_f, min_f, min_sigma_f, var_f)
}

/// Scalar inputs of the accumulation bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EatParams {
    /// Number of rounds.
    pub n: u64,
    /// Smoothing parameter.
    pub eps: f64,
    /// Lower bound on the probability of the non-abort event.
    pub p_omega: f64,
    /// Largest dimension of the systems `A_i`.
    pub d_a: usize,
    pub classical_a: bool,
    /// Entropy threshold `h` in bits per round.
    pub h: f64,
}

impl EatParams {
    pub fn new(n: u64, eps: f64, p_omega: f64, d_a: usize, classical_a: bool, h: f64) -> Result<Self> {
        let p = Self {
            n,
            eps,
            p_omega,
            d_a,
            classical_a,
            h,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidParameter(format!("eps = {} outside (0, 1)", self.eps)));
        }
        if !(self.p_omega > 0.0 && self.p_omega <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "p_omega = {} outside (0, 1]",
                self.p_omega
            )));
        }
        if self.d_a < 2 {
            return Err(Error::InvalidParameter(format!(
                "d_A = {} must be at least 2",
                self.d_a
            )));
        }
        if !self.h.is_finite() {
            return Err(Error::InvalidParameter("h must be finite".into()));
        }
        Ok(())
    }

    /// Caveats that do not invalidate the bound.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let cap = (self.d_a as f64).log2();
        if self.h > cap {
            out.push(format!(
                "h = {} exceeds log d_A = {cap}; the event Omega then has probability zero",
                self.h
            ));
        }
        out
    }

    /// `log(2/(ε² pΩ²)) = 1 − 2 log(ε pΩ)`.
    pub fn smoothing_log(&self) -> f64 {
        1.0 - 2.0 * (self.eps * self.p_omega).log2()
    }

    fn n_f64(&self) -> f64 {
        self.n as f64
    }
}

/// `V = √(Var f + 2) + log(2 d_A² + 1)`.
pub fn v_constant(stats: &TradeoffStats, d_a: usize) -> f64 {
    let d = d_a as f64;
    (stats.var_f + 2.0).sqrt() + (2.0 * d * d + 1.0).log2()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::AlphaOutOfRange { alpha, range: "(1, 2)" });
    }
    Ok(())
}

/// `ln(2^x + e²)`, stable for large `x`.
fn ln_pow2_plus_e2(x: f64) -> f64 {
    let a = x * LN_2;
    let (hi, lo) = if a > 2.0 { (a, 2.0) } else { (2.0, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `2 log d_A + (Max f − Min_Σ f)`, or `log d_A + …` for classical `A`.
fn k_exponent(stats: &TradeoffStats, d_a: usize, classical_a: bool) -> f64 {
    let dims = if classical_a { 1.0 } else { 2.0 };
    dims * (d_a as f64).log2() + stats.spread()
}

/// `K_α = 1/(6(2−α)³ ln2) · 2^{(α−1)E} · ln³(2^E + e²)` with `E` the
/// dimension-plus-spread exponent.
pub fn k_alpha(stats: &TradeoffStats, d_a: usize, classical_a: bool, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let e = k_exponent(stats, d_a, classical_a);
    Ok(((alpha - 1.0) * e).exp2() * ln_pow2_plus_e2(e).powi(3) / (6.0 * (2.0 - alpha).powi(3) * LN_2))
}

/// Whether the `(α−1)² K_α` term enters the bound. Dropping it is only
/// useful for checking the optimizer against its calculus closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Remainder {
    #[default]
    Included,
    Dropped,
}

/// Everything but `n h`; the optimizer works on this to keep the large
/// first-order term out of its comparisons.
fn penalty(p: &EatParams, stats: &TradeoffStats, alpha: f64, remainder: Remainder) -> Result<f64> {
    check_alpha(alpha)?;
    let n = p.n_f64();
    let v = v_constant(stats, p.d_a);
    let a1 = alpha - 1.0;
    let k = match remainder {
        Remainder::Included => k_alpha(stats, p.d_a, p.classical_a, alpha)?,
        Remainder::Dropped => 0.0,
    };
    Ok(-n * a1 * LN_2 / 2.0 * v * v - p.smoothing_log() / a1 - n * a1 * a1 * k)
}

/// Smooth min-entropy lower bound at a fixed `α ∈ (1, 2)`:
/// `n h − n(α−1) ln2/2 · V² − log(2/(ε² pΩ²))/(α−1) − n(α−1)² K_α`.
pub fn eat_bound_alpha(p: &EatParams, stats: &TradeoffStats, alpha: f64) -> Result<f64> {
    eat_bound_alpha_with(p, stats, alpha, Remainder::Included)
}

/// [`eat_bound_alpha`] with control over the remainder term.
pub fn eat_bound_alpha_with(p: &EatParams, stats: &TradeoffStats, alpha: f64, remainder: Remainder) -> Result<f64> {
    p.validate()?;
    Ok(p.n_f64() * p.h + penalty(p, stats, alpha, remainder)?)
}

/// Lower bound on `H↑_α` of the conditioned state:
/// `n h − n(α−1) ln2/2 · V² − α/(α−1) · log(1/pΩ) − n(α−1)² K_α`.
pub fn eat_bound_renyi(p: &EatParams, stats: &TradeoffStats, alpha: f64) -> Result<f64> {
    p.validate()?;
    check_alpha(alpha)?;
    let n = p.n_f64();
    let v = v_constant(stats, p.d_a);
    let a1 = alpha - 1.0;
    let k = k_alpha(stats, p.d_a, p.classical_a, alpha)?;
    Ok(n * p.h - n * a1 * LN_2 / 2.0 * v * v - alpha / a1 * (1.0 / p.p_omega).log2() - n * a1 * a1 * k)
}

/// The closed-form bound `n h − c√n − c′`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoremBound {
    pub bound: f64,
    pub c: f64,
    pub c_prime: f64,
    /// `n < 8 ln2 · log(2/(ε²pΩ²)) / V²`: the closed form is then only
    /// vacuously true.
    pub small_n: bool,
}

/// Closed-form bound with
/// `c = √(2 ln2) · V · √(1 − 2 log(ε pΩ))` and
/// `c′ = 35 (1 − 2 log(ε pΩ)) / V² · 2^{E} ln³(2^{E} + e²)`,
/// `E = 2 log d_A + Max f − Min_Σ f`.
pub fn eat_bound_theorem(p: &EatParams, stats: &TradeoffStats) -> Result<TheoremBound> {
    p.validate()?;
    let n = p.n_f64();
    let t = p.smoothing_log();
    let v = v_constant(stats, p.d_a);
    let c = (2.0 * LN_2).sqrt() * v * t.sqrt();
    let e = k_exponent(stats, p.d_a, false);
    let c_prime = 35.0 * t / (v * v) * e.exp2() * ln_pow2_plus_e2(e).powi(3);
    Ok(TheoremBound {
        bound: n * p.h - c * n.sqrt() - c_prime,
        c,
        c_prime,
        small_n: n < 8.0 * LN_2 * t / (v * v),
    })
}

/// `α = 1 + √(2 log(2/(ε²pΩ²))) / (√(n ln2) V)`, the order that balances the
/// two leading penalties (and maximizes the bound when `K_α` is dropped).
pub fn closed_form_alpha(p: &EatParams, stats: &TradeoffStats) -> f64 {
    let v = v_constant(stats, p.d_a);
    1.0 + (2.0 * p.smoothing_log()).sqrt() / ((p.n_f64() * LN_2).sqrt() * v)
}

/// Result of the order optimization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaOptimum {
    pub alpha: f64,
    pub bound: f64,
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
pub fn golden_section_max(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Maximizes [`eat_bound_alpha`] over `α ∈ [ALPHA_MIN, ALPHA_MAX]`.
pub fn optimize_alpha(p: &EatParams, stats: &TradeoffStats) -> Result<AlphaOptimum> {
    optimize_alpha_with(p, stats, Remainder::Included)
}

/// [`optimize_alpha`] with control over the remainder term.
///
/// The optimal `α − 1` spans many decades as `n` varies, so the search runs
/// over `u = ln(α − 1)`: golden section over the whole interval, then a
/// 64-point log-uniform verification grid plus the closed-form order. If a
/// candidate beats the golden result, the search is repeated on the grid
/// cell around it.
pub fn optimize_alpha_with(p: &EatParams, stats: &TradeoffStats, remainder: Remainder) -> Result<AlphaOptimum> {
    p.validate()?;
    let objective = |u: f64| penalty(p, stats, 1.0 + u.exp(), remainder).unwrap_or(f64::NEG_INFINITY);
    let (u_lo, u_hi) = ((ALPHA_MIN - 1.0).ln(), (ALPHA_MAX - 1.0).ln());
    let tol = 1e-12;
    let (mut best_u, mut best) = golden_section_max(objective, u_lo, u_hi, tol);

    let step = (u_hi - u_lo) / (GRID_POINTS - 1) as f64;
    let mut candidates: Vec<f64> = (0..GRID_POINTS).map(|i| u_lo + step * i as f64).collect();
    let seed = (closed_form_alpha(p, stats) - 1.0).ln().clamp(u_lo, u_hi);
    candidates.push(seed);
    for &u in &candidates {
        let value = objective(u);
        if value > best + 1e-12 * best.abs() {
            let (lo, hi) = ((u - step).max(u_lo), (u + step).min(u_hi));
            let (ru, rv) = golden_section_max(objective, lo, hi, tol);
            let (cu, cv) = if rv >= value { (ru, rv) } else { (u, value) };
            best_u = cu;
            best = cv;
        }
    }
    let alpha = 1.0 + best_u.exp();
    Ok(AlphaOptimum {
        alpha,
        bound: p.n_f64() * p.h + best,
    })
}

/// Builds the tradeoff function for infrequent sampling with test
/// probability `γ`: `f(δ_x) = Max g + (g(δ_x) − Max g)/γ` on the test
/// alphabet and `f(⊥) = Max g`. The returned statistics use
/// `Min_Σ f ≥ Min g` and `Var f ≤ (Max g − Min g)²/γ`.
pub fn infrequent_tradeoff(g: &TradeoffFunction, gamma: f64) -> Result<(TradeoffFunction, TradeoffStats)> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    if g.value(NO_TEST).is_some() {
        return Err(Error::InvalidParameter(format!(
            "test alphabet already contains {NO_TEST:?}"
        )));
    }
    let (max_g, min_g) = (g.max(), g.min());
    let mut alphabet = g.alphabet().to_vec();
    let mut values: Vec<f64> = g.values().iter().map(|&v| max_g + (v - max_g) / gamma).collect();
    alphabet.push(NO_TEST.to_string());
    values.push(max_g);
    let f = TradeoffFunction::new(alphabet, values)?;
    let stats = TradeoffStats::new(
        max_g,
        (1.0 - 1.0 / gamma) * max_g + min_g / gamma,
        min_g,
        (max_g - min_g).powi(2) / gamma,
    )?;
    Ok((f, stats))
}
