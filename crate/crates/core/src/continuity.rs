//! Explicit second-order continuity of Rényi divergences around `α = 1`:
//!
//! `D_α ≤ D'_α ≤ D + (α−1) ln2/2 · V + (α−1)² K_{ρ,σ}(α, μ)`.

use std::f64::consts::LN_2;

use crate::divergences::{
    classical_renyi, cond_entropy, nussbaum_szkola, petz_renyi, relative_entropy, sandwiched_renyi,
    von_neumann_conditional, Variant,
};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::states::DensityOperator;
use crate::variance::divergence_variance;

/// Slack allowed in the inequality chain.
pub const CHAIN_SLACK: f64 = 1e-9;

/// `ln(2^x + e²)` without overflow for large `x`.
fn ln_pow2_plus_e2(x: f64) -> f64 {
    let a = x * LN_2;
    let (hi, lo) = if a > 2.0 { (a, 2.0) } else { (2.0, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `1/(6μ³ ln2) · 2^{(α−1)g₁} · ln³(2^{(α+μ−1)g₂} + e²)` with `g₁ = D'_α − D`
/// and `g₂ = D'_{α+μ} − D`.
pub fn remainder_from_gaps(alpha: f64, mu: f64, gap_alpha: f64, gap_alpha_mu: f64) -> f64 {
    let prefactor = 1.0 / (6.0 * mu.powi(3) * LN_2);
    let growth = ((alpha - 1.0) * gap_alpha).exp2();
    prefactor * growth * ln_pow2_plus_e2((alpha + mu - 1.0) * gap_alpha_mu).powi(3)
}

/// Petz divergence for any `α ≥ 0`. Inside `[0, 2]` it is evaluated on the
/// matrices; above 2, where the definition stops, through the
/// Nussbaum–Szkoła distributions, which extend it.
fn petz_extended(rho: &ComplexMatrix, sigma: &ComplexMatrix, alpha: f64) -> Result<f64> {
    if alpha <= 2.0 {
        petz_renyi(rho, sigma, alpha)
    } else {
        let (p, q) = nussbaum_szkola(rho, sigma)?;
        classical_renyi(&p, &q, alpha)
    }
}

fn check_orders(alpha: f64, mu: f64) -> Result<()> {
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            range: "(1, inf)",
        });
    }
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::InvalidParameter(format!("mu = {mu} outside (0, 1)")));
    }
    Ok(())
}

/// `K_{ρ,σ}(α, μ)` for `α > 1`, `μ ∈ (0, 1)`.
pub fn k_remainder(rho: &ComplexMatrix, sigma: &ComplexMatrix, alpha: f64, mu: f64) -> Result<f64> {
    check_orders(alpha, mu)?;
    let d = relative_entropy(rho, sigma)?;
    if d.is_infinite() {
        return Err(Error::SupportViolation);
    }
    let da = petz_extended(rho, sigma, alpha)?;
    let dam = petz_extended(rho, sigma, alpha + mu)?;
    if da.is_infinite() || dam.is_infinite() {
        return Err(Error::DivergenceInfinite("D'"));
    }
    Ok(remainder_from_gaps(alpha, mu, da - d, dam - d))
}

/// `K(α)` for conditional entropies with `μ = 2 − α`:
/// `1/(6(2−α)³ ln2) · 2^{(α−1)(H − H'_α)} · ln³(2^{H − H'_2} + e²)`.
pub fn k_conditional(rho: &DensityOperator, a: &[&str], b: &[&str], alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::AlphaOutOfRange { alpha, range: "(1, 2)" });
    }
    let h = von_neumann_conditional(rho, a, b)?;
    let h_alpha = cond_entropy(rho, a, b, alpha, Variant::Petz)?;
    let h_two = cond_entropy(rho, a, b, 2.0, Variant::Petz)?;
    Ok(remainder_from_gaps(alpha, 2.0 - alpha, h - h_alpha, h - h_two))
}

/// All quantities of the continuity chain at one `(α, μ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuityReport {
    pub alpha: f64,
    pub mu: f64,
    pub lhs_sandwiched: f64,
    pub lhs_petz: f64,
    /// `D + (α−1) ln2/2 · V + (α−1)² K`.
    pub rhs: f64,
    pub k: f64,
    pub relative_entropy: f64,
    pub variance: f64,
}

impl ContinuityReport {
    /// Whether `D_α ≤ D'_α ≤ rhs` holds up to `slack`.
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs_sandwiched <= self.lhs_petz + slack && self.lhs_petz <= self.rhs + slack
    }
}

/// Evaluates the chain and fails with `ContinuityViolation` if it breaks by
/// more than [`CHAIN_SLACK`].
pub fn continuity_check(rho: &ComplexMatrix, sigma: &ComplexMatrix, alpha: f64, mu: f64) -> Result<ContinuityReport> {
    let k = k_remainder(rho, sigma, alpha, mu)?;
    let d = relative_entropy(rho, sigma)?;
    let v = divergence_variance(rho, sigma)?;
    let report = ContinuityReport {
        alpha,
        mu,
        lhs_sandwiched: sandwiched_renyi(rho, sigma, alpha)?,
        lhs_petz: petz_extended(rho, sigma, alpha)?,
        rhs: d + (alpha - 1.0) * LN_2 / 2.0 * v + (alpha - 1.0).powi(2) * k,
        k,
        relative_entropy: d,
        variance: v,
    };
    if !report.holds(CHAIN_SLACK) {
        return Err(Error::ContinuityViolation {
            alpha,
            detail: format!(
                "D_alpha = {}, D'_alpha = {}, rhs = {}",
                report.lhs_sandwiched, report.lhs_petz, report.rhs
            ),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{systems, StateRng};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    #[test]
    fn point_mass_remainder() {
        let p = ComplexMatrix::diagonal(&[1.0, 0.0]);
        let q = ComplexMatrix::identity(2).scale(0.5);
        let k = k_remainder(&p, &q, 1.5, 0.5).unwrap();
        assert_abs_diff_eq!(k, 18.5085181020502, epsilon = 1e-10);
    }

    #[test]
    fn equal_states_remainder() {
        let mut rng = StateRng::new(2);
        let r = rng.full_rank(systems(&[("A", 3)]));
        for mu in [0.1, 0.5, 0.9] {
            let k = k_remainder(r.matrix(), r.matrix(), 1.4, mu).unwrap();
            let expected = (1.0 + E * E).ln().powi(3) / (6.0 * mu.powi(3) * LN_2);
            assert_abs_diff_eq!(k, expected, epsilon = 1e-9 * expected);
        }
    }

    #[test]
    fn remainder_is_positive_and_monotone() {
        let mut rng = StateRng::new(9);
        for _ in 0..10 {
            let r = rng.full_rank(systems(&[("A", 3)]));
            let s = rng.full_rank(systems(&[("A", 3)]));
            let mut last = 0.0;
            for alpha in [1.1, 1.3, 1.5, 1.7, 1.9] {
                let k = k_remainder(r.matrix(), s.matrix(), alpha, 0.5).unwrap();
                assert!(k > 0.0);
                assert!(k >= last - 1e-12);
                last = k;
            }
        }
    }

    #[test]
    fn rejects_orders() {
        let r = ComplexMatrix::identity(2).scale(0.5);
        assert!(matches!(
            k_remainder(&r, &r, 0.9, 0.5),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(k_remainder(&r, &r, 1.5, 1.0), Err(Error::InvalidParameter(_))));
        let p = ComplexMatrix::diagonal(&[1.0, 0.0]);
        let q = ComplexMatrix::diagonal(&[0.0, 1.0]);
        assert_eq!(k_remainder(&p, &q, 1.5, 0.5), Err(Error::SupportViolation));
    }

    #[test]
    fn conditional_remainder_maximally_mixed() {
        let mut rng = StateRng::new(4);
        let b = rng.full_rank(systems(&[("B", 2)]));
        let a = DensityOperator::new(ComplexMatrix::identity(2).scale(0.5), systems(&[("A", 2)])).unwrap();
        let ab = a.tensor(&b).unwrap();
        for alpha in [1.2, 1.6] {
            let k = k_conditional(&ab, &["A"], &["B"], alpha).unwrap();
            let expected = (1.0 + E * E).ln().powi(3) / (6.0 * (2.0 - alpha).powi(3) * LN_2);
            assert_abs_diff_eq!(k, expected, epsilon = 1e-9 * expected);
        }
        let near = k_conditional(&ab, &["A"], &["B"], 1.999).unwrap();
        assert!(near > 1e8);
        assert!(k_conditional(&ab, &["A"], &["B"], 2.0).is_err());
    }

    #[test]
    fn conditional_continuity_bound() {
        let mut rng = StateRng::new(12);
        let rho = rng.full_rank(systems(&[("A", 2), ("B", 2)]));
        let alpha = 1.3;
        let h_alpha = cond_entropy(&rho, &["A"], &["B"], alpha, Variant::Sandwiched).unwrap();
        let h = von_neumann_conditional(&rho, &["A"], &["B"]).unwrap();
        let v = crate::variance::cond_entropy_variance(&rho, &["A"], &["B"]).unwrap();
        let k = k_conditional(&rho, &["A"], &["B"], alpha).unwrap();
        let lower = h - (alpha - 1.0) * LN_2 / 2.0 * v - (alpha - 1.0).powi(2) * k;
        assert!(h_alpha >= lower - 1e-9);
    }

    #[test]
    fn chain_on_random_pairs() {
        let mut rng = StateRng::new(5);
        for _ in 0..10 {
            let r = rng.full_rank(systems(&[("A", 3)]));
            let s = rng.full_rank(systems(&[("A", 3)]));
            for alpha in [1.1, 1.5, 1.9] {
                let report = continuity_check(r.matrix(), s.matrix(), alpha, 2.0 - alpha).unwrap();
                assert!(report.holds(CHAIN_SLACK));
            }
        }
    }

    #[test]
    fn commuting_pair_has_equal_lhs() {
        let r = ComplexMatrix::diagonal(&[0.6, 0.3, 0.1]);
        let s = ComplexMatrix::diagonal(&[0.2, 0.5, 0.3]);
        let report = continuity_check(&r, &s, 1.5, 0.5).unwrap();
        assert_abs_diff_eq!(report.lhs_sandwiched, report.lhs_petz, epsilon = 1e-12);
    }

    #[test]
    fn equal_states_chain() {
        let r = ComplexMatrix::diagonal(&[0.6, 0.4]);
        let report = continuity_check(&r, &r, 1.5, 0.5).unwrap();
        assert_abs_diff_eq!(report.lhs_sandwiched, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.lhs_petz, 0.0, epsilon = 1e-12);
        assert!(report.rhs >= 0.0);
    }
}
