//! Divergence variance `V(ρ‖σ)` and its conditional and mutual-information
//! forms, with the structural decompositions used by the second-order bound.

use crate::divergences::{classical_relative_entropy, petz_renyi, relative_entropy, von_neumann_conditional};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, log2_psd, tensor_product, ComplexMatrix};
use crate::states::{split_classical, DensityOperator, ProbDist};

/// Round-off allowance below zero before a variance is reported as negative.
pub const NEGATIVE_TOL: f64 = 1e-9;

fn clamp(v: f64) -> f64 {
    if (-NEGATIVE_TOL..0.0).contains(&v) {
        0.0
    } else {
        v
    }
}

/// `log ρ − log σ` with both logarithms taken on the respective supports.
/// Fails if `supp ρ ⊄ supp σ`.
pub fn log_ratio(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<ComplexMatrix> {
    if relative_entropy(rho, sigma)?.is_infinite() {
        return Err(Error::SupportViolation);
    }
    let sigma_spec = hermitian_eig(sigma)?;
    Ok(&log2_psd(rho)? - &sigma_spec.apply(f64::log2, true)?)
}

/// `V(ρ‖σ) = tr[ρ L²]/tr ρ − D(ρ‖σ)²` with `L = log ρ − log σ`, in bits².
pub fn divergence_variance(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let l = log_ratio(rho, sigma)?;
    let tr = rho.tr();
    let rl = rho * &l;
    let d = rl.trace().re / tr;
    let second = rl.trace_product(&l).re / tr;
    Ok(clamp(second - d * d))
}

/// Classical counterpart `Σ p log²(p/q) / Σp − D(p‖q)²`.
pub fn classical_divergence_variance(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    let d = classical_relative_entropy(p, q)?;
    if d.is_infinite() {
        return Err(Error::SupportViolation);
    }
    let max_p = p.weights().iter().copied().fold(0.0, f64::max);
    let second: f64 = p
        .weights()
        .iter()
        .zip(q.weights())
        .filter(|(&pi, _)| pi > crate::linalg::SUPPORT_CUTOFF * max_p)
        .map(|(&pi, &qi)| pi * (pi / qi).log2().powi(2))
        .sum::<f64>()
        / p.total();
    Ok(clamp(second - d * d))
}

/// `V(A|B) = V(ρ_AB ‖ id_A ⊗ ρ_B)`.
pub fn cond_entropy_variance(rho: &DensityOperator, a: &[&str], b: &[&str]) -> Result<f64> {
    let (rho_ab, reference, _) = crate::divergences::conditional_pair(rho, a, b)?;
    divergence_variance(&rho_ab, &reference)
}

/// `V(A;B) = V(ρ_AB ‖ ρ_A ⊗ ρ_B)`.
pub fn mutual_info_variance(rho: &DensityOperator, a: &[&str], b: &[&str]) -> Result<f64> {
    let mut ab = a.to_vec();
    ab.extend_from_slice(b);
    let rho_ab = rho.reduced(&ab)?;
    let reference = tensor_product(&rho.reduced(a)?, &rho.reduced(b)?);
    divergence_variance(&rho_ab, &reference)
}

/// `v(q) = q(1−q) log²(q/(1−q))`, the variance of the surprisal of a biased
/// bit. Zero at the endpoints.
pub fn bernoulli_entropy_variance(q: f64) -> f64 {
    if q <= 0.0 || q >= 1.0 {
        return 0.0;
    }
    let l = (q / (1.0 - q)).log2();
    q * (1.0 - q) * l * l
}

/// Upper bound on `V(ρ‖σ)` through Petz divergences at `1 ± ν`:
/// `ν⁻² log²(2^{ν(D'_{1+ν}−D)} + 2^{ν(D−D'_{1−ν})} + 1)`.
pub fn variance_upper_bound(rho: &ComplexMatrix, sigma: &ComplexMatrix, nu: f64) -> Result<f64> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidParameter(format!("nu = {nu} outside (0, 1)")));
    }
    let d = relative_entropy(rho, sigma)?;
    if d.is_infinite() {
        return Err(Error::SupportViolation);
    }
    let up = petz_renyi(rho, sigma, 1.0 + nu)?;
    let down = petz_renyi(rho, sigma, 1.0 - nu)?;
    let s = (nu * (up - d)).exp2() + (nu * (d - down)).exp2() + 1.0;
    Ok(s.log2().powi(2) / (nu * nu))
}

/// Which variance a dimension bound refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// `V(A|B)`.
    Conditional,
    /// `V(A;B)`.
    Mutual,
}

/// Dimension-only bounds: `log²(2d²+1)` for `V(A|B)` and `4 log²(2d+1)` for
/// `V(A;B)`; for classical `A` these improve to `log²(2d+1)` and
/// `4 log²(2√d+1)`.
pub fn dimension_bound(d_a: usize, kind: BoundKind, classical_a: bool) -> f64 {
    let d = d_a as f64;
    match (kind, classical_a) {
        (BoundKind::Conditional, false) => (2.0 * d * d + 1.0).log2().powi(2),
        (BoundKind::Conditional, true) => (2.0 * d + 1.0).log2().powi(2),
        (BoundKind::Mutual, false) => 4.0 * (2.0 * d + 1.0).log2().powi(2),
        (BoundKind::Mutual, true) => 4.0 * (2.0 * d.sqrt() + 1.0).log2().powi(2),
    }
}

/// One branch of a classical-register decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchTerm {
    pub symbol: String,
    pub probability: f64,
    /// `V(A|B)` of the branch state.
    pub variance: f64,
    /// `H(A|B)` of the branch state, the value of `W` on this branch.
    pub entropy: f64,
}

/// `V(A|BX) = Σ_x p_x V(A|B, X=x) + Var(W)` with `W = H(A|B, X=x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VarianceDecomposition {
    pub per_branch: Vec<BranchTerm>,
    /// `Var(W)` in bits².
    pub spread_term: f64,
    /// `Σ p_x V_x + Var(W)`.
    pub total: f64,
    /// `V(A|BX)` evaluated directly on the joint state.
    pub direct: f64,
}

/// Weighted mean and variance of a finite random variable.
pub fn weighted_moments(weights: &[f64], values: &[f64]) -> (f64, f64) {
    let mean: f64 = weights.iter().zip(values).map(|(p, w)| p * w).sum();
    let var: f64 = weights.iter().zip(values).map(|(p, w)| p * (w - mean).powi(2)).sum();
    (mean, var)
}

/// Splits `V(A|BX)` along the classical register `x`.
pub fn classical_x_decompose(rho: &DensityOperator, a: &[&str], b: &[&str], x: &str) -> Result<VarianceDecomposition> {
    let cq = split_classical(rho, x)?;
    let mut per_branch = Vec::with_capacity(cq.branches.len());
    for branch in &cq.branches {
        per_branch.push(BranchTerm {
            symbol: branch.symbol.clone(),
            probability: branch.probability,
            variance: cond_entropy_variance(&branch.state, a, b)?,
            entropy: von_neumann_conditional(&branch.state, a, b)?,
        });
    }
    let probs: Vec<f64> = per_branch.iter().map(|t| t.probability).collect();
    let entropies: Vec<f64> = per_branch.iter().map(|t| t.entropy).collect();
    let (_, spread_term) = weighted_moments(&probs, &entropies);
    let total = per_branch.iter().map(|t| t.probability * t.variance).sum::<f64>() + spread_term;
    let mut bx = b.to_vec();
    bx.push(x);
    let direct = cond_entropy_variance(rho, a, &bx)?;
    Ok(VarianceDecomposition {
        per_branch,
        spread_term,
        total,
        direct,
    })
}

/// The four terms of `V(AC|B) = V(A|B) + V(C|BA) + cross`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChainRuleTerms {
    pub v_ac_given_b: f64,
    pub v_a_given_b: f64,
    pub v_c_given_ba: f64,
    /// `tr[ρ L₁L₂] + tr[ρ L₂L₁]` with the centred log-ratio operators.
    pub cross: f64,
}

impl ChainRuleTerms {
    /// `V(AC|B) − (V(A|B) + V(C|BA) + cross)`.
    pub fn residual(&self) -> f64 {
        self.v_ac_given_b - (self.v_a_given_b + self.v_c_given_ba + self.cross)
    }
}

/// Evaluates every term of the chain rule for the divergence variance. The
/// three variances come from independent reductions; the cross term uses
/// `L₁ = log ρ_AB − log ρ_B + H(A|B)` and `L₂ = log ρ_ABC − log ρ_AB + H(C|BA)`
/// lifted to `A ⊗ B ⊗ C`.
pub fn chain_rule_cross_terms(rho: &DensityOperator, a: &[&str], b: &[&str], c: &[&str]) -> Result<ChainRuleTerms> {
    let mut order: Vec<&str> = a.to_vec();
    order.extend_from_slice(b);
    order.extend_from_slice(c);
    let joint = rho.marginal(&order)?;
    let mut ab = a.to_vec();
    ab.extend_from_slice(b);
    let mut ba = b.to_vec();
    ba.extend_from_slice(a);
    let mut ac = a.to_vec();
    ac.extend_from_slice(c);

    let h_a_b = von_neumann_conditional(&joint, a, b)?;
    let h_c_ba = von_neumann_conditional(&joint, c, &ba)?;
    let n = joint.matrix().dim();
    let id = ComplexMatrix::identity(n);

    let log_abc = log2_psd(joint.matrix())?;
    let log_ab = joint.lift(&log2_psd(&joint.reduced(&ab)?)?, &ab)?;
    let log_b = joint.lift(&log2_psd(&joint.reduced(b)?)?, b)?;
    if relative_entropy(joint.matrix(), &joint.lift(&joint.reduced(b)?, b)?)?.is_infinite() {
        return Err(Error::SupportViolation);
    }
    let l1 = &(&log_ab - &log_b) + &id.scale(h_a_b);
    let l2 = &(&log_abc - &log_ab) + &id.scale(h_c_ba);
    let r = joint.matrix();
    let tr = r.tr();
    let cross = ((r * &l1).trace_product(&l2).re + (r * &l2).trace_product(&l1).re) / tr;

    Ok(ChainRuleTerms {
        v_ac_given_b: cond_entropy_variance(&joint, &ac, b)?,
        v_a_given_b: cond_entropy_variance(&joint, a, b)?,
        v_c_given_ba: cond_entropy_variance(&joint, c, &ba)?,
        cross,
    })
}

/// Divergence variance before and after a binary symmetric channel with
/// the given flip probability, for `ρ = |0⟩⟨0|` and `σ = id`. Processing
/// increases the variance from 0 to `v(flip)`, so the divergence variance
/// obeys no data-processing inequality.
pub fn data_processing_counterexample(flip: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&flip) {
        return Err(Error::InvalidParameter(format!(
            "flip probability {flip} outside [0, 1]"
        )));
    }
    let rho = ComplexMatrix::diagonal(&[1.0, 0.0]);
    let sigma = ComplexMatrix::identity(2);
    let channel = |m: &ComplexMatrix| {
        let (p0, p1) = (m[(0, 0)].re, m[(1, 1)].re);
        ComplexMatrix::diagonal(&[(1.0 - flip) * p0 + flip * p1, flip * p0 + (1.0 - flip) * p1])
    };
    let before = divergence_variance(&rho, &sigma)?;
    let after = divergence_variance(&channel(&rho), &channel(&sigma))?;
    Ok((before, after))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_phi, embed_classical, random_density, systems, StateRng};
    use approx::assert_abs_diff_eq;

    #[test]
    fn self_variance_vanishes() {
        for seed in 0..5 {
            let rho = random_density(systems(&[("A", 3)]), 3, seed).unwrap();
            assert_abs_diff_eq!(
                divergence_variance(rho.matrix(), rho.matrix()).unwrap(),
                0.0,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn bernoulli_examples() {
        assert_eq!(bernoulli_entropy_variance(0.5), 0.0);
        assert_abs_diff_eq!(bernoulli_entropy_variance(0.083), 0.914195349651, epsilon = 1e-10);
        assert_abs_diff_eq!(bernoulli_entropy_variance(0.083), 0.9142, epsilon = 1e-3);
        for q in [0.01, 0.2, 0.37] {
            assert_abs_diff_eq!(
                bernoulli_entropy_variance(q),
                bernoulli_entropy_variance(1.0 - q),
                epsilon = 1e-14
            );
        }
        assert_eq!(bernoulli_entropy_variance(0.0), 0.0);
        assert_eq!(bernoulli_entropy_variance(1.0), 0.0);
    }

    #[test]
    fn bernoulli_matches_embedded_bit() {
        for q in [0.083, 0.3, 0.9] {
            let bit = embed_classical(&ProbDist::from_weights(&[q, 1.0 - q]).unwrap()).unwrap();
            let v = divergence_variance(bit.matrix(), &ComplexMatrix::identity(2)).unwrap();
            assert_abs_diff_eq!(v, bernoulli_entropy_variance(q), epsilon = 1e-12);
            let as_state = DensityOperator::new(bit.matrix().clone(), systems(&[("X", 2)])).unwrap();
            assert_abs_diff_eq!(
                cond_entropy_variance(&as_state, &["X"], &[]).unwrap(),
                v,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn maximally_entangled_has_zero_conditional_variance() {
        let phi = bell_phi(0.5).unwrap();
        assert_abs_diff_eq!(
            cond_entropy_variance(&phi, &["A"], &["B"]).unwrap(),
            0.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn product_has_zero_mutual_variance() {
        let a = random_density(systems(&[("A", 2)]), 2, 1).unwrap();
        let b = random_density(systems(&[("B", 3)]), 3, 2).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_abs_diff_eq!(mutual_info_variance(&ab, &["A"], &["B"]).unwrap(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn support_violation() {
        let r = ComplexMatrix::diagonal(&[1.0, 0.0]);
        let s = ComplexMatrix::diagonal(&[0.0, 1.0]);
        assert_eq!(divergence_variance(&r, &s), Err(Error::SupportViolation));
    }

    #[test]
    fn dimension_bound_values() {
        assert_abs_diff_eq!(
            dimension_bound(2, BoundKind::Conditional, false),
            10.0484245147690,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            dimension_bound(2, BoundKind::Conditional, true),
            5.39135007782726,
            epsilon = 1e-12
        );
        let mut rng = StateRng::new(31);
        for _ in 0..20 {
            let rho = rng.full_rank(systems(&[("A", 2), ("B", 2)]));
            let v = cond_entropy_variance(&rho, &["A"], &["B"]).unwrap();
            assert!(v <= dimension_bound(2, BoundKind::Conditional, false));
        }
    }

    #[test]
    fn upper_bound_examples() {
        let p = ComplexMatrix::diagonal(&[1.0, 0.0]);
        let q = ComplexMatrix::identity(2).scale(0.5);
        let v = divergence_variance(&p, &q).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
        assert!(v <= variance_upper_bound(&p, &q, 0.5).unwrap());
        let rho = random_density(systems(&[("A", 3)]), 3, 2).unwrap();
        let b = variance_upper_bound(rho.matrix(), rho.matrix(), 0.25).unwrap();
        assert_abs_diff_eq!(b, 3f64.log2().powi(2) * 16.0, epsilon = 1e-9);
    }

    #[test]
    fn decomposition_single_branch() {
        let rho = random_density(systems(&[("A", 2), ("B", 2)]), 4, 3).unwrap();
        let cq = crate::states::assemble_cq(
            "X",
            vec![crate::states::CqBranch {
                symbol: "0".into(),
                probability: 1.0,
                state: rho,
            }],
        )
        .unwrap();
        let dec = classical_x_decompose(&cq, &["A"], &["B"], "X").unwrap();
        assert_abs_diff_eq!(dec.spread_term, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dec.total, dec.per_branch[0].variance, epsilon = 1e-15);
        assert_abs_diff_eq!(dec.total, dec.direct, epsilon = 1e-9);
    }

    #[test]
    fn chain_rule_product() {
        let ab = random_density(systems(&[("A", 2), ("B", 2)]), 4, 5).unwrap();
        let c = random_density(systems(&[("C", 2)]), 2, 6).unwrap();
        let t = chain_rule_cross_terms(&ab.tensor(&c).unwrap(), &["A"], &["B"], &["C"]).unwrap();
        assert_abs_diff_eq!(t.cross, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(t.residual(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn chain_rule_random() {
        let mut rng = StateRng::new(17);
        for _ in 0..5 {
            let rho = rng.full_rank(systems(&[("A", 2), ("B", 2), ("C", 2)]));
            let t = chain_rule_cross_terms(&rho, &["A"], &["B"], &["C"]).unwrap();
            assert_abs_diff_eq!(t.residual(), 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn no_data_processing() {
        let (before, after) = data_processing_counterexample(0.083).unwrap();
        assert_eq!(before, 0.0);
        assert_abs_diff_eq!(after, 0.9142, epsilon = 1e-3);
        assert!(after > before);
    }
}
