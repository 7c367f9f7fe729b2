//! Relative entropies, Rényi divergences, conditional entropies and the
//! purified distance. Values are in bits; `f64::INFINITY` marks a failed
//! support condition.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, log2_psd, pow_psd, ComplexMatrix, Spectrum};
use crate::states::{DensityOperator, ProbDist};

/// Below this distance from 1, Rényi orders are evaluated as the relative entropy.
pub const NEAR_ONE: f64 = 1e-6;

/// Weight of `ρ` outside `supp(σ)` above which the support condition fails,
/// relative to `tr ρ`.
pub const SUPPORT_TOL: f64 = 1e-10;

const UP_TOL: f64 = 1e-10;
const UP_MAX_ITER: usize = 500;

/// Which Rényi conditional entropy to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    /// `−D_α(ρ_AB ‖ id_A ⊗ ρ_B)` with the sandwiched divergence.
    Sandwiched,
    /// `−D'_α(ρ_AB ‖ id_A ⊗ ρ_B)` with the Petz divergence.
    Petz,
    /// `−inf_σ D_α(ρ_AB ‖ id_A ⊗ σ_B)`.
    Up,
}

fn near_one(alpha: f64) -> bool {
    (alpha - 1.0).abs() < NEAR_ONE
}

/// `tr[ρ (1 − Π_σ)] > tol · tr ρ`.
fn escapes_support(rho: &ComplexMatrix, sigma: &Spectrum) -> bool {
    let proj = sigma.support_projector();
    let inside = rho.trace_product(&proj).re;
    rho.tr() - inside > SUPPORT_TOL * rho.tr().abs().max(f64::MIN_POSITIVE)
}

/// `tr[Π_ρ Π_σ] ≤ tol`: the two supports are orthogonal.
fn orthogonal(rho: &Spectrum, sigma: &Spectrum) -> bool {
    rho.support_projector().trace_product(&sigma.support_projector()).re <= SUPPORT_TOL
}

/// Umegaki relative entropy `tr[ρ(log ρ − log σ)] / tr ρ`.
pub fn relative_entropy(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let sigma_spec = hermitian_eig(sigma)?;
    if escapes_support(rho, &sigma_spec) {
        return Ok(f64::INFINITY);
    }
    let log_rho = log2_psd(rho)?;
    let log_sigma = sigma_spec.apply(f64::log2, true)?;
    let diff = &log_rho - &log_sigma;
    Ok(rho.trace_product(&diff).re / rho.tr())
}

/// Sandwiched Rényi divergence for `α ∈ [1/2, ∞]`.
pub fn sandwiched_renyi(rho: &ComplexMatrix, sigma: &ComplexMatrix, alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha < 0.5 {
        return Err(Error::AlphaOutOfRange {
            alpha,
            range: "[1/2, inf]",
        });
    }
    if near_one(alpha) {
        return relative_entropy(rho, sigma);
    }
    let sigma_spec = hermitian_eig(sigma)?;
    if alpha > 1.0 && escapes_support(rho, &sigma_spec) {
        return Ok(f64::INFINITY);
    }
    if alpha.is_infinite() {
        let inv_sqrt = sigma_spec.apply(|x| x.powf(-0.5), true)?;
        let lambda = hermitian_eig(&inv_sqrt.sandwich(rho))?.max_eigenvalue();
        return Ok(lambda.log2());
    }
    let rho_spec = hermitian_eig(rho)?;
    if alpha < 1.0 && orthogonal(&rho_spec, &sigma_spec) {
        return Ok(f64::INFINITY);
    }
    let alpha_prime = (alpha - 1.0) / alpha;
    let s = sigma_spec.apply(|x| x.powf(-alpha_prime / 2.0), true)?;
    let inner = hermitian_eig(&s.sandwich(rho))?;
    let q: f64 = inner
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|l| l.powf(alpha))
        .sum();
    if q <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(q.log2() / (alpha - 1.0))
}

/// Petz Rényi divergence for `α ∈ [0, 2]`.
pub fn petz_renyi(rho: &ComplexMatrix, sigma: &ComplexMatrix, alpha: f64) -> Result<f64> {
    if !(0.0..=2.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange { alpha, range: "[0, 2]" });
    }
    if near_one(alpha) {
        return relative_entropy(rho, sigma);
    }
    let sigma_spec = hermitian_eig(sigma)?;
    let rho_spec = hermitian_eig(rho)?;
    if alpha == 0.0 {
        let overlap = rho_spec.support_projector().trace_product(sigma).re;
        return Ok(if overlap <= 0.0 { f64::INFINITY } else { -overlap.log2() });
    }
    if alpha > 1.0 && escapes_support(rho, &sigma_spec) {
        return Ok(f64::INFINITY);
    }
    if alpha < 1.0 && orthogonal(&rho_spec, &sigma_spec) {
        return Ok(f64::INFINITY);
    }
    let ra = rho_spec.apply(|x| x.powf(alpha), true)?;
    let sb = sigma_spec.apply(|x| x.powf(1.0 - alpha), true)?;
    let q = ra.trace_product(&sb).re;
    if q <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(q.log2() / (alpha - 1.0))
}

/// Indices where `w` is above the relative support cutoff.
fn classical_support(w: &[f64]) -> Vec<bool> {
    let max = w.iter().copied().fold(0.0, f64::max);
    let cut = crate::linalg::SUPPORT_CUTOFF * max;
    w.iter().map(|&x| x > 0.0 && x > cut).collect()
}

fn check_same_len(p: &ProbDist, q: &ProbDist) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "distributions of sizes {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(())
}

/// Classical relative entropy `Σ p log(p/q) / Σ p`.
pub fn classical_relative_entropy(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    check_same_len(p, q)?;
    let (sp, sq) = (classical_support(p.weights()), classical_support(q.weights()));
    let mut acc = 0.0;
    for i in 0..p.len() {
        if !sp[i] {
            continue;
        }
        if !sq[i] {
            return Ok(f64::INFINITY);
        }
        let (pi, qi) = (p.weights()[i], q.weights()[i]);
        acc += pi * (pi / qi).log2();
    }
    Ok(acc / p.total())
}

/// Classical Rényi divergence `log(Σ p^α q^{1−α}) / (α − 1)` for `α ∈ [0, ∞]`.
pub fn classical_renyi(p: &ProbDist, q: &ProbDist, alpha: f64) -> Result<f64> {
    check_same_len(p, q)?;
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::AlphaOutOfRange {
            alpha,
            range: "[0, inf]",
        });
    }
    if near_one(alpha) {
        return classical_relative_entropy(p, q);
    }
    let (sp, sq) = (classical_support(p.weights()), classical_support(q.weights()));
    let (pw, qw) = (p.weights(), q.weights());
    let violates = (0..p.len()).any(|i| sp[i] && !sq[i]);
    if alpha == 0.0 {
        let mass: f64 = (0..p.len()).filter(|&i| sp[i]).map(|i| qw[i]).sum();
        return Ok(if mass <= 0.0 { f64::INFINITY } else { -mass.log2() });
    }
    if alpha > 1.0 && violates {
        return Ok(f64::INFINITY);
    }
    if alpha.is_infinite() {
        let ratio = (0..p.len())
            .filter(|&i| sp[i])
            .map(|i| pw[i] / qw[i])
            .fold(0.0, f64::max);
        return Ok(ratio.log2());
    }
    let q_sum: f64 = (0..p.len())
        .filter(|&i| sp[i] && sq[i])
        .map(|i| pw[i].powf(alpha) * qw[i].powf(1.0 - alpha))
        .sum();
    if q_sum <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(q_sum.log2() / (alpha - 1.0))
}

/// Nussbaum–Szkoła distributions `P(x,y) = λ_x |⟨e_x|f_y⟩|²`,
/// `Q(x,y) = μ_y |⟨e_x|f_y⟩|²`, indexed `x·d + y`.
pub fn nussbaum_szkola(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<(ProbDist, ProbDist)> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operators of dims {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let r = hermitian_eig(rho)?;
    let s = hermitian_eig(sigma)?;
    let d = rho.dim();
    let mut labels = Vec::with_capacity(d * d);
    let mut pw = Vec::with_capacity(d * d);
    let mut qw = Vec::with_capacity(d * d);
    for x in 0..d {
        let ex = r.eigenvector(x);
        for y in 0..d {
            let fy = s.eigenvector(y);
            let overlap: num_complex::Complex64 = ex.iter().zip(&fy).map(|(a, b)| a.conj() * b).sum();
            let o = overlap.norm_sqr();
            labels.push(format!("{x},{y}"));
            pw.push(r.eigenvalues[x].max(0.0) * o);
            qw.push(s.eigenvalues[y].max(0.0) * o);
        }
    }
    Ok((ProbDist::measure(labels.clone(), pw)?, ProbDist::measure(labels, qw)?))
}

/// `id_A ⊗ ρ_B` together with `ρ_AB`, as matrices ordered `A, B`.
pub(crate) fn conditional_pair(
    rho: &DensityOperator,
    a: &[&str],
    b: &[&str],
) -> Result<(ComplexMatrix, ComplexMatrix, usize)> {
    let mut ab: Vec<&str> = a.to_vec();
    ab.extend_from_slice(b);
    let rho_ab = rho.reduced(&ab)?;
    let rho_b = rho.reduced(b)?;
    let d_a = rho.dim_of(a)?;
    let reference = crate::linalg::tensor_product(&ComplexMatrix::identity(d_a), &rho_b);
    Ok((rho_ab, reference, d_a))
}

/// Conditional von Neumann entropy `H(A|B) = −D(ρ_AB ‖ id_A ⊗ ρ_B)`.
pub fn von_neumann_conditional(rho: &DensityOperator, a: &[&str], b: &[&str]) -> Result<f64> {
    let (rho_ab, reference, _) = conditional_pair(rho, a, b)?;
    Ok(-relative_entropy(&rho_ab, &reference)?)
}

/// von Neumann entropy `−tr ρ log ρ` of a matrix.
pub fn von_neumann(rho: &ComplexMatrix) -> Result<f64> {
    let s = hermitian_eig(rho)?;
    let cut = s.support_threshold();
    Ok(-s
        .eigenvalues
        .iter()
        .filter(|&&l| l > 0.0 && l > cut)
        .map(|l| l * l.log2())
        .sum::<f64>())
}

/// Rényi conditional entropy of `A` given `B`, in bits.
pub fn cond_entropy(rho: &DensityOperator, a: &[&str], b: &[&str], alpha: f64, variant: Variant) -> Result<f64> {
    let (rho_ab, reference, d_a) = conditional_pair(rho, a, b)?;
    match variant {
        Variant::Sandwiched => Ok(-sandwiched_renyi(&rho_ab, &reference, alpha)?),
        Variant::Petz => Ok(-petz_renyi(&rho_ab, &reference, alpha)?),
        Variant::Up => {
            if alpha.is_nan() || alpha < 0.5 || alpha == 1.0 || alpha.is_infinite() {
                return Err(Error::AlphaOutOfRange {
                    alpha,
                    range: "[1/2, 1) or (1, inf)",
                });
            }
            let rho_b = rho.reduced(b)?;
            Ok(-optimize_conditioning(&rho_ab, &rho_b, d_a, alpha)?)
        }
    }
}

/// `inf_σ D_α(ρ_AB ‖ id_A ⊗ σ_B)` by the fixed-point map
/// `σ ← normalize(σ^β T^{1/α} σ^β)` with `β = (α−1)/(2α)` and
/// `T = tr_A[(σ^{-β} ρ σ^{-β})^α]` (powers taken on the support of σ),
/// started at `ρ_B`. A fixed point satisfies `T ∝ σ`, the stationarity
/// condition of the optimization. The plain map `σ ← normalize(T^{1/α})`
/// shares no such fixed point and drifts away from the optimum.
fn optimize_conditioning(rho_ab: &ComplexMatrix, rho_b: &ComplexMatrix, d_a: usize, alpha: f64) -> Result<f64> {
    let d_b = rho_b.dim();
    let id_a = ComplexMatrix::identity(d_a);
    let beta = (alpha - 1.0) / (2.0 * alpha);
    let eval = |sigma: &ComplexMatrix| -> Result<f64> {
        sandwiched_renyi(rho_ab, &crate::linalg::tensor_product(&id_a, sigma), alpha)
    };
    let mut sigma = rho_b.scale(1.0 / rho_b.tr());
    let mut value = eval(&sigma)?;
    let mut best = value;
    if near_one(alpha) || d_b == 1 {
        return Ok(value);
    }
    let mut last_change = f64::INFINITY;
    for _ in 0..UP_MAX_ITER {
        let spec = hermitian_eig(&sigma)?;
        let x = spec.apply(|s| s.powf(-beta), true)?;
        let y = spec.apply(|s| s.powf(beta), true)?;
        let lifted = crate::linalg::tensor_product(&id_a, &x);
        let inner = pow_psd(&lifted.sandwich(rho_ab), alpha)?;
        let t = crate::linalg::partial_trace(&inner, &[d_a, d_b], &[1])?;
        let next = y.sandwich(&pow_psd(&t, 1.0 / alpha)?).hermitian_part();
        let tr = next.tr();
        if tr.is_nan() || tr <= 0.0 {
            break;
        }
        sigma = next.scale(1.0 / tr);
        let next_value = eval(&sigma)?;
        last_change = (next_value - value).abs();
        value = next_value;
        best = best.min(value);
        if last_change < UP_TOL {
            return Ok(best);
        }
    }
    Err(Error::FixedPointStalled {
        iterations: UP_MAX_ITER,
        last_change,
    })
}

/// Purified distance between subnormalized states.
pub fn purified_distance(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    let sqrt_sigma = pow_psd(sigma, 0.5)?;
    let m = sqrt_sigma.sandwich(rho);
    // Roundoff eigenvalues outside the support would add ~1e-8 through the
    // square root, so only the support contributes.
    let spec = hermitian_eig(&m)?;
    let trace_norm: f64 = (0..spec.dim())
        .filter(|&k| spec.in_support(k))
        .map(|k| spec.eigenvalues[k].sqrt())
        .sum();
    let defect = ((1.0 - rho.tr()).max(0.0) * (1.0 - sigma.tr()).max(0.0)).sqrt();
    let f = trace_norm + defect;
    Ok((1.0 - f * f).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_phi, embed_classical, random_density, systems, StateRng};
    use approx::assert_abs_diff_eq;

    fn ket0() -> ComplexMatrix {
        ComplexMatrix::diagonal(&[1.0, 0.0])
    }
    fn ket1() -> ComplexMatrix {
        ComplexMatrix::diagonal(&[0.0, 1.0])
    }
    fn mixed() -> ComplexMatrix {
        ComplexMatrix::identity(2).scale(0.5)
    }

    #[test]
    fn relative_entropy_examples() {
        let rho = random_density(systems(&[("A", 3)]), 3, 1).unwrap();
        assert_abs_diff_eq!(
            relative_entropy(rho.matrix(), rho.matrix()).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(relative_entropy(&ket0(), &mixed()).unwrap(), 1.0, epsilon = 1e-14);
        assert_eq!(relative_entropy(&ket0(), &ket1()).unwrap(), f64::INFINITY);
    }

    #[test]
    fn sandwiched_examples() {
        let mut rng = StateRng::new(3);
        for _ in 0..10 {
            let r = rng.full_rank(systems(&[("A", 3)]));
            let s = rng.full_rank(systems(&[("A", 3)]));
            let d = relative_entropy(r.matrix(), s.matrix()).unwrap();
            assert_abs_diff_eq!(
                sandwiched_renyi(r.matrix(), s.matrix(), 1.0).unwrap(),
                d,
                epsilon = 1e-14
            );
        }
        for alpha in [0.5, 0.8, 1.5, 2.0, 7.0, f64::INFINITY] {
            assert_abs_diff_eq!(
                sandwiched_renyi(&ket0(), &mixed(), alpha).unwrap(),
                1.0,
                epsilon = 1e-12
            );
        }
        assert!(matches!(
            sandwiched_renyi(&ket0(), &mixed(), 0.3),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert_eq!(sandwiched_renyi(&ket0(), &ket1(), 2.0).unwrap(), f64::INFINITY);
        assert_eq!(sandwiched_renyi(&ket0(), &ket1(), 0.7).unwrap(), f64::INFINITY);
    }

    #[test]
    fn petz_examples() {
        assert_abs_diff_eq!(petz_renyi(&ket0(), &mixed(), 0.0).unwrap(), 1.0, epsilon = 1e-14);
        let mut rng = StateRng::new(4);
        let r = rng.full_rank(systems(&[("A", 2)]));
        let s = rng.full_rank(systems(&[("A", 2)]));
        let d = relative_entropy(r.matrix(), s.matrix()).unwrap();
        assert_abs_diff_eq!(petz_renyi(r.matrix(), s.matrix(), 1.0).unwrap(), d, epsilon = 1e-14);
        assert!(petz_renyi(r.matrix(), s.matrix(), 2.5).is_err());
    }

    #[test]
    fn classical_examples() {
        let p = ProbDist::from_weights(&[0.75, 0.25]).unwrap();
        let q = ProbDist::from_weights(&[0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(
            classical_renyi(&p, &q, 2.0).unwrap(),
            0.321928094887362,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(classical_renyi(&p, &p, 1.7).unwrap(), 0.0, epsilon = 1e-15);
        // Near 1 the divergence moves with slope ln2/2 · V, so compare
        // against the first-order expansion rather than D itself.
        let d = classical_relative_entropy(&p, &q).unwrap();
        let v = 0.75 * (1.5f64).log2().powi(2) + 0.25 * (0.5f64).log2().powi(2) - d * d;
        for h in [-1e-4, 1e-4] {
            let expected = d + h * std::f64::consts::LN_2 / 2.0 * v;
            assert_abs_diff_eq!(classical_renyi(&p, &q, 1.0 + h).unwrap(), expected, epsilon = 1e-6);
        }
    }

    #[test]
    fn commuting_pair_matches_classical() {
        let p = ProbDist::from_weights(&[0.5, 0.3, 0.2]).unwrap();
        let q = ProbDist::from_weights(&[0.2, 0.2, 0.6]).unwrap();
        let (r, s) = (embed_classical(&p).unwrap(), embed_classical(&q).unwrap());
        for alpha in [0.5, 0.9, 1.3, 2.0] {
            let c = classical_renyi(&p, &q, alpha).unwrap();
            assert_abs_diff_eq!(petz_renyi(r.matrix(), s.matrix(), alpha).unwrap(), c, epsilon = 1e-12);
            assert_abs_diff_eq!(
                sandwiched_renyi(r.matrix(), s.matrix(), alpha).unwrap(),
                c,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn nussbaum_szkola_commuting() {
        let r = ComplexMatrix::diagonal(&[0.7, 0.3]);
        let s = ComplexMatrix::diagonal(&[0.4, 0.6]);
        let (p, q) = nussbaum_szkola(&r, &s).unwrap();
        let mut pw = p.weights().to_vec();
        pw.sort_by(|a, b| b.total_cmp(a));
        assert_abs_diff_eq!(pw[0], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(pw[1], 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(q.total(), 1.0, epsilon = 1e-15);
        assert_eq!(p.weights().iter().filter(|&&w| w > 0.0).count(), 2);
    }

    #[test]
    fn nussbaum_szkola_reproduces_petz() {
        let mut rng = StateRng::new(21);
        for _ in 0..5 {
            let r = rng.full_rank(systems(&[("A", 3)]));
            let s = rng.full_rank(systems(&[("A", 3)]));
            let (p, q) = nussbaum_szkola(r.matrix(), s.matrix()).unwrap();
            for alpha in [0.3, 0.7, 1.5, 2.0] {
                let quantum = petz_renyi(r.matrix(), s.matrix(), alpha).unwrap();
                assert_abs_diff_eq!(classical_renyi(&p, &q, alpha).unwrap(), quantum, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn maximally_entangled_conditional_entropy() {
        let phi = bell_phi(0.5).unwrap();
        for alpha in [0.5, 0.75, 1.0, 1.5, 2.0, 5.0, f64::INFINITY] {
            let h = cond_entropy(&phi, &["A"], &["B"], alpha, Variant::Sandwiched).unwrap();
            assert_abs_diff_eq!(h, -1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn product_with_maximally_mixed_a() {
        let a = embed_classical(&ProbDist::uniform(2)).unwrap();
        let b = random_density(systems(&[("B", 3)]), 2, 5).unwrap();
        let ab = crate::states::DensityOperator::new(
            crate::linalg::tensor_product(a.matrix(), b.matrix()),
            systems(&[("A", 2), ("B", 3)]),
        )
        .unwrap();
        for variant in [Variant::Sandwiched, Variant::Petz, Variant::Up] {
            for alpha in [0.6, 1.4, 2.0] {
                let h = cond_entropy(&ab, &["A"], &["B"], alpha, variant).unwrap();
                assert_abs_diff_eq!(h, 1.0, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn alpha_one_is_von_neumann() {
        let rho = random_density(systems(&[("A", 2), ("B", 2)]), 4, 8).unwrap();
        let h = von_neumann_conditional(&rho, &["A"], &["B"]).unwrap();
        let direct = von_neumann(rho.matrix()).unwrap() - von_neumann(&rho.reduced(&["B"]).unwrap()).unwrap();
        assert_abs_diff_eq!(h, direct, epsilon = 1e-12);
        for variant in [Variant::Sandwiched, Variant::Petz] {
            assert_abs_diff_eq!(
                cond_entropy(&rho, &["A"], &["B"], 1.0, variant).unwrap(),
                h,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn up_dominates_plain() {
        let mut rng = StateRng::new(13);
        for _ in 0..5 {
            let rho = rng.full_rank(systems(&[("A", 2), ("B", 2)]));
            for alpha in [0.6, 1.5, 3.0] {
                let h = cond_entropy(&rho, &["A"], &["B"], alpha, Variant::Sandwiched).unwrap();
                let up = cond_entropy(&rho, &["A"], &["B"], alpha, Variant::Up).unwrap();
                assert!(up >= h - 1e-12, "alpha {alpha}: up {up} < {h}");
            }
        }
        let rho = rng.full_rank(systems(&[("A", 2), ("B", 2)]));
        assert!(matches!(
            cond_entropy(&rho, &["A"], &["B"], 1.0, Variant::Up),
            Err(Error::AlphaOutOfRange { .. })
        ));
    }

    #[test]
    fn purified_distance_examples() {
        let rho = random_density(systems(&[("A", 3)]), 3, 2).unwrap();
        assert_abs_diff_eq!(
            purified_distance(rho.matrix(), rho.matrix()).unwrap(),
            0.0,
            epsilon = 1e-7
        );
        assert_abs_diff_eq!(purified_distance(&ket0(), &ket1()).unwrap(), 1.0, epsilon = 1e-15);
        let sigma = random_density(systems(&[("A", 3)]), 2, 3).unwrap();
        let ab = purified_distance(rho.matrix(), sigma.matrix()).unwrap();
        let ba = purified_distance(sigma.matrix(), rho.matrix()).unwrap();
        assert_abs_diff_eq!(ab, ba, epsilon = 1e-10);
    }
}
