//! Seeded numerical checks of the divergence-variance identities and
//! inequalities, the continuity chain, the classical oracles and the bound
//! optimizer. Each suite runs a number of independent trials; trial `i`
//! of a suite draws from its own generator, so results do not depend on
//! scheduling or on which other suites run.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::continuity::{continuity_check, k_remainder};
use crate::dire::{accepts, g_star, tradeoff_at_counts, Tangent, CLASSICAL_WIN, QUANTUM_WIN};
use crate::divergences::{
    classical_relative_entropy, classical_renyi, cond_entropy, nussbaum_szkola, petz_renyi, relative_entropy,
    sandwiched_renyi, von_neumann_conditional, Variant,
};
use crate::eat::{
    closed_form_alpha, eat_bound_alpha, eat_bound_alpha_with, eat_bound_theorem, optimize_alpha, optimize_alpha_with,
    EatParams, Remainder, TradeoffStats, ALPHA_MAX, ALPHA_MIN,
};
use crate::error::Error;
use crate::linalg::{hermitian_eig, tensor_product, ComplexMatrix};
use crate::states::{assemble_cq, systems, CqBranch, DensityOperator, StateRng, Subsystem};
use crate::variance::{
    chain_rule_cross_terms, classical_divergence_variance, classical_x_decompose, cond_entropy_variance,
    data_processing_counterexample, dimension_bound, divergence_variance, mutual_info_variance, variance_upper_bound,
    weighted_moments, BoundKind,
};

/// Default tolerance for identities.
pub const TOL: f64 = 1e-9;
/// Slack for the mixture and cq-dimension inequalities, which go through
/// the iterative optimizer.
pub const OPTIMIZER_SLACK: f64 = 1e-8;

type Outcome = std::result::Result<(), String>;
type Trial = fn(&mut StateRng) -> Outcome;

/// Pass/fail counts of one suite.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub passed: usize,
    pub failed: usize,
    /// `(trial index, message)` of every failed trial.
    pub failures: Vec<(usize, String)>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

struct Suite {
    name: &'static str,
    about: &'static str,
    trial: Trial,
}

const SUITES: &[Suite] = &[
    Suite {
        name: "eigen",
        about: "eigendecomposition reconstructs Hermitian matrices",
        trial: eigen,
    },
    Suite {
        name: "additivity",
        about: "V is additive under tensor products",
        trial: additivity,
    },
    Suite {
        name: "classical-x",
        about: "V(A|BX) splits into branch variances plus Var(W)",
        trial: classical_x,
    },
    Suite {
        name: "markov",
        about: "V(AB|CDX) decomposition along a Markov chain",
        trial: markov,
    },
    Suite {
        name: "var-decomp",
        about: "V(ADX|C D') Cauchy-Schwarz decomposition",
        trial: var_decomp,
    },
    Suite {
        name: "chain-rule",
        about: "chain rule for V(AC|B) with cross terms",
        trial: chain_rule,
    },
    Suite {
        name: "orthogonal-branches",
        about: "V(AX|B) = V(A|B) for orthogonal branches",
        trial: orthogonal_branches,
    },
    Suite {
        name: "dimension-bounds",
        about: "V(A|B) and V(A;B) below the dimension bounds",
        trial: dimension_bounds,
    },
    Suite {
        name: "general-bound",
        about: "V below the Petz-divergence bound",
        trial: general_bound,
    },
    Suite {
        name: "data-processing",
        about: "a channel can increase V",
        trial: data_processing,
    },
    Suite {
        name: "continuity",
        about: "D_a <= D'_a <= D + (a-1)ln2/2 V + (a-1)^2 K",
        trial: continuity,
    },
    Suite {
        name: "nussbaum-szkola",
        about: "Petz quantities equal their classical images",
        trial: nussbaum,
    },
    Suite {
        name: "commuting",
        about: "commuting divergences equal classical Renyi",
        trial: commuting,
    },
    Suite {
        name: "arimoto",
        about: "optimized conditional entropy of classical states",
        trial: arimoto,
    },
    Suite {
        name: "monotonicity",
        about: "order monotonicity and D_a <= D'_a",
        trial: monotonicity,
    },
    Suite {
        name: "mixture",
        about: "H_up of a mixture against its components",
        trial: mixture,
    },
    Suite {
        name: "cq-dimension",
        about: "H'_a(AX|B) >= -log d_A",
        trial: cq_dimension,
    },
    Suite {
        name: "alpha-grid",
        about: "optimized order beats a dense grid and the closed form",
        trial: alpha_grid,
    },
    Suite {
        name: "tradeoff-threshold",
        about: "accepted frequencies certify g_pb(e)",
        trial: tradeoff_threshold,
    },
];

/// Names of all suites, in execution order.
pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

/// One-line description of a suite.
pub fn suite_description(name: &str) -> Option<&'static str> {
    SUITES.iter().find(|s| s.name == name).map(|s| s.about)
}

fn suite_seed(seed: u64, name: &str, trial: usize) -> u64 {
    // FNV-1a of the name keeps suites on disjoint streams.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
    }
    seed ^ h ^ (trial as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Runs one suite by name.
pub fn run_suite(name: &str, seed: u64, trials: usize) -> crate::Result<SuiteReport> {
    let suite = SUITES
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {name:?}")))?;
    let outcomes: Vec<Outcome> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = StateRng::new(suite_seed(seed, suite.name, i));
            (suite.trial)(&mut rng)
        })
        .collect();
    let failures: Vec<(usize, String)> = outcomes
        .into_iter()
        .enumerate()
        .filter_map(|(i, o)| o.err().map(|m| (i, m)))
        .collect();
    Ok(SuiteReport {
        name: suite.name,
        passed: trials - failures.len(),
        failed: failures.len(),
        failures,
    })
}

/// Runs every suite whose name appears in `filter` (all of them when the
/// filter is empty), in the fixed suite order.
pub fn run_suites(filter: &[String], seed: u64, trials: usize) -> crate::Result<Vec<SuiteReport>> {
    for f in filter {
        if !SUITES.iter().any(|s| s.name == f) {
            return Err(Error::InvalidParameter(format!("unknown suite {f:?}")));
        }
    }
    SUITES
        .iter()
        .filter(|s| filter.is_empty() || filter.iter().any(|f| f == s.name))
        .map(|s| run_suite(s.name, seed, trials))
        .collect()
}

// ---------------------------------------------------------------- helpers

fn err(e: Error) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(label: &str, a: f64, b: f64, tol: f64) -> Outcome {
    ensure((a - b).abs() <= tol, || {
        format!("{label}: {a} vs {b} (diff {:e})", (a - b).abs())
    })
}

fn below(label: &str, lhs: f64, rhs: f64, slack: f64) -> Outcome {
    ensure(lhs <= rhs + slack, || format!("{label}: {lhs} > {rhs}"))
}

fn dim(rng: &mut StateRng) -> usize {
    2 + rng.below(3)
}

fn random_state(rng: &mut StateRng, spec: &[(&str, usize)]) -> Result<DensityOperator, String> {
    let subs = systems(spec);
    let total: usize = spec.iter().map(|s| s.1).product();
    let rank = 1 + rng.below(total);
    rng.density(subs, rank).map_err(err)
}

fn full_rank(rng: &mut StateRng, d: usize) -> ComplexMatrix {
    rng.full_rank(systems(&[("A", d)])).into_matrix()
}

fn cq(register: &str, parts: Vec<(f64, DensityOperator)>) -> Result<DensityOperator, String> {
    let branches = parts
        .into_iter()
        .enumerate()
        .map(|(i, (p, state))| CqBranch {
            symbol: i.to_string(),
            probability: p,
            state,
        })
        .collect();
    assemble_cq(register, branches).map_err(err)
}

/// State with the given subsystems whose support is the span of `basis`.
fn supported_on(rng: &mut StateRng, subs: Vec<Subsystem>, basis: &[Vec<Complex64>]) -> Result<DensityOperator, String> {
    let d = subs.iter().map(|s| s.dim).product();
    let weights = rng.probabilities(basis.len());
    let mut m = ComplexMatrix::zeros(d);
    for (w, v) in weights.iter().zip(basis) {
        m = &m + &ComplexMatrix::outer(v).scale(*w);
    }
    DensityOperator::new(m, subs).map_err(err)
}

// ----------------------------------------------------------------- suites

fn eigen(rng: &mut StateRng) -> Outcome {
    let d = 2 + rng.below(7);
    let mut m = ComplexMatrix::from_fn(d, |_, _| rng.complex_gaussian());
    m = m.hermitian_part();
    let spec = hermitian_eig(&m).map_err(err)?;
    let scale = m.frobenius_norm().max(1.0);
    ensure(spec.reconstruct().max_abs_diff(&m) <= 1e-10 * scale, || {
        "reconstruction error".into()
    })?;
    for j in 0..d {
        for k in 0..d {
            let vj = spec.eigenvector(j);
            let vk = spec.eigenvector(k);
            let ip: Complex64 = vj.iter().zip(&vk).map(|(a, b)| a.conj() * b).sum();
            let target = if j == k { 1.0 } else { 0.0 };
            close("orthonormality", ip.norm(), target, 1e-10)?;
        }
    }
    let ev = &spec.eigenvalues;
    ensure(ev.windows(2).all(|w| w[0] >= w[1]), || "eigenvalues not sorted".into())
}

fn additivity(rng: &mut StateRng) -> Outcome {
    let (d1, d2) = (dim(rng), dim(rng));
    let rho = full_rank(rng, d1);
    let sigma = full_rank(rng, d1);
    let tau = full_rank(rng, d2);
    let omega = full_rank(rng, d2);
    let joint = divergence_variance(&tensor_product(&rho, &tau), &tensor_product(&sigma, &omega)).map_err(err)?;
    let parts = divergence_variance(&rho, &sigma).map_err(err)? + divergence_variance(&tau, &omega).map_err(err)?;
    close("V(rho x tau || sigma x omega)", joint, parts, TOL)
}

fn classical_x(rng: &mut StateRng) -> Outcome {
    let (da, db, k) = (dim(rng), dim(rng), dim(rng));
    let probs = rng.probabilities(k);
    let mut parts = Vec::new();
    for p in probs {
        parts.push((p, random_state(rng, &[("A", da), ("B", db)])?));
    }
    let rho = cq("X", parts)?;
    let dec = classical_x_decompose(&rho, &["A"], &["B"], "X").map_err(err)?;
    close("decomposition", dec.total, dec.direct, TOL)?;
    let averaged: f64 = dec.per_branch.iter().map(|t| t.probability * t.variance).sum();
    below("average branch variance", averaged, dec.direct, TOL)
}

fn markov(rng: &mut StateRng) -> Outcome {
    let k = 2 + rng.below(2);
    let probs = rng.probabilities(k);
    let mut parts = Vec::new();
    let (mut w1, mut w2) = (Vec::new(), Vec::new());
    for &p in &probs {
        let ac = random_state(rng, &[("A", 2), ("C", 2)])?;
        let bd = random_state(rng, &[("B", 2), ("D", 2)])?;
        w1.push(von_neumann_conditional(&ac, &["A"], &["C"]).map_err(err)?);
        w2.push(von_neumann_conditional(&bd, &["B"], &["D"]).map_err(err)?);
        parts.push((p, ac.tensor(&bd).map_err(err)?));
    }
    let rho = cq("X", parts)?;
    let (m1, _) = weighted_moments(&probs, &w1);
    let (m2, _) = weighted_moments(&probs, &w2);
    let cov: f64 = probs
        .iter()
        .zip(w1.iter().zip(&w2))
        .map(|(p, (a, b))| p * (a - m1) * (b - m2))
        .sum();
    let lhs = cond_entropy_variance(&rho, &["A", "B"], &["C", "D", "X"]).map_err(err)?;
    let v1 = cond_entropy_variance(&rho, &["A"], &["C", "X"]).map_err(err)?;
    let v2 = cond_entropy_variance(&rho, &["B"], &["D", "X"]).map_err(err)?;
    close("Markov decomposition", lhs, v1 + v2 + 2.0 * cov, TOL)
}

/// `τ = t (U ⊗ id) Φ (U ⊗ id)† + (1 − t) Σ_j ρ_j ⊗ |j⟩⟨j| / d` on `D ⊗ D'`,
/// whose `D'` marginal is maximally mixed.
fn flat_partner(rng: &mut StateRng, d: usize) -> Result<DensityOperator, String> {
    let t = rng.uniform();
    let u = rng.unitary(d);
    let mut phi = vec![Complex64::new(0.0, 0.0); d * d];
    for j in 0..d {
        for i in 0..d {
            phi[i * d + j] = u[(i, j)] / (d as f64).sqrt();
        }
    }
    let mut m = ComplexMatrix::outer(&phi).scale(t);
    for j in 0..d {
        let rj = full_rank(rng, d);
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        let block = tensor_product(&rj, &ComplexMatrix::diagonal(&e)).scale((1.0 - t) / d as f64);
        m = &m + &block;
    }
    DensityOperator::new(m, systems(&[("D", d), ("E", d)])).map_err(err)
}

fn var_decomp(rng: &mut StateRng) -> Outcome {
    let k = 2 + rng.below(2);
    let probs = rng.probabilities(k);
    let mut parts = Vec::new();
    for &p in &probs {
        let ac = random_state(rng, &[("A", 2), ("C", 2)])?;
        let tau = flat_partner(rng, 2)?;
        parts.push((p, ac.tensor(&tau).map_err(err)?));
    }
    let rho = cq("X", parts)?;
    let lhs = cond_entropy_variance(&rho, &["A", "D", "X"], &["C", "E"]).map_err(err)?;
    let v1 = cond_entropy_variance(&rho, &["A", "X"], &["C"]).map_err(err)?;
    let v2 = cond_entropy_variance(&rho, &["D"], &["X", "E"]).map_err(err)?;
    below("V(ADX|CE)", lhs, v1 + v2 + 2.0 * (v1 * v2).sqrt(), TOL)
}

fn chain_rule(rng: &mut StateRng) -> Outcome {
    let (da, db, dc) = (dim(rng), 2 + rng.below(2), 2 + rng.below(2));
    let rho = random_state(rng, &[("A", da), ("B", db), ("C", dc)])?;
    let terms = chain_rule_cross_terms(&rho, &["A"], &["B"], &["C"]).map_err(err)?;
    close("chain rule residual", terms.residual(), 0.0, TOL)
}

fn orthogonal_branches(rng: &mut StateRng) -> Outcome {
    let (da, db) = (dim(rng), dim(rng));
    let d = da * db;
    let k = 2 + rng.below(d.min(4) - 1);
    let u = rng.unitary(d);
    // Deal the columns of a random unitary out to the branches.
    let mut cols: Vec<Vec<Vec<Complex64>>> = vec![Vec::new(); k];
    for j in 0..d {
        cols[j % k].push(u.column(j));
    }
    let probs = rng.probabilities(k);
    let mut parts = Vec::new();
    for (p, basis) in probs.iter().zip(&cols) {
        parts.push((*p, supported_on(rng, systems(&[("A", da), ("B", db)]), basis)?));
    }
    let rho = cq("X", parts)?;
    let with_x = cond_entropy_variance(&rho, &["A", "X"], &["B"]).map_err(err)?;
    let without = cond_entropy_variance(&rho, &["A"], &["B"]).map_err(err)?;
    close("V(AX|B) vs V(A|B)", with_x, without, TOL)
}

fn dimension_bounds(rng: &mut StateRng) -> Outcome {
    let (da, db) = (dim(rng), dim(rng));
    let rho = random_state(rng, &[("A", da), ("B", db)])?;
    let vc = cond_entropy_variance(&rho, &["A"], &["B"]).map_err(err)?;
    let vm = mutual_info_variance(&rho, &["A"], &["B"]).map_err(err)?;
    below("V(A|B)", vc, dimension_bound(da, BoundKind::Conditional, false), TOL)?;
    below("V(A;B)", vm, dimension_bound(da, BoundKind::Mutual, false), TOL)?;

    let probs = rng.probabilities(da);
    let mut parts = Vec::new();
    for p in probs {
        parts.push((p, random_state(rng, &[("B", db)])?));
    }
    let classical = cq("A", parts)?;
    let vc = cond_entropy_variance(&classical, &["A"], &["B"]).map_err(err)?;
    let vm = mutual_info_variance(&classical, &["A"], &["B"]).map_err(err)?;
    below(
        "classical V(A|B)",
        vc,
        dimension_bound(da, BoundKind::Conditional, true),
        TOL,
    )?;
    below(
        "classical V(A;B)",
        vm,
        dimension_bound(da, BoundKind::Mutual, true),
        TOL,
    )
}

fn general_bound(rng: &mut StateRng) -> Outcome {
    let rho = random_state(rng, &[("A", 3)])?.into_matrix();
    let sigma = full_rank(rng, 3);
    let v = divergence_variance(&rho, &sigma).map_err(err)?;
    for nu in [0.25, 0.5, 0.9] {
        let bound = variance_upper_bound(&rho, &sigma, nu).map_err(err)?;
        below(&format!("V at nu = {nu}"), v, bound, TOL)?;
    }
    Ok(())
}

fn data_processing(rng: &mut StateRng) -> Outcome {
    let flip = rng.uniform_in(0.01, 0.49);
    let (before, after) = data_processing_counterexample(flip).map_err(err)?;
    close("V(rho||sigma)", before, 0.0, TOL)?;
    ensure(after > before + TOL, || {
        format!("V after channel {after} not above {before}")
    })
}

fn continuity(rng: &mut StateRng) -> Outcome {
    let d = dim(rng);
    let rho = full_rank(rng, d);
    let sigma = full_rank(rng, d);
    for alpha in [1.1, 1.5, 1.9] {
        continuity_check(&rho, &sigma, alpha, 2.0 - alpha).map_err(err)?;
    }
    let mut last = 0.0;
    for alpha in [1.1, 1.3, 1.5, 1.7, 1.9] {
        let k = k_remainder(&rho, &sigma, alpha, 0.5).map_err(err)?;
        below("K monotone in alpha", last, k, 1e-12 * k)?;
        last = k;
    }
    Ok(())
}

fn nussbaum(rng: &mut StateRng) -> Outcome {
    let d = dim(rng);
    let rho = random_state(rng, &[("A", d)])?.into_matrix();
    let sigma = full_rank(rng, d);
    let (p, q) = nussbaum_szkola(&rho, &sigma).map_err(err)?;
    for alpha in [0.5, 0.8, 1.5, 2.0] {
        let quantum = petz_renyi(&rho, &sigma, alpha).map_err(err)?;
        let classical = classical_renyi(&p, &q, alpha).map_err(err)?;
        close(&format!("D'_{alpha}"), quantum, classical, 1e-8)?;
    }
    let d_q = relative_entropy(&rho, &sigma).map_err(err)?;
    close("D", d_q, classical_relative_entropy(&p, &q).map_err(err)?, 1e-8)?;
    let v_q = divergence_variance(&rho, &sigma).map_err(err)?;
    close("V", v_q, classical_divergence_variance(&p, &q).map_err(err)?, 1e-8)
}

fn commuting(rng: &mut StateRng) -> Outcome {
    let d = dim(rng);
    let u = rng.unitary(d);
    let pw = rng.probabilities(d);
    let qw = rng.probabilities(d);
    let rotate = |w: &[f64]| {
        let diag = ComplexMatrix::diagonal(w);
        &(&u * &diag) * &u.adjoint()
    };
    let (rho, sigma) = (rotate(&pw), rotate(&qw));
    let p = crate::states::ProbDist::from_weights(&pw).map_err(err)?;
    let q = crate::states::ProbDist::from_weights(&qw).map_err(err)?;
    for alpha in [0.5, 0.8, 1.5, 2.0] {
        let c = classical_renyi(&p, &q, alpha).map_err(err)?;
        close(
            &format!("sandwiched {alpha}"),
            sandwiched_renyi(&rho, &sigma, alpha).map_err(err)?,
            c,
            TOL,
        )?;
        close(
            &format!("Petz {alpha}"),
            petz_renyi(&rho, &sigma, alpha).map_err(err)?,
            c,
            TOL,
        )?;
    }
    close(
        "sandwiched 3",
        sandwiched_renyi(&rho, &sigma, 3.0).map_err(err)?,
        classical_renyi(&p, &q, 3.0).map_err(err)?,
        TOL,
    )
}

/// `α/(1−α) log Σ_b (Σ_a P(a,b)^α)^{1/α}`.
fn arimoto_entropy(joint: &[Vec<f64>], alpha: f64) -> f64 {
    let nb = joint[0].len();
    let inner: f64 = (0..nb)
        .map(|b| {
            joint
                .iter()
                .map(|row| row[b].powf(alpha))
                .sum::<f64>()
                .powf(1.0 / alpha)
        })
        .sum();
    alpha / (1.0 - alpha) * inner.log2()
}

fn arimoto(rng: &mut StateRng) -> Outcome {
    let (da, db) = (dim(rng), dim(rng));
    let flat = rng.probabilities(da * db);
    let joint: Vec<Vec<f64>> = (0..da).map(|a| flat[a * db..(a + 1) * db].to_vec()).collect();
    let rho = DensityOperator::new(ComplexMatrix::diagonal(&flat), systems(&[("A", da), ("B", db)])).map_err(err)?;
    for alpha in [0.5, 0.8, 1.5, 2.0] {
        let h = cond_entropy(&rho, &["A"], &["B"], alpha, Variant::Up).map_err(err)?;
        close(&format!("H_up at {alpha}"), h, arimoto_entropy(&joint, alpha), 1e-6)?;
    }
    Ok(())
}

fn monotonicity(rng: &mut StateRng) -> Outcome {
    let d = dim(rng);
    let rho = full_rank(rng, d);
    let sigma = full_rank(rng, d);
    let orders = [0.5, 0.7, 0.9, 1.2, 1.5, 2.0, 3.0];
    let values: Vec<f64> = orders
        .iter()
        .map(|&a| sandwiched_renyi(&rho, &sigma, a))
        .collect::<crate::Result<_>>()
        .map_err(err)?;
    for (w, o) in values.windows(2).zip(orders.windows(2)) {
        below(&format!("D_{} <= D_{}", o[0], o[1]), w[0], w[1], TOL)?;
    }
    for alpha in [1.2, 1.5, 2.0] {
        let s = sandwiched_renyi(&rho, &sigma, alpha).map_err(err)?;
        let p = petz_renyi(&rho, &sigma, alpha).map_err(err)?;
        below(&format!("D_{alpha} <= D'_{alpha}"), s, p, TOL)?;
    }
    let db = dim(rng);
    let ab = random_state(rng, &[("A", 2), ("B", db)])?;
    for alpha in [0.7, 1.5, 2.0] {
        let plain = cond_entropy(&ab, &["A"], &["B"], alpha, Variant::Sandwiched).map_err(err)?;
        let up = cond_entropy(&ab, &["A"], &["B"], alpha, Variant::Up).map_err(err)?;
        below(&format!("H_{alpha} <= H_up"), plain, up, OPTIMIZER_SLACK)?;
    }
    Ok(())
}

fn mixture(rng: &mut StateRng) -> Outcome {
    let (da, db) = (2, dim(rng));
    let k = 2 + rng.below(2);
    let probs = rng.probabilities(k);
    let subs = systems(&[("A", da), ("B", db)]);
    let components: Vec<DensityOperator> = (0..k)
        .map(|_| random_state(rng, &[("A", da), ("B", db)]))
        .collect::<Result<_, _>>()?;
    let mut m = ComplexMatrix::zeros(da * db);
    for (p, c) in probs.iter().zip(&components) {
        m = &m + &c.matrix().scale(*p);
    }
    let rho = DensityOperator::new(m, subs).map_err(err)?;
    for alpha in [1.3, 1.7, 0.7] {
        let h = cond_entropy(&rho, &["A"], &["B"], alpha, Variant::Up).map_err(err)?;
        for (p, c) in probs.iter().zip(&components) {
            let shifted = h - alpha / (alpha - 1.0) * (1.0 / p).log2();
            let hx = cond_entropy(c, &["A"], &["B"], alpha, Variant::Up).map_err(err)?;
            if alpha > 1.0 {
                below(&format!("mixture at {alpha}"), shifted, hx, OPTIMIZER_SLACK)?;
            } else {
                below(&format!("reversed mixture at {alpha}"), hx, shifted, OPTIMIZER_SLACK)?;
            }
        }
    }
    Ok(())
}

fn cq_dimension(rng: &mut StateRng) -> Outcome {
    let (da, db) = (dim(rng), dim(rng));
    let k = dim(rng);
    let probs = rng.probabilities(k);
    let mut parts = Vec::new();
    for p in probs {
        parts.push((p, random_state(rng, &[("A", da), ("B", db)])?));
    }
    let rho = cq("X", parts)?;
    let floor = -(da as f64).log2();
    for alpha in [0.3, 0.7, 1.5, 2.0] {
        let h = cond_entropy(&rho, &["A", "X"], &["B"], alpha, Variant::Petz).map_err(err)?;
        below(&format!("H'_{alpha}(AX|B)"), floor, h, OPTIMIZER_SLACK)?;
    }
    Ok(())
}

fn random_params(rng: &mut StateRng) -> Result<(EatParams, TradeoffStats), String> {
    let n = 10f64.powf(rng.uniform_in(4.0, 12.0)).round() as u64;
    let eps = 10f64.powf(rng.uniform_in(-10.0, -2.0));
    let p_omega = 10f64.powf(rng.uniform_in(-8.0, 0.0));
    let d_a = [2, 4, 8][rng.below(3)];
    let classical = rng.below(2) == 1;
    let max_f = rng.uniform_in(0.0, 1.0);
    let min_sigma = max_f - rng.uniform_in(0.0, 3.0);
    let min_f = min_sigma - rng.uniform_in(0.0, 3.0);
    let var_f = rng.uniform_in(0.0, 10.0);
    let stats = TradeoffStats::new(max_f, min_f, min_sigma, var_f).map_err(err)?;
    let h = rng.uniform_in(0.0, max_f);
    Ok((EatParams::new(n, eps, p_omega, d_a, classical, h).map_err(err)?, stats))
}

fn alpha_grid(rng: &mut StateRng) -> Outcome {
    let (p, stats) = random_params(rng)?;
    let opt = optimize_alpha(&p, &stats).map_err(err)?;
    let slack = 1e-9 * opt.bound.abs().max(1.0);
    for i in 0..200 {
        let alpha = ALPHA_MIN + (ALPHA_MAX - ALPHA_MIN) * i as f64 / 199.0;
        let b = eat_bound_alpha(&p, &stats, alpha).map_err(err)?;
        below(&format!("grid point {alpha}"), b, opt.bound, slack)?;
    }
    let theorem = eat_bound_theorem(&p, &stats).map_err(err)?;
    below("closed-form bound", theorem.bound, opt.bound, slack)?;

    let target = closed_form_alpha(&p, &stats);
    if target > ALPHA_MIN * (1.0 + 1e-6) && target < 1.5 {
        let dropped = optimize_alpha_with(&p, &stats, Remainder::Dropped).map_err(err)?;
        close("closed-form order", dropped.alpha, target, 1e-6)?;
        let at_target = eat_bound_alpha_with(&p, &stats, target, Remainder::Dropped).map_err(err)?;
        below("closed-form order value", at_target, dropped.bound, slack)?;
    }
    Ok(())
}

fn tradeoff_threshold(rng: &mut StateRng) -> Outcome {
    let lo = CLASSICAL_WIN + 1e-3;
    let e = rng.uniform_in(lo, QUANTUM_WIN - 1e-3);
    let p_b = rng.uniform_in(lo, e);
    let gamma = 10f64.powf(rng.uniform_in(-4.0, 0.0));
    let n = 10f64.powf(rng.uniform_in(3.0, 9.0)).round() as u64;
    let tangent = Tangent::at(p_b).map_err(err)?;
    let max_losses = ((1.0 - e) * gamma * n as f64).floor() as u64;
    let losses = (rng.uniform() * (max_losses + 1) as f64).floor() as u64;
    let losses = losses.min(max_losses);
    ensure(accepts(gamma, e, n, losses), || {
        "threshold rejects allowed losses".into()
    })?;
    let wins = (rng.uniform() * (n - losses) as f64 * gamma.max(0.01)).floor() as u64;
    let value = tradeoff_at_counts(&tangent, gamma, n, wins, losses).map_err(err)?;
    let slack = 1e-12 * (tangent.slope / gamma).max(1.0);
    below("g_pb(e) <= f(freq)", tangent.eval(e), value, slack)?;
    below("tangent below g*", tangent.eval(e), g_star(e), 1e-12)?;
    ensure(g_star(p_b) <= g_star(e), || "g* decreasing".into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_small_run() {
        for report in run_suites(&[], 7, 4).unwrap() {
            assert!(report.ok(), "{}: {:?}", report.name, report.failures);
            assert_eq!(report.passed, 4);
        }
    }

    #[test]
    fn filter_and_determinism() {
        let a = run_suites(&["additivity".to_string()], 3, 5).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a[0].name, "additivity");
        assert_eq!(a, run_suites(&["additivity".to_string()], 3, 5).unwrap());
        assert!(run_suites(&["nope".to_string()], 3, 5).is_err());
    }

    #[test]
    fn names_are_unique() {
        let names = suite_names();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
        assert!(suite_description("markov").is_some());
    }

    #[test]
    fn arimoto_formula_limit() {
        // Uniform A independent of B has H = log d_A at every order.
        let joint = vec![vec![0.125; 2]; 4];
        assert!((arimoto_entropy(&joint, 1.5) - 2.0).abs() < 1e-12);
    }
}
