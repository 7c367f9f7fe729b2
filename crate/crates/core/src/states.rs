//! Density operators with named tensor factors, finite distributions and
//! classical-quantum states, plus a seeded generator for random instances.

use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, partial_trace, permute_subsystems, tensor_product, ComplexMatrix};

const TRACE_TOL: f64 = 1e-9;
const PSD_TOL: f64 = 1e-10;
const DIST_TOL: f64 = 1e-12;
const BLOCK_TOL: f64 = 1e-10;

/// A named tensor factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subsystem {
    pub name: String,
    pub dim: usize,
}

impl Subsystem {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        Self { name: name.into(), dim }
    }
}

/// Shorthand for building subsystem lists: `systems(&[("A", 2), ("B", 3)])`.
pub fn systems(spec: &[(&str, usize)]) -> Vec<Subsystem> {
    spec.iter().map(|&(n, d)| Subsystem::new(n, d)).collect()
}

/// A (possibly subnormalized) density operator on a product of named subsystems.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    subsystems: Vec<Subsystem>,
    normalized: bool,
}

impl DensityOperator {
    /// A normalized state. Checks Hermiticity, positivity and unit trace.
    pub fn new(matrix: ComplexMatrix, subsystems: Vec<Subsystem>) -> Result<Self> {
        Self::validated(matrix, subsystems, true)
    }

    /// A subnormalized state with `0 < tr ≤ 1`.
    pub fn subnormalized(matrix: ComplexMatrix, subsystems: Vec<Subsystem>) -> Result<Self> {
        Self::validated(matrix, subsystems, false)
    }

    fn validated(matrix: ComplexMatrix, subsystems: Vec<Subsystem>, normalized: bool) -> Result<Self> {
        check_layout(&matrix, &subsystems)?;
        if !matrix.is_hermitian() {
            return Err(Error::NotHermitian(matrix.hermiticity_error()));
        }
        let spectrum = hermitian_eig(&matrix)?;
        let lowest = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        if lowest < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {lowest:e}")));
        }
        let tr = matrix.tr();
        if normalized && (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        if !normalized && !(tr > 0.0 && tr <= 1.0 + TRACE_TOL) {
            return Err(Error::InvalidState(format!("trace {tr} outside (0, 1]")));
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
            subsystems,
            normalized,
        })
    }

    /// Skips validation; used for operators derived from validated ones.
    fn derived(matrix: ComplexMatrix, subsystems: Vec<Subsystem>, normalized: bool) -> Self {
        Self {
            matrix,
            subsystems,
            normalized,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim).collect()
    }

    pub fn names(&self) -> Vec<&str> {
        self.subsystems.iter().map(|s| s.name.as_str()).collect()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn trace(&self) -> f64 {
        self.matrix.tr()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::UnknownSubsystem(name.to_string()))
    }

    pub fn dim_of(&self, names: &[&str]) -> Result<usize> {
        names
            .iter()
            .map(|n| self.index_of(n).map(|i| self.subsystems[i].dim))
            .product()
    }

    fn indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        let idx = names.iter().map(|n| self.index_of(n)).collect::<Result<Vec<_>>>()?;
        for (k, i) in idx.iter().enumerate() {
            if idx[..k].contains(i) {
                return Err(Error::DimensionMismatch(format!(
                    "subsystem {:?} listed twice",
                    self.subsystems[*i].name
                )));
            }
        }
        Ok(idx)
    }

    /// Reduced state on `names`, with factors in the requested order. An
    /// empty list yields the 1x1 matrix `[tr ρ]`.
    pub fn marginal(&self, names: &[&str]) -> Result<DensityOperator> {
        let idx = self.indices(names)?;
        let dims = self.dims();
        let reduced = partial_trace(&self.matrix, &dims, &idx)?;
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        let order: Vec<usize> = idx
            .iter()
            .map(|i| sorted.iter().position(|s| s == i).unwrap())
            .collect();
        let sorted_dims: Vec<usize> = sorted.iter().map(|&i| dims[i]).collect();
        let matrix = if sorted_dims.is_empty() {
            reduced
        } else {
            permute_subsystems(&reduced, &sorted_dims, &order)?
        };
        let subsystems = idx.iter().map(|&i| self.subsystems[i].clone()).collect();
        Ok(Self::derived(matrix, subsystems, self.normalized))
    }

    /// Convenience for the matrix of [`marginal`](Self::marginal).
    pub fn reduced(&self, names: &[&str]) -> Result<ComplexMatrix> {
        Ok(self.marginal(names)?.matrix)
    }

    /// Embeds an operator acting on `names` (in that order) into the full
    /// space as `op ⊗ id`, with factors in this state's order.
    pub fn lift(&self, op: &ComplexMatrix, names: &[&str]) -> Result<ComplexMatrix> {
        let idx = self.indices(names)?;
        let dims = self.dims();
        let op_dim: usize = idx.iter().map(|&i| dims[i]).product();
        if op.dim() != op_dim {
            return Err(Error::DimensionMismatch(format!(
                "operator of dim {} on subsystems of total dim {op_dim}",
                op.dim()
            )));
        }
        let rest: Vec<usize> = (0..dims.len()).filter(|i| !idx.contains(i)).collect();
        let rest_dim: usize = rest.iter().map(|&i| dims[i]).product();
        let full = tensor_product(op, &ComplexMatrix::identity(rest_dim));
        let current: Vec<usize> = idx.iter().chain(&rest).copied().collect();
        let current_dims: Vec<usize> = current.iter().map(|&i| dims[i]).collect();
        let order: Vec<usize> = (0..dims.len())
            .map(|k| current.iter().position(|&c| c == k).unwrap())
            .collect();
        permute_subsystems(&full, &current_dims, &order)
    }

    /// Reorders the tensor factors.
    pub fn reorder(&self, names: &[&str]) -> Result<DensityOperator> {
        if names.len() != self.subsystems.len() {
            return Err(Error::DimensionMismatch(format!(
                "reorder needs all {} subsystems",
                self.subsystems.len()
            )));
        }
        self.marginal(names)
    }

    /// `self ⊗ other`; subsystem names must be disjoint.
    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        for s in &other.subsystems {
            if self.subsystems.iter().any(|t| t.name == s.name) {
                return Err(Error::DimensionMismatch(format!(
                    "subsystem {:?} appears twice",
                    s.name
                )));
            }
        }
        let subsystems = self.subsystems.iter().chain(&other.subsystems).cloned().collect();
        Ok(Self::derived(
            tensor_product(&self.matrix, &other.matrix),
            subsystems,
            self.normalized && other.normalized,
        ))
    }

    /// Applies `Σ_k K_k ρ K_k†` with Kraus operators acting on the whole space.
    pub fn apply_channel(&self, kraus: &[ComplexMatrix]) -> Result<DensityOperator> {
        let mut out = ComplexMatrix::zeros(self.matrix.dim());
        for k in kraus {
            if k.dim() != self.matrix.dim() {
                return Err(Error::DimensionMismatch("Kraus operator dimension".into()));
            }
            out = &out + &(&(k * &self.matrix) * &k.adjoint());
        }
        Self::validated(out, self.subsystems.clone(), self.normalized)
    }
}

fn check_layout(matrix: &ComplexMatrix, subsystems: &[Subsystem]) -> Result<()> {
    let total: usize = subsystems.iter().map(|s| s.dim).product();
    if total != matrix.dim() || subsystems.iter().any(|s| s.dim == 0) {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dims multiply to {total}, matrix has dim {}",
            matrix.dim()
        )));
    }
    for (k, s) in subsystems.iter().enumerate() {
        if subsystems[..k].iter().any(|t| t.name == s.name) {
            return Err(Error::DimensionMismatch(format!(
                "subsystem {:?} appears twice",
                s.name
            )));
        }
    }
    Ok(())
}

/// Finite nonnegative weights over a labelled alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbDist {
    alphabet: Vec<String>,
    weights: Vec<f64>,
}

impl ProbDist {
    /// A probability distribution: weights sum to 1 within 1e-12.
    pub fn new(alphabet: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        let d = Self::measure(alphabet, weights)?;
        let total = d.total();
        if (total - 1.0).abs() > DIST_TOL {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        Ok(d)
    }

    /// Weights summing to at most 1.
    pub fn subnormalized(alphabet: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        let d = Self::measure(alphabet, weights)?;
        let total = d.total();
        if total > 1.0 + DIST_TOL {
            return Err(Error::InvalidDistribution(format!("weights sum to {total} > 1")));
        }
        Ok(d)
    }

    /// Arbitrary finite nonnegative weights (the second Nussbaum–Szkoła
    /// distribution sums to `tr σ`, which need not be 1).
    pub fn measure(alphabet: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if alphabet.len() != weights.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} labels for {} weights",
                alphabet.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidDistribution(format!(
                "weight {w} is not a nonnegative number"
            )));
        }
        Ok(Self { alphabet, weights })
    }

    /// A normalized distribution with labels `0, 1, …`.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        Self::new(index_labels(weights.len()), weights.to_vec())
    }

    /// Unnormalized weights with labels `0, 1, …`.
    pub fn measure_from(weights: &[f64]) -> Result<Self> {
        Self::measure(index_labels(weights.len()), weights.to_vec())
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            alphabet: index_labels(n),
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn weight(&self, symbol: &str) -> Option<f64> {
        self.alphabet.iter().position(|a| a == symbol).map(|i| self.weights[i])
    }
}

fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// One branch `p_x ρ(x)` of a classical-quantum state.
#[derive(Clone, Debug)]
pub struct CqBranch {
    pub symbol: String,
    pub probability: f64,
    pub state: DensityOperator,
}

/// `Σ_x p_x |x⟩⟨x| ⊗ ρ(x)` kept in branch form.
#[derive(Clone, Debug)]
pub struct CqState {
    pub register: String,
    pub branches: Vec<CqBranch>,
}

impl CqState {
    pub fn new(register: impl Into<String>, branches: Vec<CqBranch>) -> Result<Self> {
        let register = register.into();
        let Some(first) = branches.first() else {
            return Err(Error::InvalidDistribution("no branches".into()));
        };
        let probs: Vec<f64> = branches.iter().map(|b| b.probability).collect();
        ProbDist::new(branches.iter().map(|b| b.symbol.clone()).collect(), probs)?;
        for b in &branches {
            if !b.state.is_normalized() {
                return Err(Error::InvalidState(format!("branch {:?} is not normalized", b.symbol)));
            }
            if b.state.subsystems() != first.state.subsystems() {
                return Err(Error::DimensionMismatch(format!(
                    "branch {:?} has a different subsystem layout",
                    b.symbol
                )));
            }
            if b.state.subsystems().iter().any(|s| s.name == register) {
                return Err(Error::DimensionMismatch(format!("register name {register:?} clashes")));
            }
        }
        Ok(Self { register, branches })
    }

    pub fn distribution(&self) -> ProbDist {
        ProbDist {
            alphabet: self.branches.iter().map(|b| b.symbol.clone()).collect(),
            weights: self.branches.iter().map(|b| b.probability).collect(),
        }
    }

    /// The block-diagonal operator with the register as first factor.
    pub fn assemble(&self) -> Result<DensityOperator> {
        let k = self.branches.len();
        let quantum = self.branches[0].state.subsystems().to_vec();
        let mut m = ComplexMatrix::zeros(k * self.branches[0].state.matrix().dim());
        for (x, b) in self.branches.iter().enumerate() {
            let mut proj = ComplexMatrix::zeros(k);
            proj[(x, x)] = Complex64::new(b.probability, 0.0);
            m = &m + &tensor_product(&proj, b.state.matrix());
        }
        let mut subsystems = vec![Subsystem::new(self.register.clone(), k)];
        subsystems.extend(quantum);
        Ok(DensityOperator::derived(m, subsystems, true))
    }
}

/// Builds `Σ_x p_x |x⟩⟨x| ⊗ ρ(x)` with the register as the first factor.
pub fn assemble_cq(register: &str, branches: Vec<CqBranch>) -> Result<DensityOperator> {
    CqState::new(register, branches)?.assemble()
}

/// Splits a state into its branches along a classical register. Fails with
/// `NotClassicalRegister` if any off-diagonal block exceeds 1e-10. Branches
/// of zero weight are dropped.
pub fn split_classical(rho: &DensityOperator, register: &str) -> Result<CqState> {
    let xi = rho.index_of(register)?;
    let rest: Vec<&str> = rho
        .names()
        .into_iter()
        .enumerate()
        .filter(|&(i, _)| i != xi)
        .map(|(_, n)| n)
        .collect();
    let mut order = vec![register];
    order.extend(&rest);
    let front = rho.reorder(&order)?;
    let k = rho.subsystems()[xi].dim;
    let q = front.matrix().dim() / k;
    let m = front.matrix();
    let scale = m.max_abs().max(1e-300);
    for x in 0..k {
        for y in 0..k {
            if x == y {
                continue;
            }
            for i in 0..q {
                for j in 0..q {
                    if m[(x * q + i, y * q + j)].norm() > BLOCK_TOL * scale.max(1.0) {
                        return Err(Error::NotClassicalRegister(register.to_string()));
                    }
                }
            }
        }
    }
    let quantum: Vec<Subsystem> = front.subsystems()[1..].to_vec();
    let total = front.trace();
    let mut branches = Vec::new();
    for x in 0..k {
        let block = ComplexMatrix::from_fn(q, |i, j| m[(x * q + i, x * q + j)]);
        let p = block.tr();
        if p <= 1e-14 * total {
            continue;
        }
        branches.push(CqBranch {
            symbol: x.to_string(),
            probability: p / total,
            state: DensityOperator::derived(block.scale(1.0 / p), quantum.clone(), true),
        });
    }
    Ok(CqState {
        register: register.to_string(),
        branches,
    })
}

/// Diagonal density operator carrying `p`, on a single subsystem named `X`.
pub fn embed_classical(p: &ProbDist) -> Result<DensityOperator> {
    let m = ComplexMatrix::diagonal(p.weights());
    DensityOperator::subnormalized(m, vec![Subsystem::new("X", p.len())])
}

/// `|Φ(λ)⟩ = √λ|00⟩ + √(1−λ)|11⟩` on subsystems `A`, `B` of dimension 2.
pub fn bell_phi(lambda: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda = {lambda} outside [0, 1]")));
    }
    let z = Complex64::new(0.0, 0.0);
    let v = [
        Complex64::new(lambda.sqrt(), 0.0),
        z,
        z,
        Complex64::new((1.0 - lambda).sqrt(), 0.0),
    ];
    Ok(DensityOperator::derived(
        ComplexMatrix::outer(&v),
        systems(&[("A", 2), ("B", 2)]),
        true,
    ))
}

/// Seeded generator for random test instances. SplitMix64 underneath, so a
/// seed reproduces the same stream everywhere.
#[derive(Clone, Debug)]
pub struct StateRng {
    inner: SplitMix64,
}

impl StateRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: SplitMix64::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.uniform() * n as f64) as usize % n.max(1)
    }

    /// Standard normal via Box–Muller.
    pub fn gaussian(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn complex_gaussian(&mut self) -> Complex64 {
        Complex64::new(self.gaussian(), self.gaussian())
    }

    /// Random probability vector with all entries bounded away from zero.
    pub fn probabilities(&mut self, n: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|_| 0.05 + self.uniform()).collect();
        let s: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / s).collect()
    }

    /// Haar-distributed unitary via Gram–Schmidt on a Gaussian matrix.
    pub fn unitary(&mut self, dim: usize) -> ComplexMatrix {
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
        while cols.len() < dim {
            let mut v: Vec<Complex64> = (0..dim).map(|_| self.complex_gaussian()).collect();
            for c in &cols {
                let overlap: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= overlap * ci;
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                continue;
            }
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
        ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
    }

    /// Random state of the given rank: `G G† / tr` with `G` a `d × rank`
    /// complex Gaussian matrix, i.e. the marginal of a random pure state on
    /// the system and a `rank`-dimensional ancilla.
    pub fn density(&mut self, subsystems: Vec<Subsystem>, rank: usize) -> Result<DensityOperator> {
        let dim: usize = subsystems.iter().map(|s| s.dim).product();
        if rank == 0 || rank > dim {
            return Err(Error::InvalidRank { rank, dim });
        }
        let g: Vec<Complex64> = (0..dim * rank).map(|_| self.complex_gaussian()).collect();
        let m = ComplexMatrix::from_fn(dim, |i, j| {
            (0..rank).map(|k| g[i * rank + k] * g[j * rank + k].conj()).sum()
        });
        let tr = m.tr();
        Ok(DensityOperator::derived(
            m.hermitian_part().scale(1.0 / tr),
            subsystems,
            true,
        ))
    }

    /// Full-rank random state.
    pub fn full_rank(&mut self, subsystems: Vec<Subsystem>) -> DensityOperator {
        let dim: usize = subsystems.iter().map(|s| s.dim).product();
        self.density(subsystems, dim).expect("full rank is always valid")
    }
}

/// Random normalized state of the given rank on `subsystems`; deterministic per seed.
pub fn random_density(subsystems: Vec<Subsystem>, rank: usize, seed: u64) -> Result<DensityOperator> {
    StateRng::new(seed).density(subsystems, rank)
}
