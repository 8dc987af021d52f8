//! Information functionals over states, distributions and density matrices.
//!
//! Shannon, von Neumann, intelligence and Holevo quantities are in bits.
//! Renyi, Tsallis and relative entropy default to nats.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::TruthTable;
use crate::linalg::{ComplexMatrix, EIGEN_CLIP, STRUCTURE_TOL};
use crate::state::{
    born_distribution, index_to_bits, reduce, DensityMatrix, ProbabilityDistribution,
    QubitSubset, StateVector,
};

/// Probabilities at or below this contribute nothing to entropy sums.
pub const PROB_FLOOR: f64 = 1e-15;

/// Absolute tolerance on the uncertainty-relation equality.
pub const INTELLIGENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LogBase {
    Bits,
    Nats,
    Custom(f64),
}

impl LogBase {
    fn ln_base(self) -> f64 {
        match self {
            LogBase::Bits => std::f64::consts::LN_2,
            LogBase::Nats => 1.0,
            LogBase::Custom(b) => b.ln(),
        }
    }

    pub fn log(self, x: f64) -> f64 {
        x.ln() / self.ln_base()
    }
}

fn entropy(probabilities: impl IntoIterator<Item = f64>, base: LogBase) -> f64 {
    let nats: f64 = probabilities
        .into_iter()
        .filter(|&p| p > PROB_FLOOR)
        .map(|p| -p * p.ln())
        .sum();
    (nats / base.ln_base()).max(0.0)
}

/// Binary entropy h₂(p) in bits.
pub fn binary_entropy(p: f64) -> f64 {
    entropy([p, 1.0 - p], LogBase::Bits)
}

/// Per-qubit entropy after the entanglement step as a function of α:
/// (1+α)/2·log₂(2/(1+α)) + (1−α)/2·log₂(2/(1−α)).
pub fn coherence_entropy(alpha: f64) -> f64 {
    binary_entropy((1.0 + alpha) / 2.0)
}

/// Entropy of the measurement outcomes on `t` (bits).
pub fn shannon_subset(s: &StateVector, t: &QubitSubset) -> Result<f64> {
    let p = born_distribution(s, t)?;
    Ok(entropy(p.probabilities().iter().copied(), LogBase::Bits))
}

/// Spectral entropy −Σλ log₂ λ (bits).
pub fn von_neumann(rho: &DensityMatrix) -> Result<f64> {
    let spectrum = rho.spectrum()?;
    Ok(entropy(spectrum.clipped(), LogBase::Bits))
}

/// J_T = 1 − (S^Sh_T − S^vN_T)/|T|.
pub fn intelligence(s: &StateVector, t: &QubitSubset) -> Result<f64> {
    Ok(entropy_record(s, t)?.intelligence)
}

/// All entropy figures for one qubit subset of one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyRecord {
    pub subset: QubitSubset,
    pub shannon_bits: f64,
    pub von_neumann_bits: f64,
    pub intelligence: f64,
    pub noise_bits: f64,
    /// For single qubits: 2·Re ρ₀₁ of the reduced state.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

pub fn entropy_record(s: &StateVector, t: &QubitSubset) -> Result<EntropyRecord> {
    let rho = reduce(s, t)?;
    let shannon_bits = entropy(rho.diagonal(), LogBase::Bits);
    let von_neumann_bits = von_neumann(&rho)?;
    if shannon_bits < von_neumann_bits - 1e-9 {
        return Err(Error::Invariant(format!(
            "Shannon {shannon_bits} below von Neumann {von_neumann_bits} on {t}"
        )));
    }
    let noise_bits = (shannon_bits - von_neumann_bits).max(0.0);
    let alpha = (t.len() == 1).then(|| 2.0 * rho.matrix().get(0, 1).re);
    Ok(EntropyRecord {
        subset: t.clone(),
        shannon_bits,
        von_neumann_bits,
        intelligence: (1.0 - noise_bits / t.len() as f64).clamp(0.0, 1.0),
        noise_bits,
        alpha,
    })
}

/// Average per-qubit Shannon minus von Neumann gap over `qubits`.
pub fn mean_noise(s: &StateVector, qubits: &QubitSubset) -> Result<f64> {
    qubits.check_within(s.n_qubits())?;
    let total = qubits
        .indices()
        .iter()
        .map(|&q| Ok(entropy_record(s, &QubitSubset::single(q)?)?.noise_bits))
        .sum::<Result<f64>>()?;
    Ok(total / qubits.len() as f64)
}

/// α_j = 2^{1−n} Σ over the other input bits of (−1)^{f(…0…) + f(…1…)}, with bit `j` (1-based) varied.
pub fn alpha_coefficient(f: &TruthTable, j: usize) -> Result<f64> {
    if f.n_out() != 1 {
        return Err(Error::Arity(format!(
            "α needs a single output bit, table has {}",
            f.n_out()
        )));
    }
    let n = f.n_in();
    if j == 0 || j > n {
        return Err(Error::BadSubset(format!("qubit {j} not within 1..={n}")));
    }
    let bit = 1usize << (n - j);
    let sum: i64 = (0..1usize << n)
        .filter(|x| x & bit == 0)
        .map(|x| if f.eval(x) ^ f.eval(x | bit) == 0 { 1 } else { -1 })
        .sum();
    Ok(sum as f64 / (1u64 << (n - 1)) as f64)
}

/// Entropy of a whole distribution in the chosen base.
pub fn shannon_full(p: &ProbabilityDistribution, base: LogBase) -> f64 {
    entropy(p.probabilities().iter().copied(), base)
}

/// Either a classical distribution or a quantum state.
#[derive(Debug, Clone, Copy)]
pub enum MeasureInput<'a> {
    Distribution(&'a ProbabilityDistribution),
    Density(&'a DensityMatrix),
}

impl<'a> From<&'a ProbabilityDistribution> for MeasureInput<'a> {
    fn from(p: &'a ProbabilityDistribution) -> Self {
        MeasureInput::Distribution(p)
    }
}

impl<'a> From<&'a DensityMatrix> for MeasureInput<'a> {
    fn from(rho: &'a DensityMatrix) -> Self {
        MeasureInput::Density(rho)
    }
}

impl MeasureInput<'_> {
    /// Probabilities or (clipped) eigenvalues.
    fn weights(&self) -> Result<Vec<f64>> {
        match self {
            MeasureInput::Distribution(p) => Ok(p.probabilities().to_vec()),
            MeasureInput::Density(rho) => Ok(rho.spectrum()?.clipped()),
        }
    }
}

fn check_order(q: f64) -> Result<()> {
    if q.is_nan() || q <= 0.0 || q.is_infinite() || q == 1.0 {
        return Err(Error::InvalidParameter(format!(
            "entropy order q must be positive, finite and not 1 (got {q})"
        )));
    }
    Ok(())
}

fn power_sum(weights: &[f64], q: f64) -> f64 {
    weights
        .iter()
        .filter(|&&w| w > PROB_FLOOR)
        .map(|w| w.powf(q))
        .sum()
}

/// Renyi entropy ln(Σ pᵢ^q)/(1−q), or ln Tr ρ^q/(1−q), in the given base.
pub fn renyi<'a>(input: impl Into<MeasureInput<'a>>, q: f64, base: LogBase) -> Result<f64> {
    check_order(q)?;
    let weights = input.into().weights()?;
    Ok(power_sum(&weights, q).ln() / (1.0 - q) / base.ln_base())
}

/// Tsallis entropy (1 − Σ pᵢ^q)/(q − 1), or (1 − Tr ρ^q)/(q − 1).
pub fn tsallis<'a>(input: impl Into<MeasureInput<'a>>, q: f64) -> Result<f64> {
    check_order(q)?;
    let weights = input.into().weights()?;
    Ok((1.0 - power_sum(&weights, q)) / (q - 1.0))
}

/// Kullback-Leibler divergence Σ pᵢ ln(pᵢ/qᵢ); `+∞` when supp p ⊄ supp q.
pub fn relative_entropy(
    p: &ProbabilityDistribution,
    q: &ProbabilityDistribution,
    base: LogBase,
) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "distributions over {} and {} outcomes",
            p.len(),
            q.len()
        )));
    }
    let mut nats = 0.0;
    for (&pi, &qi) in p.probabilities().iter().zip(q.probabilities()) {
        if pi <= PROB_FLOOR {
            continue;
        }
        if qi <= PROB_FLOOR {
            return Ok(f64::INFINITY);
        }
        nats += pi * (pi / qi).ln();
    }
    Ok((nats / base.ln_base()).max(0.0))
}

/// Tr ρ(ln ρ − ln σ); `+∞` when ρ has weight on the kernel of σ.
pub fn quantum_relative_entropy(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
    base: LogBase,
) -> Result<f64> {
    if rho.order() != sigma.order() {
        return Err(Error::DimensionMismatch(format!(
            "density orders {} and {}",
            rho.order(),
            sigma.order()
        )));
    }
    let neg_entropy: f64 = rho
        .spectrum()?
        .clipped()
        .into_iter()
        .filter(|&l| l > PROB_FLOOR)
        .map(|l| l * l.ln())
        .sum();
    let sigma_spec = sigma.spectrum()?;
    let mut cross = 0.0;
    for (k, &mu) in sigma_spec.eigenvalues.iter().enumerate() {
        let v = sigma_spec.eigenvectors.column(k);
        let rho_v = crate::linalg::apply(rho.matrix(), &v)?;
        let weight = v.inner(&rho_v)?.re;
        if weight <= EIGEN_CLIP {
            continue;
        }
        if mu <= EIGEN_CLIP {
            return Ok(f64::INFINITY);
        }
        cross += weight * mu.ln();
    }
    Ok(((neg_entropy - cross) / base.ln_base()).max(0.0))
}

/// S(Σ pᵢρᵢ) − Σ pᵢ S(ρᵢ) in bits.
pub fn holevo_accessible(states: &[DensityMatrix], priors: &ProbabilityDistribution) -> Result<f64> {
    if states.len() != priors.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} states for {} priors",
            states.len(),
            priors.len()
        )));
    }
    let average = DensityMatrix::mixture(priors.probabilities(), states)?;
    let mut chi = von_neumann(&average)?;
    for (p, rho) in priors.probabilities().iter().zip(states) {
        chi -= p * von_neumann(rho)?;
    }
    Ok(chi.max(0.0))
}

/// Two Hermitian observables and the pure state they are measured in.
#[derive(Debug, Clone)]
pub struct ObservablePair {
    a: ComplexMatrix,
    b: ComplexMatrix,
    state: StateVector,
}

impl ObservablePair {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, state: StateVector) -> Result<Self> {
        for m in [&a, &b] {
            if !m.is_square() || m.rows() != state.dim() {
                return Err(Error::DimensionMismatch(format!(
                    "observable is {}x{}, state has dimension {}",
                    m.rows(),
                    m.cols(),
                    state.dim()
                )));
            }
            let deviation = m.hermitian_deviation();
            if deviation > STRUCTURE_TOL {
                return Err(Error::NotHermitian(deviation));
            }
        }
        Ok(Self { a, b, state })
    }
}

/// Both sides of the Schrödinger-Robertson relation
/// (ΔA)²(ΔB)² ≥ ¼|⟨[A,B]⟩|² + ¼|⟨{A,B}⟩ − 2⟨A⟩⟨B⟩|².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub var_a: f64,
    pub var_b: f64,
    pub commutator_term: f64,
    pub covariance: f64,
    pub is_intelligent: bool,
}

impl UncertaintyReport {
    pub fn lhs(&self) -> f64 {
        self.var_a * self.var_b
    }

    pub fn rhs(&self) -> f64 {
        self.commutator_term + self.covariance
    }

    pub fn slack(&self) -> f64 {
        self.lhs() - self.rhs()
    }
}

pub fn uncertainty_check(obs: &ObservablePair) -> Result<UncertaintyReport> {
    let psi = obs.state.amplitudes();
    let expect = |m: &ComplexMatrix| -> Result<Complex64> {
        psi.inner(&crate::linalg::apply(m, psi)?)
    };
    let ab = &obs.a * &obs.b;
    let ba = &obs.b * &obs.a;
    let mean_a = expect(&obs.a)?.re;
    let mean_b = expect(&obs.b)?.re;
    let var_a = (expect(&(&obs.a * &obs.a))?.re - mean_a * mean_a).max(0.0);
    let var_b = (expect(&(&obs.b * &obs.b))?.re - mean_b * mean_b).max(0.0);
    let commutator_term = 0.25 * expect(&(&ab - &ba))?.norm_sqr();
    let anti = expect(&(&ab + &ba))? - Complex64::new(2.0 * mean_a * mean_b, 0.0);
    let covariance = 0.25 * anti.norm_sqr();
    let slack = var_a * var_b - commutator_term - covariance;
    Ok(UncertaintyReport {
        var_a,
        var_b,
        commutator_term,
        covariance,
        is_intelligent: slack.abs() <= INTELLIGENT_TOL,
    })
}

/// Most probable outcome on `t`; ties go to the lowest index.
pub fn select_intelligent_state(s: &StateVector, t: &QubitSubset) -> Result<String> {
    let p = born_distribution(s, t)?;
    let mut best = 0;
    for (i, &pi) in p.probabilities().iter().enumerate().skip(1) {
        if pi > p.probabilities()[best] + 1e-12 {
            best = i;
        }
    }
    Ok(index_to_bits(best, t.len()))
}
