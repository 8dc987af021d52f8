//! Pure states, qubit subsets, reduced density matrices and Born-rule
//! distributions.
//!
//! Basis index `b` of an `n`-qubit state encodes `|i₁…iₙ⟩` with qubit 1 as the
//! most significant bit. Qubit positions are 1-based throughout the public API.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    apply, check_density, hermitian_eig, ComplexMatrix, ComplexVector, Spectrum, STRUCTURE_TOL,
    ZERO,
};

/// Tolerance on Σ|a|² = 1 and Σp = 1.
pub const NORM_TOL: f64 = 1e-10;

/// Parses a bit string such as `"0101"`.
pub fn parse_bits(bits: &str) -> Result<Vec<bool>> {
    if bits.is_empty() {
        return Err(Error::BadBits(bits.to_owned()));
    }
    bits.chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::BadBits(bits.to_owned())),
        })
        .collect()
}

/// Index of a bit string read most-significant-bit first.
pub fn bits_to_index(bits: &str) -> Result<usize> {
    let parsed = parse_bits(bits)?;
    if parsed.len() >= usize::BITS as usize {
        return Err(Error::BadBits(bits.to_owned()));
    }
    Ok(parsed.iter().fold(0, |acc, &b| (acc << 1) | usize::from(b)))
}

/// Formats `index` as a `width`-bit string, most significant bit first.
pub fn index_to_bits(index: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|shift| if (index >> shift) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// A normalized pure state on `n` qubits.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: ComplexVector,
}

impl StateVector {
    /// Wraps amplitudes, rejecting wrong dimensions and unnormalized input.
    pub fn new(n_qubits: usize, amplitudes: ComplexVector) -> Result<Self> {
        check_dim(n_qubits, amplitudes.dim())?;
        let norm = amplitudes.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(n_qubits: usize, amplitudes: ComplexVector) -> Result<Self> {
        check_dim(n_qubits, amplitudes.dim())?;
        let norm = amplitudes.norm_sqr();
        if norm == 0.0 {
            return Err(Error::NotNormalized(0.0));
        }
        Self::new(
            n_qubits,
            amplitudes.scale(Complex64::new(1.0 / norm.sqrt(), 0.0)),
        )
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.dim()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    /// Applies a unitary, failing with an invariant error if the norm drifts.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<StateVector> {
        let out = apply(u, &self.amplitudes)?;
        let norm = out.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Invariant(format!(
                "state norm drifted to {norm} after a gate"
            )));
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amplitudes: out,
        })
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in self.amplitudes.as_slice() {
            for b in other.amplitudes.as_slice() {
                data.push(a * b);
            }
        }
        StateVector {
            n_qubits: self.n_qubits + other.n_qubits,
            amplitudes: ComplexVector::new(data).expect("products of finite values"),
        }
    }

    /// |s⟩⟨s| as a density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            matrix: self.amplitudes.outer(),
        }
    }

    /// Largest entrywise distance to another state after removing a global phase.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> f64 {
        let overlap = self
            .amplitudes
            .inner(&other.amplitudes)
            .unwrap_or(ZERO);
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.amplitudes
            .scale(phase)
            .max_abs_diff(&other.amplitudes)
    }
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateVector({} qubits) ", self.n_qubits)?;
        let mut map = f.debug_map();
        for (i, a) in self.amplitudes.as_slice().iter().enumerate() {
            if a.norm() > 1e-12 {
                map.entry(&index_to_bits(i, self.n_qubits), a);
            }
        }
        map.finish()
    }
}

fn check_dim(n_qubits: usize, dim: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits >= usize::BITS as usize || dim != 1usize << n_qubits {
        return Err(Error::DimensionMismatch(format!(
            "{n_qubits} qubits need dimension 2^{n_qubits}, got {dim}"
        )));
    }
    Ok(())
}

/// Computational basis state `|bits⟩`.
pub fn basis_state(n: usize, bits: &str) -> Result<StateVector> {
    if bits.len() != n {
        return Err(Error::BadBits(format!("{bits} (expected {n} bits)")));
    }
    let index = bits_to_index(bits)?;
    let mut data = vec![ZERO; 1 << n];
    data[index] = Complex64::new(1.0, 0.0);
    StateVector::new(n, ComplexVector::new(data)?)
}

/// A set of 1-based qubit positions, kept sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct QubitSubset {
    indices: Vec<usize>,
}

impl QubitSubset {
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::BadSubset("subset is empty".into()));
        }
        if indices.contains(&0) {
            return Err(Error::BadSubset("qubit positions are 1-based".into()));
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::BadSubset(format!("duplicate positions in {indices:?}")));
        }
        Ok(Self { indices })
    }

    /// Qubits `first..=last`.
    pub fn range(first: usize, last: usize) -> Result<Self> {
        Self::new((first..=last).collect())
    }

    pub fn single(qubit: usize) -> Result<Self> {
        Self::new(vec![qubit])
    }

    /// Every qubit of an `n`-qubit register.
    pub fn all(n: usize) -> Result<Self> {
        Self::range(1, n)
    }

    /// Parses a comma-separated list such as `"1,2,3"`.
    pub fn parse(text: &str) -> Result<Self> {
        let indices = text
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::BadSubset(format!("bad qubit index {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn check_within(&self, n_qubits: usize) -> Result<()> {
        match self.indices.last() {
            Some(&max) if max <= n_qubits => Ok(()),
            _ => Err(Error::BadSubset(format!(
                "{:?} not within 1..={n_qubits}",
                self.indices
            ))),
        }
    }

    /// Splits every basis index into (index within subset, index within complement).
    fn split_indices(&self, n_qubits: usize) -> Vec<(usize, usize)> {
        let in_subset: Vec<bool> = (1..=n_qubits).map(|q| self.indices.contains(&q)).collect();
        (0..1usize << n_qubits)
            .map(|b| {
                let (mut kept, mut rest) = (0, 0);
                for (pos, &inside) in in_subset.iter().enumerate() {
                    let bit = (b >> (n_qubits - 1 - pos)) & 1;
                    if inside {
                        kept = (kept << 1) | bit;
                    } else {
                        rest = (rest << 1) | bit;
                    }
                }
                (kept, rest)
            })
            .collect()
    }
}

impl TryFrom<Vec<usize>> for QubitSubset {
    type Error = Error;

    fn try_from(value: Vec<usize>) -> Result<Self> {
        Self::new(value)
    }
}

impl From<QubitSubset> for Vec<usize> {
    fn from(value: QubitSubset) -> Self {
        value.indices
    }
}

impl fmt::Display for QubitSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices.iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotDensity("matrix is not square".into()));
        }
        if !check_density(&matrix, STRUCTURE_TOL) {
            return Err(Error::NotDensity(
                "matrix must be Hermitian, unit trace and positive semidefinite".into(),
            ));
        }
        Ok(Self { matrix })
    }

    /// Convex combination Σ wᵢρᵢ.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        let order = states[0].order();
        let mut acc = ComplexMatrix::zeros(order, order);
        for (w, rho) in weights.iter().zip(states) {
            if rho.order() != order {
                return Err(Error::DimensionMismatch(format!(
                    "density orders {order} and {} differ",
                    rho.order()
                )));
            }
            acc = &acc + &rho.matrix.scale(Complex64::new(*w, 0.0));
        }
        Self::new(acc)
    }

    pub fn maximally_mixed(order: usize) -> Self {
        let w = Complex64::new(1.0 / order as f64, 0.0);
        Self {
            matrix: ComplexMatrix::identity(order).scale(w),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn order(&self) -> usize {
        self.matrix.rows()
    }

    /// Number of qubits when the order is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        let order = self.order();
        order
            .is_power_of_two()
            .then(|| order.trailing_zeros() as usize)
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        hermitian_eig(&self.matrix)
    }

    /// Real diagonal entries.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.order()).map(|i| self.matrix.get(i, i).re).collect()
    }

    /// U·ρ·U†.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        let rotated = u.matmul(&self.matrix)?.matmul(&u.dagger())?;
        DensityMatrix::new(rotated)
            .map_err(|e| Error::Invariant(format!("evolved density matrix invalid: {e}")))
    }

    /// Partial trace keeping only the qubits in `keep`.
    pub fn partial_trace(&self, keep: &QubitSubset) -> Result<DensityMatrix> {
        let n = self
            .n_qubits()
            .ok_or_else(|| Error::DimensionMismatch("order is not a power of two".into()))?;
        keep.check_within(n)?;
        let split = keep.split_indices(n);
        let k = keep.len();
        let mut out = ComplexMatrix::zeros(1 << k, 1 << k);
        for (row, &(ti, ri)) in split.iter().enumerate() {
            for (col, &(tj, rj)) in split.iter().enumerate() {
                if ri == rj {
                    let value = out.get(ti, tj) + self.matrix.get(row, col);
                    out.set(ti, tj, value);
                }
            }
        }
        Ok(DensityMatrix { matrix: out })
    }
}

/// Probabilities over outcome labels. When `width` is set the labels are
/// `width`-bit strings (index `i` ↔ its binary expansion).
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution {
    probabilities: Vec<f64>,
    width: Option<usize>,
}

impl ProbabilityDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::BadDistribution("no outcomes".into()));
        }
        if let Some(p) = probabilities.iter().find(|p| !p.is_finite() || **p < -NORM_TOL) {
            return Err(Error::BadDistribution(format!("invalid probability {p}")));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::BadDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self {
            probabilities: probabilities.into_iter().map(|p| p.max(0.0)).collect(),
            width: None,
        })
    }

    pub fn uniform(outcomes: usize) -> Result<Self> {
        if outcomes == 0 {
            return Err(Error::BadDistribution("no outcomes".into()));
        }
        Self::new(vec![1.0 / outcomes as f64; outcomes])
    }

    /// Labels the outcomes as `width`-bit strings.
    pub fn with_width(mut self, width: usize) -> Result<Self> {
        if 1usize.checked_shl(width as u32) != Some(self.probabilities.len()) {
            return Err(Error::BadDistribution(format!(
                "{} outcomes cannot carry {width}-bit labels",
                self.probabilities.len()
            )));
        }
        self.width = Some(width);
        Ok(self)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn width(&self) -> Option<usize> {
        self.width
    }

    pub fn label(&self, index: usize) -> String {
        match self.width {
            Some(w) => index_to_bits(index, w),
            None => index.to_string(),
        }
    }

    pub fn probability_of(&self, label: &str) -> Option<f64> {
        let index = match self.width {
            Some(w) if label.len() == w => bits_to_index(label).ok()?,
            Some(_) => return None,
            None => label.parse().ok()?,
        };
        self.probabilities.get(index).copied()
    }

    /// Outcome indices whose probability exceeds `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        self.probabilities
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > threshold)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Marginal distribution of the qubits in `t`.
pub fn born_distribution(s: &StateVector, t: &QubitSubset) -> Result<ProbabilityDistribution> {
    t.check_within(s.n_qubits())?;
    let mut probabilities = vec![0.0; 1 << t.len()];
    for (b, (kept, _)) in t.split_indices(s.n_qubits()).into_iter().enumerate() {
        probabilities[kept] += s.amplitude(b).norm_sqr();
    }
    ProbabilityDistribution::new(probabilities)?.with_width(t.len())
}

/// Reduced density matrix of the qubits in `t` (partial trace over the rest).
pub fn reduce(s: &StateVector, t: &QubitSubset) -> Result<DensityMatrix> {
    let n = s.n_qubits();
    t.check_within(n)?;
    let k = t.len();
    let rest = 1usize << (n - k);
    // Rows are subset indices, columns complement indices; ρ = M·M†.
    let mut m = vec![ZERO; (1 << k) * rest];
    for (b, (kept, other)) in t.split_indices(n).into_iter().enumerate() {
        m[kept * rest + other] = s.amplitude(b);
    }
    let dim = 1usize << k;
    let mut rho = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let row_i = &m[i * rest..(i + 1) * rest];
        for j in i..dim {
            let row_j = &m[j * rest..(j + 1) * rest];
            let value: Complex64 = row_i.iter().zip(row_j).map(|(a, b)| a * b.conj()).sum();
            rho.set(i, j, value);
            rho.set(j, i, value.conj());
        }
        let d = rho.get(i, i).re;
        rho.set(i, i, Complex64::new(d, 0.0));
    }
    Ok(DensityMatrix { matrix: rho })
}

/// One component of the decomposition `|A⟩ = |A⟩_{|0⟩} + |A⟩_{|1⟩}` on a pivot qubit.
#[derive(Debug, Clone)]
pub struct Branch {
    pub pivot_value: bool,
    /// Unnormalized amplitudes over the remaining qubits, in their original order.
    pub amplitudes: ComplexVector,
    /// Squared norm of `amplitudes`.
    pub weight: f64,
}

impl Branch {
    /// −Σ|a|² log₂|a|² over the unnormalized branch amplitudes.
    pub fn partial_shannon(&self) -> f64 {
        self.amplitudes
            .as_slice()
            .iter()
            .map(|a| a.norm_sqr())
            .filter(|&p| p > 1e-15)
            .map(|p| -p * p.log2())
            .sum()
    }

    /// Spectral entropy of the rank-one operator |A_b⟩⟨A_b|, i.e. −w log₂ w.
    pub fn partial_von_neumann(&self) -> f64 {
        if self.weight > 1e-15 {
            -self.weight * self.weight.log2()
        } else {
            0.0
        }
    }
}

/// Splits `s` by the value of `pivot_qubit` (1-based).
pub fn branch_decompose(s: &StateVector, pivot_qubit: usize) -> Result<[Branch; 2]> {
    let n = s.n_qubits();
    if pivot_qubit == 0 || pivot_qubit > n {
        return Err(Error::BadSubset(format!(
            "pivot {pivot_qubit} not within 1..={n}"
        )));
    }
    if n == 1 {
        return Err(Error::BadSubset(
            "branch decomposition needs at least two qubits".into(),
        ));
    }
    let shift = n - pivot_qubit;
    let mut parts = [vec![ZERO; 1 << (n - 1)], vec![ZERO; 1 << (n - 1)]];
    for b in 0..s.dim() {
        let bit = (b >> shift) & 1;
        let high = b >> (shift + 1);
        let low = b & ((1 << shift) - 1);
        parts[bit][(high << shift) | low] = s.amplitude(b);
    }
    let [zero, one] = parts;
    let make = |pivot_value: bool, data: Vec<Complex64>| -> Result<Branch> {
        let amplitudes = ComplexVector::new(data)?;
        let weight = amplitudes.norm_sqr();
        Ok(Branch {
            pivot_value,
            amplitudes,
            weight,
        })
    };
    Ok([make(false, zero)?, make(true, one)?])
}
