//! Constructors for every unitary the algorithms use.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    check_unitary, tensor_product, ComplexMatrix, DEFAULT_MAX_QUBITS, ONE, STRUCTURE_TOL, ZERO,
};
use crate::state::{bits_to_index, index_to_bits};

fn check_qubits(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("qubit count must be at least 1".into()));
    }
    if k > DEFAULT_MAX_QUBITS {
        return Err(Error::TooLarge {
            qubits: k,
            ceiling: DEFAULT_MAX_QUBITS,
        });
    }
    Ok(())
}

/// The classical function `f: {0,1}^n_in → {0,1}^n_out` an oracle encodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    n_in: usize,
    n_out: usize,
    /// `outputs[x]` is `f(x)` with both sides read most-significant-bit first.
    outputs: Vec<usize>,
}

impl TruthTable {
    pub fn new(n_in: usize, n_out: usize, outputs: Vec<usize>) -> Result<Self> {
        if n_in == 0 || n_out == 0 {
            return Err(Error::BadTruthTable("arities must be at least 1".into()));
        }
        if n_in + n_out > DEFAULT_MAX_QUBITS {
            return Err(Error::TooLarge {
                qubits: n_in + n_out,
                ceiling: DEFAULT_MAX_QUBITS,
            });
        }
        if outputs.len() != 1 << n_in {
            return Err(Error::BadTruthTable(format!(
                "expected {} rows, got {}",
                1usize << n_in,
                outputs.len()
            )));
        }
        if let Some((x, y)) = outputs.iter().enumerate().find(|(_, &y)| y >> n_out != 0) {
            return Err(Error::BadTruthTable(format!(
                "output {y} for input {} does not fit in {n_out} bits",
                index_to_bits(x, n_in)
            )));
        }
        Ok(Self {
            n_in,
            n_out,
            outputs,
        })
    }

    pub fn from_fn(n_in: usize, n_out: usize, f: impl Fn(usize) -> usize) -> Result<Self> {
        Self::new(n_in, n_out, (0..1usize << n_in).map(f).collect())
    }

    /// Builds a table from `(input bits, output bits)` rows given in any order.
    pub fn from_rows<S: AsRef<str>>(rows: &[(S, S)]) -> Result<Self> {
        let (first_in, first_out) = rows
            .first()
            .ok_or_else(|| Error::BadTruthTable("no rows".into()))?;
        let (n_in, n_out) = (first_in.as_ref().len(), first_out.as_ref().len());
        let mut outputs: Vec<Option<usize>> = vec![None; 1usize.checked_shl(n_in as u32).unwrap_or(0)];
        for (input, output) in rows {
            let (input, output) = (input.as_ref(), output.as_ref());
            if input.len() != n_in || output.len() != n_out {
                return Err(Error::Arity(format!(
                    "row {input} {output} does not match arity {n_in}->{n_out}"
                )));
            }
            let slot = &mut outputs[bits_to_index(input)?];
            if slot.is_some() {
                return Err(Error::BadTruthTable(format!("duplicate input {input}")));
            }
            *slot = Some(bits_to_index(output)?);
        }
        let outputs = outputs
            .into_iter()
            .enumerate()
            .map(|(x, y)| {
                y.ok_or_else(|| {
                    Error::BadTruthTable(format!("missing input {}", index_to_bits(x, n_in)))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n_in, n_out, outputs)
    }

    pub fn n_in(&self) -> usize {
        self.n_in
    }

    pub fn n_out(&self) -> usize {
        self.n_out
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn eval(&self, x: usize) -> usize {
        self.outputs[x]
    }

    /// Rows as `(input bits, output bits)` in ascending input order.
    pub fn rows(&self) -> impl Iterator<Item = (String, String)> + '_ {
        self.outputs
            .iter()
            .enumerate()
            .map(|(x, &y)| (index_to_bits(x, self.n_in), index_to_bits(y, self.n_out)))
    }

    pub fn is_constant(&self) -> bool {
        self.outputs.windows(2).all(|w| w[0] == w[1])
    }

    /// Single-output table with exactly half the inputs mapped to 1.
    pub fn is_balanced(&self) -> bool {
        self.n_out == 1 && self.outputs.iter().filter(|&&y| y == 1).count() * 2 == self.outputs.len()
    }
}

/// The three stages of a quantum algorithmic gate.
#[derive(Debug, Clone)]
pub struct GatePlan {
    superposition: ComplexMatrix,
    entanglement: ComplexMatrix,
    interference: ComplexMatrix,
}

impl GatePlan {
    pub fn new(
        superposition: ComplexMatrix,
        entanglement: ComplexMatrix,
        interference: ComplexMatrix,
    ) -> Result<Self> {
        let order = superposition.rows();
        for (name, m) in [
            ("superposition", &superposition),
            ("entanglement", &entanglement),
            ("interference", &interference),
        ] {
            if !m.is_square() || m.rows() != order {
                return Err(Error::DimensionMismatch(format!(
                    "{name} operator is {}x{}, expected {order}x{order}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !check_unitary(m, STRUCTURE_TOL) {
                return Err(Error::Invariant(format!("{name} operator is not unitary")));
            }
        }
        Ok(Self {
            superposition,
            entanglement,
            interference,
        })
    }

    /// `(ⁿH ⊗ I)·U_F·ⁿ⁺¹H` for a single-output function.
    pub fn deutsch_jozsa(f: &TruthTable) -> Result<Self> {
        if f.n_out() != 1 {
            return Err(Error::Arity(format!(
                "Deutsch-Jozsa needs one output bit, table has {}",
                f.n_out()
            )));
        }
        let n = f.n_in();
        Self::new(
            hadamard_power(n + 1)?,
            oracle_from_truth_table(f)?,
            tensor_product(&hadamard_power(n)?, &identity_qubits(1))?,
        )
    }

    /// `(QFTₙ ⊗ Iₙ)·U_F·(QFTₙ ⊗ Iₙ)` for an `n → n` function.
    pub fn shor(f: &TruthTable) -> Result<Self> {
        if f.n_in() != f.n_out() {
            return Err(Error::Arity(format!(
                "period finding needs n_in == n_out, got {} and {}",
                f.n_in(),
                f.n_out()
            )));
        }
        let n = f.n_in();
        let fourier = tensor_product(&qft(n)?, &identity_qubits(n))?;
        Self::new(fourier.clone(), oracle_from_truth_table(f)?, fourier)
    }

    pub fn superposition(&self) -> &ComplexMatrix {
        &self.superposition
    }

    pub fn entanglement(&self) -> &ComplexMatrix {
        &self.entanglement
    }

    pub fn interference(&self) -> &ComplexMatrix {
        &self.interference
    }
}

/// The NOT gate `C = (0 1; 1 0)`.
pub fn not_gate() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).expect("constant matrix")
}

/// Identity on `k` qubits (order `2^k`).
pub fn identity_qubits(k: usize) -> ComplexMatrix {
    ComplexMatrix::identity(1 << k)
}

/// `H^{⊗k}`; entry `(i, j)` is `2^{-k/2}·(−1)^{popcount(i & j)}`.
pub fn hadamard_power(k: usize) -> Result<ComplexMatrix> {
    check_qubits(k)?;
    let order = 1usize << k;
    let magnitude = FRAC_1_SQRT_2.powi(k as i32);
    let data = (0..order * order)
        .map(|e| {
            let (i, j) = (e / order, e % order);
            let sign = if (i & j).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            Complex64::new(sign * magnitude, 0.0)
        })
        .collect();
    ComplexMatrix::new(order, order, data)
}

/// Quantum Fourier transform on `n` qubits: `[QFTₙ]_{ij} = 2^{-n/2}·exp(2πi·i·j/2^n)` (0-based).
pub fn qft(n: usize) -> Result<ComplexMatrix> {
    check_qubits(n)?;
    let order = 1usize << n;
    let scale = 1.0 / (order as f64).sqrt();
    let data = (0..order * order)
        .map(|e| {
            let (i, j) = (e / order, e % order);
            // Reduce the exponent modulo 2^n so large products keep full precision.
            let phase = TAU * ((i * j) % order) as f64 / order as f64;
            Complex64::from_polar(scale, phase)
        })
        .collect();
    ComplexMatrix::new(order, order, data)
}

/// Permutation unitary `|x, y⟩ → |x, y ⊕ f(x)⟩` with `x` on the leading qubits.
pub fn oracle_from_truth_table(f: &TruthTable) -> Result<ComplexMatrix> {
    let (n_in, n_out) = (f.n_in(), f.n_out());
    let order = 1usize << (n_in + n_out);
    let mut u = ComplexMatrix::zeros(order, order);
    for x in 0..1usize << n_in {
        let fx = f.eval(x);
        for y in 0..1usize << n_out {
            let column = (x << n_out) | y;
            let row = (x << n_out) | (y ^ fx);
            u.set(row, column, ONE);
        }
    }
    Ok(u)
}

/// Phase oracle `I − 2|x₀⟩⟨x₀|` on `n` qubits.
pub fn phase_oracle(n: usize, marked: &str) -> Result<ComplexMatrix> {
    check_qubits(n)?;
    if marked.len() != n {
        return Err(Error::BadBits(format!("{marked} (expected {n} bits)")));
    }
    let target = bits_to_index(marked)?;
    let diagonal: Vec<Complex64> = (0..1usize << n)
        .map(|i| if i == target { -ONE } else { ONE })
        .collect();
    Ok(ComplexMatrix::diagonal(&diagonal))
}

/// Inversion about the average on `n` qubits: `D = 2A − I` with `A` the all-`1/2^n` matrix.
pub fn diffusion(n: usize) -> Result<ComplexMatrix> {
    check_qubits(n)?;
    let order = 1usize << n;
    let off = 2.0 / order as f64;
    let data = (0..order * order)
        .map(|e| {
            let value = if e / order == e % order { off - 1.0 } else { off };
            Complex64::new(value, 0.0)
        })
        .collect();
    ComplexMatrix::new(order, order, data)
}

/// The single operator `interference · entanglement · superposition`.
pub fn compose_qag(plan: &GatePlan) -> Result<ComplexMatrix> {
    let product = plan
        .interference
        .matmul(&plan.entanglement)?
        .matmul(&plan.superposition)?;
    if !check_unitary(&product, STRUCTURE_TOL) {
        return Err(Error::Invariant("composed gate is not unitary".into()));
    }
    Ok(product)
}

/// Checks that a matrix is a 0/1 permutation matrix.
pub fn is_permutation(m: &ComplexMatrix) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.rows();
    let entries_ok = m
        .as_slice()
        .iter()
        .all(|&z| z == ZERO || z == ONE);
    let rows_ok = (0..n).all(|i| (0..n).filter(|&j| m.get(i, j) == ONE).count() == 1);
    let cols_ok = (0..n).all(|j| (0..n).filter(|&i| m.get(i, j) == ONE).count() == 1);
    entries_ok && rows_ok && cols_ok
}
