//! Step-by-step execution of Deutsch, Deutsch-Jozsa, Shor period finding
//! and Grover search, with an entropy record after every gate.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{
    diffusion, hadamard_power, identity_qubits, oracle_from_truth_table, GatePlan, TruthTable,
};
use crate::linalg::{tensor_product, ComplexMatrix, DEFAULT_MAX_QUBITS};
use crate::measures::{
    entropy_record, holevo_accessible, select_intelligent_state, shannon_full, EntropyRecord,
    LogBase,
};
use crate::state::{
    basis_state, bits_to_index, born_distribution, index_to_bits, DensityMatrix,
    ProbabilityDistribution, QubitSubset, StateVector,
};

/// Agreement required between simulated and analytic Grover success probability.
pub const AMPLITUDE_LAW_TOL: f64 = 1e-9;

/// Shannon values closer than this count as tied in the termination scan.
pub const SCAN_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Deutsch,
    DeutschJozsa,
    Shor,
    Grover,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Deutsch => "deutsch",
            Algorithm::DeutschJozsa => "deutsch-jozsa",
            Algorithm::Shor => "shor",
            Algorithm::Grover => "grover",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deutsch" => Ok(Algorithm::Deutsch),
            "deutsch-jozsa" | "dj" => Ok(Algorithm::DeutschJozsa),
            "shor" => Ok(Algorithm::Shor),
            "grover" => Ok(Algorithm::Grover),
            other => Err(Error::InvalidParameter(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepLabel {
    Input,
    Superposition,
    Entanglement,
    Interference,
}

impl StepLabel {
    pub fn name(self) -> &'static str {
        match self {
            StepLabel::Input => "input",
            StepLabel::Superposition => "superposition",
            StepLabel::Entanglement => "entanglement",
            StepLabel::Interference => "interference",
        }
    }
}

impl fmt::Display for StepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which Grover sub-steps are kept in the trace.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    /// Only the state after each full iteration.
    Iter,
    /// Oracle and diffusion states both.
    #[default]
    Substep,
}

#[derive(Debug, Clone)]
pub struct StepRecord {
    pub label: StepLabel,
    pub state: StateVector,
    /// One record per qubit, ancilla included.
    pub per_qubit: Vec<EntropyRecord>,
    pub subset: EntropyRecord,
    /// Born distribution on the analysis subset.
    pub distribution: ProbabilityDistribution,
}

#[derive(Debug, Clone)]
pub struct StepTrace {
    pub steps: Vec<StepRecord>,
    pub iteration_index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Verdict {
    Constant,
    Balanced,
    Period(usize),
    /// The output distribution carried no period information.
    Indeterminate,
    /// The output distribution is not peaked on multiples of 2^n/r.
    Aperiodic,
    Marked(String),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Constant => f.write_str("constant"),
            Verdict::Balanced => f.write_str("balanced"),
            Verdict::Period(r) => write!(f, "period:{r}"),
            Verdict::Indeterminate => f.write_str("indeterminate"),
            Verdict::Aperiodic => f.write_str("aperiodic"),
            Verdict::Marked(bits) => write!(f, "marked:{bits}"),
        }
    }
}

/// First-register entropy after `k` Grover iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub k: usize,
    pub shannon_bits: f64,
    pub p_marked: f64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub trace: Vec<StepTrace>,
    pub chosen_outcome: String,
    pub stop_iteration: usize,
    pub verdict: Verdict,
    /// Filled by the termination scan only.
    pub scan: Vec<ScanPoint>,
}

impl RunResult {
    pub fn steps(&self) -> impl Iterator<Item = (usize, &StepRecord)> {
        self.trace
            .iter()
            .flat_map(|t| t.steps.iter().map(move |s| (t.iteration_index, s)))
    }

    pub fn final_step(&self) -> Option<&StepRecord> {
        self.trace.last().and_then(|t| t.steps.last())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Oracle {
    Table(TruthTable),
    Marked(String),
}

#[derive(Debug, Clone)]
pub struct AlgorithmConfig {
    pub algorithm: Algorithm,
    /// Source-register width.
    pub n: usize,
    pub oracle: Oracle,
    pub max_iterations: usize,
    /// Fixed Grover iteration count; defaults to the analytic optimum.
    pub iterations: Option<usize>,
    /// Run the Grover termination scan instead of a fixed count.
    pub scan: bool,
    /// Defaults to the first register.
    pub analysis_subset: Option<QubitSubset>,
    pub granularity: Granularity,
}

impl AlgorithmConfig {
    pub fn new(algorithm: Algorithm, n: usize, oracle: Oracle) -> Self {
        Self {
            algorithm,
            n,
            oracle,
            max_iterations: default_horizon(n),
            iterations: None,
            scan: false,
            analysis_subset: None,
            granularity: Granularity::default(),
        }
    }

    pub fn grover(n: usize, marked: &str) -> Self {
        Self::new(Algorithm::Grover, n, Oracle::Marked(marked.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let total = match self.algorithm {
            Algorithm::Shor => 2 * self.n,
            _ => self.n + 1,
        };
        if total > DEFAULT_MAX_QUBITS {
            return Err(Error::TooLarge {
                qubits: total,
                ceiling: DEFAULT_MAX_QUBITS,
            });
        }
        match (&self.oracle, self.algorithm) {
            (Oracle::Marked(bits), Algorithm::Grover) => {
                if bits.len() != self.n {
                    return Err(Error::Arity(format!(
                        "marked item {bits:?} has {} bits, n is {}",
                        bits.len(),
                        self.n
                    )));
                }
                bits_to_index(bits)?;
            }
            (Oracle::Marked(_), other) => {
                return Err(Error::InvalidParameter(format!(
                    "{other} needs a truth-table oracle"
                )))
            }
            (Oracle::Table(f), algorithm) => {
                let expected_out = if algorithm == Algorithm::Shor { self.n } else { 1 };
                if f.n_in() != self.n || f.n_out() != expected_out {
                    return Err(Error::Arity(format!(
                        "{algorithm} with n={} needs a {}→{expected_out} table, got {}→{}",
                        self.n,
                        self.n,
                        f.n_in(),
                        f.n_out()
                    )));
                }
                if algorithm == Algorithm::Deutsch && self.n != 1 {
                    return Err(Error::Arity("Deutsch takes a single input bit".into()));
                }
            }
        }
        if self.algorithm == Algorithm::Grover {
            if self.max_iterations == 0 {
                return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
            }
            if let Some(k) = self.iterations {
                if k > self.max_iterations {
                    return Err(Error::InvalidParameter(format!(
                        "{k} iterations exceeds max_iterations {}",
                        self.max_iterations
                    )));
                }
            }
        }
        if let Some(t) = &self.analysis_subset {
            t.check_within(self.total_qubits())?;
        }
        Ok(())
    }

    pub fn total_qubits(&self) -> usize {
        match self.algorithm {
            Algorithm::Shor => 2 * self.n,
            _ => self.n + 1,
        }
    }

    fn subset(&self) -> Result<QubitSubset> {
        match &self.analysis_subset {
            Some(t) => Ok(t.clone()),
            None => QubitSubset::range(1, self.n),
        }
    }
}

/// `ceil(π/4·√N) + 3` with `N = 2^n`.
pub fn default_horizon(n: usize) -> usize {
    let big_n = 2f64.powi(n as i32);
    (PI / 4.0 * big_n.sqrt()).ceil() as usize + 3
}

/// θ with sin θ = 2^{−n/2}.
pub fn grover_angle(n: usize) -> f64 {
    2f64.powf(-(n as f64) / 2.0).asin()
}

/// Analytic success probability sin²((2k+1)θ).
pub fn grover_success_probability(n: usize, k: usize) -> f64 {
    ((2 * k + 1) as f64 * grover_angle(n)).sin().powi(2)
}

/// The iteration count `round(π/(4θ) − ½)`.
pub fn grover_optimal_iterations(n: usize) -> usize {
    (PI / (4.0 * grover_angle(n)) - 0.5).round().max(0.0) as usize
}

fn step_record(label: StepLabel, state: StateVector, subset: &QubitSubset) -> Result<StepRecord> {
    let per_qubit = (1..=state.n_qubits())
        .map(|q| entropy_record(&state, &QubitSubset::single(q)?))
        .collect::<Result<Vec<_>>>()?;
    let record = entropy_record(&state, subset)?;
    let distribution = born_distribution(&state, subset)?;
    Ok(StepRecord {
        label,
        state,
        per_qubit,
        subset: record,
        distribution,
    })
}

/// Input, then the three stages of `plan`, as a single-iteration trace.
fn run_plan(input: StateVector, plan: &GatePlan, subset: &QubitSubset) -> Result<StepTrace> {
    let s1 = input.evolve(plan.superposition())?;
    let s2 = s1.evolve(plan.entanglement())?;
    let s3 = s2.evolve(plan.interference())?;
    let steps = [
        (StepLabel::Input, input),
        (StepLabel::Superposition, s1),
        (StepLabel::Entanglement, s2),
        (StepLabel::Interference, s3),
    ]
    .into_iter()
    .map(|(label, s)| step_record(label, s, subset))
    .collect::<Result<Vec<_>>>()?;
    Ok(StepTrace {
        steps,
        iteration_index: 1,
    })
}

fn dj_like(f: &TruthTable, subset: &QubitSubset, algorithm: Algorithm) -> Result<RunResult> {
    let n = f.n_in();
    subset.check_within(n + 1)?;
    let plan = GatePlan::deutsch_jozsa(f)?;
    let input = basis_state(n + 1, &format!("{}1", "0".repeat(n)))?;
    let trace = run_plan(input, &plan, subset)?;
    let output = &trace.steps[3].state;
    let first = QubitSubset::range(1, n)?;
    let p_zero = born_distribution(output, &first)?.probabilities()[0];
    let verdict = if p_zero > 0.5 {
        Verdict::Constant
    } else {
        Verdict::Balanced
    };
    Ok(RunResult {
        algorithm,
        chosen_outcome: select_intelligent_state(output, &first)?,
        trace: vec![trace],
        stop_iteration: 1,
        verdict,
        scan: Vec::new(),
    })
}

/// Deutsch's problem for a one-bit function.
pub fn run_deutsch(f: &TruthTable) -> Result<RunResult> {
    if f.n_in() != 1 || f.n_out() != 1 {
        return Err(Error::Arity(format!(
            "Deutsch needs a 1→1 table, got {}→{}",
            f.n_in(),
            f.n_out()
        )));
    }
    dj_like(f, &QubitSubset::single(1)?, Algorithm::Deutsch)
}

/// Deutsch-Jozsa on an `n → 1` table, analysed on the first register.
pub fn run_deutsch_jozsa(f: &TruthTable) -> Result<RunResult> {
    run_deutsch_jozsa_on(f, &QubitSubset::range(1, f.n_in())?)
}

pub fn run_deutsch_jozsa_on(f: &TruthTable, subset: &QubitSubset) -> Result<RunResult> {
    if f.n_out() != 1 {
        return Err(Error::Arity(format!(
            "Deutsch-Jozsa needs one output bit, table has {}",
            f.n_out()
        )));
    }
    dj_like(f, subset, Algorithm::DeutschJozsa)
}

/// Period finding on an `n → n` table, analysed on the first register.
pub fn run_shor_period(f: &TruthTable) -> Result<RunResult> {
    run_shor_period_on(f, &QubitSubset::range(1, f.n_in())?)
}

pub fn run_shor_period_on(f: &TruthTable, subset: &QubitSubset) -> Result<RunResult> {
    let plan = GatePlan::shor(f)?;
    let n = f.n_in();
    subset.check_within(2 * n)?;
    let input = basis_state(2 * n, &"0".repeat(2 * n))?;
    let trace = run_plan(input, &plan, subset)?;
    let output = &trace.steps[3].state;
    let first = QubitSubset::range(1, n)?;
    let distribution = born_distribution(output, &first)?;
    Ok(RunResult {
        algorithm: Algorithm::Shor,
        chosen_outcome: select_intelligent_state(output, &first)?,
        trace: vec![trace],
        stop_iteration: 1,
        verdict: period_verdict(&distribution, n),
        scan: Vec::new(),
    })
}

/// Reads the period off an exact first-register distribution. A point mass
/// at zero means period 1.
fn period_verdict(p: &ProbabilityDistribution, n: usize) -> Verdict {
    let support = p.support(AMPLITUDE_LAW_TOL);
    let r = if support == [0] {
        1
    } else {
        match extract_period(&support, n) {
            Ok(r) => r,
            Err(_) => return Verdict::Indeterminate,
        }
    };
    let spacing = (1usize << n) / r;
    let peaked = support.len() == r
        && p.probabilities().iter().enumerate().all(|(x, &px)| {
            let expected = if x % spacing == 0 { 1.0 / r as f64 } else { 0.0 };
            (px - expected).abs() <= AMPLITUDE_LAW_TOL
        });
    if peaked {
        Verdict::Period(r)
    } else {
        Verdict::Aperiodic
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `r = 2^n / gcd(nonzero peaks ∪ {2^n})`.
pub fn extract_period(peaks: &[usize], n: usize) -> Result<usize> {
    if n == 0 || n >= usize::BITS as usize {
        return Err(Error::InvalidParameter(format!("register width {n} out of range")));
    }
    let size = 1usize << n;
    if let Some(&bad) = peaks.iter().find(|&&x| x >= size) {
        return Err(Error::InvalidParameter(format!(
            "outcome {bad} does not fit in {n} bits"
        )));
    }
    if peaks.iter().all(|&x| x == 0) {
        return Err(Error::Indeterminate(
            "no nonzero outcomes; take more samples".into(),
        ));
    }
    let g = peaks.iter().fold(size, |acc, &x| gcd(acc, x));
    Ok(size / g)
}

fn marked_indicator(n: usize, marked: &str) -> Result<TruthTable> {
    if marked.len() != n {
        return Err(Error::Arity(format!(
            "marked item {marked:?} has {} bits, n is {n}",
            marked.len()
        )));
    }
    let target = bits_to_index(marked)?;
    TruthTable::from_fn(n, 1, |x| usize::from(x == target))
}

/// The unique input an indicator table maps to 1.
pub fn marked_item(f: &TruthTable) -> Result<String> {
    if f.n_out() != 1 {
        return Err(Error::Arity("Grover oracle must have one output bit".into()));
    }
    let ones: Vec<usize> = (0..f.outputs().len()).filter(|&x| f.eval(x) == 1).collect();
    match ones.as_slice() {
        [x] => Ok(index_to_bits(*x, f.n_in())),
        _ => Err(Error::BadTruthTable(format!(
            "Grover oracle must mark exactly one item, found {}",
            ones.len()
        ))),
    }
}

/// All states of a Grover run up to `k` iterations: input, superposition,
/// then (oracle, diffusion) per iteration.
struct GroverStates {
    input: StateVector,
    superposed: StateVector,
    iterations: Vec<(StateVector, StateVector)>,
}

fn simulate_grover(n: usize, marked: &str, k: usize) -> Result<GroverStates> {
    let oracle = oracle_from_truth_table(&marked_indicator(n, marked)?)?;
    let diffuse = tensor_product(&diffusion(n)?, &identity_qubits(1))?;
    let target = bits_to_index(marked)?;
    let first = QubitSubset::range(1, n)?;
    let input = basis_state(n + 1, &format!("{}1", "0".repeat(n)))?;
    let superposed = input.evolve(&hadamard_power(n + 1)?)?;
    let mut iterations = Vec::with_capacity(k);
    let mut current = superposed.clone();
    for i in 1..=k {
        let after_oracle = current.evolve(&oracle)?;
        let after_diffusion = after_oracle.evolve(&diffuse)?;
        let p = born_distribution(&after_diffusion, &first)?.probabilities()[target];
        let law = grover_success_probability(n, i);
        if (p - law).abs() > AMPLITUDE_LAW_TOL {
            return Err(Error::Invariant(format!(
                "p(marked) = {p} after {i} iterations, sin² law gives {law}"
            )));
        }
        current = after_diffusion.clone();
        iterations.push((after_oracle, after_diffusion));
    }
    Ok(GroverStates {
        input,
        superposed,
        iterations,
    })
}

fn grover_trace(
    states: &GroverStates,
    k: usize,
    subset: &QubitSubset,
    granularity: Granularity,
) -> Result<Vec<StepTrace>> {
    let mut head = vec![
        step_record(StepLabel::Input, states.input.clone(), subset)?,
        step_record(StepLabel::Superposition, states.superposed.clone(), subset)?,
    ];
    if k == 0 {
        return Ok(vec![StepTrace {
            steps: head,
            iteration_index: 0,
        }]);
    }
    let mut trace = Vec::with_capacity(k);
    for (i, (after_oracle, after_diffusion)) in states.iterations[..k].iter().enumerate() {
        let mut steps = std::mem::take(&mut head);
        if granularity == Granularity::Substep {
            steps.push(step_record(StepLabel::Entanglement, after_oracle.clone(), subset)?);
        }
        steps.push(step_record(StepLabel::Interference, after_diffusion.clone(), subset)?);
        trace.push(StepTrace {
            steps,
            iteration_index: i + 1,
        });
    }
    Ok(trace)
}

fn final_state(states: &GroverStates, k: usize) -> &StateVector {
    if k == 0 {
        &states.superposed
    } else {
        &states.iterations[k - 1].1
    }
}

/// Grover search for `marked` with exactly `k` iterations.
pub fn run_grover(n: usize, marked: &str, k: usize) -> Result<RunResult> {
    let mut config = AlgorithmConfig::grover(n, marked);
    config.max_iterations = config.max_iterations.max(k);
    config.iterations = Some(k);
    run(&config)
}

fn grover_from_config(config: &AlgorithmConfig) -> Result<RunResult> {
    let n = config.n;
    let marked = match &config.oracle {
        Oracle::Marked(bits) => bits.clone(),
        Oracle::Table(f) => marked_item(f)?,
    };
    let subset = config.subset()?;
    let first = QubitSubset::range(1, n)?;
    let target = bits_to_index(&marked)?;
    let (states, stop, scan) = if config.scan {
        let states = simulate_grover(n, &marked, config.max_iterations)?;
        let mut scan = Vec::with_capacity(config.max_iterations + 1);
        for k in 0..=config.max_iterations {
            let p = born_distribution(final_state(&states, k), &first)?;
            scan.push(ScanPoint {
                k,
                shannon_bits: shannon_full(&p, LogBase::Bits),
                p_marked: p.probabilities()[target],
            });
        }
        let mut best = 0;
        for point in &scan[1..] {
            if point.shannon_bits < scan[best].shannon_bits - SCAN_TIE_TOL {
                best = point.k;
            }
        }
        (states, best, scan)
    } else {
        let k = config
            .iterations
            .unwrap_or_else(|| grover_optimal_iterations(n).min(config.max_iterations));
        (simulate_grover(n, &marked, k)?, k, Vec::new())
    };
    let trace = grover_trace(&states, stop, &subset, config.granularity)?;
    let outcome = select_intelligent_state(final_state(&states, stop), &first)?;
    Ok(RunResult {
        algorithm: Algorithm::Grover,
        trace,
        verdict: Verdict::Marked(outcome.clone()),
        chosen_outcome: outcome,
        stop_iteration: stop,
        scan,
    })
}

/// Scans `k = 0..=max_iterations` and stops where first-register Shannon
/// entropy is smallest (ties go to the smaller `k`).
pub fn termination_scan(config: &AlgorithmConfig) -> Result<RunResult> {
    if config.algorithm != Algorithm::Grover {
        return Err(Error::InvalidParameter(format!(
            "termination scan applies to grover, not {}",
            config.algorithm
        )));
    }
    let mut config = config.clone();
    config.scan = true;
    run(&config)
}

/// Oracle-call lower bound `((1−Pe)/(2π) + 1/(π log₂ N))·√N`.
pub fn grover_lower_bound(big_n: usize, p_error: f64) -> Result<f64> {
    if big_n < 2 {
        return Err(Error::InvalidParameter(format!("N must be at least 2, got {big_n}")));
    }
    if !(0.0..=1.0).contains(&p_error) {
        return Err(Error::InvalidParameter(format!(
            "error probability {p_error} outside [0, 1]"
        )));
    }
    let n = big_n as f64;
    Ok(((1.0 - p_error) / (2.0 * PI) + 1.0 / (PI * n.log2())) * n.sqrt())
}

/// Accessible information between the first-qubit outputs of Deutsch's
/// circuit for `f` and for `f ⊕ x`, with the first qubit prepared as
/// `w|+⟩⟨+| + (1−w)I/2` at the given purity `Tr ρ² = (1+w²)/2`.
pub fn holevo_deutsch_efficiency(f: &TruthTable, purity: f64) -> Result<f64> {
    if f.n_in() != 1 || f.n_out() != 1 {
        return Err(Error::Arity(format!(
            "Deutsch needs a 1→1 table, got {}→{}",
            f.n_in(),
            f.n_out()
        )));
    }
    if !(0.5 - 1e-12..=1.0 + 1e-12).contains(&purity) {
        return Err(Error::InvalidParameter(format!(
            "qubit purity {purity} outside [0.5, 1]"
        )));
    }
    let w = (2.0 * purity - 1.0).max(0.0).sqrt().min(1.0);
    let c = |x: f64| Complex64::new(x, 0.0);
    let first = ComplexMatrix::from_rows(vec![
        vec![c(0.5), c(w / 2.0)],
        vec![c(w / 2.0), c(0.5)],
    ])?;
    let ancilla = ComplexMatrix::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]])?;
    let input = DensityMatrix::new(tensor_product(&first, &ancilla)?)?;
    let interference = tensor_product(&hadamard_power(1)?, &identity_qubits(1))?;
    let partner = TruthTable::from_fn(1, 1, |x| f.eval(x) ^ x)?;
    let outputs = [f, &partner]
        .into_iter()
        .map(|g| {
            input
                .evolve(&oracle_from_truth_table(g)?)?
                .evolve(&interference)?
                .partial_trace(&QubitSubset::single(1)?)
        })
        .collect::<Result<Vec<_>>>()?;
    holevo_accessible(&outputs, &ProbabilityDistribution::uniform(2)?)
}

/// Runs whatever `config` describes.
pub fn run(config: &AlgorithmConfig) -> Result<RunResult> {
    config.validate()?;
    let subset = config.subset()?;
    let result = match (config.algorithm, &config.oracle) {
        (Algorithm::Grover, _) => grover_from_config(config)?,
        (Algorithm::Deutsch, Oracle::Table(f)) => dj_like(f, &subset, Algorithm::Deutsch)?,
        (Algorithm::DeutschJozsa, Oracle::Table(f)) => run_deutsch_jozsa_on(f, &subset)?,
        (Algorithm::Shor, Oracle::Table(f)) => run_shor_period_on(f, &subset)?,
        (algorithm, Oracle::Marked(_)) => {
            return Err(Error::InvalidParameter(format!(
                "{algorithm} needs a truth-table oracle"
            )))
        }
    };
    debug_assert!(config.algorithm != Algorithm::Grover || result.stop_iteration <= config.max_iterations);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::coherence_entropy;

    fn table(n_in: usize, n_out: usize, outputs: &[usize]) -> TruthTable {
        TruthTable::new(n_in, n_out, outputs.to_vec()).unwrap()
    }

    fn shor_f1() -> TruthTable {
        table(3, 3, &[1, 7, 1, 7, 1, 7, 1, 7])
    }

    fn shor_f2() -> TruthTable {
        table(3, 3, &[0, 2, 4, 6, 0, 2, 4, 6])
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn deutsch_cases() {
        let zero = run_deutsch(&table(1, 1, &[0, 0])).unwrap();
        assert_eq!((zero.verdict.clone(), zero.chosen_outcome.as_str()), (Verdict::Constant, "0"));
        let ident = run_deutsch(&table(1, 1, &[0, 1])).unwrap();
        assert_eq!((ident.verdict.clone(), ident.chosen_outcome.as_str()), (Verdict::Balanced, "1"));
        let one = run_deutsch(&table(1, 1, &[1, 1])).unwrap();
        assert_eq!(one.verdict, Verdict::Constant);
        let out = one.final_step().unwrap();
        assert!(close(out.distribution.probabilities()[0], 1.0));
        assert_eq!(one.steps().count(), 4);
        assert!(run_deutsch(&table(2, 1, &[0, 0, 0, 0])).is_err());
    }

    #[test]
    fn dj_case_one_trace() {
        let r = run_deutsch_jozsa(&table(3, 1, &[0; 8])).unwrap();
        let expected_shannon = [0.0, 1.0, 1.0, 0.0];
        for ((_, step), &sh) in r.steps().zip(&expected_shannon) {
            for q in &step.per_qubit[..3] {
                assert!(close(q.shannon_bits, sh) && close(q.von_neumann_bits, 0.0));
            }
        }
        assert_eq!(r.verdict, Verdict::Constant);
        assert_eq!(r.chosen_outcome, "000");
    }

    #[test]
    fn dj_case_two_trace() {
        let r = run_deutsch_jozsa(&table(3, 1, &[1, 0, 1, 1, 0, 0, 0, 1])).unwrap();
        let expected = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (1.0, 1.0)];
        for ((_, step), &(sh, vn)) in r.steps().zip(&expected) {
            for q in &step.per_qubit[..3] {
                assert!(close(q.shannon_bits, sh), "{:?} {}", step.label, q.shannon_bits);
                assert!(close(q.von_neumann_bits, vn));
            }
        }
        let out = &r.final_step().unwrap().distribution;
        assert_eq!(out.support(1e-12), vec![2, 3, 4, 5]);
        for x in [2, 3, 4, 5] {
            assert!(close(out.probabilities()[x], 0.25));
        }
        assert_eq!(r.verdict, Verdict::Balanced);
    }

    #[test]
    fn dj_linear_functions_give_point_mass() {
        for k in 0..8usize {
            let f = TruthTable::from_fn(3, 1, |x| ((x & k).count_ones() % 2) as usize).unwrap();
            let r = run_deutsch_jozsa(&f).unwrap();
            let p = &r.final_step().unwrap().distribution;
            assert!(close(p.probabilities()[k], 1.0));
            assert!(close(r.final_step().unwrap().subset.shannon_bits, 0.0));
            assert_eq!(r.chosen_outcome, index_to_bits(k, 3));
        }
    }

    #[test]
    fn dj_entropy_conclusions_on_all_tables() {
        for bits in 0..256usize {
            let f = TruthTable::from_fn(3, 1, |x| (bits >> x) & 1).unwrap();
            let r = run_deutsch_jozsa(&f).unwrap();
            let steps: Vec<&StepRecord> = r.steps().map(|(_, s)| s).collect();
            for j in 0..3 {
                let sup = &steps[1].per_qubit[j];
                let ent = &steps[2].per_qubit[j];
                let out = &steps[3].per_qubit[j];
                assert!(close(sup.shannon_bits, 1.0) && close(sup.von_neumann_bits, 0.0));
                assert!(close(ent.shannon_bits, 1.0));
                assert!(close(out.von_neumann_bits, ent.von_neumann_bits));
                let alpha = crate::measures::alpha_coefficient(&f, j + 1).unwrap();
                assert!(close(ent.von_neumann_bits, coherence_entropy(alpha)));
            }
        }
    }

    #[test]
    fn shor_tables() {
        let r = run_shor_period(&shor_f1()).unwrap();
        let expected = [(0.0, 0.0, 1.0), (3.0, 0.0, 0.0), (3.0, 1.0, 1.0 / 3.0), (1.0, 1.0, 1.0)];
        for ((_, step), &(sh, vn, j)) in r.steps().zip(&expected) {
            let s = &step.subset;
            assert!(close(s.shannon_bits, sh) && close(s.von_neumann_bits, vn) && close(s.intelligence, j));
        }
        assert_eq!(r.verdict, Verdict::Period(2));
        assert_eq!(r.final_step().unwrap().distribution.support(1e-12), vec![0, 4]);

        let r = run_shor_period(&shor_f2()).unwrap();
        let j: Vec<f64> = r.steps().map(|(_, s)| s.subset.intelligence).collect();
        for (got, want) in j.iter().zip([1.0, 0.0, 2.0 / 3.0, 1.0]) {
            assert!(close(*got, want));
        }
        assert!(close(r.trace[0].steps[2].subset.von_neumann_bits, 2.0));
        assert_eq!(r.verdict, Verdict::Period(4));
    }

    #[test]
    fn shor_every_dividing_period() {
        for n in 1..=4usize {
            let mut r = 1;
            while r <= 1 << n {
                let f = TruthTable::from_fn(n, n, |x| x % r).unwrap();
                let result = run_shor_period(&f).unwrap();
                let steps = &result.trace[0].steps;
                assert!(close(steps[1].subset.shannon_bits, n as f64));
                assert!(close(steps[2].subset.von_neumann_bits, (r as f64).log2()));
                assert!(close(steps[3].subset.shannon_bits, (r as f64).log2()));
                assert!(close(steps[3].subset.intelligence, 1.0));
                assert_eq!(result.verdict, Verdict::Period(r));
                r *= 2;
            }
        }
    }

    #[test]
    fn shor_reports_unpeaked_distribution() {
        let f = TruthTable::from_fn(3, 3, |x| x % 3).unwrap();
        assert_eq!(run_shor_period(&f).unwrap().verdict, Verdict::Aperiodic);
    }

    #[test]
    fn period_extraction() {
        assert_eq!(extract_period(&[0, 4], 3).unwrap(), 2);
        assert_eq!(extract_period(&[2, 4, 6], 3).unwrap(), 4);
        assert!(matches!(extract_period(&[0], 3), Err(Error::Indeterminate(_))));
        assert!(extract_period(&[8], 3).is_err());
    }

    #[test]
    fn grover_iterations() {
        let one = run_grover(3, "001", 1).unwrap();
        let p = &one.final_step().unwrap().distribution;
        assert!(close(p.probabilities()[1], 25.0 / 32.0));
        let sh = shannon_full(p, LogBase::Bits);
        assert!(close(sh, 5.0 - 25.0 / 16.0 * 5f64.log2()));
        let two = run_grover(3, "001", 2).unwrap();
        let p = &two.final_step().unwrap().distribution;
        assert!(close(p.probabilities()[1], 121.0 / 128.0));
        assert!(close(shannon_full(p, LogBase::Bits), 7.0 - 121.0 / 64.0 * 11f64.log2()));
        assert_eq!(two.verdict, Verdict::Marked("001".into()));
        let zero = run_grover(3, "001", 0).unwrap();
        for &px in zero.final_step().unwrap().distribution.probabilities() {
            assert!(close(px, 0.125));
        }
        assert!(run_grover(3, "01", 1).is_err());
    }

    #[test]
    fn grover_trace_layout() {
        let r = run_grover(3, "101", 3).unwrap();
        let labels: Vec<(usize, StepLabel)> = r.steps().map(|(i, s)| (i, s.label)).collect();
        use StepLabel::*;
        assert_eq!(
            labels,
            vec![
                (1, Input),
                (1, Superposition),
                (1, Entanglement),
                (1, Interference),
                (2, Entanglement),
                (2, Interference),
                (3, Entanglement),
                (3, Interference)
            ]
        );
        let mut config = AlgorithmConfig::grover(3, "101");
        config.iterations = Some(3);
        config.granularity = Granularity::Iter;
        let coarse = run(&config).unwrap();
        assert_eq!(coarse.steps().count(), 5);
        assert_eq!(run_grover(3, "101", 0).unwrap().steps().count(), 2);
    }

    #[test]
    fn grover_default_iterations() {
        assert_eq!(grover_optimal_iterations(3), 2);
        assert_eq!(grover_optimal_iterations(2), 1);
        let r = run(&AlgorithmConfig::grover(4, "1111")).unwrap();
        assert_eq!(r.stop_iteration, 3);
        assert_eq!(r.chosen_outcome, "1111");
    }

    #[test]
    fn grover_accepts_indicator_table() {
        let f = TruthTable::from_fn(3, 1, |x| usize::from(x == 6)).unwrap();
        let mut config = AlgorithmConfig::new(Algorithm::Grover, 3, Oracle::Table(f));
        config.scan = true;
        let r = run(&config).unwrap();
        // Default horizon is 6, which reaches the second peak at k = 6.
        assert_eq!((r.stop_iteration, r.chosen_outcome.as_str()), (6, "110"));
        let two = TruthTable::from_fn(3, 1, |x| usize::from(x < 2)).unwrap();
        assert!(run(&AlgorithmConfig::new(Algorithm::Grover, 3, Oracle::Table(two))).is_err());
    }

    #[test]
    fn scan_cases() {
        let mut config = AlgorithmConfig::grover(3, "001");
        config.max_iterations = 8;
        let r = termination_scan(&config).unwrap();
        // sin²(13θ) ≈ 0.99989 beats sin²(5θ) ≈ 0.9453 on this horizon.
        assert_eq!((r.stop_iteration, r.chosen_outcome.as_str()), (6, "001"));
        assert_eq!(r.scan.len(), 9);
        assert!((r.scan[3].p_marked - 0.330).abs() < 1e-3);
        assert!(r.scan[2].p_marked > r.scan[1].p_marked && r.scan[2].p_marked > r.scan[3].p_marked);
        config.max_iterations = 5;
        let r = termination_scan(&config).unwrap();
        assert_eq!((r.stop_iteration, r.chosen_outcome.as_str()), (2, "001"));
        assert_eq!(r.trace.len(), 2);

        let mut config = AlgorithmConfig::grover(2, "11");
        config.max_iterations = 4;
        let r = termination_scan(&config).unwrap();
        assert_eq!(r.stop_iteration, 1);
        assert!(close(r.scan[1].p_marked, 1.0) && close(r.scan[1].shannon_bits, 0.0));

        // Every k gives p = ½ on one qubit, so the tie rule picks k = 0.
        let r = termination_scan(&AlgorithmConfig::grover(1, "1")).unwrap();
        assert_eq!(r.stop_iteration, 0);
        assert!(r.scan.iter().all(|s| close(s.p_marked, 0.5)));
    }

    #[test]
    fn scan_matches_argmax_of_law() {
        for n in 2..=6 {
            let config = AlgorithmConfig::grover(n, &"1".repeat(n));
            let r = termination_scan(&config).unwrap();
            let mut best = 0;
            for k in 1..=config.max_iterations {
                if grover_success_probability(n, k) > grover_success_probability(n, best) + 1e-12 {
                    best = k;
                }
            }
            assert_eq!(r.stop_iteration, best, "n={n}");
        }
    }

    #[test]
    fn scan_rejects_other_algorithms() {
        let config = AlgorithmConfig::new(Algorithm::Shor, 3, Oracle::Table(shor_f1()));
        assert!(termination_scan(&config).is_err());
    }

    #[test]
    fn lower_bound_cases() {
        let b = grover_lower_bound(8, 0.0).unwrap();
        let expected = (1.0 / (2.0 * PI) + 1.0 / (3.0 * PI)) * 8f64.sqrt();
        assert!((b - expected).abs() < 1e-12 && (b - 0.7503).abs() < 1e-4);
        let b1 = grover_lower_bound(16, 1.0).unwrap();
        assert!((b1 - 4.0 / (4.0 * PI)).abs() < 1e-12);
        assert!(grover_lower_bound(1, 0.0).is_err());
        assert!(grover_lower_bound(8, 1.5).is_err());
        for n in 2..=4 {
            let stop = termination_scan(&AlgorithmConfig::grover(n, &"0".repeat(n)))
                .unwrap()
                .stop_iteration;
            assert!(grover_lower_bound(1 << n, 0.0).unwrap() <= (stop + 1) as f64);
        }
    }

    #[test]
    fn holevo_efficiency() {
        for f in [table(1, 1, &[0, 0]), table(1, 1, &[0, 1]), table(1, 1, &[1, 0])] {
            assert!((holevo_deutsch_efficiency(&f, 1.0).unwrap() - 1.0).abs() < 1e-12);
            assert!(holevo_deutsch_efficiency(&f, 0.5).unwrap().abs() < 1e-12);
        }
        let f = table(1, 1, &[0, 0]);
        let mut last = -1.0;
        for step in 0..=50 {
            let purity = 0.5 + step as f64 / 100.0;
            let chi = holevo_deutsch_efficiency(&f, purity).unwrap();
            // Output pair is {½(I ± wZ)}, so χ = 1 − h₂((1+w)/2).
            let w = (2.0 * purity - 1.0).sqrt();
            assert!((chi - (1.0 - crate::measures::binary_entropy((1.0 + w) / 2.0))).abs() < 1e-9);
            assert!(chi >= last - 1e-12);
            last = chi;
        }
        assert!(holevo_deutsch_efficiency(&f, 0.4).is_err());
    }

    #[test]
    fn config_validation() {
        let dj = |n, f| AlgorithmConfig::new(Algorithm::DeutschJozsa, n, Oracle::Table(f));
        assert!(matches!(run(&dj(2, table(3, 1, &[0; 8]))), Err(Error::Arity(_))));
        assert!(run(&AlgorithmConfig::new(Algorithm::Shor, 3, Oracle::Marked("001".into()))).is_err());
        let mut g = AlgorithmConfig::grover(3, "001");
        g.iterations = Some(99);
        assert!(run(&g).is_err());
        g.iterations = None;
        g.max_iterations = 0;
        assert!(run(&g).is_err());
        assert!(matches!(run(&AlgorithmConfig::grover(12, &"0".repeat(12))), Err(Error::TooLarge { .. })));
        let mut subset = dj(3, table(3, 1, &[0; 8]));
        subset.analysis_subset = Some(QubitSubset::range(1, 4).unwrap());
        assert_eq!(run(&subset).unwrap().final_step().unwrap().subset.subset.len(), 4);
        subset.analysis_subset = Some(QubitSubset::range(1, 5).unwrap());
        assert!(run(&subset).is_err());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in [Algorithm::Deutsch, Algorithm::DeutschJozsa, Algorithm::Shor, Algorithm::Grover] {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("simon".parse::<Algorithm>().is_err());
    }
}
