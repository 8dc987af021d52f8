//! Trace documents, oracle files, CSV series and text tables.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::TruthTable;
use crate::linalg::ComplexMatrix;
use crate::measures::{
    quantum_relative_entropy, relative_entropy, renyi, shannon_full, tsallis, von_neumann,
    LogBase, MeasureInput,
};
use crate::runner::{
    Algorithm, AlgorithmConfig, Granularity, Oracle, RunResult, ScanPoint, StepLabel, Verdict,
};
use crate::state::{DensityMatrix, ProbabilityDistribution};

pub const SCHEMA_VERSION: &str = "1";

/// Header of the plot series and of `--format csv`.
pub const CSV_HEADER: &str = "step,label,shannon,von_neumann,intelligence";

/// What was asked for, echoed into the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestEcho {
    pub algorithm: Algorithm,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<Vec<(String, String)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marked: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    pub max_iterations: usize,
    pub scan: bool,
    pub granularity: Granularity,
    pub subset: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepDoc {
    pub step: usize,
    pub iteration: usize,
    pub label: StepLabel,
    pub per_qubit_shannon: Vec<f64>,
    pub per_qubit_von_neumann: Vec<f64>,
    pub subset_shannon: f64,
    pub subset_von_neumann: f64,
    pub intelligence: f64,
    pub distribution: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub schema_version: String,
    pub request: RequestEcho,
    pub steps: Vec<StepDoc>,
    pub verdict: Verdict,
    pub stop_iteration: usize,
    pub chosen_outcome: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scan: Vec<ScanPoint>,
}

impl TraceDocument {
    pub fn from_run(config: &AlgorithmConfig, result: &RunResult) -> Self {
        let (oracle, marked) = match &config.oracle {
            Oracle::Table(f) => (Some(f.rows().collect()), None),
            Oracle::Marked(bits) => (None, Some(bits.clone())),
        };
        let subset = result
            .final_step()
            .map(|s| s.subset.subset.indices().to_vec())
            .unwrap_or_default();
        let steps = result
            .steps()
            .enumerate()
            .map(|(step, (iteration, record))| StepDoc {
                step,
                iteration,
                label: record.label,
                per_qubit_shannon: record.per_qubit.iter().map(|r| r.shannon_bits).collect(),
                per_qubit_von_neumann: record.per_qubit.iter().map(|r| r.von_neumann_bits).collect(),
                subset_shannon: record.subset.shannon_bits,
                subset_von_neumann: record.subset.von_neumann_bits,
                intelligence: record.subset.intelligence,
                distribution: (0..record.distribution.len())
                    .map(|i| (record.distribution.label(i), record.distribution.probabilities()[i]))
                    .collect(),
            })
            .collect();
        TraceDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            request: RequestEcho {
                algorithm: config.algorithm,
                n: config.n,
                oracle,
                marked,
                iterations: config.iterations,
                max_iterations: config.max_iterations,
                scan: config.scan,
                granularity: config.granularity,
                subset,
            },
            steps,
            verdict: result.verdict.clone(),
            stop_iteration: result.stop_iteration,
            chosen_outcome: result.chosen_outcome.clone(),
            scan: result.scan.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TraceDocument = serde_json::from_str(text)?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidParameter(format!(
                "unsupported schema_version {:?}",
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    /// Largest absolute difference over all numeric fields, or `None` when
    /// the documents differ structurally.
    pub fn max_numeric_diff(&self, other: &TraceDocument) -> Option<f64> {
        if self.request != other.request
            || self.verdict != other.verdict
            || self.stop_iteration != other.stop_iteration
            || self.chosen_outcome != other.chosen_outcome
            || self.steps.len() != other.steps.len()
            || self.scan.len() != other.scan.len()
        {
            return None;
        }
        let mut worst = 0.0f64;
        let mut push = |a: f64, b: f64| worst = worst.max((a - b).abs());
        for (a, b) in self.scan.iter().zip(&other.scan) {
            if a.k != b.k {
                return None;
            }
            push(a.shannon_bits, b.shannon_bits);
            push(a.p_marked, b.p_marked);
        }
        for (a, b) in self.steps.iter().zip(&other.steps) {
            if (a.step, a.iteration, a.label) != (b.step, b.iteration, b.label)
                || a.per_qubit_shannon.len() != b.per_qubit_shannon.len()
                || a.per_qubit_von_neumann.len() != b.per_qubit_von_neumann.len()
                || !a.distribution.keys().eq(b.distribution.keys())
            {
                return None;
            }
            push(a.subset_shannon, b.subset_shannon);
            push(a.subset_von_neumann, b.subset_von_neumann);
            push(a.intelligence, b.intelligence);
            for (x, y) in a.per_qubit_shannon.iter().zip(&b.per_qubit_shannon) {
                push(*x, *y);
            }
            for (x, y) in a.per_qubit_von_neumann.iter().zip(&b.per_qubit_von_neumann) {
                push(*x, *y);
            }
            for (x, y) in a.distribution.values().zip(b.distribution.values()) {
                push(*x, *y);
            }
        }
        Some(worst)
    }
}

fn is_bits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b == b'0' || b == b'1')
}

/// Parses `<input-bits> <output-bits>` lines; `#` starts a comment.
pub fn parse_oracle_str(text: &str) -> Result<TruthTable> {
    let mut rows: Vec<(String, String)> = Vec::new();
    let mut arity: Option<(usize, usize)> = None;
    let mut seen = HashSet::new();
    for (number, raw) in text.lines().enumerate() {
        let line = number + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let parse_err = |message: String| Error::Parse { line, message };
        let [input, output] = fields.as_slice() else {
            return Err(parse_err(format!(
                "expected `<input-bits> <output-bits>`, got {content:?}"
            )));
        };
        if !is_bits(input) || !is_bits(output) {
            return Err(parse_err(format!("not a bit string in {content:?}")));
        }
        match arity {
            None => arity = Some((input.len(), output.len())),
            Some((n_in, n_out)) if (input.len(), output.len()) != (n_in, n_out) => {
                return Err(parse_err(format!(
                    "row is {}→{} bits, earlier rows are {n_in}→{n_out}",
                    input.len(),
                    output.len()
                )));
            }
            Some(_) => {}
        }
        if !seen.insert(input.to_string()) {
            return Err(parse_err(format!("duplicate input {input}")));
        }
        rows.push((input.to_string(), output.to_string()));
    }
    if rows.is_empty() {
        return Err(Error::BadTruthTable("oracle file has no rows".into()));
    }
    TruthTable::from_rows(&rows)
}

pub fn parse_oracle_file(path: impl AsRef<Path>) -> Result<TruthTable> {
    parse_oracle_str(&std::fs::read_to_string(path)?)
}

/// One `input output` line per row, in input order.
pub fn format_truth_table(f: &TruthTable) -> String {
    f.rows().map(|(x, y)| format!("{x} {y}\n")).collect()
}

/// Twelve significant digits, shortest spelling, no negative zero.
pub fn format_number(x: f64) -> String {
    if x.abs() < 1e-12 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded}")
}

/// `step,label,shannon,von_neumann,intelligence`, one row per recorded step.
pub fn emit_plot_series(doc: &TraceDocument) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for s in &doc.steps {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.step,
            s.label,
            format_number(s.subset_shannon),
            format_number(s.subset_von_neumann),
            format_number(s.intelligence)
        );
    }
    out
}

fn fixed(x: f64) -> String {
    let text = format!("{x:.4}");
    if text == "-0.0000" {
        "0.0000".to_string()
    } else {
        text
    }
}

fn tuple(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|&v| fixed(v)).collect();
    format!("({})", parts.join(", "))
}

/// Step | per-qubit Shannon and its sum | per-qubit von Neumann | J_T.
pub fn render_table(doc: &TraceDocument) -> String {
    let iterative = doc.request.algorithm == Algorithm::Grover;
    let header = [
        "Step".to_string(),
        "Shannon".to_string(),
        "von Neumann".to_string(),
        "J_T".to_string(),
    ];
    let rows: Vec<[String; 4]> = doc
        .steps
        .iter()
        .map(|s| {
            let step = if iterative {
                format!("k={} {}", s.iteration, s.label)
            } else {
                s.label.to_string()
            };
            let sum: f64 = s.per_qubit_shannon.iter().sum();
            [
                step,
                format!("{} sum {}", tuple(&s.per_qubit_shannon), fixed(sum)),
                tuple(&s.per_qubit_von_neumann),
                fixed(s.intelligence),
            ]
        })
        .collect();
    let mut widths = header.clone().map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String; 4]| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect();
        format!("{}\n", padded.join(" | ").trim_end())
    };
    let mut out = line(&header);
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    out.push_str(&rule.join("-+-"));
    out.push('\n');
    for row in &rows {
        out.push_str(&line(row));
    }
    out
}

/// Complex matrix as separate real and imaginary row arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixInput {
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixInput {
    fn to_matrix(&self) -> Result<ComplexMatrix> {
        let rows = self
            .re
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let im_row = self.im.as_ref().map(|im| im.get(i));
                row.iter()
                    .enumerate()
                    .map(|(j, &re)| {
                        let im = match im_row {
                            None => 0.0,
                            Some(r) => *r.and_then(|r| r.get(j)).ok_or_else(|| {
                                Error::DimensionMismatch("im part has a different shape".into())
                            })?,
                        };
                        Ok(Complex64::new(re, im))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(im) = &self.im {
            if im.len() != self.re.len() || im.iter().zip(&self.re).any(|(a, b)| a.len() != b.len()) {
                return Err(Error::DimensionMismatch("im part has a different shape".into()));
            }
        }
        ComplexMatrix::from_rows(rows)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureSource {
    Distribution(Vec<f64>),
    Density(MatrixInput),
}

/// Contents of a `measures` input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuresRequest {
    #[serde(flatten)]
    pub source: MeasureSource,
    #[serde(default)]
    pub reference: Option<MeasureSource>,
    /// Order for Renyi and Tsallis; defaults to 2.
    #[serde(default)]
    pub q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuresReport {
    pub kind: String,
    pub shannon_bits: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub von_neumann_bits: Option<f64>,
    pub q: f64,
    pub renyi_nats: f64,
    pub tsallis: f64,
    /// Serialized as `null` when infinite.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_entropy_nats: Option<Option<f64>>,
}

enum Loaded {
    Classical(ProbabilityDistribution),
    Quantum(DensityMatrix),
}

fn load(source: &MeasureSource) -> Result<Loaded> {
    match source {
        MeasureSource::Distribution(p) => Ok(Loaded::Classical(ProbabilityDistribution::new(p.clone())?)),
        MeasureSource::Density(m) => Ok(Loaded::Quantum(DensityMatrix::new(m.to_matrix()?)?)),
    }
}

pub fn compute_measures(request: &MeasuresRequest) -> Result<MeasuresReport> {
    let q = request.q.unwrap_or(2.0);
    let subject = load(&request.source)?;
    let input = match &subject {
        Loaded::Classical(p) => MeasureInput::Distribution(p),
        Loaded::Quantum(rho) => MeasureInput::Density(rho),
    };
    let (kind, shannon_bits, von_neumann_bits) = match &subject {
        Loaded::Classical(p) => ("distribution", shannon_full(p, LogBase::Bits), None),
        Loaded::Quantum(rho) => {
            let diagonal = ProbabilityDistribution::new(rho.diagonal())?;
            ("density", shannon_full(&diagonal, LogBase::Bits), Some(von_neumann(rho)?))
        }
    };
    let relative = match &request.reference {
        None => None,
        Some(reference) => {
            let d = match (&subject, load(reference)?) {
                (Loaded::Classical(p), Loaded::Classical(r)) => relative_entropy(p, &r, LogBase::Nats)?,
                (Loaded::Quantum(rho), Loaded::Quantum(sigma)) => {
                    quantum_relative_entropy(rho, &sigma, LogBase::Nats)?
                }
                _ => {
                    return Err(Error::InvalidParameter(
                        "reference must be the same kind as the input".into(),
                    ))
                }
            };
            Some(d.is_finite().then_some(d))
        }
    };
    Ok(MeasuresReport {
        kind: kind.to_string(),
        shannon_bits,
        von_neumann_bits,
        q,
        renyi_nats: renyi(input, q, LogBase::Nats)?,
        tsallis: tsallis(input, q)?,
        relative_entropy_nats: relative,
    })
}
