//! C ABI for qaflow.
//!
//! Every fallible function returns a [`QaflowStatus`]; on failure a message
//! is available from [`qaflow_last_error_message`] on the same thread.
//! Runs are opaque [`QaflowRun`] handles released with [`qaflow_run_free`].
//! Strings returned from a handle live as long as the handle.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use qaflow::gates::TruthTable;
use qaflow::linalg::ComplexMatrix;
use qaflow::measures::{self, LogBase};
use qaflow::report::TraceDocument;
use qaflow::runner::{self, Algorithm, AlgorithmConfig, Oracle, RunResult};
use qaflow::state::{index_to_bits, DensityMatrix, ProbabilityDistribution};
use qaflow::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QaflowStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvariantViolation = 3,
    Panic = 4,
}

/// A finished run and its serialized trace.
pub struct QaflowRun {
    result: RunResult,
    doc: TraceDocument,
    outcome: CString,
    verdict: CString,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

enum Failure {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QaflowStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QaflowStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("{what} is null"));
            QaflowStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            match e {
                Error::Invariant(_) | Error::NoConvergence(_) => QaflowStatus::InvariantViolation,
                _ => QaflowStatus::InvalidArgument,
            }
        }
        Err(_) => {
            set_error("internal panic".into());
            QaflowStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &'static str) -> Result<*const T, Failure> {
    if p.is_null() {
        Err(Failure::Null(what))
    } else {
        Ok(p)
    }
}

/// Reads `len` values; `len == 0` accepts a null pointer.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    Ok(std::slice::from_raw_parts(non_null(p, what)?, len))
}

unsafe fn write<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

fn table_size(n: usize) -> Result<usize, Failure> {
    if n == 0 || n > qaflow::linalg::DEFAULT_MAX_QUBITS {
        return Err(Error::InvalidParameter(format!("n={n} out of range")).into());
    }
    Ok(1usize << n)
}

fn finish(config: AlgorithmConfig, out: *mut *mut QaflowRun) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    let result = runner::run(&config)?;
    let doc = TraceDocument::from_run(&config, &result);
    let cstr = |s: String| CString::new(s).map_err(|e| Error::Invariant(e.to_string()));
    let handle = QaflowRun {
        outcome: cstr(result.chosen_outcome.clone())?,
        verdict: cstr(result.verdict.to_string())?,
        json: cstr(doc.to_json()?)?,
        result,
        doc,
    };
    unsafe { out.write(Box::into_raw(Box::new(handle))) };
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qaflow_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qaflow_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Deutsch-Jozsa on the `2^n` single-bit outputs `f(0), …, f(2^n − 1)`.
///
/// # Safety
/// `outputs` must point to `2^n` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qaflow_run_deutsch_jozsa(
    outputs: *const u8,
    n: usize,
    out: *mut *mut QaflowRun,
) -> QaflowStatus {
    guard(|| {
        let values = slice(outputs, table_size(n)?, "outputs")?;
        let f = TruthTable::new(n, 1, values.iter().map(|&v| v as usize).collect())?;
        let algorithm = if n == 1 { Algorithm::Deutsch } else { Algorithm::DeutschJozsa };
        finish(AlgorithmConfig::new(algorithm, n, Oracle::Table(f)), out)
    })
}

/// Period finding on the `2^n` outputs of an `n → n` function.
///
/// # Safety
/// `outputs` must point to `2^n` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qaflow_run_shor(
    outputs: *const u32,
    n: usize,
    out: *mut *mut QaflowRun,
) -> QaflowStatus {
    guard(|| {
        let values = slice(outputs, table_size(n)?, "outputs")?;
        let f = TruthTable::new(n, n, values.iter().map(|&v| v as usize).collect())?;
        finish(AlgorithmConfig::new(Algorithm::Shor, n, Oracle::Table(f)), out)
    })
}

fn grover_config(n: usize, marked: u64) -> Result<AlgorithmConfig, Failure> {
    let size = table_size(n)?;
    if marked >= size as u64 {
        return Err(Error::InvalidParameter(format!("marked index {marked} needs more than {n} bits")).into());
    }
    Ok(AlgorithmConfig::grover(n, &index_to_bits(marked as usize, n)))
}

/// Grover search for item `marked` with exactly `iterations` iterations.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qaflow_run_grover(
    n: usize,
    marked: u64,
    iterations: usize,
    out: *mut *mut QaflowRun,
) -> QaflowStatus {
    guard(|| {
        let mut config = grover_config(n, marked)?;
        config.max_iterations = config.max_iterations.max(iterations);
        config.iterations = Some(iterations);
        finish(config, out)
    })
}

/// Minimum-entropy termination scan; `max_iterations == 0` uses the default horizon.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qaflow_scan_grover(
    n: usize,
    marked: u64,
    max_iterations: usize,
    out: *mut *mut QaflowRun,
) -> QaflowStatus {
    guard(|| {
        let mut config = grover_config(n, marked)?;
        if max_iterations > 0 {
            config.max_iterations = max_iterations;
        }
        config.scan = true;
        finish(config, out)
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `run` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qaflow_run_free(run: *mut QaflowRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

unsafe fn handle<'a>(run: *const QaflowRun) -> Result<&'a QaflowRun, Failure> {
    Ok(&*non_null(run, "run")?)
}

/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qaflow_run_stop_iteration(run: *const QaflowRun, out: *mut usize) -> QaflowStatus {
    guard(|| write(out, handle(run)?.result.stop_iteration, "out"))
}

/// Number of recorded steps across all iterations.
///
/// # Safety
/// `run` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qaflow_run_step_count(run: *const QaflowRun, out: *mut usize) -> QaflowStatus {
    guard(|| write(out, handle(run)?.doc.steps.len(), "out"))
}

/// Analysis-subset Shannon and von Neumann entropy (bits) and intelligence of step `index`.
///
/// # Safety
/// `run` must be a live handle; the three outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn qaflow_run_step_values(
    run: *const QaflowRun,
    index: usize,
    shannon: *mut f64,
    von_neumann: *mut f64,
    intelligence: *mut f64,
) -> QaflowStatus {
    guard(|| {
        let steps = &handle(run)?.doc.steps;
        let step = steps.get(index).ok_or_else(|| {
            Error::InvalidParameter(format!("step {index} out of range (have {})", steps.len()))
        })?;
        write(shannon, step.subset_shannon, "shannon")?;
        write(von_neumann, step.subset_von_neumann, "von_neumann")?;
        write(intelligence, step.intelligence, "intelligence")
    })
}

/// Chosen outcome bit string, or null for a null handle.
///
/// # Safety
/// `run` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qaflow_run_outcome(run: *const QaflowRun) -> *const c_char {
    run.as_ref().map_or(ptr::null(), |r| r.outcome.as_ptr())
}

/// Verdict text such as `balanced`, `period:2` or `marked:001`.
///
/// # Safety
/// `run` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qaflow_run_verdict(run: *const QaflowRun) -> *const c_char {
    run.as_ref().map_or(ptr::null(), |r| r.verdict.as_ptr())
}

/// The full trace document as JSON.
///
/// # Safety
/// `run` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn qaflow_run_trace_json(run: *const QaflowRun) -> *const c_char {
    run.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

unsafe fn distribution(p: *const f64, len: usize) -> Result<ProbabilityDistribution, Failure> {
    Ok(ProbabilityDistribution::new(slice(p, len, "p")?.to_vec())?)
}

/// Shannon entropy in bits.
///
/// # Safety
/// `p` must point to `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qaflow_shannon(p: *const f64, len: usize, out: *mut f64) -> QaflowStatus {
    guard(|| write(out, measures::shannon_full(&distribution(p, len)?, LogBase::Bits), "out"))
}

/// Renyi entropy of order `q` in nats.
///
/// # Safety
/// `p` must point to `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qaflow_renyi(p: *const f64, len: usize, q: f64, out: *mut f64) -> QaflowStatus {
    guard(|| write(out, measures::renyi(&distribution(p, len)?, q, LogBase::Nats)?, "out"))
}

/// Tsallis entropy of order `q`.
///
/// # Safety
/// `p` must point to `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qaflow_tsallis(p: *const f64, len: usize, q: f64, out: *mut f64) -> QaflowStatus {
    guard(|| write(out, measures::tsallis(&distribution(p, len)?, q)?, "out"))
}

/// Relative entropy D(p‖q) in nats; infinity when p is not supported by q.
///
/// # Safety
/// `p` and `q` must each point to `len` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qaflow_relative_entropy(
    p: *const f64,
    q: *const f64,
    len: usize,
    out: *mut f64,
) -> QaflowStatus {
    guard(|| {
        let d = measures::relative_entropy(&distribution(p, len)?, &distribution(q, len)?, LogBase::Nats)?;
        write(out, d, "out")
    })
}

/// Von Neumann entropy (bits) of a density matrix given row-major as
/// interleaved `re, im` pairs (`2·order²` values).
///
/// # Safety
/// `re_im` must point to `2·order²` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qaflow_von_neumann(re_im: *const f64, order: usize, out: *mut f64) -> QaflowStatus {
    guard(|| {
        if order == 0 || order > 1 << qaflow::linalg::DEFAULT_MAX_QUBITS {
            return Err(Error::InvalidParameter(format!("order {order} out of range")).into());
        }
        let raw = slice(re_im, 2 * order * order, "re_im")?;
        let data = raw.chunks_exact(2).map(|z| Complex64::new(z[0], z[1])).collect();
        let rho = DensityMatrix::new(ComplexMatrix::new(order, order, data)?)?;
        write(out, measures::von_neumann(&rho)?, "out")
    })
}

/// Oracle-call lower bound for unstructured search over `big_n` items.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qaflow_grover_lower_bound(big_n: usize, p_error: f64, out: *mut f64) -> QaflowStatus {
    guard(|| write(out, runner::grover_lower_bound(big_n, p_error)?, "out"))
}
