//! C ABI over `qgrand_core`.
//!
//! Objects are opaque heap handles released with the matching `*_free`.
//! Every fallible call returns a [`QgStatus`]; on failure the message is
//! available from [`qg_last_error`] on the same thread until the next call.
//! Panics are caught at the boundary and reported as `QG_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use qgrand_core::code::{build_qrlc, Connectivity, QuantumCode};
use qgrand_core::decoder::{
    measurement_cost, syndrome_of, DecodeOutcome, Syndrome, SyndromeTable, TruncationConvention,
};
use qgrand_core::experiments::evaluate_code;
use qgrand_core::noise::{bernoulli_model, NoiseModel};
use qgrand_core::pauli::PauliString;
use qgrand_core::Error;

/// Length of `QgEvalSummary.f_by_weight`.
pub const QG_MAX_REPORTED_WEIGHT: usize = 8;

/// Limit value meaning "no limit".
pub const QG_UNLIMITED: u64 = u64::MAX;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QgStatus {
    Ok = 0,
    /// Null pointer, bad UTF-8 or undersized buffer.
    InvalidArgument = 1,
    /// Parameters rejected by the library.
    Validation = 2,
    Io = 3,
    Internal = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QgDecodeKind {
    NoError = 0,
    Corrected = 1,
    Abandoned = 2,
}

pub struct QgCode(QuantumCode);
pub struct QgNoise(NoiseModel);
pub struct QgTable(SyndromeTable);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QgEvalSummary {
    pub success_prob: f64,
    pub bler: f64,
    pub conditional_bler: f64,
    pub f_min_bound: f64,
    pub unique_syndromes: u64,
    pub collisions: u64,
    pub degenerate_count: u64,
    /// `f_by_weight[t]` for `t = 0..QG_MAX_REPORTED_WEIGHT`; NaN when no
    /// weight-`t` pattern is listed. Entry 0 is always NaN.
    pub f_by_weight: [f64; QG_MAX_REPORTED_WEIGHT],
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct QgMeasurementCost {
    pub c_s_half: f64,
    pub c_s_p0: f64,
    pub iterations: f64,
    pub total: f64,
    pub bound: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

struct Failure(QgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.exit_code() {
            3 => QgStatus::Io,
            4 => QgStatus::Internal,
            _ => QgStatus::Validation,
        };
        Failure(status, e.to_string())
    }
}

fn bad_arg(msg: &str) -> Failure {
    Failure(QgStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QgStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QgStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside qgrand");
            QgStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| bad_arg(&format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| bad_arg(&format!("{what} is null")))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(bad_arg(&format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| bad_arg(&format!("{what} is not UTF-8")))
}

fn limit(v: u64) -> Option<u64> {
    (v != QG_UNLIMITED).then_some(v)
}

/// Message for the last failed call on this thread; empty after success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn qg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds an `(n, k)` code from `num_gates` random two-qubit Cliffords.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qg_code_build(n: usize, k: usize, num_gates: usize, seed: u64, out: *mut *mut QgCode) -> QgStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let code = build_qrlc(n, k, num_gates, Connectivity::AllToAll, seed)?;
        *out = Box::into_raw(Box::new(QgCode(code)));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qg_code_load(path: *const c_char, out: *mut *mut QgCode) -> QgStatus {
    guard(|| {
        let path = PathBuf::from(c_str(path, "path")?);
        let out = out_ptr(out, "out")?;
        *out = Box::into_raw(Box::new(QgCode(QuantumCode::load(path)?)));
        Ok(())
    })
}

/// # Safety
/// `code` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn qg_code_save(code: *const QgCode, path: *const c_char) -> QgStatus {
    guard(|| {
        let code = deref(code, "code")?;
        code.0.save(c_str(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `code` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qg_code_free(code: *mut QgCode) {
    if !code.is_null() {
        drop(Box::from_raw(code));
    }
}

/// Physical qubits, or 0 for a null handle.
///
/// # Safety
/// `code` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn qg_code_n(code: *const QgCode) -> usize {
    code.as_ref().map_or(0, |c| c.0.n())
}

/// # Safety
/// `code` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn qg_code_k(code: *const QgCode) -> usize {
    code.as_ref().map_or(0, |c| c.0.k())
}

/// # Safety
/// `code` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn qg_code_num_gates(code: *const QgCode) -> usize {
    code.as_ref().map_or(0, |c| c.0.gates().len())
}

/// # Safety
/// `code` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn qg_code_seed(code: *const QgCode) -> u64 {
    code.as_ref().map_or(0, |c| c.0.seed())
}

/// Writes stabilizer `index` as a signed string such as `-XZIY` plus a NUL.
/// `*written` receives the length without the NUL; when `len` is too
/// small nothing is copied, `*written` still holds the required length
/// and `QG_STATUS_INVALID_ARGUMENT` is returned.
///
/// # Safety
/// `buf` must point to `len` writable bytes; `written` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_code_stabilizer(
    code: *const QgCode,
    index: usize,
    buf: *mut c_char,
    len: usize,
    written: *mut usize,
) -> QgStatus {
    guard(|| {
        let code = deref(code, "code")?;
        let written = out_ptr(written, "written")?;
        let stab = code
            .0
            .stabilizers()
            .get(index)
            .ok_or_else(|| Failure(QgStatus::Validation, format!("stabilizer index {index} out of range")))?;
        let text = stab.to_signed_string();
        *written = text.len();
        if buf.is_null() || len < text.len() + 1 {
            return Err(bad_arg("buffer too small"));
        }
        std::ptr::copy_nonoverlapping(text.as_ptr(), buf.cast::<u8>(), text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}

/// Syndrome of a Pauli string (e.g. `"XIZY"`), one byte 0/1 per stabilizer.
///
/// # Safety
/// `pauli` must be NUL-terminated; `bits` must point to `len ≥ n − k` bytes.
#[no_mangle]
pub unsafe extern "C" fn qg_code_syndrome(code: *const QgCode, pauli: *const c_char, bits: *mut u8, len: usize) -> QgStatus {
    guard(|| {
        let code = deref(code, "code")?;
        let e: PauliString = c_str(pauli, "pauli")?.parse()?;
        let s = code.0.s();
        if bits.is_null() || len < s {
            return Err(bad_arg("syndrome buffer too small"));
        }
        let syn = syndrome_of(&code.0, &e)?;
        for i in 0..s {
            *bits.add(i) = syn.bit(i) as u8;
        }
        Ok(())
    })
}

/// Depolarizing noise over `n` qubits listing every pattern of weight ≤ `t_max`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qg_noise_bernoulli(n: usize, p: f64, t_max: usize, out: *mut *mut QgNoise) -> QgStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = Box::into_raw(Box::new(QgNoise(bernoulli_model(n, p, t_max)?)));
        Ok(())
    })
}

/// # Safety
/// `noise` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qg_noise_free(noise: *mut QgNoise) {
    if !noise.is_null() {
        drop(Box::from_raw(noise));
    }
}

/// Listed patterns including the identity, or 0 for a null handle.
///
/// # Safety
/// `noise` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn qg_noise_len(noise: *const QgNoise) -> u64 {
    noise.as_ref().map_or(0, |m| m.0.len())
}

/// Probability mass outside the listed patterns; NaN for a null handle.
///
/// # Safety
/// `noise` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn qg_noise_residual(noise: *const QgNoise) -> f64 {
    noise.as_ref().map_or(f64::NAN, |m| m.0.residual())
}

/// Shannon entropy in bits of the listed probabilities; NaN for a null handle.
///
/// # Safety
/// `noise` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn qg_noise_entropy(noise: *const QgNoise) -> f64 {
    noise.as_ref().map_or(f64::NAN, |m| m.0.entropy_bits())
}

/// Semi-analytic evaluation of `code` under `noise`.
///
/// # Safety
/// Handles must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_evaluate(code: *const QgCode, noise: *const QgNoise, out: *mut QgEvalSummary) -> QgStatus {
    guard(|| {
        let code = deref(code, "code")?;
        let noise = deref(noise, "noise")?;
        let out = out_ptr(out, "out")?;
        let r = evaluate_code(&code.0, &noise.0)?;
        let mut f = [f64::NAN; QG_MAX_REPORTED_WEIGHT];
        for (&t, &v) in &r.f_by_weight {
            if t < QG_MAX_REPORTED_WEIGHT {
                f[t] = v;
            }
        }
        *out = QgEvalSummary {
            success_prob: r.success_prob,
            bler: r.bler,
            conditional_bler: r.conditional_bler,
            f_min_bound: r.f_min_bound,
            unique_syndromes: r.unique_syndromes,
            collisions: r.collisions,
            degenerate_count: r.degenerate_count,
            f_by_weight: f,
        };
        Ok(())
    })
}

/// Syndrome table storing the first `precompute_limit + 1` patterns
/// (`QG_UNLIMITED` stores all).
///
/// # Safety
/// Handles must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_table_build(
    code: *const QgCode,
    noise: *const QgNoise,
    precompute_limit: u64,
    out: *mut *mut QgTable,
) -> QgStatus {
    guard(|| {
        let code = deref(code, "code")?;
        let noise = deref(noise, "noise")?;
        let out = out_ptr(out, "out")?;
        let table = SyndromeTable::build(&code.0, &noise.0, limit(precompute_limit))?;
        *out = Box::into_raw(Box::new(QgTable(table)));
        Ok(())
    })
}

/// # Safety
/// `table` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qg_table_free(table: *mut QgTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of syndromes with a leader; 0 for a null handle.
///
/// # Safety
/// `table` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn qg_table_occupied(table: *const QgTable) -> u64 {
    table.as_ref().map_or(0, |t| t.0.occupied())
}

/// Decodes a syndrome given as `len` bytes 0/1. On `QG_DECODE_KIND_CORRECTED`
/// `*index` is the leader's position in the noise order; otherwise 0.
/// `abandon_after = QG_UNLIMITED` never abandons.
///
/// # Safety
/// `bits` must point to `len` readable bytes; `kind` and `index` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_table_decode(
    table: *const QgTable,
    bits: *const u8,
    len: usize,
    abandon_after: u64,
    kind: *mut QgDecodeKind,
    index: *mut u64,
) -> QgStatus {
    guard(|| {
        let table = deref(table, "table")?;
        let kind = out_ptr(kind, "kind")?;
        let index = out_ptr(index, "index")?;
        if len != table.0.s() || (bits.is_null() && len > 0) {
            return Err(bad_arg("syndrome length must equal n − k"));
        }
        let raw: Vec<bool> = (0..len).map(|i| *bits.add(i) != 0).collect();
        let syndrome = if len == 0 { Syndrome::zero(0) } else { Syndrome::from_bits(&raw) };
        let (k, i) = match table.0.decode(&syndrome, limit(abandon_after)) {
            DecodeOutcome::NoError => (QgDecodeKind::NoError, 0),
            DecodeOutcome::Corrected { index, .. } => (QgDecodeKind::Corrected, index),
            DecodeOutcome::Abandoned => (QgDecodeKind::Abandoned, 0),
        };
        *kind = k;
        *index = i;
        Ok(())
    })
}

/// Expected membership-test cost with `s` stabilizers under `noise`.
///
/// # Safety
/// `noise` must come from this library; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn qg_measurement_cost(s: usize, noise: *const QgNoise, out: *mut QgMeasurementCost) -> QgStatus {
    guard(|| {
        let noise = deref(noise, "noise")?;
        let out = out_ptr(out, "out")?;
        let c = measurement_cost(s, &noise.0, TruncationConvention::Printed)?;
        *out = QgMeasurementCost {
            c_s_half: c.c_s_half,
            c_s_p0: c.c_s_p0,
            iterations: c.iterations_i,
            total: c.total_c,
            bound: c.bound,
        };
        Ok(())
    })
}
