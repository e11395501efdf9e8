//! C ABI over the classical-quantum coding library.
//!
//! Channels are opaque handles created from a spec file or a JSON string and
//! released with [`cqlab_channel_free`]. Every fallible call returns a
//! [`CqlabStatus`]; the message behind the most recent failure on the calling
//! thread is available through [`cqlab_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use cqlab::channel::{load_channel, parse_channel, CqChannel, InputDistribution};
use cqlab::hyptest::delta_n;
use cqlab::info::{capacity, mutual_information};
use cqlab::packing::build_block_code;
use cqlab::{Error, Limits};

/// Status codes mirroring the CLI exit-code convention.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqlabStatus {
    /// Success.
    Ok = 0,
    /// Numerical or verification failure.
    Failure = 1,
    /// Invalid input (file, JSON, arguments).
    InputError = 2,
    /// Resource limit exceeded.
    LimitExceeded = 3,
    /// A required pointer argument was null.
    NullPointer = 4,
}

/// Opaque channel handle: the channel plus the spec file's optional input
/// distribution.
pub struct CqlabChannel {
    channel: CqChannel,
    file_p: Option<InputDistribution>,
}

/// Code-construction report returned by [`cqlab_build_code`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CqlabCodeReport {
    /// Number of codewords.
    pub m: u64,
    /// Rate ln(M)/n in nats per letter.
    pub rate: f64,
    /// Average decoding error probability.
    pub pe: f64,
    /// Premise error delta_n(a).
    pub delta: f64,
    /// 1 when the rate bound held numerically.
    pub rate_bound_ok: i32,
    /// 1 when the error bound held numerically.
    pub error_bound_ok: i32,
    /// 1 when the candidate set was empty and the guarantee is vacuous.
    pub vacuous: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> CqlabStatus {
    match err.exit_code() {
        2 => CqlabStatus::InputError,
        3 => CqlabStatus::LimitExceeded,
        _ => CqlabStatus::Failure,
    }
}

fn fail(err: Error) -> CqlabStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

/// Runs a closure, converting panics into `Failure` with a recorded message.
fn guarded<T>(f: impl FnOnce() -> Result<T, Error>) -> Result<T, CqlabStatus> {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(v)) => Ok(v),
        Ok(Err(e)) => Err(fail(e)),
        Err(_) => {
            set_error("internal panic");
            Err(CqlabStatus::Failure)
        }
    }
}

unsafe fn cstr_arg<'a>(ptr: *const c_char) -> Result<&'a str, CqlabStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(CqlabStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        CqlabStatus::InputError
    })
}

unsafe fn distribution(
    handle: &CqlabChannel,
    probs: *const f64,
    len: usize,
) -> Result<InputDistribution, CqlabStatus> {
    if probs.is_null() {
        // fall back to the spec file's p, then to uniform
        return Ok(handle
            .file_p
            .clone()
            .unwrap_or_else(|| InputDistribution::uniform(handle.channel.alphabet_size())));
    }
    if len != handle.channel.alphabet_size() {
        set_error(&format!(
            "distribution over {len} symbols, channel has {}",
            handle.channel.alphabet_size()
        ));
        return Err(CqlabStatus::InputError);
    }
    let slice = std::slice::from_raw_parts(probs, len);
    InputDistribution::new(slice.to_vec()).map_err(fail)
}

/// Copies the most recent error message on this thread into `buf`
/// (NUL-terminated, truncated to `len`). Returns the full message length.
///
/// # Safety
/// `buf` must point to `len` writable bytes, or be null (query mode).
#[no_mangle]
pub unsafe extern "C" fn cqlab_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            // always terminate
            *buf.add(n - 1) = 0;
        }
        bytes.len()
    })
}

/// Loads a channel spec file (JSON). Returns null on error; inspect
/// [`cqlab_last_error_message`].
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn cqlab_channel_load(path: *const c_char) -> *mut CqlabChannel {
    let Ok(path) = cstr_arg(path) else {
        return std::ptr::null_mut();
    };
    match guarded(|| load_channel(Path::new(path))) {
        Ok((channel, file_p)) => Box::into_raw(Box::new(CqlabChannel { channel, file_p })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Parses a channel spec from a JSON string. Returns null on error.
///
/// # Safety
/// `json` must be a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn cqlab_channel_load_json(json: *const c_char) -> *mut CqlabChannel {
    let Ok(text) = cstr_arg(json) else {
        return std::ptr::null_mut();
    };
    match guarded(|| parse_channel(text)) {
        Ok((channel, file_p)) => Box::into_raw(Box::new(CqlabChannel { channel, file_p })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// Releases a channel handle. Null is ignored.
///
/// # Safety
/// `handle` must have come from a `cqlab_channel_load*` call and must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cqlab_channel_free(handle: *mut CqlabChannel) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Output dimension of the channel states, or 0 for a null handle.
///
/// # Safety
/// `handle` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn cqlab_channel_dim(handle: *const CqlabChannel) -> usize {
    handle.as_ref().map_or(0, |h| h.channel.dim())
}

/// Number of input symbols, or 0 for a null handle.
///
/// # Safety
/// `handle` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn cqlab_channel_alphabet_size(handle: *const CqlabChannel) -> usize {
    handle.as_ref().map_or(0, |h| h.channel.alphabet_size())
}

/// Maximizes the mutual information. Writes the capacity (nats) to `out`.
///
/// # Safety
/// `handle` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn cqlab_capacity(
    handle: *const CqlabChannel,
    tol: f64,
    out: *mut f64,
) -> CqlabStatus {
    let (Some(h), false) = (handle.as_ref(), out.is_null()) else {
        set_error("null argument");
        return CqlabStatus::NullPointer;
    };
    match guarded(|| capacity(&h.channel, tol)) {
        Ok(res) => {
            *out = res.capacity;
            CqlabStatus::Ok
        }
        Err(status) => status,
    }
}

/// Mutual information I(p) in nats. Pass `probs = NULL` to use the spec
/// file's distribution (uniform when the file has none).
///
/// # Safety
/// `handle` and `out` must be valid; `probs` must be null or point to
/// `probs_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cqlab_mutual_information(
    handle: *const CqlabChannel,
    probs: *const f64,
    probs_len: usize,
    out: *mut f64,
) -> CqlabStatus {
    let (Some(h), false) = (handle.as_ref(), out.is_null()) else {
        set_error("null argument");
        return CqlabStatus::NullPointer;
    };
    let p = match distribution(h, probs, probs_len) {
        Ok(p) => p,
        Err(status) => return status,
    };
    match guarded(|| mutual_information(&h.channel, &p)) {
        Ok(v) => {
            *out = v;
            CqlabStatus::Ok
        }
        Err(status) => status,
    }
}

/// Averaged first-kind error delta_n(a) of the lifted threshold test.
///
/// # Safety
/// `handle` and `out` must be valid; `probs` must be null or point to
/// `probs_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cqlab_delta_n(
    handle: *const CqlabChannel,
    probs: *const f64,
    probs_len: usize,
    n: usize,
    a: f64,
    out: *mut f64,
) -> CqlabStatus {
    let (Some(h), false) = (handle.as_ref(), out.is_null()) else {
        set_error("null argument");
        return CqlabStatus::NullPointer;
    };
    let p = match distribution(h, probs, probs_len) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let limits = Limits::from_env();
    match guarded(|| delta_n(&h.channel, &p, n, a, &limits)) {
        Ok(v) => {
            *out = v;
            CqlabStatus::Ok
        }
        Err(status) => status,
    }
}

/// Builds a greedy block code at threshold rate `a` and fills `report`.
/// `gamma <= 0` selects the automatic schedule.
///
/// # Safety
/// `handle` and `report` must be valid; `probs` must be null or point to
/// `probs_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cqlab_build_code(
    handle: *const CqlabChannel,
    probs: *const f64,
    probs_len: usize,
    n: usize,
    a: f64,
    gamma: f64,
    lambda: f64,
    report: *mut CqlabCodeReport,
) -> CqlabStatus {
    let (Some(h), false) = (handle.as_ref(), report.is_null()) else {
        set_error("null argument");
        return CqlabStatus::NullPointer;
    };
    let p = match distribution(h, probs, probs_len) {
        Ok(p) => p,
        Err(status) => return status,
    };
    let limits = Limits::from_env();
    let gamma_opt = if gamma > 0.0 { Some(gamma) } else { None };
    match guarded(|| build_block_code(&h.channel, &p, n, a, gamma_opt, lambda, &limits)) {
        Ok((_code, r)) => {
            *report = CqlabCodeReport {
                m: r.m as u64,
                rate: r.rate,
                pe: r.pe,
                delta: r.delta,
                rate_bound_ok: r.rate_bound_ok as i32,
                error_bound_ok: r.error_bound_ok as i32,
                vacuous: r.vacuous as i32,
            };
            CqlabStatus::Ok
        }
        Err(status) => status,
    }
}
