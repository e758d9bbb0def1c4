//! C ABI for the `hurwitz` crate.
//!
//! Conventions:
//!
//! * Every fallible function returns an [`HzStatus`]. On failure,
//!   [`hz_last_error_message`] describes the error for the calling thread.
//! * Results that own memory are returned as opaque handles or C strings through
//!   out-pointers. Release them with the matching `*_free` function. Passing
//!   NULL to a free function is a no-op.
//! * Strings passed in must be NUL-terminated UTF-8.
//! * Panics never cross the boundary; they are reported as [`HzStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hurwitz::dimension::{
    bowen_dimension, lattice_moduli, partition_sum, tau_exponent, DigitSet, PartitionOptions,
    PressureMode,
};
use hurwitz::expansion::{classify_digit, evaluate, expand, DigitClass, DigitWord, ExpansionResult};
use hurwitz::gaussian::{GaussianInt, GaussianRational};
use hurwitz::ifs::MobiusBranch;
use hurwitz::report::{render_svg, run_suite, to_json, RunConfig, Suite, TessellationSpec};
use hurwitz::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HzStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Domain = 4,
    DivisionByZero = 5,
    InvalidArgument = 6,
    BudgetExceeded = 7,
    NonConvergent = 8,
    Io = 9,
    /// A verification ran but at least one check failed.
    CheckFailed = 10,
    Panic = 11,
}

/// Pressure mode for [`hz_partition_sum`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HzPressureMode {
    SupNorm = 0,
    BasePoint = 1,
}

/// Digit class returned by [`hz_classify_digit`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HzDigitClass {
    Invalid = 0,
    Exceptional = 1,
    Regular = 2,
}

/// `Z_n(s)` with its pressure bracket.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HzPressure {
    pub s: f64,
    pub n: usize,
    pub log_zn_over_n: f64,
    pub lower_bracket: f64,
    pub upper_bracket: f64,
}

/// Bowen dimension bracket.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HzBowen {
    pub s_low: f64,
    pub s_high: f64,
    pub n_used: usize,
    pub iterations: u32,
    pub converged: bool,
}

/// Opaque Hurwitz expansion.
pub struct HzExpansion {
    inner: ExpansionResult,
}

/// Opaque finite alphabet of IFS branches.
pub struct HzAlphabet {
    inner: Vec<MobiusBranch>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', "\\0")).expect("NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HzStatus {
    match e {
        Error::Domain(_) => HzStatus::Domain,
        Error::DivisionByZero(_) => HzStatus::DivisionByZero,
        Error::Parse(_) => HzStatus::Parse,
        Error::InvalidArgument(_) => HzStatus::InvalidArgument,
        Error::BudgetExceeded { .. } => HzStatus::BudgetExceeded,
        Error::NonConvergent(_) => HzStatus::NonConvergent,
        Error::Io(_) => HzStatus::Io,
    }
}

struct Fail(HzStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status plus last-error message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> HzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HzStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            HzStatus::Panic
        }
    }
}

fn null(name: &str) -> Fail {
    Fail(HzStatus::NullPointer, format!("{name} is NULL"))
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Fail(HzStatus::InvalidUtf8, format!("{name}: {e}")))
}

unsafe fn write_out<T>(out: *mut T, value: T, name: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', "\\0")).expect("NULs removed").into_raw()
}

/// Message for the last failed call on this thread, or NULL if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hz_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a pointer obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Expands an exact point of `U` written as `"p/q+r/s i"`.
///
/// # Safety
/// `z` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hz_expand(z: *const c_char, max_digits: usize, out: *mut *mut HzExpansion) -> HzStatus {
    guard(|| {
        let z: GaussianRational = read_str(z, "z")?.parse()?;
        let inner = expand(&z, max_digits)?;
        write_out(out, Box::into_raw(Box::new(HzExpansion { inner })), "out")
    })
}

/// Number of digits in the expansion (0 for NULL).
///
/// # Safety
/// `e` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hz_expansion_len(e: *const HzExpansion) -> usize {
    e.as_ref().map_or(0, |e| e.inner.digits.len())
}

/// Whether the expansion terminated (the remainder reached 0).
///
/// # Safety
/// `e` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hz_expansion_terminated(e: *const HzExpansion) -> bool {
    e.as_ref().is_some_and(|e| e.inner.terminated)
}

/// Writes digit `index` into `re`, `im`.
///
/// # Safety
/// `e` must be a live handle; `re` and `im` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hz_expansion_digit(
    e: *const HzExpansion,
    index: usize,
    re: *mut i64,
    im: *mut i64,
) -> HzStatus {
    guard(|| {
        let e = e.as_ref().ok_or_else(|| null("expansion"))?;
        let d = e.inner.digits.digits().get(index).ok_or_else(|| {
            Fail(
                HzStatus::InvalidArgument,
                format!("index {index} out of range 0..{}", e.inner.digits.len()),
            )
        })?;
        let p = d
            .value()
            .to_lattice()
            .ok_or_else(|| Fail(HzStatus::InvalidArgument, format!("digit {d} exceeds 64 bits")))?;
        write_out(re, p.re, "re")?;
        write_out(im, p.im, "im")
    })
}

/// Releases an expansion handle.
///
/// # Safety
/// `e` must be NULL or a handle from [`hz_expand`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hz_expansion_free(e: *mut HzExpansion) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// Exact value of the word given as `len` pairs `(re, im)` in `digits`,
/// written as a string like `"2/5"` into `*out` (free with [`hz_string_free`]).
///
/// # Safety
/// `digits` must point to `2 * len` integers (may be NULL when `len` is 0).
#[no_mangle]
pub unsafe extern "C" fn hz_evaluate(digits: *const i64, len: usize, out: *mut *mut c_char) -> HzStatus {
    guard(|| {
        let flat: &[i64] = if len == 0 {
            &[]
        } else if digits.is_null() {
            return Err(null("digits"));
        } else {
            std::slice::from_raw_parts(digits, 2 * len)
        };
        let pairs: Vec<(i64, i64)> = flat.chunks(2).map(|c| (c[0], c[1])).collect();
        let v = evaluate(&DigitWord::from_pairs(&pairs)?)?;
        write_out(out, c_string(v.to_string()), "out")
    })
}

#[no_mangle]
pub extern "C" fn hz_classify_digit(re: i64, im: i64) -> HzDigitClass {
    match classify_digit(&GaussianInt::new(re, im)) {
        DigitClass::Invalid => HzDigitClass::Invalid,
        DigitClass::Exceptional => HzDigitClass::Exceptional,
        DigitClass::Regular => HzDigitClass::Regular,
    }
}

/// Parses an alphabet such as `"2,2;-2,-2"` or `"[[2,2],[-2,-2]]"`.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hz_alphabet_parse(text: *const c_char, out: *mut *mut HzAlphabet) -> HzStatus {
    guard(|| {
        let set: DigitSet = read_str(text, "text")?.parse()?;
        let inner = set.to_alphabet()?;
        write_out(out, Box::into_raw(Box::new(HzAlphabet { inner })), "out")
    })
}

/// Number of letters (0 for NULL).
///
/// # Safety
/// `a` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hz_alphabet_len(a: *const HzAlphabet) -> usize {
    a.as_ref().map_or(0, |a| a.inner.len())
}

/// Releases an alphabet handle.
///
/// # Safety
/// `a` must be NULL or a handle from [`hz_alphabet_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hz_alphabet_free(a: *mut HzAlphabet) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// `Z_n(s)` over the alphabet, evaluating at most `max_words` words.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hz_partition_sum(
    a: *const HzAlphabet,
    n: usize,
    s: f64,
    mode: HzPressureMode,
    max_words: u64,
    out: *mut HzPressure,
) -> HzStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("alphabet"))?;
        let mode = match mode {
            HzPressureMode::SupNorm => PressureMode::SupNorm,
            HzPressureMode::BasePoint => PressureMode::BasePoint,
        };
        let opts = PartitionOptions {
            max_words,
            ..PartitionOptions::default()
        };
        let e = partition_sum(&a.inner, n, s, mode, &opts)?;
        write_out(
            out,
            HzPressure {
                s: e.s,
                n: e.n,
                log_zn_over_n: e.log_zn_over_n,
                lower_bracket: e.lower_bracket,
                upper_bracket: e.upper_bracket,
            },
            "out",
        )
    })
}

/// Bowen dimension bracket of the alphabet.
///
/// # Safety
/// `a` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hz_bowen_dimension(a: *const HzAlphabet, tol: f64, n_max: usize, out: *mut HzBowen) -> HzStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("alphabet"))?;
        let r = bowen_dimension(&a.inner, tol, n_max)?;
        write_out(
            out,
            HzBowen {
                s_low: r.s_low,
                s_high: r.s_high,
                n_used: r.n_used,
                iterations: r.iterations,
                converged: r.converged,
            },
            "out",
        )
    })
}

/// Convergence-exponent estimate of the moduli of `ℤ[i]` in norm order.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hz_tau_lattice(include_zero: bool, horizon: usize, out: *mut f64) -> HzStatus {
    guard(|| {
        let est = tau_exponent(lattice_moduli(include_zero, horizon), horizon)?;
        write_out(out, est.estimate, "out")
    })
}

/// SVG of the first-level cylinders into `*out` (free with [`hz_string_free`]).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hz_tessellate_svg(norm_sq_max: u64, include_exceptional: bool, out: *mut *mut c_char) -> HzStatus {
    guard(|| {
        let spec = TessellationSpec {
            norm_sq_max,
            include_exceptional,
            ..TessellationSpec::default()
        };
        write_out(out, c_string(render_svg(&spec)?), "out")
    })
}

/// Runs a verification suite and writes the JSON report into `*out`, which
/// is set even when checks fail ([`HzStatus::CheckFailed`]).
///
/// # Safety
/// `suite` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hz_verify(suite: *const c_char, seed: u64, out: *mut *mut c_char) -> HzStatus {
    guard(|| {
        let suite: Suite = read_str(suite, "suite")?.parse()?;
        let cfg = RunConfig {
            seed,
            ..RunConfig::default()
        };
        let reports = run_suite(suite, &cfg)?;
        write_out(out, c_string(to_json(&reports)), "out")?;
        let failed = reports.iter().filter(|r| !r.passed()).count();
        if failed > 0 {
            return Err(Fail(HzStatus::CheckFailed, format!("{failed} checks failed")));
        }
        Ok(())
    })
}
