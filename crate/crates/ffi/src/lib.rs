//! C interface to the fast-forward runner.
//!
//! Objects are opaque handles created and destroyed through this API. Every
//! fallible call returns an [`FfdStatus`]; the message of the most recent
//! failure on the calling thread is available from
//! [`ffd_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use ffdirac::config::{validate_with, Overrides, Preset, RunConfig};
use ffdirac::runner::{self, RunError, RunReport};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FfdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    Simulation = 4,
    Io = 5,
    Panic = 6,
}

/// Validated run configuration.
pub struct FfdConfig(RunConfig);

/// Result of a completed run.
pub struct FfdReport(RunReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn fail(status: FfdStatus, msg: impl Into<String>) -> FfdStatus {
    set_error(msg);
    status
}

fn guarded(f: impl FnOnce() -> FfdStatus) -> FfdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(FfdStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, FfdStatus> {
    if p.is_null() {
        return Err(fail(FfdStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(FfdStatus::InvalidUtf8, "string argument is not UTF-8"))
}

fn run_error(e: RunError) -> FfdStatus {
    let status = match e {
        RunError::Simulation(_) => FfdStatus::Simulation,
        _ => FfdStatus::Io,
    };
    fail(status, e.to_string())
}

fn build_config(text: &str, ov: &Overrides, out: *mut *mut FfdConfig) -> FfdStatus {
    match validate_with(text, ov) {
        Ok(cfg) => {
            unsafe { *out = Box::into_raw(Box::new(FfdConfig(cfg))) };
            FfdStatus::Ok
        }
        Err(e) => fail(FfdStatus::InvalidConfig, e.to_string()),
    }
}

/// Parses and validates a TOML configuration.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ffd_config_from_toml(toml: *const c_char, out: *mut *mut FfdConfig) -> FfdStatus {
    guarded(|| {
        if out.is_null() {
            return fail(FfdStatus::NullPointer, "null output pointer");
        }
        match read_str(toml) {
            Ok(text) => build_config(text, &Overrides::default(), out),
            Err(s) => s,
        }
    })
}

/// Configuration of a named preset (`"fig1"` or `"fig2"`).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ffd_config_preset(name: *const c_char, out: *mut *mut FfdConfig) -> FfdStatus {
    guarded(|| {
        if out.is_null() {
            return fail(FfdStatus::NullPointer, "null output pointer");
        }
        let name = match read_str(name) {
            Ok(n) => n,
            Err(s) => return s,
        };
        match name.parse::<Preset>() {
            Ok(p) => build_config(
                "",
                &Overrides {
                    preset: Some(p),
                    ..Default::default()
                },
                out,
            ),
            Err(e) => fail(FfdStatus::InvalidConfig, e),
        }
    })
}

/// Sets the directory [`ffd_report_write`] uses when given `NULL`.
///
/// # Safety
/// `config` must come from this library; `dir` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ffd_config_set_output_dir(config: *mut FfdConfig, dir: *const c_char) -> FfdStatus {
    guarded(|| {
        let Some(cfg) = config.as_mut() else {
            return fail(FfdStatus::NullPointer, "null config");
        };
        match read_str(dir) {
            Ok(d) => {
                cfg.0.output_dir = PathBuf::from(d);
                FfdStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// # Safety
/// `config` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ffd_config_free(config: *mut FfdConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the unperturbed and fast-forward evolutions.
///
/// # Safety
/// `config` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ffd_run(config: *const FfdConfig, out: *mut *mut FfdReport) -> FfdStatus {
    guarded(|| {
        let Some(cfg) = config.as_ref() else {
            return fail(FfdStatus::NullPointer, "null config");
        };
        if out.is_null() {
            return fail(FfdStatus::NullPointer, "null output pointer");
        }
        match runner::run(&cfg.0) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(FfdReport(r)));
                FfdStatus::Ok
            }
            Err(e) => run_error(e),
        }
    })
}

/// Whether every threshold check passed.
///
/// # Safety
/// `report` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn ffd_report_passed(report: *const FfdReport, out: *mut bool) -> FfdStatus {
    guarded(|| match (report.as_ref(), out.is_null()) {
        (Some(r), false) => {
            *out = r.0.summary.passed;
            FfdStatus::Ok
        }
        _ => fail(FfdStatus::NullPointer, "null argument"),
    })
}

/// Final fast-forward and unperturbed fidelities.
///
/// # Safety
/// `report` must come from this library; both outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn ffd_report_fidelities(
    report: *const FfdReport,
    ff: *mut f64,
    unperturbed: *mut f64,
) -> FfdStatus {
    guarded(|| match (report.as_ref(), ff.is_null() || unperturbed.is_null()) {
        (Some(r), false) => {
            *ff = r.0.summary.results.fidelity_ff;
            *unperturbed = r.0.summary.results.fidelity_unperturbed;
            FfdStatus::Ok
        }
        _ => fail(FfdStatus::NullPointer, "null argument"),
    })
}

/// Negative-branch populations; NaN when the field is not homogeneous.
///
/// # Safety
/// `report` must come from this library; both outputs must be valid.
#[no_mangle]
pub unsafe extern "C" fn ffd_report_pair_production(
    report: *const FfdReport,
    ff: *mut f64,
    unperturbed: *mut f64,
) -> FfdStatus {
    guarded(|| match (report.as_ref(), ff.is_null() || unperturbed.is_null()) {
        (Some(r), false) => {
            let s = &r.0.summary.results;
            *ff = s.pair_production_ff.unwrap_or(f64::NAN);
            *unperturbed = s.pair_production_unperturbed.unwrap_or(f64::NAN);
            FfdStatus::Ok
        }
        _ => fail(FfdStatus::NullPointer, "null argument"),
    })
}

/// Summary as a JSON string; release it with [`ffd_string_free`].
///
/// # Safety
/// `report` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ffd_report_summary_json(report: *const FfdReport, out: *mut *mut c_char) -> FfdStatus {
    guarded(|| {
        let (Some(r), false) = (report.as_ref(), out.is_null()) else {
            return fail(FfdStatus::NullPointer, "null argument");
        };
        match serde_json::to_string(&r.0.summary) {
            Ok(s) => {
                *out = CString::new(s).unwrap_or_default().into_raw();
                FfdStatus::Ok
            }
            Err(e) => fail(FfdStatus::Io, e.to_string()),
        }
    })
}

/// Writes the output files to `dir`, or to the configured directory when
/// `dir` is null.
///
/// # Safety
/// `report` must come from this library; `dir` must be null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn ffd_report_write(report: *const FfdReport, dir: *const c_char) -> FfdStatus {
    guarded(|| {
        let Some(r) = report.as_ref() else {
            return fail(FfdStatus::NullPointer, "null report");
        };
        let dir = if dir.is_null() {
            r.0.summary.config.output_dir.clone()
        } else {
            match read_str(dir) {
                Ok(d) => PathBuf::from(d),
                Err(s) => return s,
            }
        };
        match runner::write_outputs(&r.0, &dir) {
            Ok(()) => FfdStatus::Ok,
            Err(e) => run_error(e),
        }
    })
}

/// # Safety
/// `report` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ffd_report_free(report: *mut FfdReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn ffd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread, or null. Valid until the next
/// call into the library from the same thread.
#[no_mangle]
pub extern "C" fn ffd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
