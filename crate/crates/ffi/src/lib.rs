//! C ABI for the Boole toolkit.
//!
//! The surface follows the usual opaque-handle pattern: `boole_*_parse`
//! style constructors return handles through out-parameters and a status
//! code; accessors borrow the handle; every handle has a `*_free`
//! function. Strings returned as `char*` are owned by the caller and
//! must be released with [`boole_string_free`]. On any non-OK status the
//! thread-local message from [`boole_last_error_message`] explains what
//! went wrong.
//!
//! No function panics across the boundary; internal panics are caught
//! and reported as `BOOLE_STATUS_INTERNAL_ERROR`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use boole::ast::Program;
use boole::cli::parse_argument_bindings;
use boole::interp::{exec_procedure, ExecError, ExecOptions, Value};
use boole::smt::{prove_all, SolverConfig, SolverVerdict, UnknownReason, VerdictKind};
use boole::vcgen::{generate_vcs, pretty_vc, VerificationCondition};

/// Result code of every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BooleStatus {
    Ok = 0,
    /// A required pointer was null or a string was not valid UTF-8.
    InvalidArgument = 1,
    ParseError = 2,
    TypeError = 3,
    UnknownProcedure = 4,
    VcgenError = 5,
    /// The solver process could not be spawned or spoke garbage.
    SolverError = 6,
    /// The run hit a failing check (requires, assert, invariant, division
    /// by zero, negative tick, or the iteration budget).
    RuntimeFailure = 7,
    /// An `assume` rejected the run; not a failure.
    Blocked = 8,
    InternalError = 9,
}

/// Verdict of one discharged verification condition.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BooleVerdict {
    Verified = 0,
    Falsified = 1,
    Unknown = 2,
}

/// Opaque parsed, type-checked program.
pub struct BooleProgram {
    program: Program,
}

/// Opaque list of verification conditions for one procedure.
pub struct BooleVcList {
    vcs: Vec<VerificationCondition>,
}

/// Opaque per-condition solver report.
pub struct BooleProveReport {
    entries: Vec<(String, SolverVerdict)>,
}

/// Opaque result of one concrete execution.
pub struct BooleRunResult {
    returns: Vec<(String, Value)>,
    ticks: String,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: impl Into<String>) {
    let message = message.into();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(message).unwrap_or_default();
    });
}

fn owned_c_string(s: String) -> *mut c_char {
    match CString::new(s) {
        Ok(c) => c.into_raw(),
        Err(_) => {
            set_last_error("string contains an interior NUL byte");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `ptr` must be non-null and point at a NUL-terminated string.
unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, BooleStatus> {
    if ptr.is_null() {
        set_last_error(format!("{what} must not be null"));
        return Err(BooleStatus::InvalidArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_last_error(format!("{what} is not valid UTF-8"));
        BooleStatus::InvalidArgument
    })
}

fn guarded(body: impl FnOnce() -> BooleStatus) -> BooleStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic; this is a bug in the library");
            BooleStatus::InternalError
        }
    }
}

/// Version of the underlying toolkit, as a static string (do not free).
#[no_mangle]
pub extern "C" fn boole_version() -> *const c_char {
    concat!("boole ", env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on this thread. The
/// pointer stays valid until the next failing call on the same thread;
/// do not free it.
#[no_mangle]
pub extern "C" fn boole_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Release a string returned by any `boole_*` function.
///
/// # Safety
/// `s` must be a pointer previously returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn boole_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse and type-check `source`, storing a program handle in `out`.
/// Returns `PARSE_ERROR` or `TYPE_ERROR` with the diagnostics available
/// through [`boole_last_error_message`].
///
/// # Safety
/// `source` and `filename` must be NUL-terminated strings; `out` must be
/// a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn boole_program_parse(
    source: *const c_char,
    filename: *const c_char,
    out: *mut *mut BooleProgram,
) -> BooleStatus {
    guarded(|| {
        if out.is_null() {
            set_last_error("out must not be null");
            return BooleStatus::InvalidArgument;
        }
        let source = match read_str(source, "source") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let filename = match read_str(filename, "filename") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let program = match boole::parse(source, filename) {
            Ok(program) => program,
            Err(diags) => {
                let text: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
                set_last_error(text.join("\n"));
                return BooleStatus::ParseError;
            }
        };
        let diags = boole::typecheck(&program);
        if !diags.is_empty() {
            let text: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
            set_last_error(text.join("\n"));
            return BooleStatus::TypeError;
        }
        *out = Box::into_raw(Box::new(BooleProgram { program }));
        BooleStatus::Ok
    })
}

/// # Safety
/// `program` must come from [`boole_program_parse`], or be null.
#[no_mangle]
pub unsafe extern "C" fn boole_program_free(program: *mut BooleProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Canonical source text of the program (free with `boole_string_free`).
///
/// # Safety
/// `program` must be a live handle from [`boole_program_parse`].
#[no_mangle]
pub unsafe extern "C" fn boole_program_pretty(program: *const BooleProgram) -> *mut c_char {
    if program.is_null() {
        return ptr::null_mut();
    }
    owned_c_string(boole::pretty(&(*program).program))
}

/// # Safety
/// `program` must be a live handle from [`boole_program_parse`].
#[no_mangle]
pub unsafe extern "C" fn boole_program_procedure_count(program: *const BooleProgram) -> usize {
    if program.is_null() {
        return 0;
    }
    (*program).program.procedures.len()
}

/// Name of the procedure at `index`, or null when out of range (free
/// with `boole_string_free`).
///
/// # Safety
/// `program` must be a live handle from [`boole_program_parse`].
#[no_mangle]
pub unsafe extern "C" fn boole_program_procedure_name(
    program: *const BooleProgram,
    index: usize,
) -> *mut c_char {
    if program.is_null() {
        return ptr::null_mut();
    }
    match (*program).program.procedures.get(index) {
        Some(proc) => owned_c_string(proc.name.clone()),
        None => ptr::null_mut(),
    }
}

/// Generate the verification conditions of one procedure.
///
/// # Safety
/// `program` must be a live handle, `proc_name` a NUL-terminated string,
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn boole_vcs_generate(
    program: *const BooleProgram,
    proc_name: *const c_char,
    out: *mut *mut BooleVcList,
) -> BooleStatus {
    guarded(|| {
        if program.is_null() || out.is_null() {
            set_last_error("program and out must not be null");
            return BooleStatus::InvalidArgument;
        }
        let proc_name = match read_str(proc_name, "proc_name") {
            Ok(s) => s,
            Err(status) => return status,
        };
        if (*program).program.procedure(proc_name).is_none() {
            set_last_error(format!("procedure `{proc_name}` does not exist"));
            return BooleStatus::UnknownProcedure;
        }
        match generate_vcs(&(*program).program, proc_name) {
            Ok(vcs) => {
                *out = Box::into_raw(Box::new(BooleVcList { vcs }));
                BooleStatus::Ok
            }
            Err(e) => {
                set_last_error(e.to_string());
                BooleStatus::VcgenError
            }
        }
    })
}

/// # Safety
/// `vcs` must come from [`boole_vcs_generate`], or be null.
#[no_mangle]
pub unsafe extern "C" fn boole_vcs_free(vcs: *mut BooleVcList) {
    if !vcs.is_null() {
        drop(Box::from_raw(vcs));
    }
}

/// # Safety
/// `vcs` must be a live handle from [`boole_vcs_generate`].
#[no_mangle]
pub unsafe extern "C" fn boole_vcs_count(vcs: *const BooleVcList) -> usize {
    if vcs.is_null() {
        return 0;
    }
    (*vcs).vcs.len()
}

/// # Safety
/// `vcs` must be a live handle from [`boole_vcs_generate`].
#[no_mangle]
pub unsafe extern "C" fn boole_vcs_name(vcs: *const BooleVcList, index: usize) -> *mut c_char {
    if vcs.is_null() {
        return ptr::null_mut();
    }
    match (*vcs).vcs.get(index) {
        Some(vc) => owned_c_string(vc.name.clone()),
        None => ptr::null_mut(),
    }
}

/// Human-readable `case` block for the condition at `index`.
///
/// # Safety
/// `vcs` must be a live handle from [`boole_vcs_generate`].
#[no_mangle]
pub unsafe extern "C" fn boole_vcs_pretty(vcs: *const BooleVcList, index: usize) -> *mut c_char {
    if vcs.is_null() {
        return ptr::null_mut();
    }
    match (*vcs).vcs.get(index) {
        Some(vc) => owned_c_string(pretty_vc(vc)),
        None => ptr::null_mut(),
    }
}

/// Complete SMT-LIB 2 script refuting the condition at `index`.
/// `logic` may be null for the default (`ALL`).
///
/// # Safety
/// `vcs` must be a live handle; `logic` null or NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn boole_vcs_smtlib(
    vcs: *const BooleVcList,
    index: usize,
    logic: *const c_char,
) -> *mut c_char {
    if vcs.is_null() {
        return ptr::null_mut();
    }
    let logic = if logic.is_null() {
        "ALL"
    } else {
        match read_str(logic, "logic") {
            Ok(s) => s,
            Err(_) => return ptr::null_mut(),
        }
    };
    match (*vcs).vcs.get(index) {
        Some(vc) => owned_c_string(boole::smt::emit_smtlib(vc, logic)),
        None => ptr::null_mut(),
    }
}

/// Discharge every condition of `proc_name` through an external solver.
/// `solver_command` is the whitespace-separated command template of a
/// process that reads SMT-LIB on stdin (for example `z3 -smt2 -in`).
///
/// # Safety
/// `program` must be a live handle; strings NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn boole_prove(
    program: *const BooleProgram,
    proc_name: *const c_char,
    solver_command: *const c_char,
    timeout_secs: u64,
    jobs: usize,
    out: *mut *mut BooleProveReport,
) -> BooleStatus {
    guarded(|| {
        if program.is_null() || out.is_null() {
            set_last_error("program and out must not be null");
            return BooleStatus::InvalidArgument;
        }
        let proc_name = match read_str(proc_name, "proc_name") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let solver_command = match read_str(solver_command, "solver_command") {
            Ok(s) => s,
            Err(status) => return status,
        };
        if jobs == 0 {
            set_last_error("jobs must be at least 1");
            return BooleStatus::InvalidArgument;
        }
        if (*program).program.procedure(proc_name).is_none() {
            set_last_error(format!("procedure `{proc_name}` does not exist"));
            return BooleStatus::UnknownProcedure;
        }
        let vcs = match generate_vcs(&(*program).program, proc_name) {
            Ok(vcs) => vcs,
            Err(e) => {
                set_last_error(e.to_string());
                return BooleStatus::VcgenError;
            }
        };
        let cfg = SolverConfig::new(solver_command, timeout_secs, "ALL");
        let entries = prove_all(&vcs, &cfg, jobs);
        *out = Box::into_raw(Box::new(BooleProveReport { entries }));
        BooleStatus::Ok
    })
}

/// # Safety
/// `report` must come from [`boole_prove`], or be null.
#[no_mangle]
pub unsafe extern "C" fn boole_report_free(report: *mut BooleProveReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle from [`boole_prove`].
#[no_mangle]
pub unsafe extern "C" fn boole_report_count(report: *const BooleProveReport) -> usize {
    if report.is_null() {
        return 0;
    }
    (*report).entries.len()
}

/// # Safety
/// `report` must be a live handle from [`boole_prove`].
#[no_mangle]
pub unsafe extern "C" fn boole_report_name(
    report: *const BooleProveReport,
    index: usize,
) -> *mut c_char {
    if report.is_null() {
        return ptr::null_mut();
    }
    match (*report).entries.get(index) {
        Some((name, _)) => owned_c_string(name.clone()),
        None => ptr::null_mut(),
    }
}

/// Verdict for the condition at `index`; out-of-range counts as Unknown.
///
/// # Safety
/// `report` must be a live handle from [`boole_prove`].
#[no_mangle]
pub unsafe extern "C" fn boole_report_verdict(
    report: *const BooleProveReport,
    index: usize,
) -> BooleVerdict {
    if report.is_null() {
        return BooleVerdict::Unknown;
    }
    match (*report).entries.get(index) {
        Some((_, verdict)) => match verdict.kind {
            VerdictKind::Verified => BooleVerdict::Verified,
            VerdictKind::Falsified(_) => BooleVerdict::Falsified,
            VerdictKind::Unknown(_) => BooleVerdict::Unknown,
        },
        None => BooleVerdict::Unknown,
    }
}

/// # Safety
/// `report` must be a live handle from [`boole_prove`].
#[no_mangle]
pub unsafe extern "C" fn boole_report_elapsed_ms(
    report: *const BooleProveReport,
    index: usize,
) -> u64 {
    if report.is_null() {
        return 0;
    }
    match (*report).entries.get(index) {
        Some((_, verdict)) => verdict.elapsed_ms.min(u64::MAX as u128) as u64,
        None => 0,
    }
}

/// Counterexample as `name = value` lines for a falsified condition, the
/// unknown reason for an undecided one, or null for verified/out of
/// range. Free with `boole_string_free`.
///
/// # Safety
/// `report` must be a live handle from [`boole_prove`].
#[no_mangle]
pub unsafe extern "C" fn boole_report_detail(
    report: *const BooleProveReport,
    index: usize,
) -> *mut c_char {
    if report.is_null() {
        return ptr::null_mut();
    }
    match (*report).entries.get(index) {
        Some((_, verdict)) => match &verdict.kind {
            VerdictKind::Verified => ptr::null_mut(),
            VerdictKind::Falsified(model) => {
                let lines: Vec<String> =
                    model.iter().map(|(name, value)| format!("{name} = {value}")).collect();
                owned_c_string(lines.join("\n"))
            }
            VerdictKind::Unknown(reason) => owned_c_string(match reason {
                UnknownReason::Timeout => "timeout".to_string(),
                UnknownReason::SolverUnknown => "solver answered unknown".to_string(),
                UnknownReason::SolverError(e) => e.clone(),
            }),
        },
        None => ptr::null_mut(),
    }
}

/// Execute a procedure concretely. `args` is a `name=value,...` binding
/// of every parameter (null for procedures without parameters). On
/// `RUNTIME_FAILURE` the failing check is described by
/// [`boole_last_error_message`]; `BLOCKED` means an `assume` rejected
/// the run.
///
/// # Safety
/// `program` must be a live handle; strings NUL-terminated or null as
/// documented; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn boole_run(
    program: *const BooleProgram,
    proc_name: *const c_char,
    args: *const c_char,
    check_invariants: bool,
    seed: u64,
    max_steps: u64,
    out: *mut *mut BooleRunResult,
) -> BooleStatus {
    guarded(|| {
        if program.is_null() || out.is_null() {
            set_last_error("program and out must not be null");
            return BooleStatus::InvalidArgument;
        }
        let proc_name = match read_str(proc_name, "proc_name") {
            Ok(s) => s,
            Err(status) => return status,
        };
        let args_text = if args.is_null() {
            ""
        } else {
            match read_str(args, "args") {
                Ok(s) => s,
                Err(status) => return status,
            }
        };
        let Some(proc) = (*program).program.procedure(proc_name) else {
            set_last_error(format!("procedure `{proc_name}` does not exist"));
            return BooleStatus::UnknownProcedure;
        };
        let bindings = match parse_argument_bindings(args_text, &proc.params) {
            Ok(bindings) => bindings,
            Err(message) => {
                set_last_error(message);
                return BooleStatus::InvalidArgument;
            }
        };
        let opts = ExecOptions { check_invariants, max_steps, seed };
        match exec_procedure(&(*program).program, proc_name, &bindings, &opts) {
            Ok(result) => {
                let returns = proc
                    .returns
                    .iter()
                    .map(|(name, _)| (name.clone(), result.returns[name].clone()))
                    .collect();
                let run = BooleRunResult { returns, ticks: result.ticks.to_string() };
                *out = Box::into_raw(Box::new(run));
                BooleStatus::Ok
            }
            Err(ExecError::Blocked { span }) => {
                set_last_error(format!("run blocked by assume at {span}"));
                BooleStatus::Blocked
            }
            Err(e) => {
                set_last_error(e.to_string());
                BooleStatus::RuntimeFailure
            }
        }
    })
}

/// # Safety
/// `result` must come from [`boole_run`], or be null.
#[no_mangle]
pub unsafe extern "C" fn boole_run_result_free(result: *mut BooleRunResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// # Safety
/// `result` must be a live handle from [`boole_run`].
#[no_mangle]
pub unsafe extern "C" fn boole_run_result_count(result: *const BooleRunResult) -> usize {
    if result.is_null() {
        return 0;
    }
    (*result).returns.len()
}

/// # Safety
/// `result` must be a live handle from [`boole_run`].
#[no_mangle]
pub unsafe extern "C" fn boole_run_result_name(
    result: *const BooleRunResult,
    index: usize,
) -> *mut c_char {
    if result.is_null() {
        return ptr::null_mut();
    }
    match (*result).returns.get(index) {
        Some((name, _)) => owned_c_string(name.clone()),
        None => ptr::null_mut(),
    }
}

/// Value of the return variable at `index`, in decimal or `true`/`false`
/// text form (free with `boole_string_free`).
///
/// # Safety
/// `result` must be a live handle from [`boole_run`].
#[no_mangle]
pub unsafe extern "C" fn boole_run_result_value(
    result: *const BooleRunResult,
    index: usize,
) -> *mut c_char {
    if result.is_null() {
        return ptr::null_mut();
    }
    match (*result).returns.get(index) {
        Some((_, value)) => owned_c_string(value.to_string()),
        None => ptr::null_mut(),
    }
}

/// Total tick cost of the run, in decimal text (the count is unbounded,
/// so no fixed-width integer is safe). Free with `boole_string_free`.
///
/// # Safety
/// `result` must be a live handle from [`boole_run`].
#[no_mangle]
pub unsafe extern "C" fn boole_run_result_ticks(result: *const BooleRunResult) -> *mut c_char {
    if result.is_null() {
        return ptr::null_mut();
    }
    owned_c_string((*result).ticks.clone())
}
