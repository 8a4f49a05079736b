//! Exercises the C ABI exactly as a foreign binding would: through raw
//! pointers, status codes and the last-error channel.

use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::ptr;

use boole_ffi::*;

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().expect("workspace root")
}

fn fig5_source() -> CString {
    let path = workspace_root().join("corpus/valid/loop_simple.bl");
    CString::new(std::fs::read_to_string(path).expect("read")).expect("no NUL")
}

fn take_string(ptr: *mut c_char) -> String {
    assert!(!ptr.is_null(), "expected a string");
    let text = unsafe { CStr::from_ptr(ptr) }.to_str().expect("utf8").to_string();
    unsafe { boole_string_free(ptr) };
    text
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(boole_last_error_message()) }.to_str().expect("utf8").to_string()
}

fn parse_fig5() -> *mut BooleProgram {
    let source = fig5_source();
    let filename = CString::new("loop_simple.bl").unwrap();
    let mut program: *mut BooleProgram = ptr::null_mut();
    let status =
        unsafe { boole_program_parse(source.as_ptr(), filename.as_ptr(), &mut program) };
    assert_eq!(status, BooleStatus::Ok, "{}", last_error());
    assert!(!program.is_null());
    program
}

/// Solver command for tests (mirrors the core test helper).
fn solver_command() -> CString {
    if let Ok(cmd) = std::env::var("BOOLE_SOLVER") {
        if !cmd.trim().is_empty() {
            return CString::new(cmd).unwrap();
        }
    }
    let shim = workspace_root().join("tools/z3-wasm/z3smt2.mjs");
    if shim.is_file() && workspace_root().join("tools/z3-wasm/node_modules").is_dir() {
        return CString::new(format!("node {}", shim.display())).unwrap();
    }
    CString::new("z3 -smt2 -in").unwrap()
}

#[test]
fn version_is_a_static_string() {
    let version = unsafe { CStr::from_ptr(boole_version()) }.to_str().expect("utf8");
    assert!(version.starts_with("boole "), "{version}");
}

#[test]
fn parse_pretty_and_procedure_listing() {
    let program = parse_fig5();
    unsafe {
        assert_eq!(boole_program_procedure_count(program), 1);
        assert_eq!(take_string(boole_program_procedure_name(program, 0)), "loopSimple");
        assert!(boole_program_procedure_name(program, 1).is_null());
        let pretty = take_string(boole_program_pretty(program));
        assert!(pretty.contains("requires (n >= 0);"), "{pretty}");
        boole_program_free(program);
    }
}

#[test]
fn parse_reports_diagnostics_through_last_error() {
    let source = CString::new("program Boole;\nprocedure p () returns (r: int)\n{\n  r := true;\n};\n").unwrap();
    let filename = CString::new("bad.bl").unwrap();
    let mut program: *mut BooleProgram = ptr::null_mut();
    let status =
        unsafe { boole_program_parse(source.as_ptr(), filename.as_ptr(), &mut program) };
    assert_eq!(status, BooleStatus::TypeError);
    assert!(program.is_null());
    assert!(last_error().contains("TypeMismatch"), "{}", last_error());

    let garbage = CString::new("not a program").unwrap();
    let status =
        unsafe { boole_program_parse(garbage.as_ptr(), filename.as_ptr(), &mut program) };
    assert_eq!(status, BooleStatus::ParseError);

    let status = unsafe { boole_program_parse(ptr::null(), filename.as_ptr(), &mut program) };
    assert_eq!(status, BooleStatus::InvalidArgument);
}

#[test]
fn vcs_listing_and_smtlib_emission() {
    let program = parse_fig5();
    let proc_name = CString::new("loopSimple").unwrap();
    let mut vcs: *mut BooleVcList = ptr::null_mut();
    unsafe {
        let status = boole_vcs_generate(program, proc_name.as_ptr(), &mut vcs);
        assert_eq!(status, BooleStatus::Ok, "{}", last_error());
        assert_eq!(boole_vcs_count(vcs), 4);
        assert_eq!(take_string(boole_vcs_name(vcs, 0)), "entry_invariant_0");
        assert_eq!(take_string(boole_vcs_name(vcs, 3)), "neg_cond");
        let case = take_string(boole_vcs_pretty(vcs, 0));
        assert!(case.starts_with("case entry_invariant_0"), "{case}");
        let script = take_string(boole_vcs_smtlib(vcs, 0, ptr::null()));
        assert!(script.contains("(assert (not (<= 0 n)))"), "{script}");
        assert!(boole_vcs_name(vcs, 4).is_null());

        let missing = CString::new("nope").unwrap();
        let mut bogus: *mut BooleVcList = ptr::null_mut();
        assert_eq!(
            boole_vcs_generate(program, missing.as_ptr(), &mut bogus),
            BooleStatus::UnknownProcedure
        );

        boole_vcs_free(vcs);
        boole_program_free(program);
    }
}

#[test]
fn prove_through_the_c_abi() {
    let program = parse_fig5();
    let proc_name = CString::new("loopSimple").unwrap();
    let solver = solver_command();
    let mut report: *mut BooleProveReport = ptr::null_mut();
    unsafe {
        let status = boole_prove(program, proc_name.as_ptr(), solver.as_ptr(), 10, 2, &mut report);
        assert_eq!(status, BooleStatus::Ok, "{}", last_error());
        assert_eq!(boole_report_count(report), 4);
        for i in 0..4 {
            assert_eq!(boole_report_verdict(report, i), BooleVerdict::Verified);
            assert!(boole_report_detail(report, i).is_null());
        }
        boole_report_free(report);
        boole_program_free(program);
    }
}

#[test]
fn falsified_conditions_expose_their_model() {
    let path = workspace_root().join("corpus/faulty/f01_loop_simple_weak_invariant.bl");
    let source = CString::new(std::fs::read_to_string(path).expect("read")).unwrap();
    let filename = CString::new("f01.bl").unwrap();
    let mut program: *mut BooleProgram = ptr::null_mut();
    unsafe {
        assert_eq!(
            boole_program_parse(source.as_ptr(), filename.as_ptr(), &mut program),
            BooleStatus::Ok
        );
        let proc_name = CString::new("loopSimple").unwrap();
        let solver = solver_command();
        let mut report: *mut BooleProveReport = ptr::null_mut();
        let status = boole_prove(program, proc_name.as_ptr(), solver.as_ptr(), 10, 2, &mut report);
        assert_eq!(status, BooleStatus::Ok, "{}", last_error());
        let falsified = (0..boole_report_count(report))
            .find(|&i| boole_report_verdict(report, i) == BooleVerdict::Falsified)
            .expect("a falsified condition");
        let detail = take_string(boole_report_detail(report, falsified));
        assert!(detail.contains('='), "{detail}");
        boole_report_free(report);
        boole_program_free(program);
    }
}

#[test]
fn run_through_the_c_abi() {
    let program = parse_fig5();
    let proc_name = CString::new("loopSimple").unwrap();
    unsafe {
        let args = CString::new("n=5").unwrap();
        let mut result: *mut BooleRunResult = ptr::null_mut();
        let status =
            boole_run(program, proc_name.as_ptr(), args.as_ptr(), true, 0, 1_000_000, &mut result);
        assert_eq!(status, BooleStatus::Ok, "{}", last_error());
        assert_eq!(boole_run_result_count(result), 1);
        assert_eq!(take_string(boole_run_result_name(result, 0)), "r");
        assert_eq!(take_string(boole_run_result_value(result, 0)), "10");
        assert_eq!(take_string(boole_run_result_ticks(result)), "0");
        boole_run_result_free(result);

        // Requires violation surfaces as a runtime failure.
        let args = CString::new("n=-1").unwrap();
        let mut result: *mut BooleRunResult = ptr::null_mut();
        let status =
            boole_run(program, proc_name.as_ptr(), args.as_ptr(), false, 0, 1_000_000, &mut result);
        assert_eq!(status, BooleStatus::RuntimeFailure);
        assert!(last_error().contains("requires"), "{}", last_error());

        // Bad bindings are invalid arguments.
        let args = CString::new("m=1").unwrap();
        let status =
            boole_run(program, proc_name.as_ptr(), args.as_ptr(), false, 0, 1_000_000, &mut result);
        assert_eq!(status, BooleStatus::InvalidArgument);

        boole_program_free(program);
    }
}

#[test]
fn generated_header_declares_the_api() {
    let header_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/boole.h");
    let header = std::fs::read_to_string(&header_path).expect("header generated by build.rs");
    for symbol in [
        "BOOLE_H",
        "typedef struct BooleProgram BooleProgram;",
        "boole_program_parse",
        "boole_vcs_generate",
        "boole_prove",
        "boole_run",
        "boole_string_free",
        "boole_last_error_message",
    ] {
        assert!(header.contains(symbol), "header lacks {symbol}:\n{header}");
    }
}

#[test]
fn generated_header_compiles_as_c() {
    let header_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/boole.h");
    let Some(clang) = ["clang", "cc", "gcc"]
        .iter()
        .find(|c| which(c).is_some())
    else {
        eprintln!("no C compiler on PATH; skipping header syntax check");
        return;
    };
    let output = std::process::Command::new(clang)
        .args(["-fsyntax-only", "-x", "c", &header_path.display().to_string()])
        .output()
        .expect("compiler runs");
    assert!(
        output.status.success(),
        "header does not compile:\n{}",
        String::from_utf8_lossy(&output.stderr)
    );
}

fn which(name: &str) -> Option<PathBuf> {
    let path = std::env::var_os("PATH")?;
    std::env::split_paths(&path).map(|d| d.join(name)).find(|c| c.is_file())
}
