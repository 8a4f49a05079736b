//! Implementations of the `boole` subcommands. The thin argument parser
//! lives in the binary; everything here takes plain values so the logic
//! is callable from tests.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;

use crate::ast::{typecheck, BType, Program};
use crate::interp::{exec_procedure, ExecError, ExecOptions, Value};
use crate::parser::parse;
use crate::pretty::pretty;
use crate::smt::{prove_all, resolve_solver_command, SolverConfig, UnknownReason, VerdictKind};
use crate::vcgen::{generate_vcs, pretty_vc};

/// Process exit code contract: 0 success/all-verified, 1 falsified or
/// runtime check failure, 2 usage/parse/type error, 3 undecided.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success,
    Failed,
    Usage,
    Undecided,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Failed => 1,
            ExitStatus::Usage => 2,
            ExitStatus::Undecided => 3,
        }
    }
}

fn load_program(file: &Path) -> Result<Program, ExitStatus> {
    let source = match std::fs::read_to_string(file) {
        Ok(source) => source,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", file.display());
            return Err(ExitStatus::Usage);
        }
    };
    let program = match parse(&source, &file.display().to_string()) {
        Ok(program) => program,
        Err(diags) => {
            for diag in diags {
                eprintln!("{diag}");
            }
            return Err(ExitStatus::Usage);
        }
    };
    let diags = typecheck(&program);
    if !diags.is_empty() {
        for diag in diags {
            eprintln!("{diag}");
        }
        return Err(ExitStatus::Usage);
    }
    Ok(program)
}

/// `boole parse FILE`: parse and type-check, then print the program back
/// in canonical form.
pub fn cmd_parse(file: &Path) -> ExitStatus {
    match load_program(file) {
        Ok(program) => {
            print!("{}", pretty(&program));
            ExitStatus::Success
        }
        Err(status) => status,
    }
}

fn select_procedures<'a>(
    program: &'a Program,
    requested: Option<&'a str>,
) -> Result<Vec<&'a str>, ExitStatus> {
    match requested {
        Some(name) => {
            if program.procedure(name).is_none() {
                eprintln!("error: procedure `{name}` does not exist");
                return Err(ExitStatus::Usage);
            }
            Ok(vec![name])
        }
        None => Ok(program.procedures.iter().map(|p| p.name.as_str()).collect()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VcFormat {
    Pretty,
    Smt2,
}

pub struct VcsOptions {
    pub procedure: Option<String>,
    pub format: VcFormat,
    pub out_dir: Option<PathBuf>,
}

/// `boole vcs FILE`: print the verification conditions, or write one
/// `.smt2` file per condition.
pub fn cmd_vcs(file: &Path, opts: &VcsOptions) -> ExitStatus {
    let program = match load_program(file) {
        Ok(program) => program,
        Err(status) => return status,
    };
    let procedures = match select_procedures(&program, opts.procedure.as_deref()) {
        Ok(list) => list,
        Err(status) => return status,
    };
    for proc_name in procedures {
        let vcs = match generate_vcs(&program, proc_name) {
            Ok(vcs) => vcs,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitStatus::Usage;
            }
        };
        match opts.format {
            VcFormat::Pretty => {
                for vc in &vcs {
                    println!("{}", pretty_vc(vc));
                }
            }
            VcFormat::Smt2 => {
                let dir = opts.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
                if let Err(e) = std::fs::create_dir_all(&dir) {
                    eprintln!("error: cannot create {}: {e}", dir.display());
                    return ExitStatus::Usage;
                }
                for vc in &vcs {
                    let path = dir.join(format!("{proc_name}.{}.smt2", vc.name));
                    let script = crate::smt::emit_smtlib(vc, "ALL");
                    if let Err(e) = std::fs::write(&path, script) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitStatus::Usage;
                    }
                    println!("wrote {}", path.display());
                }
            }
        }
    }
    ExitStatus::Success
}

pub struct ProveOptions {
    pub procedure: Option<String>,
    pub solver: Option<String>,
    pub timeout_secs: u64,
    pub jobs: usize,
    pub no_timing: bool,
}

/// `boole prove FILE`: generate and discharge every verification
/// condition, one verdict line per condition.
pub fn cmd_prove(file: &Path, opts: &ProveOptions) -> ExitStatus {
    let program = match load_program(file) {
        Ok(program) => program,
        Err(status) => return status,
    };
    let procedures = match select_procedures(&program, opts.procedure.as_deref()) {
        Ok(list) => list,
        Err(status) => return status,
    };
    let Some(command) = resolve_solver_command(opts.solver.as_deref()) else {
        eprintln!(
            "error: no SMT solver configured; pass --solver, set {}, or install z3/cvc5",
            crate::smt::SOLVER_ENV
        );
        return ExitStatus::Usage;
    };
    let cfg = SolverConfig::new(command, opts.timeout_secs, "ALL");

    let mut any_falsified = false;
    let mut any_unknown = false;
    let multiple = procedures.len() > 1;
    for proc_name in procedures {
        let vcs = match generate_vcs(&program, proc_name) {
            Ok(vcs) => vcs,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitStatus::Usage;
            }
        };
        if multiple {
            println!("procedure {proc_name}:");
        }
        for (name, verdict) in prove_all(&vcs, &cfg, opts.jobs) {
            let timing =
                if opts.no_timing { String::new() } else { format!(" ({} ms)", verdict.elapsed_ms) };
            match &verdict.kind {
                VerdictKind::Verified => println!("{name}: verified{timing}"),
                VerdictKind::Falsified(model) => {
                    any_falsified = true;
                    println!("{name}: falsified{timing}");
                    for (var, value) in model {
                        println!("  {var} = {value}");
                    }
                }
                VerdictKind::Unknown(reason) => {
                    any_unknown = true;
                    println!("{name}: unknown{timing}");
                    match reason {
                        UnknownReason::Timeout => println!("  reason: timeout"),
                        UnknownReason::SolverUnknown => println!("  reason: solver answered unknown"),
                        UnknownReason::SolverError(e) => println!("  reason: {e}"),
                    }
                }
            }
        }
    }
    if any_falsified {
        ExitStatus::Failed
    } else if any_unknown {
        ExitStatus::Undecided
    } else {
        ExitStatus::Success
    }
}

pub struct RunOptions {
    pub procedure: String,
    pub args: Option<String>,
    pub check_invariants: bool,
    pub seed: u64,
    pub max_steps: u64,
}

/// Parse a `name=value,...` argument binding against a parameter list:
/// every parameter must be bound exactly once with a value of its type.
pub fn parse_argument_bindings(
    spec: &str,
    params: &[(String, BType)],
) -> Result<BTreeMap<String, Value>, String> {
    let mut bindings = BTreeMap::new();
    for pair in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let Some((name, raw)) = pair.split_once('=') else {
            return Err(format!("malformed binding `{pair}`; expected name=value"));
        };
        let (name, raw) = (name.trim(), raw.trim());
        let Some((_, ty)) = params.iter().find(|(p, _)| p == name) else {
            return Err(format!("`{name}` is not a parameter"));
        };
        let value = match ty {
            BType::Int => raw
                .parse::<BigInt>()
                .map(Value::Int)
                .map_err(|_| format!("`{raw}` is not an integer (binding `{pair}`)"))?,
            BType::Bool => match raw {
                "true" => Value::Bool(true),
                "false" => Value::Bool(false),
                _ => return Err(format!("`{raw}` is not a boolean (binding `{pair}`)")),
            },
        };
        if bindings.insert(name.to_string(), value).is_some() {
            return Err(format!("`{name}` is bound twice"));
        }
    }
    for (name, _) in params {
        if !bindings.contains_key(name) {
            return Err(format!("missing binding for parameter `{name}`"));
        }
    }
    Ok(bindings)
}

/// `boole run FILE --proc NAME --args "x=1,..."`: execute concretely and
/// report return values and tick cost.
pub fn cmd_run(file: &Path, opts: &RunOptions) -> ExitStatus {
    let program = match load_program(file) {
        Ok(program) => program,
        Err(status) => return status,
    };
    let Some(proc) = program.procedure(&opts.procedure) else {
        eprintln!("error: procedure `{}` does not exist", opts.procedure);
        return ExitStatus::Usage;
    };
    let args = match parse_argument_bindings(opts.args.as_deref().unwrap_or(""), &proc.params) {
        Ok(args) => args,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitStatus::Usage;
        }
    };
    let exec_opts = ExecOptions {
        check_invariants: opts.check_invariants,
        max_steps: opts.max_steps,
        seed: opts.seed,
    };
    match exec_procedure(&program, &opts.procedure, &args, &exec_opts) {
        Ok(result) => {
            for (name, _) in &proc.returns {
                println!("{name} = {}", result.returns[name]);
            }
            println!("ticks = {}", result.ticks);
            ExitStatus::Success
        }
        Err(ExecError::Blocked { span }) => {
            println!("run blocked by assume at {span}");
            ExitStatus::Success
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitStatus::Failed
        }
    }
}
