//! SMT-LIB 2 back end: encode verification conditions, drive an external
//! solver process over standard input/output, and parse verdicts and
//! counterexample models.
//!
//! The solver is deliberately out of process: any executable that reads
//! SMT-LIB on stdin works (`z3 -smt2 -in`, `cvc5 --lang smt2 -`, a shim
//! script). Validity is checked by asserting the hypotheses and the
//! negated goal: `unsat` means the condition is verified, `sat` yields a
//! counterexample model.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Signed;
use thiserror::Error;

use crate::ast::{BType, BinOp, Expr, ExprKind, UnOp};
use crate::interp::Value;
use crate::vcgen::VerificationCondition;

/// How to reach the external solver.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Command template, split on whitespace: executable then arguments.
    /// The process must accept SMT-LIB 2 on standard input.
    pub command: String,
    pub timeout_secs: u64,
    /// SMT-LIB logic name; `ALL` unless a solver needs something narrower.
    pub logic: String,
}

impl SolverConfig {
    pub fn new(command: impl Into<String>, timeout_secs: u64, logic: impl Into<String>) -> Self {
        SolverConfig {
            command: command.into(),
            timeout_secs: timeout_secs.max(1),
            logic: logic.into(),
        }
    }

    fn argv(&self) -> Vec<String> {
        self.command.split_whitespace().map(str::to_string).collect()
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { command: "z3 -smt2 -in".to_string(), timeout_secs: 10, logic: "ALL".to_string() }
    }
}

/// Reason a query came back undecided.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UnknownReason {
    Timeout,
    SolverUnknown,
    SolverError(String),
}

/// Per-condition outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerdictKind {
    /// Negation unsatisfiable: the condition holds.
    Verified,
    /// Counterexample found; the model binds a subset of the binders.
    Falsified(BTreeMap<String, Value>),
    Unknown(UnknownReason),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverVerdict {
    pub kind: VerdictKind,
    pub elapsed_ms: u128,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("cannot run solver `{command}`: {reason}")]
    Unavailable { command: String, reason: String },
    #[error("solver output is not sat/unsat/unknown: {output}")]
    Protocol { output: String },
}

/// Quote symbols the SMT-LIB simple-symbol grammar cannot express; primed
/// havoc symbols like `i'` become `|i'|`.
pub fn smt_symbol(name: &str) -> String {
    if name.contains('\'') {
        format!("|{name}|")
    } else {
        name.to_string()
    }
}

fn smt_int(v: &BigInt) -> String {
    if v.is_negative() {
        format!("(- {})", v.magnitude())
    } else {
        v.to_string()
    }
}

/// Render an expression as an SMT-LIB term. `div`/`mod` map to the
/// theory's own Euclidean operators unchanged.
pub fn expr_to_smt(e: &Expr) -> String {
    match &e.kind {
        ExprKind::IntLit(v) => smt_int(v),
        ExprKind::BoolLit(b) => b.to_string(),
        ExprKind::Var(name) => smt_symbol(name),
        ExprKind::Unary { op, arg } => {
            let arg = expr_to_smt(arg);
            match op {
                UnOp::Neg => format!("(- {arg})"),
                UnOp::Not => format!("(not {arg})"),
            }
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let (l, r) = (expr_to_smt(lhs), expr_to_smt(rhs));
            match op {
                BinOp::Add => format!("(+ {l} {r})"),
                BinOp::Sub => format!("(- {l} {r})"),
                BinOp::Mul => format!("(* {l} {r})"),
                BinOp::Div => format!("(div {l} {r})"),
                BinOp::Mod => format!("(mod {l} {r})"),
                BinOp::Eq => format!("(= {l} {r})"),
                BinOp::Ne => format!("(not (= {l} {r}))"),
                BinOp::Lt => format!("(< {l} {r})"),
                BinOp::Le => format!("(<= {l} {r})"),
                BinOp::Gt => format!("(> {l} {r})"),
                BinOp::Ge => format!("(>= {l} {r})"),
                BinOp::And => format!("(and {l} {r})"),
                BinOp::Or => format!("(or {l} {r})"),
            }
        }
        ExprKind::Ite { cond, then_branch, else_branch } => {
            format!(
                "(ite {} {} {})",
                expr_to_smt(cond),
                expr_to_smt(then_branch),
                expr_to_smt(else_branch)
            )
        }
    }
}

fn smt_sort(ty: BType) -> &'static str {
    match ty {
        BType::Int => "Int",
        BType::Bool => "Bool",
    }
}

/// Emit a complete SMT-LIB 2.6 script refuting `vc`: declarations for the
/// binders, one assert per hypothesis, the negated goal, `check-sat` and
/// `get-model`.
pub fn emit_smtlib(vc: &VerificationCondition, logic: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(set-option :produce-models true)");
    let _ = writeln!(out, "(set-logic {logic})");
    let _ = writeln!(out, "(set-info :vc-name \"{}\")", vc.name);
    for (name, ty) in &vc.binders {
        let _ = writeln!(out, "(declare-const {} {})", smt_symbol(name), smt_sort(*ty));
    }
    for hyp in &vc.hypotheses {
        let _ = writeln!(out, "(assert {})", expr_to_smt(hyp));
    }
    let _ = writeln!(out, "(assert (not {}))", expr_to_smt(&vc.goal));
    let _ = writeln!(out, "(check-sat)");
    let _ = writeln!(out, "(get-model)");
    out
}

/// Raw result of one solver run.
#[derive(Debug)]
pub struct ScriptOutput {
    pub stdout: String,
    pub stderr: String,
    pub elapsed_ms: u128,
    pub timed_out: bool,
}

/// Feed `script` to the configured solver and collect its output,
/// killing the process if it outlives the wall-clock timeout.
pub fn run_script(script: &str, cfg: &SolverConfig) -> Result<ScriptOutput, SolverError> {
    let argv = cfg.argv();
    if argv.is_empty() {
        return Err(SolverError::Unavailable {
            command: cfg.command.clone(),
            reason: "empty solver command".to_string(),
        });
    }
    let start = Instant::now();
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| SolverError::Unavailable { command: cfg.command.clone(), reason: e.to_string() })?;

    // Writer and readers run on their own threads so a full pipe can
    // never deadlock the polling loop.
    let mut stdin = child.stdin.take().expect("piped stdin");
    let script_owned = script.to_string();
    let writer = std::thread::spawn(move || {
        let _ = stdin.write_all(script_owned.as_bytes());
    });
    let mut stdout_pipe = child.stdout.take().expect("piped stdout");
    let stdout_reader = std::thread::spawn(move || {
        let mut buf = String::new();
        let _ = stdout_pipe.read_to_string(&mut buf);
        buf
    });
    let mut stderr_pipe = child.stderr.take().expect("piped stderr");
    let stderr_reader = std::thread::spawn(move || {
        let mut buf = String::new();
        let _ = stderr_pipe.read_to_string(&mut buf);
        buf
    });

    let deadline = start + Duration::from_secs(cfg.timeout_secs);
    let timed_out = loop {
        match child.try_wait() {
            Ok(Some(_)) => break false,
            Ok(None) if Instant::now() >= deadline => {
                let _ = child.kill();
                let _ = child.wait();
                break true;
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(5)),
            Err(e) => {
                let _ = child.kill();
                return Err(SolverError::Unavailable {
                    command: cfg.command.clone(),
                    reason: e.to_string(),
                });
            }
        }
    };

    let _ = writer.join();
    let stdout = stdout_reader.join().unwrap_or_default();
    let stderr = stderr_reader.join().unwrap_or_default();
    Ok(ScriptOutput { stdout, stderr, elapsed_ms: start.elapsed().as_millis(), timed_out })
}

/// Discharge one verification condition: `unsat` → `Verified`, `sat` →
/// `Falsified` with the parsed model, `unknown` → `Unknown`.
pub fn discharge(vc: &VerificationCondition, cfg: &SolverConfig) -> Result<SolverVerdict, SolverError> {
    let script = emit_smtlib(vc, &cfg.logic);
    let output = run_script(&script, cfg)?;
    if output.timed_out {
        return Ok(SolverVerdict {
            kind: VerdictKind::Unknown(UnknownReason::Timeout),
            elapsed_ms: output.elapsed_ms,
        });
    }
    let kind = match output.stdout.lines().map(str::trim).find(|l| !l.is_empty()) {
        Some("unsat") => VerdictKind::Verified,
        Some("sat") => VerdictKind::Falsified(parse_model(&output.stdout, &vc.binders)),
        Some("unknown") => VerdictKind::Unknown(UnknownReason::SolverUnknown),
        _ => {
            return Err(SolverError::Protocol {
                output: format!("{}{}", output.stdout, output.stderr).trim().to_string(),
            })
        }
    };
    Ok(SolverVerdict { kind, elapsed_ms: output.elapsed_ms })
}

/// Discharge a batch, preserving input order in the result regardless of
/// completion order, with at most `jobs` solver processes alive at once.
/// Per-condition failures degrade to `Unknown(SolverError)`.
pub fn prove_all(
    vcs: &[VerificationCondition],
    cfg: &SolverConfig,
    jobs: usize,
) -> Vec<(String, SolverVerdict)> {
    assert!(jobs >= 1, "jobs must be at least 1");
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<SolverVerdict>>> =
        vcs.iter().map(|_| Mutex::new(None)).collect();

    std::thread::scope(|scope| {
        for _ in 0..jobs.min(vcs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= vcs.len() {
                    return;
                }
                let verdict = discharge(&vcs[i], cfg).unwrap_or_else(|e| SolverVerdict {
                    kind: VerdictKind::Unknown(UnknownReason::SolverError(e.to_string())),
                    elapsed_ms: 0,
                });
                *slots[i].lock().expect("verdict slot") = Some(verdict);
            });
        }
    });

    vcs.iter()
        .zip(slots)
        .map(|(vc, slot)| {
            (vc.name.clone(), slot.into_inner().expect("slot lock").expect("worker filled slot"))
        })
        .collect()
}

/// Minimal s-expression reader used for model extraction.
#[derive(Debug, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize_sexp(input: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' | ')' => tokens.push(c.to_string()),
            '|' => {
                let mut sym = String::new();
                for c in chars.by_ref() {
                    if c == '|' {
                        break;
                    }
                    sym.push(c);
                }
                tokens.push(sym);
            }
            '"' => {
                // String literal; consumed but never needed for models.
                let mut lit = String::from("\"");
                for c in chars.by_ref() {
                    lit.push(c);
                    if c == '"' {
                        break;
                    }
                }
                tokens.push(lit);
            }
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            c if c.is_whitespace() => {}
            c => {
                let mut atom = c.to_string();
                while let Some(&next) = chars.peek() {
                    if next.is_whitespace() || next == '(' || next == ')' || next == '|' {
                        break;
                    }
                    atom.push(next);
                    chars.next();
                }
                tokens.push(atom);
            }
        }
    }
    tokens
}

fn parse_sexps(tokens: &[String]) -> Vec<Sexp> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    for token in tokens {
        match token.as_str() {
            "(" => stack.push(Vec::new()),
            ")" => {
                let list = stack.pop().unwrap_or_default();
                match stack.last_mut() {
                    Some(top) => top.push(Sexp::List(list)),
                    None => stack.push(vec![Sexp::List(list)]),
                }
            }
            atom => {
                if let Some(top) = stack.last_mut() {
                    top.push(Sexp::Atom(atom.to_string()));
                }
            }
        }
    }
    stack.pop().unwrap_or_default()
}

fn sexp_value(sexp: &Sexp) -> Option<Value> {
    match sexp {
        Sexp::Atom(a) if a == "true" => Some(Value::Bool(true)),
        Sexp::Atom(a) if a == "false" => Some(Value::Bool(false)),
        Sexp::Atom(a) => a.parse::<BigInt>().ok().map(Value::Int),
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(minus), Sexp::Atom(mag)] if minus == "-" => {
                mag.parse::<BigInt>().ok().map(|v| Value::Int(-v))
            }
            _ => None,
        },
    }
}

fn collect_defines(sexp: &Sexp, out: &mut Vec<(String, String, Value)>) {
    if let Sexp::List(items) = sexp {
        if let [Sexp::Atom(head), Sexp::Atom(name), Sexp::List(args), Sexp::Atom(sort), value] =
            items.as_slice()
        {
            if head == "define-fun" && args.is_empty() {
                if let Some(value) = sexp_value(value) {
                    out.push((name.clone(), sort.clone(), value));
                    return;
                }
            }
        }
        for item in items {
            collect_defines(item, out);
        }
    }
}

/// Extract binder assignments from a solver model. Entries that do not
/// parse, or that disagree with the declared sorts, are omitted.
pub fn parse_model(stdout: &str, binders: &[(String, BType)]) -> BTreeMap<String, Value> {
    let tokens = tokenize_sexp(stdout);
    let sexps = parse_sexps(&tokens);
    let mut defines = Vec::new();
    for sexp in &sexps {
        collect_defines(sexp, &mut defines);
    }
    let mut model = BTreeMap::new();
    for (name, sort, value) in defines {
        let Some((_, declared)) = binders.iter().find(|(b, _)| *b == name) else {
            continue;
        };
        let sort_matches = match declared {
            BType::Int => sort == "Int",
            BType::Bool => sort == "Bool",
        };
        if sort_matches && value.ty() == *declared {
            model.insert(name, value);
        }
    }
    model
}

/// Search `PATH` for an executable.
pub fn find_in_path(name: &str) -> Option<std::path::PathBuf> {
    let path = std::env::var_os("PATH")?;
    for dir in std::env::split_paths(&path) {
        let candidate = dir.join(name);
        if candidate.is_file() {
            return Some(candidate);
        }
    }
    None
}

/// Environment variable naming the solver command template.
pub const SOLVER_ENV: &str = "BOOLE_SOLVER";

/// Resolve the solver command: explicit flag, then `BOOLE_SOLVER`, then
/// well-known solvers on `PATH`.
pub fn resolve_solver_command(flag: Option<&str>) -> Option<String> {
    if let Some(cmd) = flag {
        return Some(cmd.to_string());
    }
    if let Ok(cmd) = std::env::var(SOLVER_ENV) {
        if !cmd.trim().is_empty() {
            return Some(cmd);
        }
    }
    if find_in_path("z3").is_some() {
        return Some("z3 -smt2 -in".to_string());
    }
    if find_in_path("cvc5").is_some() {
        return Some("cvc5 --lang smt2 -".to_string());
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;
    use crate::vcgen::generate_vcs;

    fn loop_simple_vcs() -> Vec<VerificationCondition> {
        let program = parse(include_str!("../../../corpus/valid/loop_simple.bl"), "loop_simple.bl")
            .expect("parse");
        generate_vcs(&program, "loopSimple").expect("vcgen")
    }

    #[test]
    fn entry_invariant_script_shape() {
        let vcs = loop_simple_vcs();
        let script = emit_smtlib(&vcs[0], "ALL");
        assert!(script.contains("(set-logic ALL)"), "{script}");
        assert!(script.contains("(set-info :vc-name \"entry_invariant_0\")"), "{script}");
        assert!(script.contains("(declare-const n Int)"), "{script}");
        assert!(script.contains("(assert (>= n 0))"), "{script}");
        assert!(script.contains("(assert (not (<= 0 n)))"), "{script}");
        assert!(script.contains("(check-sat)"), "{script}");
        assert!(script.contains("(get-model)"), "{script}");
    }

    #[test]
    fn true_goal_is_negated_literally() {
        let vc = VerificationCondition {
            name: "trivial".to_string(),
            kind: crate::vcgen::VcKind::Assert("trivial".to_string()),
            binders: vec![],
            hypotheses: vec![],
            goal: Expr::boolean(true),
            origin: crate::span::Span::synthetic(),
        };
        let script = emit_smtlib(&vc, "ALL");
        assert!(script.contains("(assert (not true))"), "{script}");
    }

    #[test]
    fn primed_binders_are_quoted() {
        let vcs = loop_simple_vcs();
        let script = emit_smtlib(&vcs[1], "ALL");
        assert!(script.contains("(declare-const |sum'| Int)"), "{script}");
        assert!(script.contains("(declare-const |i'| Int)"), "{script}");
    }

    #[test]
    fn negative_literals_use_prefix_minus() {
        let e = Expr::binary(BinOp::Add, Expr::var("x"), Expr::int(-3));
        assert_eq!(expr_to_smt(&e), "(+ x (- 3))");
        let e = Expr::unary(UnOp::Neg, Expr::var("x"));
        assert_eq!(expr_to_smt(&e), "(- x)");
    }

    #[test]
    fn model_parsing_handles_both_model_layouts() {
        let binders = vec![
            ("n".to_string(), BType::Int),
            ("sum'".to_string(), BType::Int),
            ("b".to_string(), BType::Bool),
        ];
        // Old-style wrapped in `model`, negative value, quoted symbol.
        let old = "sat\n(model\n  (define-fun n () Int (- 4))\n  (define-fun |sum'| () Int 3)\n)";
        let model = parse_model(old, &binders);
        assert_eq!(model["n"], Value::Int(BigInt::from(-4)));
        assert_eq!(model["sum'"], Value::Int(BigInt::from(3)));
        // Bare list form, plus an entry that is not a binder and one with
        // the wrong sort, both omitted.
        let bare = "sat\n(\n  (define-fun b () Bool true)\n  (define-fun stray () Int 1)\n  (define-fun n () Bool false)\n)";
        let model = parse_model(bare, &binders);
        assert_eq!(model.len(), 1);
        assert_eq!(model["b"], Value::Bool(true));
    }

    #[test]
    fn unavailable_solver_is_reported() {
        let cfg = SolverConfig::new("definitely-not-a-solver-binary --flag", 1, "ALL");
        let vcs = loop_simple_vcs();
        let err = discharge(&vcs[0], &cfg).unwrap_err();
        assert!(matches!(err, SolverError::Unavailable { .. }), "{err}");
        // prove_all degrades the same failure to Unknown(SolverError).
        let report = prove_all(&vcs, &cfg, 2);
        assert_eq!(report.len(), vcs.len());
        assert!(report.iter().all(|(_, v)| matches!(
            v.kind,
            VerdictKind::Unknown(UnknownReason::SolverError(_))
        )));
    }

    #[test]
    fn prove_all_on_empty_list_is_empty() {
        let cfg = SolverConfig::default();
        assert!(prove_all(&[], &cfg, 4).is_empty());
    }

    #[test]
    fn config_clamps_timeout_to_at_least_one_second() {
        assert_eq!(SolverConfig::new("z3", 0, "ALL").timeout_secs, 1);
    }
}
