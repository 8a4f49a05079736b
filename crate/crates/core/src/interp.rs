//! Concrete big-step evaluator for Boole procedures.
//!
//! Evaluation is over unbounded integers with Euclidean `div`/`mod` (the
//! remainder is always in `[0, |divisor|)`), matching the encoding the
//! SMT back-end uses, so the interpreter and the verifier agree on every
//! defined term. Requires clauses and asserts are always checked;
//! invariant checking is opt-in. Uninitialized locals are havocked from a
//! seeded generator, mirroring the verifier's view of locals as
//! unconstrained symbols.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ast::{BType, BinOp, Expr, ExprKind, Program, Stmt, StmtKind, UnOp, TIME_VAR};
use crate::span::Span;

/// A runtime value: a mathematical integer or a truth value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
}

impl Value {
    pub fn ty(&self) -> BType {
        match self {
            Value::Int(_) => BType::Int,
            Value::Bool(_) => BType::Bool,
        }
    }

    fn as_int(&self) -> &BigInt {
        match self {
            Value::Int(v) => v,
            Value::Bool(_) => unreachable!("type checker admits only int operands here"),
        }
    }

    fn as_bool(&self) -> bool {
        match self {
            Value::Bool(b) => *b,
            Value::Int(_) => unreachable!("type checker admits only bool operands here"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Variable bindings during execution.
pub type Env = BTreeMap<String, Value>;

/// Euclidean quotient: `a = b*q + r` with `0 <= r < |b|`.
pub fn euclidean_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if r.is_negative() {
        q + 1
    } else {
        q
    }
}

/// Euclidean remainder, always in `[0, |b|)`.
pub fn euclidean_mod(a: &BigInt, b: &BigInt) -> BigInt {
    let r = a.mod_floor(b);
    if r.is_negative() {
        r - b
    } else {
        r
    }
}

#[derive(Debug, Error, Clone)]
pub enum EvalError {
    #[error("{span}: division by zero")]
    DivisionByZero { span: Span },
}

/// Evaluate a well-typed expression under `env`, which must bind every
/// free variable of `e`.
pub fn eval_expr(e: &Expr, env: &Env) -> Result<Value, EvalError> {
    match &e.kind {
        ExprKind::IntLit(v) => Ok(Value::Int(v.clone())),
        ExprKind::BoolLit(b) => Ok(Value::Bool(*b)),
        ExprKind::Var(name) => Ok(env
            .get(name)
            .unwrap_or_else(|| panic!("unbound variable `{name}`: caller must close the environment"))
            .clone()),
        ExprKind::Unary { op, arg } => {
            let v = eval_expr(arg, env)?;
            Ok(match op {
                UnOp::Neg => Value::Int(-v.as_int()),
                UnOp::Not => Value::Bool(!v.as_bool()),
            })
        }
        ExprKind::Binary { op, lhs, rhs } => {
            // && and || short-circuit; everything else is strict.
            match op {
                BinOp::And => {
                    return Ok(Value::Bool(
                        eval_expr(lhs, env)?.as_bool() && eval_expr(rhs, env)?.as_bool(),
                    ))
                }
                BinOp::Or => {
                    return Ok(Value::Bool(
                        eval_expr(lhs, env)?.as_bool() || eval_expr(rhs, env)?.as_bool(),
                    ))
                }
                _ => {}
            }
            let l = eval_expr(lhs, env)?;
            let r = eval_expr(rhs, env)?;
            Ok(match op {
                BinOp::Add => Value::Int(l.as_int() + r.as_int()),
                BinOp::Sub => Value::Int(l.as_int() - r.as_int()),
                BinOp::Mul => Value::Int(l.as_int() * r.as_int()),
                BinOp::Div | BinOp::Mod => {
                    if r.as_int().is_zero() {
                        return Err(EvalError::DivisionByZero { span: e.span.clone() });
                    }
                    if *op == BinOp::Div {
                        Value::Int(euclidean_div(l.as_int(), r.as_int()))
                    } else {
                        Value::Int(euclidean_mod(l.as_int(), r.as_int()))
                    }
                }
                BinOp::Eq => Value::Bool(l == r),
                BinOp::Ne => Value::Bool(l != r),
                BinOp::Lt => Value::Bool(l.as_int() < r.as_int()),
                BinOp::Le => Value::Bool(l.as_int() <= r.as_int()),
                BinOp::Gt => Value::Bool(l.as_int() > r.as_int()),
                BinOp::Ge => Value::Bool(l.as_int() >= r.as_int()),
                BinOp::And | BinOp::Or => unreachable!("handled above"),
            })
        }
        ExprKind::Ite { cond, then_branch, else_branch } => {
            if eval_expr(cond, env)?.as_bool() {
                eval_expr(then_branch, env)
            } else {
                eval_expr(else_branch, env)
            }
        }
    }
}

/// What kind of runtime check produced a [`CheckRecord`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Requires,
    Assert,
    InvariantEntry,
    InvariantIteration,
}

/// One evaluated runtime check. Only passed checks appear in an
/// [`ExecResult`]; a failed check aborts execution with the corresponding
/// error, which carries the same information.
#[derive(Debug, Clone)]
pub struct CheckRecord {
    pub kind: CheckKind,
    /// Assert label, or a description for spec-level checks.
    pub name: String,
    pub span: Span,
    pub passed: bool,
}

/// Outcome of a completed execution.
#[derive(Debug, Clone)]
pub struct ExecResult {
    /// Final value of each return variable, keyed by name.
    pub returns: BTreeMap<String, Value>,
    /// Total cost accumulated by `tick` statements.
    pub ticks: BigUint,
    pub checks: Vec<CheckRecord>,
}

#[derive(Debug, Error, Clone)]
pub enum ExecError {
    #[error("{span}: requires clause `{clause}` does not hold for these arguments")]
    RequiresViolation { clause: String, span: Span },
    #[error("{span}: assertion `{label}` failed")]
    AssertFailure { label: String, span: Span },
    #[error("{span}: loop invariant does not hold {when}")]
    InvariantFailure { when: &'static str, span: Span },
    #[error("{span}: division by zero")]
    DivisionByZero { span: Span },
    #[error("{span}: tick amount {amount} is negative")]
    NegativeTick { amount: BigInt, span: Span },
    #[error("execution exceeded {max_steps} loop iterations")]
    NonTermination { max_steps: u64 },
    #[error("{span}: assume clause does not hold; run blocked")]
    Blocked { span: Span },
}

impl From<EvalError> for ExecError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::DivisionByZero { span } => ExecError::DivisionByZero { span },
        }
    }
}

/// Knobs for [`exec_procedure`].
#[derive(Debug, Clone)]
pub struct ExecOptions {
    /// Evaluate loop invariants at entry and after every iteration.
    pub check_invariants: bool,
    /// Abort with `NonTermination` after this many loop iterations.
    pub max_steps: u64,
    /// Seed for havocking uninitialized locals.
    pub seed: u64,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions { check_invariants: false, max_steps: 1_000_000, seed: 0 }
    }
}

/// Havoc range for uninitialized integer locals. Small enough that seeded
/// runs regularly hit boundary values, wide enough to shake out wrong
/// programs.
const HAVOC_MAGNITUDE: i64 = 16;

struct Machine<'a> {
    env: Env,
    ticks: BigUint,
    steps: u64,
    opts: &'a ExecOptions,
    checks: Vec<CheckRecord>,
}

impl<'a> Machine<'a> {
    fn eval(&mut self, e: &Expr) -> Result<Value, ExecError> {
        // Keep the ghost clock visible to expressions.
        self.env.insert(TIME_VAR.to_string(), Value::Int(BigInt::from(self.ticks.clone())));
        Ok(eval_expr(e, &self.env)?)
    }

    fn check(
        &mut self,
        kind: CheckKind,
        name: &str,
        cond: &Expr,
        span: &Span,
    ) -> Result<bool, ExecError> {
        let passed = self.eval(cond)?.as_bool();
        self.checks.push(CheckRecord {
            kind,
            name: name.to_string(),
            span: span.clone(),
            passed,
        });
        Ok(passed)
    }

    fn run_block(&mut self, body: &[Stmt]) -> Result<(), ExecError> {
        for stmt in body {
            self.run_stmt(stmt)?;
        }
        Ok(())
    }

    fn run_stmt(&mut self, stmt: &Stmt) -> Result<(), ExecError> {
        match &stmt.kind {
            // Locals are bound (havocked) at procedure entry; the
            // declaration itself does nothing at runtime.
            StmtKind::VarDecl { .. } => Ok(()),
            StmtKind::Assign { target, rhs } => {
                let value = self.eval(rhs)?;
                self.env.insert(target.clone(), value);
                Ok(())
            }
            StmtKind::While { guard, invariants, body } => {
                if self.opts.check_invariants {
                    for inv in invariants {
                        if !self.check(CheckKind::InvariantEntry, "invariant", inv, &inv.span)? {
                            return Err(ExecError::InvariantFailure {
                                when: "at loop entry",
                                span: inv.span.clone(),
                            });
                        }
                    }
                }
                while self.eval(guard)?.as_bool() {
                    self.steps += 1;
                    if self.steps > self.opts.max_steps {
                        return Err(ExecError::NonTermination { max_steps: self.opts.max_steps });
                    }
                    self.run_block(body)?;
                    if self.opts.check_invariants {
                        for inv in invariants {
                            if !self.check(
                                CheckKind::InvariantIteration,
                                "invariant",
                                inv,
                                &inv.span,
                            )? {
                                return Err(ExecError::InvariantFailure {
                                    when: "after an iteration",
                                    span: inv.span.clone(),
                                });
                            }
                        }
                    }
                }
                Ok(())
            }
            StmtKind::If { cond, then_body, else_body } => {
                if self.eval(cond)?.as_bool() {
                    self.run_block(then_body)
                } else {
                    self.run_block(else_body)
                }
            }
            StmtKind::Assert { label, cond } => {
                if !self.check(CheckKind::Assert, label, cond, &stmt.span)? {
                    return Err(ExecError::AssertFailure {
                        label: label.clone(),
                        span: stmt.span.clone(),
                    });
                }
                Ok(())
            }
            StmtKind::Assume { cond } => {
                if !self.eval(cond)?.as_bool() {
                    return Err(ExecError::Blocked { span: stmt.span.clone() });
                }
                Ok(())
            }
            StmtKind::Tick { amount } => {
                let v = self.eval(amount)?;
                let v = v.as_int();
                if v.is_negative() {
                    return Err(ExecError::NegativeTick {
                        amount: v.clone(),
                        span: stmt.span.clone(),
                    });
                }
                self.ticks += v.to_biguint().expect("checked nonnegative");
                Ok(())
            }
        }
    }
}

/// Run `proc_name` on `args`, which must bind exactly the parameters with
/// type-correct values. Returns the final return-variable values, the
/// accumulated tick count, and every check that was evaluated.
pub fn exec_procedure(
    program: &Program,
    proc_name: &str,
    args: &BTreeMap<String, Value>,
    opts: &ExecOptions,
) -> Result<ExecResult, ExecError> {
    let proc = program
        .procedure(proc_name)
        .unwrap_or_else(|| panic!("unknown procedure `{proc_name}`"));
    debug_assert!(
        proc.params.iter().all(|(name, ty)| args.get(name).map(Value::ty) == Some(*ty))
            && args.len() == proc.params.len(),
        "arguments must bind exactly the parameters"
    );

    let mut env: Env = args.clone();
    // Returns and locals start havocked: the verifier treats them as
    // unconstrained symbols, so the oracle must not be more forgiving.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for (name, ty) in proc.returns.iter().chain(&proc.locals()) {
        let value = match ty {
            BType::Int => Value::Int(BigInt::from(rng.gen_range(-HAVOC_MAGNITUDE..=HAVOC_MAGNITUDE))),
            BType::Bool => Value::Bool(rng.gen()),
        };
        env.insert(name.clone(), value);
    }

    let mut machine = Machine { env, ticks: BigUint::zero(), steps: 0, opts, checks: Vec::new() };

    for clause in &proc.spec.requires {
        if !machine.check(CheckKind::Requires, "requires", clause, &clause.span)? {
            return Err(ExecError::RequiresViolation {
                clause: crate::pretty::expr_to_string(clause),
                span: clause.span.clone(),
            });
        }
    }

    machine.run_block(&proc.body)?;

    let returns = proc
        .returns
        .iter()
        .map(|(name, _)| (name.clone(), machine.env[name].clone()))
        .collect();
    Ok(ExecResult { returns, ticks: machine.ticks, checks: machine.checks })
}

/// [`exec_procedure`] with default options: asserts checked, invariants
/// not, tick costs accumulated.
pub fn run_with_cost(
    program: &Program,
    proc_name: &str,
    args: &BTreeMap<String, Value>,
) -> Result<ExecResult, ExecError> {
    exec_procedure(program, proc_name, args, &ExecOptions::default())
}
