//! Syntax trees for the Boole dialect, together with static typing and
//! well-formedness checking.
//!
//! Programs are immutable after construction; `typecheck` is a pure
//! function from a `Program` to a list of diagnostics (empty means
//! well-typed). Equality on expressions and statements is structural and
//! ignores source spans.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;

use crate::span::{Diagnostic, DiagnosticCode, Span};

/// Reserved ghost variable tracking accumulated tick cost. It may be read
/// in procedure bodies, invariants and `ensures` clauses, but never
/// declared or assigned.
pub const TIME_VAR: &str = "__time";

/// The two sorts of the language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BType {
    Int,
    Bool,
}

impl fmt::Display for BType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BType::Int => f.write_str("int"),
            BType::Bool => f.write_str("bool"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Not,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    /// Surface spelling of the operator.
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "div",
            BinOp::Mod => "mod",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    /// Int × Int → Int operators.
    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div | BinOp::Mod)
    }

    /// Int × Int → Bool operators.
    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }

    /// Homogeneous T × T → Bool operators.
    pub fn is_equality(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne)
    }

    /// Bool × Bool → Bool operators.
    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or)
    }
}

/// A typed expression over mathematical integers and booleans.
///
/// Structural equality ignores spans: two expressions compare equal when
/// their kinds (and recursively their children) match.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    IntLit(BigInt),
    BoolLit(bool),
    Var(String),
    Unary { op: UnOp, arg: Box<Expr> },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    Ite { cond: Box<Expr>, then_branch: Box<Expr>, else_branch: Box<Expr> },
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Expr {}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Self {
        Expr { kind, span }
    }

    pub fn int(value: impl Into<BigInt>) -> Self {
        Expr::new(ExprKind::IntLit(value.into()), Span::synthetic())
    }

    pub fn boolean(value: bool) -> Self {
        Expr::new(ExprKind::BoolLit(value), Span::synthetic())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expr::new(ExprKind::Var(name.into()), Span::synthetic())
    }

    pub fn unary(op: UnOp, arg: Expr) -> Self {
        let span = arg.span.clone();
        Expr::new(ExprKind::Unary { op, arg: Box::new(arg) }, span)
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        let span = lhs.span.merge(&rhs.span);
        Expr::new(ExprKind::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }, span)
    }

    pub fn ite(cond: Expr, then_branch: Expr, else_branch: Expr) -> Self {
        let span = cond.span.clone();
        Expr::new(
            ExprKind::Ite {
                cond: Box::new(cond),
                then_branch: Box::new(then_branch),
                else_branch: Box::new(else_branch),
            },
            span,
        )
    }

    pub fn as_int_lit(&self) -> Option<&BigInt> {
        match &self.kind {
            ExprKind::IntLit(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_bool_lit(&self) -> Option<bool> {
        match &self.kind {
            ExprKind::BoolLit(b) => Some(*b),
            _ => None,
        }
    }
}

/// Exactly the variables occurring syntactically in `e`.
pub fn free_vars(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_vars(e, &mut out);
    out
}

pub(crate) fn collect_vars(e: &Expr, out: &mut BTreeSet<String>) {
    match &e.kind {
        ExprKind::IntLit(_) | ExprKind::BoolLit(_) => {}
        ExprKind::Var(name) => {
            out.insert(name.clone());
        }
        ExprKind::Unary { arg, .. } => collect_vars(arg, out),
        ExprKind::Binary { lhs, rhs, .. } => {
            collect_vars(lhs, out);
            collect_vars(rhs, out);
        }
        ExprKind::Ite { cond, then_branch, else_branch } => {
            collect_vars(cond, out);
            collect_vars(then_branch, out);
            collect_vars(else_branch, out);
        }
    }
}

/// A statement in a procedure body. Equality ignores spans.
#[derive(Debug, Clone)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    VarDecl { name: String, ty: BType },
    Assign { target: String, rhs: Expr },
    While { guard: Expr, invariants: Vec<Expr>, body: Vec<Stmt> },
    If { cond: Expr, then_body: Vec<Stmt>, else_body: Vec<Stmt> },
    Assert { label: String, cond: Expr },
    Assume { cond: Expr },
    Tick { amount: Expr },
}

impl PartialEq for Stmt {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for Stmt {}

impl Stmt {
    pub fn new(kind: StmtKind, span: Span) -> Self {
        Stmt { kind, span }
    }
}

/// Procedure contract: preconditions over parameters, postconditions over
/// parameters and return variables.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Spec {
    pub requires: Vec<Expr>,
    pub ensures: Vec<Expr>,
}

#[derive(Debug, Clone)]
pub struct Procedure {
    pub name: String,
    pub params: Vec<(String, BType)>,
    pub returns: Vec<(String, BType)>,
    pub spec: Spec,
    pub body: Vec<Stmt>,
    pub span: Span,
}

impl Eq for Procedure {}

impl PartialEq for Procedure {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.params == other.params
            && self.returns == other.returns
            && self.spec == other.spec
            && self.body == other.body
    }
}

impl Procedure {
    /// Local declarations in document order, recursing into nested blocks.
    pub fn locals(&self) -> Vec<(String, BType)> {
        let mut out = Vec::new();
        collect_locals(&self.body, &mut out);
        out
    }

    /// Declared type of every variable in scope for this procedure:
    /// parameters, return variables and locals.
    pub fn var_types(&self) -> BTreeMap<String, BType> {
        let mut out = BTreeMap::new();
        for (name, ty) in self.params.iter().chain(&self.returns).chain(&self.locals()) {
            out.insert(name.clone(), *ty);
        }
        out
    }
}

fn collect_locals(body: &[Stmt], out: &mut Vec<(String, BType)>) {
    for stmt in body {
        match &stmt.kind {
            StmtKind::VarDecl { name, ty } => out.push((name.clone(), *ty)),
            StmtKind::While { body, .. } => collect_locals(body, out),
            StmtKind::If { then_body, else_body, .. } => {
                collect_locals(then_body, out);
                collect_locals(else_body, out);
            }
            _ => {}
        }
    }
}

/// The dialect name every source file must declare.
pub const DIALECT: &str = "Boole";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub dialect: String,
    pub procedures: Vec<Procedure>,
}

impl Program {
    pub fn empty() -> Self {
        Program { dialect: DIALECT.to_string(), procedures: Vec::new() }
    }

    pub fn procedure(&self, name: &str) -> Option<&Procedure> {
        self.procedures.iter().find(|p| p.name == name)
    }
}

/// Infer the type of `e` under a variable typing context. Returns `None`
/// when `e` is ill-typed or mentions a variable absent from `ctx`.
pub fn type_of(e: &Expr, ctx: &BTreeMap<String, BType>) -> Option<BType> {
    match &e.kind {
        ExprKind::IntLit(_) => Some(BType::Int),
        ExprKind::BoolLit(_) => Some(BType::Bool),
        ExprKind::Var(name) => ctx.get(name).copied(),
        ExprKind::Unary { op: UnOp::Neg, arg } => {
            (type_of(arg, ctx)? == BType::Int).then_some(BType::Int)
        }
        ExprKind::Unary { op: UnOp::Not, arg } => {
            (type_of(arg, ctx)? == BType::Bool).then_some(BType::Bool)
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let (l, r) = (type_of(lhs, ctx)?, type_of(rhs, ctx)?);
            if op.is_arith() {
                (l == BType::Int && r == BType::Int).then_some(BType::Int)
            } else if op.is_comparison() {
                (l == BType::Int && r == BType::Int).then_some(BType::Bool)
            } else if op.is_equality() {
                (l == r).then_some(BType::Bool)
            } else {
                (l == BType::Bool && r == BType::Bool).then_some(BType::Bool)
            }
        }
        ExprKind::Ite { cond, then_branch, else_branch } => {
            if type_of(cond, ctx)? != BType::Bool {
                return None;
            }
            let (t, e) = (type_of(then_branch, ctx)?, type_of(else_branch, ctx)?);
            (t == e).then_some(t)
        }
    }
}

/// Where an expression is being checked; controls which variables are in
/// scope and what the expected type is.
#[derive(Clone, Copy, PartialEq)]
enum ExprPosition {
    /// Body expression: everything in scope so far, plus `__time`.
    Body,
    /// `requires` clause: parameters only.
    Requires,
    /// `ensures` clause: parameters, returns and `__time`.
    Ensures,
}

struct ProcChecker<'a> {
    proc: &'a Procedure,
    /// Declared type per name, over params, returns and all locals.
    types: BTreeMap<String, BType>,
    /// Names visible at the current point of the document-order walk.
    visible: BTreeSet<String>,
    diags: Vec<Diagnostic>,
}

impl<'a> ProcChecker<'a> {
    fn new(proc: &'a Procedure) -> Self {
        ProcChecker { proc, types: BTreeMap::new(), visible: BTreeSet::new(), diags: Vec::new() }
    }

    fn error(&mut self, code: DiagnosticCode, message: String, span: &Span) {
        self.diags.push(Diagnostic::error(code, message, span.clone()));
    }

    fn declare(&mut self, name: &str, ty: BType, span: &Span, what: &str) {
        if name == TIME_VAR {
            self.error(
                DiagnosticCode::ReservedIdentifier,
                format!("`{TIME_VAR}` is reserved and cannot be declared"),
                span,
            );
            return;
        }
        if self.types.contains_key(name) {
            self.error(
                DiagnosticCode::DuplicateDeclaration,
                format!("{what} `{name}` conflicts with an earlier declaration"),
                span,
            );
            return;
        }
        self.types.insert(name.to_string(), ty);
        self.visible.insert(name.to_string());
    }

    fn run(mut self) -> Vec<Diagnostic> {
        let proc = self.proc;
        for (name, ty) in &proc.params {
            self.declare(name, *ty, &proc.span, "parameter");
        }
        for (name, ty) in &proc.returns {
            self.declare(name, *ty, &proc.span, "return variable");
        }
        // Locals become visible at their declaration, during the body walk.
        for clause in &proc.spec.requires {
            self.check_expr(clause, Some(BType::Bool), ExprPosition::Requires);
        }
        for clause in &proc.spec.ensures {
            self.check_expr(clause, Some(BType::Bool), ExprPosition::Ensures);
        }
        let mut labels = BTreeSet::new();
        self.check_block(&proc.body, &mut labels);
        self.diags
    }

    fn check_block(&mut self, body: &[Stmt], labels: &mut BTreeSet<String>) {
        for stmt in body {
            match &stmt.kind {
                StmtKind::VarDecl { name, ty } => {
                    self.declare(name, *ty, &stmt.span, "local");
                }
                StmtKind::Assign { target, rhs } => {
                    let expected = self.check_assign_target(target, &stmt.span);
                    self.check_expr(rhs, expected, ExprPosition::Body);
                }
                StmtKind::While { guard, invariants, body } => {
                    self.check_expr(guard, Some(BType::Bool), ExprPosition::Body);
                    for inv in invariants {
                        self.check_expr(inv, Some(BType::Bool), ExprPosition::Body);
                    }
                    self.check_block(body, labels);
                }
                StmtKind::If { cond, then_body, else_body } => {
                    self.check_expr(cond, Some(BType::Bool), ExprPosition::Body);
                    self.check_block(then_body, labels);
                    self.check_block(else_body, labels);
                }
                StmtKind::Assert { label, cond } => {
                    if !labels.insert(label.clone()) {
                        self.error(
                            DiagnosticCode::DuplicateLabel,
                            format!("assert label `{label}` is used more than once"),
                            &stmt.span,
                        );
                    }
                    self.check_expr(cond, Some(BType::Bool), ExprPosition::Body);
                }
                StmtKind::Assume { cond } => {
                    self.check_expr(cond, Some(BType::Bool), ExprPosition::Body);
                }
                StmtKind::Tick { amount } => {
                    self.check_expr(amount, Some(BType::Int), ExprPosition::Body);
                }
            }
        }
    }

    fn check_assign_target(&mut self, target: &str, span: &Span) -> Option<BType> {
        if target == TIME_VAR {
            self.error(
                DiagnosticCode::ReservedIdentifier,
                format!("`{TIME_VAR}` is updated by `tick` and cannot be assigned"),
                span,
            );
            return None;
        }
        if self.proc.params.iter().any(|(p, _)| p == target) {
            self.error(
                DiagnosticCode::AssignToParameter,
                format!("parameter `{target}` is immutable"),
                span,
            );
            return self.types.get(target).copied();
        }
        match self.types.get(target) {
            Some(ty) if self.visible.contains(target) => Some(*ty),
            _ => {
                self.error(
                    DiagnosticCode::UndeclaredVariable,
                    format!("assignment to undeclared variable `{target}`"),
                    span,
                );
                None
            }
        }
    }

    /// Infers the type of `e`, reporting scope and sort violations. A
    /// `None` result from a subterm poisons the parent so one defect does
    /// not cascade into a shower of follow-on diagnostics.
    fn check_expr(&mut self, e: &Expr, expected: Option<BType>, pos: ExprPosition) -> Option<BType> {
        let found = self.infer(e, pos);
        if let (Some(found), Some(expected)) = (found, expected) {
            if found != expected {
                self.error(
                    DiagnosticCode::TypeMismatch,
                    format!("expected {expected}, found {found}"),
                    &e.span,
                );
                return None;
            }
        }
        found
    }

    fn infer(&mut self, e: &Expr, pos: ExprPosition) -> Option<BType> {
        match &e.kind {
            ExprKind::IntLit(_) => Some(BType::Int),
            ExprKind::BoolLit(_) => Some(BType::Bool),
            ExprKind::Var(name) => self.lookup_var(name, pos, &e.span),
            ExprKind::Unary { op: UnOp::Neg, arg } => {
                self.check_expr(arg, Some(BType::Int), pos)?;
                Some(BType::Int)
            }
            ExprKind::Unary { op: UnOp::Not, arg } => {
                self.check_expr(arg, Some(BType::Bool), pos)?;
                Some(BType::Bool)
            }
            ExprKind::Binary { op, lhs, rhs } => {
                if op.is_arith() || op.is_comparison() {
                    let l = self.check_expr(lhs, Some(BType::Int), pos);
                    let r = self.check_expr(rhs, Some(BType::Int), pos);
                    l.and(r)?;
                    Some(if op.is_arith() { BType::Int } else { BType::Bool })
                } else if op.is_equality() {
                    let l = self.check_expr(lhs, None, pos)?;
                    let r = self.check_expr(rhs, None, pos)?;
                    if l != r {
                        self.error(
                            DiagnosticCode::TypeMismatch,
                            format!("`{}` compares {l} with {r}", op.symbol()),
                            &e.span,
                        );
                        return None;
                    }
                    Some(BType::Bool)
                } else {
                    let l = self.check_expr(lhs, Some(BType::Bool), pos);
                    let r = self.check_expr(rhs, Some(BType::Bool), pos);
                    l.and(r)?;
                    Some(BType::Bool)
                }
            }
            ExprKind::Ite { cond, then_branch, else_branch } => {
                self.check_expr(cond, Some(BType::Bool), pos);
                let t = self.check_expr(then_branch, None, pos)?;
                let e2 = self.check_expr(else_branch, None, pos)?;
                if t != e2 {
                    self.error(
                        DiagnosticCode::TypeMismatch,
                        format!("ite branches have different types: {t} vs {e2}"),
                        &e.span,
                    );
                    return None;
                }
                Some(t)
            }
        }
    }

    fn lookup_var(&mut self, name: &str, pos: ExprPosition, span: &Span) -> Option<BType> {
        if name == TIME_VAR {
            if pos == ExprPosition::Requires {
                self.error(
                    DiagnosticCode::SpecScope,
                    format!("`{TIME_VAR}` is not available in `requires` clauses"),
                    span,
                );
                return None;
            }
            return Some(BType::Int);
        }
        let is_param = self.proc.params.iter().any(|(p, _)| p == name);
        let is_return = self.proc.returns.iter().any(|(r, _)| r == name);
        let in_scope = match pos {
            ExprPosition::Requires => is_param,
            ExprPosition::Ensures => is_param || is_return,
            ExprPosition::Body => self.visible.contains(name),
        };
        if !in_scope {
            let (code, what) = match pos {
                ExprPosition::Requires if self.types.contains_key(name) => {
                    (DiagnosticCode::SpecScope, "requires clauses may mention only parameters")
                }
                ExprPosition::Ensures if self.types.contains_key(name) => (
                    DiagnosticCode::SpecScope,
                    "ensures clauses may mention only parameters and return variables",
                ),
                _ => (DiagnosticCode::UndeclaredVariable, "variable is not declared at this point"),
            };
            self.error(code, format!("`{name}`: {what}"), span);
            return None;
        }
        self.types.get(name).copied()
    }
}

/// Check every well-formedness invariant of `program`: distinct names,
/// declaration-before-use, sort correctness, spec scoping, immutable
/// parameters and label uniqueness. Returns all violations; an empty list
/// means the program is well-typed.
pub fn typecheck(program: &Program) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut seen = BTreeSet::new();
    for proc in &program.procedures {
        if !seen.insert(proc.name.clone()) {
            diags.push(Diagnostic::error(
                DiagnosticCode::DuplicateProcedure,
                format!("procedure `{}` is defined more than once", proc.name),
                proc.span.clone(),
            ));
        }
        diags.extend(ProcChecker::new(proc).run());
    }
    diags
}
