//! Verification-condition generation.
//!
//! A type-checked procedure is turned into a finite list of closed,
//! named goals by symbolic execution with constant propagation: straight
//! line code updates a symbolic store, loops are cut at their invariants
//! (entry goal, preservation goal over a havocked iteration, then
//! havoc-and-assume for the continuation), branches fork and re-join with
//! `ite` merges, and every emitted formula is run through an algebraic
//! simplifier. Havocked variables become primed symbols (`i'`, `i''`, …),
//! which never collide with source identifiers.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ast::{
    collect_vars, free_vars, BType, BinOp, Expr, ExprKind, Program, Stmt, StmtKind, UnOp, TIME_VAR,
};
use crate::pretty::expr_to_string;
use crate::span::Span;

/// What a verification condition asserts about the program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VcKind {
    /// Invariant of loop `index` holds on entry.
    EntryInvariant(usize),
    /// Invariant of loop `index` is preserved by an arbitrary iteration.
    InvariantPreserved(usize),
    /// A labelled `assert` holds.
    Assert(String),
    /// The `ensures` clause at `index` holds at procedure exit.
    Ensures(usize),
}

/// A closed logical goal: under the hypotheses, `goal` holds for all
/// values of the binders.
#[derive(Debug, Clone)]
pub struct VerificationCondition {
    pub name: String,
    pub kind: VcKind,
    /// Free symbols of the formula with their sorts, sorted by name.
    pub binders: Vec<(String, BType)>,
    pub hypotheses: Vec<Expr>,
    pub goal: Expr,
    pub origin: Span,
}

impl Eq for VerificationCondition {}

impl PartialEq for VerificationCondition {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.kind == other.kind
            && self.binders == other.binders
            && self.hypotheses == other.hypotheses
            && self.goal == other.goal
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VcgenError {
    #[error("procedure `{0}` does not exist")]
    UnknownProcedure(String),
    #[error("verification condition name `{0}` is not unique; rename the assert label")]
    DuplicateVcName(String),
}

/// Simultaneous, capture-free substitution of variables by expressions.
/// Variables absent from `sigma` are left untouched.
pub fn substitute(e: &Expr, sigma: &BTreeMap<String, Expr>) -> Expr {
    match &e.kind {
        ExprKind::IntLit(_) | ExprKind::BoolLit(_) => e.clone(),
        ExprKind::Var(name) => sigma.get(name).cloned().unwrap_or_else(|| e.clone()),
        ExprKind::Unary { op, arg } => Expr::new(
            ExprKind::Unary { op: *op, arg: Box::new(substitute(arg, sigma)) },
            e.span.clone(),
        ),
        ExprKind::Binary { op, lhs, rhs } => Expr::new(
            ExprKind::Binary {
                op: *op,
                lhs: Box::new(substitute(lhs, sigma)),
                rhs: Box::new(substitute(rhs, sigma)),
            },
            e.span.clone(),
        ),
        ExprKind::Ite { cond, then_branch, else_branch } => Expr::new(
            ExprKind::Ite {
                cond: Box::new(substitute(cond, sigma)),
                then_branch: Box::new(substitute(then_branch, sigma)),
                else_branch: Box::new(substitute(else_branch, sigma)),
            },
            e.span.clone(),
        ),
    }
}

/// Semantics-preserving algebraic simplification, applied bottom-up to a
/// fixpoint: constant folding (Euclidean `div`/`mod`, skipped when the
/// divisor literal is zero), boolean and arithmetic units, `ite`
/// reduction, and regrouping of literal addends so that folds like
/// `(x + 1) - 1 → x` go through.
pub fn simplify(e: &Expr) -> Expr {
    let mut current = simplify_pass(e);
    // The pass is bottom-up, so one round almost always suffices; the
    // cap is a safety net against rule interactions.
    for _ in 0..64 {
        let next = simplify_pass(&current);
        if next == current {
            return next;
        }
        current = next;
    }
    current
}

fn simplify_pass(e: &Expr) -> Expr {
    let rebuilt = match &e.kind {
        ExprKind::IntLit(_) | ExprKind::BoolLit(_) | ExprKind::Var(_) => e.clone(),
        ExprKind::Unary { op, arg } => Expr::new(
            ExprKind::Unary { op: *op, arg: Box::new(simplify_pass(arg)) },
            e.span.clone(),
        ),
        ExprKind::Binary { op, lhs, rhs } => Expr::new(
            ExprKind::Binary {
                op: *op,
                lhs: Box::new(simplify_pass(lhs)),
                rhs: Box::new(simplify_pass(rhs)),
            },
            e.span.clone(),
        ),
        ExprKind::Ite { cond, then_branch, else_branch } => Expr::new(
            ExprKind::Ite {
                cond: Box::new(simplify_pass(cond)),
                then_branch: Box::new(simplify_pass(then_branch)),
                else_branch: Box::new(simplify_pass(else_branch)),
            },
            e.span.clone(),
        ),
    };
    rewrite_node(rebuilt)
}

/// Apply root rewrites until none fires. Children are already simplified.
fn rewrite_node(mut e: Expr) -> Expr {
    for _ in 0..64 {
        match rewrite_once(&e) {
            Some(next) => e = next,
            None => break,
        }
    }
    e
}

fn rewrite_once(e: &Expr) -> Option<Expr> {
    use BinOp::*;
    match &e.kind {
        ExprKind::Unary { op: UnOp::Neg, arg } => {
            arg.as_int_lit().map(|v| Expr::new(ExprKind::IntLit(-v), e.span.clone()))
        }
        ExprKind::Unary { op: UnOp::Not, arg } => {
            arg.as_bool_lit().map(|b| Expr::new(ExprKind::BoolLit(!b), e.span.clone()))
        }
        ExprKind::Binary { op, lhs, rhs } => {
            // Literal-literal folding first.
            if let (Some(a), Some(b)) = (lhs.as_int_lit(), rhs.as_int_lit()) {
                let int = |v| Some(Expr::new(ExprKind::IntLit(v), e.span.clone()));
                let boolean = |b| Some(Expr::new(ExprKind::BoolLit(b), e.span.clone()));
                return match op {
                    Add => int(a + b),
                    Sub => int(a - b),
                    Mul => int(a * b),
                    Div if !b.is_zero() => int(crate::interp::euclidean_div(a, b)),
                    Mod if !b.is_zero() => int(crate::interp::euclidean_mod(a, b)),
                    Div | Mod => None,
                    Eq => boolean(a == b),
                    Ne => boolean(a != b),
                    Lt => boolean(a < b),
                    Le => boolean(a <= b),
                    Gt => boolean(a > b),
                    Ge => boolean(a >= b),
                    And | Or => unreachable!("int operands on a boolean operator"),
                };
            }
            if let (Some(a), Some(b)) = (lhs.as_bool_lit(), rhs.as_bool_lit()) {
                if matches!(op, Eq | Ne) {
                    let value = if *op == Eq { a == b } else { a != b };
                    return Some(Expr::new(ExprKind::BoolLit(value), e.span.clone()));
                }
            }
            match op {
                And => match (lhs.as_bool_lit(), rhs.as_bool_lit()) {
                    (Some(false), _) | (_, Some(false)) => Some(Expr::boolean(false)),
                    (Some(true), _) => Some((**rhs).clone()),
                    (_, Some(true)) => Some((**lhs).clone()),
                    _ => None,
                },
                Or => match (lhs.as_bool_lit(), rhs.as_bool_lit()) {
                    (Some(true), _) | (_, Some(true)) => Some(Expr::boolean(true)),
                    (Some(false), _) => Some((**rhs).clone()),
                    (_, Some(false)) => Some((**lhs).clone()),
                    _ => None,
                },
                Add | Sub => rewrite_additive(e, *op, lhs, rhs),
                Mul => {
                    let unit = |side: &Expr, other: &Expr| {
                        side.as_int_lit().and_then(|v| {
                            if v.is_zero() {
                                Some(Expr::int(0))
                            } else if v.is_one() {
                                Some(other.clone())
                            } else {
                                None
                            }
                        })
                    };
                    unit(lhs, rhs).or_else(|| unit(rhs, lhs))
                }
                _ => None,
            }
        }
        ExprKind::Ite { cond, then_branch, else_branch } => match cond.as_bool_lit() {
            Some(true) => Some((**then_branch).clone()),
            Some(false) => Some((**else_branch).clone()),
            None if then_branch == else_branch => Some((**then_branch).clone()),
            None => None,
        },
        _ => None,
    }
}

/// Rewrites for `+`/`-` with a literal operand: drop zero addends, move a
/// lone literal to the right, and merge the literal tails of nested
/// additive nodes so constant offsets cancel.
fn rewrite_additive(e: &Expr, op: BinOp, lhs: &Expr, rhs: &Expr) -> Option<Expr> {
    let keep_span = |kind| Some(Expr::new(kind, e.span.clone()));
    if let Some(b) = rhs.as_int_lit() {
        if b.is_zero() {
            return Some(lhs.clone());
        }
        if b.is_negative() {
            // x + (-k) → x - k and x - (-k) → x + k.
            let flipped = if op == BinOp::Add { BinOp::Sub } else { BinOp::Add };
            return keep_span(ExprKind::Binary {
                op: flipped,
                lhs: Box::new(lhs.clone()),
                rhs: Box::new(Expr::int(-b)),
            });
        }
        // ((x ± a) ± b) with literal a, b: merge into one offset of x.
        if let ExprKind::Binary { op: inner_op, lhs: x, rhs: a } = &lhs.kind {
            if matches!(inner_op, BinOp::Add | BinOp::Sub) {
                if let Some(a) = a.as_int_lit() {
                    let a = if *inner_op == BinOp::Add { a.clone() } else { -a };
                    let b = if op == BinOp::Add { b.clone() } else { -b };
                    return keep_span(ExprKind::Binary {
                        op: BinOp::Add,
                        lhs: x.clone(),
                        rhs: Box::new(Expr::int(a + b)),
                    });
                }
            }
        }
        return None;
    }
    if op == BinOp::Add && lhs.as_int_lit().is_some() {
        // Literal on the left commutes to the right so the merge rule
        // above can see it.
        return keep_span(ExprKind::Binary {
            op: BinOp::Add,
            lhs: Box::new(rhs.clone()),
            rhs: Box::new(lhs.clone()),
        });
    }
    None
}

/// Symbolic machine state: the symbolic value of every program variable
/// plus the path condition accumulated so far.
#[derive(Debug, Clone)]
struct SymState {
    sigma: BTreeMap<String, Expr>,
    path: Vec<Expr>,
}

struct VcBuilder {
    /// Declared source-variable types.
    var_types: BTreeMap<String, BType>,
    /// Sorts of binder symbols: parameters and generated primed symbols.
    symbol_types: BTreeMap<String, BType>,
    loop_counter: usize,
    names: BTreeSet<String>,
    vcs: Vec<VerificationCondition>,
}

impl VcBuilder {
    fn source_type(&self, var: &str) -> BType {
        if var == TIME_VAR {
            BType::Int
        } else {
            self.var_types[var]
        }
    }

    /// Symbols that may still influence future formulas: everything free
    /// in the store or the path condition.
    fn live_symbols(state: &SymState) -> BTreeSet<String> {
        let mut live = BTreeSet::new();
        for value in state.sigma.values() {
            collect_vars(value, &mut live);
        }
        for cond in &state.path {
            collect_vars(cond, &mut live);
        }
        live
    }

    /// Allocate the primed symbol for `base` with at least `min_level`
    /// primes, skipping levels still live in `state`.
    fn fresh_symbol(
        &mut self,
        base: &str,
        min_level: usize,
        state: &SymState,
    ) -> (String, usize) {
        let live = Self::live_symbols(state);
        let mut level = min_level.max(1);
        loop {
            let candidate = format!("{base}{}", "'".repeat(level));
            if !live.contains(&candidate) && !state.sigma.contains_key(&candidate) {
                self.symbol_types.insert(candidate.clone(), self.source_type(base));
                return (candidate, level);
            }
            level += 1;
        }
    }

    fn emit(
        &mut self,
        kind: VcKind,
        name: String,
        state: &SymState,
        raw_goal: Expr,
        origin: Span,
    ) -> Result<Expr, VcgenError> {
        let goal = simplify(&raw_goal);
        if !self.names.insert(name.clone()) {
            return Err(VcgenError::DuplicateVcName(name));
        }
        let mut symbols = free_vars(&goal);
        for hyp in &state.path {
            collect_vars(hyp, &mut symbols);
        }
        let binders: Vec<(String, BType)> = symbols
            .into_iter()
            .map(|s| {
                let ty = *self
                    .symbol_types
                    .get(&s)
                    .unwrap_or_else(|| panic!("open verification condition: unknown symbol `{s}`"));
                (s, ty)
            })
            .collect();
        self.vcs.push(VerificationCondition {
            name,
            kind,
            binders,
            hypotheses: state.path.clone(),
            goal: goal.clone(),
            origin,
        });
        Ok(goal)
    }

    fn exec_block(&mut self, body: &[Stmt], state: &mut SymState) -> Result<(), VcgenError> {
        for stmt in body {
            self.exec_stmt(stmt, state)?;
        }
        Ok(())
    }

    fn exec_stmt(&mut self, stmt: &Stmt, state: &mut SymState) -> Result<(), VcgenError> {
        match &stmt.kind {
            // Locals are mapped to fresh symbols up front; the declaration
            // has no symbolic effect.
            StmtKind::VarDecl { .. } => Ok(()),
            StmtKind::Assign { target, rhs } => {
                let value = simplify(&substitute(rhs, &state.sigma));
                state.sigma.insert(target.clone(), value);
                Ok(())
            }
            StmtKind::Assume { cond } => {
                let assumed = simplify(&substitute(cond, &state.sigma));
                state.path.push(assumed);
                Ok(())
            }
            StmtKind::Tick { amount } => {
                let charged = substitute(amount, &state.sigma);
                let clock = state.sigma[TIME_VAR].clone();
                state
                    .sigma
                    .insert(TIME_VAR.to_string(), simplify(&Expr::binary(BinOp::Add, clock, charged)));
                Ok(())
            }
            StmtKind::Assert { label, cond } => {
                let raw = substitute(cond, &state.sigma);
                let goal = self.emit(
                    VcKind::Assert(label.clone()),
                    label.clone(),
                    state,
                    raw,
                    stmt.span.clone(),
                )?;
                // Checked asserts are assumed downstream.
                state.path.push(goal);
                Ok(())
            }
            StmtKind::If { cond, then_body, else_body } => {
                self.exec_if(cond, then_body, else_body, state)
            }
            StmtKind::While { guard, invariants, body } => {
                self.exec_while(guard, invariants, body, state)
            }
        }
    }

    fn exec_if(
        &mut self,
        cond: &Expr,
        then_body: &[Stmt],
        else_body: &[Stmt],
        state: &mut SymState,
    ) -> Result<(), VcgenError> {
        let cond_sub = simplify(&substitute(cond, &state.sigma));
        let base_len = state.path.len();

        let mut then_state =
            SymState { sigma: state.sigma.clone(), path: state.path.clone() };
        then_state.path.push(cond_sub.clone());
        self.exec_block(then_body, &mut then_state)?;

        let mut else_state =
            SymState { sigma: state.sigma.clone(), path: state.path.clone() };
        else_state.path.push(simplify(&Expr::unary(UnOp::Not, cond_sub.clone())));
        self.exec_block(else_body, &mut else_state)?;

        // Join the stores; differing values merge under ite.
        let mut merged = BTreeMap::new();
        for (var, then_value) in &then_state.sigma {
            let else_value = &else_state.sigma[var];
            let joined = if then_value == else_value {
                then_value.clone()
            } else {
                simplify(&Expr::ite(cond_sub.clone(), then_value.clone(), else_value.clone()))
            };
            merged.insert(var.clone(), joined);
        }
        state.sigma = merged;

        // Branch-local assumptions survive the join guarded by the branch
        // condition they were made under.
        for local in &then_state.path[base_len + 1..] {
            state
                .path
                .push(simplify(&Expr::ite(cond_sub.clone(), local.clone(), Expr::boolean(true))));
        }
        for local in &else_state.path[base_len + 1..] {
            state
                .path
                .push(simplify(&Expr::ite(cond_sub.clone(), Expr::boolean(true), local.clone())));
        }
        Ok(())
    }

    fn exec_while(
        &mut self,
        guard: &Expr,
        invariants: &[Expr],
        body: &[Stmt],
        state: &mut SymState,
    ) -> Result<(), VcgenError> {
        let loop_index = self.loop_counter;
        self.loop_counter += 1;
        let vc_name = |prefix: &str, j: usize| {
            if j == 0 {
                format!("{prefix}_{loop_index}")
            } else {
                format!("{prefix}_{loop_index}_{j}")
            }
        };

        // (a) The invariant holds on entry, under the current path; the
        // guard is deliberately not assumed, since the invariant must hold
        // even when the loop never runs.
        for (j, invariant) in invariants.iter().enumerate() {
            self.emit(
                VcKind::EntryInvariant(loop_index),
                vc_name("entry_invariant", j),
                state,
                substitute(invariant, &state.sigma),
                invariant.span.clone(),
            )?;
        }

        // (b) Havoc everything the body can assign.
        let mut modified = BTreeSet::new();
        assigned_vars(body, &mut modified);
        let mut havoc_state =
            SymState { sigma: state.sigma.clone(), path: state.path.clone() };
        let mut batch_levels = BTreeMap::new();
        for var in &modified {
            let (symbol, level) = self.fresh_symbol(var, 1, &havoc_state);
            batch_levels.insert(var.clone(), level);
            havoc_state.sigma.insert(var.clone(), Expr::var(symbol));
        }

        // (c) An arbitrary iteration: assume the invariants and the guard
        // over the havocked store, run the body, and require the
        // invariants at its end. Nested constructs emit their own goals
        // under this path.
        for invariant in invariants {
            let assumed = simplify(&substitute(invariant, &havoc_state.sigma));
            havoc_state.path.push(assumed);
        }
        havoc_state.path.push(simplify(&substitute(guard, &havoc_state.sigma)));
        self.exec_block(body, &mut havoc_state)?;
        for (j, invariant) in invariants.iter().enumerate() {
            self.emit(
                VcKind::InvariantPreserved(loop_index),
                vc_name("arbitrary_iter_maintain_invariant", j),
                &havoc_state,
                substitute(invariant, &havoc_state.sigma),
                invariant.span.clone(),
            )?;
        }

        // (d) Continue after the loop from a second havoc batch, knowing
        // only the invariants and the negated guard.
        for var in &modified {
            let min_level = batch_levels[var] + 1;
            let (symbol, _) = self.fresh_symbol(var, min_level, state);
            state.sigma.insert(var.clone(), Expr::var(symbol));
        }
        for invariant in invariants {
            state.path.push(simplify(&substitute(invariant, &state.sigma)));
        }
        let exit_guard = substitute(guard, &state.sigma);
        state.path.push(simplify(&Expr::unary(UnOp::Not, exit_guard)));
        Ok(())
    }
}

/// Variables assigned anywhere in `body`, including through nested
/// constructs; `tick` counts as an assignment to the ghost clock.
fn assigned_vars(body: &[Stmt], out: &mut BTreeSet<String>) {
    for stmt in body {
        match &stmt.kind {
            StmtKind::Assign { target, .. } => {
                out.insert(target.clone());
            }
            StmtKind::Tick { .. } => {
                out.insert(TIME_VAR.to_string());
            }
            StmtKind::While { body, .. } => assigned_vars(body, out),
            StmtKind::If { then_body, else_body, .. } => {
                assigned_vars(then_body, out);
                assigned_vars(else_body, out);
            }
            StmtKind::VarDecl { .. } | StmtKind::Assert { .. } | StmtKind::Assume { .. } => {}
        }
    }
}

/// Generate the verification conditions of `proc_name`, in deterministic
/// emission order: for each loop, entry goals, then goals from inside the
/// body, then preservation goals; asserts and `ensures` clauses follow
/// the control flow.
pub fn generate_vcs(
    program: &Program,
    proc_name: &str,
) -> Result<Vec<VerificationCondition>, VcgenError> {
    let proc = program
        .procedure(proc_name)
        .ok_or_else(|| VcgenError::UnknownProcedure(proc_name.to_string()))?;

    let mut builder = VcBuilder {
        var_types: proc.var_types(),
        symbol_types: BTreeMap::new(),
        loop_counter: 0,
        names: BTreeSet::new(),
        vcs: Vec::new(),
    };

    // Parameters stand for themselves; returns and locals start as fresh
    // unconstrained symbols; the ghost clock starts at zero.
    let mut state = SymState { sigma: BTreeMap::new(), path: Vec::new() };
    for (name, ty) in &proc.params {
        builder.symbol_types.insert(name.clone(), *ty);
        state.sigma.insert(name.clone(), Expr::var(name.clone()));
    }
    let initials: Vec<(String, BType)> =
        proc.returns.iter().cloned().chain(proc.locals()).collect();
    for (name, _) in &initials {
        let (symbol, _) = builder.fresh_symbol(name, 1, &state);
        state.sigma.insert(name.clone(), Expr::var(symbol));
    }
    state.sigma.insert(TIME_VAR.to_string(), Expr::int(0));

    for clause in &proc.spec.requires {
        state.path.push(simplify(&substitute(clause, &state.sigma)));
    }

    builder.exec_block(&proc.body, &mut state)?;

    for (j, clause) in proc.spec.ensures.iter().enumerate() {
        builder.emit(
            VcKind::Ensures(j),
            format!("ensures_{j}"),
            &state,
            substitute(clause, &state.sigma),
            clause.span.clone(),
        )?;
    }

    debug_assert!(builder.vcs.iter().all(|vc| {
        let mut vars = free_vars(&vc.goal);
        for hyp in &vc.hypotheses {
            collect_vars(hyp, &mut vars);
        }
        vars.iter().all(|v| vc.binders.iter().any(|(b, _)| b == v))
    }));
    Ok(builder.vcs)
}

/// Render a verification condition as a `case` block: a universally
/// quantified implication chain over the binders.
pub fn pretty_vc(vc: &VerificationCondition) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "case {}", vc.name);
    out.push('⊢');
    out.push(' ');
    if !vc.binders.is_empty() {
        out.push_str("∀ ");
        // Group consecutive binders of the same sort.
        let mut i = 0;
        while i < vc.binders.len() {
            let ty = vc.binders[i].1;
            let mut j = i;
            while j < vc.binders.len() && vc.binders[j].1 == ty {
                j += 1;
            }
            if i > 0 {
                out.push(' ');
            }
            out.push('(');
            for (k, (name, _)) in vc.binders[i..j].iter().enumerate() {
                if k > 0 {
                    out.push(' ');
                }
                out.push_str(name);
            }
            let _ = write!(out, " : {ty})");
            i = j;
        }
        out.push(',');
        if vc.hypotheses.is_empty() {
            out.push(' ');
        } else {
            out.push('\n');
        }
    }
    for (i, hyp) in vc.hypotheses.iter().enumerate() {
        for _ in 0..i + 1 {
            out.push_str("  ");
        }
        let _ = writeln!(out, "{} →", expr_to_string(hyp));
    }
    if !vc.hypotheses.is_empty() {
        for _ in 0..vc.hypotheses.len() + 1 {
            out.push_str("  ");
        }
    }
    let _ = writeln!(out, "{}", expr_to_string(&vc.goal));
    out
}
