//! Pretty-printer for programs and expressions.
//!
//! `pretty` emits concrete syntax that `parse` accepts, and
//! `parse(pretty(p))` is structurally identical to `p`. Expressions are
//! printed with the minimal parentheses the precedence table requires.

use std::fmt::Write;

use num_traits::Signed;

use crate::ast::{BinOp, Expr, ExprKind, Procedure, Program, Stmt, StmtKind, UnOp};

const INDENT: &str = "  ";

fn precedence(op: BinOp) -> u8 {
    match op {
        BinOp::Or => 1,
        BinOp::And => 2,
        BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
        BinOp::Add | BinOp::Sub => 4,
        BinOp::Mul | BinOp::Div | BinOp::Mod => 5,
    }
}

const UNARY_LEVEL: u8 = 6;
const ATOM_LEVEL: u8 = 7;

fn level(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::IntLit(v) if v.is_negative() => UNARY_LEVEL,
        ExprKind::IntLit(_) | ExprKind::BoolLit(_) | ExprKind::Var(_) => ATOM_LEVEL,
        ExprKind::Unary { .. } => UNARY_LEVEL,
        ExprKind::Binary { op, .. } => precedence(*op),
        // `ite` prints in call style, which parenthesizes itself.
        ExprKind::Ite { .. } => ATOM_LEVEL,
    }
}

fn write_child(out: &mut String, child: &Expr, needs_parens: bool) {
    if needs_parens {
        out.push('(');
        write_expr(out, child);
        out.push(')');
    } else {
        write_expr(out, child);
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::IntLit(v) => {
            let _ = write!(out, "{v}");
        }
        ExprKind::BoolLit(b) => {
            let _ = write!(out, "{b}");
        }
        ExprKind::Var(name) => out.push_str(name),
        ExprKind::Unary { op, arg } => {
            out.push_str(match op {
                UnOp::Neg => "-",
                UnOp::Not => "!",
            });
            write_child(out, arg, level(arg) < UNARY_LEVEL);
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let prec = precedence(*op);
            let non_assoc = op.is_comparison() || op.is_equality();
            // Left-associative operators keep an equal-precedence left
            // child bare; non-associative comparisons parenthesize both.
            write_child(out, lhs, if non_assoc { level(lhs) <= prec } else { level(lhs) < prec });
            let _ = write!(out, " {} ", op.symbol());
            write_child(out, rhs, level(rhs) <= prec);
        }
        ExprKind::Ite { cond, then_branch, else_branch } => {
            // No surface form; printed for verification-condition output.
            out.push_str("ite(");
            write_expr(out, cond);
            out.push_str(", ");
            write_expr(out, then_branch);
            out.push_str(", ");
            write_expr(out, else_branch);
            out.push(')');
        }
    }
}

/// Render one expression in surface syntax.
pub fn expr_to_string(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

fn write_indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

fn write_block(out: &mut String, body: &[Stmt], depth: usize) {
    write_indent(out, depth);
    out.push_str("{\n");
    for stmt in body {
        write_stmt(out, stmt, depth + 1);
    }
    write_indent(out, depth);
    out.push('}');
}

fn write_stmt(out: &mut String, stmt: &Stmt, depth: usize) {
    match &stmt.kind {
        StmtKind::VarDecl { name, ty } => {
            write_indent(out, depth);
            let _ = writeln!(out, "var {name} : {ty};");
        }
        StmtKind::Assign { target, rhs } => {
            write_indent(out, depth);
            let _ = writeln!(out, "{target} := {};", expr_to_string(rhs));
        }
        StmtKind::While { guard, invariants, body } => {
            write_indent(out, depth);
            let _ = writeln!(out, "while ({})", expr_to_string(guard));
            for invariant in invariants {
                write_indent(out, depth + 1);
                let _ = writeln!(out, "invariant ({});", expr_to_string(invariant));
            }
            write_block(out, body, depth);
            out.push('\n');
        }
        StmtKind::If { cond, then_body, else_body } => {
            write_indent(out, depth);
            let _ = writeln!(out, "if ({})", expr_to_string(cond));
            write_block(out, then_body, depth);
            if else_body.is_empty() {
                out.push('\n');
            } else {
                out.push_str(" else\n");
                write_block(out, else_body, depth);
                out.push('\n');
            }
        }
        StmtKind::Assert { label, cond } => {
            write_indent(out, depth);
            let _ = writeln!(out, "assert [{label}]: ({});", expr_to_string(cond));
        }
        StmtKind::Assume { cond } => {
            write_indent(out, depth);
            let _ = writeln!(out, "assume ({});", expr_to_string(cond));
        }
        StmtKind::Tick { amount } => {
            write_indent(out, depth);
            let _ = writeln!(out, "tick({});", expr_to_string(amount));
        }
    }
}

fn write_param_list(out: &mut String, params: &[(String, crate::ast::BType)]) {
    out.push('(');
    for (i, (name, ty)) in params.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{name}: {ty}");
    }
    out.push(')');
}

fn write_procedure(out: &mut String, proc: &Procedure) {
    out.push_str("procedure ");
    out.push_str(&proc.name);
    out.push(' ');
    write_param_list(out, &proc.params);
    if !proc.returns.is_empty() {
        out.push_str(" returns ");
        write_param_list(out, &proc.returns);
    }
    out.push('\n');
    if !proc.spec.requires.is_empty() || !proc.spec.ensures.is_empty() {
        out.push_str("spec {\n");
        for clause in &proc.spec.requires {
            let _ = writeln!(out, "{INDENT}requires ({});", expr_to_string(clause));
        }
        for clause in &proc.spec.ensures {
            let _ = writeln!(out, "{INDENT}ensures ({});", expr_to_string(clause));
        }
        out.push_str("}\n");
    }
    write_block(out, &proc.body, 0);
    out.push_str(";\n");
}

/// Render a whole program in concrete syntax.
pub fn pretty(program: &Program) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "program {};", program.dialect);
    for proc in &program.procedures {
        out.push('\n');
        write_procedure(&mut out, proc);
    }
    out
}
