//! Toolkit for the Boole intermediate verification language.
//!
//! The pipeline: parse annotated imperative programs (`parser`), check
//! them (`ast::typecheck`), cut loops at their invariants to produce
//! closed verification conditions (`vcgen`), and discharge those through
//! an external SMT solver (`smt`). A concrete interpreter with tick-based
//! cost accounting (`interp`) doubles as a testing oracle for the
//! verifier, and `cost` provides the reusable cost-accumulator library
//! the tick semantics is built on.

pub mod ast;
pub mod cli;
pub mod cost;
pub mod interp;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod span;
pub mod smt;
pub mod vcgen;

pub use ast::{typecheck, BType, Expr, ExprKind, Procedure, Program, Spec, Stmt, StmtKind};
pub use parser::parse;
pub use pretty::{expr_to_string, pretty};
pub use span::{Diagnostic, DiagnosticCode, Severity, Span};
