//! Structural round-trip and front-end robustness properties.

mod common;

use boole::ast::{type_of, typecheck, BType, Expr, ExprKind, Program, Stmt, StmtKind, TIME_VAR};
use boole::parser::parse;
use boole::pretty::pretty;

use common::{random_program, rng};
use rand::Rng;

#[test]
fn parse_pretty_is_identity_on_random_programs() {
    let mut rng = rng(0x5EED_0001);
    for case in 0..300 {
        let program = random_program(&mut rng);
        let printed = pretty(&program);
        let reparsed = parse(&printed, "generated.bl")
            .unwrap_or_else(|d| panic!("case {case}: reparse failed {d:?}\n{printed}"));
        assert_eq!(reparsed, program, "case {case}:\n{printed}");
    }
}

#[test]
fn generated_programs_type_check() {
    let mut rng = rng(0x5EED_0002);
    for case in 0..200 {
        let program = random_program(&mut rng);
        let diags = typecheck(&program);
        assert!(diags.is_empty(), "case {case}: {diags:?}\n{}", pretty(&program));
    }
}

/// Random subterms of a type-correct program re-infer to exactly one
/// type under the enclosing procedure's context.
#[test]
fn every_subterm_has_a_unique_derivable_type() {
    fn walk_expr(e: &Expr, ctx: &std::collections::BTreeMap<String, BType>) {
        let ty = type_of(e, ctx);
        assert!(ty.is_some(), "untypable subterm {e:?}");
        assert_eq!(ty, type_of(e, ctx), "inference must be deterministic");
        match &e.kind {
            ExprKind::Unary { arg, .. } => walk_expr(arg, ctx),
            ExprKind::Binary { lhs, rhs, .. } => {
                walk_expr(lhs, ctx);
                walk_expr(rhs, ctx);
            }
            ExprKind::Ite { cond, then_branch, else_branch } => {
                walk_expr(cond, ctx);
                walk_expr(then_branch, ctx);
                walk_expr(else_branch, ctx);
            }
            _ => {}
        }
    }
    fn walk_stmts(body: &[Stmt], ctx: &std::collections::BTreeMap<String, BType>) {
        for stmt in body {
            match &stmt.kind {
                StmtKind::Assign { rhs, .. } => walk_expr(rhs, ctx),
                StmtKind::While { guard, invariants, body } => {
                    walk_expr(guard, ctx);
                    invariants.iter().for_each(|inv| walk_expr(inv, ctx));
                    walk_stmts(body, ctx);
                }
                StmtKind::If { cond, then_body, else_body } => {
                    walk_expr(cond, ctx);
                    walk_stmts(then_body, ctx);
                    walk_stmts(else_body, ctx);
                }
                StmtKind::Assert { cond, .. } | StmtKind::Assume { cond } => walk_expr(cond, ctx),
                StmtKind::Tick { amount } => walk_expr(amount, ctx),
                StmtKind::VarDecl { .. } => {}
            }
        }
    }

    let mut rng = rng(0x5EED_0003);
    for _ in 0..100 {
        let program = random_program(&mut rng);
        assert!(typecheck(&program).is_empty());
        for proc in &program.procedures {
            let mut ctx = proc.var_types();
            ctx.insert(TIME_VAR.to_string(), BType::Int);
            walk_stmts(&proc.body, &ctx);
        }
    }
}

#[test]
fn parsing_is_deterministic_on_corpus() {
    for path in common::corpus_files("valid") {
        let source = std::fs::read_to_string(&path).expect("read");
        let once = parse(&source, "x.bl");
        let twice = parse(&source, "x.bl");
        match (once, twice) {
            (Ok(a), Ok(b)) => assert_eq!(a, b),
            _ => panic!("corpus must parse"),
        }
    }
}

/// Diagnostics on corrupted inputs stay within the source text bounds.
#[test]
fn diagnostic_spans_lie_within_the_source() {
    let seed_sources: Vec<String> = common::corpus_files("valid")
        .iter()
        .map(|p| std::fs::read_to_string(p).expect("read"))
        .collect();
    let noise = ['@', '#', '$', '{', '}', ';', '(', ')', '=', '!', 'q', '7', ' '];
    let mut rng = rng(0x5EED_0004);

    let mut checked = 0;
    for round in 0..300 {
        let base = &seed_sources[round % seed_sources.len()];
        let mut corrupted: Vec<char> = base.chars().collect();
        for _ in 0..rng.gen_range(1..=4) {
            match rng.gen_range(0..3) {
                0 if !corrupted.is_empty() => {
                    let at = rng.gen_range(0..corrupted.len());
                    corrupted.remove(at);
                }
                1 => {
                    let at = rng.gen_range(0..=corrupted.len());
                    corrupted.insert(at, noise[rng.gen_range(0..noise.len())]);
                }
                _ => {
                    corrupted.truncate(rng.gen_range(0..=corrupted.len()));
                }
            }
        }
        let source: String = corrupted.into_iter().collect();
        if let Err(diags) = parse(&source, "fuzz.bl") {
            assert!(!diags.is_empty());
            let lines: Vec<&str> = source.split('\n').collect();
            for diag in diags {
                checked += 1;
                let span = &diag.span;
                assert!(span.start_line >= 1 && span.start_col >= 1, "{span:?}");
                assert!(
                    (span.start_line, span.start_col) <= (span.end_line, span.end_col),
                    "{span:?}"
                );
                assert!(span.end_line as usize <= lines.len().max(1), "{span:?} vs {} lines", lines.len());
                let line_len = lines
                    .get(span.end_line as usize - 1)
                    .map(|l| l.chars().count())
                    .unwrap_or(0);
                assert!(span.end_col as usize <= line_len + 1, "{span:?} vs line length {line_len}");
                assert!(!diag.message.is_empty());
            }
        }
    }
    assert!(checked > 50, "corruption should produce plenty of diagnostics, got {checked}");
}

#[test]
fn empty_program_round_trips() {
    let program = Program::empty();
    let printed = pretty(&program);
    assert_eq!(printed, "program Boole;\n");
    assert_eq!(parse(&printed, "e.bl").expect("parse"), program);
}
