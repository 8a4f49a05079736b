//! Shared helpers for the integration and acceptance suites: solver
//! resolution, corpus paths, and seeded random generators.

#![allow(dead_code)]

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use boole::ast::{BType, BinOp, Expr, Procedure, Program, Spec, Stmt, StmtKind, UnOp};
use boole::smt::{find_in_path, SolverConfig, SOLVER_ENV};
use boole::span::Span;

pub mod fig6;

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").canonicalize().expect("workspace root")
}

pub fn corpus_dir(kind: &str) -> PathBuf {
    workspace_root().join("corpus").join(kind)
}

pub fn corpus_files(kind: &str) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir(kind))
        .expect("corpus directory")
        .map(|entry| entry.expect("corpus entry").path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "bl"))
        .collect();
    files.sort();
    files
}

pub fn load_corpus_program(path: &Path) -> Program {
    let source = std::fs::read_to_string(path).expect("read corpus file");
    let program = boole::parse(&source, &path.display().to_string())
        .unwrap_or_else(|d| panic!("corpus file {} does not parse: {d:?}", path.display()));
    let diags = boole::typecheck(&program);
    assert!(diags.is_empty(), "corpus file {} does not type-check: {diags:?}", path.display());
    program
}

/// Solver command for tests: `BOOLE_SOLVER`, then native z3/cvc5 from
/// PATH, then the WebAssembly Z3 shim checked into `tools/z3-wasm`.
pub fn solver_command() -> String {
    if let Ok(cmd) = std::env::var(SOLVER_ENV) {
        if !cmd.trim().is_empty() {
            return cmd;
        }
    }
    if find_in_path("z3").is_some() {
        return "z3 -smt2 -in".to_string();
    }
    if find_in_path("cvc5").is_some() {
        return "cvc5 --lang smt2 -".to_string();
    }
    let shim = workspace_root().join("tools/z3-wasm/z3smt2.mjs");
    let modules = workspace_root().join("tools/z3-wasm/node_modules");
    if shim.is_file() && modules.is_dir() && find_in_path("node").is_some() {
        return format!("node {}", shim.display());
    }
    panic!(
        "no SMT solver available: set {SOLVER_ENV}, install z3/cvc5, or run \
         `npm install` in tools/z3-wasm"
    );
}

pub fn solver_config(timeout_secs: u64) -> SolverConfig {
    SolverConfig::new(solver_command(), timeout_secs, "ALL")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------
// Random well-formed programs (structural generator for round-trip and
// typing properties; the programs need not verify or terminate).
// ---------------------------------------------------------------------

struct ProcGen<'a> {
    rng: &'a mut ChaCha8Rng,
    /// Everything in scope, including immutable parameters.
    vars: Vec<(String, BType)>,
    /// Assignment targets: returns and locals.
    assignable: Vec<(String, BType)>,
    next_label: usize,
}

fn random_type(rng: &mut ChaCha8Rng) -> BType {
    if rng.gen_bool(0.75) {
        BType::Int
    } else {
        BType::Bool
    }
}

impl<'a> ProcGen<'a> {
    fn vars_of(&self, ty: BType) -> Vec<String> {
        self.vars.iter().filter(|(_, t)| *t == ty).map(|(n, _)| n.clone()).collect()
    }

    fn gen_expr(&mut self, ty: BType, depth: u32) -> Expr {
        self.gen_expr_over(&self.vars_of(ty), ty, depth)
    }

    fn gen_expr_over(&mut self, same_sort_vars: &[String], ty: BType, depth: u32) -> Expr {
        if depth == 0 || self.rng.gen_bool(0.3) {
            if !same_sort_vars.is_empty() && self.rng.gen_bool(0.6) {
                let name = same_sort_vars.choose(self.rng).expect("nonempty").clone();
                return Expr::var(name);
            }
            return match ty {
                BType::Int => Expr::int(self.rng.gen_range(0..=12)),
                BType::Bool => Expr::boolean(self.rng.gen()),
            };
        }
        match ty {
            BType::Int => match self.rng.gen_range(0..6) {
                0 => Expr::unary(UnOp::Neg, self.gen_expr(BType::Int, depth - 1)),
                1 => self.gen_int_binary(BinOp::Add, depth),
                2 => self.gen_int_binary(BinOp::Sub, depth),
                3 => self.gen_int_binary(BinOp::Mul, depth),
                4 => self.gen_int_binary(BinOp::Div, depth),
                _ => self.gen_int_binary(BinOp::Mod, depth),
            },
            BType::Bool => match self.rng.gen_range(0..7) {
                0 => Expr::unary(UnOp::Not, self.gen_expr(BType::Bool, depth - 1)),
                1 => Expr::binary(
                    BinOp::And,
                    self.gen_expr(BType::Bool, depth - 1),
                    self.gen_expr(BType::Bool, depth - 1),
                ),
                2 => Expr::binary(
                    BinOp::Or,
                    self.gen_expr(BType::Bool, depth - 1),
                    self.gen_expr(BType::Bool, depth - 1),
                ),
                3 | 4 => {
                    let op = *[BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge]
                        .choose(self.rng)
                        .expect("nonempty");
                    Expr::binary(
                        op,
                        self.gen_expr(BType::Int, depth - 1),
                        self.gen_expr(BType::Int, depth - 1),
                    )
                }
                _ => {
                    let op = if self.rng.gen() { BinOp::Eq } else { BinOp::Ne };
                    let operand_ty = random_type(self.rng);
                    Expr::binary(
                        op,
                        self.gen_expr(operand_ty, depth - 1),
                        self.gen_expr(operand_ty, depth - 1),
                    )
                }
            },
        }
    }

    fn gen_int_binary(&mut self, op: BinOp, depth: u32) -> Expr {
        Expr::binary(op, self.gen_expr(BType::Int, depth - 1), self.gen_expr(BType::Int, depth - 1))
    }

    fn gen_block(&mut self, len: usize, depth: u32) -> Vec<Stmt> {
        (0..len).map(|_| self.gen_stmt(depth)).collect()
    }

    fn gen_stmt(&mut self, depth: u32) -> Stmt {
        let span = Span::synthetic();
        let choice = if depth == 0 { self.rng.gen_range(0..60) } else { self.rng.gen_range(0..100) };
        let kind = match choice {
            0..=29 => {
                let (target, ty) =
                    self.assignable.choose(self.rng).expect("assignable variable").clone();
                StmtKind::Assign { target, rhs: self.gen_expr(ty, 3) }
            }
            30..=39 => {
                let label = format!("a{}", self.next_label);
                self.next_label += 1;
                StmtKind::Assert { label, cond: self.gen_expr(BType::Bool, 3) }
            }
            40..=49 => StmtKind::Assume { cond: self.gen_expr(BType::Bool, 3) },
            50..=59 => StmtKind::Tick { amount: self.gen_expr(BType::Int, 2) },
            60..=79 => {
                let cond = self.gen_expr(BType::Bool, 2);
                let then_len = self.rng.gen_range(1..=2);
                let else_len = self.rng.gen_range(0..=2);
                StmtKind::If {
                    cond,
                    then_body: self.gen_block(then_len, depth - 1),
                    else_body: self.gen_block(else_len, depth - 1),
                }
            }
            _ => {
                let guard = self.gen_expr(BType::Bool, 2);
                let invariant_count = self.rng.gen_range(0..=2);
                let invariants =
                    (0..invariant_count).map(|_| self.gen_expr(BType::Bool, 3)).collect();
                let body_len = self.rng.gen_range(1..=2);
                StmtKind::While { guard, invariants, body: self.gen_block(body_len, depth - 1) }
            }
        };
        Stmt::new(kind, span)
    }
}

pub fn random_procedure(rng: &mut ChaCha8Rng, name: &str) -> Procedure {
    let params: Vec<(String, BType)> =
        (0..rng.gen_range(0..=3)).map(|i| (format!("p{i}"), random_type(rng))).collect();
    let returns: Vec<(String, BType)> =
        (0..rng.gen_range(1..=2)).map(|i| (format!("r{i}"), random_type(rng))).collect();
    let locals: Vec<(String, BType)> =
        (0..rng.gen_range(0..=3)).map(|i| (format!("v{i}"), random_type(rng))).collect();

    let mut body: Vec<Stmt> = locals
        .iter()
        .map(|(name, ty)| {
            Stmt::new(StmtKind::VarDecl { name: name.clone(), ty: *ty }, Span::synthetic())
        })
        .collect();

    let mut assignable = returns.clone();
    assignable.extend(locals.iter().cloned());
    let mut vars = params.clone();
    vars.extend(assignable.iter().cloned());

    // Spec clauses use restricted scopes: requires sees parameters only,
    // ensures sees parameters and returns.
    let mut generator = ProcGen { rng, vars: params.clone(), assignable: vec![], next_label: 0 };
    let requires =
        (0..generator.rng.gen_range(0..=2)).map(|_| generator.gen_expr(BType::Bool, 2)).collect();
    let mut ensures_scope = params.clone();
    ensures_scope.extend(returns.iter().cloned());
    generator.vars = ensures_scope;
    let ensures =
        (0..generator.rng.gen_range(0..=2)).map(|_| generator.gen_expr(BType::Bool, 2)).collect();

    generator.vars = vars;
    generator.assignable = assignable;
    let len = generator.rng.gen_range(1..=5);
    body.extend(generator.gen_block(len, 2));

    Procedure {
        name: name.to_string(),
        params,
        returns,
        spec: Spec { requires, ensures },
        body,
        span: Span::synthetic(),
    }
}

/// A random well-formed program: it parses back from its pretty form and
/// passes `typecheck`, but makes no promise of verifying or terminating.
pub fn random_program(rng: &mut ChaCha8Rng) -> Program {
    let count = rng.gen_range(1..=2);
    let procedures =
        (0..count).map(|i| random_procedure(rng, &format!("proc{i}"))).collect();
    Program { dialect: "Boole".to_string(), procedures }
}

// ---------------------------------------------------------------------
// Random typed expressions over a fixed context (for semantics oracles).
// ---------------------------------------------------------------------

/// The fixed variable context used by the semantics property tests.
pub fn oracle_context() -> Vec<(String, BType)> {
    vec![
        ("a".to_string(), BType::Int),
        ("b".to_string(), BType::Int),
        ("c".to_string(), BType::Int),
        ("p".to_string(), BType::Bool),
        ("q".to_string(), BType::Bool),
    ]
}

/// Random well-typed expression over `oracle_context`, `ite` included
/// (the verifier builds `ite` nodes internally even though the surface
/// syntax has none).
pub fn random_typed_expr(rng: &mut ChaCha8Rng, ty: BType, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        let vars: Vec<(String, BType)> =
            oracle_context().into_iter().filter(|(_, t)| *t == ty).collect();
        if !vars.is_empty() && rng.gen_bool(0.55) {
            return Expr::var(vars[rng.gen_range(0..vars.len())].0.clone());
        }
        return match ty {
            BType::Int => Expr::int(rng.gen_range(-12i64..=12)),
            BType::Bool => Expr::boolean(rng.gen()),
        };
    }
    match ty {
        BType::Int => match rng.gen_range(0..8) {
            0 => Expr::unary(UnOp::Neg, random_typed_expr(rng, BType::Int, depth - 1)),
            1 | 2 => Expr::binary(
                BinOp::Add,
                random_typed_expr(rng, BType::Int, depth - 1),
                random_typed_expr(rng, BType::Int, depth - 1),
            ),
            3 => Expr::binary(
                BinOp::Sub,
                random_typed_expr(rng, BType::Int, depth - 1),
                random_typed_expr(rng, BType::Int, depth - 1),
            ),
            4 => Expr::binary(
                BinOp::Mul,
                random_typed_expr(rng, BType::Int, depth - 1),
                random_typed_expr(rng, BType::Int, depth - 1),
            ),
            5 => Expr::binary(
                BinOp::Div,
                random_typed_expr(rng, BType::Int, depth - 1),
                random_typed_expr(rng, BType::Int, depth - 1),
            ),
            6 => Expr::binary(
                BinOp::Mod,
                random_typed_expr(rng, BType::Int, depth - 1),
                random_typed_expr(rng, BType::Int, depth - 1),
            ),
            _ => Expr::ite(
                random_typed_expr(rng, BType::Bool, depth - 1),
                random_typed_expr(rng, BType::Int, depth - 1),
                random_typed_expr(rng, BType::Int, depth - 1),
            ),
        },
        BType::Bool => match rng.gen_range(0..8) {
            0 => Expr::unary(UnOp::Not, random_typed_expr(rng, BType::Bool, depth - 1)),
            1 => Expr::binary(
                BinOp::And,
                random_typed_expr(rng, BType::Bool, depth - 1),
                random_typed_expr(rng, BType::Bool, depth - 1),
            ),
            2 => Expr::binary(
                BinOp::Or,
                random_typed_expr(rng, BType::Bool, depth - 1),
                random_typed_expr(rng, BType::Bool, depth - 1),
            ),
            3 | 4 => {
                let op =
                    [BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge][rng.gen_range(0..4)];
                Expr::binary(
                    op,
                    random_typed_expr(rng, BType::Int, depth - 1),
                    random_typed_expr(rng, BType::Int, depth - 1),
                )
            }
            5 | 6 => {
                let op = if rng.gen() { BinOp::Eq } else { BinOp::Ne };
                let ty = random_type(rng);
                Expr::binary(
                    op,
                    random_typed_expr(rng, ty, depth - 1),
                    random_typed_expr(rng, ty, depth - 1),
                )
            }
            _ => Expr::ite(
                random_typed_expr(rng, BType::Bool, depth - 1),
                random_typed_expr(rng, BType::Bool, depth - 1),
                random_typed_expr(rng, BType::Bool, depth - 1),
            ),
        },
    }
}

/// Random closed integer expression whose `div`/`mod` divisors are
/// nonzero literals, so evaluation is total.
pub fn random_closed_int_expr(rng: &mut ChaCha8Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return Expr::int(rng.gen_range(-16i64..=16));
    }
    match rng.gen_range(0..7) {
        0 => Expr::unary(UnOp::Neg, random_closed_int_expr(rng, depth - 1)),
        1 | 2 => Expr::binary(
            BinOp::Add,
            random_closed_int_expr(rng, depth - 1),
            random_closed_int_expr(rng, depth - 1),
        ),
        3 => Expr::binary(
            BinOp::Sub,
            random_closed_int_expr(rng, depth - 1),
            random_closed_int_expr(rng, depth - 1),
        ),
        4 => Expr::binary(
            BinOp::Mul,
            random_closed_int_expr(rng, depth - 1),
            random_closed_int_expr(rng, depth - 1),
        ),
        op => {
            let mut divisor = rng.gen_range(-9i64..=9);
            if divisor == 0 {
                divisor = 2;
            }
            Expr::binary(
                if op == 5 { BinOp::Div } else { BinOp::Mod },
                random_closed_int_expr(rng, depth - 1),
                Expr::int(divisor),
            )
        }
    }
}

/// Random concrete environment for `oracle_context`.
pub fn random_env(rng: &mut ChaCha8Rng) -> boole::interp::Env {
    oracle_context()
        .into_iter()
        .map(|(name, ty)| {
            let value = match ty {
                BType::Int => boole::interp::Value::Int(BigInt::from(rng.gen_range(-20i64..=20))),
                BType::Bool => boole::interp::Value::Bool(rng.gen()),
            };
            (name, value)
        })
        .collect()
}
