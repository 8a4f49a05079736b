//! Recursive descent parser for the Boole surface syntax.
//!
//! Grammar (EBNF):
//! ```text
//! program   := "program" IDENT ";" { procedure } ;
//! procedure := "procedure" IDENT "(" params ")" [ "returns" "(" params ")" ]
//!              [ "spec" "{" { specClause } "}" ] block ";" ;
//! params    := [ IDENT ":" type { "," IDENT ":" type } ] ;
//! specClause:= ("requires" | "ensures") "(" expr ")" ";" ;
//! block     := "{" { stmt } "}" ;
//! stmt      := "var" IDENT ":" type ";"
//!            | IDENT ":=" expr ";"
//!            | "while" "(" expr ")" { "invariant" "(" expr ")" ";" } block
//!            | "if" "(" expr ")" block [ "else" block ]
//!            | "assert" "[" IDENT "]" ":" "(" expr ")" ";"
//!            | "assume" "(" expr ")" ";"
//!            | "tick" "(" expr ")" ";" ;
//! type      := "int" | "bool" ;
//! ```
//! Operator precedence, loosest to tightest: `||`; `&&`; comparisons
//! (non-associative); `+ -`; `* div mod`; unary `- !`; atoms.
//!
//! Errors are collected rather than fatal: a malformed statement yields a
//! diagnostic and recovery resumes at the next `;` or `}`.

use crate::ast::{BType, BinOp, Expr, ExprKind, Procedure, Program, Spec, Stmt, StmtKind, UnOp, DIALECT};
use crate::lexer::{lex, Token, TokenKind};
use crate::span::{Diagnostic, DiagnosticCode, Span};

/// Marker for an already-reported parse failure; the diagnostic itself
/// lives in the parser's list.
struct Abort;

type PResult<T> = Result<T, Abort>;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

/// Parse `source` into a program. On failure returns every diagnostic
/// gathered while lexing and parsing (always at least one error).
pub fn parse(source: &str, file: &str) -> Result<Program, Vec<Diagnostic>> {
    let (tokens, lex_diags) = lex(source, file);
    let mut parser = Parser { tokens, pos: 0, diags: lex_diags };
    let program = parser.parse_program();
    if parser.diags.is_empty() {
        Ok(program.expect("no diagnostics implies a parsed program"))
    } else {
        Err(parser.diags)
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_kind(&self) -> &TokenKind {
        &self.peek().kind
    }

    fn bump(&mut self) -> Token {
        let tok = self.peek().clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek_kind() == kind
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error_here(&mut self, message: String) -> Abort {
        let span = self.peek().span.clone();
        self.diags.push(Diagnostic::error(DiagnosticCode::SyntaxError, message, span));
        Abort
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Token> {
        if self.at(&kind) {
            Ok(self.bump())
        } else {
            Err(self.error_here(format!("expected {kind}, found {}", self.peek_kind())))
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek_kind().clone() {
            TokenKind::Ident(name) => {
                let tok = self.bump();
                Ok((name, tok.span))
            }
            other => Err(self.error_here(format!("expected {what}, found {other}"))),
        }
    }

    /// Skip to just past the next `;`, or to a `}`/EOF, whichever comes
    /// first. Statement-granularity recovery.
    fn synchronize(&mut self) {
        loop {
            match self.peek_kind() {
                TokenKind::Semi => {
                    self.bump();
                    return;
                }
                TokenKind::RBrace | TokenKind::Eof => return,
                _ => {
                    self.bump();
                }
            }
        }
    }

    /// Skip to the next `procedure` keyword or EOF; used when a procedure
    /// header is beyond repair.
    fn synchronize_to_procedure(&mut self) {
        while !matches!(self.peek_kind(), TokenKind::KwProcedure | TokenKind::Eof) {
            self.bump();
        }
    }

    fn parse_program(&mut self) -> Option<Program> {
        let header = (|| -> PResult<String> {
            self.expect(TokenKind::KwProgram)?;
            let (dialect, span) = self.expect_ident("dialect name")?;
            if dialect != DIALECT {
                self.diags.push(Diagnostic::error(
                    DiagnosticCode::UnknownDialect,
                    format!("unknown dialect `{dialect}`; this tool understands `{DIALECT}`"),
                    span,
                ));
            }
            self.expect(TokenKind::Semi)?;
            Ok(dialect)
        })();
        let dialect = match header {
            Ok(d) => d,
            Err(Abort) => {
                self.synchronize_to_procedure();
                DIALECT.to_string()
            }
        };

        let mut procedures = Vec::new();
        while !self.at(&TokenKind::Eof) {
            if self.at(&TokenKind::KwProcedure) {
                match self.parse_procedure() {
                    Ok(proc) => procedures.push(proc),
                    Err(Abort) => self.synchronize_to_procedure(),
                }
            } else {
                let _ = self.error_here(format!(
                    "expected `procedure`, found {}",
                    self.peek_kind()
                ));
                self.synchronize_to_procedure();
            }
        }
        Some(Program { dialect, procedures })
    }

    fn parse_procedure(&mut self) -> PResult<Procedure> {
        let start = self.expect(TokenKind::KwProcedure)?.span;
        let (name, _) = self.expect_ident("procedure name")?;
        self.expect(TokenKind::LParen)?;
        let params = self.parse_params()?;
        self.expect(TokenKind::RParen)?;

        let mut returns = Vec::new();
        if self.eat(&TokenKind::KwReturns) {
            self.expect(TokenKind::LParen)?;
            returns = self.parse_params()?;
            self.expect(TokenKind::RParen)?;
        }

        let mut spec = Spec::default();
        if self.eat(&TokenKind::KwSpec) {
            self.expect(TokenKind::LBrace)?;
            while !self.at(&TokenKind::RBrace) && !self.at(&TokenKind::Eof) {
                match self.parse_spec_clause(&mut spec) {
                    Ok(()) => {}
                    Err(Abort) => self.synchronize(),
                }
            }
            self.expect(TokenKind::RBrace)?;
        }

        let body = self.parse_block()?;
        let end = self.expect(TokenKind::Semi)?.span;
        Ok(Procedure { name, params, returns, spec, body, span: start.merge(&end) })
    }

    fn parse_params(&mut self) -> PResult<Vec<(String, BType)>> {
        let mut params = Vec::new();
        if self.at(&TokenKind::RParen) {
            return Ok(params);
        }
        loop {
            let (name, _) = self.expect_ident("parameter name")?;
            self.expect(TokenKind::Colon)?;
            params.push((name, self.parse_type()?));
            if !self.eat(&TokenKind::Comma) {
                return Ok(params);
            }
        }
    }

    fn parse_type(&mut self) -> PResult<BType> {
        if self.eat(&TokenKind::KwInt) {
            Ok(BType::Int)
        } else if self.eat(&TokenKind::KwBool) {
            Ok(BType::Bool)
        } else {
            Err(self.error_here(format!("expected a type (`int` or `bool`), found {}", self.peek_kind())))
        }
    }

    fn parse_spec_clause(&mut self, spec: &mut Spec) -> PResult<()> {
        let is_requires = match self.peek_kind() {
            TokenKind::KwRequires => true,
            TokenKind::KwEnsures => false,
            other => {
                let msg = format!("expected `requires` or `ensures`, found {other}");
                return Err(self.error_here(msg));
            }
        };
        self.bump();
        self.expect(TokenKind::LParen)?;
        let clause = self.parse_expr()?;
        self.expect(TokenKind::RParen)?;
        self.expect(TokenKind::Semi)?;
        if is_requires {
            spec.requires.push(clause);
        } else {
            spec.ensures.push(clause);
        }
        Ok(())
    }

    fn parse_block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect(TokenKind::LBrace)?;
        let mut stmts = Vec::new();
        while !self.at(&TokenKind::RBrace) && !self.at(&TokenKind::Eof) {
            match self.parse_stmt() {
                Ok(stmt) => stmts.push(stmt),
                Err(Abort) => self.synchronize(),
            }
        }
        self.expect(TokenKind::RBrace)?;
        Ok(stmts)
    }

    fn parse_stmt(&mut self) -> PResult<Stmt> {
        let start = self.peek().span.clone();
        match self.peek_kind().clone() {
            TokenKind::KwVar => {
                self.bump();
                let (name, _) = self.expect_ident("variable name")?;
                self.expect(TokenKind::Colon)?;
                let ty = self.parse_type()?;
                let end = self.expect(TokenKind::Semi)?.span;
                Ok(Stmt::new(StmtKind::VarDecl { name, ty }, start.merge(&end)))
            }
            TokenKind::KwWhile => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let guard = self.parse_expr()?;
                self.expect(TokenKind::RParen)?;
                let mut invariants = Vec::new();
                while self.eat(&TokenKind::KwInvariant) {
                    self.expect(TokenKind::LParen)?;
                    invariants.push(self.parse_expr()?);
                    self.expect(TokenKind::RParen)?;
                    self.expect(TokenKind::Semi)?;
                }
                let body = self.parse_block()?;
                Ok(Stmt::new(StmtKind::While { guard, invariants, body }, start))
            }
            TokenKind::KwIf => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let cond = self.parse_expr()?;
                self.expect(TokenKind::RParen)?;
                let then_body = self.parse_block()?;
                let else_body =
                    if self.eat(&TokenKind::KwElse) { self.parse_block()? } else { Vec::new() };
                Ok(Stmt::new(StmtKind::If { cond, then_body, else_body }, start))
            }
            TokenKind::KwAssert => {
                self.bump();
                self.expect(TokenKind::LBracket)?;
                let (label, _) = self.expect_ident("assert label")?;
                self.expect(TokenKind::RBracket)?;
                self.expect(TokenKind::Colon)?;
                self.expect(TokenKind::LParen)?;
                let cond = self.parse_expr()?;
                self.expect(TokenKind::RParen)?;
                let end = self.expect(TokenKind::Semi)?.span;
                Ok(Stmt::new(StmtKind::Assert { label, cond }, start.merge(&end)))
            }
            TokenKind::KwAssume => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let cond = self.parse_expr()?;
                self.expect(TokenKind::RParen)?;
                let end = self.expect(TokenKind::Semi)?.span;
                Ok(Stmt::new(StmtKind::Assume { cond }, start.merge(&end)))
            }
            TokenKind::KwTick => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let amount = self.parse_expr()?;
                self.expect(TokenKind::RParen)?;
                let end = self.expect(TokenKind::Semi)?.span;
                Ok(Stmt::new(StmtKind::Tick { amount }, start.merge(&end)))
            }
            TokenKind::Ident(target) => {
                self.bump();
                self.expect(TokenKind::Walrus)?;
                let rhs = self.parse_expr()?;
                let end = self.expect(TokenKind::Semi)?.span;
                Ok(Stmt::new(StmtKind::Assign { target, rhs }, start.merge(&end)))
            }
            other => Err(self.error_here(format!("expected a statement, found {other}"))),
        }
    }

    fn parse_expr(&mut self) -> PResult<Expr> {
        self.parse_or()
    }

    fn parse_or(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_and()?;
        while self.eat(&TokenKind::OrOr) {
            let rhs = self.parse_and()?;
            lhs = Expr::binary(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_comparison()?;
        while self.eat(&TokenKind::AndAnd) {
            let rhs = self.parse_comparison()?;
            lhs = Expr::binary(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn comparison_op(&self) -> Option<BinOp> {
        Some(match self.peek_kind() {
            TokenKind::EqEq => BinOp::Eq,
            TokenKind::NotEq => BinOp::Ne,
            TokenKind::Lt => BinOp::Lt,
            TokenKind::Le => BinOp::Le,
            TokenKind::Gt => BinOp::Gt,
            TokenKind::Ge => BinOp::Ge,
            _ => return None,
        })
    }

    fn parse_comparison(&mut self) -> PResult<Expr> {
        let lhs = self.parse_additive()?;
        let Some(op) = self.comparison_op() else { return Ok(lhs) };
        self.bump();
        let rhs = self.parse_additive()?;
        let expr = Expr::binary(op, lhs, rhs);
        // Non-associative: a second comparison at the same level is a
        // syntax error rather than a silent left fold.
        if self.comparison_op().is_some() {
            return Err(self.error_here(
                "comparison operators are non-associative; parenthesize to chain them".to_string(),
            ));
        }
        Ok(expr)
    }

    fn parse_additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_multiplicative()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Plus => BinOp::Add,
                TokenKind::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.parse_multiplicative()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn parse_multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.parse_unary()?;
        loop {
            let op = match self.peek_kind() {
                TokenKind::Star => BinOp::Mul,
                TokenKind::KwDiv => BinOp::Div,
                TokenKind::KwMod => BinOp::Mod,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.parse_unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        let span = self.peek().span.clone();
        let op = match self.peek_kind() {
            TokenKind::Minus => Some(UnOp::Neg),
            TokenKind::Bang => Some(UnOp::Not),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let arg = self.parse_unary()?;
            let span = span.merge(&arg.span);
            return Ok(Expr::new(ExprKind::Unary { op, arg: Box::new(arg) }, span));
        }
        self.parse_atom()
    }

    fn parse_atom(&mut self) -> PResult<Expr> {
        let span = self.peek().span.clone();
        match self.peek_kind().clone() {
            TokenKind::IntLit(value) => {
                self.bump();
                Ok(Expr::new(ExprKind::IntLit(value), span))
            }
            TokenKind::KwTrue => {
                self.bump();
                Ok(Expr::new(ExprKind::BoolLit(true), span))
            }
            TokenKind::KwFalse => {
                self.bump();
                Ok(Expr::new(ExprKind::BoolLit(false), span))
            }
            TokenKind::Ident(name) => {
                self.bump();
                Ok(Expr::new(ExprKind::Var(name), span))
            }
            TokenKind::LParen => {
                self.bump();
                let inner = self.parse_expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            other => Err(self.error_here(format!("expected an expression, found {other}"))),
        }
    }
}
