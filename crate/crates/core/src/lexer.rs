//! Hand-written lexer for `.bl` source text.
//!
//! Identifiers are ASCII `[A-Za-z_][A-Za-z0-9_]*`; integer literals are
//! unsigned decimal digit runs (negation is a unary operator); `//` starts
//! a line comment. Positions are 1-based lines and columns.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::span::{Diagnostic, DiagnosticCode, Span};

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    IntLit(BigInt),
    KwProgram,
    KwProcedure,
    KwReturns,
    KwSpec,
    KwRequires,
    KwEnsures,
    KwVar,
    KwWhile,
    KwInvariant,
    KwIf,
    KwElse,
    KwAssert,
    KwAssume,
    KwTick,
    KwInt,
    KwBool,
    KwTrue,
    KwFalse,
    KwDiv,
    KwMod,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Colon,
    Comma,
    Walrus,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    AndAnd,
    OrOr,
    Bang,
    Eof,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Ident(name) => return write!(f, "identifier `{name}`"),
            TokenKind::IntLit(v) => return write!(f, "integer literal `{v}`"),
            TokenKind::KwProgram => "`program`",
            TokenKind::KwProcedure => "`procedure`",
            TokenKind::KwReturns => "`returns`",
            TokenKind::KwSpec => "`spec`",
            TokenKind::KwRequires => "`requires`",
            TokenKind::KwEnsures => "`ensures`",
            TokenKind::KwVar => "`var`",
            TokenKind::KwWhile => "`while`",
            TokenKind::KwInvariant => "`invariant`",
            TokenKind::KwIf => "`if`",
            TokenKind::KwElse => "`else`",
            TokenKind::KwAssert => "`assert`",
            TokenKind::KwAssume => "`assume`",
            TokenKind::KwTick => "`tick`",
            TokenKind::KwInt => "`int`",
            TokenKind::KwBool => "`bool`",
            TokenKind::KwTrue => "`true`",
            TokenKind::KwFalse => "`false`",
            TokenKind::KwDiv => "`div`",
            TokenKind::KwMod => "`mod`",
            TokenKind::LParen => "`(`",
            TokenKind::RParen => "`)`",
            TokenKind::LBrace => "`{`",
            TokenKind::RBrace => "`}`",
            TokenKind::LBracket => "`[`",
            TokenKind::RBracket => "`]`",
            TokenKind::Semi => "`;`",
            TokenKind::Colon => "`:`",
            TokenKind::Comma => "`,`",
            TokenKind::Walrus => "`:=`",
            TokenKind::EqEq => "`==`",
            TokenKind::NotEq => "`!=`",
            TokenKind::Lt => "`<`",
            TokenKind::Le => "`<=`",
            TokenKind::Gt => "`>`",
            TokenKind::Ge => "`>=`",
            TokenKind::Plus => "`+`",
            TokenKind::Minus => "`-`",
            TokenKind::Star => "`*`",
            TokenKind::AndAnd => "`&&`",
            TokenKind::OrOr => "`||`",
            TokenKind::Bang => "`!`",
            TokenKind::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

fn keyword(word: &str) -> Option<TokenKind> {
    Some(match word {
        "program" => TokenKind::KwProgram,
        "procedure" => TokenKind::KwProcedure,
        "returns" => TokenKind::KwReturns,
        "spec" => TokenKind::KwSpec,
        "requires" => TokenKind::KwRequires,
        "ensures" => TokenKind::KwEnsures,
        "var" => TokenKind::KwVar,
        "while" => TokenKind::KwWhile,
        "invariant" => TokenKind::KwInvariant,
        "if" => TokenKind::KwIf,
        "else" => TokenKind::KwElse,
        "assert" => TokenKind::KwAssert,
        "assume" => TokenKind::KwAssume,
        "tick" => TokenKind::KwTick,
        "int" => TokenKind::KwInt,
        "bool" => TokenKind::KwBool,
        "true" => TokenKind::KwTrue,
        "false" => TokenKind::KwFalse,
        "div" => TokenKind::KwDiv,
        "mod" => TokenKind::KwMod,
        _ => return None,
    })
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    file: Arc<str>,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }

    fn span_from(&self, start_line: u32, start_col: u32) -> Span {
        // End position is the last consumed column.
        let (end_line, end_col) = if self.col > 1 { (self.line, self.col - 1) } else { (self.line, 1) };
        Span::new(self.file.clone(), start_line, start_col, end_line.max(start_line), end_col.max(1))
    }
}

/// Tokenize `source`. Unrecognized characters produce `LexicalError`
/// diagnostics and are skipped; the token stream always ends with `Eof`.
pub fn lex(source: &str, file: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let file: Arc<str> = Arc::from(file);
    let mut lx = Lexer { chars: source.chars().peekable(), file, line: 1, col: 1 };
    let mut tokens = Vec::new();
    let mut diags = Vec::new();

    loop {
        // Skip whitespace and comments.
        loop {
            match lx.peek() {
                Some(c) if c.is_whitespace() => {
                    lx.bump();
                }
                Some('/') => {
                    let (line, col) = (lx.line, lx.col);
                    lx.bump();
                    if lx.peek() == Some('/') {
                        while let Some(c) = lx.peek() {
                            if c == '\n' {
                                break;
                            }
                            lx.bump();
                        }
                    } else {
                        diags.push(Diagnostic::error(
                            DiagnosticCode::LexicalError,
                            "stray `/` (did you mean a `//` comment or `div`?)",
                            lx.span_from(line, col),
                        ));
                    }
                }
                _ => break,
            }
        }

        let (line, col) = (lx.line, lx.col);
        let Some(c) = lx.peek() else {
            tokens.push(Token {
                kind: TokenKind::Eof,
                span: Span::new(lx.file.clone(), line, col, line, col),
            });
            break;
        };

        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(c) = lx.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    lx.bump();
                } else {
                    break;
                }
            }
            let kind = keyword(&word).unwrap_or(TokenKind::Ident(word));
            tokens.push(Token { kind, span: lx.span_from(line, col) });
            continue;
        }

        if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(c) = lx.peek() {
                if c.is_ascii_digit() {
                    digits.push(c);
                    lx.bump();
                } else {
                    break;
                }
            }
            let value = digits.parse::<BigInt>().expect("digit run parses");
            tokens.push(Token { kind: TokenKind::IntLit(value), span: lx.span_from(line, col) });
            continue;
        }

        lx.bump();
        let two = |lx: &mut Lexer, next: char, hit: TokenKind, miss: Option<TokenKind>| {
            if lx.peek() == Some(next) {
                lx.bump();
                Some(hit)
            } else {
                miss
            }
        };
        let kind = match c {
            '(' => Some(TokenKind::LParen),
            ')' => Some(TokenKind::RParen),
            '{' => Some(TokenKind::LBrace),
            '}' => Some(TokenKind::RBrace),
            '[' => Some(TokenKind::LBracket),
            ']' => Some(TokenKind::RBracket),
            ';' => Some(TokenKind::Semi),
            ',' => Some(TokenKind::Comma),
            '+' => Some(TokenKind::Plus),
            '-' => Some(TokenKind::Minus),
            '*' => Some(TokenKind::Star),
            ':' => two(&mut lx, '=', TokenKind::Walrus, Some(TokenKind::Colon)),
            '=' => two(&mut lx, '=', TokenKind::EqEq, None),
            '!' => two(&mut lx, '=', TokenKind::NotEq, Some(TokenKind::Bang)),
            '<' => two(&mut lx, '=', TokenKind::Le, Some(TokenKind::Lt)),
            '>' => two(&mut lx, '=', TokenKind::Ge, Some(TokenKind::Gt)),
            '&' => two(&mut lx, '&', TokenKind::AndAnd, None),
            '|' => two(&mut lx, '|', TokenKind::OrOr, None),
            _ => None,
        };
        match kind {
            Some(kind) => tokens.push(Token { kind, span: lx.span_from(line, col) }),
            None => diags.push(Diagnostic::error(
                DiagnosticCode::LexicalError,
                format!("unrecognized character `{c}`"),
                lx.span_from(line, col),
            )),
        }
    }

    (tokens, diags)
}
