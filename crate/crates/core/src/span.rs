//! Source locations and diagnostics shared by the front end and the
//! verification pipeline.

use std::fmt;
use std::sync::Arc;

/// A region of a source file, 1-based and inclusive on both ends.
#[derive(Debug, Clone)]
pub struct Span {
    pub file: Arc<str>,
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub fn new(file: Arc<str>, start_line: u32, start_col: u32, end_line: u32, end_col: u32) -> Self {
        debug_assert!(
            (start_line, start_col) <= (end_line, end_col),
            "span start must not follow its end"
        );
        Span { file, start_line, start_col, end_line, end_col }
    }

    /// Placeholder span for nodes built by the tool itself rather than
    /// read from a file.
    pub fn synthetic() -> Self {
        Span { file: Arc::from("<synthetic>"), start_line: 1, start_col: 1, end_line: 1, end_col: 1 }
    }

    /// Smallest span covering both `self` and `other`.
    pub fn merge(&self, other: &Span) -> Span {
        let (start_line, start_col) =
            (self.start_line, self.start_col).min((other.start_line, other.start_col));
        let (end_line, end_col) =
            (self.end_line, self.end_col).max((other.end_line, other.end_col));
        Span { file: self.file.clone(), start_line, start_col, end_line, end_col }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.start_line, self.start_col)
    }
}

/// How bad a diagnostic is.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

/// Machine-readable diagnostic category.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticCode {
    LexicalError,
    SyntaxError,
    UnknownDialect,
    TypeMismatch,
    UndeclaredVariable,
    DuplicateDeclaration,
    DuplicateProcedure,
    DuplicateLabel,
    AssignToParameter,
    ReservedIdentifier,
    SpecScope,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::LexicalError => "LexicalError",
            DiagnosticCode::SyntaxError => "SyntaxError",
            DiagnosticCode::UnknownDialect => "UnknownDialect",
            DiagnosticCode::TypeMismatch => "TypeMismatch",
            DiagnosticCode::UndeclaredVariable => "UndeclaredVariable",
            DiagnosticCode::DuplicateDeclaration => "DuplicateDeclaration",
            DiagnosticCode::DuplicateProcedure => "DuplicateProcedure",
            DiagnosticCode::DuplicateLabel => "DuplicateLabel",
            DiagnosticCode::AssignToParameter => "AssignToParameter",
            DiagnosticCode::ReservedIdentifier => "ReservedIdentifier",
            DiagnosticCode::SpecScope => "SpecScope",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A diagnostic produced by the parser or the type checker.
#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: DiagnosticCode,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(code: DiagnosticCode, message: impl Into<String>, span: Span) -> Self {
        let message = message.into();
        debug_assert!(!message.is_empty());
        Diagnostic { severity: Severity::Error, code, message, span }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}: {sev}[{}]: {}", self.span, self.code, self.message)
    }
}
