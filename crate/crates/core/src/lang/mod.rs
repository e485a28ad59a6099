//! Front end: lexing, parsing, type checking and desugaring.

pub mod ast;
mod desugar;
mod lexer;
mod parser;
pub mod pretty;
mod typeck;

use std::fmt;

pub use ast::*;
pub use desugar::desugar;
pub use parser::{parse_expr, parse_formula, parse_program};
pub use typeck::{expr_type, typecheck, TypeError, TypedProgram};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
    /// What the parser would have accepted at `span`.
    pub expected: Vec<String>,
}

impl ParseError {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        ParseError { span, message: message.into(), expected: Vec::new() }
    }

    pub(crate) fn expected(span: Span, found: &lexer::Tok, expected: &[&str]) -> Self {
        ParseError {
            span,
            message: format!("expected {}, found {found}", expected.join(" or ")),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Any front-end failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrontendError {
    Parse(ParseError),
    Type(Vec<TypeError>),
}

impl fmt::Display for FrontendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrontendError::Parse(e) => write!(f, "{e}"),
            FrontendError::Type(es) => {
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{e}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for FrontendError {}

/// Parse, type check and desugar.
pub fn load(src: &str) -> Result<TypedProgram, FrontendError> {
    let p = parse_program(src).map_err(FrontendError::Parse)?;
    typecheck(&p).map_err(FrontendError::Type)
}
