//! Text formats for both formalisms.
//!
//! ```text
//! psystem  := "psystem" "{" "alphabet" IDENT* ";" membrane toprule* "}"
//! membrane := "membrane" INT "{" ( "contents" multiset ";" | rule | membrane )* "}"
//! rule     := "rule" IDENT [ "in" INT ] ":" multiset "->" rhs [ "@" INT ] ";"
//! toprule  := "rule" IDENT "in" INT ":" multiset "->" rhs [ "@" INT ] ";"
//! rhs      := "eps" | ( "(" multiset "," target ")" )+
//! target   := "here" | "out" | "in" INT
//! multiset := "eps" | ( IDENT [ "^" INT ] )+
//!
//! petri    := "petri" "{" stmt* "}"
//! stmt     := "place" IDENT+ ";"
//!           | "transition" IDENT [ "@" INT ] [ "loc" "=" INT ] ";"
//!           | IDENT ( "-" INT "->" | "->" ) IDENT ";"
//!           | "marking" ( IDENT "=" INT )* ";"
//! ```
//!
//! `#` starts a comment running to the end of the line. Rules inside a
//! membrane block live in that membrane; rules after the membrane tree name
//! their membrane with `in`. Rule order is textual order. Delays default to
//! 0, localities to 1, arc weights to 1.

mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

pub use parser::{parse_petri, parse_psystem};
pub use printer::{print_petri, print_psystem};

/// Half-open byte range `[start, end)` plus the 1-based line and column of
/// `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}: expected {}, found {found}", .expected.join(" or "))]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: Vec<String>,
    pub found: String,
    pub message: String,
}

/// A syntactically fine model that is not a valid system or net.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}{message}", .span.map(|s| format!("{s}: ")).unwrap_or_default())]
pub struct ValidationError {
    pub span: Option<SourceSpan>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("invalid model at {0}")]
    Validation(#[from] ValidationError),
}

/// Which formalism a source file holds, judged by its first keyword.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    PSystem,
    Petri,
}

pub fn detect_kind(src: &str) -> Option<ModelKind> {
    let first = lexer::tokenize(src).ok()?.into_iter().next()?;
    match first.tok {
        lexer::Tok::Ident(s) if s == "psystem" => Some(ModelKind::PSystem),
        lexer::Tok::Ident(s) if s == "petri" => Some(ModelKind::Petri),
        _ => None,
    }
}
