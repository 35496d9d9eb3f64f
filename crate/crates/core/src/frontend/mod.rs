//! DRAMml frontend: lexing, parsing, validation and rendering.
//!
//! The grammar, in brief:
//!
//! ```text
//! document    := item*
//! item        := "standard" IDENT ";"
//!              | "Timings" "{" (IDENT ";")* "}"
//!              | "Places" "{" place* "}"
//!              | "Transitions" "{" (IDENT ";")* "}"
//!              | "Arcs" "{" arc* "}"
//!              | IDENT ":" IDENT "{" item* "}"          // <count> : <hierarchy>
//! place       := IDENT ("capacity" "(" INT ")" | "lifetime" "(" IDENT ")" | "init" "(" INT ")")* ";"
//! arc         := IDENT op IDENT ("(" IDENT ")")? ("@" qualifier ("(" IDENT ")")?)? ";"
//! op          := "->" | "-o" | "->>" | "-<>"
//! qualifier   := "same" | "sibling" | "all"
//! ```
//!
//! `//` starts a line comment. The full reference lives in `docs/dramml.md`.

pub mod ast;
mod lexer;
mod render;
pub mod syntax;
mod validate;

use std::fmt;

pub use ast::*;
pub use render::render;
pub(crate) use render::arc_text;
pub use syntax::parse_document;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn new(span: Span, message: impl Into<String>) -> Self {
        Self {
            span,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.column, self.message)
    }
}

/// Every problem found in a document, ordered by position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Parse and validate a complete DRAMml document.
pub fn parse(source: &str) -> Result<NetSpec, ParseError> {
    let doc = parse_document(source).map_err(|d| ParseError {
        diagnostics: vec![d],
    })?;
    validate::validate(&doc).map_err(|diagnostics| ParseError { diagnostics })
}
