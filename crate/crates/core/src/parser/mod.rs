//! Front end for `.dial` sources.
//!
//! ```text
//! dial 0.1
//! dialect sys
//!
//! diagram "Tagging" {
//!   data s: S
//!   node pos: POS "tagger" perf(acc=0.97@"WSJ")
//!   edge s -> pos
//! }
//! ```

pub mod ast;
mod format;
mod lexer;
mod lower;
mod parse;

pub use ast::SourceAst;
pub use format::{format, quote};
pub use lexer::{tokenize, Token, TokenKind, KEYWORDS};
pub use lower::{lower, parse_formal_list, Lowered, SourceMap};
pub use parse::parse;

use crate::diag::Diagnostic;

/// Tokenizes and parses source text.
pub fn parse_source(src: &str) -> Result<SourceAst, Vec<Diagnostic>> {
    parse(&tokenize(src)?)
}

/// Canonical formatting of source text.
pub fn format_source(src: &str) -> Result<String, Vec<Diagnostic>> {
    parse_source(src).map(|ast| format(&ast))
}
