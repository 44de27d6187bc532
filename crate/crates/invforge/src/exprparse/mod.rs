//! The right-hand-side language: parsing user-supplied `f(u, u_x)`,
//! deterministic plain/LaTeX rendering of engine output, and the JSON wire
//! format for expressions.
//!
//! Input is deliberately narrow — `u`, `v` (alias `ux`), exact literals, the
//! four analytic functions and arithmetic — while the printers handle every
//! symbol the engine produces.

mod json;
mod parser;
mod printer;

pub use json::{from_json, to_json};
pub use parser::parse;
pub use printer::{latex, plain, print, PrintStyle};

use thiserror::Error;

/// Errors from the text parser and the JSON reader.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    /// Malformed input, with the 1-based position of the offending token.
    #[error("syntax error at {line}:{col}: {msg}")]
    SyntaxError { line: usize, col: usize, msg: String },
    /// An identifier outside the language (this includes `t`, `x` and jet
    /// names: right-hand sides depend on `u` and `v` only).
    #[error("unknown identifier `{name}` at {line}:{col}")]
    UnknownIdentifier { line: usize, col: usize, name: String },
    /// A JSON document that does not match the expression schema.
    #[error("expression schema violation: {0}")]
    SchemaError(String),
}
