//! Compiler core for DIAL, a diagram language for AI system architectures.
//!
//! The pipeline is: [`parser`] (text to AST to [`model::Diagram`]),
//! [`model::validate_structure`], [`typecheck::check_diagram`],
//! [`layout::layout`], [`lint::lint`], and the [`render`] emitters.
//! [`pipeline`] wires the stages together.

pub mod diag;
pub mod graph;
pub mod layout;
pub mod lint;
pub mod model;
pub mod parser;
pub mod pipeline;
pub mod registry;
pub mod render;
pub mod term;
pub mod typecheck;

pub use diag::{Code, Diagnostic, Location, Severity, Span};
pub use model::Diagram;

/// Toolchain version stamped into rendered output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
