//! Source text to typed diagram, stopping at the first stage that errs.

use crate::diag::{has_errors, Diagnostic, Location, Span};
use crate::model::validate_structure;
use crate::parser::{lower, parse, tokenize, SourceMap};
use crate::typecheck::{check_diagram, TypedDiagram};

#[derive(Debug, Clone)]
pub struct Compiled {
    pub source_map: Option<SourceMap>,
    /// Present once lowering, structural validation and type checking ran.
    pub typed: Option<TypedDiagram>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Compiled {
    pub fn has_errors(&self) -> bool {
        has_errors(&self.diagnostics)
    }

    /// Source position of a diagnostic, when one is known.
    pub fn locate(&self, d: &Diagnostic) -> Option<Span> {
        match &d.location {
            Location::Source(s) => Some(*s),
            other => self.source_map.as_ref()?.span_of(other),
        }
    }

    /// The typed diagram, if compilation finished without errors.
    pub fn clean(&self) -> Option<&TypedDiagram> {
        self.typed.as_ref().filter(|_| !self.has_errors())
    }
}

pub fn compile(src: &str) -> Compiled {
    let failed = |diagnostics| Compiled {
        source_map: None,
        typed: None,
        diagnostics,
    };
    let tokens = match tokenize(src) {
        Ok(t) => t,
        Err(d) => return failed(d),
    };
    let ast = match parse(&tokens) {
        Ok(a) => a,
        Err(d) => return failed(d),
    };
    let lowered = lower(&ast);
    let mut diagnostics = lowered.diagnostics;
    diagnostics.extend(validate_structure(&lowered.diagram));
    if has_errors(&diagnostics) {
        return Compiled {
            source_map: Some(lowered.source_map),
            typed: None,
            diagnostics,
        };
    }
    let typed = check_diagram(&lowered.diagram);
    diagnostics.extend(typed.diagnostics.iter().cloned());
    Compiled {
        source_map: Some(lowered.source_map),
        typed: Some(typed),
        diagnostics,
    }
}
