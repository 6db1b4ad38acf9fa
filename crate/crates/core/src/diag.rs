//! Coded diagnostics shared by every pipeline stage.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Stable diagnostic codes. The numeric value of a code never changes
/// between releases; new codes are only ever appended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    /// Lexical error.
    E001,
    /// Syntax error.
    E002,
    /// Duplicate declaration id.
    E003,
    /// Malformed data-term literal.
    E004,
    /// Invalid extension, or one colliding with a built-in code.
    E005,
    /// Unresolved node code or dialect.
    E010,
    /// Dangling or out-of-range port.
    E011,
    /// Detail-group nesting cycle.
    E012,
    /// Persist/query edge endpoint is not a resource.
    E013,
    /// Declaration value out of range (perf, embedding dims, table rows).
    E014,
    /// Format or language version mismatch.
    E020,
    /// Malformed interchange document.
    E021,
    /// Arity violation.
    E101,
    /// Domain mismatch.
    E102,
    /// Dimension conflict.
    E103,
    /// Declared edge term conflicts with the inferred term.
    E104,
    /// Layout does not belong to the diagram being rendered.
    E301,
    W201,
    W202,
    W203,
    W204,
    W205,
    W206,
    W207,
    W208,
}

impl Code {
    pub const ALL: [Code; 25] = [
        Code::E001,
        Code::E002,
        Code::E003,
        Code::E004,
        Code::E005,
        Code::E010,
        Code::E011,
        Code::E012,
        Code::E013,
        Code::E014,
        Code::E020,
        Code::E021,
        Code::E101,
        Code::E102,
        Code::E103,
        Code::E104,
        Code::E301,
        Code::W201,
        Code::W202,
        Code::W203,
        Code::W204,
        Code::W205,
        Code::W206,
        Code::W207,
        Code::W208,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::E001 => "E001",
            Code::E002 => "E002",
            Code::E003 => "E003",
            Code::E004 => "E004",
            Code::E005 => "E005",
            Code::E010 => "E010",
            Code::E011 => "E011",
            Code::E012 => "E012",
            Code::E013 => "E013",
            Code::E014 => "E014",
            Code::E020 => "E020",
            Code::E021 => "E021",
            Code::E101 => "E101",
            Code::E102 => "E102",
            Code::E103 => "E103",
            Code::E104 => "E104",
            Code::E301 => "E301",
            Code::W201 => "W201",
            Code::W202 => "W202",
            Code::W203 => "W203",
            Code::W204 => "W204",
            Code::W205 => "W205",
            Code::W206 => "W206",
            Code::W207 => "W207",
            Code::W208 => "W208",
        }
    }

    /// One-line description of what the code reports.
    pub const fn summary(self) -> &'static str {
        match self {
            Code::E001 => "lexical error",
            Code::E002 => "syntax error",
            Code::E003 => "duplicate declaration id",
            Code::E004 => "malformed data-term literal",
            Code::E005 => "invalid or colliding extension",
            Code::E010 => "unresolved node code or dialect",
            Code::E011 => "dangling or out-of-range port",
            Code::E012 => "detail-group nesting cycle",
            Code::E013 => "persist/query edge endpoint is not a resource",
            Code::E014 => "declaration value out of range",
            Code::E020 => "format or language version mismatch",
            Code::E021 => "malformed interchange document",
            Code::E101 => "arity violation",
            Code::E102 => "domain mismatch",
            Code::E103 => "dimension conflict",
            Code::E104 => "declared edge term conflicts with the inferred term",
            Code::E301 => "layout does not belong to the diagram being rendered",
            Code::W201 => "title placed away from the top-left corner",
            Code::W202 => "meta table placed away from the bottom-right corner",
            Code::W203 => "non-recurrent edge flows right to left",
            Code::W204 => "detail group entry side differs from the owner's input side",
            Code::W205 => "node uses an extension symbol",
            Code::W206 => "label spells out the name of an existing symbol",
            Code::W207 => "task or classifier node without a perf annotation",
            Code::W208 => "feature and component nodes mixed as siblings outside a detail group",
        }
    }

    /// E-codes are errors, W-codes warnings.
    pub fn severity(self) -> Severity {
        if self.as_str().starts_with('E') {
            Severity::Error
        } else {
            Severity::Warning
        }
    }

    pub fn parse(s: &str) -> Option<Code> {
        Code::ALL.iter().copied().find(|c| c.as_str() == s)
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// A position in source text. Lines and columns are 1-based and count
/// characters, not bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Span {
    pub offset: usize,
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl Span {
    pub fn new(offset: usize, line: u32, col: u32, len: u32) -> Self {
        Span {
            offset,
            line,
            col,
            len,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    Source(Span),
    Node(String),
    Edge(String),
    Group(String),
    Table(String),
    Diagram,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Source(s) => write!(f, "{}:{}", s.line, s.col),
            Location::Node(id) => write!(f, "node `{id}`"),
            Location::Edge(id) => write!(f, "edge `{id}`"),
            Location::Group(id) => write!(f, "detail `{id}`"),
            Location::Table(id) => write!(f, "table `{id}`"),
            Location::Diagram => f.write_str("diagram"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub location: Location,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: Code, location: Location, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity: code.severity(),
            location,
            message: message.into(),
        }
    }

    pub fn at(code: Code, span: Span, message: impl Into<String>) -> Self {
        Self::new(code, Location::Source(span), message)
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}] {}: {}",
            self.severity, self.code, self.location, self.message
        )
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_prefix_decides_severity() {
        for code in Code::ALL {
            let s = code.as_str();
            assert_eq!(s.len(), 4);
            assert!(s[1..].chars().all(|c| c.is_ascii_digit()));
            match &s[..1] {
                "E" => assert_eq!(code.severity(), Severity::Error),
                "W" => assert_eq!(code.severity(), Severity::Warning),
                other => panic!("bad prefix {other}"),
            }
            assert_eq!(Code::parse(s), Some(code));
        }
    }
}
