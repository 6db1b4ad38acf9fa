//! Source-level syntax tree. Every declaration keeps its span; the tree
//! is lossless up to whitespace and comments.

use crate::diag::Span;
use crate::model::{FlowKind, Region, Side, TableKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanned<T> {
    pub value: T,
    pub span: Span,
}

impl<T> Spanned<T> {
    pub fn new(value: T, span: Span) -> Self {
        Spanned { value, span }
    }
}

pub type Ident = Spanned<String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceAst {
    pub version: Spanned<String>,
    pub dialects: Vec<Ident>,
    pub diagram: DiagramDecl,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramDecl {
    pub name: String,
    pub placement: Option<Spanned<Region>>,
    pub items: Vec<Item>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Node(NodeDecl),
    Data(DataDecl),
    Edge(EdgeDecl),
    Detail(DetailDecl),
    Table(TableDecl),
    Embedding(EmbeddingDecl),
    Extend(ExtendDecl),
}

impl Item {
    pub fn span(&self) -> Span {
        match self {
            Item::Node(d) => d.span,
            Item::Data(d) => d.span,
            Item::Edge(d) => d.span,
            Item::Detail(d) => d.span,
            Item::Table(d) => d.span,
            Item::Embedding(d) => d.span,
            Item::Extend(d) => d.span,
        }
    }
}

/// A `key=value` pair. Values are identifiers, numbers or strings; the
/// stored value is the decoded text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub key: String,
    pub value: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerfItem {
    pub metric: String,
    /// Numeric literal as written.
    pub value: String,
    pub corpus: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeDecl {
    pub id: Ident,
    pub code: Ident,
    pub params: Vec<Param>,
    pub label: Option<String>,
    pub perf: Vec<PerfItem>,
    pub placement: Option<Spanned<Region>>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ResourceTag {
    Dataset(String),
    Gold,
    Kb,
    Kbfn,
}

impl ResourceTag {
    pub fn code(&self) -> &'static str {
        match self {
            ResourceTag::Dataset(_) => "dataset",
            ResourceTag::Gold => "gold",
            ResourceTag::Kb => "kb",
            ResourceTag::Kbfn => "kbfn",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataDecl {
    pub id: Ident,
    /// Term literal with inner whitespace removed.
    pub term: Spanned<String>,
    pub tag: Option<ResourceTag>,
    pub label: Option<String>,
    pub placement: Option<Spanned<Region>>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortRef {
    pub node: Ident,
    pub port: Option<Ident>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeDecl {
    pub source: PortRef,
    pub flow: FlowKind,
    pub target: PortRef,
    pub term: Option<Spanned<String>>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetailDecl {
    pub id: Ident,
    pub owner: Ident,
    pub entry: Option<Side>,
    pub exit: Option<Side>,
    pub items: Vec<Item>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableDecl {
    pub id: Ident,
    pub kind: Option<TableKind>,
    pub placement: Option<Spanned<Region>>,
    pub rows: Vec<(String, String)>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingDecl {
    pub id: Ident,
    pub dim: Spanned<String>,
    pub label: Option<String>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtendKind {
    Symbol,
    Task,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Str(String),
    Ident(String),
    Number(String),
    Star,
}

impl Value {
    pub fn text(&self) -> &str {
        match self {
            Value::Str(s) | Value::Ident(s) | Value::Number(s) => s,
            Value::Star => "*",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: Value,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendDecl {
    pub kind: ExtendKind,
    pub id: Ident,
    pub entries: Vec<Entry>,
    pub span: Span,
}
