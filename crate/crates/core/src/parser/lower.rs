use std::collections::{BTreeMap, BTreeSet};

use crate::diag::{Code, Diagnostic, Location, Span};
use crate::model::{
    DetailGroup, Diagram, Direction, Edge, EmbeddingDecl as IrEmbedding, GroupMembers, MetaTable, Node, NodeKind,
    PerfAnnotation, Port, Region, ShapeClass, Side, Slot, TableKind, FORMAT_VERSION,
};
use crate::registry::{
    Dialect, DialectSet, Extension, FormalStructure, FormalTerm, Registry, Signature, SymbolCategory, SymbolDef,
};
use crate::term::DataTerm;

use super::ast::*;

/// Spans of lowered declarations, for mapping IR locations back to source.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceMap {
    pub diagram: Span,
    pub nodes: BTreeMap<String, Span>,
    pub edges: BTreeMap<String, Span>,
    pub groups: BTreeMap<String, Span>,
    pub tables: BTreeMap<String, Span>,
}

impl SourceMap {
    pub fn span_of(&self, loc: &Location) -> Option<Span> {
        match loc {
            Location::Source(s) => Some(*s),
            Location::Node(id) => self.nodes.get(id).copied(),
            Location::Edge(id) => self.edges.get(id).copied(),
            Location::Group(id) => self.groups.get(id).copied(),
            Location::Table(id) => self.tables.get(id).copied(),
            Location::Diagram => Some(self.diagram),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lowered {
    pub diagram: Diagram,
    pub source_map: SourceMap,
    pub diagnostics: Vec<Diagnostic>,
}

struct Lowerer {
    d: Diagram,
    map: SourceMap,
    diags: Vec<Diagnostic>,
    registry: Registry,
    embeddings: BTreeSet<String>,
    pending_edges: Vec<(String, EdgeDecl, Option<usize>)>,
}

/// Builds the IR from a syntax tree. Code resolution is left to
/// `validate_structure`; this stage reports duplicate declarations (E003),
/// malformed term literals (E004) and rejected extensions (E005).
pub fn lower(ast: &SourceAst) -> Lowered {
    let mut diags = Vec::new();
    if ast.version.value != FORMAT_VERSION {
        diags.push(Diagnostic::at(
            Code::E020,
            ast.version.span,
            format!(
                "language version `{}` is not supported (expected `{FORMAT_VERSION}`)",
                ast.version.value
            ),
        ));
    }
    let mut dialects = DialectSet::new();
    for d in &ast.dialects {
        match d.value.parse::<Dialect>() {
            Ok(dialect) => {
                dialects.insert(dialect);
            }
            Err(e) => diags.push(Diagnostic::at(Code::E010, d.span, e.to_string())),
        }
    }
    if !dialects.contains(&Dialect::Sys) {
        let span = ast.dialects.first().map_or(ast.version.span, |d| d.span);
        diags.push(Diagnostic::at(Code::E010, span, "the `sys` dialect must be declared"));
        dialects.insert(Dialect::Sys);
    }
    let d = Diagram {
        format_version: FORMAT_VERSION.to_string(),
        name: ast.diagram.name.clone(),
        dialects,
        nodes: Vec::new(),
        edges: Vec::new(),
        groups: Vec::new(),
        tables: Vec::new(),
        embeddings: Vec::new(),
        title_placement: ast.diagram.placement.as_ref().map(|p| p.value),
        extensions: Vec::new(),
    };
    let mut l = Lowerer {
        d,
        map: SourceMap {
            diagram: ast.diagram.span,
            ..SourceMap::default()
        },
        diags,
        registry: Registry::builtin(),
        embeddings: BTreeSet::new(),
        pending_edges: Vec::new(),
    };
    l.extensions(&ast.diagram.items);
    l.items(&ast.diagram.items, None);
    l.edges();
    l.owners();
    Lowered {
        diagram: l.d,
        source_map: l.map,
        diagnostics: l.diags,
    }
}

fn parse_term(lit: &Spanned<String>, diags: &mut Vec<Diagnostic>) -> Option<DataTerm> {
    match lit.value.parse::<DataTerm>() {
        Ok(t) => Some(t),
        Err(e) => {
            diags.push(Diagnostic::at(Code::E004, lit.span, format!("malformed data term `{}`: {e}", lit.value)));
            None
        }
    }
}

fn numbered(name: &str, prefix: &str) -> Option<u32> {
    let digits = name.strip_prefix(prefix)?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

impl Lowerer {
    fn extensions(&mut self, items: &[Item]) {
        for item in items {
            match item {
                Item::Extend(ext) => match build_extension(ext) {
                    Ok(built) => match self.registry.register_extension(built.clone()) {
                        Ok(()) => self.d.extensions.push(built),
                        Err(e) => self.diags.push(Diagnostic::at(Code::E005, ext.span, e.to_string())),
                    },
                    Err(msg) => self.diags.push(Diagnostic::at(Code::E005, ext.span, msg)),
                },
                Item::Detail(det) => self.extensions(&det.items),
                _ => {}
            }
        }
    }

    fn items(&mut self, items: &[Item], group: Option<usize>) {
        for item in items {
            match item {
                Item::Node(n) => {
                    let node = self.node(n);
                    self.push_node(node, n.span, group);
                }
                Item::Data(data) => {
                    let node = self.data(data);
                    self.push_node(node, data.span, group);
                }
                Item::Edge(e) => {
                    let id = format!("e{}", self.pending_edges.len());
                    self.pending_edges.push((id, e.clone(), group));
                }
                Item::Detail(det) => self.detail(det, group),
                Item::Table(t) => self.table(t),
                Item::Embedding(e) => self.embedding(e),
                Item::Extend(_) => {}
            }
        }
    }

    fn push_node(&mut self, node: Node, span: Span, group: Option<usize>) {
        if self.d.node(&node.id).is_some() {
            self.diags.push(Diagnostic::at(Code::E003, span, format!("duplicate declaration of `{}`", node.id)));
            return;
        }
        self.map.nodes.insert(node.id.clone(), span);
        if let Some(g) = group {
            self.d.groups[g].members.nodes.push(node.id.clone());
        }
        self.d.nodes.push(node);
    }

    fn node(&mut self, n: &NodeDecl) -> Node {
        let kind = self
            .registry
            .resolve_any(&n.code.value)
            .map_or(NodeKind::Operator, |r| r.node_kind());
        let mut node = Node::new(&n.id.value, kind, &n.code.value);
        node.label = n.label.clone();
        for p in &n.params {
            if p.key == "shape" {
                match p.value.as_str() {
                    "feature" => node.shape_class = ShapeClass::Feature,
                    "component" => node.shape_class = ShapeClass::Component,
                    other => self.diags.push(Diagnostic::at(
                        Code::E014,
                        p.span,
                        format!("shape must be `feature` or `component`, found `{other}`"),
                    )),
                }
                continue;
            }
            if node.params.insert(p.key.clone(), p.value.clone()).is_some() {
                self.diags.push(Diagnostic::at(Code::E003, p.span, format!("parameter `{}` is given twice", p.key)));
            }
        }
        for p in &n.perf {
            match p.value.parse::<f64>() {
                Ok(value) => node.perf.push(PerfAnnotation {
                    metric: p.metric.clone(),
                    value,
                    corpus: p.corpus.clone(),
                }),
                Err(_) => self.diags.push(Diagnostic::at(Code::E014, p.span, "perf value is not a number")),
            }
        }
        node.placement_hint = n.placement.as_ref().map(|p| p.value);
        node
    }

    fn data(&mut self, data: &DataDecl) -> Node {
        let term = parse_term(&data.term, &mut self.diags);
        let mut node = match &data.tag {
            None => {
                let mut n = Node::new(&data.id.value, NodeKind::Io, "data");
                n.term = term;
                n
            }
            Some(tag) => {
                let mut n = Node::new(&data.id.value, NodeKind::Resource, tag.code());
                n.term = term;
                if let ResourceTag::Dataset(name) = tag {
                    if data.label.is_some() {
                        n.params.insert("source".into(), name.clone());
                    } else {
                        n.label = Some(name.clone());
                    }
                }
                n
            }
        };
        if data.label.is_some() {
            node.label = data.label.clone();
        }
        node.placement_hint = data.placement.as_ref().map(|p| p.value);
        node
    }

    fn detail(&mut self, det: &DetailDecl, parent: Option<usize>) {
        if self.d.groups.iter().any(|g| g.id == det.id.value) {
            self.diags.push(Diagnostic::at(
                Code::E003,
                det.id.span,
                format!("duplicate declaration of detail `{}`", det.id.value),
            ));
            self.items(&det.items, parent);
            return;
        }
        self.map.groups.insert(det.id.value.clone(), det.span);
        let idx = self.d.groups.len();
        self.d.groups.push(DetailGroup {
            id: det.id.value.clone(),
            owner: det.owner.value.clone(),
            members: GroupMembers {
                nodes: Vec::new(),
                edges: Vec::new(),
            },
            entry_side: det.entry.unwrap_or(Side::Left),
            exit_side: det.exit.unwrap_or(Side::Right),
        });
        self.items(&det.items, Some(idx));
    }

    fn table(&mut self, t: &TableDecl) {
        if self.d.tables.iter().any(|x| x.id == t.id.value) {
            self.diags.push(Diagnostic::at(
                Code::E003,
                t.id.span,
                format!("duplicate declaration of table `{}`", t.id.value),
            ));
            return;
        }
        self.map.tables.insert(t.id.value.clone(), t.span);
        self.d.tables.push(MetaTable {
            id: t.id.value.clone(),
            kind: t.kind.unwrap_or(TableKind::Freeform),
            rows: t.rows.clone(),
            placement: t.placement.as_ref().map_or(Region::BottomRight, |p| p.value),
        });
    }

    fn embedding(&mut self, e: &EmbeddingDecl) {
        if !self.embeddings.insert(e.id.value.clone()) {
            self.diags.push(Diagnostic::at(
                Code::E003,
                e.id.span,
                format!("duplicate declaration of embedding `{}`", e.id.value),
            ));
            return;
        }
        let Ok(dim) = e.dim.value.parse::<u32>() else {
            self.diags.push(Diagnostic::at(Code::E014, e.dim.span, "embedding dimension is too large"));
            return;
        };
        self.d.embeddings.push(IrEmbedding {
            id: e.id.value.clone(),
            dim,
            label: e.label.clone().unwrap_or_else(|| e.id.value.clone()),
        });
    }

    fn edges(&mut self) {
        let mut used: BTreeMap<String, BTreeSet<u32>> = BTreeMap::new();
        for (_, e, _) in &self.pending_edges {
            if let Some(slot) = e.target.port.as_ref().and_then(|p| numbered(&p.value, "in")) {
                used.entry(e.target.node.value.clone()).or_default().insert(slot);
            }
        }
        let pending = std::mem::take(&mut self.pending_edges);
        for (id, e, group) in pending {
            let source_slot = match &e.source.port {
                None => Slot::Index(0),
                Some(p) => numbered(&p.value, "out").map_or_else(|| Slot::Name(p.value.clone()), Slot::Index),
            };
            let target_slot = match &e.target.port {
                None => {
                    let taken = used.entry(e.target.node.value.clone()).or_default();
                    let free = (0..).find(|i| !taken.contains(i)).expect("unbounded range");
                    taken.insert(free);
                    Slot::Index(free)
                }
                Some(p) => numbered(&p.value, "in").map_or_else(|| Slot::Name(p.value.clone()), Slot::Index),
            };
            let declared_term = e.term.as_ref().and_then(|t| parse_term(t, &mut self.diags));
            self.map.edges.insert(id.clone(), e.span);
            if let Some(g) = group {
                self.d.groups[g].members.edges.push(id.clone());
            }
            self.d.edges.push(Edge {
                id,
                source: Port {
                    node: e.source.node.value.clone(),
                    slot: source_slot,
                    direction: Direction::Out,
                },
                target: Port {
                    node: e.target.node.value.clone(),
                    slot: target_slot,
                    direction: Direction::In,
                },
                flow_kind: e.flow,
                declared_term,
            });
        }
    }

    fn owners(&mut self) {
        for g in 0..self.d.groups.len() {
            let (gid, owner) = (self.d.groups[g].id.clone(), self.d.groups[g].owner.clone());
            let Some(node) = self.d.nodes.iter_mut().find(|n| n.id == owner) else {
                continue;
            };
            match &node.detail {
                None => node.detail = Some(gid),
                Some(existing) => {
                    let span = self.map.groups[&gid];
                    self.diags.push(Diagnostic::at(
                        Code::E003,
                        span,
                        format!("`{owner}` already has detail group `{existing}`"),
                    ));
                }
            }
        }
    }
}

fn build_extension(ext: &ExtendDecl) -> Result<Extension, String> {
    let code = ext.id.value.clone();
    let mut seen = BTreeSet::new();
    for e in &ext.entries {
        if !seen.insert(e.key.as_str()) {
            return Err(format!("extension key `{}` is given twice", e.key));
        }
    }
    let get = |key: &str| ext.entries.iter().find(|e| e.key == key).map(|e| &e.value);
    let count = |key: &str, default: u32| -> Result<u32, String> {
        match get(key) {
            None => Ok(default),
            Some(Value::Number(n)) => n.parse().map_err(|_| format!("`{key}` must be a non-negative integer")),
            Some(_) => Err(format!("`{key}` must be a non-negative integer")),
        }
    };
    let dialect = match get("dialect") {
        None => Dialect::Sys,
        Some(v) => v.text().parse::<Dialect>().map_err(|e| e.to_string())?,
    };
    let name = get("name").map_or_else(|| code.clone(), |v| v.text().to_string());
    let allowed: &[&str] = match ext.kind {
        ExtendKind::Symbol => &["name", "dialect", "glyph", "category", "min_in", "max_in", "min_out", "max_out", "params"],
        ExtendKind::Task => &["name", "dialect", "domain", "range", "note"],
    };
    if let Some(bad) = ext.entries.iter().find(|e| !allowed.contains(&e.key.as_str())) {
        return Err(format!("unknown extension key `{}`", bad.key));
    }
    match ext.kind {
        ExtendKind::Symbol => {
            let min_in = count("min_in", 1)?;
            let max_in = match get("max_in") {
                Some(Value::Star) => None,
                _ => Some(count("max_in", min_in.max(1))?),
            };
            let min_out = count("min_out", 1)?;
            let max_out = count("max_out", min_out.max(1))?;
            let category = match get("category").map(Value::text) {
                None | Some("operator") => SymbolCategory::Operator,
                Some("resource") => SymbolCategory::Resource,
                Some("nn") => SymbolCategory::Nn,
                Some("meta") => SymbolCategory::Meta,
                Some(other) => return Err(format!("unknown symbol category `{other}`")),
            };
            let params = get("params")
                .map(|v| {
                    v.text()
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(String::from)
                        .collect()
                })
                .unwrap_or_default();
            Ok(Extension::Symbol(SymbolDef {
                code,
                name,
                dialect,
                glyph_id: get("glyph").map_or("ext", Value::text).to_string(),
                min_in,
                max_in,
                min_out,
                max_out,
                category,
                params,
            }))
        }
        ExtendKind::Task => {
            let terms = |key: &str| -> Result<Vec<FormalTerm>, String> {
                let text = get(key).ok_or_else(|| format!("task extension needs `{key}`"))?;
                parse_formal_list(text.text())
            };
            Ok(Extension::Task(Signature {
                task_code: code,
                name,
                dialect,
                domain: terms("domain")?,
                range: terms("range")?,
                note: get("note").map(|v| v.text().to_string()),
            }))
        }
    }
}

/// Splits at top-level commas.
fn split_top(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// Parses a formal term list such as `S^POS, (KB)`; a term wrapped in
/// parentheses is optional.
pub fn parse_formal_list(text: &str) -> Result<Vec<FormalTerm>, String> {
    split_top(text)
        .into_iter()
        .map(|piece| {
            let piece = piece.trim();
            let (inner, optional) = match piece.strip_prefix('(').and_then(|p| p.strip_suffix(')')) {
                Some(inner) if split_top(inner).len() == 1 && balanced(inner) => (inner, true),
                _ => (piece, false),
            };
            let term: DataTerm = inner.parse().map_err(|e| format!("bad formal term `{piece}`: {e}"))?;
            let (atom, structure) = match &term {
                DataTerm::Atom(a) => (a, FormalStructure::Scalar),
                DataTerm::Set(e) => match &**e {
                    DataTerm::Atom(a) => (a, FormalStructure::SetOf),
                    _ => return Err(format!("unsupported formal term `{piece}`")),
                },
                DataTerm::Seq { elem, .. } => match &**elem {
                    DataTerm::Atom(a) => (a, FormalStructure::SequenceOf),
                    _ => return Err(format!("unsupported formal term `{piece}`")),
                },
                _ => return Err(format!("unsupported formal term `{piece}`")),
            };
            Ok(FormalTerm {
                base: atom.base.clone(),
                subscript: atom.subscript.clone(),
                required_annotations: atom.annotations.clone(),
                optional_annotations: BTreeSet::new(),
                is_resource: atom.base == "KB",
                structure,
                optional,
            })
        })
        .collect()
}

fn balanced(s: &str) -> bool {
    let mut depth = 0i32;
    for c in s.chars() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return false;
        }
    }
    depth == 0
}
