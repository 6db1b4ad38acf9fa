//! The diagram intermediate representation, structural validation and the
//! canonical JSON interchange encoding.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diag::{Code, Diagnostic, Location};
use crate::registry::{Dialect, DialectSet, Extension, Registry};
use crate::term::DataTerm;

/// Version of the interchange encoding produced by `canonical_serialize`.
pub const FORMAT_VERSION: &str = "0.1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Task,
    Operator,
    Resource,
    Function,
    Classifier,
    NnLayer,
    Io,
    Verify,
}

impl NodeKind {
    pub fn default_shape(self) -> ShapeClass {
        match self {
            NodeKind::Operator | NodeKind::Function => ShapeClass::Feature,
            _ => ShapeClass::Component,
        }
    }
}

/// Circle (architectural feature) versus rectangle (full component).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeClass {
    Feature,
    Component,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    Flow,
    Biflow,
    Persist,
    Query,
    Interface,
    Recurrent,
}

impl FlowKind {
    pub const ALL: [FlowKind; 6] = [
        FlowKind::Flow,
        FlowKind::Biflow,
        FlowKind::Persist,
        FlowKind::Query,
        FlowKind::Interface,
        FlowKind::Recurrent,
    ];

    pub fn arrow(self) -> &'static str {
        match self {
            FlowKind::Flow => "->",
            FlowKind::Biflow => "<->",
            FlowKind::Persist => "|->",
            FlowKind::Query => "?>",
            FlowKind::Interface => "-o",
            FlowKind::Recurrent => "~>",
        }
    }

    pub fn from_arrow(arrow: &str) -> Option<FlowKind> {
        FlowKind::ALL.into_iter().find(|k| k.arrow() == arrow)
    }

    /// Registry symbol realizing this edge kind, if any.
    pub fn symbol_code(self) -> Option<&'static str> {
        match self {
            FlowKind::Flow => Some("flow"),
            FlowKind::Biflow => Some("biflow"),
            FlowKind::Persist => Some("persist"),
            FlowKind::Query => Some("query"),
            FlowKind::Interface => Some("interface"),
            FlowKind::Recurrent => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    TopLeft,
    TopRight,
    BottomLeft,
    BottomRight,
}

impl Region {
    pub const ALL: [Region; 4] = [
        Region::TopLeft,
        Region::TopRight,
        Region::BottomLeft,
        Region::BottomRight,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Region::TopLeft => "top_left",
            Region::TopRight => "top_right",
            Region::BottomLeft => "bottom_left",
            Region::BottomRight => "bottom_right",
        }
    }

    pub fn parse(s: &str) -> Option<Region> {
        Region::ALL.into_iter().find(|r| r.as_str() == s)
    }

    pub fn is_top(self) -> bool {
        matches!(self, Region::TopLeft | Region::TopRight)
    }

    pub fn is_left(self) -> bool {
        matches!(self, Region::TopLeft | Region::BottomLeft)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Top,
    Bottom,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Top => "top",
            Side::Bottom => "bottom",
        }
    }

    pub fn parse(s: &str) -> Option<Side> {
        [Side::Left, Side::Right, Side::Top, Side::Bottom]
            .into_iter()
            .find(|x| x.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    In,
    Out,
}

/// A port slot: a zero-based index, or a name (`true`/`false` on
/// conditionals).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Slot {
    Index(u32),
    Name(String),
}

impl Slot {
    /// Index of the slot, resolving conditional branch names.
    pub fn index(&self) -> Option<u32> {
        match self {
            Slot::Index(i) => Some(*i),
            Slot::Name(n) if n == "true" => Some(0),
            Slot::Name(n) if n == "false" => Some(1),
            Slot::Name(_) => None,
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Index(i) => write!(f, "{i}"),
            Slot::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Port {
    pub node: String,
    pub slot: Slot,
    pub direction: Direction,
}

impl Port {
    pub fn out(node: &str, slot: u32) -> Self {
        Port {
            node: node.to_string(),
            slot: Slot::Index(slot),
            direction: Direction::Out,
        }
    }

    pub fn input(node: &str, slot: u32) -> Self {
        Port {
            node: node.to_string(),
            slot: Slot::Index(slot),
            direction: Direction::In,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerfAnnotation {
    pub metric: String,
    pub value: f64,
    pub corpus: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub code: String,
    pub label: Option<String>,
    pub params: IndexMap<String, String>,
    pub shape_class: ShapeClass,
    pub perf: Vec<PerfAnnotation>,
    pub detail: Option<String>,
    pub placement_hint: Option<Region>,
    /// Declared term of a data node.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub term: Option<DataTerm>,
}

impl Node {
    pub fn new(id: &str, kind: NodeKind, code: &str) -> Self {
        Node {
            id: id.to_string(),
            kind,
            code: code.to_string(),
            label: None,
            params: IndexMap::new(),
            shape_class: kind.default_shape(),
            perf: Vec::new(),
            detail: None,
            placement_hint: None,
            term: None,
        }
    }

    /// A data node carrying a declared term.
    pub fn data(id: &str, term: DataTerm) -> Self {
        let mut n = Node::new(id, NodeKind::Io, "data");
        n.term = Some(term);
        n
    }

    pub fn with_param(mut self, key: &str, value: &str) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn with_label(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }

    pub fn param(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    /// Text shown inside the node: the label, else the code.
    pub fn display_text(&self) -> String {
        if let Some(l) = &self.label {
            return l.clone();
        }
        match (&self.term, self.kind) {
            (Some(t), NodeKind::Io) => t.to_string(),
            _ => self.code.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub source: Port,
    pub target: Port,
    pub flow_kind: FlowKind,
    pub declared_term: Option<DataTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupMembers {
    pub nodes: Vec<String>,
    pub edges: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetailGroup {
    pub id: String,
    pub owner: String,
    pub members: GroupMembers,
    pub entry_side: Side,
    pub exit_side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    Hyperparams,
    Results,
    Freeform,
}

impl TableKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TableKind::Hyperparams => "hyperparams",
            TableKind::Results => "results",
            TableKind::Freeform => "freeform",
        }
    }

    pub fn parse(s: &str) -> Option<TableKind> {
        [TableKind::Hyperparams, TableKind::Results, TableKind::Freeform]
            .into_iter()
            .find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetaTable {
    pub id: String,
    pub kind: TableKind,
    pub rows: Vec<(String, String)>,
    pub placement: Region,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingDecl {
    pub id: String,
    pub dim: u32,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagram {
    pub format_version: String,
    pub name: String,
    pub dialects: DialectSet,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub groups: Vec<DetailGroup>,
    pub tables: Vec<MetaTable>,
    pub embeddings: Vec<EmbeddingDecl>,
    /// Title region override; absent means top-left.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title_placement: Option<Region>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extensions: Vec<Extension>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown dialect `{0}`")]
    UnknownDialect(String),
    #[error("the `sys` dialect is required")]
    MissingSys,
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("bad slot `{slot}` on node `{node}`")]
    BadSlot { node: String, slot: String },
}

/// Creates an empty diagram. Dialect names are checked against the
/// registry; `sys` is mandatory.
pub fn new_diagram<S: AsRef<str>>(name: &str, dialects: &[S]) -> Result<Diagram, ModelError> {
    let mut set = DialectSet::new();
    for d in dialects {
        let d: Dialect = d
            .as_ref()
            .parse()
            .map_err(|_| ModelError::UnknownDialect(d.as_ref().to_string()))?;
        set.insert(d);
    }
    if !set.contains(&Dialect::Sys) {
        return Err(ModelError::MissingSys);
    }
    Ok(Diagram {
        format_version: FORMAT_VERSION.to_string(),
        name: name.to_string(),
        dialects: set,
        nodes: Vec::new(),
        edges: Vec::new(),
        groups: Vec::new(),
        tables: Vec::new(),
        embeddings: Vec::new(),
        title_placement: None,
        extensions: Vec::new(),
    })
}

impl Diagram {
    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn node_index(&self) -> BTreeMap<&str, usize> {
        self.nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect()
    }

    pub fn registry(&self) -> Registry {
        Registry::with_extensions(&self.extensions).unwrap_or_default()
    }

    /// Appends a node. Code resolution is deferred to
    /// [`validate_structure`].
    pub fn add_node(&mut self, node: Node) -> Result<String, ModelError> {
        if self.node(&node.id).is_some() {
            return Err(ModelError::DuplicateId(node.id));
        }
        let id = node.id.clone();
        self.nodes.push(node);
        Ok(id)
    }

    /// Appends an edge with a fresh `eN` identifier.
    pub fn add_edge(&mut self, from: Port, to: Port, kind: FlowKind) -> Result<String, ModelError> {
        let mut n = self.edges.len();
        let id = loop {
            let candidate = format!("e{n}");
            if self.edge(&candidate).is_none() {
                break candidate;
            }
            n += 1;
        };
        self.add_edge_with_id(&id, from, to, kind, None)?;
        Ok(id)
    }

    pub fn add_edge_with_id(
        &mut self,
        id: &str,
        from: Port,
        to: Port,
        kind: FlowKind,
        declared_term: Option<DataTerm>,
    ) -> Result<(), ModelError> {
        if self.edge(id).is_some() {
            return Err(ModelError::DuplicateId(id.to_string()));
        }
        for (port, dir) in [(&from, Direction::Out), (&to, Direction::In)] {
            if self.node(&port.node).is_none() {
                return Err(ModelError::UnknownNode(port.node.clone()));
            }
            if port.direction != dir || port.slot.index().is_none() {
                return Err(ModelError::BadSlot {
                    node: port.node.clone(),
                    slot: port.slot.to_string(),
                });
            }
        }
        self.edges.push(Edge {
            id: id.to_string(),
            source: from,
            target: to,
            flow_kind: kind,
            declared_term,
        });
        Ok(())
    }
}

/// Input/output slot capacity of a node: (max inputs, output slots).
/// `None` for inputs means unbounded; `None` overall means the code is
/// unresolved.
pub fn port_capacity(node: &Node, registry: &Registry, dialects: &DialectSet) -> Option<(Option<u32>, u32)> {
    if node.kind == NodeKind::Io {
        return Some((None, 1));
    }
    let r = registry.resolve(&node.code, dialects)?;
    Some(match node.kind {
        NodeKind::Resource => (None, 1),
        _ => (r.input_bounds().1, r.output_slots()),
    })
}

/// Reports every structural violation; empty iff the diagram is
/// structurally valid.
pub fn validate_structure(d: &Diagram) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let registry = match Registry::with_extensions(&d.extensions) {
        Ok(r) => r,
        Err(e) => {
            out.push(Diagnostic::new(Code::E005, Location::Diagram, e.to_string()));
            Registry::builtin()
        }
    };

    let mut seen = BTreeSet::new();
    for n in &d.nodes {
        if !seen.insert(n.id.as_str()) {
            out.push(Diagnostic::new(
                Code::E003,
                Location::Node(n.id.clone()),
                format!("duplicate node id `{}`", n.id),
            ));
        }
    }
    let mut seen_edges = BTreeSet::new();
    for e in &d.edges {
        if !seen_edges.insert(e.id.as_str()) {
            out.push(Diagnostic::new(
                Code::E003,
                Location::Edge(e.id.clone()),
                format!("duplicate edge id `{}`", e.id),
            ));
        }
    }

    let embeddings: BTreeSet<&str> = d.embeddings.iter().map(|e| e.id.as_str()).collect();
    for n in &d.nodes {
        let loc = || Location::Node(n.id.clone());
        if n.kind != NodeKind::Io && registry.resolve(&n.code, &d.dialects).is_none() {
            let hint = match registry.resolve_any(&n.code) {
                Some(_) => " (its dialect is not declared)",
                None => "",
            };
            out.push(Diagnostic::new(
                Code::E010,
                loc(),
                format!("unresolved code `{}`{hint}", n.code),
            ));
        }
        if n.code == "proj" {
            match n.param("id") {
                Some(id) if embeddings.contains(id) => {}
                Some(id) => out.push(Diagnostic::new(
                    Code::E010,
                    loc(),
                    format!("projection references unknown embedding `{id}`"),
                )),
                None => out.push(Diagnostic::new(
                    Code::E010,
                    loc(),
                    "projection needs an embedding `id` parameter",
                )),
            }
        }
        if let Some(t) = &n.term {
            if let Err(e) = t.validate(&registry) {
                out.push(Diagnostic::new(Code::E004, loc(), e.to_string()));
            }
        }
        for p in &n.perf {
            if p.metric.is_empty() || !p.value.is_finite() || (p.metric == "acc" && !(0.0..=1.0).contains(&p.value)) {
                out.push(Diagnostic::new(
                    Code::E014,
                    loc(),
                    format!("perf value {}={} is out of range", p.metric, p.value),
                ));
            }
        }
    }

    for e in &d.edges {
        let loc = || Location::Edge(e.id.clone());
        let mut endpoints = Vec::new();
        for (port, dir) in [(&e.source, Direction::Out), (&e.target, Direction::In)] {
            let Some(node) = d.node(&port.node) else {
                out.push(Diagnostic::new(
                    Code::E011,
                    loc(),
                    format!("endpoint references missing node `{}`", port.node),
                ));
                continue;
            };
            endpoints.push(node);
            let Some(idx) = port.slot.index().filter(|_| port.direction == dir) else {
                out.push(Diagnostic::new(
                    Code::E011,
                    loc(),
                    format!("invalid slot `{}` on `{}`", port.slot, node.id),
                ));
                continue;
            };
            if let Some((max_in, outs)) = port_capacity(node, &registry, &d.dialects) {
                let ok = match dir {
                    Direction::In => max_in.is_none_or(|m| idx < m),
                    Direction::Out => idx < outs,
                };
                if !ok {
                    out.push(Diagnostic::new(
                        Code::E011,
                        loc(),
                        format!("slot {idx} is out of range on `{}`", node.id),
                    ));
                }
            }
        }
        if let Some(t) = &e.declared_term {
            if let Err(err) = t.validate(&registry) {
                out.push(Diagnostic::new(Code::E004, loc(), err.to_string()));
            }
        }
        if endpoints.len() == 2 {
            let (src, dst) = (endpoints[0], endpoints[1]);
            match e.flow_kind {
                FlowKind::Persist if dst.kind != NodeKind::Resource => out.push(Diagnostic::new(
                    Code::E013,
                    loc(),
                    format!("persist edge must target a resource, `{}` is a {:?} node", dst.id, dst.kind),
                )),
                FlowKind::Query if src.kind != NodeKind::Resource && dst.kind != NodeKind::Resource => {
                    out.push(Diagnostic::new(
                        Code::E013,
                        loc(),
                        "query edge must start or end at a resource",
                    ))
                }
                _ => {}
            }
        }
    }

    validate_groups(d, &mut out);

    let mut ids = BTreeSet::new();
    for t in &d.tables {
        if !ids.insert(&t.id) {
            out.push(Diagnostic::new(Code::E003, Location::Table(t.id.clone()), format!("duplicate table id `{}`", t.id)));
        }
        if t.rows.is_empty() {
            out.push(Diagnostic::new(Code::E014, Location::Table(t.id.clone()), "table has no rows"));
        }
    }
    let mut ids = BTreeSet::new();
    for emb in &d.embeddings {
        if !ids.insert(&emb.id) {
            out.push(Diagnostic::new(Code::E003, Location::Diagram, format!("duplicate embedding id `{}`", emb.id)));
        }
        if emb.dim == 0 {
            out.push(Diagnostic::new(Code::E014, Location::Diagram, format!("embedding `{}` has zero dimension", emb.id)));
        }
    }
    out
}

fn validate_groups(d: &Diagram, out: &mut Vec<Diagnostic>) {
    let mut ids = BTreeSet::new();
    for g in &d.groups {
        let loc = || Location::Group(g.id.clone());
        if !ids.insert(&g.id) {
            out.push(Diagnostic::new(Code::E003, loc(), format!("duplicate group id `{}`", g.id)));
        }
        if d.node(&g.owner).is_none() {
            out.push(Diagnostic::new(Code::E011, loc(), format!("group owner `{}` does not exist", g.owner)));
        }
        for m in &g.members.nodes {
            if d.node(m).is_none() {
                out.push(Diagnostic::new(Code::E011, loc(), format!("group member `{m}` does not exist")));
            }
        }
        for m in &g.members.edges {
            if d.edge(m).is_none() {
                out.push(Diagnostic::new(Code::E011, loc(), format!("group member edge `{m}` does not exist")));
            }
        }
        if g.members.nodes.contains(&g.owner) {
            out.push(Diagnostic::new(Code::E012, loc(), format!("group `{}` contains its own owner", g.id)));
        }
    }
    // Group A contains group B when B's owner is one of A's members.
    let children = |a: &DetailGroup| -> Vec<usize> {
        d.groups
            .iter()
            .enumerate()
            .filter(|(_, b)| b.id != a.id && a.members.nodes.contains(&b.owner))
            .map(|(i, _)| i)
            .collect()
    };
    for (start, g) in d.groups.iter().enumerate() {
        let mut stack = children(g);
        let mut visited = BTreeSet::new();
        while let Some(i) = stack.pop() {
            if i == start {
                out.push(Diagnostic::new(
                    Code::E012,
                    Location::Group(g.id.clone()),
                    format!("group `{}` transitively contains itself", g.id),
                ));
                break;
            }
            if visited.insert(i) {
                stack.extend(children(&d.groups[i]));
            }
        }
    }
}

/// Deterministic encoding: pretty-printed JSON with a trailing newline.
pub fn canonical_serialize(d: &Diagram) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(d).expect("diagram values always serialize");
    bytes.push(b'\n');
    bytes
}

pub fn deserialize(bytes: &[u8]) -> Result<Diagram, Diagnostic> {
    let malformed = |msg: String| Diagnostic::new(Code::E021, Location::Diagram, msg);
    let value: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| malformed(format!("malformed document: {e}")))?;
    match value.get("format_version").and_then(|v| v.as_str()) {
        Some(FORMAT_VERSION) => {}
        Some(other) => {
            return Err(Diagnostic::new(
                Code::E020,
                Location::Diagram,
                format!("format version `{other}` is not supported (expected `{FORMAT_VERSION}`)"),
            ))
        }
        None => return Err(malformed("missing `format_version`".into())),
    }
    serde_json::from_value(value).map_err(|e| malformed(format!("malformed document: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_data_term;

    fn chain() -> Diagram {
        let mut d = new_diagram("QA", &["sys"]).unwrap();
        d.add_node(Node::data("s", parse_data_term("S").unwrap())).unwrap();
        d.add_node(Node::new("p", NodeKind::Task, "POS")).unwrap();
        d.add_node(Node::new("n", NodeKind::Task, "NER")).unwrap();
        d.add_edge(Port::out("s", 0), Port::input("p", 0), FlowKind::Flow).unwrap();
        d.add_edge(Port::out("p", 0), Port::input("n", 0), FlowKind::Flow).unwrap();
        d
    }

    #[test]
    fn constructor() {
        let d = new_diagram("QA", &["sys"]).unwrap();
        assert!(d.nodes.is_empty());
        assert_eq!(d.format_version, FORMAT_VERSION);
        let d = new_diagram("M", &["sys", "nn"]).unwrap();
        assert_eq!(d.dialects.len(), 2);
        assert_eq!(new_diagram("X", &["db"]), Err(ModelError::UnknownDialect("db".into())));
        assert_eq!(new_diagram("X", &["nn"]), Err(ModelError::MissingSys));
    }

    #[test]
    fn add_node_and_edge() {
        let mut d = chain();
        assert_eq!(d.nodes.len(), 3);
        assert_eq!(
            d.add_node(Node::new("p", NodeKind::Task, "POS")),
            Err(ModelError::DuplicateId("p".into()))
        );
        assert_eq!(
            d.add_edge(Port::out("p", 0), Port::input("ghost", 0), FlowKind::Flow),
            Err(ModelError::UnknownNode("ghost".into()))
        );
        assert!(matches!(
            d.add_edge(Port::input("p", 0), Port::input("n", 0), FlowKind::Flow),
            Err(ModelError::BadSlot { .. })
        ));
        d.add_node(Node::new("b", NodeKind::NnLayer, "bilstm")).unwrap();
        let diags = validate_structure(&d);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::E010);
    }

    #[test]
    fn well_formed_chain_validates() {
        assert_eq!(validate_structure(&chain()), vec![]);
    }

    #[test]
    fn persist_into_task_is_e013() {
        let mut d = chain();
        d.add_edge(Port::out("s", 0), Port::input("n", 1), FlowKind::Persist).unwrap();
        let codes: Vec<Code> = validate_structure(&d).iter().map(|d| d.code).collect();
        // slot 1 on NER is also out of range
        assert_eq!(codes, vec![Code::E011, Code::E013]);
    }

    #[test]
    fn group_cycles() {
        let mut d = chain();
        d.groups.push(DetailGroup {
            id: "g1".into(),
            owner: "p".into(),
            members: GroupMembers { nodes: vec!["n".into()], edges: vec![] },
            entry_side: Side::Left,
            exit_side: Side::Right,
        });
        d.groups.push(DetailGroup {
            id: "g2".into(),
            owner: "n".into(),
            members: GroupMembers { nodes: vec!["p".into()], edges: vec![] },
            entry_side: Side::Left,
            exit_side: Side::Right,
        });
        let codes: Vec<Code> = validate_structure(&d).iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![Code::E012, Code::E012]);
    }

    #[test]
    fn serialization() {
        let d = chain();
        let a = canonical_serialize(&d);
        assert_eq!(a, canonical_serialize(&d));
        assert_eq!(deserialize(&a).unwrap(), d);
        assert_eq!(canonical_serialize(&deserialize(&a).unwrap()), a);

        let mut swapped = d.clone();
        swapped.nodes.swap(1, 2);
        assert_ne!(canonical_serialize(&swapped), a);

        let text = String::from_utf8(a.clone()).unwrap();
        for key in ["format_version", "name", "dialects", "nodes", "edges", "groups", "tables", "embeddings"] {
            assert!(text.contains(&format!("\"{key}\"")), "{key}");
        }
    }

    #[test]
    fn deserialize_errors() {
        let a = canonical_serialize(&chain());
        assert_eq!(deserialize(&a[..a.len() / 2]).unwrap_err().code, Code::E021);
        let future = String::from_utf8(a).unwrap().replace("\"0.1\"", "\"9.0\"");
        assert_eq!(deserialize(future.as_bytes()).unwrap_err().code, Code::E020);
    }
}
