//! Semantic core: signature matching, annotation propagation through the
//! dataflow graph and the dimension calculus of the symbolic operators.
//!
//! Outputs of a task inherit every label carried by inputs of the same
//! category, plus the labels the task adds: `POS` applied to `S^NER`
//! yields `S^{NER,POS}`. Outputs of a different category (`WSD` maps a
//! sentence to a term) carry only the labels the signature names.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::diag::{Code, Diagnostic, Location};
use crate::graph::{self, Arc};
use crate::model::{Diagram, EmbeddingDecl, FlowKind, NodeKind};
use crate::model::Node;
use crate::registry::{DialectSet, FormalStructure, FormalTerm, Registry, Resolved, Signature, SymbolCategory, SymbolDef};
use crate::term::{match_term, parse_data_term_in, Atom, DataTerm};

pub use crate::term::{conforms, parse_data_term, Mismatch};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimOp {
    Oplus,
    Concat,
    Otimes,
}

impl DimOp {
    pub fn from_code(code: &str) -> Option<DimOp> {
        match code {
            "oplus" => Some(DimOp::Oplus),
            "concat" => Some(DimOp::Concat),
            "otimes" => Some(DimOp::Otimes),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimError {
    pub op: DimOp,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
}

impl fmt::Display for DimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} cannot combine dims {:?} and {:?}",
            self.op, self.left, self.right
        )
    }
}

/// Direct sum and concatenation add the primary dimension and require the
/// remaining dimensions to agree; the tensor product concatenates shapes.
pub fn dim_combine(op: DimOp, a: &[u32], b: &[u32]) -> Result<Vec<u32>, DimError> {
    let err = || DimError {
        op,
        left: a.to_vec(),
        right: b.to_vec(),
    };
    match op {
        DimOp::Otimes => Ok(a.iter().chain(b).copied().collect()),
        DimOp::Oplus | DimOp::Concat => {
            if a.is_empty() || a.len() != b.len() || a[1..] != b[1..] {
                return Err(err());
            }
            let head = a[0].checked_add(b[0]).ok_or_else(err)?;
            Ok(std::iter::once(head).chain(a[1..].iter().copied()).collect())
        }
    }
}

/// Outcome of inferring one node: best-effort outputs by slot plus the
/// errors found.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Inference {
    pub outputs: Vec<Option<DataTerm>>,
    pub errors: Vec<(Code, String)>,
}

impl Inference {
    fn ok(outputs: Vec<DataTerm>) -> Self {
        Inference {
            outputs: outputs.into_iter().map(Some).collect(),
            errors: Vec::new(),
        }
    }

    fn fail(code: Code, msg: impl Into<String>) -> Self {
        Inference {
            outputs: Vec::new(),
            errors: vec![(code, msg.into())],
        }
    }

    fn pending() -> Self {
        Inference::default()
    }
}

/// Inference context: registry overlay, dialect scope and embeddings.
pub struct Inferer<'a> {
    pub registry: &'a Registry,
    pub dialects: &'a DialectSet,
    pub embeddings: &'a [EmbeddingDecl],
}

impl Inferer<'_> {
    /// Infers the outputs of a node whose inputs are all known, in slot
    /// order.
    pub fn infer_output(&self, node: &Node, inputs: &[DataTerm]) -> Result<Vec<DataTerm>, Vec<(Code, String)>> {
        let slots: Vec<Option<DataTerm>> = inputs.iter().cloned().map(Some).collect();
        let connected = vec![true; inputs.len()];
        let inf = self.infer_slots(node, &slots, &connected);
        if inf.errors.is_empty() {
            Ok(inf.outputs.into_iter().map(|o| o.expect("no errors implies outputs")).collect())
        } else {
            Err(inf.errors)
        }
    }

    /// `inputs[i]` is the term on slot i, `None` when unknown or not
    /// connected; `connected[i]` says whether any edge feeds slot i.
    pub fn infer_slots(&self, node: &Node, inputs: &[Option<DataTerm>], connected: &[bool]) -> Inference {
        match node.kind {
            NodeKind::Io => return self.declared(node),
            NodeKind::Resource if node.term.is_some() => return self.declared(node),
            _ => {}
        }
        match self.registry.resolve(&node.code, self.dialects) {
            None => Inference::pending(),
            Some(Resolved::Task(sig)) => infer_task(sig, inputs, connected),
            Some(Resolved::Symbol(sym)) => self.infer_symbol(node, sym, inputs, connected),
        }
    }

    fn declared(&self, node: &Node) -> Inference {
        match &node.term {
            Some(t) => Inference::ok(vec![t.clone()]),
            None => Inference::fail(Code::E102, format!("`{}` has no declared data term", node.id)),
        }
    }

    fn infer_symbol(&self, node: &Node, sym: &SymbolDef, inputs: &[Option<DataTerm>], connected: &[bool]) -> Inference {
        let n_connected = connected.iter().filter(|c| **c).count() as u32;
        if n_connected < sym.min_in || sym.max_in.is_some_and(|m| n_connected > m) {
            let bound = match sym.max_in {
                Some(m) if m == sym.min_in => format!("exactly {m}"),
                Some(m) => format!("{}..{m}", sym.min_in),
                None => format!("at least {}", sym.min_in),
            };
            return Inference::fail(
                Code::E101,
                format!("`{}` takes {bound} input(s), found {n_connected}", sym.code),
            );
        }
        let known: Vec<&DataTerm> = inputs.iter().flatten().collect();
        if (known.len() as u32) < sym.min_in {
            return Inference::pending();
        }
        let first = known.first().copied();
        let union: BTreeSet<String> = known.iter().flat_map(|t| t.annotations()).collect();
        let with_union = |t: &DataTerm| {
            let mut t = t.clone();
            t.add_annotations(&union);
            t
        };
        let param_u32 = |key: &str| node.param(key).and_then(|v| v.parse::<u32>().ok()).filter(|v| *v >= 1);
        let vector = |t: Option<&DataTerm>, dims: Option<Vec<u32>>| -> DataTerm {
            let make = |a: &Atom| {
                DataTerm::Atom(Atom {
                    base: "clustered_word".into(),
                    subscript: None,
                    annotations: a.annotations.clone(),
                    dims: dims.clone().or_else(|| a.dims.clone()),
                })
            };
            match t {
                Some(t) if t.element_atom().is_some() => t.map_element(make),
                _ => DataTerm::Atom(Atom {
                    dims: dims.clone(),
                    ..Atom::new("clustered_word")
                }),
            }
        };
        let has_set = known.iter().any(|t| matches!(t, DataTerm::Set(_)));
        let out = match sym.code.as_str() {
            "oplus" | "concat" | "otimes" => {
                let op = DimOp::from_code(&sym.code).expect("dim operator");
                return combine(op, &known, &union);
            }
            "set" => DataTerm::set_of(with_union(first.expect("arity"))),
            "cond" => {
                let t = first.expect("arity").clone();
                return Inference::ok(vec![t.clone(), t]);
            }
            "compose" => DataTerm::Tuple(known.iter().map(|t| (*t).clone()).collect()),
            "join" => DataTerm::Atom(Atom::new("Tuples").with_labels(union.iter().cloned())),
            "sim" if has_set => DataTerm::set_of(DataTerm::atom("Score")),
            "sim" | "regression" | "loss" => DataTerm::atom("Score"),
            "proj" => {
                let dim = node
                    .param("id")
                    .and_then(|id| self.embeddings.iter().find(|e| e.id == id))
                    .map(|e| vec![e.dim]);
                vector(first, dim)
            }
            "w2v" | "encoder" => vector(first, param_u32("dim").map(|d| vec![d])),
            "decoder" => DataTerm::atom("T"),
            "classifier" | "classification" | "svm" | "ground_truth" => DataTerm::atom("C"),
            "rank" => {
                let t = first.expect("arity");
                let elem = match t {
                    DataTerm::Set(e) | DataTerm::Seq { elem: e, .. } => (**e).clone(),
                    other => {
                        return Inference::fail(
                            Code::E102,
                            format!("`rank` expects a set or sequence, found {other}"),
                        )
                    }
                };
                DataTerm::seq_of(elem, param_u32("n"))
            }
            "entail" => DataTerm::Atom(Atom::new("PredArg")),
            "verify" | "activation" => first.expect("arity").clone(),
            "softmax" => DataTerm::Dist {
                class: node.param("class").unwrap_or("c").to_string(),
                lo: 0.0,
                hi: 1.0,
            },
            "attention" => {
                let t = first.expect("arity");
                let collapsed = match t {
                    DataTerm::Set(e) | DataTerm::Seq { elem: e, .. } => (**e).clone(),
                    other => other.clone(),
                };
                with_union(&collapsed)
            }
            "lstm" | "gru" | "recnn" | "hidden_fwd" | "hidden_bwd" => {
                vector(first, param_u32("units").map(|u| vec![u]))
            }
            "bilstm" => vector(first, param_u32("units").map(|u| vec![2 * u])),
            "conv" => vector(first, param_u32("filters").map(|u| vec![u])),
            _ if sym.category == SymbolCategory::Meta => return Inference::ok(Vec::new()),
            // Functions and extension symbols.
            _ => match node.param("returns") {
                Some(lit) => match parse_data_term_in(lit, self.registry) {
                    Ok(t) => t,
                    Err(e) => return Inference::fail(Code::E102, format!("invalid `returns` term: {e}")),
                },
                None => match first {
                    Some(t) => t.clone(),
                    None => {
                        return Inference::fail(
                            Code::E102,
                            format!("cannot infer the output of `{}` without inputs; add `returns`", node.id),
                        )
                    }
                },
            },
        };
        Inference::ok(vec![out])
    }
}

fn combine(op: DimOp, known: &[&DataTerm], union: &BTreeSet<String>) -> Inference {
    let dims: Vec<Option<Vec<u32>>> = known
        .iter()
        .map(|t| t.element_atom().and_then(|a| a.dims.clone()))
        .collect();
    let combined = if dims.iter().all(Option::is_none) {
        None
    } else if dims.iter().any(Option::is_none) {
        return Inference::fail(Code::E103, format!("{op:?} mixes operands with and without dims"));
    } else {
        let mut acc = dims[0].clone().expect("checked");
        for d in &dims[1..] {
            match dim_combine(op, &acc, d.as_deref().expect("checked")) {
                Ok(next) => acc = next,
                Err(e) => return Inference::fail(Code::E103, e.to_string()),
            }
        }
        Some(acc)
    };
    let first = known[0];
    let mut out = match combined {
        Some(dims) => first.map_element(|a| DataTerm::Atom(Atom { dims: Some(dims), ..a.clone() })),
        None => first.clone(),
    };
    if op == DimOp::Concat {
        if let DataTerm::Seq { max_len, .. } = &mut out {
            let lens: Option<Vec<u32>> = known
                .iter()
                .map(|t| match t {
                    DataTerm::Seq { max_len, .. } => *max_len,
                    _ => None,
                })
                .collect();
            *max_len = lens.map(|l| l.iter().sum());
        }
    }
    out.add_annotations(union);
    Inference::ok(vec![out])
}

fn infer_task(sig: &Signature, inputs: &[Option<DataTerm>], connected: &[bool]) -> Inference {
    let mut errors = Vec::new();
    for (i, formal) in sig.domain.iter().enumerate() {
        let is_connected = connected.get(i).copied().unwrap_or(false);
        match inputs.get(i).and_then(Option::as_ref) {
            Some(actual) => {
                if let Err(m) = match_term(actual, formal) {
                    errors.push((
                        Code::E102,
                        format!("{} input {i}: expected {formal}, found {actual}: {m}", sig.task_code),
                    ));
                }
            }
            None if !is_connected && !formal.optional => errors.push((
                Code::E101,
                format!("{} is missing required input {i} ({formal})", sig.task_code),
            )),
            None => {}
        }
    }
    let extra = connected.iter().skip(sig.domain.len()).filter(|c| **c).count();
    if extra > 0 {
        errors.push((
            Code::E101,
            format!("{} takes at most {} input(s)", sig.task_code, sig.domain.len()),
        ));
    }
    let outputs = sig
        .range
        .iter()
        .map(|formal| Some(instantiate(formal, inputs)))
        .collect();
    Inference { outputs, errors }
}

fn instantiate(formal: &FormalTerm, inputs: &[Option<DataTerm>]) -> DataTerm {
    let mut labels = formal.required_annotations.clone();
    for input in inputs.iter().flatten() {
        if input.base() == Some(formal.base.as_str()) {
            labels.extend(input.annotations());
        }
    }
    let atom = DataTerm::Atom(Atom {
        base: formal.base.clone(),
        subscript: formal.subscript.clone(),
        annotations: labels,
        dims: None,
    });
    match formal.structure {
        FormalStructure::Scalar => atom,
        FormalStructure::SetOf => DataTerm::set_of(atom),
        FormalStructure::SequenceOf => DataTerm::seq_of(atom, None),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypedDiagram {
    pub diagram: Diagram,
    pub edge_terms: BTreeMap<String, DataTerm>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Arcs that carry a typing dependency: everything except recurrent edges
/// and edges into resources (a resource's output is its declared term).
fn dependency_arcs(d: &Diagram) -> (Vec<Arc>, BTreeSet<usize>) {
    let idx = d.node_index();
    let mut arcs = Vec::with_capacity(d.edges.len());
    let mut skip = BTreeSet::new();
    for (i, e) in d.edges.iter().enumerate() {
        let (Some(&s), Some(&t)) = (idx.get(e.source.node.as_str()), idx.get(e.target.node.as_str())) else {
            arcs.push((0, 0));
            skip.insert(i);
            continue;
        };
        arcs.push((s, t));
        if e.flow_kind == FlowKind::Recurrent || d.nodes[t].kind == NodeKind::Resource {
            skip.insert(i);
        }
    }
    (arcs, skip)
}

/// Propagates terms through the diagram and collects E1xx diagnostics.
/// Back edges start unknown and are resolved by iterating to a fixed
/// point; annotation sets only grow, so the iteration is bounded by
/// edges × labels.
pub fn check_diagram(d: &Diagram) -> TypedDiagram {
    let registry = d.registry();
    let inferer = Inferer {
        registry: &registry,
        dialects: &d.dialects,
        embeddings: &d.embeddings,
    };
    let idx = d.node_index();
    let (arcs, mut skip) = dependency_arcs(d);
    let live: Vec<Arc> = arcs
        .iter()
        .enumerate()
        .map(|(i, a)| if skip.contains(&i) { (a.0, a.0) } else { *a })
        .collect();
    // Remaining cycles among flow edges are broken like in layout.
    let masked: Vec<Arc> = live
        .iter()
        .enumerate()
        .filter(|(i, _)| !skip.contains(i))
        .map(|(_, a)| *a)
        .collect();
    let masked_ids: Vec<usize> = (0..live.len()).filter(|i| !skip.contains(i)).collect();
    for f in graph::feedback_arcs(d.nodes.len(), &masked) {
        skip.insert(masked_ids[f]);
    }
    let order = graph::topo_order(d.nodes.len(), &arcs, &skip);

    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); d.nodes.len()];
    for (i, e) in d.edges.iter().enumerate() {
        if let Some(&t) = idx.get(e.target.node.as_str()) {
            incoming[t].push(i);
        }
    }

    let mut outputs: Vec<Vec<Option<DataTerm>>> = vec![Vec::new(); d.nodes.len()];
    let label_bound = registry_label_bound(d);
    let max_passes = (d.edges.len() + 1) * (label_bound + 1) + 1;
    let mut last: Vec<Inference> = vec![Inference::default(); d.nodes.len()];
    for _ in 0..max_passes {
        let mut changed = false;
        for &v in &order {
            let inf = infer_node(d, &inferer, &idx, &incoming[v], &outputs, v);
            if inf.outputs != outputs[v] {
                outputs[v] = inf.outputs.clone();
                changed = true;
            }
            last[v] = inf;
        }
        if !changed {
            break;
        }
    }

    let mut diagnostics = Vec::new();
    for &v in &order {
        for (code, msg) in &last[v].errors {
            diagnostics.push(Diagnostic::new(*code, Location::Node(d.nodes[v].id.clone()), msg.clone()));
        }
    }
    let mut edge_terms = BTreeMap::new();
    for (i, e) in d.edges.iter().enumerate() {
        let inferred = inferred_edge_term(d, &idx, &outputs, i);
        if let (Some(inf), Some(decl)) = (&inferred, &e.declared_term) {
            if !conforms(inf, decl) {
                diagnostics.push(Diagnostic::new(
                    Code::E104,
                    Location::Edge(e.id.clone()),
                    format!("edge is declared as {decl} but carries {inf}"),
                ));
            }
        }
        if let Some(t) = inferred.or_else(|| e.declared_term.clone()) {
            edge_terms.insert(e.id.clone(), t);
        }
    }
    TypedDiagram {
        diagram: d.clone(),
        edge_terms,
        diagnostics,
    }
}

fn registry_label_bound(d: &Diagram) -> usize {
    let mut labels: BTreeSet<String> = crate::registry::builtin_labels().clone();
    for n in &d.nodes {
        if let Some(t) = &n.term {
            labels.extend(t.annotations());
        }
    }
    for e in &d.edges {
        if let Some(t) = &e.declared_term {
            labels.extend(t.annotations());
        }
    }
    labels.len()
}

fn inferred_edge_term(
    d: &Diagram,
    idx: &BTreeMap<&str, usize>,
    outputs: &[Vec<Option<DataTerm>>],
    edge: usize,
) -> Option<DataTerm> {
    let e = &d.edges[edge];
    let &s = idx.get(e.source.node.as_str())?;
    if e.flow_kind == FlowKind::Query && d.nodes[s].kind == NodeKind::Resource {
        return Some(DataTerm::atom("Tuples"));
    }
    let slot = e.source.slot.index()? as usize;
    outputs[s].get(slot).cloned().flatten()
}

fn edge_term(d: &Diagram, idx: &BTreeMap<&str, usize>, outputs: &[Vec<Option<DataTerm>>], edge: usize) -> Option<DataTerm> {
    inferred_edge_term(d, idx, outputs, edge).or_else(|| d.edges[edge].declared_term.clone())
}

fn infer_node(
    d: &Diagram,
    inferer: &Inferer<'_>,
    idx: &BTreeMap<&str, usize>,
    incoming: &[usize],
    outputs: &[Vec<Option<DataTerm>>],
    v: usize,
) -> Inference {
    let node = &d.nodes[v];
    let width = incoming
        .iter()
        .filter_map(|&e| d.edges[e].target.slot.index())
        .map(|s| s as usize + 1)
        .max()
        .unwrap_or(0);
    let mut inputs: Vec<Option<DataTerm>> = vec![None; width];
    let mut connected = vec![false; width];
    for &e in incoming {
        let Some(slot) = d.edges[e].target.slot.index() else {
            continue;
        };
        let slot = slot as usize;
        connected[slot] = true;
        if inputs[slot].is_none() {
            inputs[slot] = edge_term(d, idx, outputs, e);
        }
    }
    inferer.infer_slots(node, &inputs, &connected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{new_diagram, Port};
    use crate::registry::Dialect;

    fn t(s: &str) -> DataTerm {
        parse_data_term(s).unwrap()
    }

    fn infer(node: Node, inputs: &[&str]) -> Result<Vec<DataTerm>, Vec<(Code, String)>> {
        let reg = Registry::builtin();
        let dialects: DialectSet = Dialect::ALL.into_iter().collect();
        let emb = [EmbeddingDecl { id: "w2v".into(), dim: 300, label: "w2v".into() }];
        let inf = Inferer { registry: &reg, dialects: &dialects, embeddings: &emb };
        let ins: Vec<DataTerm> = inputs.iter().map(|s| t(s)).collect();
        inf.infer_output(&node, &ins)
    }

    fn task(code: &str) -> Node {
        Node::new("n", NodeKind::Task, code)
    }

    fn op(code: &str) -> Node {
        Node::new("n", NodeKind::Operator, code)
    }

    fn codes(r: Result<Vec<DataTerm>, Vec<(Code, String)>>) -> Vec<Code> {
        r.unwrap_err().into_iter().map(|(c, _)| c).collect()
    }

    #[test]
    fn task_outputs() {
        assert_eq!(infer(task("POS"), &["S"]).unwrap(), vec![t("S^POS")]);
        assert_eq!(infer(task("WSD"), &["S^{POS,Chunk}", "KB"]).unwrap(), vec![t("Term^WSD")]);
        assert_eq!(infer(task("POS"), &["S^NER"]).unwrap(), vec![t("S^{NER,POS}")]);
        assert_eq!(codes(infer(task("EL"), &["S"])), vec![Code::E102]);
        assert_eq!(codes(infer(task("WSD"), &["S^{POS,Chunk}"])), vec![Code::E101]);
    }

    #[test]
    fn operator_outputs() {
        let rank = op("rank").with_param("n", "1");
        assert_eq!(infer(rank, &["{Score}"]).unwrap(), vec![t("[Score;1]")]);
        assert_eq!(infer(op("sim"), &["{vec[300,300]}"]).unwrap(), vec![t("{Score}")]);
        assert_eq!(infer(op("cond"), &["S"]).unwrap(), vec![t("S"), t("S")]);
        assert_eq!(infer(op("proj").with_param("id", "w2v"), &["{Term}"]).unwrap(), vec![t("{vec[300]}")]);
        assert_eq!(infer(op("entail"), &["vec", "vec"]).unwrap(), vec![t("PredArg")]);
        assert_eq!(infer(op("verify"), &["S^NER"]).unwrap(), vec![t("S^NER")]);
        assert_eq!(infer(op("oplus"), &["vec[3]", "vec[4]"]).unwrap(), vec![t("vec[7]")]);
        assert_eq!(codes(infer(op("oplus"), &["vec[3]", "vec[2,2]"])), vec![Code::E103]);
        assert_eq!(codes(infer(op("rank"), &["Score"])), vec![Code::E102]);
        assert_eq!(codes(infer(op("compose"), &["S"])), vec![Code::E101]);
        assert_eq!(
            infer(Node::new("n", NodeKind::NnLayer, "bilstm").with_param("units", "128"), &["[vec[300]]"]).unwrap(),
            vec![t("[vec[256]]")]
        );
        assert_eq!(
            infer(Node::new("n", NodeKind::NnLayer, "softmax").with_param("class", "entail"), &["vec"]).unwrap(),
            vec![t("P_entail[0,1]")]
        );
    }

    #[test]
    fn dims() {
        assert_eq!(dim_combine(DimOp::Oplus, &[3], &[4]), Ok(vec![7]));
        assert_eq!(dim_combine(DimOp::Otimes, &[3], &[4]), Ok(vec![3, 4]));
        assert_eq!(dim_combine(DimOp::Concat, &[100], &[50]), Ok(vec![150]));
        assert!(dim_combine(DimOp::Oplus, &[3], &[2, 2]).is_err());
        assert_eq!(dim_combine(DimOp::Otimes, &[2, 3], &[4]), Ok(vec![2, 3, 4]));
    }

    #[test]
    fn single_data_node() {
        let mut d = new_diagram("D", &["sys"]).unwrap();
        d.add_node(Node::data("s", t("S"))).unwrap();
        let typed = check_diagram(&d);
        assert!(typed.edge_terms.is_empty());
        assert!(typed.diagnostics.is_empty());
    }

    #[test]
    fn recurrent_loop_reaches_fixed_point() {
        let mut d = new_diagram("D", &["sys", "nn"]).unwrap();
        d.add_node(Node::data("x", t("[vec[50]]"))).unwrap();
        d.add_node(Node::new("h", NodeKind::NnLayer, "lstm").with_param("units", "64")).unwrap();
        d.add_edge(Port::out("x", 0), Port::input("h", 0), FlowKind::Flow).unwrap();
        d.add_edge(Port::out("h", 0), Port::input("h", 1), FlowKind::Recurrent).unwrap();
        let typed = check_diagram(&d);
        assert_eq!(typed.diagnostics, vec![]);
        assert_eq!(typed.edge_terms["e1"], t("[vec[64]]"));
    }

    #[test]
    fn declared_term_conflict() {
        let mut d = new_diagram("D", &["sys"]).unwrap();
        d.add_node(Node::data("s", t("S"))).unwrap();
        d.add_node(task("POS")).unwrap();
        d.add_edge_with_id("e0", Port::out("s", 0), Port::input("n", 0), FlowKind::Flow, Some(t("S^NER")))
            .unwrap();
        let typed = check_diagram(&d);
        let codes: Vec<Code> = typed.diagnostics.iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![Code::E104]);
    }
}
