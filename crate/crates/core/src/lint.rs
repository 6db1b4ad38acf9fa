//! Style warnings over a typed, laid-out diagram.

use std::collections::{BTreeMap, BTreeSet};

use crate::diag::{Code, Diagnostic, Location};
use crate::layout::LayoutResult;
use crate::model::{FlowKind, NodeKind, Region, ShapeClass, Side};
use crate::registry::{all_symbols, Extension};
use crate::typecheck::TypedDiagram;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LintRule {
    pub code: Code,
    pub description: &'static str,
    pub enabled: bool,
}

const fn rule(code: Code) -> LintRule {
    LintRule {
        code,
        description: code.summary(),
        enabled: true,
    }
}

pub static RULES: [LintRule; 8] = [
    rule(Code::W201),
    rule(Code::W202),
    rule(Code::W203),
    rule(Code::W204),
    rule(Code::W205),
    rule(Code::W206),
    rule(Code::W207),
    rule(Code::W208),
];

/// Runs every rule. Output is ordered by rule code, then by declaration
/// order of the node each finding is attached to.
pub fn lint(typed: &TypedDiagram, l: &LayoutResult) -> Vec<Diagnostic> {
    lint_allowing(typed, l, &BTreeSet::new())
}

/// Runs every rule not listed in `allow`.
pub fn lint_allowing(typed: &TypedDiagram, l: &LayoutResult, allow: &BTreeSet<Code>) -> Vec<Diagnostic> {
    let d = &typed.diagram;
    let idx = d.node_index();
    let order = |id: &str| idx.get(id).copied().unwrap_or(usize::MAX);
    let mut out: Vec<(Code, usize, usize, Diagnostic)> = Vec::new();
    let mut emit = |code: Code, node_rank: usize, seq: usize, loc: Location, msg: String| {
        if !allow.contains(&code) {
            out.push((code, node_rank, seq, Diagnostic::new(code, loc, msg)));
        }
    };

    if let Some(r) = d.title_placement.filter(|r| *r != Region::TopLeft) {
        emit(
            Code::W201,
            0,
            0,
            Location::Diagram,
            format!("title placed at {}; the title belongs at top_left", r.as_str()),
        );
    }
    for (i, t) in d.tables.iter().enumerate() {
        if t.placement != Region::BottomRight {
            emit(
                Code::W202,
                0,
                i,
                Location::Table(t.id.clone()),
                format!("table placed at {}; data tables belong at bottom_right", t.placement.as_str()),
            );
        }
    }
    for (i, e) in d.edges.iter().enumerate() {
        if e.flow_kind != FlowKind::Recurrent && l.reversed_edges.contains(&e.id) {
            emit(
                Code::W203,
                order(&e.source.node),
                i,
                Location::Edge(e.id.clone()),
                format!(
                    "edge {} -> {} runs backward; mark feedback as recurrent (~>) or reverse it",
                    e.source.node, e.target.node
                ),
            );
        }
    }
    for (i, g) in d.groups.iter().enumerate() {
        if g.entry_side != Side::Left {
            emit(
                Code::W204,
                order(&g.owner),
                i,
                Location::Group(g.id.clone()),
                format!(
                    "detail is entered from the {} side; the owner takes its inputs on the left",
                    g.entry_side.as_str()
                ),
            );
        }
    }
    let registry = d.registry();
    let mut names: BTreeMap<String, &str> = all_symbols()
        .iter()
        .filter(|s| d.dialects.contains(&s.dialect))
        .map(|s| (s.name.to_lowercase(), s.code.as_str()))
        .collect();
    for ext in registry.extensions() {
        if let Extension::Symbol(s) = ext {
            names.insert(s.name.to_lowercase(), s.code.as_str());
        }
    }
    for (i, n) in d.nodes.iter().enumerate() {
        if n.kind != NodeKind::Io && registry.is_extension(&n.code) {
            emit(
                Code::W205,
                i,
                0,
                Location::Node(n.id.clone()),
                format!("`{}` is an extension symbol; prefer built-in symbols", n.code),
            );
        }
        if let Some(code) = n.label.as_ref().and_then(|lab| names.get(&lab.to_lowercase())) {
            emit(
                Code::W206,
                i,
                0,
                Location::Node(n.id.clone()),
                format!("label duplicates the `{code}` symbol; use the symbol instead of words"),
            );
        }
        if matches!(n.kind, NodeKind::Task | NodeKind::Classifier) && n.perf.is_empty() {
            emit(
                Code::W207,
                i,
                0,
                Location::Node(n.id.clone()),
                format!("`{}` has no perf annotation", n.id),
            );
        }
    }
    for (i, id) in mixed_siblings(typed, l) {
        emit(
            Code::W208,
            i,
            0,
            Location::Node(id.clone()),
            format!("feature node `{id}` shares a layer and a predecessor with component nodes; group them in a detail"),
        );
    }
    out.sort_by_key(|o| (o.0, o.1, o.2));
    out.into_iter().map(|o| o.3).collect()
}

/// Feature-class nodes placed in the same layer as a component-class node
/// with a common direct predecessor. Operators and detail members are
/// exempt.
fn mixed_siblings(typed: &TypedDiagram, l: &LayoutResult) -> Vec<(usize, String)> {
    let d = &typed.diagram;
    let idx = d.node_index();
    let grouped: BTreeSet<&str> = d
        .groups
        .iter()
        .flat_map(|g| g.members.nodes.iter().map(String::as_str))
        .collect();
    let mut preds: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for e in &d.edges {
        if e.flow_kind != FlowKind::Recurrent && e.source.node != e.target.node {
            preds.entry(e.target.node.as_str()).or_default().insert(e.source.node.as_str());
        }
    }
    let eligible = |id: &str| {
        idx.get(id).is_some_and(|&i| d.nodes[i].kind != NodeKind::Operator) && !grouped.contains(id)
    };
    let mut flagged = BTreeSet::new();
    for (_, comps) in &l.orders {
        for layer in comps.iter().flatten() {
            for a in layer {
                let na = &d.nodes[idx[a.as_str()]];
                if na.shape_class != ShapeClass::Feature || !eligible(a) {
                    continue;
                }
                let Some(pa) = preds.get(a.as_str()) else {
                    continue;
                };
                let mixed = layer.iter().any(|b| {
                    b != a
                        && eligible(b)
                        && d.nodes[idx[b.as_str()]].shape_class == ShapeClass::Component
                        && preds.get(b.as_str()).is_some_and(|pb| !pa.is_disjoint(pb))
                });
                if mixed {
                    flagged.insert(idx[a.as_str()]);
                }
            }
        }
    }
    flagged.into_iter().map(|i| (i, d.nodes[i].id.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::layout;
    use crate::model::{new_diagram, Node, PerfAnnotation, Port};
    use crate::typecheck::check_diagram;

    fn codes(typed: &TypedDiagram) -> Vec<Code> {
        lint(typed, &layout(typed)).iter().map(|d| d.code).collect()
    }

    fn perf() -> PerfAnnotation {
        PerfAnnotation {
            metric: "acc".into(),
            value: 0.9,
            corpus: "X".into(),
        }
    }

    #[test]
    fn rules_are_unique_and_sorted() {
        assert!(RULES.windows(2).all(|w| w[0].code < w[1].code));
    }

    #[test]
    fn missing_perf() {
        let mut d = new_diagram("D", &["sys"]).unwrap();
        d.add_node(Node::new("c", NodeKind::Classifier, "classifier")).unwrap();
        let typed = check_diagram(&d);
        assert_eq!(codes(&typed), [Code::W207]);
        let allow = BTreeSet::from([Code::W207]);
        assert!(lint_allowing(&typed, &layout(&typed), &allow).is_empty());
    }

    #[test]
    fn backward_edge() {
        let mut d = new_diagram("D", &["sys"]).unwrap();
        for id in ["a", "b"] {
            let mut n = Node::new(id, NodeKind::Task, "POS");
            n.perf.push(perf());
            d.add_node(n).unwrap();
        }
        d.add_edge(Port::out("a", 0), Port::input("b", 0), FlowKind::Flow).unwrap();
        d.add_edge(Port::out("b", 0), Port::input("a", 0), FlowKind::Flow).unwrap();
        let typed = check_diagram(&d);
        assert_eq!(codes(&typed), [Code::W203]);
        let mut d2 = d.clone();
        d2.edges[1].flow_kind = FlowKind::Recurrent;
        assert!(codes(&check_diagram(&d2)).is_empty());
    }

    #[test]
    fn placement_and_labels() {
        let mut d = new_diagram("D", &["sys", "nn"]).unwrap();
        d.title_placement = Some(Region::TopRight);
        d.add_node(Node::new("f", NodeKind::Function, "func").with_label("softmax")).unwrap();
        assert_eq!(codes(&check_diagram(&d)), [Code::W201, Code::W206]);
    }
}
