//! Layer assignment against exhaustive path enumeration.

use dial_core::layout::{debug_dump, layout_diagram, LayoutResult};
use dial_core::model::{new_diagram, Diagram, FlowKind, Node, NodeKind, Port};
use rand::Rng;

/// A random digraph on `n` function nodes. With `acyclic`, every arc runs
/// from a lower to a higher index.
pub fn random_graph(rng: &mut impl Rng, n: usize, acyclic: bool) -> (Diagram, Vec<(usize, usize)>) {
    let mut d = new_diagram("G", &["sys"]).expect("sys dialect");
    for i in 0..n {
        d.add_node(Node::new(&format!("n{i}"), NodeKind::Function, "func"))
            .expect("fresh id");
    }
    let density = rng.gen_range(0.15..0.6);
    let mut arcs = Vec::new();
    let mut slots = vec![0u32; n];
    for s in 0..n {
        for (t, slot) in slots.iter_mut().enumerate() {
            let allowed = if acyclic { s < t } else { s != t };
            if allowed && rng.gen_bool(density) {
                d.add_edge(Port::out(&format!("n{s}"), 0), Port::input(&format!("n{t}"), *slot), FlowKind::Flow)
                    .expect("nodes exist");
                *slot += 1;
                arcs.push((s, t));
            }
        }
    }
    (d, arcs)
}

/// Length of the longest path ending at each vertex, by enumerating every
/// path.
pub fn longest_path_layers(n: usize, arcs: &[(usize, usize)]) -> Vec<u32> {
    fn walk(v: usize, len: u32, arcs: &[(usize, usize)], best: &mut [u32]) {
        best[v] = best[v].max(len);
        for &(s, t) in arcs {
            if s == v {
                walk(t, len + 1, arcs, best);
            }
        }
    }
    let mut best = vec![0; n];
    for v in 0..n {
        walk(v, 0, arcs, &mut best);
    }
    best
}

pub fn layers_of(l: &LayoutResult, n: usize) -> Vec<u32> {
    (0..n).map(|i| l.layers[&format!("n{i}")]).collect()
}

/// Layer monotonicity for every edge that was not reversed.
pub fn monotone(d: &Diagram, l: &LayoutResult) -> Result<(), String> {
    for e in &d.edges {
        if e.flow_kind == FlowKind::Recurrent || l.reversed_edges.contains(&e.id) {
            continue;
        }
        let (s, t) = (l.layers[&e.source.node], l.layers[&e.target.node]);
        if s >= t {
            return Err(format!("edge {} goes from layer {s} to layer {t}", e.id));
        }
    }
    Ok(())
}

/// Layer monotonicity for edges whose endpoints share a block: the top
/// level or one detail group. Layers of different blocks are unrelated, and
/// nodes pinned to a region have none.
pub fn monotone_within_blocks(d: &Diagram, l: &LayoutResult) -> Result<(), String> {
    let home = |id: &str| d.groups.iter().position(|g| g.members.nodes.iter().any(|m| m == id));
    let pinned = |id: &str| d.node(id).is_some_and(|n| n.placement_hint.is_some());
    for e in &d.edges {
        if e.flow_kind == FlowKind::Recurrent
            || l.reversed_edges.contains(&e.id)
            || home(&e.source.node) != home(&e.target.node)
            || pinned(&e.source.node)
            || pinned(&e.target.node)
        {
            continue;
        }
        let (s, t) = (l.layers[&e.source.node], l.layers[&e.target.node]);
        if s >= t {
            return Err(format!("edge {} goes from layer {s} to layer {t}", e.id));
        }
    }
    Ok(())
}

/// No two node boxes intersect.
pub fn disjoint(l: &LayoutResult) -> Result<(), String> {
    let boxes: Vec<_> = l.node_boxes.iter().collect();
    for (i, (a, ra)) in boxes.iter().enumerate() {
        for (b, rb) in &boxes[i + 1..] {
            if ra.intersects(rb) {
                return Err(format!("{a} {ra:?} overlaps {b} {rb:?}"));
            }
        }
    }
    Ok(())
}

/// Lays out twice and compares both the value and its text dump.
pub fn stable(d: &Diagram) -> Result<LayoutResult, String> {
    let a = layout_diagram(d);
    let b = layout_diagram(&d.clone());
    if a != b || debug_dump(d, &a) != debug_dump(d, &b) {
        return Err("layout differs between runs".into());
    }
    Ok(a)
}
