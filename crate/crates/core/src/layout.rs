//! Deterministic left-to-right layered layout.
//!
//! Each block (the top level, or one detail group) is laid out on its own:
//! weakly connected components are stacked vertically, each one layered
//! by longest path, ordered by barycenter sweeps and placed on a 4-unit
//! integer grid. Detail groups sit below the content of the block that
//! owns them; title and tables go into bands above and below.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::graph::{self, Arc};
use crate::model::{canonical_serialize, port_capacity, Diagram, FlowKind, Region, ShapeClass};
use crate::registry::Registry;
use crate::typecheck::TypedDiagram;

pub const GRID: i64 = 4;
pub const MARGIN: i64 = 24;
const H_GAP: i64 = 48;
const MAX_LABEL_GAP: i64 = 176;
/// Distance from the target at which routes turn vertical.
const BEND: i64 = 16;
const V_GAP: i64 = 24;
const COMPONENT_GAP: i64 = 64;
const GROUP_GAP: i64 = 40;
const GROUP_PAD: i64 = 16;
const GROUP_HEADER: i64 = 16;
const BAND_GAP: i64 = 32;
const ITEM_GAP: i64 = 24;
const DUMMY_HEIGHT: i64 = 8;
pub const CHAR_WIDTH: i64 = 8;
pub const SMALL_CHAR_WIDTH: i64 = 6;
pub const TITLE_CHAR_WIDTH: i64 = 10;
pub const PERF_LINE: i64 = 12;
pub const TABLE_HEADER: i64 = 20;
pub const TABLE_ROW: i64 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rect {
    pub x: i64,
    pub y: i64,
    pub w: i64,
    pub h: i64,
}

impl Rect {
    pub fn new(x: i64, y: i64, w: i64, h: i64) -> Self {
        Rect { x, y, w, h }
    }

    pub fn right(&self) -> i64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> i64 {
        self.y + self.h
    }

    pub fn center(&self) -> Point {
        Point::new(self.x + self.w / 2, self.y + self.h / 2)
    }

    /// True when the interiors overlap.
    pub fn intersects(&self, o: &Rect) -> bool {
        self.x < o.right() && o.x < self.right() && self.y < o.bottom() && o.y < self.bottom()
    }

    /// True when `o` lies inside `self` without touching the border.
    pub fn strictly_contains(&self, o: &Rect) -> bool {
        self.x < o.x && o.right() < self.right() && self.y < o.y && o.bottom() < self.bottom()
    }

    fn shifted(&self, dx: i64, dy: i64) -> Rect {
        Rect::new(self.x + dx, self.y + dy, self.w, self.h)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutResult {
    /// Digest of the laid-out diagram's canonical encoding.
    pub diagram_digest: u64,
    pub width: i64,
    pub height: i64,
    pub node_boxes: BTreeMap<String, Rect>,
    pub edge_routes: BTreeMap<String, Vec<Point>>,
    pub group_boxes: BTreeMap<String, Rect>,
    pub reversed_edges: BTreeSet<String>,
    pub layers: BTreeMap<String, u32>,
    /// Per block (`main` or a group id), per component, per layer: node
    /// ids top to bottom.
    pub orders: Vec<(String, Vec<Vec<Vec<String>>>)>,
    pub table_regions: BTreeMap<String, Rect>,
    pub title_region: Rect,
}

/// Stable 64-bit FNV-1a digest.
pub fn digest(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn diagram_digest(d: &Diagram) -> u64 {
    digest(&canonical_serialize(d))
}

fn snap(v: i64) -> i64 {
    v.div_euclid(GRID) * GRID
}

fn snap_up(v: i64) -> i64 {
    (v + GRID - 1).div_euclid(GRID) * GRID
}

fn text_width(s: &str, per_char: i64) -> i64 {
    s.chars().count() as i64 * per_char
}

/// Text of one perf badge line.
pub fn perf_text(metric: &str, value: f64, corpus: &str) -> String {
    format!("{metric}={value}@{corpus}")
}

/// Diameter of the circle drawn for a feature-class node. The label, if
/// any, is written below the circle.
pub fn feature_diameter(node: &crate::model::Node) -> i64 {
    snap_up((text_width(&node.code, SMALL_CHAR_WIDTH) + 8).max(48))
}

/// Height of the label line under a feature circle.
pub const FEATURE_LABEL: i64 = 16;

/// Width and height of a node box.
pub fn node_size(node: &crate::model::Node) -> (i64, i64) {
    let perf_h = PERF_LINE * node.perf.len() as i64;
    let mut w = 0;
    for p in &node.perf {
        w = w.max(text_width(&perf_text(&p.metric, p.value, &p.corpus), SMALL_CHAR_WIDTH) + 16);
    }
    if node.shape_class == ShapeClass::Feature {
        let d = feature_diameter(node);
        let label_h = node.label.as_ref().map_or(0, |l| {
            w = w.max(text_width(l, SMALL_CHAR_WIDTH) + 8);
            FEATURE_LABEL
        });
        return (snap_up(w.max(d)), snap_up(d + label_h + perf_h));
    }
    w = w.max(text_width(&node.display_text(), CHAR_WIDTH) + 16).max(48);
    (snap_up(w), snap_up(40 + perf_h))
}

pub fn table_title(kind: crate::model::TableKind) -> &'static str {
    match kind {
        crate::model::TableKind::Hyperparams => "Hyperparameters",
        crate::model::TableKind::Results => "Results",
        crate::model::TableKind::Freeform => "Notes",
    }
}

pub fn table_row_text(k: &str, v: &str) -> String {
    format!("{k}: {v}")
}

fn table_size(t: &crate::model::MetaTable) -> (i64, i64) {
    let mut w = text_width(table_title(t.kind), SMALL_CHAR_WIDTH) + 16;
    for (k, v) in &t.rows {
        w = w.max(text_width(&table_row_text(k, v), SMALL_CHAR_WIDTH) + 16);
    }
    let h = TABLE_HEADER + TABLE_ROW * t.rows.len() as i64 + 8;
    (snap_up(w), snap_up(h))
}

fn title_size(d: &Diagram) -> (i64, i64) {
    (snap_up(text_width(&d.name, TITLE_CHAR_WIDTH) + 16), 28)
}

/// Greedy cycle breaking over non-recurrent edges: while a cycle remains,
/// the edge on it declared last is reversed. Non-recurrent self-loops are
/// always reversed; recurrent edges never take part in layering.
pub fn break_cycles(d: &Diagram) -> BTreeSet<String> {
    let idx = d.node_index();
    let mut arcs: Vec<Arc> = Vec::new();
    let mut ids: Vec<&str> = Vec::new();
    for e in &d.edges {
        if e.flow_kind == FlowKind::Recurrent {
            continue;
        }
        if let (Some(&s), Some(&t)) = (idx.get(e.source.node.as_str()), idx.get(e.target.node.as_str())) {
            arcs.push((s, t));
            ids.push(&e.id);
        }
    }
    graph::feedback_arcs(d.nodes.len(), &arcs)
        .into_iter()
        .map(|i| ids[i].to_string())
        .collect()
}

/// Longest-path layering of an acyclic arc list.
pub fn assign_layers(n: usize, arcs: &[Arc]) -> Vec<u32> {
    graph::longest_path_layers(n, arcs, &BTreeSet::new())
}

/// Number of crossing segment pairs between adjacent layers. `segments`
/// connect a vertex to one in the next layer.
pub fn count_crossings(layers: &[Vec<usize>], segments: &[(usize, usize)]) -> usize {
    let pos = positions(layers);
    let layer_of = layer_index(layers);
    let mut by_layer: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for &(u, v) in segments {
        by_layer.entry(layer_of[&u]).or_default().push((pos[&u], pos[&v]));
    }
    by_layer.values().map(|segs| crossings_between(segs)).sum()
}

fn crossings_between(segs: &[(usize, usize)]) -> usize {
    let mut c = 0;
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let (a, b) = (segs[i], segs[j]);
            if (a.0 < b.0 && a.1 > b.1) || (a.0 > b.0 && a.1 < b.1) {
                c += 1;
            }
        }
    }
    c
}

fn positions(layers: &[Vec<usize>]) -> BTreeMap<usize, usize> {
    layers
        .iter()
        .flat_map(|l| l.iter().enumerate().map(|(i, &v)| (v, i)))
        .collect()
}

fn layer_index(layers: &[Vec<usize>]) -> BTreeMap<usize, usize> {
    layers
        .iter()
        .enumerate()
        .flat_map(|(li, l)| l.iter().map(move |&v| (v, li)))
        .collect()
}

/// Crossing reduction. Vertex ids encode declaration order (lower id
/// declared first). Runs four barycenter sweeps (down, up, down, up),
/// keeps the best ordering seen, then applies adjacent transpositions
/// while they strictly reduce crossings.
pub fn order_within_layers(layers: &[Vec<usize>], segments: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut order: Vec<Vec<usize>> = layers
        .iter()
        .map(|l| {
            let mut l = l.clone();
            l.sort_unstable();
            l
        })
        .collect();
    let mut preds: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut succs: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(u, v) in segments {
        succs.entry(u).or_default().push(v);
        preds.entry(v).or_default().push(u);
    }
    let mut best = order.clone();
    let mut best_c = count_crossings(&best, segments);
    for pass in 0..4 {
        let down = pass % 2 == 0;
        let range: Vec<usize> = if down {
            (1..order.len()).collect()
        } else {
            (0..order.len().saturating_sub(1)).rev().collect()
        };
        for li in range {
            let reference = if down { li - 1 } else { li + 1 };
            let ref_pos: BTreeMap<usize, i64> = order[reference]
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, i as i64))
                .collect();
            let neigh = if down { &preds } else { &succs };
            let mut keyed: Vec<(i64, i64, usize)> = order[li]
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let ns: Vec<i64> = neigh
                        .get(&v)
                        .map(|n| n.iter().filter_map(|u| ref_pos.get(u).copied()).collect())
                        .unwrap_or_default();
                    if ns.is_empty() {
                        (i as i64, 1, v)
                    } else {
                        (ns.iter().sum(), ns.len() as i64, v)
                    }
                })
                .collect();
            keyed.sort_by(|a, b| match (a.0 * b.1).cmp(&(b.0 * a.1)) {
                Ordering::Equal => a.2.cmp(&b.2),
                other => other,
            });
            order[li] = keyed.into_iter().map(|k| k.2).collect();
        }
        let c = count_crossings(&order, segments);
        if c < best_c {
            best_c = c;
            best = order.clone();
        }
    }
    transpose(&mut best, segments, best_c);
    best
}

fn transpose(order: &mut [Vec<usize>], segments: &[(usize, usize)], mut current: usize) {
    for _ in 0..32 {
        let mut improved = false;
        for li in 0..order.len() {
            for i in 0..order[li].len().saturating_sub(1) {
                order[li].swap(i, i + 1);
                let c = count_crossings(order, segments);
                if c < current {
                    current = c;
                    improved = true;
                } else {
                    order[li].swap(i, i + 1);
                }
            }
        }
        if !improved {
            break;
        }
    }
}

/// A laid-out block in coordinates relative to its own origin.
#[derive(Debug, Default)]
struct Block {
    w: i64,
    h: i64,
    nodes: Vec<(usize, Rect)>,
    groups: Vec<(usize, Rect)>,
    routes: Vec<(usize, Vec<Point>)>,
    layers: Vec<(usize, u32)>,
    orders: Vec<(String, Vec<Vec<Vec<String>>>)>,
}

impl Block {
    fn absorb(&mut self, other: Block, dx: i64, dy: i64) {
        self.nodes.extend(other.nodes.into_iter().map(|(i, r)| (i, r.shifted(dx, dy))));
        self.groups.extend(other.groups.into_iter().map(|(i, r)| (i, r.shifted(dx, dy))));
        self.routes.extend(
            other
                .routes
                .into_iter()
                .map(|(i, pts)| (i, pts.into_iter().map(|p| Point::new(p.x + dx, p.y + dy)).collect())),
        );
        self.layers.extend(other.layers);
        self.orders.extend(other.orders);
    }
}

struct Ctx<'a> {
    d: &'a Diagram,
    registry: Registry,
    idx: BTreeMap<&'a str, usize>,
    /// Innermost group listing each node; `None` for the top level.
    home: Vec<Option<usize>>,
    hinted: Vec<bool>,
    sizes: Vec<(i64, i64)>,
    reversed: BTreeSet<usize>,
    /// Number of input slots drawn on each node.
    in_slots: Vec<u32>,
    /// Label width of each edge; zero when unlabelled.
    term_w: Vec<i64>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Vertex {
    Real(usize),
    Dummy(usize, u32),
}

/// Lays out a checked diagram, widening layer gaps so inferred edge terms
/// fit beside their edges.
pub fn layout(typed: &TypedDiagram) -> LayoutResult {
    let d = &typed.diagram;
    let mut ctx = Ctx::new(d);
    ctx.term_w = d
        .edges
        .iter()
        .map(|e| {
            typed
                .edge_terms
                .get(&e.id)
                .map_or(0, |t| edge_label_width(&t.to_string()))
        })
        .collect();
    let main = ctx.block(None);
    ctx.compose(main)
}

/// Lays out a diagram without edge terms. A pure function of the diagram
/// value.
pub fn layout_diagram(d: &Diagram) -> LayoutResult {
    let ctx = Ctx::new(d);
    let main = ctx.block(None);
    ctx.compose(main)
}

/// Horizontal room an edge term label needs.
pub fn edge_label_width(term: &str) -> i64 {
    SMALL_CHAR_WIDTH * term.chars().count() as i64 + 8
}

impl<'a> Ctx<'a> {
    fn new(d: &'a Diagram) -> Self {
        let idx = d.node_index();
        let ng = d.groups.len();
        // Group depth via containment; bounded to survive malformed input.
        let containing = |g: usize| -> Option<usize> {
            d.groups
                .iter()
                .enumerate()
                .filter(|(i, a)| *i != g && a.members.nodes.contains(&d.groups[g].owner))
                .map(|(i, _)| i)
                .next()
        };
        let mut group_parent: Vec<Option<usize>> = (0..ng).map(containing).collect();
        for g in 0..ng {
            let mut cur = group_parent[g];
            let mut steps = 0;
            while let Some(p) = cur {
                if p == g || steps > ng {
                    group_parent[g] = None;
                    break;
                }
                cur = group_parent[p];
                steps += 1;
            }
        }
        let depth = |g: usize| {
            let mut depth = 0;
            let mut cur = group_parent[g];
            while let Some(p) = cur {
                depth += 1;
                cur = group_parent[p];
            }
            depth
        };
        let mut home: Vec<Option<usize>> = vec![None; d.nodes.len()];
        for (gi, g) in d.groups.iter().enumerate() {
            if d.nodes.iter().all(|n| n.id != g.owner) {
                continue;
            }
            for m in &g.members.nodes {
                if let Some(&ni) = idx.get(m.as_str()) {
                    if *m == g.owner {
                        continue;
                    }
                    if home[ni].is_none_or(|h| depth(gi) > depth(h)) {
                        home[ni] = Some(gi);
                    }
                }
            }
        }
        // A group whose owner has no node is not drawn; its members fall
        // back to the top level above.
        let hinted = d
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| n.placement_hint.is_some() && home[i].is_none())
            .collect();
        let sizes = d.nodes.iter().map(node_size).collect();
        let reversed_ids = break_cycles(d);
        let reversed = d
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| reversed_ids.contains(&e.id))
            .map(|(i, _)| i)
            .collect();
        let mut in_slots = vec![0u32; d.nodes.len()];
        for e in &d.edges {
            if let (Some(&t), Some(s)) = (idx.get(e.target.node.as_str()), e.target.slot.index()) {
                in_slots[t] = in_slots[t].max(s + 1);
            }
        }
        Ctx {
            d,
            registry: d.registry(),
            idx,
            home,
            hinted,
            sizes,
            reversed,
            in_slots,
            term_w: vec![0; d.edges.len()],
        }
    }

    fn endpoints(&self, e: usize) -> Option<(usize, usize)> {
        let edge = &self.d.edges[e];
        Some((*self.idx.get(edge.source.node.as_str())?, *self.idx.get(edge.target.node.as_str())?))
    }

    fn group_drawn(&self, g: usize) -> bool {
        self.idx.contains_key(self.d.groups[g].owner.as_str())
    }

    fn block(&self, group: Option<usize>) -> Block {
        let members: Vec<usize> = (0..self.d.nodes.len())
            .filter(|&i| self.home[i] == group && !self.hinted[i])
            .collect();
        let member_set: BTreeSet<usize> = members.iter().copied().collect();
        let edges: Vec<usize> = (0..self.d.edges.len())
            .filter(|&e| {
                self.endpoints(e)
                    .is_some_and(|(s, t)| member_set.contains(&s) && member_set.contains(&t))
            })
            .collect();
        let mut block = Block::default();
        let name = group.map_or_else(|| "main".to_string(), |g| self.d.groups[g].id.clone());
        let mut comp_orders = Vec::new();

        let local: BTreeMap<usize, usize> = members.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let arcs: Vec<Arc> = edges
            .iter()
            .map(|&e| {
                let (s, t) = self.endpoints(e).expect("filtered");
                (local[&s], local[&t])
            })
            .collect();
        let mut y = 0;
        for comp in graph::weak_components(members.len(), &arcs) {
            let comp_nodes: Vec<usize> = comp.iter().map(|&l| members[l]).collect();
            let comp_set: BTreeSet<usize> = comp_nodes.iter().copied().collect();
            let comp_edges: Vec<usize> = edges
                .iter()
                .copied()
                .filter(|&e| comp_set.contains(&self.endpoints(e).expect("filtered").0))
                .collect();
            let (c, order) = self.component(&comp_nodes, &comp_edges);
            let (cw, ch) = (c.w, c.h);
            if y > 0 {
                y += COMPONENT_GAP;
            }
            block.absorb(c, 0, y);
            block.w = block.w.max(cw);
            y += ch;
            comp_orders.push(order);
        }
        block.h = y;
        block.orders.insert(0, (name, comp_orders));

        // Detail groups owned from this block go in a row below it.
        let mut cursor = 0;
        let row_y = if block.h > 0 { block.h + GROUP_GAP } else { 0 };
        let mut row_h = 0;
        for g in 0..self.d.groups.len() {
            if !self.group_drawn(g) {
                continue;
            }
            let owner = self.idx[self.d.groups[g].owner.as_str()];
            let parent = if self.hinted[owner] { None } else { self.home[owner] };
            if parent != group {
                continue;
            }
            let inner = self.block(Some(g));
            let gw = inner.w + 2 * GROUP_PAD;
            let gh = inner.h + 2 * GROUP_PAD + GROUP_HEADER;
            let owner_x = block
                .nodes
                .iter()
                .find(|(n, _)| *n == owner)
                .map_or(0, |(_, r)| r.x);
            let x = owner_x.max(cursor);
            block.groups.push((g, Rect::new(x, row_y, gw, gh)));
            block.absorb(inner, x + GROUP_PAD, row_y + GROUP_PAD + GROUP_HEADER);
            cursor = x + gw + ITEM_GAP;
            row_h = row_h.max(gh);
            block.w = block.w.max(x + gw);
        }
        if row_h > 0 {
            block.h = row_y + row_h;
        }
        block
    }

    fn out_slots(&self, n: usize) -> u32 {
        port_capacity(&self.d.nodes[n], &self.registry, &self.d.dialects)
            .map_or(1, |(_, outs)| outs)
            .max(1)
    }

    fn source_anchor(&self, e: usize, r: &Rect) -> Point {
        let (s, _) = self.endpoints(e).expect("edge endpoints exist");
        let slot = self.d.edges[e].source.slot.index().unwrap_or(0) as i64;
        let outs = self.out_slots(s) as i64;
        let node = &self.d.nodes[s];
        if node.shape_class == ShapeClass::Feature {
            let d = feature_diameter(node);
            return Point::new(r.x + r.w / 2 + d / 2, r.y + d / 2);
        }
        if outs <= 1 {
            return Point::new(r.right(), snap(r.y + r.h / 2));
        }
        Point::new(r.right(), snap(r.y + r.h * (slot + 1) / (outs + 1)))
    }

    fn target_anchor(&self, e: usize, r: &Rect) -> Point {
        let (_, t) = self.endpoints(e).expect("edge endpoints exist");
        let slot = self.d.edges[e].target.slot.index().unwrap_or(0) as i64;
        let n = self.in_slots[t] as i64;
        let node = &self.d.nodes[t];
        if node.shape_class == ShapeClass::Feature {
            let d = feature_diameter(node);
            return Point::new(r.x + r.w / 2 - d / 2, r.y + d / 2);
        }
        if n <= 1 {
            return Point::new(r.x, snap(r.y + r.h / 2));
        }
        Point::new(r.x, snap(r.y + r.h * (slot + 1) / (n + 1)))
    }

    fn component(&self, nodes: &[usize], edges: &[usize]) -> (Block, Vec<Vec<String>>) {
        let local: BTreeMap<usize, usize> = nodes.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let mut kept: Vec<(usize, usize, usize)> = Vec::new();
        let mut back: Vec<usize> = Vec::new();
        for &e in edges {
            let (s, t) = self.endpoints(e).expect("filtered");
            if self.d.edges[e].flow_kind == FlowKind::Recurrent || self.reversed.contains(&e) || s == t {
                back.push(e);
            } else {
                kept.push((e, local[&s], local[&t]));
            }
        }
        let arcs: Vec<Arc> = kept.iter().map(|&(_, s, t)| (s, t)).collect();
        let layer = assign_layers(nodes.len(), &arcs);
        let n_layers = layer.iter().max().map_or(0, |m| *m as usize + 1);

        // Vertex ids in declaration order: real nodes, then dummies.
        let mut vertices: Vec<(Vertex, u32)> = nodes
            .iter()
            .enumerate()
            .map(|(l, &g)| (Vertex::Real(g), layer[l]))
            .collect();
        let mut chains: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut segments = Vec::new();
        for &(e, s, t) in &kept {
            let mut chain = vec![s];
            for k in layer[s] + 1..layer[t] {
                vertices.push((Vertex::Dummy(e, k), k));
                chain.push(vertices.len() - 1);
            }
            chain.push(t);
            for w in chain.windows(2) {
                segments.push((w[0], w[1]));
            }
            chains.push((e, chain));
        }
        let mut layers: Vec<Vec<usize>> = vec![Vec::new(); n_layers];
        for (v, (_, l)) in vertices.iter().enumerate() {
            layers[*l as usize].push(v);
        }
        let order = order_within_layers(&layers, &segments);

        let size = |v: usize| match vertices[v].0 {
            Vertex::Real(g) => self.sizes[g],
            Vertex::Dummy(..) => (0, DUMMY_HEIGHT),
        };
        let col_w: Vec<i64> = order
            .iter()
            .map(|l| l.iter().map(|&v| size(v).0).max().unwrap_or(0).max(16))
            .collect();
        let layer_h: Vec<i64> = order
            .iter()
            .map(|l| l.iter().map(|&v| size(v).1).sum::<i64>() + V_GAP * (l.len() as i64 - 1).max(0))
            .collect();
        let content_h = layer_h.iter().copied().max().unwrap_or(0);
        let mut gap = vec![H_GAP; n_layers];
        for &(e, s, _) in &kept {
            let g = &mut gap[layer[s] as usize];
            *g = (*g).max(snap_up(self.term_w[e] + 24).min(MAX_LABEL_GAP));
        }
        let top_pad = if back.is_empty() { 0 } else { 16 + 8 * back.len() as i64 };
        let mut rects: Vec<Rect> = vec![Rect::default(); vertices.len()];
        let mut x = 0;
        for (li, l) in order.iter().enumerate() {
            let mut y = top_pad + snap((content_h - layer_h[li]) / 2);
            for &v in l {
                let (w, h) = size(v);
                rects[v] = Rect::new(x + snap((col_w[li] - w) / 2), y, w, h);
                y += h + V_GAP;
            }
            x += col_w[li] + gap[li];
        }
        let width = (x - gap.last().copied().unwrap_or(0)).max(0);

        let mut block = Block {
            w: width,
            h: top_pad + content_h,
            ..Block::default()
        };
        for (l, &g) in nodes.iter().enumerate() {
            block.nodes.push((g, rects[l]));
            block.layers.push((g, layer[l]));
        }
        for (e, chain) in &chains {
            let mut pts = vec![self.source_anchor(*e, &rects[chain[0]])];
            pts.extend(chain[1..chain.len() - 1].iter().map(|&v| rects[v].center()));
            pts.push(self.target_anchor(*e, &rects[*chain.last().expect("chain has ends")]));
            block.routes.push((*e, orthogonal(&pts)));
        }
        for (k, &e) in back.iter().enumerate() {
            let (s, t) = self.endpoints(e).expect("filtered");
            let (rs, rt) = (rects[local[&s]], rects[local[&t]]);
            let loop_y = 8 + 8 * k as i64;
            let (sx, tx) = if s == t {
                (rs.center().x + 8, rs.center().x - 8)
            } else {
                (rs.center().x, rt.center().x)
            };
            block.routes.push((
                e,
                vec![
                    Point::new(sx, rs.y),
                    Point::new(sx, loop_y),
                    Point::new(tx, loop_y),
                    Point::new(tx, rt.y),
                ],
            ));
        }
        let names = order
            .iter()
            .map(|l| {
                l.iter()
                    .filter_map(|&v| match vertices[v].0 {
                        Vertex::Real(g) => Some(self.d.nodes[g].id.clone()),
                        Vertex::Dummy(..) => None,
                    })
                    .collect()
            })
            .collect();
        (block, names)
    }

    fn compose(&self, main: Block) -> LayoutResult {
        let d = self.d;
        enum Item {
            Title,
            Table(usize),
            Node(usize),
        }
        let mut bands: BTreeMap<Region, Vec<(Item, i64, i64)>> = BTreeMap::new();
        let (tw, th) = title_size(d);
        bands
            .entry(d.title_placement.unwrap_or(Region::TopLeft))
            .or_default()
            .push((Item::Title, tw, th));
        for (i, t) in d.tables.iter().enumerate() {
            let (w, h) = table_size(t);
            bands.entry(t.placement).or_default().push((Item::Table(i), w, h));
        }
        for (i, n) in d.nodes.iter().enumerate() {
            if self.hinted[i] {
                let (w, h) = self.sizes[i];
                bands
                    .entry(n.placement_hint.expect("hinted"))
                    .or_default()
                    .push((Item::Node(i), w, h));
            }
        }
        let row_w = |r: Region| -> i64 {
            bands.get(&r).map_or(0, |items| {
                items.iter().map(|i| i.1).sum::<i64>() + ITEM_GAP * (items.len() as i64 - 1).max(0)
            })
        };
        let band_h = |a: Region, b: Region| -> i64 {
            [a, b]
                .iter()
                .flat_map(|r| bands.get(r).into_iter().flatten())
                .map(|i| i.2)
                .max()
                .unwrap_or(0)
        };
        let inner_w = main
            .w
            .max(row_w(Region::TopLeft) + row_w(Region::TopRight) + ITEM_GAP)
            .max(row_w(Region::BottomLeft) + row_w(Region::BottomRight) + ITEM_GAP);
        let width = snap_up(inner_w + 2 * MARGIN);
        let top_h = band_h(Region::TopLeft, Region::TopRight);
        let main_y = MARGIN + if top_h > 0 { top_h + BAND_GAP } else { 0 };
        let bottom_y = main_y + if main.h > 0 { main.h + BAND_GAP } else { 0 };
        let bottom_h = band_h(Region::BottomLeft, Region::BottomRight);
        let content_bottom = if bottom_h > 0 {
            bottom_y + bottom_h
        } else {
            main_y + main.h
        };
        let height = snap_up(content_bottom.max(MARGIN + top_h) + MARGIN);

        let mut result = LayoutResult {
            diagram_digest: diagram_digest(d),
            width,
            height,
            node_boxes: BTreeMap::new(),
            edge_routes: BTreeMap::new(),
            group_boxes: BTreeMap::new(),
            reversed_edges: self.reversed.iter().map(|&e| d.edges[e].id.clone()).collect(),
            layers: BTreeMap::new(),
            orders: Vec::new(),
            table_regions: BTreeMap::new(),
            title_region: Rect::default(),
        };
        let mut placed = Block::default();
        placed.absorb(main, MARGIN, main_y);
        for (region, items) in &bands {
            let y = if region.is_top() { MARGIN } else { bottom_y };
            let mut x = if region.is_left() { MARGIN } else { width - MARGIN - row_w(*region) };
            for (item, w, h) in items {
                let r = Rect::new(x, y, *w, *h);
                match item {
                    Item::Title => result.title_region = r,
                    Item::Table(i) => {
                        result.table_regions.insert(d.tables[*i].id.clone(), r);
                    }
                    Item::Node(i) => placed.nodes.push((*i, r)),
                }
                x += w + ITEM_GAP;
            }
        }
        for (i, r) in &placed.nodes {
            result.node_boxes.entry(d.nodes[*i].id.clone()).or_insert(*r);
        }
        for (g, r) in &placed.groups {
            result.group_boxes.insert(d.groups[*g].id.clone(), *r);
        }
        for (n, l) in &placed.layers {
            result.layers.insert(d.nodes[*n].id.clone(), *l);
        }
        result.orders = placed.orders;
        let mut routes: BTreeMap<usize, Vec<Point>> = placed.routes.into_iter().collect();
        for e in 0..d.edges.len() {
            if routes.contains_key(&e) {
                continue;
            }
            let Some((s, t)) = self.endpoints(e) else {
                continue;
            };
            let (Some(rs), Some(rt)) = (
                result.node_boxes.get(&d.nodes[s].id),
                result.node_boxes.get(&d.nodes[t].id),
            ) else {
                continue;
            };
            routes.insert(e, cross_route(self.source_anchor(e, rs), self.target_anchor(e, rt)));
        }
        for (e, pts) in routes {
            result.edge_routes.insert(d.edges[e].id.clone(), pts);
        }
        result
    }
}

/// Inserts horizontal-vertical-horizontal bends between points that are
/// not level.
fn orthogonal(pts: &[Point]) -> Vec<Point> {
    let mut out = vec![pts[0]];
    for w in pts.windows(2) {
        let (p, q) = (w[0], w[1]);
        if p.y != q.y {
            let mx = if q.x - p.x > 2 * BEND {
                q.x - BEND
            } else {
                snap((p.x + q.x) / 2)
            };
            out.push(Point::new(mx, p.y));
            out.push(Point::new(mx, q.y));
        }
        out.push(q);
    }
    out
}

/// Route between nodes of different blocks.
fn cross_route(p: Point, q: Point) -> Vec<Point> {
    if q.x > p.x {
        return orthogonal(&[p, q]);
    }
    let my = snap((p.y + q.y) / 2);
    vec![
        p,
        Point::new(p.x + 8, p.y),
        Point::new(p.x + 8, my),
        Point::new(q.x - 8, my),
        Point::new(q.x - 8, q.y),
        q,
    ]
}

/// Text dump of layers and per-layer orders, for `--debug-layout`.
pub fn debug_dump(d: &Diagram, l: &LayoutResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "diagram {:?} {}x{}", d.name, l.width, l.height);
    for (block, comps) in &l.orders {
        for (ci, comp) in comps.iter().enumerate() {
            let _ = writeln!(out, "block {block} component {ci}");
            for (li, layer) in comp.iter().enumerate() {
                let _ = writeln!(out, "  layer {li}: {}", layer.join(" "));
            }
        }
    }
    let rev: Vec<&str> = l.reversed_edges.iter().map(String::as_str).collect();
    let _ = writeln!(out, "reversed: {}", if rev.is_empty() { "-".to_string() } else { rev.join(" ") });
    for n in &d.nodes {
        if let Some(r) = l.node_boxes.get(&n.id) {
            let _ = writeln!(out, "node {} ({}, {}) {}x{}", n.id, r.x, r.y, r.w, r.h);
        }
    }
    out
}
