//! SVG and TikZ emitters.
//!
//! Both backends draw the same [`Scene`]: one [`Element`] per title,
//! node, detail group, table and edge, each a list of primitives in
//! integer coordinates with y pointing down.

mod glyphs;
mod svg;
mod tikz;

pub use glyphs::{glyph, glyph_for, glyph_for_in, Anchors, Badge, GlyphSpec, LabelSlots, Place, Primitive, GLYPHS};
pub use svg::render_svg;
pub use tikz::render_tikz;

use crate::diag::{Code, Diagnostic, Location};
use crate::layout::{
    diagram_digest, edge_label_width, feature_diameter, perf_text, table_row_text, table_title, LayoutResult, Point, Rect, PERF_LINE, TABLE_HEADER,
    TABLE_ROW,
};
use crate::model::{Diagram, FlowKind, NodeKind, ShapeClass};
use crate::typecheck::TypedDiagram;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderOptions {
    /// Print inferred data terms along edges.
    pub edge_terms: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { edge_terms: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum FontSize {
    Title,
    Normal,
    Small,
}

impl FontSize {
    pub(crate) fn px(self) -> i64 {
        match self {
            FontSize::Title => 16,
            FontSize::Normal => 12,
            FontSize::Small => 9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Align {
    Start,
    Middle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Script {
    Base,
    Sup,
    Sub,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Content {
    Plain(String),
    /// A data term split into base, superscript and subscript runs.
    Term(Vec<(Script, String)>),
    Mark { unicode: String, tex: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Tip {
    None,
    Arrow,
    Bar,
    OpenCircle,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Seg {
    Move(Point),
    Line(Point),
    Cubic(Point, Point, Point),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Prim {
    Rect { r: Rect, rounded: bool, dashed: bool },
    Circle { c: Point, r: i64 },
    Ellipse { c: Point, rx: i64, ry: i64 },
    Polygon(Vec<Point>),
    Path(Vec<Seg>),
    Line { pts: Vec<Point>, dashed: bool, start: Tip, end: Tip },
    Text { at: Point, content: Content, size: FontSize, align: Align, bold: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Element {
    pub class: &'static str,
    pub id: String,
    pub prims: Vec<Prim>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Scene {
    pub width: i64,
    pub height: i64,
    pub elements: Vec<Element>,
}

/// Rejects a layout computed from a different diagram value.
pub fn check_pairing(d: &Diagram, l: &LayoutResult) -> Result<(), Diagnostic> {
    let missing = d.nodes.iter().find(|n| !l.node_boxes.contains_key(&n.id));
    if l.diagram_digest != diagram_digest(d) || missing.is_some() {
        return Err(Diagnostic::new(
            Code::E301,
            Location::Diagram,
            "layout was not computed from this diagram",
        ));
    }
    Ok(())
}

/// Splits an ASCII term into runs: `^x` / `^{..}` become superscripts and
/// `_x` / `_{..}` subscripts.
pub(crate) fn term_runs(s: &str) -> Vec<(Script, String)> {
    let mut runs: Vec<(Script, String)> = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    let push = |runs: &mut Vec<(Script, String)>, script: Script, text: &str| {
        match runs.last_mut() {
            Some((sc, t)) if *sc == script => t.push_str(text),
            _ => runs.push((script, text.to_string())),
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if (c == '^' || c == '_') && i + 1 < chars.len() {
            let script = if c == '^' { Script::Sup } else { Script::Sub };
            let mut text = String::new();
            if chars[i + 1] == '{' {
                let mut depth = 0;
                i += 1;
                while i < chars.len() {
                    match chars[i] {
                        '{' => depth += 1,
                        '}' => depth -= 1,
                        _ => {}
                    }
                    if depth == 0 {
                        break;
                    }
                    if !(chars[i] == '{' && depth == 1) {
                        text.push(chars[i]);
                    }
                    i += 1;
                }
                i += 1;
            } else {
                let word: String = chars[i + 1..].iter().take_while(|c| c.is_ascii_alphanumeric()).collect();
                if script == Script::Sub && word.chars().count() > 2 {
                    push(&mut runs, Script::Base, "_");
                    i += 1;
                    continue;
                }
                i += 1 + word.chars().count();
                text = word;
            }
            push(&mut runs, script, &text);
        } else {
            push(&mut runs, Script::Base, &c.to_string());
            i += 1;
        }
    }
    runs
}

fn text(at: Point, content: Content, size: FontSize) -> Prim {
    Prim::Text {
        at,
        content,
        size,
        align: Align::Middle,
        bold: false,
    }
}

/// Half-ellipse bulging downward from `a` to `b` (cubic approximation).
fn lower_arc(a: Point, b: Point, ry: i64) -> Seg {
    let k = ry * 4 / 3;
    Seg::Cubic(Point::new(a.x, a.y + k), Point::new(b.x, b.y + k), b)
}

fn shape(primitive: Primitive, r: Rect) -> Vec<Prim> {
    let c = r.center();
    match primitive {
        Primitive::Rectangle => vec![Prim::Rect {
            r,
            rounded: false,
            dashed: false,
        }],
        Primitive::RoundedRectangle => vec![Prim::Rect {
            r,
            rounded: true,
            dashed: false,
        }],
        Primitive::Circle => vec![Prim::Circle { c, r: r.w.min(r.h) / 2 }],
        Primitive::Ellipse => vec![Prim::Ellipse {
            c,
            rx: r.w / 2,
            ry: r.h / 2,
        }],
        Primitive::Diamond => vec![Prim::Polygon(vec![
            Point::new(c.x, r.y),
            Point::new(r.right(), c.y),
            Point::new(c.x, r.bottom()),
            Point::new(r.x, c.y),
        ])],
        Primitive::TrapezoidRight => vec![Prim::Polygon(vec![
            Point::new(r.x, r.y),
            Point::new(r.right(), r.y + r.h / 4),
            Point::new(r.right(), r.bottom() - r.h / 4),
            Point::new(r.x, r.bottom()),
        ])],
        Primitive::TrapezoidLeft => vec![Prim::Polygon(vec![
            Point::new(r.x, r.y + r.h / 4),
            Point::new(r.right(), r.y),
            Point::new(r.right(), r.bottom()),
            Point::new(r.x, r.bottom() - r.h / 4),
        ])],
        Primitive::Cylinder => {
            let ry = 6;
            let top = r.y + ry;
            let bottom = r.bottom() - ry;
            vec![
                Prim::Path(vec![
                    Seg::Move(Point::new(r.x, top)),
                    Seg::Line(Point::new(r.x, bottom)),
                    lower_arc(Point::new(r.x, bottom), Point::new(r.right(), bottom), ry),
                    Seg::Line(Point::new(r.right(), top)),
                ]),
                Prim::Ellipse {
                    c: Point::new(c.x, top),
                    rx: r.w / 2,
                    ry,
                },
            ]
        }
        Primitive::AnnotatedText => Vec::new(),
    }
}

fn badge(b: Badge, r: Rect) -> Vec<Prim> {
    let (rx, ty) = (r.right(), r.y);
    match b {
        Badge::None => Vec::new(),
        Badge::Star => vec![text(
            Point::new(rx - 10, ty + 16),
            Content::Mark {
                unicode: "\u{2605}".into(),
                tex: "$\\star$".into(),
            },
            FontSize::Normal,
        )],
        Badge::Letter(l) => vec![
            Prim::Circle {
                c: Point::new(rx - 10, ty + 16),
                r: 6,
            },
            text(Point::new(rx - 10, ty + 19), Content::Plain(l.to_string()), FontSize::Small),
        ],
        Badge::CornerMark(l) => vec![
            Prim::Rect {
                r: Rect::new(r.x, r.y, 12, 12),
                rounded: false,
                dashed: false,
            },
            text(Point::new(r.x + 6, r.y + 10), Content::Plain(l.to_string()), FontSize::Small),
        ],
        Badge::Checkbox => vec![
            Prim::Rect {
                r: Rect::new(rx - 14, ty + 4, 10, 10),
                rounded: false,
                dashed: false,
            },
            Prim::Line {
                pts: vec![Point::new(rx - 12, ty + 9), Point::new(rx - 10, ty + 12), Point::new(rx - 6, ty + 6)],
                dashed: false,
                start: Tip::None,
                end: Tip::None,
            },
        ],
        Badge::HalfCircle => {
            let c = r.center();
            vec![Prim::Path(vec![
                Seg::Move(Point::new(rx, c.y - 6)),
                Seg::Cubic(Point::new(rx + 8, c.y - 6), Point::new(rx + 8, c.y + 6), Point::new(rx, c.y + 6)),
            ])]
        }
    }
}

fn mark_content(g: &GlyphSpec, node: &crate::model::Node) -> Option<Content> {
    let (u, t) = (g.mark?, g.mark_tex?);
    let n = node.param("n").unwrap_or("n");
    Some(Content::Mark {
        unicode: u.replace("{n}", n),
        tex: t.replace("{n}", &tikz::escape(n)),
    })
}

fn node_element(d: &Diagram, registry: &crate::registry::Registry, node: &crate::model::Node, r: Rect) -> Element {
    let g = glyphs::glyph_for_node(registry, node, &d.dialects);
    let primitive = match (node.shape_class, g.primitive) {
        (_, Primitive::AnnotatedText) => Primitive::AnnotatedText,
        (ShapeClass::Feature, _) => Primitive::Circle,
        (ShapeClass::Component, Primitive::Circle) => Primitive::Ellipse,
        (ShapeClass::Component, p) => p,
    };
    let perf_h = PERF_LINE * node.perf.len() as i64;
    let cx = r.center().x;
    if primitive == Primitive::Circle {
        return feature_element(node, g, r, perf_h);
    }
    let mut prims = shape(primitive, r);
    prims.extend(badge(g.badge, r));

    let cy = r.y + (r.h - perf_h) / 2;
    let primary = if let Some(m) = mark_content(g, node) {
        m
    } else if node.kind == NodeKind::Io {
        Content::Term(term_runs(&node.display_text()))
    } else if node.kind == NodeKind::Task {
        Content::Plain(node.code.clone())
    } else {
        Content::Plain(node.display_text())
    };
    let secondary = match (&primary, &node.label) {
        (Content::Mark { .. }, Some(l)) => Some(l.clone()),
        (Content::Plain(p), Some(l)) if *p != *l => Some(l.clone()),
        _ => None,
    };
    match secondary {
        Some(s) => {
            prims.push(text(Point::new(cx, cy - 2), primary, FontSize::Normal));
            prims.push(text(Point::new(cx, cy + 12), Content::Plain(s), FontSize::Small));
        }
        None => prims.push(text(Point::new(cx, cy + 4), primary, FontSize::Normal)),
    }
    for (i, p) in node.perf.iter().enumerate() {
        let y = r.bottom() - perf_h + PERF_LINE * i as i64 + 8;
        prims.push(text(
            Point::new(cx, y),
            Content::Plain(perf_text(&p.metric, p.value, &p.corpus)),
            FontSize::Small,
        ));
    }
    Element {
        class: "dial-node",
        id: node.id.clone(),
        prims,
    }
}

fn feature_element(node: &crate::model::Node, g: &GlyphSpec, r: Rect, perf_h: i64) -> Element {
    let d = feature_diameter(node);
    let cx = r.center().x;
    let disc = Rect::new(cx - d / 2, r.y, d, d);
    let mut prims = shape(Primitive::Circle, disc);
    prims.extend(badge(g.badge, disc));
    let (inner, size) = match mark_content(g, node) {
        Some(m) => (m, FontSize::Normal),
        None => (Content::Plain(node.code.clone()), FontSize::Small),
    };
    prims.push(text(Point::new(cx, r.y + d / 2 + 4), inner, size));
    if let Some(l) = &node.label {
        prims.push(text(Point::new(cx, r.y + d + 11), Content::Plain(l.clone()), FontSize::Small));
    }
    for (i, p) in node.perf.iter().enumerate() {
        let y = r.bottom() - perf_h + PERF_LINE * i as i64 + 8;
        prims.push(text(
            Point::new(cx, y),
            Content::Plain(perf_text(&p.metric, p.value, &p.corpus)),
            FontSize::Small,
        ));
    }
    Element {
        class: "dial-node",
        id: node.id.clone(),
        prims,
    }
}

fn edge_element(typed: &TypedDiagram, e: &crate::model::Edge, pts: &[Point], opts: &RenderOptions) -> Element {
    let (start, end, dashed) = match e.flow_kind {
        FlowKind::Flow | FlowKind::Recurrent => (Tip::None, Tip::Arrow, false),
        FlowKind::Biflow => (Tip::Arrow, Tip::Arrow, false),
        FlowKind::Persist => (Tip::Bar, Tip::Arrow, false),
        FlowKind::Query => (Tip::None, Tip::Arrow, true),
        FlowKind::Interface => (Tip::None, Tip::OpenCircle, false),
    };
    let mut prims = vec![Prim::Line {
        pts: pts.to_vec(),
        dashed,
        start,
        end,
    }];
    if let Some(term) = typed.edge_terms.get(&e.id).filter(|_| opts.edge_terms) {
        let term = term.to_string();
        let width = edge_label_width(&term);
        let seg = pts
            .windows(2)
            .filter(|w| w[0].y == w[1].y)
            .max_by_key(|w| ((w[1].x - w[0].x).abs(), std::cmp::Reverse(w[0])));
        if let Some(seg) = seg.filter(|w| (w[1].x - w[0].x).abs() >= width) {
            let at = Point::new(seg[0].x.min(seg[1].x) + 6, seg[0].y - 4);
            prims.push(Prim::Text {
                at,
                content: Content::Term(term_runs(&term)),
                size: FontSize::Small,
                align: Align::Start,
                bold: false,
            });
        }
    }
    Element {
        class: "dial-edge",
        id: e.id.clone(),
        prims,
    }
}

pub(crate) fn scene(typed: &TypedDiagram, l: &LayoutResult, opts: &RenderOptions) -> Result<Scene, Diagnostic> {
    let d = &typed.diagram;
    check_pairing(d, l)?;
    let registry = d.registry();
    let mut elements = Vec::new();
    let t = l.title_region;
    elements.push(Element {
        class: "dial-title",
        id: "title".into(),
        prims: vec![Prim::Text {
            at: Point::new(t.x + 8, t.y + 20),
            content: Content::Plain(d.name.clone()),
            size: FontSize::Title,
            align: Align::Start,
            bold: true,
        }],
    });
    for g in &d.groups {
        if let Some(r) = l.group_boxes.get(&g.id) {
            elements.push(Element {
                class: "dial-group",
                id: g.id.clone(),
                prims: vec![
                    Prim::Rect {
                        r: *r,
                        rounded: false,
                        dashed: true,
                    },
                    Prim::Text {
                        at: Point::new(r.x + 6, r.y + 12),
                        content: Content::Plain(g.id.clone()),
                        size: FontSize::Small,
                        align: Align::Start,
                        bold: false,
                    },
                ],
            });
        }
    }
    for n in &d.nodes {
        elements.push(node_element(d, &registry, n, l.node_boxes[&n.id]));
    }
    for t in &d.tables {
        let Some(r) = l.table_regions.get(&t.id) else {
            continue;
        };
        let mut prims = vec![
            Prim::Rect {
                r: *r,
                rounded: false,
                dashed: false,
            },
            Prim::Text {
                at: Point::new(r.x + 8, r.y + 14),
                content: Content::Plain(table_title(t.kind).into()),
                size: FontSize::Small,
                align: Align::Start,
                bold: true,
            },
            Prim::Line {
                pts: vec![Point::new(r.x, r.y + TABLE_HEADER), Point::new(r.right(), r.y + TABLE_HEADER)],
                dashed: false,
                start: Tip::None,
                end: Tip::None,
            },
        ];
        for (i, (k, v)) in t.rows.iter().enumerate() {
            prims.push(Prim::Text {
                at: Point::new(r.x + 8, r.y + TABLE_HEADER + TABLE_ROW * i as i64 + 14),
                content: Content::Plain(table_row_text(k, v)),
                size: FontSize::Small,
                align: Align::Start,
                bold: false,
            });
        }
        elements.push(Element {
            class: "dial-table",
            id: t.id.clone(),
            prims,
        });
    }
    for e in &d.edges {
        if let Some(pts) = l.edge_routes.get(&e.id) {
            elements.push(edge_element(typed, e, pts, opts));
        }
    }
    Ok(Scene {
        width: l.width,
        height: l.height,
        elements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::layout;
    use crate::model::{new_diagram, Node};
    use crate::term::DataTerm;
    use crate::typecheck::check_diagram;

    fn one_node() -> TypedDiagram {
        let mut d = new_diagram("One", &["sys"]).unwrap();
        d.add_node(Node::new("pos", NodeKind::Task, "POS")).unwrap();
        check_diagram(&d)
    }

    #[test]
    fn runs_split_scripts() {
        assert_eq!(
            term_runs("S^{NER,POS}"),
            vec![(Script::Base, "S".into()), (Script::Sup, "NER,POS".into())]
        );
        assert_eq!(
            term_runs("{t_T^F}"),
            vec![
                (Script::Base, "{t".into()),
                (Script::Sub, "T".into()),
                (Script::Sup, "F".into()),
                (Script::Base, "}".into())
            ]
        );
    }

    #[test]
    fn pairing_is_checked() {
        let typed = one_node();
        let l = layout(&typed);
        let mut other = typed.clone();
        other.diagram.add_node(Node::data("x", DataTerm::atom("S"))).unwrap();
        let err = render_svg(&other, &l, &RenderOptions::default()).unwrap_err();
        assert_eq!(err.code, Code::E301);
        assert_eq!(render_tikz(&other, &l, &RenderOptions::default()).unwrap_err().code, Code::E301);
    }

    #[test]
    fn one_node_one_shape() {
        let typed = one_node();
        let s = scene(&typed, &layout(&typed), &RenderOptions::default()).unwrap();
        let classes: Vec<&str> = s.elements.iter().map(|e| e.class).collect();
        assert_eq!(classes, ["dial-title", "dial-node"]);
    }
}
