use std::fmt::Write;

use super::{scene, Align, Content, Element, FontSize, Prim, RenderOptions, Script, Seg, Tip};
use crate::diag::Diagnostic;
use crate::layout::{LayoutResult, Point};
use crate::typecheck::TypedDiagram;

const DEFS: &str = r#"<defs>
<marker id="tip-arrow" viewBox="0 0 8 8" refX="8" refY="4" markerWidth="8" markerHeight="8" orient="auto"><path d="M0,0 L8,4 L0,8 z"/></marker>
<marker id="tip-arrow-start" viewBox="0 0 8 8" refX="0" refY="4" markerWidth="8" markerHeight="8" orient="auto"><path d="M8,0 L0,4 L8,8 z"/></marker>
<marker id="tip-bar" viewBox="0 0 2 10" refX="1" refY="5" markerWidth="2" markerHeight="10" orient="auto"><path d="M0,0 H2 V10 H0 z"/></marker>
<marker id="tip-circle" viewBox="0 0 8 8" refX="7" refY="4" markerWidth="8" markerHeight="8" orient="auto"><circle cx="4" cy="4" r="3" fill="white" stroke="black"/></marker>
</defs>
"#;

/// SVG 1.1 document for a typed diagram and its layout.
pub fn render_svg(typed: &TypedDiagram, l: &LayoutResult, opts: &RenderOptions) -> Result<String, Diagnostic> {
    let s = scene(typed, l, opts)?;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(out, "<!-- dialc v{} -->", crate::VERSION);
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\" font-family=\"monospace\" font-size=\"12\">",
        w = s.width,
        h = s.height
    );
    out.push_str(DEFS);
    let _ = writeln!(out, "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>", s.width, s.height);
    for e in &s.elements {
        element(&mut out, e);
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub(crate) fn escape(s: &str) -> String {
    let mut o = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => o.push_str("&amp;"),
            '<' => o.push_str("&lt;"),
            '>' => o.push_str("&gt;"),
            '"' => o.push_str("&quot;"),
            '\'' => o.push_str("&apos;"),
            c => o.push(c),
        }
    }
    o
}

fn points(pts: &[Point]) -> String {
    pts.iter().map(|p| format!("{},{}", p.x, p.y)).collect::<Vec<_>>().join(" ")
}

fn tip(t: Tip, start: bool) -> Option<&'static str> {
    match (t, start) {
        (Tip::None, _) => None,
        (Tip::Arrow, false) => Some("tip-arrow"),
        (Tip::Arrow, true) => Some("tip-arrow-start"),
        (Tip::Bar, _) => Some("tip-bar"),
        (Tip::OpenCircle, _) => Some("tip-circle"),
    }
}

const STROKE: &str = "fill=\"white\" stroke=\"black\"";

fn element(out: &mut String, e: &Element) {
    let prefix = e.class.trim_start_matches("dial-");
    let _ = writeln!(out, "<g class=\"{}\" id=\"{}-{}\">", e.class, prefix, escape(&e.id));
    for p in &e.prims {
        prim(out, p);
    }
    out.push_str("</g>\n");
}

fn prim(out: &mut String, p: &Prim) {
    match p {
        Prim::Rect { r, rounded, dashed } => {
            let _ = write!(out, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"", r.x, r.y, r.w, r.h);
            if *rounded {
                out.push_str(" rx=\"6\" ry=\"6\"");
            }
            if *dashed {
                out.push_str(" fill=\"none\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n");
            } else {
                let _ = writeln!(out, " {STROKE}/>");
            }
        }
        Prim::Circle { c, r } => {
            let _ = writeln!(out, "<circle cx=\"{}\" cy=\"{}\" r=\"{r}\" {STROKE}/>", c.x, c.y);
        }
        Prim::Ellipse { c, rx, ry } => {
            let _ = writeln!(out, "<ellipse cx=\"{}\" cy=\"{}\" rx=\"{rx}\" ry=\"{ry}\" {STROKE}/>", c.x, c.y);
        }
        Prim::Polygon(pts) => {
            let _ = writeln!(out, "<polygon points=\"{}\" {STROKE}/>", points(pts));
        }
        Prim::Path(segs) => {
            let d: Vec<String> = segs
                .iter()
                .map(|s| match s {
                    Seg::Move(p) => format!("M{},{}", p.x, p.y),
                    Seg::Line(p) => format!("L{},{}", p.x, p.y),
                    Seg::Cubic(a, b, c) => format!("C{},{} {},{} {},{}", a.x, a.y, b.x, b.y, c.x, c.y),
                })
                .collect();
            let _ = writeln!(out, "<path d=\"{}\" {STROKE}/>", d.join(" "));
        }
        Prim::Line { pts, dashed, start, end } => {
            let _ = write!(out, "<polyline points=\"{}\" fill=\"none\" stroke=\"black\"", points(pts));
            if *dashed {
                out.push_str(" stroke-dasharray=\"4 3\"");
            }
            if let Some(m) = tip(*start, true) {
                let _ = write!(out, " marker-start=\"url(#{m})\"");
            }
            if let Some(m) = tip(*end, false) {
                let _ = write!(out, " marker-end=\"url(#{m})\"");
            }
            out.push_str("/>\n");
        }
        Prim::Text {
            at,
            content,
            size,
            align,
            bold,
        } => {
            let _ = write!(out, "<text x=\"{}\" y=\"{}\"", at.x, at.y);
            if *align == Align::Middle {
                out.push_str(" text-anchor=\"middle\"");
            }
            if *size != FontSize::Normal {
                let _ = write!(out, " font-size=\"{}\"", size.px());
            }
            if *bold {
                out.push_str(" font-weight=\"bold\"");
            }
            out.push('>');
            match content {
                Content::Plain(s) => out.push_str(&escape(s)),
                Content::Mark { unicode, .. } => out.push_str(&escape(unicode)),
                Content::Term(runs) => {
                    for (script, t) in runs {
                        match script {
                            Script::Base => out.push_str(&escape(t)),
                            Script::Sup => {
                                let _ = write!(out, "<tspan baseline-shift=\"super\" font-size=\"8\">{}</tspan>", escape(t));
                            }
                            Script::Sub => {
                                let _ = write!(out, "<tspan baseline-shift=\"sub\" font-size=\"8\">{}</tspan>", escape(t));
                            }
                        }
                    }
                }
            }
            out.push_str("</text>\n");
        }
    }
}
