use std::fmt::Write;

use super::{scene, Align, Content, Element, FontSize, Prim, RenderOptions, Script, Seg, Tip};
use crate::diag::Diagnostic;
use crate::layout::{LayoutResult, Point};
use crate::typecheck::TypedDiagram;

/// Standalone TeX document drawing the diagram with TikZ.
pub fn render_tikz(typed: &TypedDiagram, l: &LayoutResult, opts: &RenderOptions) -> Result<String, Diagnostic> {
    let s = scene(typed, l, opts)?;
    let mut out = String::new();
    let _ = writeln!(out, "% dialc v{}", crate::VERSION);
    out.push_str("\\documentclass[tikz,border=4pt]{standalone}\n");
    out.push_str("\\usetikzlibrary{arrows.meta}\n");
    out.push_str("\\begin{document}\n");
    out.push_str("\\begin{tikzpicture}[x=1pt,y=-1pt,font=\\ttfamily\\small]\n");
    let _ = writeln!(out, "\\path (0,0) rectangle ({},{});", s.width, s.height);
    for e in &s.elements {
        element(&mut out, e);
    }
    out.push_str("\\end{tikzpicture}\n");
    out.push_str("\\end{document}\n");
    Ok(out)
}

/// Escapes text for a TeX text-mode argument.
pub(crate) fn escape(s: &str) -> String {
    let mut o = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => o.push_str("\\textbackslash{}"),
            '{' | '}' | '$' | '&' | '#' | '%' | '_' => {
                o.push('\\');
                o.push(c);
            }
            '^' => o.push_str("\\^{}"),
            '~' => o.push_str("\\textasciitilde{}"),
            '\n' => o.push(' '),
            c => o.push(c),
        }
    }
    o
}

/// Math-mode rendering of term text: identifiers upright, braces escaped.
fn math(s: &str) -> String {
    let mut o = String::new();
    let mut word = String::new();
    let flush = |o: &mut String, word: &mut String| {
        if !word.is_empty() {
            let _ = write!(o, "\\mathrm{{{}}}", word.replace('_', "\\_"));
            word.clear();
        }
    };
    for c in s.chars() {
        if c.is_ascii_alphabetic() || c == '_' || (c.is_ascii_digit() && !word.is_empty()) {
            word.push(c);
            continue;
        }
        flush(&mut o, &mut word);
        match c {
            '{' | '}' | '$' | '&' | '#' | '%' => {
                o.push('\\');
                o.push(c);
            }
            '\\' => o.push_str("\\backslash "),
            '~' | '^' => {}
            c => o.push(c),
        }
    }
    flush(&mut o, &mut word);
    o
}

fn pt(p: Point) -> String {
    format!("({},{})", p.x, p.y)
}

fn font(size: FontSize, bold: bool) -> String {
    let f = match size {
        FontSize::Title => "\\large",
        FontSize::Normal => "\\small",
        FontSize::Small => "\\scriptsize",
    };
    if bold {
        format!("{f}\\bfseries")
    } else {
        f.to_string()
    }
}

fn tip(t: Tip) -> &'static str {
    match t {
        Tip::None => "",
        Tip::Arrow => "{Stealth}",
        Tip::Bar => "{Bar}",
        Tip::OpenCircle => "{Circle[open]}",
    }
}

fn element(out: &mut String, e: &Element) {
    let _ = writeln!(out, "% {} {}", e.class, e.id.replace('\n', " "));
    for p in &e.prims {
        prim(out, p);
    }
}

fn prim(out: &mut String, p: &Prim) {
    match p {
        Prim::Rect { r, rounded, dashed } => {
            let mut style = vec![if *dashed { "dashed" } else { "fill=white" }];
            if *rounded {
                style.push("rounded corners=6pt");
            }
            let _ = writeln!(
                out,
                "\\draw[{}] ({},{}) rectangle ({},{});",
                style.join(","),
                r.x,
                r.y,
                r.right(),
                r.bottom()
            );
        }
        Prim::Circle { c, r } => {
            let _ = writeln!(out, "\\draw[fill=white] {} circle[radius={r}pt];", pt(*c));
        }
        Prim::Ellipse { c, rx, ry } => {
            let _ = writeln!(out, "\\draw[fill=white] {} ellipse[x radius={rx}pt, y radius={ry}pt];", pt(*c));
        }
        Prim::Polygon(pts) => {
            let path: Vec<String> = pts.iter().map(|p| pt(*p)).collect();
            let _ = writeln!(out, "\\draw[fill=white] {} -- cycle;", path.join(" -- "));
        }
        Prim::Path(segs) => {
            let mut path = String::new();
            for s in segs {
                match s {
                    Seg::Move(p) => path.push_str(&pt(*p)),
                    Seg::Line(p) => {
                        let _ = write!(path, " -- {}", pt(*p));
                    }
                    Seg::Cubic(a, b, c) => {
                        let _ = write!(path, " .. controls {} and {} .. {}", pt(*a), pt(*b), pt(*c));
                    }
                }
            }
            let _ = writeln!(out, "\\draw[fill=white] {path};");
        }
        Prim::Line { pts, dashed, start, end } => {
            let mut style = Vec::new();
            if *start != Tip::None || *end != Tip::None {
                style.push(format!("{}-{}", tip(*start), tip(*end)));
            }
            if *dashed {
                style.push("dashed".into());
            }
            let path: Vec<String> = pts.iter().map(|p| pt(*p)).collect();
            if style.is_empty() {
                let _ = writeln!(out, "\\draw {};", path.join(" -- "));
            } else {
                let _ = writeln!(out, "\\draw[{}] {};", style.join(","), path.join(" -- "));
            }
        }
        Prim::Text {
            at,
            content,
            size,
            align,
            bold,
        } => {
            let anchor = match align {
                Align::Start => "base west",
                Align::Middle => "base",
            };
            let body = match content {
                Content::Plain(s) => escape(s),
                Content::Mark { tex, .. } => tex.clone(),
                Content::Term(runs) => {
                    let mut m = String::from("$");
                    for (script, t) in runs {
                        match script {
                            Script::Base => m.push_str(&math(t)),
                            Script::Sup => {
                                let _ = write!(m, "^{{{}}}", math(t));
                            }
                            Script::Sub => {
                                let _ = write!(m, "_{{{}}}", math(t));
                            }
                        }
                    }
                    m.push('$');
                    m
                }
            };
            let _ = writeln!(
                out,
                "\\node[anchor={anchor},inner sep=0pt,font={}] at {} {{{body}}};",
                font(*size, *bold),
                pt(*at)
            );
        }
    }
}
