use std::fmt::Write;

use super::ast::*;
use super::lexer::{is_ident_char, is_ident_start, KEYWORDS};

/// Pretty-prints a syntax tree in canonical style: one declaration per
/// line, two-space indentation per block level.
pub fn format(ast: &SourceAst) -> String {
    let mut out = String::new();
    let dialects: Vec<&str> = ast.dialects.iter().map(|d| d.value.as_str()).collect();
    let _ = writeln!(out, "dial {}", ast.version.value);
    let _ = writeln!(out, "dialect {}", dialects.join(", "));
    out.push('\n');
    let _ = write!(out, "diagram {}", quote(&ast.diagram.name));
    if let Some(p) = &ast.diagram.placement {
        let _ = write!(out, " @{}", p.value.as_str());
    }
    out.push_str(" {\n");
    items(&mut out, &ast.diagram.items, 1);
    out.push_str("}\n");
    out
}

pub fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            '\t' => q.push_str("\\t"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

fn is_number(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    let (int, frac) = match digits.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (digits, None),
    };
    let all_digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    all_digits(int) && frac.is_none_or(all_digits)
}

fn is_bare_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(is_ident_start) && chars.all(is_ident_char) && !KEYWORDS.contains(&s)
}

/// A parameter value as it must be written to read back identically.
fn value(s: &str) -> String {
    if is_bare_ident(s) || is_number(s) {
        s.to_string()
    } else {
        quote(s)
    }
}

fn port(p: &PortRef) -> String {
    match &p.port {
        Some(port) => format!("{}.{}", p.node.value, port.value),
        None => p.node.value.clone(),
    }
}

fn items(out: &mut String, list: &[Item], level: usize) {
    let pad = "  ".repeat(level);
    for item in list {
        out.push_str(&pad);
        match item {
            Item::Node(n) => {
                let _ = write!(out, "node {}: {}", n.id.value, n.code.value);
                if !n.params.is_empty() {
                    let ps: Vec<String> = n.params.iter().map(|p| format!("{}={}", p.key, value(&p.value))).collect();
                    let _ = write!(out, "({})", ps.join(", "));
                }
                if let Some(l) = &n.label {
                    let _ = write!(out, " {}", quote(l));
                }
                if !n.perf.is_empty() {
                    let ps: Vec<String> = n
                        .perf
                        .iter()
                        .map(|p| format!("{}={}@{}", p.metric, p.value, quote(&p.corpus)))
                        .collect();
                    let _ = write!(out, " perf({})", ps.join(", "));
                }
                if let Some(p) = &n.placement {
                    let _ = write!(out, " @{}", p.value.as_str());
                }
            }
            Item::Data(d) => {
                let _ = write!(out, "data {}: {}", d.id.value, d.term.value);
                match &d.tag {
                    Some(ResourceTag::Dataset(name)) => {
                        let _ = write!(out, " @dataset({})", quote(name));
                    }
                    Some(tag) => {
                        let _ = write!(out, " @{}", tag.code());
                    }
                    None => {}
                }
                if let Some(l) = &d.label {
                    let _ = write!(out, " {}", quote(l));
                }
                if let Some(p) = &d.placement {
                    let _ = write!(out, " @{}", p.value.as_str());
                }
            }
            Item::Edge(e) => {
                let _ = write!(out, "edge {} {} {}", port(&e.source), e.flow.arrow(), port(&e.target));
                if let Some(t) = &e.term {
                    let _ = write!(out, " as {}", t.value);
                }
            }
            Item::Detail(det) => {
                let _ = write!(out, "detail {} for {}", det.id.value, det.owner.value);
                let mut sides = Vec::new();
                if let Some(s) = det.entry {
                    sides.push(format!("entry={}", s.as_str()));
                }
                if let Some(s) = det.exit {
                    sides.push(format!("exit={}", s.as_str()));
                }
                if !sides.is_empty() {
                    let _ = write!(out, " ({})", sides.join(", "));
                }
                out.push_str(" {\n");
                items(out, &det.items, level + 1);
                out.push_str(&pad);
                out.push('}');
            }
            Item::Table(t) => {
                let _ = write!(out, "table {}", t.id.value);
                if let Some(k) = t.kind {
                    let _ = write!(out, ": {}", k.as_str());
                }
                if let Some(p) = &t.placement {
                    let _ = write!(out, " @{}", p.value.as_str());
                }
                out.push_str(" {\n");
                for (k, v) in &t.rows {
                    let _ = writeln!(out, "{pad}  {}: {};", quote(k), quote(v));
                }
                out.push_str(&pad);
                out.push('}');
            }
            Item::Embedding(e) => {
                let _ = write!(out, "embedding {}(dim={})", e.id.value, e.dim.value);
                if let Some(l) = &e.label {
                    let _ = write!(out, " {}", quote(l));
                }
            }
            Item::Extend(x) => {
                let kind = match x.kind {
                    ExtendKind::Symbol => "symbol",
                    ExtendKind::Task => "task",
                };
                let _ = writeln!(out, "extend {kind} {} {{", x.id.value);
                for e in &x.entries {
                    let v = match &e.value {
                        Value::Str(s) => quote(s),
                        other => other.text().to_string(),
                    };
                    let _ = writeln!(out, "{pad}  {}: {v};", e.key);
                }
                out.push_str(&pad);
                out.push('}');
            }
        }
        out.push('\n');
    }
}
