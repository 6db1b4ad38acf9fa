use std::fmt::Write;

use dial_core::diag::Code;
use dial_core::registry::{categories, list_symbols, signatures, Dialect, CLASSIFICATION_EXAMPLES};
use dial_core::render::glyph;

fn cell(s: &str) -> String {
    s.replace('|', "\\|")
}

/// Markdown reference of every signature, category, symbol, glyph and
/// diagnostic code known to this build.
pub fn reference_markdown() -> String {
    let mut o = String::new();
    let _ = writeln!(o, "# DIAL reference (dialc v{})\n", dial_core::VERSION);
    o.push_str("Generated by `dial symbols --reference`.\n\n");

    o.push_str("## Task signatures\n\n| Code | Name | Domain | Range | Note |\n|---|---|---|---|---|\n");
    for s in signatures() {
        let dom: Vec<String> = s.domain.iter().map(ToString::to_string).collect();
        let ran: Vec<String> = s.range.iter().map(ToString::to_string).collect();
        let _ = writeln!(
            o,
            "| `{}` | {} | `{}` | `{}` | {} |",
            s.task_code,
            cell(&s.name),
            cell(&dom.join(" x ")),
            cell(&ran.join(" x ")),
            cell(s.note.as_deref().unwrap_or(""))
        );
    }

    o.push_str("\n## Data categories\n\n| Code | Notation | Description |\n|---|---|---|\n");
    for c in categories() {
        let _ = writeln!(o, "| `{}` | {} | {} |", c.code, cell(&c.notation), cell(&c.description));
    }

    o.push_str("\n## Classification terms\n\n| Term | Meaning |\n|---|---|\n");
    for (meaning, term) in CLASSIFICATION_EXAMPLES {
        let _ = writeln!(o, "| `{}` | {} |", cell(term), cell(meaning));
    }

    for d in Dialect::ALL {
        let _ = writeln!(
            o,
            "\n## Symbols: `{d}`\n\n| Code | Name | Inputs | Outputs | Params | Glyph |\n|---|---|---|---|---|---|"
        );
        for s in list_symbols(d.as_str()).expect("built-in dialect") {
            let max = s.max_in.map_or("*".to_string(), |m| m.to_string());
            let g = glyph(&s.glyph_id).expect("every symbol has a glyph");
            let mut look = g.primitive.name().to_string();
            if let Some(m) = g.mark {
                let _ = write!(look, ", mark {m}");
            }
            let badge = g.badge.describe();
            if !badge.is_empty() {
                let _ = write!(look, ", {badge}");
            }
            let _ = writeln!(
                o,
                "| `{}` | {} | {}..{} | {} | {} | {} |",
                s.code,
                cell(&s.name),
                s.min_in,
                max,
                s.max_out,
                s.params.join(", "),
                cell(&look)
            );
        }
    }

    o.push_str("\n## Diagnostic codes\n\n| Code | Severity | Meaning |\n|---|---|---|\n");
    for c in Code::ALL {
        let _ = writeln!(o, "| {} | {} | {} |", c, c.severity(), c.summary());
    }
    o
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_table_pipes() {
        assert_eq!(cell("a|b"), "a\\|b");
    }

    #[test]
    fn lists_every_section() {
        let md = reference_markdown();
        assert!(md.contains("## Task signatures"));
        assert!(md.contains("`bilstm`"));
    }
}
