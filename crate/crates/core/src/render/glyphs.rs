use crate::model::{Node, NodeKind};
use crate::registry::{DialectSet, Registry, RegistryError};

/// Base outline of a glyph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primitive {
    Rectangle,
    RoundedRectangle,
    Circle,
    Ellipse,
    Diamond,
    /// Narrows toward the right (encoder).
    TrapezoidRight,
    /// Narrows toward the left (decoder).
    TrapezoidLeft,
    Cylinder,
    /// Text only, no outline.
    AnnotatedText,
}

impl Primitive {
    pub fn name(self) -> &'static str {
        match self {
            Primitive::Rectangle => "rectangle",
            Primitive::RoundedRectangle => "rounded-rectangle",
            Primitive::Circle => "circle",
            Primitive::Ellipse => "ellipse",
            Primitive::Diamond => "diamond",
            Primitive::TrapezoidRight => "trapezoid-right",
            Primitive::TrapezoidLeft => "trapezoid-left",
            Primitive::Cylinder => "cylinder",
            Primitive::AnnotatedText => "annotated-text-glyph",
        }
    }
}

impl Badge {
    pub fn describe(self) -> String {
        match self {
            Badge::None => String::new(),
            Badge::Star => "star badge".into(),
            Badge::Letter(c) => format!("\"{c}\" badge"),
            Badge::CornerMark(c) => format!("\"{c}\" corner mark"),
            Badge::Checkbox => "checkbox mark".into(),
            Badge::HalfCircle => "half-circle port marker".into(),
        }
    }
}

/// Small mark drawn on top of the outline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Badge {
    None,
    Star,
    Letter(char),
    CornerMark(char),
    Checkbox,
    /// Half circle on the right boundary, for system interfaces.
    HalfCircle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Place {
    Center,
    BelowCenter,
    Bottom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabelSlots {
    pub code: Place,
    pub label: Place,
    pub perf: Place,
}

/// Where edges attach, as sides of the bounding box. Inputs enter on the
/// left boundary and outputs leave on the right one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Anchors {
    pub input: crate::model::Side,
    pub output: crate::model::Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GlyphSpec {
    pub glyph_id: &'static str,
    pub primitive: Primitive,
    pub badge: Badge,
    /// Symbol drawn inside the outline; `{n}` is replaced by the `n` param.
    pub mark: Option<&'static str>,
    pub mark_tex: Option<&'static str>,
    pub label_slots: LabelSlots,
    pub anchors: Anchors,
}

const SLOTS: LabelSlots = LabelSlots {
    code: Place::Center,
    label: Place::BelowCenter,
    perf: Place::Bottom,
};

const ANCHORS: Anchors = Anchors {
    input: crate::model::Side::Left,
    output: crate::model::Side::Right,
};

const fn g(
    glyph_id: &'static str,
    primitive: Primitive,
    badge: Badge,
    mark: Option<(&'static str, &'static str)>,
) -> GlyphSpec {
    let (mark, mark_tex) = match mark {
        Some((u, t)) => (Some(u), Some(t)),
        None => (None, None),
    };
    GlyphSpec {
        glyph_id,
        primitive,
        badge,
        mark,
        mark_tex,
        label_slots: SLOTS,
        anchors: ANCHORS,
    }
}

use Badge as B;
use Primitive as P;

pub static GLYPHS: &[GlyphSpec] = &[
    g("task", P::Rectangle, B::None, None),
    g("ext", P::RoundedRectangle, B::None, None),
    g("data", P::AnnotatedText, B::None, None),
    g("oplus", P::Circle, B::None, Some(("\u{2295}", "$\\oplus$"))),
    g("concat", P::Circle, B::None, Some(("\u{2225}", "$\\parallel$"))),
    g("otimes", P::Circle, B::None, Some(("\u{2297}", "$\\otimes$"))),
    g("set", P::Circle, B::None, Some(("{ }", "$\\{\\,\\}$"))),
    g("flow", P::AnnotatedText, B::None, Some(("\u{2192}", "$\\rightarrow$"))),
    g("biflow", P::AnnotatedText, B::None, Some(("\u{2194}", "$\\leftrightarrow$"))),
    g("query", P::AnnotatedText, B::None, Some(("?\u{2192}", "?$\\rightarrow$"))),
    g("persist", P::AnnotatedText, B::None, Some(("\u{22b8}", "$\\multimap$"))),
    g("cond", P::Diamond, B::None, Some(("?", "?"))),
    g("interface", P::AnnotatedText, B::HalfCircle, Some(("\u{22b8}", "$\\multimap$"))),
    g("compose", P::Circle, B::None, Some(("\u{2218}", "$\\circ$"))),
    g("join", P::Circle, B::None, Some(("\u{22c8}", "$\\bowtie$"))),
    g("sim", P::Circle, B::None, Some(("\u{2221}\u{03b8}", "$\\angle\\theta$"))),
    g("proj", P::Rectangle, B::None, Some(("\u{03a0}\u{20d7}", "$\\vec{\\Pi}$"))),
    g("w2v", P::Rectangle, B::None, Some(("w2v", "w2v"))),
    g("regression", P::Ellipse, B::None, Some(("reg", "reg"))),
    g("classifier", P::Rectangle, B::CornerMark('C'), None),
    g("classification", P::Rectangle, B::CornerMark('C'), None),
    g("rank", P::Rectangle, B::None, Some(("R\u{2191}{n}", "R$\\uparrow${n}"))),
    g("encoder", P::TrapezoidRight, B::None, None),
    g("decoder", P::TrapezoidLeft, B::None, None),
    g("entail", P::Rectangle, B::None, Some(("\u{22a8}", "$\\models$"))),
    g("verify", P::Rectangle, B::Checkbox, None),
    g("func", P::Circle, B::None, Some(("\u{21a6}", "$\\mapsto$"))),
    g("func_contract", P::Circle, B::None, Some(("\u{21a6}\u{2218}", "$\\mapsto\\circ$"))),
    g("dataset", P::Cylinder, B::None, None),
    g("gold", P::Cylinder, B::Star, None),
    g("kbfn", P::Cylinder, B::Letter('f'), None),
    g("zoom", P::AnnotatedText, B::None, Some(("\u{2315}", "zoom"))),
    g("acc", P::AnnotatedText, B::None, Some(("acc", "acc"))),
    g("loss", P::Rectangle, B::None, Some(("\u{2112}", "$\\mathcal{L}$"))),
    g("activation", P::Circle, B::None, Some(("\u{03c3}", "$\\sigma$"))),
    g("softmax", P::Rectangle, B::None, None),
    g("attention", P::Rectangle, B::None, Some(("\u{03b1}", "$\\alpha$"))),
    g("lstm", P::Rectangle, B::None, None),
    g("bilstm", P::Rectangle, B::None, None),
    g("conv", P::Rectangle, B::None, None),
    g("recnn", P::Rectangle, B::None, None),
    g("svm", P::Rectangle, B::None, None),
    g("ground_truth", P::Rectangle, B::Star, None),
    g("hidden_fwd", P::Rectangle, B::None, Some(("h\u{2192}", "h$\\rightarrow$"))),
    g("hidden_bwd", P::Rectangle, B::None, Some(("h\u{2190}", "h$\\leftarrow$"))),
];

pub fn glyph(id: &str) -> Option<&'static GlyphSpec> {
    GLYPHS.iter().find(|g| g.glyph_id == id)
}

/// Glyph for a registered task or symbol code, built-ins only.
pub fn glyph_for(code: &str, dialects: &DialectSet) -> Result<&'static GlyphSpec, RegistryError> {
    glyph_for_in(&Registry::builtin(), code, dialects)
}

pub fn glyph_for_in(
    registry: &Registry,
    code: &str,
    dialects: &DialectSet,
) -> Result<&'static GlyphSpec, RegistryError> {
    let resolved = registry
        .resolve(code, dialects)
        .ok_or_else(|| RegistryError::UnknownSymbol(code.to_string()))?;
    Ok(glyph(resolved.glyph_id()).unwrap_or_else(|| glyph("ext").expect("ext glyph")))
}

pub(crate) fn glyph_for_node(registry: &Registry, node: &Node, dialects: &DialectSet) -> &'static GlyphSpec {
    if node.kind == NodeKind::Io {
        return glyph("data").expect("data glyph");
    }
    glyph_for_in(registry, &node.code, dialects).unwrap_or_else(|_| glyph("ext").expect("ext glyph"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::{list_symbols, signatures, Dialect};

    #[test]
    fn table_has_unique_ids() {
        let mut ids: Vec<&str> = GLYPHS.iter().map(|g| g.glyph_id).collect();
        ids.sort_unstable();
        let n = ids.len();
        ids.dedup();
        assert_eq!(ids.len(), n);
    }

    #[test]
    fn every_symbol_and_task_has_a_glyph() {
        let all: DialectSet = Dialect::ALL.into_iter().collect();
        for dialect in Dialect::ALL {
            for s in list_symbols(dialect.as_str()).unwrap() {
                assert!(glyph(&s.glyph_id).is_some(), "{}", s.glyph_id);
                assert!(glyph_for(&s.code, &all).is_ok(), "{}", s.code);
            }
        }
        assert_eq!(signatures().len(), 26);
        for sig in signatures() {
            assert_eq!(glyph_for(&sig.task_code, &all).unwrap().glyph_id, "task");
        }
    }

    #[test]
    fn fixed_shapes() {
        let sys: DialectSet = [Dialect::Sys].into_iter().collect();
        assert_eq!(glyph_for("dataset", &sys).unwrap().primitive, Primitive::Cylinder);
        assert_eq!(glyph_for("cond", &sys).unwrap().primitive, Primitive::Diamond);
        assert_eq!(glyph_for("encoder", &sys).unwrap().primitive, Primitive::TrapezoidRight);
        assert_eq!(glyph_for("decoder", &sys).unwrap().primitive, Primitive::TrapezoidLeft);
        assert_eq!(glyph_for("gold", &sys).unwrap().badge, Badge::Star);
        assert!(glyph_for("nope", &sys).is_err());
    }
}
