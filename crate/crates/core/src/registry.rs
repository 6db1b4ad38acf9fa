//! Compiled-in symbol, signature and data-category tables, grouped into
//! dialects, plus per-compilation extension overlays.
//!
//! Table order is significant: `list_symbols` returns entries in the order
//! they are declared here, which is the order of the published symbol
//! tables.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::NodeKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dialect {
    Sys,
    Nn,
}

pub type DialectSet = BTreeSet<Dialect>;

impl Dialect {
    pub const ALL: [Dialect; 2] = [Dialect::Sys, Dialect::Nn];

    pub fn as_str(self) -> &'static str {
        match self {
            Dialect::Sys => "sys",
            Dialect::Nn => "nn",
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Dialect {
    type Err = RegistryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sys" => Ok(Dialect::Sys),
            "nn" => Ok(Dialect::Nn),
            other => Err(RegistryError::UnknownDialect(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("unknown dialect `{0}`")]
    UnknownDialect(String),
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("`{0}` collides with a built-in code")]
    CollidesWithBuiltin(String),
    #[error("extension `{0}` is declared twice")]
    DuplicateExtension(String),
    #[error("extension `{code}` is invalid: {reason}")]
    InvalidExtension { code: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormalStructure {
    Scalar,
    SetOf,
    SequenceOf,
}

/// One position of a task's domain or range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalTerm {
    pub base: String,
    pub subscript: Option<String>,
    pub required_annotations: BTreeSet<String>,
    /// Parenthesized superscripts: accepted but not demanded.
    pub optional_annotations: BTreeSet<String>,
    pub is_resource: bool,
    pub structure: FormalStructure,
    /// Parenthesized whole term: the input or output may be absent.
    pub optional: bool,
}

impl FormalTerm {
    pub fn new(base: &str) -> Self {
        FormalTerm {
            base: base.to_string(),
            subscript: None,
            required_annotations: BTreeSet::new(),
            optional_annotations: BTreeSet::new(),
            is_resource: false,
            structure: FormalStructure::Scalar,
            optional: false,
        }
    }

    pub fn req(mut self, labels: &[&str]) -> Self {
        self.required_annotations
            .extend(labels.iter().map(|l| l.to_string()));
        self
    }

    pub fn opt(mut self, labels: &[&str]) -> Self {
        self.optional_annotations
            .extend(labels.iter().map(|l| l.to_string()));
        self
    }

    pub fn subscripted(mut self, subscript: &str) -> Self {
        self.subscript = Some(subscript.to_string());
        self
    }

    pub fn resource(mut self) -> Self {
        self.is_resource = true;
        self
    }

    pub fn set_of(mut self) -> Self {
        self.structure = FormalStructure::SetOf;
        self
    }

    pub fn sequence_of(mut self) -> Self {
        self.structure = FormalStructure::SequenceOf;
        self
    }

    pub fn optional(mut self) -> Self {
        self.optional = true;
        self
    }
}

impl fmt::Display for FormalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut atom = self.base.clone();
        if let Some(sub) = &self.subscript {
            atom.push('_');
            atom.push_str(sub);
        }
        let mut sup: Vec<String> = self.required_annotations.iter().cloned().collect();
        sup.extend(self.optional_annotations.iter().map(|l| format!("({l})")));
        if !sup.is_empty() {
            atom.push_str(&format!("^{{{}}}", sup.join(",")));
        }
        let shaped = match self.structure {
            FormalStructure::Scalar => atom,
            FormalStructure::SetOf => format!("{{{atom}}}"),
            FormalStructure::SequenceOf => format!("[{atom}]"),
        };
        if self.optional {
            write!(f, "({shaped})")
        } else {
            f.write_str(&shaped)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub task_code: String,
    pub name: String,
    pub dialect: Dialect,
    pub domain: Vec<FormalTerm>,
    pub range: Vec<FormalTerm>,
    pub note: Option<String>,
}

impl Signature {
    pub fn required_inputs(&self) -> usize {
        self.domain.iter().filter(|t| !t.optional).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolCategory {
    Operator,
    Resource,
    Nn,
    Meta,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolDef {
    pub code: String,
    pub name: String,
    pub dialect: Dialect,
    pub glyph_id: String,
    pub min_in: u32,
    /// `None` means unbounded.
    pub max_in: Option<u32>,
    pub min_out: u32,
    pub max_out: u32,
    pub category: SymbolCategory,
    pub params: Vec<String>,
}

impl SymbolDef {
    pub fn node_kind(&self) -> NodeKind {
        match (self.category, self.code.as_str()) {
            (_, "func" | "func_contract") => NodeKind::Function,
            (_, "classifier" | "classification") => NodeKind::Classifier,
            (_, "verify") => NodeKind::Verify,
            (SymbolCategory::Resource, _) => NodeKind::Resource,
            (SymbolCategory::Nn, _) => NodeKind::NnLayer,
            _ => NodeKind::Operator,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataCategory {
    pub code: String,
    pub notation: String,
    pub description: String,
    pub extended: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "extends", rename_all = "lowercase")]
pub enum Extension {
    Symbol(SymbolDef),
    Task(Signature),
}

impl Extension {
    pub fn code(&self) -> &str {
        match self {
            Extension::Symbol(s) => &s.code,
            Extension::Task(t) => &t.task_code,
        }
    }
}

/// What a node code resolves to.
#[derive(Debug, Clone, Copy)]
pub enum Resolved<'a> {
    Task(&'a Signature),
    Symbol(&'a SymbolDef),
}

impl Resolved<'_> {
    pub fn node_kind(&self) -> NodeKind {
        match self {
            Resolved::Task(_) => NodeKind::Task,
            Resolved::Symbol(s) => s.node_kind(),
        }
    }

    /// Number of input slots and whether the count is unbounded.
    pub fn input_bounds(&self) -> (u32, Option<u32>) {
        match self {
            Resolved::Task(sig) => (sig.required_inputs() as u32, Some(sig.domain.len() as u32)),
            Resolved::Symbol(s) => (s.min_in, s.max_in),
        }
    }

    pub fn output_slots(&self) -> u32 {
        match self {
            Resolved::Task(sig) => sig.range.len() as u32,
            Resolved::Symbol(s) => s.max_out,
        }
    }

    pub fn glyph_id(&self) -> &str {
        match self {
            Resolved::Task(_) => "task",
            Resolved::Symbol(s) => &s.glyph_id,
        }
    }
}

struct Builtin {
    signatures: Vec<Signature>,
    symbols: Vec<SymbolDef>,
    categories: Vec<DataCategory>,
    aliases: Vec<(&'static str, &'static str)>,
    labels: BTreeSet<String>,
}

static BUILTIN: LazyLock<Builtin> = LazyLock::new(|| Builtin {
    signatures: builtin_signatures(),
    symbols: builtin_symbols(),
    categories: builtin_categories(),
    aliases: CATEGORY_ALIASES.to_vec(),
    labels: BUILTIN_LABELS.iter().map(|s| s.to_string()).collect(),
});

/// ASCII spellings accepted in source for category codes.
const CATEGORY_ALIASES: [(&str, &str); 3] = [("S", "s_T"), ("Term", "t_T"), ("vec", "clustered_word")];

/// Node-code aliases. A knowledge base is a data resource.
const SYMBOL_ALIASES: [(&str, &str); 1] = [("kb", "dataset")];

const BUILTIN_LABELS: [&str; 19] = [
    "POS", "NER", "Chunk", "Token", "Sem", "SRL", "WSD", "Names", "F", "R", "RS", "RST",
    "ArgStruct", "ArgScheme", "PredArg", "Arg", "Name", "Entity", "New",
];

/// The seven example classification terms, as source literals.
pub const CLASSIFICATION_EXAMPLES: [(&str, &str); 7] = [
    ("NER classified sentence", "S^NER"),
    ("SRL classified sentence", "S^SRL"),
    ("POS classified sentence", "S^POS"),
    ("Argument scheme classification", "C^ArgScheme"),
    ("Argumentation structure", "T^ArgStruct"),
    ("Classified ambiguous terms", "Term^WSD"),
    ("Pred(Arg) labeled with facts", "Pred(Arg)^F"),
];

fn cat(code: &str, notation: &str, description: &str, extended: bool) -> DataCategory {
    DataCategory {
        code: code.to_string(),
        notation: notation.to_string(),
        description: description.to_string(),
        extended,
    }
}

fn builtin_categories() -> Vec<DataCategory> {
    vec![
        cat("T", "T", "Text: raw file", false),
        cat("p_T", "p_T", "Passage: fragment of text", false),
        cat("s_T", "s_T", "Sentence: words from a text, complete in itself", false),
        cat("Ch_T", "Ch_T", "Character: a single printable symbol", false),
        cat("t_T", "t_T", "Term: words expressing a concept", false),
        cat("w_T", "w_T", "Word: a single meaningful element of text", false),
        cat("dt", "dt", "Dialogue term", false),
        cat("sense", "w̄_T", "Sense: a disambiguated word, including ID", false),
        cat("clustered_word", "ẇ_T", "Clustered word: word embedded in a vector space", false),
        cat("im", "im", "Image: raw file", false),
        cat("sentence_sense", "s̄_T", "Sentence sense: an identified sentence", false),
        cat("q", "?q", "Query: words as a query input", false),
        cat("a", "â", "Answer: words as an answer output", false),
        cat("F", "F", "Facts: predicates over word constants", false),
        cat("R", "R", "Rules: conditions under which tuples satisfy a predicate", false),
        cat("P_c", "P_c[a,b]", "Classification outcome: probability distribution over [a,b]", false),
        cat("Structure", "Structure", "Parse structure (e.g. PN structure)", true),
        cat("Score", "Score", "Numeric score", true),
        cat("Entity", "Entity", "Linked entity", true),
        cat("Tuples", "Tuples", "Tuples with labels", true),
        cat("Chains", "Chains", "Chains with IDs", true),
        cat("PredArg", "Pred(Arg)", "Predicate-argument structure", true),
        cat("KB", "KB", "Knowledge base", true),
        cat("C", "C", "Classification label", true),
    ]
}

fn sig(code: &str, name: &str, domain: Vec<FormalTerm>, range: Vec<FormalTerm>) -> Signature {
    Signature {
        task_code: code.to_string(),
        name: name.to_string(),
        dialect: Dialect::Sys,
        domain,
        range,
        note: None,
    }
}

fn noted(mut s: Signature, note: &str) -> Signature {
    s.note = Some(note.to_string());
    s
}

fn builtin_signatures() -> Vec<Signature> {
    let t = FormalTerm::new;
    vec![
        sig("POS", "POS tagging", vec![t("s_T")], vec![t("s_T").req(&["POS"])]),
        noted(
            sig("SYN", "Syntactic parsing", vec![t("s_T").opt(&["POS"])], vec![t("Structure").subscripted("PN")]),
            "PN structure is modeled as category Structure",
        ),
        noted(
            sig(
                "NER",
                "Named entity recognition",
                vec![t("s_T").opt(&["Chunk"])],
                vec![t("s_T").req(&["NER", "Names"])],
            ),
            "output carries both NER and Names labels",
        ),
        sig(
            "WSD",
            "Word sense disambiguation",
            vec![t("s_T").req(&["POS", "Chunk"]), t("KB").resource()],
            vec![t("t_T").req(&["WSD"])],
        ),
        sig(
            "EL",
            "Entity linking",
            vec![t("s_T").req(&["NER"])],
            vec![t("Entity"), t("KB").resource().optional()],
        ),
        noted(
            sig(
                "SRL",
                "Semantic role labeling",
                vec![t("s_T").opt(&["Token"])],
                vec![t("s_T").req(&["SRL", "Sem"])],
            ),
            "output carries both SRL and Sem labels",
        ),
        sig(
            "SRC",
            "Semantic relation classification",
            vec![t("t_T").subscripted("1"), t("t_T").subscripted("2")],
            vec![t("t_T").req(&["Sem"])],
        ),
        sig("OIE", "Open relation extraction", vec![t("s_T")], vec![t("PredArg")]),
        noted(
            sig(
                "PRED",
                "Predicate creation",
                vec![t("T").optional(), t("Tuples").optional()],
                vec![t("t_T").subscripted("New")],
            ),
            "the (Data) input is modeled as Tuples",
        ),
        sig(
            "SDQ",
            "Structured data querying",
            vec![t("q"), t("KB").resource()],
            vec![t("Tuples")],
        ),
        noted(
            sig("TR", "Text retrieval", vec![t("T")], vec![t("T")]),
            "range is human-readable text; the source table marks it with '?'",
        ),
        sig("NLG", "Natural language generation", vec![t("PredArg")], vec![t("T")]),
        sig("TSIMP", "Text simplification", vec![t("T")], vec![t("T")]),
        sig(
            "TSUM",
            "Text summarisation",
            vec![t("T").opt(&["Chunk", "NER", "Arg", "Name", "Sem"])],
            vec![t("T")],
        ),
        noted(
            sig(
                "COREF",
                "Co-reference resolution",
                vec![t("s_T").req(&["NER"])],
                vec![t("Chains").set_of()],
            ),
            "alternative domain T^(Token) is not modeled",
        ),
        noted(
            sig(
                "RST",
                "Rhetorical structure classification",
                vec![t("s_T")],
                vec![t("s_T").req(&["RS"])],
            ),
            "pair and text alternatives are not modeled",
        ),
        sig(
            "ARGSTRUCT",
            "Argumentation structure classification",
            vec![t("s_T").sequence_of(), t("T")],
            vec![t("T").req(&["ArgStruct"])],
        ),
        sig(
            "ARGSCHEME",
            "Argument scheme classification",
            vec![t("T").req(&["ArgStruct"])],
            vec![t("C").req(&["ArgScheme"])],
        ),
        sig(
            "POL",
            "Polarity and emotion analysis",
            vec![t("s_T").opt(&["PredArg"])],
            vec![t("Score")],
        ),
        sig("RFIG", "Rhetorical figures analysis", vec![t("T")], vec![t("T").req(&["RST"])]),
        sig(
            "STRSIM",
            "String similarity",
            vec![t("Ch_T").sequence_of(), t("Ch_T").sequence_of()],
            vec![t("Score")],
        ),
        sig(
            "SEMSIM",
            "Semantic similarity",
            vec![t("t_T").opt(&["Entity"]).set_of()],
            vec![t("Score")],
        ),
        sig(
            "SEMREL",
            "Semantic relatedness",
            vec![t("t_T").opt(&["Entity"]).set_of()],
            vec![t("Score")],
        ),
        sig(
            "IND",
            "Inductive reasoning",
            vec![
                t("PredArg").req(&["F"]),
                t("KB").subscripted("R").resource().optional(),
                t("KB").subscripted("Constraints").resource(),
            ],
            vec![t("s_T").opt(&["PredArg"])],
        ),
        sig(
            "DED",
            "Deductive reasoning",
            vec![t("PredArg"), t("KB").subscripted("F,R").resource()],
            vec![t("PredArg")],
        ),
        sig(
            "ABD",
            "Abductive reasoning",
            vec![t("PredArg").req(&["F"]), t("KB").resource()],
            vec![t("PredArg").sequence_of()],
        ),
    ]
}

#[allow(clippy::too_many_arguments)]
fn sym(
    code: &str,
    name: &str,
    dialect: Dialect,
    glyph: &str,
    ins: (u32, Option<u32>),
    outs: u32,
    category: SymbolCategory,
    params: &[&str],
) -> SymbolDef {
    SymbolDef {
        code: code.to_string(),
        name: name.to_string(),
        dialect,
        glyph_id: glyph.to_string(),
        min_in: ins.0,
        max_in: ins.1,
        min_out: outs.min(1),
        max_out: outs,
        category,
        params: params.iter().map(|p| p.to_string()).collect(),
    }
}

fn builtin_symbols() -> Vec<SymbolDef> {
    use Dialect::{Nn, Sys};
    use SymbolCategory::{Meta, Nn as NnCat, Operator, Resource};
    const ANY: Option<u32> = None;
    let one = Some(1);
    vec![
        // Whole-system symbols.
        sym("oplus", "Direct sum", Sys, "oplus", (2, ANY), 1, Operator, &[]),
        sym("concat", "Concatenation", Sys, "concat", (2, ANY), 1, Operator, &[]),
        sym("otimes", "Tensor product", Sys, "otimes", (2, ANY), 1, Operator, &[]),
        sym("set", "Set", Sys, "set", (1, ANY), 1, Operator, &[]),
        sym("flow", "Data flow", Sys, "flow", (0, Some(0)), 0, Meta, &[]),
        sym("biflow", "Data flow (both ways)", Sys, "biflow", (0, Some(0)), 0, Meta, &[]),
        sym("query", "KB query", Sys, "query", (0, Some(0)), 0, Meta, &[]),
        sym("persist", "Data persistence", Sys, "persist", (0, Some(0)), 0, Meta, &[]),
        sym("cond", "Conditional", Sys, "cond", (1, one), 2, Operator, &["pred"]),
        sym("interface", "System interface", Sys, "interface", (0, Some(0)), 0, Meta, &[]),
        sym("compose", "Composition", Sys, "compose", (2, Some(2)), 1, Operator, &[]),
        sym("join", "Join", Sys, "join", (2, ANY), 1, Operator, &[]),
        sym("sim", "Similarity & relatedness", Sys, "sim", (1, Some(2)), 1, Operator, &["metric"]),
        sym("proj", "Embedding projection", Sys, "proj", (1, one), 1, Operator, &["id"]),
        sym("w2v", "Word2vec", Sys, "w2v", (0, one), 1, Operator, &["dim"]),
        sym("regression", "Regression", Sys, "regression", (1, ANY), 1, Operator, &[]),
        sym("classifier", "Classifier", Sys, "classifier", (1, ANY), 1, Operator, &["model"]),
        sym("classification", "Classification", Sys, "classification", (1, ANY), 1, Operator, &["label"]),
        sym("rank", "Ranking operator / top n elements", Sys, "rank", (1, one), 1, Operator, &["n"]),
        sym("encoder", "Encoder", Sys, "encoder", (1, ANY), 1, Operator, &["dim"]),
        sym("decoder", "Decoder", Sys, "decoder", (1, ANY), 1, Operator, &[]),
        sym("entail", "Deductive reasoning", Sys, "entail", (1, ANY), 1, Operator, &[]),
        sym("verify", "Verification", Sys, "verify", (1, one), 1, Operator, &[]),
        sym("func", "Function", Sys, "func", (0, ANY), 1, Operator, &["returns"]),
        sym("func_contract", "Function (contraction)", Sys, "func_contract", (0, ANY), 1, Operator, &["returns"]),
        sym("dataset", "Datasets, data resources", Sys, "dataset", (0, ANY), 1, Resource, &[]),
        sym("gold", "Gold standard", Sys, "gold", (0, ANY), 1, Resource, &[]),
        sym("kbfn", "Knowledge base of functions", Sys, "kbfn", (0, ANY), 1, Resource, &[]),
        sym("zoom", "Zoom in", Sys, "zoom", (0, Some(0)), 0, Meta, &[]),
        sym("acc", "Accuracy", Sys, "acc", (0, Some(0)), 0, Meta, &[]),
        // Neural-network symbols.
        sym("loss", "Loss function", Nn, "loss", (1, ANY), 1, NnCat, &[]),
        sym("activation", "Activation function", Nn, "activation", (1, one), 1, NnCat, &["fn"]),
        sym("softmax", "Softmax", Nn, "softmax", (1, one), 1, NnCat, &["class"]),
        sym("attention", "Attention", Nn, "attention", (1, ANY), 1, NnCat, &[]),
        sym("lstm", "RNN layer (LSTM)", Nn, "lstm", (1, ANY), 1, NnCat, &["units"]),
        sym("bilstm", "BiLSTM layer", Nn, "bilstm", (1, ANY), 1, NnCat, &["units"]),
        sym("gru", "GRU layer", Nn, "lstm", (1, ANY), 1, NnCat, &["units"]),
        sym("conv", "Convolutional layer", Nn, "conv", (1, one), 1, NnCat, &["filters"]),
        sym("recnn", "Recursive neural network", Nn, "recnn", (1, ANY), 1, NnCat, &["units"]),
        sym("svm", "Support vector machine", Nn, "svm", (1, ANY), 1, NnCat, &[]),
        sym("ground_truth", "Ground truth of sentiment classification", Nn, "ground_truth", (0, Some(0)), 1, NnCat, &[]),
        sym("hidden_fwd", "Hidden layer (forward)", Nn, "hidden_fwd", (1, ANY), 1, NnCat, &["units"]),
        sym("hidden_bwd", "Hidden layer (backward)", Nn, "hidden_bwd", (1, ANY), 1, NnCat, &["units"]),
    ]
}

/// The built-in tables plus one compilation's extension overlay.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    extensions: Vec<Extension>,
}

impl Registry {
    pub fn builtin() -> Self {
        Registry::default()
    }

    pub fn with_extensions(exts: &[Extension]) -> Result<Self, RegistryError> {
        let mut reg = Registry::builtin();
        for ext in exts {
            reg.register_extension(ext.clone())?;
        }
        Ok(reg)
    }

    pub fn extensions(&self) -> &[Extension] {
        &self.extensions
    }

    pub fn register_extension(&mut self, ext: Extension) -> Result<(), RegistryError> {
        let code = ext.code().to_string();
        if is_builtin_code(&code) {
            return Err(RegistryError::CollidesWithBuiltin(code));
        }
        if self.extensions.iter().any(|e| e.code() == code) {
            return Err(RegistryError::DuplicateExtension(code));
        }
        match &ext {
            Extension::Symbol(s) => {
                if s.max_in.is_some_and(|m| m < s.min_in) || s.max_out < s.min_out {
                    return Err(RegistryError::InvalidExtension {
                        code,
                        reason: "arity bounds are inconsistent".into(),
                    });
                }
            }
            Extension::Task(t) => {
                if t.domain.is_empty() || t.range.is_empty() {
                    return Err(RegistryError::InvalidExtension {
                        code,
                        reason: "domain and range must be non-empty".into(),
                    });
                }
                for term in t.domain.iter().chain(&t.range) {
                    if self.category(&term.base).is_none() {
                        return Err(RegistryError::InvalidExtension {
                            code,
                            reason: format!("unknown data category `{}`", term.base),
                        });
                    }
                }
            }
        }
        self.extensions.push(ext);
        Ok(())
    }

    pub fn lookup_signature(
        &self,
        task_code: &str,
        dialects: &DialectSet,
    ) -> Result<&Signature, RegistryError> {
        BUILTIN
            .signatures
            .iter()
            .find(|s| s.task_code == task_code && dialects.contains(&s.dialect))
            .or_else(|| {
                self.extensions.iter().find_map(|e| match e {
                    Extension::Task(t) if t.task_code == task_code => Some(t),
                    _ => None,
                })
            })
            .ok_or_else(|| RegistryError::UnknownTask(task_code.to_string()))
    }

    pub fn lookup_symbol(
        &self,
        code: &str,
        dialects: &DialectSet,
    ) -> Result<&SymbolDef, RegistryError> {
        let canonical = SYMBOL_ALIASES
            .iter()
            .find(|(alias, _)| *alias == code)
            .map_or(code, |(_, target)| target);
        BUILTIN
            .symbols
            .iter()
            .find(|s| s.code == canonical && dialects.contains(&s.dialect))
            .or_else(|| {
                self.extensions.iter().find_map(|e| match e {
                    Extension::Symbol(s) if s.code == code => Some(s),
                    _ => None,
                })
            })
            .ok_or_else(|| RegistryError::UnknownSymbol(code.to_string()))
    }

    /// Resolves a node code against tasks first, then symbols.
    pub fn resolve(&self, code: &str, dialects: &DialectSet) -> Option<Resolved<'_>> {
        if let Ok(sig) = self.lookup_signature(code, dialects) {
            return Some(Resolved::Task(sig));
        }
        self.lookup_symbol(code, dialects).ok().map(Resolved::Symbol)
    }

    /// Resolves a code ignoring dialect scope; used to pick a node kind for
    /// codes that will later be rejected as out of scope.
    pub fn resolve_any(&self, code: &str) -> Option<Resolved<'_>> {
        let all: DialectSet = Dialect::ALL.into_iter().collect();
        self.resolve(code, &all)
    }

    pub fn is_extension(&self, code: &str) -> bool {
        self.extensions.iter().any(|e| e.code() == code)
    }

    pub fn category(&self, code: &str) -> Option<&'static DataCategory> {
        BUILTIN.categories.iter().find(|c| c.code == code)
    }

    /// Maps an ASCII spelling to its category code.
    pub fn canonical_category(&self, name: &str) -> Option<&'static str> {
        if let Some(c) = BUILTIN.categories.iter().find(|c| c.code == name) {
            return Some(c.code.as_str());
        }
        BUILTIN
            .aliases
            .iter()
            .find(|(alias, _)| *alias == name)
            .map(|(_, code)| *code)
    }

    pub fn is_label(&self, label: &str) -> bool {
        BUILTIN.labels.contains(label) || self.extension_labels().contains(label)
    }

    fn extension_labels(&self) -> BTreeSet<&str> {
        self.extensions
            .iter()
            .filter_map(|e| match e {
                Extension::Task(t) => Some(t),
                Extension::Symbol(_) => None,
            })
            .flat_map(|t| t.domain.iter().chain(&t.range))
            .flat_map(|f| f.required_annotations.iter().chain(&f.optional_annotations))
            .map(String::as_str)
            .collect()
    }
}

fn is_builtin_code(code: &str) -> bool {
    BUILTIN.signatures.iter().any(|s| s.task_code == code)
        || BUILTIN.symbols.iter().any(|s| s.code == code)
        || SYMBOL_ALIASES.iter().any(|(alias, _)| *alias == code)
}

pub fn signatures() -> &'static [Signature] {
    &BUILTIN.signatures
}

pub fn categories() -> &'static [DataCategory] {
    &BUILTIN.categories
}

pub fn builtin_labels() -> &'static BTreeSet<String> {
    &BUILTIN.labels
}

pub fn list_symbols(dialect: &str) -> Result<Vec<&'static SymbolDef>, RegistryError> {
    let d: Dialect = dialect.parse()?;
    Ok(BUILTIN.symbols.iter().filter(|s| s.dialect == d).collect())
}

pub fn all_symbols() -> &'static [SymbolDef] {
    &BUILTIN.symbols
}
