//! Data terms: a data category decorated with classification labels,
//! optional tensor dimensions and structure.
//!
//! Literal grammar (ASCII):
//!
//! ```text
//! term   := atom | dist | "(" term ("," term)* ")" | "{" term "}"
//!         | "[" term (";" INT)? "]"
//! atom   := name sub? sup? dims?
//! name   := IDENT | "Pred" "(" "Arg" ")"
//! sub    := "_" IDENT | "_" "{" label ("," label)* "}"   (fused into IDENT)
//! sup    := "^" label | "^" "{" label ("," label)* "}"
//! dims   := "[" INT ("," INT)* "]"
//! dist   := "P_" IDENT "[" NUM "," NUM "]"
//! ```
//!
//! `S` is accepted for `s_T`, `Term` for `t_T` and `vec` for
//! `clustered_word`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::registry::{FormalStructure, FormalTerm, Registry};

/// Nesting bound for literals; deeper input is rejected rather than
/// recursing further.
const MAX_DEPTH: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub base: String,
    pub subscript: Option<String>,
    pub annotations: BTreeSet<String>,
    pub dims: Option<Vec<u32>>,
}

impl Atom {
    pub fn new(base: &str) -> Self {
        Atom {
            base: base.to_string(),
            subscript: None,
            annotations: BTreeSet::new(),
            dims: None,
        }
    }

    pub fn with_labels<I, S>(mut self, labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.annotations.extend(labels.into_iter().map(Into::into));
        self
    }

    pub fn with_dims(mut self, dims: Vec<u32>) -> Self {
        self.dims = Some(dims);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataTerm {
    Atom(Atom),
    Tuple(Vec<DataTerm>),
    Set(Box<DataTerm>),
    Seq {
        elem: Box<DataTerm>,
        max_len: Option<u32>,
    },
    /// Classification outcome `P_c[lo,hi]`.
    Dist { class: String, lo: f64, hi: f64 },
}

impl From<Atom> for DataTerm {
    fn from(a: Atom) -> Self {
        DataTerm::Atom(a)
    }
}

impl DataTerm {
    pub fn atom(base: &str) -> Self {
        DataTerm::Atom(Atom::new(base))
    }

    pub fn set_of(elem: DataTerm) -> Self {
        DataTerm::Set(Box::new(elem))
    }

    pub fn seq_of(elem: DataTerm, max_len: Option<u32>) -> Self {
        DataTerm::Seq {
            elem: Box::new(elem),
            max_len,
        }
    }

    /// Union of the labels carried anywhere inside the term.
    pub fn annotations(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| out.extend(a.annotations.iter().cloned()));
        out
    }

    pub fn visit_atoms(&self, f: &mut impl FnMut(&Atom)) {
        match self {
            DataTerm::Atom(a) => f(a),
            DataTerm::Tuple(items) => items.iter().for_each(|t| t.visit_atoms(f)),
            DataTerm::Set(e) | DataTerm::Seq { elem: e, .. } => e.visit_atoms(f),
            DataTerm::Dist { .. } => {}
        }
    }

    fn visit_atoms_mut(&mut self, f: &mut impl FnMut(&mut Atom)) {
        match self {
            DataTerm::Atom(a) => f(a),
            DataTerm::Tuple(items) => items.iter_mut().for_each(|t| t.visit_atoms_mut(f)),
            DataTerm::Set(e) | DataTerm::Seq { elem: e, .. } => e.visit_atoms_mut(f),
            DataTerm::Dist { .. } => {}
        }
    }

    /// Adds labels to every atom of the term.
    pub fn add_annotations(&mut self, labels: &BTreeSet<String>) {
        self.visit_atoms_mut(&mut |a| a.annotations.extend(labels.iter().cloned()));
    }

    /// The innermost atom for scalar, set and sequence terms.
    pub fn element_atom(&self) -> Option<&Atom> {
        match self {
            DataTerm::Atom(a) => Some(a),
            DataTerm::Set(e) | DataTerm::Seq { elem: e, .. } => e.element_atom(),
            _ => None,
        }
    }

    /// Base category of the term's element, `P_c` for distributions.
    pub fn base(&self) -> Option<&str> {
        match self {
            DataTerm::Dist { .. } => Some("P_c"),
            DataTerm::Tuple(_) => None,
            _ => self.element_atom().map(|a| a.base.as_str()),
        }
    }

    pub fn dims(&self) -> Option<&[u32]> {
        match self {
            DataTerm::Atom(a) => a.dims.as_deref(),
            _ => None,
        }
    }

    /// Replaces the dims of a scalar term, or of the element of a
    /// set/sequence term.
    pub fn map_element(&self, f: impl FnOnce(&Atom) -> DataTerm) -> DataTerm {
        match self {
            DataTerm::Set(e) => DataTerm::Set(Box::new(e.map_element(f))),
            DataTerm::Seq { elem, max_len } => DataTerm::Seq {
                elem: Box::new(elem.map_element(f)),
                max_len: *max_len,
            },
            DataTerm::Atom(a) => f(a),
            other => other.clone(),
        }
    }

    /// Checks categories and labels against a registry.
    pub fn validate(&self, registry: &Registry) -> Result<(), TermError> {
        let mut err = None;
        self.visit_atoms(&mut |a| {
            if err.is_some() {
                return;
            }
            if registry.category(&a.base).is_none() {
                err = Some(TermError::UnknownCategory(a.base.clone()));
            } else if let Some(l) = a.annotations.iter().find(|l| !registry.is_label(l)) {
                err = Some(TermError::UnknownLabel(l.clone()));
            }
        });
        err.map_or(Ok(()), Err)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("unexpected {found} at offset {offset}, expected {expected}")]
    Syntax {
        offset: usize,
        found: String,
        expected: String,
    },
    #[error("unknown data category `{0}`")]
    UnknownCategory(String),
    #[error("unknown annotation label `{0}`")]
    UnknownLabel(String),
    #[error("dimension entries must be positive integers")]
    BadDims,
    #[error("distribution range [{0}, {1}] is not ordered")]
    BadRange(String, String),
    #[error("data term nests too deeply")]
    TooDeep,
}

/// Parses a literal and validates it against the built-in registry.
pub fn parse_data_term(literal: &str) -> Result<DataTerm, TermError> {
    parse_data_term_in(literal, &Registry::builtin())
}

pub fn parse_data_term_in(literal: &str, registry: &Registry) -> Result<DataTerm, TermError> {
    let term: DataTerm = literal.parse()?;
    term.validate(registry)?;
    Ok(term)
}

impl FromStr for DataTerm {
    type Err = TermError;

    /// Syntax and category check only; labels are not validated.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = TermParser::new(s)?;
        let t = p.term(0)?;
        p.expect_end()?;
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Punct(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Num(s) => write!(f, "`{s}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
        }
    }
}

struct TermParser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl TermParser {
    fn new(s: &str) -> Result<Self, TermError> {
        let mut toks = Vec::new();
        let chars: Vec<(usize, char)> = s.char_indices().collect();
        let mut i = 0;
        while i < chars.len() {
            let (off, c) = chars[i];
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
                toks.push((off, Tok::Ident(text)));
            } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|(_, d)| d.is_ascii_digit())) {
                let start = i;
                i += 1;
                while i < chars.len() && (chars[i].1.is_ascii_digit() || chars[i].1 == '.') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().map(|(_, c)| c).collect();
                toks.push((off, Tok::Num(text)));
            } else if "(){}[],^;".contains(c) {
                toks.push((off, Tok::Punct(c)));
                i += 1;
            } else {
                return Err(TermError::Syntax {
                    offset: off,
                    found: format!("`{c}`"),
                    expected: "a data term".into(),
                });
            }
        }
        Ok(TermParser {
            toks,
            pos: 0,
            end: s.len(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn err(&self, expected: &str) -> TermError {
        TermError::Syntax {
            offset: self.offset(),
            found: self
                .peek()
                .map_or_else(|| "end of input".to_string(), |t| t.to_string()),
            expected: expected.to_string(),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), TermError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("`{c}`")))
        }
    }

    fn expect_end(&self) -> Result<(), TermError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            Err(self.err("end of term"))
        }
    }

    fn ident(&mut self) -> Result<String, TermError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err("an identifier")),
        }
    }

    fn number(&mut self) -> Result<String, TermError> {
        match self.peek() {
            Some(Tok::Num(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.err("a number")),
        }
    }

    fn positive_int(&mut self) -> Result<u32, TermError> {
        let n = self.number()?;
        match n.parse::<u32>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => Err(TermError::BadDims),
        }
    }

    fn term(&mut self, depth: usize) -> Result<DataTerm, TermError> {
        if depth > MAX_DEPTH {
            return Err(TermError::TooDeep);
        }
        match self.peek() {
            Some(Tok::Punct('(')) => {
                self.pos += 1;
                let mut items = vec![self.term(depth + 1)?];
                while self.eat(',') {
                    items.push(self.term(depth + 1)?);
                }
                self.expect(')')?;
                if items.len() == 1 {
                    Ok(items.pop().expect("one item"))
                } else {
                    Ok(DataTerm::Tuple(items))
                }
            }
            Some(Tok::Punct('{')) => {
                self.pos += 1;
                let inner = self.term(depth + 1)?;
                self.expect('}')?;
                Ok(DataTerm::set_of(inner))
            }
            Some(Tok::Punct('[')) => {
                self.pos += 1;
                let inner = self.term(depth + 1)?;
                let max_len = if self.eat(';') {
                    Some(self.positive_int()?)
                } else {
                    None
                };
                self.expect(']')?;
                Ok(DataTerm::seq_of(inner, max_len))
            }
            Some(Tok::Ident(_)) => self.atom(),
            _ => Err(self.err("a data term")),
        }
    }

    fn atom(&mut self) -> Result<DataTerm, TermError> {
        let name = self.ident()?;
        if let Some(class) = name.strip_prefix("P_") {
            if !class.is_empty() && self.peek() == Some(&Tok::Punct('[')) {
                return self.distribution(class.to_string());
            }
        }
        let (base, mut subscript) = if name == "Pred" && self.peek() == Some(&Tok::Punct('(')) {
            self.pos += 1;
            let arg = self.ident()?;
            if arg != "Arg" {
                return Err(TermError::UnknownCategory(format!("Pred({arg})")));
            }
            self.expect(')')?;
            ("PredArg".to_string(), None)
        } else if let Some(stem) = name.strip_suffix('_').filter(|_| self.peek() == Some(&Tok::Punct('{'))) {
            let base = canonical(stem).ok_or_else(|| TermError::UnknownCategory(stem.into()))?;
            self.pos += 1;
            let labels = self.label_list('}')?;
            (base.to_string(), Some(labels.join(",")))
        } else {
            split_base(&name).ok_or(TermError::UnknownCategory(name.clone()))?
        };
        if subscript.as_deref() == Some("") {
            subscript = None;
        }
        let mut atom = Atom {
            base,
            subscript,
            annotations: BTreeSet::new(),
            dims: None,
        };
        if self.eat('^') {
            if self.eat('{') {
                atom.annotations.extend(self.label_list('}')?);
            } else {
                atom.annotations.insert(self.label()?);
            }
        }
        if self.peek() == Some(&Tok::Punct('['))
            && matches!(self.peek_at(1), Some(Tok::Num(_)))
        {
            self.pos += 1;
            let mut dims = vec![self.positive_int()?];
            while self.eat(',') {
                dims.push(self.positive_int()?);
            }
            self.expect(']')?;
            atom.dims = Some(dims);
        }
        Ok(DataTerm::Atom(atom))
    }

    fn label(&mut self) -> Result<String, TermError> {
        let l = self.ident()?;
        if l == "Pred" && self.eat('(') {
            let arg = self.ident()?;
            self.expect(')')?;
            return Ok(format!("Pred{arg}"));
        }
        Ok(l)
    }

    fn label_list(&mut self, close: char) -> Result<Vec<String>, TermError> {
        let mut out = vec![self.label()?];
        while self.eat(',') {
            out.push(self.label()?);
        }
        self.expect(close)?;
        Ok(out)
    }

    fn distribution(&mut self, class: String) -> Result<DataTerm, TermError> {
        self.expect('[')?;
        let lo_s = self.number()?;
        self.expect(',')?;
        let hi_s = self.number()?;
        self.expect(']')?;
        let parse = |s: &str| s.parse::<f64>().ok().filter(|v| v.is_finite());
        match (parse(&lo_s), parse(&hi_s)) {
            (Some(lo), Some(hi)) if lo <= hi => Ok(DataTerm::Dist { class, lo, hi }),
            _ => Err(TermError::BadRange(lo_s, hi_s)),
        }
    }
}

fn canonical(name: &str) -> Option<&'static str> {
    Registry::builtin().canonical_category(name)
}

/// Splits `Term_1` into (`t_T`, `1`); whole names win over splits.
fn split_base(name: &str) -> Option<(String, Option<String>)> {
    if let Some(code) = canonical(name) {
        return Some((code.to_string(), None));
    }
    name.char_indices()
        .rev()
        .filter(|(_, c)| *c == '_')
        .find_map(|(i, _)| {
            let (stem, rest) = (&name[..i], &name[i + 1..]);
            canonical(stem).map(|code| (code.to_string(), Some(rest.to_string())))
        })
}

fn write_labels(f: &mut fmt::Formatter<'_>, labels: &BTreeSet<String>) -> fmt::Result {
    match labels.len() {
        0 => Ok(()),
        1 => write!(f, "^{}", labels.iter().next().expect("one label")),
        _ => {
            let joined: Vec<&str> = labels.iter().map(String::as_str).collect();
            write!(f, "^{{{}}}", joined.join(","))
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.base)?;
        if let Some(sub) = &self.subscript {
            if sub.chars().all(|c| c.is_ascii_alphanumeric()) {
                write!(f, "_{sub}")?;
            } else {
                write!(f, "_{{{sub}}}")?;
            }
        }
        write_labels(f, &self.annotations)?;
        if let Some(dims) = &self.dims {
            let d: Vec<String> = dims.iter().map(u32::to_string).collect();
            write!(f, "[{}]", d.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Display for DataTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataTerm::Atom(a) => a.fmt(f),
            DataTerm::Tuple(items) => {
                f.write_str("(")?;
                for (i, t) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    t.fmt(f)?;
                }
                f.write_str(")")
            }
            DataTerm::Set(e) => write!(f, "{{{e}}}"),
            DataTerm::Seq { elem, max_len: None } => write!(f, "[{elem}]"),
            DataTerm::Seq {
                elem,
                max_len: Some(n),
            } => write!(f, "[{elem};{n}]"),
            DataTerm::Dist { class, lo, hi } => write!(f, "P_{class}[{lo},{hi}]"),
        }
    }
}

impl Serialize for DataTerm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DataTerm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mismatch {
    Structure { expected: String, found: String },
    Base { expected: String, found: String },
    MissingAnnotations(BTreeSet<String>),
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mismatch::Structure { expected, found } => {
                write!(f, "expected {expected} structure, found {found}")
            }
            Mismatch::Base { expected, found } => {
                write!(f, "expected category {expected}, found {found}")
            }
            Mismatch::MissingAnnotations(missing) => {
                let m: Vec<&str> = missing.iter().map(String::as_str).collect();
                write!(f, "missing {}", m.join(", "))
            }
        }
    }
}

fn structure_name(t: &DataTerm) -> &'static str {
    match t {
        DataTerm::Atom(_) => "scalar",
        DataTerm::Tuple(_) => "tuple",
        DataTerm::Set(_) => "set",
        DataTerm::Seq { .. } => "sequence",
        DataTerm::Dist { .. } => "distribution",
    }
}

/// Matches an actual term against one formal position of a signature.
/// No subtyping: bases must be equal.
pub fn match_term(actual: &DataTerm, formal: &FormalTerm) -> Result<(), Mismatch> {
    let elem = match (formal.structure, actual) {
        (FormalStructure::Scalar, DataTerm::Atom(a)) => Some(a),
        (FormalStructure::SetOf, DataTerm::Set(e)) | (FormalStructure::SequenceOf, DataTerm::Seq { elem: e, .. }) => {
            match e.as_ref() {
                DataTerm::Atom(a) => Some(a),
                _ => None,
            }
        }
        (FormalStructure::Scalar, DataTerm::Dist { .. }) if formal.base == "P_c" => return Ok(()),
        _ => None,
    };
    let Some(atom) = elem else {
        let expected = match formal.structure {
            FormalStructure::Scalar => "scalar",
            FormalStructure::SetOf => "set",
            FormalStructure::SequenceOf => "sequence",
        };
        return Err(Mismatch::Structure {
            expected: expected.into(),
            found: structure_name(actual).into(),
        });
    };
    if atom.base != formal.base {
        return Err(Mismatch::Base {
            expected: formal.base.clone(),
            found: atom.base.clone(),
        });
    }
    let missing: BTreeSet<String> = formal
        .required_annotations
        .difference(&atom.annotations)
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(Mismatch::MissingAnnotations(missing));
    }
    Ok(())
}

/// Whether an inferred term satisfies an author-declared one: same shape
/// and bases, declared labels present, declared dims/subscripts equal.
pub fn conforms(inferred: &DataTerm, declared: &DataTerm) -> bool {
    match (inferred, declared) {
        (DataTerm::Atom(i), DataTerm::Atom(d)) => {
            i.base == d.base
                && d.annotations.is_subset(&i.annotations)
                && d.dims.as_ref().is_none_or(|dd| i.dims.as_ref() == Some(dd))
                && d.subscript.as_ref().is_none_or(|ds| i.subscript.as_ref() == Some(ds))
        }
        (DataTerm::Tuple(i), DataTerm::Tuple(d)) => {
            i.len() == d.len() && i.iter().zip(d).all(|(a, b)| conforms(a, b))
        }
        (DataTerm::Set(i), DataTerm::Set(d)) => conforms(i, d),
        (
            DataTerm::Seq { elem: i, max_len: il },
            DataTerm::Seq { elem: d, max_len: dl },
        ) => conforms(i, d) && dl.is_none_or(|n| il.is_some_and(|m| m <= n)),
        (DataTerm::Dist { .. }, DataTerm::Dist { .. }) => inferred == declared,
        _ => false,
    }
}
