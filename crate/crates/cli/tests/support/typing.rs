//! Brute-force type propagation over random DAGs of taggers and operators.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use dial_core::model::Slot;
use dial_core::pipeline::compile;
use dial_core::term::DataTerm;
use dial_core::{Code, Location};
use rand::seq::SliceRandom;
use rand::Rng;

use super::topological_orders;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    Scalar,
    Seq(Option<u32>),
    Set,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub shape: Shape,
    pub base: String,
    pub labels: BTreeSet<String>,
    pub dims: Option<Vec<u32>>,
}

impl Term {
    fn new(shape: Shape, base: &str, labels: &[&str], dims: Option<Vec<u32>>) -> Self {
        Term {
            shape,
            base: base.into(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            dims,
        }
    }

    /// Converts a checker term, or `None` for shapes outside this model.
    pub fn from_checked(t: &DataTerm) -> Option<Term> {
        let (shape, elem) = match t {
            DataTerm::Atom(_) => (Shape::Scalar, t),
            DataTerm::Set(e) => (Shape::Set, e.as_ref()),
            DataTerm::Seq { elem, max_len } => (Shape::Seq(*max_len), elem.as_ref()),
            _ => return None,
        };
        let DataTerm::Atom(a) = elem else { return None };
        if a.subscript.is_some() {
            return None;
        }
        Some(Term {
            shape,
            base: a.base.clone(),
            labels: a.annotations.clone(),
            dims: a.dims.clone(),
        })
    }
}

/// Source literals with their expected meaning.
pub fn pool() -> Vec<(&'static str, Term)> {
    use Shape::*;
    vec![
        ("s_T", Term::new(Scalar, "s_T", &[], None)),
        ("S", Term::new(Scalar, "s_T", &[], None)),
        ("s_T^NER", Term::new(Scalar, "s_T", &["NER"], None)),
        ("s_T^{POS,Chunk}", Term::new(Scalar, "s_T", &["POS", "Chunk"], None)),
        ("[s_T^Chunk]", Term::new(Seq(None), "s_T", &["Chunk"], None)),
        ("{s_T}", Term::new(Set, "s_T", &[], None)),
        ("vec[3]", Term::new(Scalar, "clustered_word", &[], Some(vec![3]))),
        ("vec[4]", Term::new(Scalar, "clustered_word", &[], Some(vec![4]))),
        ("vec[2,2]", Term::new(Scalar, "clustered_word", &[], Some(vec![2, 2]))),
        ("T", Term::new(Scalar, "T", &[], None)),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Data(usize),
    Tagger(&'static str),
    Oplus,
    Concat,
    Rank(u32),
}

const TAGGERS: [(&str, &[&str]); 3] = [("POS", &["POS"]), ("NER", &["NER", "Names"]), ("SRL", &["SRL", "Sem"])];

fn added_labels(code: &str) -> &'static [&'static str] {
    TAGGERS.iter().find(|t| t.0 == code).expect("tagger").1
}

#[derive(Debug, Clone)]
pub struct Case {
    pub kinds: Vec<Kind>,
    /// (source, target, target slot).
    pub arcs: Vec<(usize, usize, u32)>,
    pub source: String,
}

/// A random DAG of at most `max_nodes` vertices, declared in shuffled order.
pub fn random_case(rng: &mut impl Rng, max_nodes: usize) -> Case {
    let n = rng.gen_range(2..=max_nodes);
    let pool_len = pool().len();
    let mut kinds = Vec::with_capacity(n);
    let mut arcs = Vec::new();
    for i in 0..n {
        let roll = rng.gen_range(0..100);
        let kind = if i == 0 || roll < 20 {
            Kind::Data(rng.gen_range(0..pool_len))
        } else if roll < 55 || (roll < 80 && i < 2) {
            Kind::Tagger(TAGGERS[rng.gen_range(0..3)].0)
        } else if roll < 80 {
            if rng.gen_bool(0.5) {
                Kind::Oplus
            } else {
                Kind::Concat
            }
        } else {
            Kind::Rank(rng.gen_range(1..=3))
        };
        let preds: Vec<usize> = match kind {
            Kind::Data(_) => Vec::new(),
            Kind::Tagger(_) if rng.gen_bool(0.05) => Vec::new(),
            Kind::Tagger(_) | Kind::Rank(_) => vec![rng.gen_range(0..i)],
            Kind::Oplus | Kind::Concat => {
                let k = rng.gen_range(2..=i.min(3));
                let mut all: Vec<usize> = (0..i).collect();
                all.shuffle(rng);
                all.truncate(k);
                all
            }
        };
        for (slot, p) in preds.into_iter().enumerate() {
            arcs.push((p, i, slot as u32));
        }
        kinds.push(kind);
    }
    let names = pool();
    let mut decls: Vec<String> = kinds
        .iter()
        .enumerate()
        .map(|(i, k)| match k {
            Kind::Data(p) => format!("  data v{i}: {}", names[*p].0),
            Kind::Tagger(code) => format!("  node v{i}: {code} perf(acc=0.5@\"x\")"),
            Kind::Oplus => format!("  node v{i}: oplus"),
            Kind::Concat => format!("  node v{i}: concat"),
            Kind::Rank(r) => format!("  node v{i}: rank(n={r})"),
        })
        .collect();
    decls.shuffle(rng);
    let mut edges: Vec<String> = arcs
        .iter()
        .map(|(s, t, slot)| format!("  edge v{s} -> v{t}.in{slot}"))
        .collect();
    edges.shuffle(rng);
    let mut source = String::from("dial 0.1\ndialect sys\n\ndiagram \"random\" {\n");
    for line in decls.iter().chain(&edges) {
        let _ = writeln!(source, "{line}");
    }
    source.push_str("}\n");
    Case { kinds, arcs, source }
}

/// Output term and error codes of one vertex given its slot inputs.
fn step(kind: Kind, inputs: &[Option<Term>], connected: &[bool]) -> (Option<Term>, Vec<Code>) {
    match kind {
        Kind::Data(p) => (Some(pool()[p].1.clone()), Vec::new()),
        Kind::Tagger(code) => {
            let mut labels: BTreeSet<String> = added_labels(code).iter().map(|s| s.to_string()).collect();
            let mut errors = Vec::new();
            match inputs.first().cloned().flatten() {
                Some(t) => {
                    if t.shape != Shape::Scalar || t.base != "s_T" {
                        errors.push(Code::E102);
                    }
                    if t.base == "s_T" {
                        labels.extend(t.labels);
                    }
                }
                None if !connected.first().copied().unwrap_or(false) => errors.push(Code::E101),
                None => {}
            }
            let out = Term {
                shape: Shape::Scalar,
                base: "s_T".into(),
                labels,
                dims: None,
            };
            (Some(out), errors)
        }
        Kind::Oplus | Kind::Concat => {
            let known: Vec<&Term> = inputs.iter().flatten().collect();
            if known.len() < 2 {
                return (None, Vec::new());
            }
            let dims: Vec<&Option<Vec<u32>>> = known.iter().map(|t| &t.dims).collect();
            let mut out = known[0].clone();
            if dims.iter().any(|d| d.is_some()) {
                if dims.iter().any(|d| d.is_none()) {
                    return (None, vec![Code::E103]);
                }
                let mut acc = dims[0].clone().expect("checked");
                for d in &dims[1..] {
                    let d = d.as_ref().expect("checked");
                    if d.len() != acc.len() || d[1..] != acc[1..] {
                        return (None, vec![Code::E103]);
                    }
                    acc[0] += d[0];
                }
                out.dims = Some(acc);
            }
            if kind == Kind::Concat {
                if let Shape::Seq(_) = out.shape {
                    let lens: Option<Vec<u32>> = known
                        .iter()
                        .map(|t| match t.shape {
                            Shape::Seq(l) => l,
                            _ => None,
                        })
                        .collect();
                    out.shape = Shape::Seq(lens.map(|l| l.iter().sum()));
                }
            }
            for t in &known {
                out.labels.extend(t.labels.iter().cloned());
            }
            (Some(out), Vec::new())
        }
        Kind::Rank(n) => match inputs.iter().flatten().next() {
            None => (None, Vec::new()),
            Some(t) if t.shape == Shape::Scalar => (None, vec![Code::E102]),
            Some(t) => (
                Some(Term {
                    shape: Shape::Seq(Some(n)),
                    ..t.clone()
                }),
                Vec::new(),
            ),
        },
    }
}

/// Edge terms (by arc index) and sorted error codes per vertex.
pub type Typing = (Vec<Option<Term>>, Vec<Vec<Code>>);

/// Propagates terms vertex by vertex along one topological order.
pub fn propagate(case: &Case, order: &[usize]) -> Typing {
    let n = case.kinds.len();
    let mut out: Vec<Option<Term>> = vec![None; n];
    let mut errors = vec![Vec::new(); n];
    for &v in order {
        let width = case.arcs.iter().filter(|a| a.1 == v).map(|a| a.2 as usize + 1).max().unwrap_or(0);
        let mut inputs = vec![None; width];
        let mut connected = vec![false; width];
        for &(s, t, slot) in &case.arcs {
            if t == v {
                inputs[slot as usize] = out[s].clone();
                connected[slot as usize] = true;
            }
        }
        let (o, mut e) = step(case.kinds[v], &inputs, &connected);
        e.sort();
        out[v] = o;
        errors[v] = e;
    }
    let edges = case.arcs.iter().map(|a| out[a.0].clone()).collect();
    (edges, errors)
}

/// The oracle: every topological order must agree.
pub fn oracle(case: &Case) -> Result<Typing, String> {
    let plain: Vec<(usize, usize)> = case.arcs.iter().map(|a| (a.0, a.1)).collect();
    let orders = topological_orders(case.kinds.len(), &plain);
    let first = propagate(case, &orders[0]);
    for o in &orders[1..] {
        if propagate(case, o) != first {
            return Err(format!("oracle depends on order {o:?}"));
        }
    }
    Ok(first)
}

/// What the checker computes, in the oracle's terms.
pub fn checked(case: &Case) -> Result<Typing, String> {
    let c = compile(&case.source);
    let typed = c.typed.as_ref().ok_or_else(|| format!("did not reach type checking: {:?}", c.diagnostics))?;
    let d = &typed.diagram;
    let index: BTreeMap<String, usize> = (0..case.kinds.len()).map(|i| (format!("v{i}"), i)).collect();
    let mut edges = vec![None; case.arcs.len()];
    for e in &d.edges {
        let (s, t) = (index[&e.source.node], index[&e.target.node]);
        let Slot::Index(slot) = e.target.slot else {
            return Err(format!("unexpected slot on {}", e.id));
        };
        let k = case
            .arcs
            .iter()
            .position(|a| *a == (s, t, slot))
            .ok_or_else(|| format!("unknown edge {}", e.id))?;
        edges[k] = match typed.edge_terms.get(&e.id) {
            Some(term) => Some(Term::from_checked(term).ok_or_else(|| format!("unexpected term {term}"))?),
            None => None,
        };
    }
    let mut errors = vec![Vec::new(); case.kinds.len()];
    for diag in &c.diagnostics {
        match &diag.location {
            Location::Node(id) => errors[index[id]].push(diag.code),
            other => return Err(format!("diagnostic outside a node: {} at {other:?}", diag.code)),
        }
    }
    for e in &mut errors {
        e.sort();
    }
    Ok((edges, errors))
}

/// Compares checker and oracle on one case.
pub fn agree(case: &Case) -> Result<(), String> {
    let expected = oracle(case)?;
    let actual = checked(case)?;
    if expected == actual {
        Ok(())
    } else {
        Err(format!(
            "mismatch on\n{}\noracle:  {expected:?}\nchecker: {actual:?}",
            case.source
        ))
    }
}
