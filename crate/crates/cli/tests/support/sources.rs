//! Random well-formed `.dial` sources exercising most of the grammar.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::Rng;

const REGIONS: [&str; 4] = ["top_left", "top_right", "bottom_left", "bottom_right"];
const ARROWS: [&str; 6] = ["->", "<->", "|->", "?>", "-o", "~>"];
const TERMS: [&str; 9] = [
    "s_T",
    "S^NER",
    "s_T^{POS,Chunk}",
    "[s_T^Chunk]",
    "{t_T}",
    "vec[3]",
    "vec[2,2]",
    "T",
    "P_c[0,1]",
];
const TASKS: [&str; 6] = ["POS", "NER", "SRL", "SYN", "OIE", "TR"];
const SYS_SYMBOLS: [&str; 9] = [
    "func(returns=\"T\")",
    "oplus",
    "concat",
    "sim(metric=cosine)",
    "join",
    "compose",
    "set",
    "verify",
    "classifier",
];
const NN_SYMBOLS: [&str; 5] = ["lstm(units=8)", "softmax(class=c)", "activation(fn=relu)", "attention", "svm"];
const TEXT_BITS: [&str; 10] = ["a", "b c", "Über", "x_1", "\"q\"", "back\\slash", "tab\t", "two\nlines", "∂", "{}"];

pub fn quote(s: &str) -> String {
    let mut q = String::from("\"");
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

fn text(rng: &mut impl Rng) -> String {
    let k = rng.gen_range(1..=3);
    (0..k).map(|_| *TEXT_BITS.choose(rng).expect("non-empty")).collect::<Vec<_>>().join(" ")
}

struct Gen<'r, R: Rng> {
    rng: &'r mut R,
    nn: bool,
    embeddings: Vec<String>,
    ids: Vec<String>,
    out: String,
    next: usize,
    groups: usize,
}

impl<R: Rng> Gen<'_, R> {
    fn maybe(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn fresh(&mut self, prefix: &str) -> String {
        self.next += 1;
        format!("{prefix}{}", self.next)
    }

    fn label(&mut self) -> String {
        if self.maybe(0.5) {
            format!(" {}", quote(&text(self.rng)))
        } else {
            String::new()
        }
    }

    fn region(&mut self, p: f64) -> String {
        if self.maybe(p) {
            format!(" @{}", REGIONS.choose(self.rng).expect("non-empty"))
        } else {
            String::new()
        }
    }

    fn perf(&mut self) -> String {
        if !self.maybe(0.5) {
            return String::new();
        }
        let k = self.rng.gen_range(1..=2);
        let items: Vec<String> = (0..k)
            .map(|_| {
                let v = self.rng.gen_range(0..=100);
                format!("acc=0.{v:02}@{}", quote(&text(self.rng)))
            })
            .collect();
        format!(" perf({})", items.join(", "))
    }

    fn item(&mut self, indent: &str, depth: usize) {
        let roll = self.rng.gen_range(0..100);
        if roll < 25 {
            let id = self.fresh("d");
            let term = *TERMS.choose(self.rng).expect("non-empty");
            let tag = match self.rng.gen_range(0..8) {
                0 => " @gold".to_string(),
                1 => " @kb".to_string(),
                2 => format!(" @dataset({})", quote(&text(self.rng))),
                _ => String::new(),
            };
            let label = self.label();
            let region = self.region(0.1);
            let _ = writeln!(self.out, "{indent}data {id}: {term}{tag}{label}{region}");
            self.ids.push(id);
        } else if roll < 80 || depth >= 2 || self.ids.is_empty() {
            let id = self.fresh("n");
            let code = match self.rng.gen_range(0..10) {
                0..=3 => TASKS.choose(self.rng).expect("non-empty").to_string(),
                4 if !self.embeddings.is_empty() => {
                    format!("proj(id={})", self.embeddings.choose(self.rng).expect("non-empty"))
                }
                5 | 6 if self.nn => NN_SYMBOLS.choose(self.rng).expect("non-empty").to_string(),
                _ => SYS_SYMBOLS.choose(self.rng).expect("non-empty").to_string(),
            };
            let label = self.label();
            let perf = self.perf();
            let region = self.region(0.1);
            let _ = writeln!(self.out, "{indent}node {id}: {code}{label}{perf}{region}");
            self.ids.push(id);
        } else {
            self.groups += 1;
            let id = format!("g{}", self.groups);
            let owner = self.ids.choose(self.rng).expect("non-empty").clone();
            let sides = if self.maybe(0.3) { "(entry=left, exit=right)" } else { "" };
            let _ = writeln!(self.out, "{indent}detail {id} for {owner}{sides} {{");
            let inner = format!("{indent}  ");
            for _ in 0..self.rng.gen_range(1..=3) {
                self.item(&inner, depth + 1);
            }
            let _ = writeln!(self.out, "{indent}}}");
        }
    }
}

/// A random source that tokenizes, parses and lowers. It may still carry
/// type errors or lint warnings.
pub fn random_source(rng: &mut impl Rng) -> String {
    let nn = rng.gen_bool(0.4);
    let mut g = Gen {
        rng,
        nn,
        embeddings: Vec::new(),
        ids: Vec::new(),
        out: String::new(),
        next: 0,
        groups: 0,
    };
    let _ = writeln!(g.out, "dial 0.1");
    let _ = writeln!(g.out, "dialect {}", if nn { "sys, nn" } else { "sys" });
    let _ = writeln!(g.out);
    let title = quote(&text(g.rng));
    let region = g.region(0.2);
    let _ = writeln!(g.out, "diagram {title}{region} {{");
    for _ in 0..g.rng.gen_range(0..=2) {
        let id = g.fresh("e");
        let dim = g.rng.gen_range(1..=500);
        let label = g.label();
        let _ = writeln!(g.out, "  embedding {id}(dim={dim}){label}");
        g.embeddings.push(id);
    }
    for _ in 0..g.rng.gen_range(1..=10) {
        g.item("  ", 0);
    }
    let n = g.ids.len();
    for _ in 0..g.rng.gen_range(0..=n + 2) {
        let (a, b) = (g.rng.gen_range(0..n), g.rng.gen_range(0..n));
        let (s, t) = if g.rng.gen_bool(0.85) { (a.min(b), a.max(b)) } else { (a, b) };
        let arrow = if g.rng.gen_bool(0.7) { "->" } else { ARROWS.choose(g.rng).expect("non-empty") };
        let term = if g.rng.gen_bool(0.15) {
            format!(" as {}", TERMS.choose(g.rng).expect("non-empty"))
        } else {
            String::new()
        };
        let _ = writeln!(g.out, "  edge {} {arrow} {}{term}", g.ids[s], g.ids[t]);
    }
    for _ in 0..g.rng.gen_range(0..=2) {
        let id = g.fresh("t");
        let kind = match g.rng.gen_range(0..4) {
            0 => ": hyperparams",
            1 => ": results",
            2 => ": freeform",
            _ => "",
        };
        let region = g.region(0.3);
        let _ = writeln!(g.out, "  table {id}{kind}{region} {{");
        for _ in 0..g.rng.gen_range(0..=3) {
            let (k, v) = (quote(&text(g.rng)), quote(&text(g.rng)));
            let _ = writeln!(g.out, "    {k}: {v};");
        }
        let _ = writeln!(g.out, "  }}");
    }
    let _ = writeln!(g.out, "}}");
    g.out
}
