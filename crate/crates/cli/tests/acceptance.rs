//! Acceptance run: one PASS/FAIL line per criterion, each within its time
//! budget. Runs without the libtest harness so the report is always shown.

mod support;

use std::collections::BTreeSet;
use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use dial_core::layout::{layout, Rect};
use dial_core::lint::RULES;
use dial_core::model::canonical_serialize;
use dial_core::parser::{format_source, lower, parse_source};
use dial_core::pipeline::compile;
use dial_core::registry::{categories, list_symbols, signatures, CLASSIFICATION_EXAMPLES};
use dial_core::typecheck::DimOp;
use dial_core::Code;
use dial_corpus::{default_root, evaluate, load_cases, CorpusCase};
use rand::Rng;

use support::{dims, layering, rng, sources, typing};

type Check = Result<String, String>;

/// Number, name, time budget in seconds, and the check itself.
type Criterion = (u32, &'static str, u64, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cases() -> Vec<CorpusCase> {
    load_cases(&default_root()).expect("corpus directory is readable")
}

fn registry_counts() -> Check {
    let sys = list_symbols("sys").map_err(|e| e.to_string())?.len();
    let nn = list_symbols("nn").map_err(|e| e.to_string())?.len();
    let cats = categories().iter().filter(|c| !c.extended).count();
    let got = (signatures().len(), cats, CLASSIFICATION_EXAMPLES.len(), sys, nn);
    ensure(got == (26, 16, 7, 30, 13), || {
        format!("signatures/categories/classifications/sys/nn = {got:?}")
    })?;
    Ok("26 signatures, 16 categories, 7 classifications, 30 sys, 13 nn".into())
}

fn corpus_diagnostics() -> Check {
    let mut checked = 0;
    for case in cases() {
        let src = fs::read_to_string(&case.source).map_err(|e| e.to_string())?;
        let out = evaluate(&src);
        let raw = fs::read(&case.expect).map_err(|e| format!("{}: {e}", case.expect.display()))?;
        let mut want = out.lines.join("\n");
        if !want.is_empty() {
            want.push('\n');
        }
        ensure(raw == want.as_bytes(), || {
            format!("{}: expected {:?}, produced {:?}", case.name, String::from_utf8_lossy(&raw), want)
        })?;
        let errors = compile(&src).diagnostics.iter().filter(|d| d.is_error()).count();
        match case.name.as_str() {
            "qa_system" | "lexicon_attention" | "entailment" => {
                ensure(errors == 0, || format!("{} has {errors} errors", case.name))?;
            }
            "el_without_ner" => {
                let codes: Vec<Code> = compile(&src).diagnostics.iter().map(|d| d.code).collect();
                ensure(codes == [Code::E102], || format!("mutation produced {codes:?}"))?;
            }
            _ => {}
        }
        checked += 1;
    }
    ensure(checked >= 4, || format!("only {checked} corpus cases"))?;
    Ok(format!("{checked} cases match their expect files"))
}

fn typecheck_oracle() -> Check {
    let mut r = rng(0x7e57_0003);
    let mut errors_seen = 0;
    for _ in 0..1000 {
        let case = typing::random_case(&mut r, 8);
        typing::agree(&case)?;
        if compile(&case.source).has_errors() {
            errors_seen += 1;
        }
    }
    Ok(format!("1000 DAGs agree with the all-orders oracle ({errors_seen} with errors)"))
}

fn dimension_calculus() -> Check {
    let mut r = rng(0x7e57_0004);
    let mut mismatched = 0;
    for i in 0..10_000 {
        let a = dims::random_dims(&mut r);
        let b = if r.gen_bool(0.35) {
            let mut b = a.clone();
            b[0] = r.gen_range(1..=512);
            b
        } else {
            dims::random_dims(&mut r)
        };
        if a.len() != b.len() {
            mismatched += 1;
        }
        for op in [DimOp::Oplus, DimOp::Concat, DimOp::Otimes] {
            dims::check_pair(op, &a, &b)?;
            if i % 50 == 0 {
                dims::check_pipeline(op, &a, &b)?;
            }
        }
    }
    Ok(format!("10000 pairs, {mismatched} rank mismatches, 600 through the pipeline"))
}

fn layout_properties() -> Check {
    let mut r = rng(0x7e57_0005);
    let mut exhaustive = 0;
    for _ in 0..1000 {
        let n = r.gen_range(1..=10);
        let (d, arcs) = layering::random_graph(&mut r, n, true);
        let l = layering::stable(&d)?;
        ensure(l.reversed_edges.is_empty(), || "a DAG had reversed edges".into())?;
        layering::monotone(&d, &l)?;
        layering::disjoint(&l)?;
        if n <= 7 {
            let want = layering::longest_path_layers(n, &arcs);
            let got = layering::layers_of(&l, n);
            ensure(got == want, || format!("layers {got:?}, oracle {want:?} for {arcs:?}"))?;
            exhaustive += 1;
        }
    }
    for _ in 0..200 {
        let n = r.gen_range(2..=8);
        let (d, _) = layering::random_graph(&mut r, n, false);
        let l = layering::stable(&d)?;
        layering::monotone(&d, &l)?;
        layering::disjoint(&l)?;
    }
    let mut sourced = 0;
    for _ in 0..300 {
        let src = sources::random_source(&mut r);
        let c = compile(&src);
        let Some(typed) = c.typed.as_ref() else { continue };
        let l = layout(typed);
        ensure(l == layout(typed), || "layout differs between runs".into())?;
        layering::monotone_within_blocks(&typed.diagram, &l).map_err(|e| format!("{e}\n{src}"))?;
        layering::disjoint(&l)?;
        regions_clear(&typed.diagram, &l).map_err(|e| format!("{e}\n{src}"))?;
        sourced += 1;
    }
    Ok(format!("1000 DAGs ({exhaustive} against exhaustive layering), 200 cyclic graphs, {sourced} generated sources"))
}

fn regions_clear(d: &dial_core::Diagram, l: &dial_core::layout::LayoutResult) -> Result<(), String> {
    let fixed: Vec<(&str, &Rect)> = std::iter::once(("title", &l.title_region))
        .chain(l.table_regions.iter().map(|(k, v)| (k.as_str(), v)))
        .collect();
    for (id, r) in &l.node_boxes {
        for (what, f) in &fixed {
            ensure(!r.intersects(f), || format!("node {id} overlaps {what}"))?;
        }
    }
    for g in &d.groups {
        let gb = *l.group_boxes.get(&g.id).ok_or_else(|| format!("group {} has no box", g.id))?;
        for m in &g.members.nodes {
            let mb = l.node_boxes.get(m).ok_or_else(|| format!("member {m} has no box"))?;
            ensure(gb.strictly_contains(mb), || format!("{m} escapes group {}", g.id))?;
        }
        let ob = l.node_boxes.get(&g.owner).ok_or_else(|| format!("owner {} has no box", g.owner))?;
        ensure(!gb.intersects(ob), || format!("owner of {} overlaps it", g.id))?;
    }
    Ok(())
}

fn render_determinism() -> Check {
    let mut goldens = 0;
    for case in cases() {
        let src = fs::read_to_string(&case.source).map_err(|e| e.to_string())?;
        let (a, b) = (evaluate(&src), evaluate(&src));
        ensure(a == b, || format!("{} renders differently across runs", case.name))?;
        let (Some(svg), Some(tikz)) = (a.svg, a.tikz) else { continue };
        for (path, text) in [(&case.golden_svg, &svg), (&case.golden_tikz, &tikz)] {
            let golden = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
            ensure(golden == text.as_bytes(), || format!("{} differs", path.display()))?;
            goldens += 1;
        }
        integer_coordinates(&svg).map_err(|e| format!("{}: {e}", case.name))?;
    }
    Ok(format!("{goldens} golden files byte-identical"))
}

fn integer_coordinates(svg: &str) -> Result<(), String> {
    let doc = roxmltree::Document::parse(svg).map_err(|e| e.to_string())?;
    for node in doc.descendants().filter(|n| n.is_element()) {
        for attr in node.attributes() {
            if matches!(
                attr.name(),
                "x" | "y" | "width" | "height" | "cx" | "cy" | "r" | "rx" | "ry" | "x1" | "y1" | "x2" | "y2" | "points" | "d"
            ) && attr.value().contains('.')
            {
                return Err(format!("fractional coordinate {}={}", attr.name(), attr.value()));
            }
        }
    }
    Ok(())
}

fn format_properties() -> Check {
    let mut r = rng(0x7e57_0007);
    let mut sources: Vec<String> = cases()
        .iter()
        .map(|c| fs::read_to_string(&c.source).expect("readable corpus"))
        .collect();
    let corpus_n = sources.len();
    sources.extend((0..500).map(|_| sources::random_source(&mut r)));
    for src in &sources {
        let once = format_source(src).map_err(|d| format!("generated source does not parse: {d:?}\n{src}"))?;
        let twice = format_source(&once).map_err(|d| format!("formatted source does not parse: {d:?}\n{once}"))?;
        ensure(once == twice, || format!("not idempotent:\n{once}\n---\n{twice}"))?;
        let ir = |s: &str| {
            let lowered = lower(&parse_source(s).expect("parsed above"));
            let codes: Vec<Code> = lowered.diagnostics.iter().map(|d| d.code).collect();
            (canonical_serialize(&lowered.diagram), codes)
        };
        ensure(ir(src) == ir(&once), || format!("formatting changed the IR of\n{src}"))?;
    }
    let mut fuzzed = 0;
    let seeds = sources.clone();
    let quiet = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let outcome = (|| {
        for i in 0..100_000 {
            let bytes: Vec<u8> = if i % 2 == 0 {
                let len = r.gen_range(0..96);
                (0..len).map(|_| r.gen()).collect()
            } else {
                let mut b = seeds[r.gen_range(0..seeds.len())].clone().into_bytes();
                for _ in 0..r.gen_range(1..=4) {
                    let at = r.gen_range(0..=b.len());
                    match r.gen_range(0..3) {
                        0 if at < b.len() => {
                            b.remove(at);
                        }
                        1 if at < b.len() => b[at] = r.gen(),
                        _ => b.insert(at, r.gen()),
                    }
                }
                b
            };
            let text = String::from_utf8_lossy(&bytes).into_owned();
            let run = panic::catch_unwind(|| {
                let c = compile(&text);
                if let Some(typed) = c.clean() {
                    let _ = layout(typed);
                }
                let _ = format_source(&text);
            });
            if run.is_err() {
                return Err(format!("panic on input {text:?}"));
            }
            fuzzed += 1;
        }
        Ok(())
    })();
    panic::set_hook(quiet);
    outcome?;
    Ok(format!("{corpus_n} corpus + 500 generated sources round-trip; {fuzzed} fuzz inputs without a crash"))
}

fn lint_fixtures() -> Check {
    let mut fired = BTreeSet::new();
    for case in cases() {
        let Some(code) = case.name.get(..4).and_then(|c| Code::parse(&c.to_uppercase())) else { continue };
        let src = fs::read_to_string(&case.source).map_err(|e| e.to_string())?;
        let got: Vec<String> = evaluate(&src).lines;
        let codes: Vec<&str> = got.iter().filter_map(|l| l.split_whitespace().next()).collect();
        ensure(codes == [code.as_str()], || format!("{} fired {codes:?}", case.name))?;
        fired.insert(code);
    }
    let rules: BTreeSet<Code> = RULES.iter().map(|r| r.code).collect();
    ensure(fired == rules, || format!("fixtures cover {fired:?}"))?;
    for case in cases().iter().filter(|c| c.source.parent().is_some_and(|p| p.ends_with("pass"))) {
        let out = dial(&["lint", "--deny", "warnings", path(&case.source)]);
        ensure(out.status.code() == Some(0) && out.stderr.is_empty(), || {
            format!("{} is not lint-clean: {}", case.name, String::from_utf8_lossy(&out.stderr))
        })?;
    }
    Ok(format!("{} fixtures fire only their rule; clean corpus passes --deny warnings", fired.len()))
}

fn dial(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dial"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("dial binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

struct Expect<'a> {
    args: Vec<&'a str>,
    code: i32,
    stdout: Stream,
    stderr: Stream,
}

enum Stream {
    Empty,
    NonEmpty,
    Contains(&'static str),
    Json,
}

impl Stream {
    fn check(&self, name: &str, bytes: &[u8]) -> Result<(), String> {
        let text = String::from_utf8_lossy(bytes);
        let ok = match self {
            Stream::Empty => bytes.is_empty(),
            Stream::NonEmpty => !bytes.is_empty(),
            Stream::Contains(s) => text.contains(s),
            Stream::Json => serde_json::from_str::<serde_json::Value>(&text).is_ok(),
        };
        ensure(ok, || format!("unexpected {name}: {text:?}"))
    }
}

fn diagnostics_are_well_shaped(stdout: &[u8]) -> Result<usize, String> {
    let v: serde_json::Value = serde_json::from_slice(stdout).map_err(|e| e.to_string())?;
    let items = v.as_array().ok_or("diagnostics are not an array")?;
    for item in items {
        let keys: BTreeSet<&str> = item
            .as_object()
            .ok_or("diagnostic is not an object")?
            .keys()
            .map(String::as_str)
            .collect();
        ensure(keys == BTreeSet::from(["code", "severity", "file", "line", "col", "message"]), || {
            format!("diagnostic keys {keys:?}")
        })?;
    }
    Ok(items.len())
}

fn cli_contract() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = default_root();
    let qa = root.join("pass/qa_system.dial");
    let broken = root.join("fail/el_without_ner.dial");
    let warned = root.join("fail/w207_missing_perf.dial");
    let missing = dir.path().join("absent.dial");
    let svg = dir.path().join("qa.svg");
    let tex = dir.path().join("qa.tex");
    let refused = dir.path().join("broken.svg");
    let canonical = dir.path().join("canonical.dial");
    let syntax = dir.path().join("syntax.dial");
    let formatted = format_source(&fs::read_to_string(&qa).map_err(|e| e.to_string())?).map_err(|e| format!("{e:?}"))?;
    fs::write(&canonical, &formatted).map_err(|e| e.to_string())?;
    fs::write(&syntax, "dial 0.1\ndialect sys\ndiagram \"D\" { node }\n").map_err(|e| e.to_string())?;
    let p = |b: &PathBuf| b.to_str().expect("utf-8 path").to_owned();
    let (qa, broken, warned, missing) = (p(&qa), p(&broken), p(&warned), p(&missing));
    let (svg_s, tex_s, refused_s, canonical, syntax) = (p(&svg), p(&tex), p(&refused), p(&canonical), p(&syntax));

    use Stream::*;
    let table = vec![
        Expect { args: vec!["--help"], code: 0, stdout: NonEmpty, stderr: Empty },
        Expect { args: vec!["--version"], code: 0, stdout: Contains("0.1"), stderr: Empty },
        Expect { args: vec!["frobnicate"], code: 2, stdout: Empty, stderr: NonEmpty },
        Expect { args: vec!["check", &qa], code: 0, stdout: Empty, stderr: Empty },
        Expect { args: vec!["check", &broken], code: 1, stdout: Empty, stderr: Contains("error[E102]") },
        Expect { args: vec!["check", "--json", &broken], code: 1, stdout: Json, stderr: Empty },
        Expect { args: vec!["check", "--json", &qa], code: 0, stdout: Contains("[]"), stderr: Empty },
        Expect { args: vec!["check"], code: 2, stdout: Empty, stderr: NonEmpty },
        Expect { args: vec!["check", &missing], code: 2, stdout: Empty, stderr: NonEmpty },
        Expect { args: vec!["check", &syntax], code: 1, stdout: Empty, stderr: Contains("error[E00") },
        Expect { args: vec!["lint", &qa], code: 0, stdout: Empty, stderr: Empty },
        Expect { args: vec!["lint", &warned], code: 0, stdout: Empty, stderr: Contains("warning[W207]") },
        Expect { args: vec!["lint", "--deny", "warnings", &warned], code: 1, stdout: Empty, stderr: Contains("W207") },
        Expect { args: vec!["lint", "--deny", "warnings", "--allow", "W207", &warned], code: 0, stdout: Empty, stderr: Empty },
        Expect { args: vec!["lint", "--json", &warned], code: 0, stdout: Json, stderr: Empty },
        Expect { args: vec!["lint", "--allow", "W999", &qa], code: 2, stdout: Empty, stderr: NonEmpty },
        Expect { args: vec!["lint", "--list"], code: 0, stdout: Contains("W208"), stderr: Empty },
        Expect { args: vec!["lint", &broken], code: 1, stdout: Empty, stderr: Contains("E102") },
        Expect { args: vec!["render", &qa, "-o", &svg_s], code: 0, stdout: Empty, stderr: Empty },
        Expect { args: vec!["render", &qa, "-o", &tex_s], code: 0, stdout: Empty, stderr: Empty },
        Expect { args: vec!["render", &qa, "-o", &svg_s, "--debug-layout"], code: 0, stdout: Contains("layer 0"), stderr: Empty },
        Expect { args: vec!["render", &broken, "-o", &refused_s], code: 1, stdout: Empty, stderr: Contains("E102") },
        Expect { args: vec!["render", &qa, "-o", &svg_s, "--format", "png"], code: 2, stdout: Empty, stderr: NonEmpty },
        Expect { args: vec!["render", &qa], code: 2, stdout: Empty, stderr: NonEmpty },
        Expect { args: vec!["fmt", &qa], code: 0, stdout: Contains("diagram \"QA system\""), stderr: Empty },
        Expect { args: vec!["fmt", "--check", &canonical], code: 0, stdout: Empty, stderr: Empty },
        Expect { args: vec!["fmt", "--check", &qa], code: 1, stdout: Empty, stderr: NonEmpty },
        Expect { args: vec!["fmt", &syntax], code: 1, stdout: Empty, stderr: Contains("E00") },
        Expect { args: vec!["fmt", &missing], code: 2, stdout: Empty, stderr: NonEmpty },
        Expect { args: vec!["symbols", "--dialect", "nn"], code: 0, stdout: NonEmpty, stderr: Empty },
        Expect { args: vec!["symbols", "--json"], code: 0, stdout: Json, stderr: Empty },
        Expect { args: vec!["symbols", "--tasks"], code: 0, stdout: Contains("POS"), stderr: Empty },
        Expect { args: vec!["symbols", "--dialect", "log"], code: 2, stdout: Empty, stderr: NonEmpty },
    ];
    for e in &table {
        let out = dial(&e.args);
        let ctx = || format!("dial {}", e.args.join(" "));
        ensure(out.status.code() == Some(e.code), || {
            format!("{}: exit {:?}, wanted {}; stderr {}", ctx(), out.status.code(), e.code, String::from_utf8_lossy(&out.stderr))
        })?;
        e.stdout.check("stdout", &out.stdout).map_err(|m| format!("{}: {m}", ctx()))?;
        e.stderr.check("stderr", &out.stderr).map_err(|m| format!("{}: {m}", ctx()))?;
    }
    let nn = dial(&["symbols", "--dialect", "nn"]);
    let lines = String::from_utf8_lossy(&nn.stdout).lines().count();
    ensure(lines == 13, || format!("`symbols --dialect nn` printed {lines} lines"))?;
    let json = dial(&["check", "--json", &broken]);
    let n = diagnostics_are_well_shaped(&json.stdout)?;
    ensure(n == 1, || format!("{n} JSON diagnostics for the mutation"))?;
    ensure(!refused.exists(), || "render wrote output despite errors".into())?;
    let rendered = fs::read_to_string(&svg).map_err(|e| e.to_string())?;
    roxmltree::Document::parse(&rendered).map_err(|e| format!("rendered SVG: {e}"))?;
    let tikz = fs::read_to_string(&tex).map_err(|e| e.to_string())?;
    ensure(tikz.contains("\\begin{tikzpicture}"), || "TeX output lacks a tikzpicture".into())?;
    Ok(format!("{} invocations across check, lint, render, fmt, symbols", table.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "registry counts", 1, registry_counts),
        (2, "corpus diagnostics", 5, corpus_diagnostics),
        (3, "type checking matches brute force", 30, typecheck_oracle),
        (4, "dimension calculus", 5, dimension_calculus),
        (5, "layout properties", 30, layout_properties),
        (6, "render determinism", 5, render_determinism),
        (7, "formatter round trip and fuzzing", 60, format_properties),
        (8, "lint triggers", 2, lint_fixtures),
        (9, "CLI contract", 5, cli_contract),
    ];
    let mut failed = 0;
    for (n, name, budget, check) in criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let secs = elapsed.as_secs_f64();
        match result {
            Ok(detail) if in_time => println!("PASS criterion {n}: {name}: {detail} [{secs:.2}s < {budget}s]"),
            Ok(detail) => {
                failed += 1;
                println!("FAIL criterion {n}: {name}: {detail} [{secs:.2}s exceeds {budget}s]");
            }
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {n}: {name}: {why} [{secs:.2}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
