//! Corpus harness.
//!
//! A corpus root holds `pass/NAME.dial` and `fail/NAME.dial` sources, each
//! with a `NAME.expect` sidecar listing the diagnostics it must produce, one
//! `CODE LINE:COL` per line (`CODE -` when no position is known). Sources
//! that compile without errors also have golden renderings at
//! `golden/NAME.svg` and `golden/NAME.tex`.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use dial_core::layout::layout;
use dial_core::lint::lint;
use dial_core::pipeline::{compile, Compiled};
use dial_core::registry::{Dialect, Resolved};
use dial_core::render::{render_svg, render_tikz, RenderOptions};
use dial_core::{Code, Severity};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusCase {
    pub name: String,
    pub source: PathBuf,
    pub expect: PathBuf,
    /// Expected lines, verbatim from the sidecar.
    pub expected: Vec<String>,
    pub golden_svg: PathBuf,
    pub golden_tikz: PathBuf,
}

impl CorpusCase {
    fn expected_codes(&self, warning: bool) -> Vec<Code> {
        self.expected
            .iter()
            .filter_map(|l| l.split_whitespace().next().and_then(Code::parse))
            .filter(|c| (c.severity() == Severity::Warning) == warning)
            .collect()
    }

    pub fn expected_errors(&self) -> Vec<Code> {
        self.expected_codes(false)
    }

    pub fn expected_warnings(&self) -> Vec<Code> {
        self.expected_codes(true)
    }
}

/// Everything a source produces: diagnostic lines and, when it compiles
/// cleanly, both renderings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub lines: Vec<String>,
    pub svg: Option<String>,
    pub tikz: Option<String>,
}

/// Compiles, lints and renders one source.
pub fn evaluate(src: &str) -> Output {
    let compiled = compile(src);
    let mut diagnostics = compiled.diagnostics.clone();
    let mut out = Output {
        lines: Vec::new(),
        svg: None,
        tikz: None,
    };
    if let Some(typed) = compiled.clean() {
        let l = layout(typed);
        diagnostics.extend(lint(typed, &l));
        let opts = RenderOptions::default();
        out.svg = render_svg(typed, &l, &opts).ok();
        out.tikz = render_tikz(typed, &l, &opts).ok();
    }
    out.lines = diagnostics.iter().map(|d| expect_line(&compiled, d)).collect();
    out
}

fn expect_line(c: &Compiled, d: &dial_core::Diagnostic) -> String {
    match c.locate(d) {
        Some(s) => format!("{} {}:{}", d.code, s.line, s.col),
        None => format!("{} -", d.code),
    }
}

/// Finds every case under `root`, sorted by directory then name.
pub fn load_cases(root: &Path) -> io::Result<Vec<CorpusCase>> {
    let mut cases = Vec::new();
    for dir in ["pass", "fail"] {
        let mut sources: Vec<PathBuf> = fs::read_dir(root.join(dir))?
            .map(|e| e.map(|e| e.path()))
            .collect::<io::Result<_>>()?;
        sources.retain(|p| p.extension().is_some_and(|e| e == "dial"));
        sources.sort();
        for source in sources {
            let name = source.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let expect = source.with_extension("expect");
            let expected = match fs::read_to_string(&expect) {
                Ok(s) => s.lines().map(str::to_owned).collect(),
                Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
                Err(e) => return Err(e),
            };
            cases.push(CorpusCase {
                golden_svg: root.join("golden").join(format!("{name}.svg")),
                golden_tikz: root.join("golden").join(format!("{name}.tex")),
                name,
                source,
                expect,
                expected,
            });
        }
    }
    Ok(cases)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseOutcome {
    pub name: String,
    pub problems: Vec<String>,
}

impl CaseOutcome {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

/// Runs one case. With `bless`, the sidecar and goldens are rewritten from
/// the current output instead of compared.
pub fn run_case(case: &CorpusCase, bless: bool) -> io::Result<CaseOutcome> {
    let src = fs::read_to_string(&case.source)?;
    let out = evaluate(&src);
    let mut problems = Vec::new();
    if bless {
        let mut text = out.lines.join("\n");
        if !text.is_empty() {
            text.push('\n');
        }
        fs::write(&case.expect, text)?;
        if let (Some(svg), Some(tikz)) = (&out.svg, &out.tikz) {
            if let Some(dir) = case.golden_svg.parent() {
                fs::create_dir_all(dir)?;
            }
            fs::write(&case.golden_svg, svg)?;
            fs::write(&case.golden_tikz, tikz)?;
        }
    } else {
        if !case.expect.exists() {
            problems.push(format!("missing {}", case.expect.display()));
        } else if out.lines != case.expected {
            problems.push(format!(
                "diagnostics differ: expected [{}], got [{}]",
                case.expected.join(", "),
                out.lines.join(", ")
            ));
        }
        for (golden, actual) in [(&case.golden_svg, &out.svg), (&case.golden_tikz, &out.tikz)] {
            let Some(actual) = actual else { continue };
            match fs::read(golden) {
                Ok(bytes) if bytes == actual.as_bytes() => {}
                Ok(_) => problems.push(format!("{} differs from the rendering", golden.display())),
                Err(_) => problems.push(format!("missing {}", golden.display())),
            }
        }
    }
    Ok(CaseOutcome {
        name: case.name.clone(),
        problems,
    })
}

/// Codes exercised by the corpus, split by dialect. Sys counts task
/// signatures and sys symbols (flow kinds included); nn counts nn symbols.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Coverage {
    pub sys: BTreeSet<String>,
    pub nn: BTreeSet<String>,
}

impl Coverage {
    /// Adds the resolved codes used by one source. Sources that fail to
    /// type-check contribute nothing.
    pub fn add_source(&mut self, src: &str) {
        let compiled = compile(src);
        let Some(typed) = compiled.clean() else { return };
        let d = &typed.diagram;
        let registry = d.registry();
        let codes = d
            .nodes
            .iter()
            .map(|n| n.code.as_str())
            .chain(d.edges.iter().filter_map(|e| e.flow_kind.symbol_code()));
        for code in codes {
            if registry.is_extension(code) {
                continue;
            }
            match registry.resolve(code, &d.dialects) {
                Some(Resolved::Task(_)) => {
                    self.sys.insert(code.to_string());
                }
                Some(Resolved::Symbol(s)) => {
                    let set = if s.dialect == Dialect::Nn { &mut self.nn } else { &mut self.sys };
                    set.insert(code.to_string());
                }
                None => {}
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusReport {
    pub outcomes: Vec<CaseOutcome>,
    /// Coverage over the `pass` sources.
    pub coverage: Coverage,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(CaseOutcome::passed)
    }
}

impl fmt::Display for CorpusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            if o.passed() {
                writeln!(f, "ok   {}", o.name)?;
            } else {
                writeln!(f, "FAIL {}", o.name)?;
                for p in &o.problems {
                    writeln!(f, "     {p}")?;
                }
            }
        }
        write!(
            f,
            "coverage: {} sys, {} nn",
            self.coverage.sys.len(),
            self.coverage.nn.len()
        )
    }
}

/// Runs every case under `root`.
pub fn corpus_suite(root: &Path, bless: bool) -> io::Result<CorpusReport> {
    let cases = load_cases(root)?;
    let mut coverage = Coverage::default();
    let mut outcomes = Vec::with_capacity(cases.len());
    for case in &cases {
        if case.source.parent().and_then(Path::file_name).is_some_and(|d| d == "pass") {
            coverage.add_source(&fs::read_to_string(&case.source)?);
        }
        outcomes.push(run_case(case, bless)?);
    }
    Ok(CorpusReport { outcomes, coverage })
}

/// Default corpus location within this workspace.
pub fn default_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}
