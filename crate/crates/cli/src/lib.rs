//! The `dial` command-line front end.
//!
//! [`run`] takes the argument vector and output streams and returns the
//! process exit code: 0 on success, 1 when diagnostics of severity error
//! were reported (or warnings under `--deny warnings`), 2 on usage or I/O
//! failure.

mod reference;

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::thread;

use clap::{Parser, Subcommand, ValueEnum};
use dial_core::diag::{Code, Diagnostic, Severity, Span};
use dial_core::layout::{debug_dump, layout};
use dial_core::lint::{lint_allowing, RULES};
use dial_core::parser::format_source;
use dial_core::pipeline::{compile, Compiled};
use dial_core::registry::{all_symbols, list_symbols, signatures};
use dial_core::render::{render_svg, render_tikz, RenderOptions};
use serde_json::json;

pub use reference::reference_markdown;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTICS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dial", version, about = "Compiler for DIAL architecture diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Svg,
    Tikz,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse, validate and type-check sources.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Print diagnostics as one JSON array on stdout.
        #[arg(long)]
        json: bool,
    },
    /// Check sources, then run the style rules.
    Lint {
        #[arg(required_unless_present = "list")]
        files: Vec<PathBuf>,
        /// Treat warnings as failures.
        #[arg(long, value_name = "LEVEL", value_parser = ["warnings"])]
        deny: Option<String>,
        /// Disable one rule; may be repeated.
        #[arg(long, value_name = "CODE")]
        allow: Vec<String>,
        /// List the rules and exit.
        #[arg(long)]
        list: bool,
        #[arg(long)]
        json: bool,
    },
    /// Compile one source and write an SVG or TikZ drawing.
    Render {
        file: PathBuf,
        #[arg(short, long, value_name = "OUT")]
        output: PathBuf,
        /// Output format; defaults to tikz for `.tex` outputs, svg otherwise.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Print layers and per-layer orders on stdout.
        #[arg(long)]
        debug_layout: bool,
    },
    /// Print a source in canonical formatting.
    Fmt {
        file: PathBuf,
        /// Rewrite the file in place.
        #[arg(long, conflicts_with = "check")]
        write: bool,
        /// Exit with 1 if the file is not canonically formatted.
        #[arg(long)]
        check: bool,
    },
    /// List registered symbols and task signatures.
    Symbols {
        #[arg(long, value_parser = ["sys", "nn"])]
        dialect: Option<String>,
        #[arg(long)]
        json: bool,
        /// List task signatures instead of symbols.
        #[arg(long, conflicts_with = "reference")]
        tasks: bool,
        /// Print the full Markdown reference.
        #[arg(long)]
        reference: bool,
    },
}

/// Whether colored output is allowed: a terminal, and `NO_COLOR` unset or
/// empty.
pub fn color_enabled(is_terminal: bool) -> bool {
    is_terminal && std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty())
}

struct Report {
    path: String,
    result: Result<Vec<(Diagnostic, Option<Span>)>, String>,
}

impl Report {
    fn diagnostics(&self) -> &[(Diagnostic, Option<Span>)] {
        self.result.as_deref().unwrap_or_default()
    }
}

fn located(c: &Compiled, diags: Vec<Diagnostic>) -> Vec<(Diagnostic, Option<Span>)> {
    diags
        .into_iter()
        .map(|d| {
            let span = c.locate(&d);
            (d, span)
        })
        .collect()
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

/// Runs `job` on every file concurrently; reports come back in input order.
fn per_file<F>(files: &[PathBuf], job: F) -> Vec<Report>
where
    F: Fn(&str) -> Vec<(Diagnostic, Option<Span>)> + Sync,
{
    thread::scope(|s| {
        let handles: Vec<_> = files
            .iter()
            .map(|p| {
                let job = &job;
                s.spawn(move || Report {
                    path: p.display().to_string(),
                    result: read(p).map(|src| job(&src)),
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}

fn paint(s: &str, sev: Severity, color: bool) -> String {
    if !color {
        return s.to_string();
    }
    let code = match sev {
        Severity::Error => "31",
        Severity::Warning => "33",
    };
    format!("\x1b[1;{code}m{s}\x1b[0m")
}

fn human(path: &str, d: &Diagnostic, span: Option<Span>, color: bool) -> String {
    let head = paint(&format!("{}[{}]", d.severity, d.code), d.severity, color);
    match (span, &d.location) {
        (Some(s), _) => format!("{path}:{}:{}: {head}: {}", s.line, s.col, d.message),
        (None, loc) => format!("{path}: {head}: {loc}: {}", d.message),
    }
}

fn json_diag(path: &str, d: &Diagnostic, span: Option<Span>) -> serde_json::Value {
    json!({
        "code": d.code.as_str(),
        "severity": d.severity.to_string(),
        "file": path,
        "line": span.map(|s| s.line),
        "col": span.map(|s| s.col),
        "message": d.message,
    })
}

/// Prints reports and returns the exit code they imply.
fn emit(reports: &[Report], json: bool, deny_warnings: bool, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32 {
    let mut code = EXIT_OK;
    let mut all = Vec::new();
    for r in reports {
        match &r.result {
            Err(msg) => {
                let _ = writeln!(err, "dial: {msg}");
                code = EXIT_USAGE;
            }
            Ok(diags) => {
                for (d, span) in diags {
                    if json {
                        all.push(json_diag(&r.path, d, *span));
                    } else {
                        let _ = writeln!(err, "{}", human(&r.path, d, *span, color));
                    }
                }
            }
        }
    }
    if json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&all).expect("json values serialize"));
    }
    if code == EXIT_OK {
        let failing = reports.iter().flat_map(Report::diagnostics).any(|(d, _)| {
            d.severity == Severity::Error || (deny_warnings && d.severity == Severity::Warning)
        });
        if failing {
            code = EXIT_DIAGNOSTICS;
        }
    }
    code
}

/// Entry point shared by the binary and the tests.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = if color { e.render().ansi().to_string() } else { e.render().to_string() };
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    match cli.command {
        Command::Check { files, json } => {
            let reports = per_file(&files, |src| {
                let c = compile(src);
                let diags = c.diagnostics.clone();
                located(&c, diags)
            });
            emit(&reports, json, false, out, err, color)
        }
        Command::Lint {
            files,
            deny,
            allow,
            list,
            json,
        } => {
            if list {
                for r in &RULES {
                    let _ = writeln!(out, "{}  {}", r.code, r.description);
                }
                return EXIT_OK;
            }
            let mut allowed = BTreeSet::new();
            for a in &allow {
                match Code::parse(a).filter(|c| RULES.iter().any(|r| r.code == *c)) {
                    Some(c) => {
                        allowed.insert(c);
                    }
                    None => {
                        let _ = writeln!(err, "dial: `{a}` is not a lint rule; see `dial lint --list`");
                        return EXIT_USAGE;
                    }
                }
            }
            let reports = per_file(&files, |src| {
                let c = compile(src);
                let mut diags = c.diagnostics.clone();
                if let Some(typed) = c.clean() {
                    diags.extend(lint_allowing(typed, &layout(typed), &allowed));
                }
                located(&c, diags)
            });
            emit(&reports, json, deny.is_some(), out, err, color)
        }
        Command::Render {
            file,
            output,
            format,
            debug_layout,
        } => render(&file, &output, format, debug_layout, out, err, color),
        Command::Fmt { file, write, check } => fmt(&file, write, check, out, err, color),
        Command::Symbols {
            dialect,
            json,
            tasks,
            reference,
        } => {
            symbols(dialect.as_deref(), json, tasks, reference, out);
            EXIT_OK
        }
    }
}

fn render(
    file: &Path,
    output: &Path,
    format: Option<Format>,
    debug_layout: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
    color: bool,
) -> i32 {
    let path = file.display().to_string();
    let src = match read(file) {
        Ok(s) => s,
        Err(msg) => {
            let _ = writeln!(err, "dial: {msg}");
            return EXIT_USAGE;
        }
    };
    let c = compile(&src);
    let located = located(&c, c.diagnostics.clone());
    for (d, span) in &located {
        let _ = writeln!(err, "{}", human(&path, d, *span, color));
    }
    let Some(typed) = c.clean() else {
        let _ = writeln!(err, "dial: not rendering {path}: it has errors");
        return EXIT_DIAGNOSTICS;
    };
    let l = layout(typed);
    if debug_layout {
        let _ = write!(out, "{}", debug_dump(&typed.diagram, &l));
    }
    let format = format.unwrap_or_else(|| match output.extension().and_then(|e| e.to_str()) {
        Some("tex") => Format::Tikz,
        _ => Format::Svg,
    });
    let opts = RenderOptions::default();
    let doc = match format {
        Format::Svg => render_svg(typed, &l, &opts),
        Format::Tikz => render_tikz(typed, &l, &opts),
    };
    match doc {
        Ok(text) => match fs::write(output, text) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "dial: cannot write {}: {e}", output.display());
                EXIT_USAGE
            }
        },
        Err(d) => {
            let _ = writeln!(err, "{}", human(&path, &d, None, color));
            EXIT_DIAGNOSTICS
        }
    }
}

fn fmt(file: &Path, write: bool, check: bool, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32 {
    let path = file.display().to_string();
    let src = match read(file) {
        Ok(s) => s,
        Err(msg) => {
            let _ = writeln!(err, "dial: {msg}");
            return EXIT_USAGE;
        }
    };
    let formatted = match format_source(&src) {
        Ok(f) => f,
        Err(diags) => {
            for d in &diags {
                let span = match d.location {
                    dial_core::Location::Source(s) => Some(s),
                    _ => None,
                };
                let _ = writeln!(err, "{}", human(&path, d, span, color));
            }
            return EXIT_DIAGNOSTICS;
        }
    };
    if check {
        if formatted != src {
            let _ = writeln!(err, "dial: {path} is not canonically formatted");
            return EXIT_DIAGNOSTICS;
        }
        return EXIT_OK;
    }
    if write {
        if formatted != src {
            if let Err(e) = fs::write(file, &formatted) {
                let _ = writeln!(err, "dial: cannot write {path}: {e}");
                return EXIT_USAGE;
            }
        }
        return EXIT_OK;
    }
    let _ = out.write_all(formatted.as_bytes());
    EXIT_OK
}

fn symbols(dialect: Option<&str>, json: bool, tasks: bool, reference: bool, out: &mut dyn Write) {
    if reference {
        let _ = out.write_all(reference_markdown().as_bytes());
        return;
    }
    if tasks {
        let sigs: Vec<_> = signatures()
            .iter()
            .filter(|s| dialect.is_none_or(|d| s.dialect.as_str() == d))
            .collect();
        if json {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&sigs).expect("signatures serialize"));
        } else {
            for s in sigs {
                let dom: Vec<String> = s.domain.iter().map(ToString::to_string).collect();
                let ran: Vec<String> = s.range.iter().map(ToString::to_string).collect();
                let _ = writeln!(out, "{:<10} {} -> {}  {}", s.task_code, dom.join(" x "), ran.join(" x "), s.name);
            }
        }
        return;
    }
    let syms: Vec<_> = match dialect {
        Some(d) => list_symbols(d).expect("dialect validated by the argument parser"),
        None => all_symbols().iter().collect(),
    };
    if json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&syms).expect("symbols serialize"));
    } else {
        for s in syms {
            let _ = writeln!(out, "{:<15} {:<3} {:<15} {}", s.code, s.dialect, s.glyph_id, s.name);
        }
    }
}
