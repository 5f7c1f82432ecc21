//! The `gallina2scala` command-line driver.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::Parser;

use crate::analyzer::analyze;
use crate::ast::{Diagnostic, Phase, Severity};
use crate::codegen::{translate_with, Options};
use crate::emitter::render;
use crate::interpreter::lemma::{check_lemma_instances, lemma_samples, parse_lemma_form, LemmaOutcome, LemmaReport};
use crate::lexer::tokenize;
use crate::parser::parse_program;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTICS: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Upper bound on enumerated instances per lemma.
const MAX_LEMMA_INSTANCES: usize = 4_000_000;

/// Pseudo file name used for diagnostics about the arguments themselves.
pub const ARGS_FILE: &str = "<command line>";

#[derive(Parser, Debug)]
#[command(
    name = "gallina2scala",
    version,
    about = "Compile Gallina sources (.v) to Scala",
    arg_required_else_help = true
)]
struct Args {
    /// Gallina source files.
    #[arg(required = true, value_name = "FILE")]
    inputs: Vec<PathBuf>,

    /// Output path (single input only). Defaults to the input path with a .scala extension.
    #[arg(short, long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Name of the wrapping Scala object. Defaults to the input base name in UpperCamelCase.
    #[arg(long, value_name = "NAME")]
    object_name: Option<String>,

    /// Stop after analysis and write nothing.
    #[arg(long)]
    check: bool,

    /// Test every lemma on all values up to the given structural depth.
    #[arg(long, value_name = "DEPTH")]
    check_lemmas: Option<u32>,

    /// Keep lemmas as comments in the output (default).
    #[arg(long, overrides_with = "no_lemma_comments")]
    emit_lemma_comments: bool,

    /// Drop lemmas from the output.
    #[arg(long, overrides_with = "emit_lemma_comments")]
    no_lemma_comments: bool,
}

/// Terminal styling for the severity word.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Style {
    #[default]
    Plain,
    Ansi,
}

impl Style {
    /// ANSI colors when stderr is a terminal and `NO_COLOR` is unset or empty.
    pub fn detect() -> Style {
        use std::io::IsTerminal;
        let no_color = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty());
        if !no_color && std::io::stderr().is_terminal() {
            Style::Ansi
        } else {
            Style::Plain
        }
    }

    fn line(self, file: &str, d: &Diagnostic) -> String {
        let plain = d.render(file);
        if self == Style::Plain {
            return plain;
        }
        let code = match d.severity {
            Severity::Error => "\x1b[1;31m",
            Severity::Warning => "\x1b[1;33m",
        };
        let word = format!(": {}: ", d.severity);
        plain.replacen(&word, &format!(": {code}{}\x1b[0m: ", d.severity), 1)
    }
}

/// Runs the compiler with plain diagnostics. `args` excludes the program name.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_styled(args, stdout, stderr, Style::Plain)
}

pub fn run_styled<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write, style: Style) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let parsed = Args::try_parse_from(std::iter::once(OsString::from("gallina2scala")).chain(args.iter().cloned()));
    let args = match parsed {
        Ok(a) => a,
        Err(e) => return usage_error(&args, &e, stdout, stderr, style),
    };
    if args.out.is_some() && args.inputs.len() > 1 {
        let _ = writeln!(stderr, "{ARGS_FILE}: error: --out needs exactly one input file");
        return EXIT_USAGE;
    }
    let mut code = EXIT_OK;
    for input in &args.inputs {
        code = code.max(compile_file(&args, input, stdout, stderr, style));
    }
    code
}

fn usage_error(
    args: &[OsString],
    e: &clap::Error,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
    style: Style,
) -> i32 {
    match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
            let _ = write!(stdout, "{}", e.render());
            EXIT_OK
        }
        ErrorKind::UnknownArgument => {
            let flag = match e.get(ContextKind::InvalidArg) {
                Some(ContextValue::String(s)) => s.clone(),
                _ => String::from("?"),
            };
            let col = argument_column(args, &flag);
            let d = Diagnostic::error(Phase::Lex, crate::ast::Span::point(1, col), format!("unknown flag `{flag}`"));
            let _ = writeln!(stderr, "{}", style.line(ARGS_FILE, &d));
            let _ = writeln!(stderr, "{}", Args::command_usage());
            EXIT_USAGE
        }
        _ => {
            let _ = write!(stderr, "{}", e.render());
            EXIT_USAGE
        }
    }
}

impl Args {
    fn command_usage() -> String {
        use clap::CommandFactory;
        Args::command().render_usage().to_string()
    }
}

/// 1-based column of `flag` in the arguments joined by single spaces.
fn argument_column(args: &[OsString], flag: &str) -> u32 {
    let mut col = 1;
    for arg in args {
        let arg = arg.to_string_lossy();
        if arg == flag || arg.split('=').next() == Some(flag) {
            return col;
        }
        col += arg.chars().count() as u32 + 1;
    }
    1
}

/// `my_tree-2.v` → `MyTree2`
pub fn object_name_for(path: &Path) -> String {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut name: String = stem
        .split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| {
            let mut chars = w.chars();
            let first = chars.next().expect("split yields non-empty words");
            first.to_uppercase().chain(chars).collect::<String>()
        })
        .collect();
    if name.is_empty() {
        name.push_str("Main");
    }
    if name.starts_with(|c: char| c.is_ascii_digit()) {
        name.insert(0, '_');
    }
    name
}

fn report(file: &str, diagnostics: &[Diagnostic], stderr: &mut dyn Write, style: Style) -> i32 {
    let mut sorted: Vec<&Diagnostic> = diagnostics.iter().collect();
    sorted.sort_by_key(|d| d.span.start());
    for d in sorted {
        let _ = writeln!(stderr, "{}", style.line(file, d));
    }
    if crate::ast::has_errors(diagnostics) {
        EXIT_DIAGNOSTICS
    } else {
        EXIT_OK
    }
}

fn compile_file(args: &Args, input: &Path, stdout: &mut dyn Write, stderr: &mut dyn Write, style: Style) -> i32 {
    let file = input.display().to_string();
    let source = match fs::read_to_string(input) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(stderr, "{file}: error: cannot read input: {e}");
            return EXIT_USAGE;
        }
    };
    let tokens = match tokenize(&source) {
        Ok(t) => t,
        Err(diagnostics) => return report(&file, &diagnostics, stderr, style),
    };
    let parsed = parse_program(&tokens);
    let mut diagnostics = parsed.diagnostics.clone();
    if parsed.has_errors() {
        return report(&file, &diagnostics, stderr, style);
    }
    let program = parsed.program;
    let analyzed = match analyze(&program) {
        Ok(a) => a,
        Err(more) => {
            diagnostics.extend(more);
            return report(&file, &diagnostics, stderr, style);
        }
    };
    diagnostics.extend(analyzed.warnings.iter().cloned());

    if let Some(depth) = args.check_lemmas {
        for lemma in program.lemmas() {
            let report = match parse_lemma_form(&lemma.statement_text, &analyzed.symbols)
                .and_then(|form| lemma_samples(&form, &analyzed.symbols, depth, MAX_LEMMA_INSTANCES))
            {
                Ok(samples) => check_lemma_instances(&program, &analyzed.symbols, lemma, samples),
                Err(reason) => LemmaReport { name: lemma.name.clone(), outcome: LemmaOutcome::Untestable { reason } },
            };
            let _ = writeln!(stdout, "{file}: {report}");
            if report.failed() {
                diagnostics.push(Diagnostic::error(Phase::Analyze, lemma.span, format!("{report}")));
            }
        }
    }

    let code = report(&file, &diagnostics, stderr, style);
    if code != EXIT_OK || args.check {
        return code;
    }

    let wrapper = args.object_name.clone().unwrap_or_else(|| object_name_for(input));
    let options = Options { wrapper_name: wrapper, lemma_comments: !args.no_lemma_comments };
    let text = render(&translate_with(&program, &analyzed.symbols, &options));
    let out = args.out.clone().unwrap_or_else(|| input.with_extension("scala"));
    if let Err(e) = fs::write(&out, text) {
        let _ = writeln!(stderr, "{}: error: cannot write output: {e}", out.display());
        return EXIT_USAGE;
    }
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn no_arguments_is_usage() {
        let (code, out, err) = run_capture(&[]);
        assert_eq!(code, EXIT_USAGE);
        assert!(format!("{out}{err}").contains("Usage"));
    }

    #[test]
    fn unknown_flag_points_at_its_column() {
        let (code, _, err) = run_capture(&["a.v", "--frobnicate"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.starts_with("<command line>:1:5: error: unknown flag `--frobnicate`"), "{err}");
    }

    #[test]
    fn missing_input_is_io_error() {
        let (code, _, err) = run_capture(&["/nonexistent/x.v", "--check"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("cannot read input"));
    }

    #[test]
    fn object_names() {
        assert_eq!(object_name_for(Path::new("dir/tree.v")), "Tree");
        assert_eq!(object_name_for(Path::new("my_tree-2.v")), "MyTree2");
        assert_eq!(object_name_for(Path::new("2x.v")), "_2x");
        assert_eq!(object_name_for(Path::new("__.v")), "Main");
    }

    #[test]
    fn compiles_and_checks() {
        let dir = tempfile::tempdir().unwrap();
        let src = dir.path().join("nat_ops.v");
        fs::write(&src, "Definition pred (n : nat) : nat := n - 1.\n").unwrap();
        let src_str = src.to_str().unwrap();

        let (code, _, err) = run_capture(&[src_str, "--check"]);
        assert_eq!((code, err.as_str()), (EXIT_OK, ""));
        assert!(!dir.path().join("nat_ops.scala").exists());

        let (code, _, _) = run_capture(&[src_str]);
        assert_eq!(code, EXIT_OK);
        let text = fs::read_to_string(dir.path().join("nat_ops.scala")).unwrap();
        assert!(text.starts_with("object NatOps {\n"));
    }

    #[test]
    fn out_requires_single_input() {
        let (code, _, err) = run_capture(&["a.v", "b.v", "-o", "x.scala"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("exactly one input"));
    }

    #[test]
    fn ansi_style_wraps_severity_only() {
        let d = Diagnostic::error(Phase::Parse, crate::ast::Span::point(2, 3), "boom");
        assert_eq!(Style::Plain.line("f.v", &d), "f.v:2:3: error: boom");
        assert_eq!(Style::Ansi.line("f.v", &d), "f.v:2:3: \x1b[1;31merror\x1b[0m: boom");
    }
}
