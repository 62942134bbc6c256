//! The `coalmon` command line.
//!
//! Every subcommand is a function returning an [`Outcome`] so that it can be
//! driven from tests without spawning a process. Exit codes: `0` success
//! (or safe), `1` negative answer (violation, not equivalent, not closed),
//! `2` usage or input error, `3` undecided within the budget.

use std::collections::{HashSet, VecDeque};
use std::fs;
use std::io::{self, BufRead};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bisim::bisimilar;
use crate::detector::FiniteDetector;
use crate::error::Error;
use crate::families::{check_universal_family, machine_to_detector, EilenbergMachine, FamilyCheck};
use crate::monitor::{monitor_lasso, monitor_lasso_handle, monitor_online, Feed, MonitorVerdict};
use crate::sequences::{Alphabet, FiniteWordSet, Word};
use crate::speclang::{compile, kernel_changes_language, parse_named};
use crate::systems::Step;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(message: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "coalmon",
    version,
    about = "Compile safety constraints to detectors and monitor traces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and compile a constraint, then report on the detector.
    Check { spec: PathBuf },
    /// Print the compiled detector as a transition table.
    Compile { spec: PathBuf },
    /// List the minimal violation words up to a length, shortest first.
    Words {
        spec: PathBuf,
        #[arg(long)]
        depth: usize,
    },
    /// Monitor a finite trace or an eventually periodic stream.
    Monitor {
        spec: PathBuf,
        /// Trace file of whitespace-separated tokens; `-` reads stdin.
        #[arg(long, conflicts_with = "lasso", required_unless_present = "lasso")]
        trace: Option<PathBuf>,
        /// Lasso literal `u ; v` standing for `u v v v ...`.
        #[arg(long)]
        lasso: Option<String>,
        /// Give up with `unknown` after this many symbols.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Decide whether two constraints have the same minimal violations.
    Equiv { left: PathBuf, right: PathBuf },
    /// Check that a family of finite sets is closed under the derivatives a
    /// universal detector needs.
    Family {
        /// Space-separated alphabet, e.g. "a b".
        #[arg(long)]
        alphabet: String,
        /// One file per set, one word per line.
        #[arg(required = true)]
        sets: Vec<PathBuf>,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdin: &mut dyn BufRead) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(cli.command, stdin),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                Outcome::ok(code, text)
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}

pub fn dispatch(command: Command, stdin: &mut dyn BufRead) -> Outcome {
    match command {
        Command::Check { spec } => cmd_check(&spec),
        Command::Compile { spec } => cmd_compile(&spec),
        Command::Words { spec, depth } => cmd_words(&spec, depth),
        Command::Monitor {
            spec,
            trace,
            lasso,
            budget,
            format,
        } => {
            let input = match (trace, lasso) {
                (_, Some(l)) => TraceInput::Lasso(l),
                (Some(p), None) if p.as_os_str() == "-" => TraceInput::Stdin,
                (Some(p), None) => TraceInput::File(p),
                (None, None) => return Outcome::error("one of --trace or --lasso is required"),
            };
            cmd_monitor(&spec, input, budget, format, stdin)
        }
        Command::Equiv { left, right } => cmd_equiv(&left, &right),
        Command::Family { alphabet, sets } => cmd_family(&alphabet, &sets),
    }
}

/// A constraint loaded from disk, compiled to a detector.
#[derive(Debug, Clone)]
pub struct LoadedSpec {
    pub name: String,
    pub detector: FiniteDetector,
    pub initial: usize,
    /// `None` for inputs that are already detectors or prefix-free machines.
    pub kernel_changed: Option<bool>,
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

/// Loads a DSL spec, a detector table or an Eilenberg machine, told apart
/// by the first keyword (`alphabet`, or `states` with or without an
/// `initial` line).
pub fn load_spec(path: &Path) -> Result<LoadedSpec, String> {
    let text = read(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "spec".into());
    let at = |e: Error| format!("{}: {e}", path.display());
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    if first.starts_with("states") {
        let is_machine = text.lines().any(|l| l.trim_start().starts_with("initial"));
        let (detector, initial) = if is_machine {
            let m = EilenbergMachine::from_text(&text).map_err(at)?;
            machine_to_detector(&m).map_err(at)?
        } else {
            (FiniteDetector::from_text(&text).map_err(at)?, 0)
        };
        return Ok(LoadedSpec {
            name,
            detector,
            initial,
            kernel_changed: None,
        });
    }
    let spec = parse_named(&name, &text).map_err(|e| format!("{}:{e}", path.display()))?;
    let (detector, initial) = compile(&spec).map_err(at)?;
    Ok(LoadedSpec {
        name,
        detector,
        initial,
        kernel_changed: Some(kernel_changes_language(&spec).map_err(at)?),
    })
}

pub fn cmd_check(spec: &Path) -> Outcome {
    let loaded = match load_spec(spec) {
        Ok(l) => l,
        Err(e) => return Outcome::error(e),
    };
    let kernel = match loaded.kernel_changed {
        Some(true) => "yes (non-minimal violations dropped)",
        Some(false) => "no",
        None => "n/a",
    };
    Outcome::ok(
        EXIT_OK,
        format!(
            "spec: {}\nalphabet: {}\nstates: {}\nkernel changed language: {kernel}\n",
            loaded.name,
            loaded.detector.alphabet(),
            loaded.detector.len()
        ),
    )
}

pub fn cmd_compile(spec: &Path) -> Outcome {
    match load_spec(spec) {
        Ok(l) => match l.detector.canonical(l.initial) {
            Ok((d, _)) => Outcome::ok(EXIT_OK, d.to_text()),
            Err(e) => Outcome::error(e),
        },
        Err(e) => Outcome::error(e),
    }
}

pub fn cmd_words(spec: &Path, depth: usize) -> Outcome {
    if depth == 0 {
        return Outcome::error("--depth must be at least 1");
    }
    let loaded = match load_spec(spec) {
        Ok(l) => l,
        Err(e) => return Outcome::error(e),
    };
    match loaded
        .detector
        .minimal_violation_words(loaded.initial, depth)
    {
        Ok(words) => {
            let alphabet = loaded.detector.alphabet();
            let mut out = String::new();
            for w in &words {
                out.push_str(&alphabet.format_word(w));
                out.push('\n');
            }
            Outcome::ok(EXIT_OK, out)
        }
        Err(e) => Outcome::error(e),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceInput {
    File(PathBuf),
    Stdin,
    Lasso(String),
}

/// The serialized verdict. Field order is part of the output contract.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictReport {
    pub verdict: &'static str,
    pub prefix_len: Option<usize>,
    pub ana_value: Option<usize>,
    pub bad_prefix: Option<Vec<String>>,
    pub steps_consumed: Option<usize>,
}

impl VerdictReport {
    pub fn from_verdict(v: &MonitorVerdict, alphabet: &Alphabet) -> Self {
        let empty = VerdictReport {
            verdict: "",
            prefix_len: None,
            ana_value: None,
            bad_prefix: None,
            steps_consumed: None,
        };
        match v {
            MonitorVerdict::Violation {
                prefix_len,
                bad_prefix,
                ana_value,
            } => VerdictReport {
                verdict: "violation",
                prefix_len: Some(*prefix_len),
                ana_value: Some(*ana_value),
                bad_prefix: Some(
                    bad_prefix
                        .iter()
                        .map(|&s| alphabet.name(s).to_string())
                        .collect(),
                ),
                ..empty
            },
            MonitorVerdict::CertifiedSafe => VerdictReport {
                verdict: "safe_certified",
                ..empty
            },
            MonitorVerdict::Unknown { steps_consumed } => VerdictReport {
                verdict: "unknown",
                steps_consumed: Some(*steps_consumed),
                ..empty
            },
        }
    }

    /// A finite trace read to the end without a violation.
    pub fn ok_so_far(steps_consumed: usize) -> Self {
        VerdictReport {
            verdict: "ok_so_far",
            prefix_len: None,
            ana_value: None,
            bad_prefix: None,
            steps_consumed: Some(steps_consumed),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            "violation" => EXIT_NEGATIVE,
            "unknown" => EXIT_UNKNOWN,
            _ => EXIT_OK,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    pub fn to_text(&self) -> String {
        match self.verdict {
            "violation" => format!(
                "violation after {} symbols (ana_value {}): {}",
                self.prefix_len.unwrap_or(0),
                self.ana_value.unwrap_or(0),
                self.bad_prefix.as_deref().unwrap_or_default().join(" ")
            ),
            "safe_certified" => "safe_certified".to_string(),
            tag => format!("{tag} after {} symbols", self.steps_consumed.unwrap_or(0)),
        }
    }
}

/// Feeds whitespace-separated tokens to the detector until a verdict, the
/// budget, or the end of input.
fn monitor_trace(
    loaded: &LoadedSpec,
    reader: &mut dyn BufRead,
    budget: Option<usize>,
) -> Result<VerdictReport, String> {
    let alphabet = loaded.detector.alphabet().clone();
    let handle = loaded
        .detector
        .clone()
        .into_handle(loaded.initial)
        .map_err(|e| e.to_string())?;
    let mut monitor = monitor_online(handle);
    let mut line = String::new();
    let mut line_no = 0;
    loop {
        line.clear();
        line_no += 1;
        if reader.read_line(&mut line).map_err(|e| e.to_string())? == 0 {
            return Ok(VerdictReport::ok_so_far(monitor.consumed().len()));
        }
        let content = line.split('#').next().unwrap_or("");
        for token in content.split_whitespace() {
            if budget.is_some_and(|b| monitor.consumed().len() >= b) {
                return Ok(VerdictReport::from_verdict(
                    &MonitorVerdict::Unknown {
                        steps_consumed: monitor.consumed().len(),
                    },
                    &alphabet,
                ));
            }
            let n = alphabet
                .symbol(token)
                .map_err(|e| format!("trace line {line_no}: {e}"))?;
            match monitor.feed(n).map_err(|e| e.to_string())? {
                Feed::Ok => {}
                Feed::Violation { .. } | Feed::Unknown { .. } => {
                    let v = monitor.verdict().expect("terminal feed");
                    return Ok(VerdictReport::from_verdict(&v, &alphabet));
                }
            }
        }
    }
}

fn monitor_lasso_input(
    loaded: &LoadedSpec,
    text: &str,
    budget: Option<usize>,
) -> Result<VerdictReport, String> {
    let alphabet = loaded.detector.alphabet();
    let lasso = alphabet.parse_lasso(text).map_err(|e| e.to_string())?;
    let verdict = match budget {
        None => monitor_lasso(&loaded.detector, loaded.initial, &lasso),
        Some(b) => loaded
            .detector
            .clone()
            .into_handle(loaded.initial)
            .and_then(|h| monitor_lasso_handle(&h, &lasso, b)),
    }
    .map_err(|e| e.to_string())?;
    Ok(VerdictReport::from_verdict(&verdict, alphabet))
}

pub fn cmd_monitor(
    spec: &Path,
    input: TraceInput,
    budget: Option<usize>,
    format: OutputFormat,
    stdin: &mut dyn BufRead,
) -> Outcome {
    if budget == Some(0) {
        return Outcome::error("--budget must be at least 1");
    }
    let loaded = match load_spec(spec) {
        Ok(l) => l,
        Err(e) => return Outcome::error(e),
    };
    let report = match input {
        TraceInput::Lasso(text) => monitor_lasso_input(&loaded, &text, budget),
        TraceInput::Stdin => monitor_trace(&loaded, stdin, budget),
        TraceInput::File(path) => match fs::File::open(&path) {
            Ok(f) => monitor_trace(&loaded, &mut io::BufReader::new(f), budget),
            Err(e) => Err(format!("{}: {e}", path.display())),
        },
    };
    match report {
        Ok(r) => {
            let body = match format {
                OutputFormat::Json => r.to_json(),
                OutputFormat::Text => r.to_text(),
            };
            Outcome::ok(r.exit_code(), body + "\n")
        }
        Err(e) => Outcome::error(e),
    }
}

/// A shortest word that is a minimal violation from exactly one of the two
/// states.
pub fn distinguishing_word(
    a: &FiniteDetector,
    x: usize,
    b: &FiniteDetector,
    y: usize,
) -> Option<Word> {
    let mut seen = HashSet::from([(x, y)]);
    let mut queue = VecDeque::from([(x, y, Word::empty())]);
    while let Some((p, q, w)) = queue.pop_front() {
        for n in a.alphabet().symbols() {
            match (a.step_unchecked(p, n), b.step_unchecked(q, n)) {
                (Step::Fault, Step::Fault) => {}
                (Step::Next(p2), Step::Next(q2)) => {
                    if seen.insert((p2, q2)) {
                        queue.push_back((p2, q2, w.appended(n)));
                    }
                }
                _ => return Some(w.appended(n)),
            }
        }
    }
    None
}

pub fn cmd_equiv(left: &Path, right: &Path) -> Outcome {
    let (l, r) = match (load_spec(left), load_spec(right)) {
        (Ok(l), Ok(r)) => (l, r),
        (Err(e), _) | (_, Err(e)) => return Outcome::error(e),
    };
    if let Err(e) = l.detector.alphabet().ensure_same(r.detector.alphabet()) {
        return Outcome::error(e);
    }
    match bisimilar(&l.detector, l.initial, &r.detector, r.initial) {
        Ok(true) => Outcome::ok(EXIT_OK, "equivalent\n".into()),
        Ok(false) => {
            let w = distinguishing_word(&l.detector, l.initial, &r.detector, r.initial)
                .expect("non-bisimilar states are told apart by some word");
            Outcome::ok(
                EXIT_NEGATIVE,
                format!(
                    "not equivalent: \"{}\" is a minimal violation of only one side\n",
                    l.detector.alphabet().format_word(&w)
                ),
            )
        }
        Err(e) => Outcome::error(e),
    }
}

/// A set file: one word per line, tokens separated by whitespace, `#`
/// comments. An empty file is the empty set.
pub fn parse_set_file(alphabet: &Alphabet, text: &str) -> Result<FiniteWordSet, String> {
    let mut set = FiniteWordSet::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let w = alphabet
            .parse_word(content)
            .map_err(|e| format!("line {}: {e}", i + 1))?;
        set.insert(w);
    }
    Ok(set)
}

pub fn cmd_family(alphabet: &str, sets: &[PathBuf]) -> Outcome {
    let alphabet = match Alphabet::new(alphabet.split_whitespace()) {
        Ok(a) => a,
        Err(e) => return Outcome::error(e),
    };
    let mut family = Vec::new();
    for path in sets {
        match read(path).and_then(|t| {
            parse_set_file(&alphabet, &t).map_err(|e| format!("{}: {e}", path.display()))
        }) {
            Ok(s) => family.push(s),
            Err(e) => return Outcome::error(e),
        }
    }
    match check_universal_family(&alphabet, &family) {
        Ok(FamilyCheck::Closed) => Outcome::ok(EXIT_OK, "closed\n".into()),
        Ok(FamilyCheck::NotClosed { set, symbol }) => Outcome::ok(
            EXIT_NEGATIVE,
            format!(
                "not closed: {} reads `{}` to {}, which is not in the family\n",
                alphabet.format_set(&set),
                alphabet.name(symbol),
                alphabet.format_set(&set.derivative(symbol))
            ),
        ),
        Err(e) => Outcome::error(e),
    }
}
