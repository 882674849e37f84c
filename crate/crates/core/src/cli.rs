//! Command-line front end.
//!
//! Exit codes: 0 success, 1 unsatisfiable, 2 input errors (diagnostics,
//! depth limit, unreadable files, bad order file), 3 usage errors.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Deserialize;

use crate::adl::{
    has_errors, merge_libraries, parse_library_file, parse_problem_file, validate, ComponentLibrary,
    Diagnostic, ProblemSpec,
};
use crate::csp::{project, Solver, SolverOptions};
use crate::emit::{emit_minion, emit_report};
use crate::encoder::{encode, set_search_order_by_name, ConfigCsp, DEFAULT_DEPTH_LIMIT};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Check,
    Solve,
    All,
    EmitMinion,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Check => "check",
            Mode::Solve => "solve",
            Mode::All => "all",
            Mode::EmitMinion => "emit-minion",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub mode: Mode,
    pub libraries: Vec<PathBuf>,
    pub problem: PathBuf,
    pub depth: usize,
    pub limit: Option<usize>,
    pub order: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub dynamic_order: bool,
}

#[derive(Parser, Debug)]
#[command(name = "confweave", version, about = "Configure constraint solvers from a component library")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and validate the inputs, then build the model.
    Check(Args),
    /// Print the first configuration as a JSON report.
    Solve(Args),
    /// Print every configuration, in search order.
    All(Args),
    /// Print the model in Minion 3 format.
    EmitMinion(Args),
}

#[derive(clap::Args, Debug)]
struct Args {
    /// Component library file; repeat to concatenate libraries.
    #[arg(long = "library", value_name = "PATH", required = true)]
    libraries: Vec<PathBuf>,
    #[arg(long, value_name = "PATH")]
    problem: PathBuf,
    /// Maximum requirement nesting depth.
    #[arg(long, default_value_t = DEFAULT_DEPTH_LIMIT as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    depth: u64,
    /// Stop after this many solutions.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    limit: Option<u64>,
    /// JSON file: {"vars": [path...], "values": {path: [implName...]}}
    #[arg(long, value_name = "PATH")]
    order: Option<PathBuf>,
    /// Write results here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Branch on the smallest domain first.
    #[arg(long)]
    dynamic_order: bool,
}

impl RunConfig {
    pub fn from_args<I, T>(argv: I) -> Result<RunConfig, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(argv)?;
        let (mode, args) = match cli.command {
            Command::Check(a) => (Mode::Check, a),
            Command::Solve(a) => (Mode::Solve, a),
            Command::All(a) => (Mode::All, a),
            Command::EmitMinion(a) => (Mode::EmitMinion, a),
        };
        Ok(RunConfig {
            mode,
            libraries: args.libraries,
            problem: args.problem,
            depth: args.depth as usize,
            limit: args.limit.map(|l| l as usize),
            order: args.order,
            out: args.out,
            dynamic_order: args.dynamic_order,
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OrderFile {
    #[serde(default)]
    vars: Vec<String>,
    #[serde(default)]
    values: BTreeMap<String, Vec<String>>,
}

/// A failure that ends the run with a message on stderr.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: error: cannot read file: {}", path.display(), e)))
}

fn report(stderr: &mut dyn Write, diags: &[Diagnostic]) {
    for d in diags {
        let _ = writeln!(stderr, "{}", d);
    }
}

fn load(config: &RunConfig, stderr: &mut dyn Write) -> Result<(ComponentLibrary, ProblemSpec), Failure> {
    let mut diags = Vec::new();
    let mut libraries = Vec::new();
    for path in &config.libraries {
        let text = read(path)?;
        let (lib, mut d) = parse_library_file(&path.display().to_string(), &text);
        diags.append(&mut d);
        libraries.push(lib);
    }
    let (library, mut d) = merge_libraries(libraries);
    diags.append(&mut d);
    let text = read(&config.problem)?;
    let (problem, mut d) = parse_problem_file(&config.problem.display().to_string(), &text);
    diags.append(&mut d);
    if !has_errors(&diags) {
        diags.extend(validate(&library, &problem));
    }
    report(stderr, &diags);
    if has_errors(&diags) {
        // the diagnostics already went to stderr
        return Err(Failure::input(""));
    }
    Ok((library, problem))
}

fn build(config: &RunConfig, library: &ComponentLibrary, problem: &ProblemSpec) -> Result<ConfigCsp, Failure> {
    let csp = encode(library, problem, config.depth).map_err(|e| Failure::input(format!("error: {}", e)))?;
    let Some(path) = &config.order else {
        return Ok(csp);
    };
    let text = read(path)?;
    let order: OrderFile = serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: error: invalid order file: {}", path.display(), e)))?;
    set_search_order_by_name(&csp, &order.vars, &order.values)
        .map_err(|e| Failure::input(format!("{}: error: {}", path.display(), e)))
}

fn emit(config: &RunConfig, text: &str, stdout: &mut dyn Write) -> Result<(), Failure> {
    match &config.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::input(format!("{}: error: cannot write file: {}", path.display(), e))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Failure::input(format!("error: cannot write output: {}", e))),
    }
}

fn execute(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let (library, problem) = load(config, stderr)?;
    let csp = build(config, &library, &problem)?;
    match config.mode {
        Mode::Check => Ok(EXIT_OK),
        Mode::EmitMinion => {
            let text = emit_minion(&csp).map_err(|e| Failure::input(format!("error: {}", e)))?;
            emit(config, &text, stdout)?;
            Ok(EXIT_OK)
        }
        Mode::Solve | Mode::All => {
            let limit = match config.mode {
                Mode::Solve => Some(1),
                _ => config.limit,
            };
            let mut solver = Solver::new(
                &csp,
                SolverOptions {
                    dynamic_order: config.dynamic_order,
                },
            );
            let root = solver.root_propagate();
            let configurations: Vec<_> = solver
                .solve(limit)
                .iter()
                .map(|a| project(&csp, a))
                .collect();
            emit(config, &emit_report(&configurations), stdout)?;
            if !configurations.is_empty() {
                return Ok(EXIT_OK);
            }
            match root {
                Err(conflict) => {
                    let _ = writeln!(stderr, "unsatisfiable: {}", conflict.describe(&csp));
                }
                Ok(()) => {
                    let _ = writeln!(stderr, "unsatisfiable");
                }
            }
            Ok(EXIT_UNSAT)
        }
    }
}

/// Runs one command; `argv[0]` is the program name.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::from_args(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&config, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            if !f.message.is_empty() {
                let _ = writeln!(stderr, "{}", f.message);
            }
            f.code
        }
    }
}
