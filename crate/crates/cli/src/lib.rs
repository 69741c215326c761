//! The `tg` command-line tool: parse let programs, elaborate them to term
//! graphs, and compare, compose, draw or typecheck them.

pub mod dot;
pub mod elaborate;
pub mod syntax;

use std::fmt::Write;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use termgraph::laws::{check_axioms, AxiomBounds, IsoChecker};
use thiserror::Error;

use crate::elaborate::{elaborate, elaborate_typed, ElabError, Elaborated};
use crate::syntax::{parse_program, parse_signatures, print_jungle, LabelDecl, ParseError};

#[derive(Debug, Parser)]
#[command(name = "tg", version, about = "Term graphs from let programs")]
pub struct Cli {
    /// Extra label signatures, in `label NAME : ...` form.
    #[arg(long = "sig", value_name = "FILE", global = true)]
    pub sig: Vec<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and elaborate a program.
    Check { file: PathBuf },
    /// Print a program's graph in DOT format.
    Dot { file: PathBuf },
    /// Compose two programs and print the result as a program.
    Compose {
        #[command(flatten)]
        mode: ComposeMode,
        a: PathBuf,
        b: PathBuf,
    },
    /// Exit 0 iff the two programs denote isomorphic graphs.
    Iso { a: PathBuf, b: PathBuf },
    /// Fuzz the monoidal and gs-monoidal equations.
    Axioms {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long = "max-inner", default_value_t = 4)]
        max_inner: usize,
    },
    /// Typecheck a program with typed inputs and labels.
    Typecheck { file: PathBuf },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ComposeMode {
    /// Feed the outputs of A into the inputs of B.
    #[arg(long)]
    pub seq: bool,
    /// Put A and B side by side.
    #[arg(long)]
    pub par: bool,
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}:{source}")]
    Elab { path: String, source: ElabError },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } => EXIT_USAGE,
            CliError::Elab { .. } | CliError::Failed(_) => EXIT_FAILED,
        }
    }
}

/// What a command printed and how it exits.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: u8,
}

pub fn run(cli: &Cli, color: bool) -> Outcome {
    let mut stdout = String::new();
    match execute(cli, &mut stdout) {
        Ok(code) => Outcome { stdout, stderr: String::new(), code },
        Err(e) => {
            let prefix = if color { "\x1b[1;31merror:\x1b[0m" } else { "error:" };
            Outcome { stdout, stderr: format!("{prefix} {e}\n"), code: e.exit_code() }
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load_sigs(paths: &[PathBuf]) -> Result<Vec<LabelDecl>, CliError> {
    let mut sigs = Vec::new();
    for path in paths {
        let text = read(path)?;
        sigs.extend(parse_signatures(&text).map_err(|source| CliError::Parse { path: path.display().to_string(), source })?);
    }
    Ok(sigs)
}

fn load(path: &Path, sigs: &[LabelDecl]) -> Result<Elaborated, CliError> {
    let text = read(path)?;
    let shown = path.display().to_string();
    let program = parse_program(&text).map_err(|source| CliError::Parse { path: shown.clone(), source })?;
    elaborate(&program, sigs).map_err(|source| CliError::Elab { path: shown, source })
}

fn execute(cli: &Cli, out: &mut String) -> Result<u8, CliError> {
    let sigs = load_sigs(&cli.sig)?;
    match &cli.command {
        Command::Check { file } => {
            let e = load(file, &sigs)?;
            let g = &e.jungle;
            writeln!(out, "{} -> {}, {} edges", g.input_arity(), g.output_arity(), g.edges().len()).unwrap();
            writeln!(out, "{}", e.strong).unwrap();
        }
        Command::Dot { file } => out.push_str(&dot::to_dot(&load(file, &sigs)?.jungle)),
        Command::Compose { mode, a, b } => {
            let (a, b) = (load(a, &sigs)?.jungle, load(b, &sigs)?.jungle);
            let g = if mode.seq { a.seq(&b).map_err(|e| CliError::Failed(e.to_string()))? } else { a.par(&b) };
            out.push_str(&print_jungle(&g).map_err(|e| CliError::Failed(e.to_string()))?);
        }
        Command::Iso { a, b } => {
            let (a, b) = (load(a, &sigs)?.jungle, load(b, &sigs)?.jungle);
            let found = IsoChecker::default().check(&a, &b).map_err(|e| CliError::Failed(e.to_string()))?;
            if found.is_none() {
                out.push_str("not isomorphic\n");
                return Ok(EXIT_FAILED);
            }
            out.push_str("isomorphic\n");
        }
        Command::Axioms { seed, count, max_inner } => {
            let report = check_axioms(*seed, *count, &AxiomBounds::with_max_inner(*max_inner));
            out.push_str(&report.table());
            if !report.is_ok() {
                for (eq, f) in report.equations.iter().flat_map(|e| e.failures.iter().map(move |f| (e.name, f))).take(5) {
                    writeln!(out, "{eq} case {}: {} vs {}", f.case, f.lhs, f.rhs).unwrap();
                }
                return Ok(EXIT_FAILED);
            }
        }
        Command::Typecheck { file } => {
            let text = read(file)?;
            let shown = file.display().to_string();
            let program = parse_program(&text).map_err(|source| CliError::Parse { path: shown.clone(), source })?;
            let g = elaborate_typed(&program, &sigs).map_err(|source| CliError::Elab { path: shown, source })?;
            let violations = g.typecheck();
            if !violations.is_empty() {
                for v in &violations {
                    writeln!(out, "{v}").unwrap();
                }
                return Ok(EXIT_FAILED);
            }
            writeln!(out, "ok: {}", g.cg_type()).unwrap();
        }
    }
    Ok(EXIT_OK)
}
