//! The `qgas` command line.
//!
//! ```text
//! qgas run FILE [--format table|records] [--tol T] [--observer NAME]
//! qgas demo NAME [--format table|records] [--tol T] [--observer NAME]
//! qgas list-demos            (also: qgas demo list-demos)
//! ```
//!
//! Exit codes: 0 on success (apparent violations included), 1 on a parse or
//! runtime error, 2 when an `assert-closed` step fails.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::audit::DEFAULT_TOL;
use crate::demos;
use crate::protocol::{self, Execution, RunError};
use crate::report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_CLOSED: i32 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Records,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    Run(PathBuf),
    Demo(String),
    ListDemos,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliConfig {
    pub command: Command,
    pub format: Format,
    pub tol: f64,
    /// Report only this observer's views and verdicts.
    pub observer: Option<String>,
}

impl CliConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            format: Format::Table,
            tol: DEFAULT_TOL,
            observer: None,
        }
    }

    pub fn with_format(mut self, format: Format) -> Self {
        self.format = format;
        self
    }
}

/// What a command printed and how it ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn error(message: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "qgas", version, about = "Run and audit quantum gas protocols")]
struct Args {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, clap::Args)]
struct Flags {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Tolerance for cycle closure and heat signs.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Only report this observer.
    #[arg(long)]
    observer: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Run a protocol file.
    Run {
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run a bundled demo (`demo list-demos` lists them).
    Demo {
        name: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// List the bundled demos.
    ListDemos,
}

/// Parses command-line arguments (including the program name) into a
/// config, or the help/usage text clap would print.
pub fn parse_args<I, T>(args: I) -> Result<CliConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = Args::try_parse_from(args)?;
    let (command, flags) = match args.command {
        Sub::Run { file, flags } => (Command::Run(file), flags),
        Sub::Demo { name, flags } if name == "list-demos" => (Command::ListDemos, flags),
        Sub::Demo { name, flags } => (Command::Demo(name), flags),
        Sub::ListDemos => return Ok(CliConfig::new(Command::ListDemos)),
    };
    Ok(CliConfig {
        command,
        format: flags.format,
        tol: flags.tol,
        observer: flags.observer,
    })
}

fn list_demos() -> CliOutput {
    let mut stdout = String::new();
    for d in demos::DEMOS {
        stdout.push_str(d.name);
        stdout.push('\t');
        stdout.push_str(d.summary);
        stdout.push('\n');
    }
    CliOutput {
        code: EXIT_OK,
        stdout,
        stderr: String::new(),
    }
}

fn render(exec: &Execution, config: &CliConfig) -> Result<String, crate::Error> {
    let filter = config.observer.as_deref();
    match config.format {
        Format::Table => report::render_table(exec, filter),
        Format::Records => Ok(report::render_records(&report::records(exec, filter)?)),
    }
}

pub fn run_command(config: &CliConfig) -> CliOutput {
    if !(config.tol > 0.0 && config.tol.is_finite()) {
        return CliOutput::error(format!("--tol must be positive, got {}", config.tol));
    }
    let (origin, source) = match &config.command {
        Command::ListDemos => return list_demos(),
        Command::Demo(name) => match demos::find(name) {
            Some(d) => (format!("demo {name}"), d.source.to_string()),
            None => {
                return CliOutput::error(format!(
                    "unknown demo `{name}` (available: {})",
                    demos::names().join(", ")
                ))
            }
        },
        Command::Run(path) => match std::fs::read_to_string(path) {
            Ok(s) => (path.display().to_string(), s),
            Err(e) => return CliOutput::error(format!("cannot read {}: {e}", path.display())),
        },
    };
    let ast = match protocol::parse(&source) {
        Ok(ast) => ast,
        Err(e) => return CliOutput::error(format!("{origin}:{e}")),
    };
    if let Some(name) = &config.observer {
        let declared = ast
            .declarations
            .iter()
            .any(|d| matches!(&d.node, protocol::Decl::Observer { name: n, .. } if n == name));
        if !declared {
            return CliOutput::error(format!("{origin}: no observer named `{name}`"));
        }
    }
    match protocol::execute_with_tol(&ast, config.tol) {
        Ok(exec) => match render(&exec, config) {
            Ok(stdout) => CliOutput {
                code: EXIT_OK,
                stdout,
                stderr: String::new(),
            },
            Err(e) => CliOutput::error(format!("{origin}: {e}")),
        },
        Err(e @ RunError::NotClosed { .. }) => CliOutput {
            code: EXIT_NOT_CLOSED,
            stdout: String::new(),
            stderr: format!("assertion failed: {origin}: {e}\n"),
        },
        Err(e) => CliOutput::error(format!("{origin}: {e}")),
    }
}

/// Parses `args` and runs the command; clap's help and usage errors come
/// back as output too.
pub fn main_with_args<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match parse_args(args) {
        Ok(config) => run_command(&config),
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                CliOutput {
                    code: EXIT_ERROR,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CliOutput {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            }
        }
    }
}
