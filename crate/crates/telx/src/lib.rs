//! The `telx` command-line front end.
//!
//! Every command reads its inputs from files in the text formats of
//! [`telx_core::text`] (TBoxes, ABoxes, grammars) and
//! [`telx_core::datalog`] (programs), delegates to one library operation,
//! and returns a [`CommandResult`]. With `--json` the whole result is
//! printed as a single JSON object; otherwise a human-readable rendering
//! goes to stdout and diagnostics to stderr.
//!
//! ```no_run
//! use clap::Parser;
//! let cli = telx::Cli::parse_from(["telx", "classify", "data/alice.tel"]);
//! let result = telx::run(&cli);
//! assert!(result.is_ok());
//! ```

#![warn(missing_docs)]

mod args;
mod commands;
pub mod json;

use std::path::{Path, PathBuf};

pub use args::{Cli, Command, Route, WindowArgs};
use serde_json::{json, Value};
use telx_core::taqa::TaqaError;
use telx_core::text::ParseError;
use telx_core::translate::TranslateError;

/// Whether a command succeeded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// The command ran to completion.
    Ok,
    /// The command failed; the payload describes the error.
    Error,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Error => "error",
        }
    }
}

/// The outcome of one command.
#[derive(Clone, Debug, PartialEq)]
pub struct CommandResult {
    /// Success or failure.
    pub status: Status,
    /// The machine-readable result.
    pub payload: Value,
    /// Warnings, one per incomplete or approximate part of the answer.
    pub diagnostics: Vec<String>,
    /// The human-readable rendering of the payload.
    pub text: String,
}

impl CommandResult {
    /// A successful result.
    pub fn ok(payload: Value, text: impl Into<String>) -> Self {
        CommandResult { status: Status::Ok, payload, diagnostics: Vec::new(), text: text.into() }
    }

    /// Adds a diagnostic.
    pub fn with_diagnostic(mut self, d: impl Into<String>) -> Self {
        self.diagnostics.push(d.into());
        self
    }

    /// A failed result describing `e`.
    pub fn error(e: &CliError) -> Self {
        CommandResult {
            status: Status::Error,
            payload: json!({ "error": { "kind": e.kind(), "message": e.to_string() } }),
            diagnostics: Vec::new(),
            text: format!("error: {e}"),
        }
    }

    /// Whether the status is `ok`.
    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    /// `{"status": …, "payload": …, "diagnostics": […]}`.
    pub fn to_json(&self) -> Value {
        json!({ "status": self.status.as_str(), "payload": self.payload, "diagnostics": self.diagnostics })
    }

    /// The process exit code: 0 on success, 1 on error.
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok => 0,
            Status::Error => 1,
        }
    }
}

/// Why a command failed.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// An input file could not be read.
    #[error("{}: {source}", path.display())]
    Io {
        /// The file.
        path: PathBuf,
        /// The underlying error.
        source: std::io::Error,
    },
    /// An input did not parse; the location is `line:column` within it.
    #[error("{origin}:{source}")]
    Parse {
        /// The file or argument that failed.
        origin: String,
        /// The parse error.
        source: ParseError,
    },
    /// A translation precondition failed.
    #[error(transparent)]
    Translate(#[from] TranslateError),
    /// A query-answering precondition failed.
    #[error(transparent)]
    Taqa(#[from] TaqaError),
    /// A grammar operation failed.
    #[error(transparent)]
    Grammar(#[from] telx_core::grammar::GrammarError),
    /// The arguments are inconsistent with the inputs.
    #[error("{0}")]
    Usage(String),
    /// The TBox violates the normal form.
    #[error("invalid TBox: {0}")]
    Invalid(String),
}

impl CliError {
    /// A short machine-readable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Translate(TranslateError::NotFutureFragment(_))
            | CliError::Taqa(TaqaError::NotFutureFragment(_)) => "not_future_fragment",
            CliError::Translate(TranslateError::NotLinearFragment(_)) => "not_linear_fragment",
            CliError::Translate(_) | CliError::Taqa(_) | CliError::Grammar(_) => "precondition",
            CliError::Usage(_) => "usage",
            CliError::Invalid(_) => "invalid",
        }
    }

    pub(crate) fn parse(origin: &Path, source: ParseError) -> Self {
        CliError::Parse { origin: origin.display().to_string(), source }
    }

    pub(crate) fn parse_arg(name: &str, source: ParseError) -> Self {
        CliError::Parse { origin: format!("--{name}"), source }
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> CommandResult {
    commands::dispatch(&cli.command).unwrap_or_else(|e| CommandResult::error(&e))
}

/// Renders a result the way the binary prints it: the JSON object (with a
/// trailing newline) for `--json`, otherwise the text. Diagnostics are
/// returned separately for stderr in text mode.
pub fn render(result: &CommandResult, as_json: bool) -> (String, Vec<String>) {
    if as_json {
        (format!("{}\n", serde_json::to_string_pretty(&result.to_json()).expect("values serialise")), Vec::new())
    } else {
        let mut out = result.text.clone();
        if !out.is_empty() && !out.ends_with('\n') {
            out.push('\n');
        }
        (out, result.diagnostics.iter().map(|d| format!("warning: {d}")).collect())
    }
}
