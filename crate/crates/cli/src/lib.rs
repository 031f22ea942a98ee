//! Command-line front end: JSON matrix files in, one JSON document out.

pub mod args;
mod commands;
pub mod error;
pub mod json;
pub mod matrix_file;

use std::ffi::OsString;
use std::io::Read;

use clap::Parser;
use serde::Serialize;
use serde_json::Value;

use crate::args::Cli;
use crate::commands::{echo, execute, Ctx, Success};
use crate::error::{CliError, EXIT_DOMAIN, EXIT_INPUT, EXIT_OK};

pub use matrix_file::{Kind, MatrixFile};

#[derive(Debug, Clone, Serialize)]
pub struct ResultReport {
    pub command: Value,
    pub inputs_digest: String,
    pub status: &'static str,
    pub results: Value,
    pub diagnostics: Value,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// What a run printed and its exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Output { code: EXIT_INPUT, stdout: String::new(), stderr: text }
            } else {
                Output { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    let mut ctx = Ctx::new(stdin, cli.tol_rank, cli.tol_psd);
    let command = echo(&cli.command);
    ctx.absorb_echo(&command);
    let outcome = execute(&cli.command, &mut ctx);
    let stderr: String = ctx.warnings.iter().map(|w| format!("warning: {w}\n")).collect();

    let (code, report) = match outcome {
        Ok(Success::File(file)) => {
            return Output { code: EXIT_OK, stdout: file.to_json() + "\n", stderr };
        }
        Ok(Success::Report { results, diagnostics, pass }) => (
            if pass { EXIT_OK } else { EXIT_DOMAIN },
            ResultReport {
                command,
                inputs_digest: ctx.digest(),
                status: if pass { "pass" } else { "fail" },
                results,
                diagnostics: Value::Object(diagnostics),
                warnings: ctx.warnings.clone(),
                error: None,
            },
        ),
        Err(e @ CliError::Domain(_)) => (
            e.exit_code(),
            ResultReport {
                command,
                inputs_digest: ctx.digest(),
                status: "fail",
                results: Value::Null,
                diagnostics: Value::Object(ctx.tolerances()),
                warnings: ctx.warnings.clone(),
                error: Some(e.to_string()),
            },
        ),
        Err(e) => {
            return Output { code: e.exit_code(), stdout: String::new(), stderr: format!("{stderr}error: {e}\n") };
        }
    };
    Output { code, stdout: json::to_string(&report) + "\n", stderr }
}
