//! The `tproxy` command line and the per-function wrapping experiment.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, ErrorKind, Result};
use crate::instrument::{ReportFormat, ReportJson};
use crate::interpreter::{parse_program, Outcome, Program};
use crate::patterns::{Membrane, MembraneOptions};
use crate::runtime::Runtime;
use crate::value::Value;

/// Exit status for a clean run.
pub const EXIT_OK: i32 = 0;
/// Exit status when the script raised an uncaught error.
pub const EXIT_RUNTIME: i32 = 1;
/// Exit status for usage, parse and configuration errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "tproxy",
    version,
    about = "Run scripts with transparent or opaque proxies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a script.
    Run(RunArgs),
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// Script to run.
    file: PathBuf,
    /// Count equality comparisons by proxy involvement.
    #[arg(long)]
    instrument: bool,
    /// Report format when instrumenting.
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    report: ReportFormat,
    /// Route object arguments of this top-level function through a membrane.
    #[arg(long = "wrap-function", value_name = "NAME")]
    wrap_function: Vec<String>,
    /// Use opaque instead of transparent membranes when wrapping.
    #[arg(long)]
    wrap_opaque: bool,
    /// Print the wrappable top-level functions and exit.
    #[arg(long)]
    list_functions: bool,
    /// Run a baseline plus one variant per top-level function and print all reports as JSON.
    #[arg(long)]
    enumerate_variants: bool,
}

/// Everything needed to perform one `run`.
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub script_path: PathBuf,
    pub instrument: bool,
    pub report_format: ReportFormat,
    pub wrap_functions: Vec<String>,
    pub wrap_opaque: bool,
    pub list_functions: bool,
    pub enumerate_variants: bool,
}

impl From<RunArgs> for RunConfig {
    fn from(a: RunArgs) -> Self {
        RunConfig {
            script_path: a.file,
            instrument: a.instrument,
            report_format: a.report,
            wrap_functions: a.wrap_function,
            wrap_opaque: a.wrap_opaque,
            list_functions: a.list_functions,
            enumerate_variants: a.enumerate_variants,
        }
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit status.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let Command::Run(args) = cli.command;
    run(&args.into(), out, err)
}

/// Executes a parsed configuration.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let source = match std::fs::read_to_string(&config.script_path) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(
                err,
                "error: cannot read {}: {e}",
                config.script_path.display()
            );
            return EXIT_USAGE;
        }
    };
    let program = match parse_program(&source) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return EXIT_USAGE;
        }
    };

    if config.list_functions {
        for name in program.top_level_functions() {
            let _ = writeln!(out, "{name}");
        }
        return EXIT_OK;
    }

    if config.enumerate_variants {
        let variants = enumerate_variants(&program, config.wrap_opaque);
        let json: Vec<VariantJson> = variants.iter().map(VariantJson::from).collect();
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&json).expect("variants serialize")
        );
        return EXIT_OK;
    }

    let mut rt = Runtime::new();
    if config.instrument {
        rt.enable_instrumentation(false);
    }
    rt.declare_functions(&program);
    for name in &config.wrap_functions {
        if let Err(e) = wrap_function_arguments(&mut rt, name, config.wrap_opaque) {
            let _ = writeln!(err, "{e}");
            return EXIT_USAGE;
        }
    }
    let result = rt.execute(&program);
    let outcome = rt.finish(result);

    for line in &outcome.output {
        let _ = writeln!(out, "{line}");
    }
    if let Some(report) = &outcome.report {
        let _ = writeln!(out, "--- report ---");
        let _ = writeln!(out, "{}", report.emit(config.report_format));
    }
    match outcome.error {
        Some(e) => {
            let _ = writeln!(err, "{e}");
            EXIT_RUNTIME
        }
        None => EXIT_OK,
    }
}

/// Rebinds the global function `name` to a wrapper that sends every object
/// argument, and the return value, through one identity-preserving membrane
/// created here and shared by all calls.
pub fn wrap_function_arguments(rt: &mut Runtime, name: &str, opaque: bool) -> Result<()> {
    let original = match rt.global(name) {
        Some(v @ Value::Object(r)) if rt.heap.is_callable(r) => v,
        Some(_) => {
            return Err(Error::new(
                ErrorKind::TypeError,
                format!("unknown function: {name} is not callable"),
            ))
        }
        None => {
            return Err(Error::new(
                ErrorKind::ReferenceError,
                format!("unknown function: {name}"),
            ))
        }
    };
    let membrane = Membrane::new(
        rt,
        MembraneOptions {
            transparent: !opaque,
            identity_preserving: true,
        },
    );
    let wrapper = rt.make_function(name, move |rt, this, args| {
        let wrapped = args
            .iter()
            .map(|a| membrane.wrap(rt, a))
            .collect::<Result<Vec<_>>>()?;
        let result = rt.call(&original, this, &wrapped)?;
        membrane.wrap(rt, &result)
    });
    rt.define_global(name, Value::Object(wrapper));
    Ok(())
}

/// One run of the wrapping experiment.
#[derive(Debug)]
pub struct Variant {
    /// The wrapped function, or `None` for the unwrapped baseline.
    pub function: Option<String>,
    pub outcome: Outcome,
}

/// Runs `program` once unwrapped and once per top-level function with only
/// that function wrapped. Every run is instrumented and uses a fresh heap;
/// runtime errors are kept in the variant rather than aborting the sweep.
pub fn enumerate_variants(program: &Program, opaque: bool) -> Vec<Variant> {
    let mut names: Vec<Option<String>> = vec![None];
    names.extend(
        program
            .top_level_functions()
            .into_iter()
            .map(|n| Some(n.to_string())),
    );
    names
        .into_iter()
        .map(|function| {
            let mut rt = Runtime::new();
            rt.enable_instrumentation(false);
            rt.declare_functions(program);
            let result = match &function {
                Some(name) => wrap_function_arguments(&mut rt, name, opaque)
                    .and_then(|()| rt.execute(program)),
                None => rt.execute(program),
            };
            Variant {
                function,
                outcome: rt.finish(result),
            }
        })
        .collect()
}

#[derive(Serialize)]
struct VariantJson {
    function: Option<String>,
    report: Option<ReportJson>,
    output: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

impl From<&Variant> for VariantJson {
    fn from(v: &Variant) -> Self {
        VariantJson {
            function: v.function.clone(),
            report: v.outcome.report.as_ref().map(|r| r.to_json()),
            output: v.outcome.output.clone(),
            error: v.outcome.error.as_ref().map(|e| e.to_string()),
        }
    }
}
