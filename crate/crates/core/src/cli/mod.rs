//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 4 published-table mismatch.

pub mod commands;
pub mod config;
pub mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::reference::reference_table;
use crate::Error;
use commands::{columns_for, compute_bounds, reproduce, spectrum};
use config::{RunConfig, Settings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_MISMATCH: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "critcoupling",
    version,
    about = "Lower and upper limits on the critical coupling of attractive central potentials",
    after_help = "Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 reproduction mismatch."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate limits on g_c, one row per channel and one column per method.
    Bounds,
    /// Recompute a published table and compare cell by cell.
    Reproduce {
        #[arg(value_enum)]
        table: TableId,
    },
    /// Print the leading kernel eigenvalues per channel.
    Spectrum,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TableId {
    /// Square well.
    Table1,
    /// Exponential.
    Table2,
}

#[derive(Debug, Default, Args)]
pub struct Options {
    /// Built-in shape: square_well, exponential, gaussian, wood_saxon.
    #[arg(long, global = true, value_name = "NAME")]
    pub builtin: Option<String>,
    /// Shape parameter, repeatable (e.g. --param c=1.5).
    #[arg(long = "param", global = true, value_name = "K=V")]
    pub params: Vec<String>,
    /// Shape v(r) as an expression in r (e.g. "exp(-r^2)").
    #[arg(long, global = true, value_name = "TEXT", allow_hyphen_values = true)]
    pub potential_expr: Option<String>,
    /// Two-column table of (y, v) samples.
    #[arg(long, global = true, value_name = "PATH")]
    pub potential_file: Option<PathBuf>,
    /// Channels, comma list or ranges (e.g. 0-5). Default 0.
    #[arg(long, global = true, value_name = "LIST")]
    pub ell: Option<String>,
    /// Trace orders for the trace limits. Default 1,2,3,4.
    #[arg(long, global = true, value_name = "LIST")]
    pub n: Option<String>,
    /// trace, glaser, hoelder, sufficient, exact, shooting, closed_form.
    #[arg(long, global = true, value_name = "LIST")]
    pub methods: Option<String>,
    /// Uniform core panels of the quadrature grid.
    #[arg(long, global = true, value_name = "INT")]
    pub panels: Option<usize>,
    /// Gauss–Legendre points per panel.
    #[arg(long, global = true, value_name = "INT")]
    pub points_per_panel: Option<usize>,
    /// Relative tail tolerance for truncating infinite-range shapes.
    #[arg(long, global = true, value_name = "FLOAT")]
    pub tail_eps: Option<f64>,
    /// Output format: md, csv or json.
    #[arg(long, global = true, value_name = "md|csv|json")]
    pub format: Option<String>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Emit partial tables with failed cells marked instead of stopping.
    #[arg(long, global = true)]
    pub keep_going: bool,
    /// Flat key=value file mirroring these flags; flags win.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

impl Options {
    fn flag_settings(&self) -> Settings {
        let mut s = Settings::default();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                s.values.insert(k.to_string(), v);
            }
        };
        put("builtin", self.builtin.clone());
        put("potential-expr", self.potential_expr.clone());
        put("potential-file", self.potential_file.as_ref().map(|p| p.display().to_string()));
        put("ell", self.ell.clone());
        put("n", self.n.clone());
        put("methods", self.methods.clone());
        put("panels", self.panels.map(|v| v.to_string()));
        put("points-per-panel", self.points_per_panel.map(|v| v.to_string()));
        put("tail-eps", self.tail_eps.map(|v| format!("{v:e}")));
        put("format", self.format.clone());
        put("output", self.output.as_ref().map(|p| p.display().to_string()));
        if self.keep_going {
            put("keep-going", Some("true".into()));
        }
        s.params = self.params.clone();
        s
    }

    pub fn run_config(&self) -> crate::Result<RunConfig> {
        let base = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        base.overridden_by(self.flag_settings()).into_config()
    }
}

/// Exit code for a library error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Syntax { .. }
        | Error::UnknownFunction { .. }
        | Error::UnboundParameter(_)
        | Error::UnknownShape(_)
        | Error::InvalidParameter(_)
        | Error::InvalidTable(_)
        | Error::InvalidGrid(_)
        | Error::Io(_)
        | Error::TraceOrder(_)
        | Error::UnsupportedOrder(_)
        | Error::UnsupportedChannel(_)
        | Error::EmptyShape
        | Error::NotMonotone
        | Error::Domain { .. }
        | Error::NonPositiveRadius(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code. Output goes to `stdout` or the
/// configured file; diagnostics go to `stderr`.
pub fn run(args: impl IntoIterator<Item = OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render();
            if code == 0 {
                let _ = write!(stdout, "{rendered}");
            } else {
                let _ = write!(stderr, "{}", rendered.ansi());
            }
            return code;
        }
    };
    let config = match cli.options.run_config() {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let (text, code) = match &cli.command {
        Command::Bounds => cmd_bounds(&config, stderr),
        Command::Reproduce { table } => cmd_reproduce(&config, *table, stderr),
        Command::Spectrum => cmd_spectrum(&config, stderr),
    };
    if let Some(text) = text {
        if let Err(e) = emit(&config, &text, stdout) {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CONFIG;
        }
    }
    code
}

fn emit(config: &RunConfig, text: &str, stdout: &mut dyn Write) -> std::io::Result<()> {
    match &config.output {
        Some(path) => std::fs::write(path, text),
        None => stdout.write_all(text.as_bytes()),
    }
}

fn build_shape(config: &RunConfig, stderr: &mut dyn Write) -> Result<crate::potentials::PotentialShape, i32> {
    let Some(source) = &config.source else {
        let _ = writeln!(
            stderr,
            "error: no potential given (use --builtin, --potential-expr or --potential-file)"
        );
        return Err(EXIT_CONFIG);
    };
    source.build().map_err(|e| {
        let _ = writeln!(stderr, "error: potential '{source}': {e}");
        exit_code(&e)
    })
}

/// Renders the bounds table for `config`; the text is `None` when nothing
/// should be printed.
pub fn cmd_bounds(config: &RunConfig, stderr: &mut dyn Write) -> (Option<String>, i32) {
    let shape = match build_shape(config, stderr) {
        Ok(s) => s,
        Err(code) => return (None, code),
    };
    let columns = columns_for(&config.methods, &config.ns);
    let table = match compute_bounds(&shape, &config.ells, &columns, &config.resolution) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return (None, exit_code(&e));
        }
    };
    let failures = table.failures();
    for (ell, column, error) in &failures {
        let _ = writeln!(stderr, "error: cell ℓ = {ell}, {}: {error}", column.key());
    }
    let code = if failures.is_empty() { EXIT_OK } else { EXIT_NUMERICAL };
    if code != EXIT_OK && !config.keep_going {
        return (None, code);
    }
    (Some(render::render_bounds(&table, config.format)), code)
}

pub fn cmd_reproduce(config: &RunConfig, which: TableId, stderr: &mut dyn Write) -> (Option<String>, i32) {
    let id = match which {
        TableId::Table1 => "table1",
        TableId::Table2 => "table2",
    };
    let table = reference_table(id).expect("embedded table");
    let rep = match reproduce(table, &config.resolution) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return (None, exit_code(&e));
        }
    };
    let bad = rep.offending();
    for c in &bad {
        let detail = match (c.computed, &c.error) {
            (Some(v), _) => format!("computed {v}, published {}", c.published),
            (None, Some(e)) => format!("failed: {e}"),
            (None, None) => "no value".into(),
        };
        let _ = writeln!(stderr, "mismatch: {} ℓ = {}, {}: {detail}", rep.table, c.ell, c.column.label());
    }
    let code = if bad.is_empty() { EXIT_OK } else { EXIT_MISMATCH };
    (Some(render::render_reproduction(&rep, config.format)), code)
}

pub fn cmd_spectrum(config: &RunConfig, stderr: &mut dyn Write) -> (Option<String>, i32) {
    let shape = match build_shape(config, stderr) {
        Ok(s) => s,
        Err(code) => return (None, code),
    };
    let mut rows = Vec::new();
    for &ell in &config.ells {
        match spectrum(&shape, ell, &config.resolution) {
            Ok(row) => rows.push(row),
            Err(e) => {
                let _ = writeln!(stderr, "error: ℓ = {ell}: {e}");
                return (None, exit_code(&e));
            }
        }
    }
    (Some(render::render_spectrum(&shape.to_string(), &rows, config.format)), EXIT_OK)
}
