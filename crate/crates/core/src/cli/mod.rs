//! Command-line front end: `vak <command> --in problem.json --out report.json`.

pub mod plot;
pub mod run;
pub mod schema;

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

pub use plot::{emit_plot_data, plot_data, PlotFormat};
pub use run::{document_polyhedra, run_command, Report, RunOptions};
pub use schema::{parse_problem, Command, ProblemDocument};

use crate::error::VakError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;
pub const EXIT_STRICT: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliCommand {
    Cone,
    Normalcone,
    Coderivative,
    Projcode,
    Criterion,
    Battery,
    Chain,
    Sum,
    Oracle,
    Outernorm,
    /// Run several documents in parallel; `--out` names a directory.
    Batch,
}

impl CliCommand {
    fn single(self) -> Option<Command> {
        Command::ALL.iter().copied().find(|c| c.name() == self.to_possible_value().expect("named").get_name())
    }
}

#[derive(Debug, Parser)]
#[command(name = "vak", version, about = "Projectional coderivatives and relative Lipschitz-like stability")]
pub struct Cli {
    pub command: CliCommand,
    /// Problem document (repeatable for `batch`).
    #[arg(long = "in", required = true)]
    pub input: Vec<PathBuf>,
    /// Report file (directory for `batch`); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Plot data for the report's cones; `.json` selects JSON, else CSV.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Exact rational arithmetic on polyhedral routes.
    #[arg(long)]
    pub exact: bool,
    /// Exit with 4 when the report carries warnings.
    #[arg(long)]
    pub strict: bool,
}

/// Outcome of one document: exit code, report or error JSON, plot text.
#[derive(Debug, Clone)]
pub struct Processed {
    pub code: i32,
    pub json: String,
    pub plot: Option<String>,
    pub message: Option<String>,
}

/// Parse, check the command, run, and render one document.
pub fn process(text: &str, expected: Option<Command>, opts: &RunOptions, strict: bool, plot: Option<PlotFormat>) -> Processed {
    let fail = |code: i32, cmd: Option<Command>, e: &VakError| Processed { code, json: run::error_json(cmd, e), plot: None, message: Some(e.to_string()) };
    let doc = match parse_problem(text) {
        Ok(d) => d,
        Err(e) => return fail(EXIT_SCHEMA, expected, &e),
    };
    let cmd = doc.query.command;
    if let Some(want) = expected {
        if want != cmd {
            let e = VakError::SchemaViolation(vec![("/query/command".into(), format!("document asks for '{}', command line for '{}'", cmd.name(), want.name()))]);
            return fail(EXIT_SCHEMA, Some(want), &e);
        }
    }
    let report = match run_command(&doc, opts) {
        Ok(r) => r,
        Err(e @ VakError::SchemaViolation(_)) => return fail(EXIT_SCHEMA, Some(cmd), &e),
        Err(e) => return fail(EXIT_COMPUTATION, Some(cmd), &e),
    };
    let plot = match plot.map(|f| emit_plot_data(&report, f)) {
        Some(Err(e)) => return fail(EXIT_COMPUTATION, Some(cmd), &e),
        Some(Ok(p)) => Some(p),
        None => None,
    };
    let code = if strict && !report.warnings.is_empty() { EXIT_STRICT } else { EXIT_OK };
    let message = (code == EXIT_STRICT).then(|| format!("warnings escalated by --strict: {}", report.warnings.join("; ")));
    Processed { code, json: report.to_json(), plot, message }
}

fn write(path: &Path, text: &str) -> std::io::Result<()> {
    std::fs::write(path, text.as_bytes())
}

/// Entry point shared by the binary; returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let opts = RunOptions { seed: cli.seed, exact: cli.exact };
    let plot_fmt = cli.plot.as_deref().map(PlotFormat::from_path);
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| VakError::Parse(format!("{}: {e}", p.display())));

    if cli.command == CliCommand::Batch {
        let Some(dir) = cli.out.clone() else {
            eprintln!("batch needs --out <directory>");
            return EXIT_SCHEMA;
        };
        if let Err(e) = std::fs::create_dir_all(&dir) {
            eprintln!("{}: {e}", dir.display());
            return EXIT_COMPUTATION;
        }
        // each document is isolated in its own thread
        let results: Vec<(PathBuf, Processed)> = std::thread::scope(|s| {
            let handles: Vec<_> = cli
                .input
                .iter()
                .map(|p| {
                    let opts = opts.clone();
                    s.spawn(move || {
                        let out = match read(p) {
                            Ok(text) => process(&text, None, &opts, cli.strict, None),
                            Err(e) => Processed { code: EXIT_SCHEMA, json: run::error_json(None, &e), plot: None, message: Some(e.to_string()) },
                        };
                        (p.clone(), out)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("batch worker panicked")).collect()
        });
        let mut code = EXIT_OK;
        for (p, r) in results {
            let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("doc");
            let target = dir.join(format!("{stem}.report.json"));
            if let Err(e) = write(&target, &r.json) {
                eprintln!("{}: {e}", target.display());
                return EXIT_COMPUTATION;
            }
            if let Some(m) = &r.message {
                eprintln!("{}: {m}", p.display());
            }
            code = code.max(r.code);
        }
        return code;
    }

    if cli.input.len() != 1 {
        eprintln!("exactly one --in file expected");
        return EXIT_SCHEMA;
    }
    let expected = cli.command.single();
    let r = match read(&cli.input[0]) {
        Ok(text) => process(&text, expected, &opts, cli.strict, plot_fmt),
        Err(e) => Processed { code: EXIT_SCHEMA, json: run::error_json(expected, &e), plot: None, message: Some(e.to_string()) },
    };
    match &cli.out {
        Some(p) => {
            if let Err(e) = write(p, &r.json) {
                eprintln!("{}: {e}", p.display());
                return EXIT_COMPUTATION;
            }
        }
        None => {
            use std::io::Write;
            // a closed pipe (e.g. `| head`) is not an error worth a panic
            let mut out = std::io::stdout().lock();
            if let Err(e) = writeln!(out, "{}", r.json) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("stdout: {e}");
                    return EXIT_COMPUTATION;
                }
            }
        }
    }
    if let (Some(path), Some(text)) = (&cli.plot, &r.plot) {
        if let Err(e) = write(path, text) {
            eprintln!("{}: {e}", path.display());
            return EXIT_COMPUTATION;
        }
    }
    if let Some(m) = &r.message {
        eprintln!("{m}");
    }
    r.code
}
