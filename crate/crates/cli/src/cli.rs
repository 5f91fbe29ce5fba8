use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use gme_core::bounds::DEFAULT_GRID;
use gme_core::criteria::gme_criterion;
use gme_core::io::{parse_observables, parse_state, pure_state_from_value};
use gme_core::states::fully_separable_threshold;
use gme_core::{enumerate_bipartitions, NoiseFamily};

use crate::analysis::{compare_fullsep, demo, find_threshold, fullsep_csv, sweep, sweep_csv, Setup};
use crate::config::{load_config, parse_bounds, DEFAULT_SWEEP_GRID};
use crate::error::{CliError, Result};
use crate::format::g12;

#[derive(Debug, Parser)]
#[command(name = "gme", version, about = "Genuine multipartite entanglement criteria from local sum uncertainty relations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep a built-in noisy family (w3, w4, w5, w6, wN, qutrit3) and print CSV.
    Demo {
        name: String,
        #[arg(long, default_value_t = DEFAULT_SWEEP_GRID)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the criterion on one state and print the report as JSON.
    Evaluate {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        observables: PathBuf,
        /// zero | constant:<file> | commutator | family-min | reference
        #[arg(long, default_value = "zero")]
        bounds: String,
        /// Pure target state for family-min and reference bounds.
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Sweep the family described by a config file and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bisect for the noise level where f changes sign.
    Threshold(ThresholdArgs),
    /// List the bipartitions of n sites.
    Partitions {
        #[arg(long)]
        n: usize,
    },
    /// Noise level below which the noisy n-qubit W state is fully separable.
    Fullsep {
        #[arg(long)]
        n: usize,
    },
    /// Tabulate W-demo detection thresholds against the full-separability level.
    Compare {
        #[arg(long, default_value_t = 3)]
        from: usize,
        #[arg(long, default_value_t = 6)]
        to: usize,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct ThresholdSource {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    demo: Option<String>,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[command(flatten)]
    source: ThresholdSource,
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Tags core parse errors with the file they came from.
fn in_file<T>(path: &Path, r: gme_core::Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        gme_core::Error::Malformed { path: field, message } => CliError::Io {
            path: path.display().to_string(),
            message: format!("malformed input at `{field}`: {message}"),
        },
        other => other.into(),
    })
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn execute(cmd: Command, stdout: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Demo { name, grid, out } => {
            let rows = sweep(&demo(&name)?, grid)?;
            emit(&sweep_csv(&rows), out.as_deref(), stdout)
        }
        Command::Evaluate {
            state,
            observables,
            bounds,
            target,
        } => {
            let rho = in_file(&state, parse_state(&read(&state)?))?;
            let family = in_file(&observables, parse_observables(&read(&observables)?))?;
            let noise = match target {
                Some(path) => {
                    let doc: serde_json::Value = in_file(
                        &path,
                        serde_json::from_str(&read(&path)?)
                            .map_err(|e| gme_core::Error::Malformed { path: "$".into(), message: e.to_string() }),
                    )?;
                    Some(NoiseFamily::full(in_file(&path, pure_state_from_value(&doc, ""))?))
                }
                None => None,
            };
            let provider = parse_bounds(&bounds, Path::new("."), noise.as_ref(), DEFAULT_GRID)?;
            let report = gme_criterion(&rho, &family, &provider)?;
            emit(&to_json(&report), None, stdout)
        }
        Command::Sweep { config, grid, out } => {
            let cfg = load_config(&config)?;
            let rows = sweep(&cfg.setup, grid.unwrap_or(cfg.grid))?;
            emit(&sweep_csv(&rows), out.as_deref(), stdout)
        }
        Command::Threshold(args) => {
            let (setup, bracket): (Setup, (f64, f64)) = match (args.source.config, args.source.demo) {
                (Some(path), _) => {
                    let cfg = load_config(&path)?;
                    (cfg.setup, cfg.bracket)
                }
                (None, Some(name)) => {
                    let setup = demo(&name)?;
                    let range = setup.family.range();
                    (setup, range)
                }
                (None, None) => unreachable!("clap requires one source"),
            };
            let lo = args.lo.unwrap_or(bracket.0);
            let hi = args.hi.unwrap_or(bracket.1);
            let result = find_threshold(&setup, lo, hi)?;
            emit(&to_json(&result), None, stdout)
        }
        Command::Partitions { n } => {
            let mut text = String::new();
            for p in enumerate_bipartitions(n)? {
                text.push_str(&p.to_string());
                text.push('\n');
            }
            emit(&text, None, stdout)
        }
        Command::Fullsep { n } => emit(&format!("{}\n", g12(fully_separable_threshold(n)?)), None, stdout),
        Command::Compare { from, to } => {
            if from > to {
                return Err(CliError::Usage(format!("empty range {from}..={to}")));
            }
            emit(&fullsep_csv(&compare_fullsep(from..=to)?), None, stdout)
        }
    }
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code: 0 on success, 2 on input errors, 3 when a bound exceeds the variance
/// it bounds.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}
