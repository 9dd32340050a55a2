use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ptlab_core::scan::{self, RunConfig, RunOutput};
use ptlab_core::Error;

#[derive(Parser)]
#[command(name = "ptlab", version, about = "Spectra and thresholds of modulated gain/loss lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file and write CSV.
    Run {
        config: PathBuf,
        /// Output CSV; overrides the config's `output`. Stdout when neither is set.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for grid evaluation.
        #[arg(long, env = "PTLAB_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
        threads: Option<u16>,
    },
    /// Check a config file and print its normalised form.
    Validate { config: PathBuf },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 1,
        e if e.is_numerical() => 3,
        _ => 2,
    }
}

fn load(path: &Path) -> Result<RunConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    scan::parse_config(&text)
}

fn summary_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy()).unwrap_or_default();
    out.with_file_name(format!("{stem}.summary.csv"))
}

fn write_table(table: &scan::Table, path: &Path) -> Result<(), Error> {
    let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    table.write_csv(BufWriter::new(file))
}

fn write_output(output: &RunOutput, out: Option<&Path>) -> Result<(), Error> {
    match out {
        Some(path) => {
            write_table(&output.table, path)?;
            if let Some(summary) = &output.summary {
                write_table(summary, &summary_path(path))?;
            }
        }
        None => {
            output.table.write_csv(io::stdout().lock())?;
            if output.summary.is_some() {
                eprintln!("note: summary table not written; pass --out to get it");
            }
        }
    }
    Ok(())
}

fn run(config_path: &Path, out: Option<PathBuf>, threads: Option<u16>) -> Result<RunOutput, Error> {
    let config = load(config_path)?;
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let out = out.or_else(|| {
        config.output.as_ref().map(|p| match config_path.parent() {
            Some(dir) if p.is_relative() => dir.join(p),
            _ => p.clone(),
        })
    });
    let output = scan::run(&config)?;
    write_output(&output, out.as_deref())?;
    Ok(output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, out, threads } => run(&config, out, threads).and_then(|output| {
            if output.overflow {
                Err(Error::Overflow {
                    z: output
                        .table
                        .rows()
                        .last()
                        .and_then(|r| r[0].parse().ok())
                        .unwrap_or(f64::NAN),
                })
            } else {
                Ok(())
            }
        }),
        Command::Validate { config } => load(&config).map(|c| {
            let mut stdout = io::stdout().lock();
            let _ = writeln!(stdout, "{}", c.to_json());
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
