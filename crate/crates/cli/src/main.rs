use std::path::PathBuf;
use std::process::ExitCode;

use cadlag_cli::presets::{preset, KINDS};
use cadlag_cli::{exit_code, functional_values, verify, Theorem, VerifyOpts};
use cadlag_convex::ext::parse_q;
use cadlag_convex::io::{self, Loaded};
use cadlag_convex::Q;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cadlag", version, about = "Exact convex duality checks for step processes on scenario trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one theorem check and print a report.
    Verify {
        /// Instance file (optional for seeded PL checks).
        file: Option<PathBuf>,
        #[arg(long, value_parser = parse_theorem)]
        theorem: Theorem,
        /// Lattice half-width for brute-force oracles.
        #[arg(long = "B", value_parser = parse_rat)]
        b: Option<Q>,
        /// Lattice step for brute-force oracles.
        #[arg(long, value_parser = parse_rat, default_value = "1/100")]
        delta: Q,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Exit with code 4 when an assumption check fails.
        #[arg(long)]
        strict: bool,
        /// Add random cases generated from seeds 0..N.
        #[arg(long, default_value_t = 0)]
        seeds: u64,
        /// Sampled selections per dual in the currency check.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Insert factor−1 equispaced grid points per cell.
    Refine {
        file: PathBuf,
        #[arg(long)]
        factor: usize,
        /// Output path; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit a preset instance file.
    Model {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(KINDS))]
        kind: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare two reports, ignoring their timestamps.
    ReportDiff { a: PathBuf, b: PathBuf },
}

fn parse_theorem(s: &str) -> Result<Theorem, String> {
    s.parse()
}

fn parse_rat(s: &str) -> Result<Q, String> {
    parse_q(s).map_err(|e| e.to_string())
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), String> {
    match output {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load(path: &PathBuf) -> Result<Loaded, ExitCode> {
    io::load(path).map_err(|e| {
        eprintln!("{e}");
        ExitCode::from(2)
    })
}

fn run() -> Result<ExitCode, ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify {
            file,
            theorem,
            b,
            delta,
            report,
            strict,
            seeds,
            samples,
        } => {
            let loaded = file.as_ref().map(load).transpose()?;
            let opts = VerifyOpts {
                theorem,
                b,
                delta,
                seeds,
                samples,
            };
            let rep = verify(loaded.as_ref(), &opts).map_err(|f| {
                eprintln!("{f}");
                ExitCode::from(f.exit_code() as u8)
            })?;
            print!("{}", rep.to_text());
            if let Some(p) = report {
                emit(&rep.to_json(), Some(&p)).map_err(|e| {
                    eprintln!("{e}");
                    ExitCode::from(2)
                })?;
            }
            Ok(ExitCode::from(exit_code(&rep, strict) as u8))
        }
        Command::Refine { file, factor, output } => {
            if factor < 2 {
                eprintln!("refinement factor must be at least 2");
                return Err(ExitCode::from(2));
            }
            let loaded = load(&file)?;
            let fine = loaded.refine(factor);
            let (before, after) = (functional_values(&loaded), functional_values(&fine));
            if before != after {
                for (x, y) in before.iter().zip(&after) {
                    if x != y {
                        eprintln!("refinement changed {}: {} -> {}", x.0, x.1, y.1);
                    }
                }
                return Err(ExitCode::from(1));
            }
            emit(&io::to_json(&fine), output.as_ref()).map_err(|e| {
                eprintln!("{e}");
                ExitCode::from(2)
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Model { kind, output } => {
            let l = preset(&kind).expect("validated by clap");
            emit(&io::to_json(&l), output.as_ref()).map_err(|e| {
                eprintln!("{e}");
                ExitCode::from(2)
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ReportDiff { a, b } => {
            let read = |p: &PathBuf| {
                std::fs::read_to_string(p).map_err(|e| {
                    eprintln!("{}: {e}", p.display());
                    ExitCode::from(2)
                })
            };
            let diffs = io::report_diff(&read(&a)?, &read(&b)?).map_err(|e| {
                eprintln!("{e}");
                ExitCode::from(2)
            })?;
            for d in &diffs {
                println!("differs at {d}");
            }
            Ok(if diffs.is_empty() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    run().unwrap_or_else(|code| code)
}
