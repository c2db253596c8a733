//! Command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nlspec::commands::{self, GenRequest};
use nlspec::config::{Overrides, RunConfig};
use nlspec::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "nlspec",
    version,
    about = "Nonlinear spectral decompositions of signals and images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct RunArgs {
    /// JSON config file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// tv1d, tv2d-aniso, tv2d-iso, l1-dct, l1-identity, tgv2, collab, grad-collab
    #[arg(long)]
    functional: Option<String>,
    /// TGV weight in (0, 1)
    #[arg(long)]
    beta: Option<f64>,
    /// gf, vm or iss
    #[arg(long)]
    method: Option<String>,
    /// uniform or geometric
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    tmin: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Sample spacing
    #[arg(long)]
    spacing: Option<f64>,
    /// Transfer function, e.g. "0:2:0,2:inf:1"
    #[arg(long)]
    filter: Option<String>,
    /// Tail gain, 0 or 1
    #[arg(long)]
    tail: Option<u8>,
    /// Nullspace (mean) gain, 0 or 1
    #[arg(long)]
    mean: Option<u8>,
    #[arg(long)]
    seed: Option<u64>,
}

impl RunArgs {
    fn load(&self) -> CliResult<RunConfig> {
        let o = Overrides {
            functional: self.functional.clone(),
            beta: self.beta,
            method: self.method.clone(),
            grid: self.grid.clone(),
            tmin: self.tmin,
            tmax: self.tmax,
            steps: self.steps,
            tol: self.tol,
            spacing: self.spacing,
            filter: self.filter.clone(),
            tail: self.tail,
            mean: self.mean,
            seed: self.seed,
        };
        RunConfig::load(self.config.as_deref(), &o)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a signal into bands and write them with a manifest
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Apply a transfer function to a decomposition
    Filter {
        #[arg(long = "in")]
        input: PathBuf,
        /// Reuse a stored decomposition instead of recomputing it
        #[arg(long)]
        manifest: Option<PathBuf>,
        /// Output file (.csv or .pgm)
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Write the spectrum of a signal as CSV
    Spectrum {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the self-check suite
    Verify {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Also write the report as JSON
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Generate a synthetic signal
    Gen {
        /// step, random, pwlinear, sinusoids, collab-peaks, collab-jumps
        kind: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Noise level (generator specific)
        #[arg(long)]
        noise: Option<f64>,
        /// Also write the noise-free signal here
        #[arg(long)]
        clean: Option<PathBuf>,
    },
}

fn execute(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::Decompose {
            input,
            out_dir,
            run,
        } => {
            let cfg = run.load()?;
            let m = commands::decompose_cmd(&input, &out_dir, &cfg)?;
            println!("wrote {} bands to {}", m.bands.len(), out_dir.display());
            Ok(())
        }
        Command::Filter {
            input,
            manifest,
            out,
            run,
        } => {
            let cfg = run.load()?;
            let report = commands::filter_cmd(&input, manifest.as_deref(), &out, &cfg)?;
            println!("{}", serde_json::to_string(&report).expect("plain data"));
            if !report.passed {
                return Err(CliError::Verification(format!(
                    "complementary filters deviate from the input by {:e}",
                    report.complement_error
                )));
            }
            Ok(())
        }
        Command::Spectrum { input, out, run } => {
            let cfg = run.load()?;
            commands::spectrum_cmd(&input, &out, &cfg)
        }
        Command::Verify { input, out, run } => {
            let cfg = run.load()?;
            let report = commands::verify_cmd(input.as_deref(), &cfg)?;
            println!("scenario: {}", report.scenario);
            for c in &report.checks {
                println!("{}", c.line());
            }
            if let Some(path) = out {
                let json = serde_json::to_string_pretty(&report).expect("plain data");
                nlspec::io::write_string(&path, &json)?;
            }
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<&str> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.as_str())
                    .collect();
                Err(CliError::Verification(failed.join(", ")))
            }
        }
        Command::Gen {
            kind,
            out,
            n,
            seed,
            noise,
            clean,
        } => commands::gen_cmd(&GenRequest {
            kind,
            n,
            seed,
            noise,
            out,
            clean,
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
