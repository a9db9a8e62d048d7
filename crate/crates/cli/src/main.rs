use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use collective_mode_cli::config::Scenario;
use collective_mode_cli::output::{create_dir, write_json};
use collective_mode_cli::{figure, run, verify, CliError};

#[derive(Parser)]
#[command(name = "collective-mode", version, about = "Collective-mode damping and spectra of two coupled chains")]
struct Cli {
    /// Output directory, overriding the config's `output.directory`.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Suppress progress and warnings on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads for the parallel parts.
    #[arg(long, global = true, env = "COLLECTIVE_MODE_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the kicked collective coordinate and compute its spectra.
    Run { config: PathBuf },
    /// Check every invariant against the configured model; JSON report on stdout.
    Verify { config: PathBuf },
    /// Write the two dimensionless damped-oscillator spectra.
    Figure1 { outdir: PathBuf },
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run { config } => {
            let scenario = Scenario::load(config)?;
            let out = run::run(&scenario, &scenario.output_dir(cli.output.as_deref()), cli.quiet)?;
            if !cli.quiet {
                eprintln!(
                    "{} regime, Omega0^2 = {:.6e}, gamma0 = {:.6e}; wrote {} files to {}",
                    out.summary.regime,
                    out.summary.omega0_sq,
                    out.summary.gamma0,
                    out.files.len(),
                    out.directory.display()
                );
            }
            Ok(())
        }
        Command::Verify { config } => {
            let scenario = Scenario::load(config)?;
            let report = verify::verify(&scenario)?;
            let dir = scenario.output_dir(cli.output.as_deref());
            create_dir(&dir)?;
            write_json(&dir.join("verification.json"), &report)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("serializable report"));
            if report.passed {
                Ok(())
            } else {
                Err(CliError::VerifyFailed { failed: report.failed, total: report.checks.len() })
            }
        }
        Command::Figure1 { outdir } => {
            let files = figure::figure1(outdir)?;
            if !cli.quiet {
                eprintln!("wrote {} files to {}", files.len(), outdir.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("config error: COLLECTIVE_MODE_THREADS must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool configured once");
    }
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !cli.quiet || e.exit_code() != 1 {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
