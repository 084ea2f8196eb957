use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use acka_core::harness::{
    cli_analyze, cli_run, cli_security, cli_sweep, parse_preset_list, HarnessError, Preset, SweepSpec, DEFAULT_D,
    DEFAULT_OUTPUT_DIR, DEFAULT_ROUNDS, OUTPUT_DIR_ENV,
};
use acka_core::security::{SecurityInputs, CSV_HEADER};

/// Anonymous conference key agreement over simulated GHZ networks.
#[derive(Parser)]
#[command(name = "acka", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the protocol from a configuration file.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the file.
        #[arg(long, env = OUTPUT_DIR_ENV)]
        output_dir: Option<PathBuf>,
    },
    /// Security figures for given round counts.
    Security(SecurityArgs),
    /// Recompute a run summary from transcript files.
    Analyze {
        transcript: PathBuf,
        private: Option<PathBuf>,
        /// Print CSV instead of the text table.
        #[arg(long)]
        csv: bool,
    },
    /// Batch runs over presets, fidelities and repetitions.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SecurityArgs {
    #[arg(long)]
    keygen: usize,
    #[arg(long)]
    verification: usize,
    #[arg(long)]
    failed: usize,
    #[arg(long)]
    fidelity: f64,
    /// Raw key-relevant event rate in 1/s.
    #[arg(long)]
    raw_rate: Option<f64>,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Preset labels, e.g. `A-F` or `A,C,E`.
    #[arg(long, default_value = "A-F")]
    presets: String,
    #[arg(long, value_delimiter = ',', default_value = "1,0.85")]
    fidelities: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    repetitions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ROUNDS)]
    rounds: usize,
    #[arg(short = 'D', long = "d", default_value_t = DEFAULT_D)]
    d: f64,
    /// Use one random X/Y setting pattern per run.
    #[arg(long)]
    fixed_settings: bool,
    /// Run cells one after another instead of in parallel.
    #[arg(long)]
    sequential: bool,
    #[arg(long, env = OUTPUT_DIR_ENV, default_value = DEFAULT_OUTPUT_DIR)]
    output_dir: PathBuf,
}

fn execute(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run { config, output_dir } => {
            let art = cli_run(&config, output_dir.as_deref())?;
            print!("{}", art.summary.render_text());
            eprintln!("outputs written to {}", art.output_dir.display());
        }
        Command::Security(a) => {
            let report = cli_security(&SecurityInputs {
                num_keygen: a.keygen,
                num_verification: a.verification,
                num_verification_failed: a.failed,
                fidelity: a.fidelity,
                raw_rate: a.raw_rate,
            })?;
            if a.csv {
                println!("{CSV_HEADER}\n{}", report.csv_row());
            } else {
                print!("{}", report.render_text());
            }
        }
        Command::Analyze {
            transcript,
            private,
            csv,
        } => {
            let summary = cli_analyze(&transcript, private.as_deref())?;
            if csv {
                print!("{}", summary.render_csv());
            } else {
                print!("{}", summary.render_text());
            }
        }
        Command::Sweep(a) => {
            let presets: Vec<Preset> = parse_preset_list(&a.presets).map_err(|message| HarnessError::Parse {
                line: 0,
                key: "--presets".into(),
                message,
            })?;
            let spec = SweepSpec {
                presets,
                fidelities: a.fidelities,
                repetitions: a.repetitions,
                seed: a.seed,
                d: a.d,
                rounds: a.rounds,
                fixed_settings: a.fixed_settings,
                parallel: !a.sequential,
            };
            let result = cli_sweep(&spec, &a.output_dir)?;
            print!("{}", result.render_text());
            eprintln!("outputs written to {}", a.output_dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
