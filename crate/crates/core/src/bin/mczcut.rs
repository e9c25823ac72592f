use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use mczcut::harness::{self, ExperimentConfig, HarnessError, VerifyOptions};
use mczcut::sampler::Mode;
use mczcut::Circuit;

#[derive(Parser)]
#[command(name = "mczcut", version, about = "Cut multi-controlled-Z gates and estimate expectation values")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleMode {
    /// Per-shot circuit sampling with a Hoeffding budget.
    Shots,
    /// Pre-estimation of every term with the `4κ²/ε²` budget.
    Preest,
}

impl From<SampleMode> for Mode {
    fn from(m: SampleMode) -> Mode {
        match m {
            SampleMode::Shots => Mode::CircuitSampling,
            SampleMode::Preest => Mode::PreEstimation,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the ZH identity checks and decomposition oracles.
    Verify {
        /// Only run checks for these qubit counts.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Flip the leading coefficient of every decomposition (the report must fail).
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Print the decomposition document for an MCZ of the given order.
    Decompose {
        #[arg(long)]
        order: usize,
        /// Qubits on side A.
        #[arg(long)]
        cut: usize,
    },
    /// Print sampling overheads for common gate splits.
    KappaTable,
    /// Estimate `⟨Z…Z⟩` of a partitioned circuit document.
    Sample {
        #[arg(long, value_enum)]
        mode: SampleMode,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, env = "MCZCUT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a random-circuit experiment and write runs.csv and summary.json.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the seed in the config file.
        #[arg(long, env = "MCZCUT_SEED")]
        seed: Option<u64>,
    },
}

fn run(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Verify { sizes, corrupt } => {
            let report = harness::cmd_verify(&VerifyOptions { orders: sizes, corrupt })?;
            println!("{report}");
            Ok(report.all_passed())
        }
        Command::Decompose { order, cut } => {
            let out = harness::cmd_decompose(order, cut)?;
            println!("{}", serde_json::to_string_pretty(&out.decomposition.to_document())?);
            println!("kappa = {}", out.decomposition.kappa);
            Ok(match out.verification {
                Some(report) => {
                    println!(
                        "oracle residual {:.3e}, channel form residual {:.3e}",
                        report.residual, report.channel_form_residual
                    );
                    report.passed()
                }
                None => true,
            })
        }
        Command::KappaTable => {
            print!("{}", harness::format_kappa_table(&harness::cmd_kappa_table()?));
            Ok(true)
        }
        Command::Sample {
            mode,
            epsilon,
            seed,
            config,
        } => {
            let circuit = Circuit::parse(&fs::read_to_string(&config)?)?;
            let outcome = harness::cmd_sample(&circuit, mode.into(), epsilon, seed)?;
            println!("{}", serde_json::to_string_pretty(&outcome)?);
            Ok(true)
        }
        Command::Experiment { config, out, seed } => {
            let mut config = ExperimentConfig::parse(&fs::read_to_string(&config)?)?;
            if let Some(seed) = seed {
                config.seed = seed;
            }
            let dir = out
                .or_else(|| config.out.clone())
                .ok_or_else(|| HarnessError::InvalidConfig("no output directory given".into()))?;
            let result = harness::cmd_experiment(&config)?;
            result.write_to(&dir)?;
            println!("{}", result.summary_json());
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
