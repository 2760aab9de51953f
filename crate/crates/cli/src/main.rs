use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tpc_harq_cli::config::{apply_override, raw_from_table, read_table};
use tpc_harq_cli::experiments::run_experiment;
use tpc_harq_cli::{CliError, Experiment, ExperimentConfig};

/// Turbo product code HARQ experiments. Results go to a CSV file next to a
/// JSON manifest; progress goes to standard error.
#[derive(Parser)]
#[command(name = "tpc-harq", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Flat TOML file of experiment keys.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set channel=rayleigh --set n=32`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo packets per SNR point.
    #[arg(long)]
    trials: Option<u64>,
    /// Output CSV path (default: `<subcommand>.csv`).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Single-transmission PER versus Eb/N0 of a product code (the PER curves
    /// for AWGN and Rayleigh fading).
    PerSweep(Common),
    /// Monte Carlo throughput, transmission rounds and drop rate of
    /// subpacket HARQ (the throughput-versus-SNR figures).
    HarqThroughput(Common),
    /// Semi-analytical throughput against simulation (the SAS validation
    /// figures for AWGN and Rayleigh).
    SasCompare(Common),
    /// Delay with and without subpacketization for several propagation
    /// delays (the subpacket delay figure).
    DelaySweep(Common),
    /// Minimum transmit power keeping a share mu of the full-power
    /// throughput (the power saving figures).
    PowerOpt(Common),
    /// Power optimization driven by ACK/NACK statistics instead of channel
    /// knowledge (the blind power control figures).
    PowerOptBlind(Common),
    /// False-alarm and misdetection rates of CRC or self-detection and the
    /// resulting throughput (the detection performance figures).
    DetectEval(Common),
    /// Relative complexity of self-detection versus CRC detection (the
    /// relative complexity table).
    ComplexityTable(Common),
    /// Trace-driven video playback with optional adaptive HARQ (the playback
    /// buffer figures and the PSNR / concealment table).
    VideoSim(Common),
    /// Throughput-maximizing code choice per SNR for a fixed packet size
    /// (the adaptive code selection figure).
    CodeSelect(Common),
}

impl Command {
    fn split(self) -> (Experiment, Common) {
        match self {
            Command::PerSweep(c) => (Experiment::PerSweep, c),
            Command::HarqThroughput(c) => (Experiment::HarqThroughput, c),
            Command::SasCompare(c) => (Experiment::SasCompare, c),
            Command::DelaySweep(c) => (Experiment::DelaySweep, c),
            Command::PowerOpt(c) => (Experiment::PowerOpt, c),
            Command::PowerOptBlind(c) => (Experiment::PowerOptBlind, c),
            Command::DetectEval(c) => (Experiment::DetectEval, c),
            Command::ComplexityTable(c) => (Experiment::ComplexityTable, c),
            Command::VideoSim(c) => (Experiment::VideoSim, c),
            Command::CodeSelect(c) => (Experiment::CodeSelect, c),
        }
    }
}

fn resolve(experiment: Experiment, common: Common) -> Result<ExperimentConfig, CliError> {
    let mut table = read_table(common.config.as_deref())?;
    for o in &common.overrides {
        apply_override(&mut table, o)?;
    }
    if let Some(seed) = common.seed {
        table.insert("seed".into(), toml::Value::Integer(seed as i64));
    }
    if let Some(trials) = common.trials {
        table.insert("trials".into(), toml::Value::Integer(trials as i64));
    }
    if let Some(out) = common.out {
        table.insert("out".into(), toml::Value::String(out.display().to_string()));
    }
    ExperimentConfig::resolve(experiment, raw_from_table(table)?)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let (experiment, common) = cli.command.split();
    let result = resolve(experiment, common).and_then(|cfg| run_experiment(&cfg));
    match result {
        Ok(paths) => {
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("tpc-harq {experiment}: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
