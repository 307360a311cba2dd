use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use matisk_cli::commands::{self, BaselineName, BaselineParams};
use matisk_cli::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "matisk", version, about = "Multi-carrier repetition-coded CPFSK modem toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Overrides `frame.seed`.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        Ok(RunConfig::load(&self.config)?.with_seed(self.seed))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize one frame to IQ files and print derived parameters.
    Synth {
        #[command(flatten)]
        common: Common,
        /// Output directory.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Also write one IQ file per antenna.
        #[arg(long)]
        per_antenna: bool,
    },
    /// Demodulate an aggregate IQ file; per-subcarrier SIR and errors.
    Demod {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        /// Transmitted frame CSV; regenerated from the seed when absent.
        #[arg(long)]
        frame: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Noiseless SIR for every repetition factor in a range.
    SirSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t_min: Option<usize>,
        #[arg(long)]
        t_max: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Welch PSD of a file, or of the aggregate and edge/center antennas.
    Psd {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Instantaneous frequency traces of all antennas.
    Instfreq {
        #[command(flatten)]
        common: Common,
        /// Keep every `stride`-th sample.
        #[arg(long, default_value_t = 4)]
        stride: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-subcarrier omega bits, shifts and peak deviation.
    Omega {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// PSD of a single-carrier reference waveform.
    Baseline {
        #[arg(value_enum)]
        kind: BaselineName,
        #[arg(long, default_value_t = 0.3)]
        bt: f64,
        #[arg(long, default_value_t = 0.22)]
        rolloff: f64,
        #[arg(long, default_value_t = 1)]
        repetition: usize,
        /// Radians.
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
        repeated_shift: f64,
        #[arg(long)]
        psk_order: Option<usize>,
        #[arg(long, default_value_t = 4000)]
        symbols: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a PSD against a mask file; summary CSV on stdout.
    MaskCheck {
        #[command(flatten)]
        common: Common,
        /// Mask file; defaults to `[mask] path` of the configuration.
        #[arg(long)]
        mask: Option<PathBuf>,
        /// IQ file to check instead of the synthesized aggregate.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Per-bin margins.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth {
            common,
            out,
            per_antenna,
        } => {
            commands::synth(&common.load()?, &out, per_antenna, &mut io::stdout().lock())?;
        }
        Command::Demod {
            common,
            input,
            frame,
            out,
        } => {
            commands::demod(&common.load()?, &input, frame.as_deref(), sink(out.as_deref())?)?;
        }
        Command::SirSweep {
            common,
            t_min,
            t_max,
            out,
        } => {
            let cfg = common.load()?;
            let t = cfg.system.repetition;
            commands::sir_sweep(&cfg, t_min.unwrap_or(t), t_max.unwrap_or(t), sink(out.as_deref())?)?;
        }
        Command::Psd { common, input, out } => {
            commands::psd(&common.load()?, input.as_deref(), sink(out.as_deref())?)?;
        }
        Command::Instfreq { common, stride, out } => {
            commands::instfreq(&common.load()?, stride, sink(out.as_deref())?)?;
        }
        Command::Omega { common, out } => {
            commands::omega(&common.load()?, sink(out.as_deref())?)?;
        }
        Command::Baseline {
            kind,
            bt,
            rolloff,
            repetition,
            repeated_shift,
            psk_order,
            symbols,
            seed,
            out,
        } => {
            let params = BaselineParams {
                kind,
                bt,
                rolloff,
                repetition,
                repeated_shift,
                psk_order,
                symbols,
                seed,
                ..BaselineParams::default()
            };
            commands::baseline(&params, sink(out.as_deref())?)?;
        }
        Command::MaskCheck {
            common,
            mask,
            input,
            out,
        } => {
            let bins = out.as_deref().map(|p| sink(Some(p))).transpose()?;
            commands::mask_check(&common.load()?, mask.as_deref(), input.as_deref(), bins, io::stdout().lock())?;
        }
    }
    Ok(())
}

/// Collapses a multi-line message (TOML errors quote the offending source)
/// to its prose lines.
fn one_line(msg: &str) -> String {
    msg.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.trim_start_matches(|c: char| c.is_ascii_digit()).trim_start().starts_with('|'))
        .collect::<Vec<_>>()
        .join(" ")
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let chain: Vec<String> = err.chain().map(|e| one_line(&e.to_string())).collect();
            eprintln!("error: {}", chain.join(": "));
            ExitCode::FAILURE
        }
    }
}
