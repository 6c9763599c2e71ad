use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "kiq", version, about = "Spin-ensemble and single-spin readout simulations, batch mode")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spin-flip qubit shift over spin distance and bias field.
    Fig4(RunArgs),
    /// Magnetization curve and spin temperature from a field sweep.
    Extract(RunArgs),
    /// Seeded synthetic field sweep.
    Synthesize(RunArgs),
    /// Two-tone steady-state magnetization map and ESR ridge.
    Twotone(RunArgs),
    /// Decay from saturation, simulated and refitted.
    Decay(RunArgs),
    /// Notch-resonator fit of a complex transmission trace.
    Fitres(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fig4(_) => "fig4",
            Command::Extract(_) => "extract",
            Command::Synthesize(_) => "synthesize",
            Command::Twotone(_) => "twotone",
            Command::Decay(_) => "decay",
            Command::Fitres(_) => "fitres",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Fig4(a)
            | Command::Extract(a)
            | Command::Synthesize(a)
            | Command::Twotone(a)
            | Command::Decay(a)
            | Command::Fitres(a) => a,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON run config.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for the payload files and envelope.json; created if absent.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Overrides the config's seed for commands that draw noise.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for parallel sweeps; 0 picks one per core.
    #[arg(long, env = "KIQ_THREADS")]
    pub threads: Option<usize>,
}
