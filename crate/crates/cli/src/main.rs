//! `polarlink`: polar-code link simulations from the command line.
//!
//! Settings come from flags, then from an optional `key=value` config file
//! (`--config`), then from built-in defaults. Config keys are the long flag
//! names without the leading dashes.

mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser};
use polarlink_core::sim::{emit_plot, ConstructionMode, ExperimentOutput};
use polarlink_core::{run_experiment, DecoderKind, Engine, Error, ExperimentConfig, ExperimentKind};

use crate::config::{Settings, CONFIG_ERROR, IO_ERROR};

#[derive(Parser, Debug)]
#[command(name = "polarlink", version, about = "Polar-code BER sweeps, construction and design-SNR tools")]
struct Cli {
    /// awgn-ber, fading-ber, adapt-ber, construct, design-snr, asymptotic or plot
    experiment: String,

    #[command(flatten)]
    opts: Opts,
}

#[derive(Args, Debug, Default)]
pub struct Opts {
    /// key=value file with defaults for any of the flags below
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Block length N (power of two)
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub rate: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_start: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_stop: Option<String>,
    #[arg(long)]
    pub snr_step: Option<String>,
    /// design-snr, point, converted or file:<path>
    #[arg(long)]
    pub construction: Option<String>,
    /// Ranking engine: ga or mc
    #[arg(long)]
    pub engine: Option<String>,
    /// Genie-aided iterations for --engine mc
    #[arg(long)]
    pub mc_iters: Option<String>,
    /// Systematic encoding; accepts an optional true/false
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub systematic: Option<String>,
    /// exact or minsum
    #[arg(long)]
    pub decoder: Option<String>,
    /// halfnormal or fixedmu:<v>
    #[arg(long)]
    pub dist: Option<String>,
    /// Equivalent-SNR rule for --construction converted: mean or minus8
    #[arg(long)]
    pub offset: Option<String>,
    /// Capacity used by rate adaptation: mean or minus8
    #[arg(long)]
    pub capacity_rule: Option<String>,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub cap_m: Option<String>,
    /// Codewords per fading realization
    #[arg(long)]
    pub nb: Option<String>,
    /// Maximum blocks per SNR point
    #[arg(long)]
    pub blocks: Option<String>,
    /// Stop a point once this many bit errors accumulate
    #[arg(long)]
    pub max_bit_errors: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    pub workers: Option<String>,
    /// Output file; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where `construct` writes the reliability order (defaults to --out)
    #[arg(long)]
    pub qs_out: Option<PathBuf>,
    /// Also write an SVG chart of the result
    #[arg(long)]
    pub plot_out: Option<PathBuf>,
    /// CSV inputs for `plot`
    #[arg(long = "csv")]
    pub csv: Vec<PathBuf>,
    /// Curve labels for `plot`, one per --csv
    #[arg(long = "label")]
    pub label: Vec<String>,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io { .. } => IO_ERROR,
        _ => CONFIG_ERROR,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    if cli.experiment == "plot" {
        let out = cli
            .opts
            .out
            .as_ref()
            .ok_or_else(|| Error::Config("plot needs --out".into()))?;
        return emit_plot(&cli.opts.csv, &cli.opts.label, out);
    }
    let kind: ExperimentKind = cli.experiment.parse()?;
    let settings = Settings::load(&cli.opts)?;
    let cfg = settings.experiment(kind)?;
    let output = run_experiment(&cfg)?;

    let target = match (&output, settings.path("qs-out")) {
        (ExperimentOutput::Order(_), Some(path)) => Some(path),
        _ => settings.path("out"),
    };
    match target {
        Some(path) => output.write(&path)?,
        None => print!("{}", output.render()?),
    }
    if let Some(path) = settings.path("plot-out") {
        let label = chart_label(&cfg);
        match output.chart(&label)? {
            Some(svg) => std::fs::write(&path, svg).map_err(|e| Error::Io { path, source: e })?,
            None => return Err(Error::Config(format!("{} has nothing to plot", kind.name()))),
        }
    }
    Ok(())
}

fn chart_label(cfg: &ExperimentConfig) -> String {
    let construction = match &cfg.construction {
        ConstructionMode::Point => "point".to_string(),
        ConstructionMode::Converted => "converted".to_string(),
        ConstructionMode::DesignSnr => "design-snr".to_string(),
        ConstructionMode::File(p) => p.display().to_string(),
    };
    let engine = match cfg.engine {
        Engine::Ga => "",
        Engine::Mc => ", mc",
    };
    let decoder = match cfg.decoder {
        DecoderKind::Exact => "",
        DecoderKind::MinSum => ", min-sum",
    };
    format!(
        "{} {}, {}{engine}{decoder}",
        cfg.kind.name(),
        if cfg.systematic { "sys" } else { "non-sys" },
        construction
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { CONFIG_ERROR } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("polarlink: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
