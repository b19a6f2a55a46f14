use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use diverscope::commands::{self, FeatureSource, MsSsimArgs};
use diverscope::core::aiin::Interpolation;
use diverscope::core::inception::DEFAULT_SPLITS;
use diverscope::core::msssim::DEFAULT_PAIRS;
use diverscope::core::sim::SimSpec;

/// Adaptive normalization and diversity metrics for image datasets.
///
/// Machine-readable JSON goes to standard output, progress to standard
/// error. Set DIVERSCOPE_THREADS to cap parallelism.
#[derive(Parser)]
#[command(name = "diverscope", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum InterpArg {
    Bilinear,
    Hard,
}

#[derive(Clone, Copy, ValueEnum)]
enum FeaturesArg {
    Pixel,
    File,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize every image in a directory into 8-bit grayscale PNGs.
    Normalize {
        in_dir: PathBuf,
        out_dir: PathBuf,
        /// Tiles per axis.
        #[arg(long, default_value_t = 8)]
        grid: usize,
        /// Contrast threshold; 0 disables clipping.
        #[arg(long, default_value_t = 20.0)]
        threshold: f64,
        #[arg(long, value_enum, default_value_t = InterpArg::Bilinear)]
        interpolation: InterpArg,
    },
    /// Mean MS-SSIM over random pairs; with two directories, the intra-class
    /// collapse report (first is real, second synthetic).
    Msssim {
        dir_a: PathBuf,
        dir_b: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_PAIRS)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Resize every image to WxH before scoring.
        #[arg(long, value_parser = parse_dims)]
        resize: Option<(usize, usize)>,
        /// Write per-pair scores of the first dataset as CSV.
        #[arg(long)]
        pair_scores: Option<PathBuf>,
    },
    /// Fréchet distance between two sets of features.
    Fid {
        real: PathBuf,
        synth: PathBuf,
        /// `pixel`: arguments are image directories; `file`: FVEC1 or CSV
        /// feature files.
        #[arg(long, value_enum, default_value_t = FeaturesArg::Pixel)]
        features: FeaturesArg,
    },
    /// Inception Score of a class-probability file.
    Is {
        probs: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SPLITS)]
        splits: usize,
        /// Probabilities of the real set, for the inter-class collapse report.
        #[arg(long)]
        real: Option<PathBuf>,
    },
    /// Run a parameter sweep described by a JSON config.
    Sweep {
        config: PathBuf,
        #[arg(long, default_value = "sweep-out")]
        out: PathBuf,
    },
    /// Write a synthetic dataset with an exact number of modes.
    Simulate {
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 128)]
        side: usize,
        #[arg(long, default_value_t = 8)]
        noise: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the oracle classifier's probabilities here.
        #[arg(long)]
        probs: Option<PathBuf>,
    },
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got '{s}'"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("'{v}': {e}"));
    Ok((parse(w)?, parse(h)?))
}

fn threads_from_env() -> anyhow::Result<Option<usize>> {
    match std::env::var("DIVERSCOPE_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .with_context(|| format!("DIVERSCOPE_THREADS='{v}' is not a positive integer"))?;
            anyhow::ensure!(n > 0, "DIVERSCOPE_THREADS must be at least 1");
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> anyhow::Result<serde_json::Value> {
    let threads = threads_from_env()?;
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring thread pool")?;
    }
    let value = match cli.command {
        Command::Normalize {
            in_dir,
            out_dir,
            grid,
            threshold,
            interpolation,
        } => {
            let mode = match interpolation {
                InterpArg::Bilinear => Interpolation::BilinearStitch,
                InterpArg::Hard => Interpolation::PerTileHard,
            };
            commands::normalize(&in_dir, &out_dir, grid, threshold, mode)?
        }
        Command::Msssim {
            dir_a,
            dir_b,
            pairs,
            seed,
            resize,
            pair_scores,
        } => commands::msssim(&MsSsimArgs {
            dir_a: &dir_a,
            dir_b: dir_b.as_deref(),
            pairs,
            seed,
            resize,
            pair_scores: pair_scores.as_deref(),
        })?,
        Command::Fid {
            real,
            synth,
            features,
        } => {
            let source = match features {
                FeaturesArg::Pixel => FeatureSource::Pixel,
                FeaturesArg::File => FeatureSource::File,
            };
            commands::fid(&real, &synth, source)?
        }
        Command::Is {
            probs,
            splits,
            real,
        } => commands::is(&probs, splits, real.as_deref())?,
        Command::Sweep { config, out } => commands::sweep(&config, &out, None)?,
        Command::Simulate {
            out_dir,
            k,
            n,
            side,
            noise,
            seed,
            probs,
        } => {
            let spec = SimSpec {
                k_modes: k,
                n_images: n,
                side,
                noise_amp: noise,
                seed,
            };
            commands::simulate(&spec, &out_dir, probs.as_deref())?
        }
    };
    Ok(value)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(value) => {
            println!(
                "{}",
                serde_json::to_string_pretty(&value).expect("json value")
            );
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
