//! Command-line front end. Every numeric flag is checked before any file is
//! read or written; outputs are written to a temporary sibling and renamed
//! into place, so a failed command leaves no partial file behind.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dtransform_core::experiment::{self, SweepOptions};
use dtransform_core::neural::{self, DEFAULT_LEARNING_RATE};
use dtransform_core::resynth::{self, DEFAULT_INNER_FRACTION, DEFAULT_PASSES};
use dtransform_core::synth::QuasiSpeech;
use dtransform_core::{
    audio, degrade, framing, metrics, resample, AudioSignal, Autoencoder, DegradeSpec, Error,
    ResynthConfig, TrainConfig,
};
use thiserror::Error;

use crate::model_file::{self, ModelFileError};
use crate::parallel::PoolExecutor;
use crate::records;
use crate::wav::{self, WavError};

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_DIVERGED: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Wav(#[from] WavError),
    #[error(transparent)]
    Model(#[from] ModelFileError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Records(#[from] records::RecordsError),
    #[error(transparent)]
    Diverged(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Diverged(_) => EXIT_DIVERGED,
            CliError::Wav(_) | CliError::Model(_) | CliError::Io { .. } | CliError::Records(_) => {
                EXIT_IO
            }
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Diverged { .. } => CliError::Diverged(e),
            other => CliError::Validation(other.to_string()),
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

#[derive(Debug, Parser)]
#[command(
    name = "dtransform",
    version,
    about = "Restore degraded speech with a convolutive autoencoder deep transform"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train an autoencoder on clean speech and write a model file.
    Train(TrainArgs),
    /// Replace a fraction of samples with matched Gaussian noise.
    Degrade(DegradeArgs),
    /// Restore a degraded recording by probabilistic re-synthesis.
    Restore(RestoreArgs),
    /// Print the signal-to-distortion ratio of an estimate, in dB.
    Sdr(SdrArgs),
    /// Run an SDR sweep over pass count or degradation level.
    Sweep(SweepArgs),
    /// Write synthetic voiced-speech test material.
    Synth(SynthArgs),
}

/// Full-scale training recipe.
const PAPER_RATE: u32 = 4000;
const PAPER_FRAME: usize = 1000;
const PAPER_TRAIN_HOP: usize = 10;
const PAPER_HIDDEN: usize = 2500;
const PAPER_EPOCHS: usize = 600;

/// Laptop-sized recipe selected by `--desk-scale`.
const DESK_RATE: u32 = 8000;
const DESK_FRAME: usize = 128;
const DESK_TRAIN_HOP: usize = 4;
const DESK_HIDDEN: usize = 320;
const DESK_EPOCHS: usize = 50;

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Clean training speech (PCM WAV).
    pub clean_wav: PathBuf,
    /// Where to write the model.
    pub model_out: PathBuf,
    /// Working sample rate; input is decimated to it [default: 4000, desk: 8000]
    #[arg(long)]
    pub rate: Option<u32>,
    /// Frame length in samples [default: 1000, desk: 128]
    #[arg(long)]
    pub frame_len: Option<usize>,
    /// Hop between training frames [default: 10, desk: 4]
    #[arg(long)]
    pub hop: Option<usize>,
    /// Hidden units [default: 2500, desk: 320]
    #[arg(long)]
    pub hidden: Option<usize>,
    /// Full SGD sweeps over the training frames [default: 600, desk: 50]
    #[arg(long)]
    pub epochs: Option<usize>,
    /// SGD step size
    #[arg(long, default_value_t = DEFAULT_LEARNING_RATE)]
    pub lr: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Visit frames in order instead of reshuffling every epoch.
    #[arg(long)]
    pub no_shuffle: bool,
    /// Use the laptop preset: rate 8000, frame 128, hidden 320, hop 4,
    /// epochs 50. Explicit flags still win.
    #[arg(long)]
    pub desk_scale: bool,
}

#[derive(Debug, Args)]
pub struct DegradeArgs {
    pub in_wav: PathBuf,
    pub out_wav: PathBuf,
    /// Fraction of samples to replace, in [0, 1].
    #[arg(long)]
    pub fraction: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct RestoreArgs {
    pub degraded_wav: PathBuf,
    pub model: PathBuf,
    pub out_wav: PathBuf,
    /// Re-synthesis passes per frame.
    #[arg(long, default_value_t = DEFAULT_PASSES)]
    pub n: usize,
    /// Share of each frame re-randomized before every pass.
    #[arg(long, default_value_t = DEFAULT_INNER_FRACTION)]
    pub inner_fraction: f64,
    /// Hop between frames.
    #[arg(long, default_value_t = 1)]
    pub hop: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Decimate the input to this rate first.
    #[arg(long)]
    pub rate: Option<u32>,
    /// Worker threads; 0 uses every core. Output is identical for any value.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct SdrArgs {
    pub reference_wav: PathBuf,
    pub estimate_wav: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepMode {
    /// SDR against pass count at one degradation level.
    N,
    /// SDR against degradation level at one pass count.
    Degradation,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Clean test speech; it is degraded and restored at every grid point.
    pub clean_wav: PathBuf,
    pub model: PathBuf,
    pub csv_out: PathBuf,
    #[arg(long, value_enum)]
    pub mode: SweepMode,
    /// Degradation levels for degradation mode [default: 0.05,0.10,...,0.95]
    #[arg(long, value_delimiter = ',')]
    pub fractions: Vec<f64>,
    /// Degradation level for n mode.
    #[arg(long, default_value_t = experiment::DEFAULT_N_SWEEP_FRACTION)]
    pub fraction: f64,
    /// Pass counts for n mode [default: 1,2,5,10,20,50,100,200,500,1000]
    #[arg(long, value_delimiter = ',')]
    pub n_grid: Vec<usize>,
    /// Pass count for degradation mode.
    #[arg(long, default_value_t = experiment::DEFAULT_SWEEP_PASSES)]
    pub n: usize,
    /// Number of outer seeds, counting up from --seed.
    #[arg(long, default_value_t = experiment::DEFAULT_SEED_COUNT)]
    pub seeds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_INNER_FRACTION)]
    pub inner_fraction: f64,
    #[arg(long, default_value_t = 1)]
    pub hop: usize,
    #[arg(long)]
    pub rate: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub out_wav: PathBuf,
    #[arg(long, default_value_t = 60.0)]
    pub seconds: f64,
    #[arg(long, default_value_t = 8000)]
    pub rate: u32,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(a) => cmd_train(&a),
        Command::Degrade(a) => cmd_degrade(&a),
        Command::Restore(a) => cmd_restore(&a),
        Command::Sdr(a) => cmd_sdr(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Synth(a) => cmd_synth(&a),
    }
}

/// Writes through `write` to a temporary sibling of `path`, then renames.
fn write_atomically(
    path: &Path,
    write: impl FnOnce(&Path) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    if let Err(e) = write(&tmp) {
        let _ = fs::remove_file(&tmp);
        return Err(e);
    }
    fs::rename(&tmp, path).map_err(|source| {
        let _ = fs::remove_file(&tmp);
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    })
}

fn write_wav_file(signal: &AudioSignal, path: &Path) -> Result<(), CliError> {
    write_atomically(path, |tmp| Ok(wav::write_wav(signal, tmp)?))
}

fn check_fraction(name: &str, value: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(invalid(format!("--{name} must lie in [0, 1], got {value}")))
    }
}

fn check_positive(name: &str, value: usize) -> Result<(), CliError> {
    if value >= 1 {
        Ok(())
    } else {
        Err(invalid(format!("--{name} must be at least 1")))
    }
}

fn read_at_rate(path: &Path, rate: Option<u32>) -> Result<AudioSignal, CliError> {
    let signal = wav::read_wav(path)?;
    match rate {
        Some(r) => Ok(resample::decimate(&signal, r)?),
        None => Ok(signal),
    }
}

fn pool(threads: usize) -> Result<PoolExecutor, CliError> {
    PoolExecutor::new(threads).map_err(|e| invalid(format!("cannot start thread pool: {e}")))
}

/// Resolved training parameters after applying the preset and overrides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainPlan {
    pub rate: u32,
    pub frame_len: usize,
    pub hop: usize,
    pub hidden: usize,
    pub config: TrainConfig,
}

impl TrainArgs {
    pub fn plan(&self) -> Result<TrainPlan, CliError> {
        let desk = self.desk_scale;
        let pick = |v: Option<usize>, paper: usize, small: usize| {
            v.unwrap_or(if desk { small } else { paper })
        };
        let plan = TrainPlan {
            rate: self
                .rate
                .unwrap_or(if desk { DESK_RATE } else { PAPER_RATE }),
            frame_len: pick(self.frame_len, PAPER_FRAME, DESK_FRAME),
            hop: pick(self.hop, PAPER_TRAIN_HOP, DESK_TRAIN_HOP),
            hidden: pick(self.hidden, PAPER_HIDDEN, DESK_HIDDEN),
            config: TrainConfig {
                learning_rate: self.lr,
                epochs: pick(self.epochs, PAPER_EPOCHS, DESK_EPOCHS),
                seed: self.seed,
                shuffle: !self.no_shuffle,
            },
        };
        if plan.rate == 0 {
            return Err(invalid("--rate must be positive"));
        }
        check_positive("frame-len", plan.frame_len)?;
        check_positive("hop", plan.hop)?;
        check_positive("hidden", plan.hidden)?;
        check_positive("epochs", plan.config.epochs)?;
        if u32::try_from(plan.frame_len).is_err() || u32::try_from(plan.hidden).is_err() {
            return Err(invalid("layer sizes must fit in 32 bits"));
        }
        plan.config.validate()?;
        Ok(plan)
    }
}

pub fn cmd_train(args: &TrainArgs) -> Result<(), CliError> {
    let plan = args.plan()?;
    let clean = read_at_rate(&args.clean_wav, Some(plan.rate))?;
    let norm = audio::fit_norm(&clean)?;
    let frames = framing::frame(&audio::normalize(&clean, &norm), plan.frame_len, plan.hop)?;
    println!(
        "training {}x{}x{} on {} frames ({:.1} s at {} Hz), {} epochs, lr {}",
        plan.frame_len,
        plan.hidden,
        plan.frame_len,
        frames.len(),
        clean.duration_secs(),
        plan.rate,
        plan.config.epochs,
        plan.config.learning_rate
    );
    let model = Autoencoder::init(plan.frame_len, plan.hidden, plan.config.seed)?.with_norm(norm);
    let start = Instant::now();
    let (model, _) = neural::train_with_progress(model, &frames, &plan.config, |epoch, loss| {
        println!("epoch {epoch:>4}  loss {loss:.6e}");
    })?;
    println!("trained in {:.1} s", start.elapsed().as_secs_f64());
    write_atomically(&args.model_out, |tmp| Ok(model_file::save(&model, tmp)?))
}

pub fn cmd_degrade(args: &DegradeArgs) -> Result<(), CliError> {
    check_fraction("fraction", args.fraction)?;
    let input = wav::read_wav(&args.in_wav)?;
    let spec = DegradeSpec::matched(&input, args.fraction, args.seed)?;
    println!(
        "noise mean {:.6} std {:.6}; replacing {} of {} samples",
        spec.noise_mean(),
        spec.noise_std(),
        degrade::replacement_count(input.len(), spec.fraction()),
        input.len()
    );
    let out = degrade::degrade(&input, &spec);
    write_wav_file(&out, &args.out_wav)
}

pub fn cmd_restore(args: &RestoreArgs) -> Result<(), CliError> {
    check_positive("n", args.n)?;
    check_positive("hop", args.hop)?;
    check_fraction("inner-fraction", args.inner_fraction)?;
    let cfg = ResynthConfig::new(args.n, args.inner_fraction, args.seed)?;
    let exec = pool(args.threads)?;
    let model = model_file::load(&args.model)?;
    let degraded = read_at_rate(&args.degraded_wav, args.rate)?;
    let start = Instant::now();
    let restored = resynth::correct_with(&model, &degraded, &cfg, args.hop, &exec)?;
    println!(
        "restored {} frames of {} samples ({} passes each) in {:.2} s on {} threads",
        framing::frame_count(degraded.len(), model.frame_len(), args.hop),
        model.frame_len(),
        args.n,
        start.elapsed().as_secs_f64(),
        exec.threads()
    );
    write_wav_file(&restored, &args.out_wav)
}

/// SDR of the mean-removed signals over their full common length.
pub fn cmd_sdr(args: &SdrArgs) -> Result<(), CliError> {
    let reference = wav::read_wav(&args.reference_wav)?;
    let estimate = wav::read_wav(&args.estimate_wav)?;
    if reference.len() != estimate.len() {
        return Err(invalid(format!(
            "length mismatch: reference has {} samples, estimate {}",
            reference.len(),
            estimate.len()
        )));
    }
    let report = metrics::sdr_centered(reference.samples(), estimate.samples(), reference.len())?;
    println!("{:.2}", report.sdr_db);
    Ok(())
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    check_positive("seeds", args.seeds)?;
    check_positive("hop", args.hop)?;
    check_positive("n", args.n)?;
    check_fraction("inner-fraction", args.inner_fraction)?;
    check_fraction("fraction", args.fraction)?;
    let fractions = if args.fractions.is_empty() {
        experiment::default_fractions()
    } else {
        args.fractions.clone()
    };
    for &f in &fractions {
        check_fraction("fractions", f)?;
    }
    let n_grid = if args.n_grid.is_empty() {
        experiment::DEFAULT_N_GRID.to_vec()
    } else {
        args.n_grid.clone()
    };
    for &n in &n_grid {
        check_positive("n-grid", n)?;
    }
    let seeds: Vec<u64> = (0..args.seeds as u64)
        .map(|k| args.seed.wrapping_add(k))
        .collect();
    let opts = SweepOptions {
        inner_fraction: args.inner_fraction,
        hop: args.hop,
    };
    let exec = pool(args.threads)?;
    let model = model_file::load(&args.model)?;
    let clean = read_at_rate(&args.clean_wav, args.rate)?;

    let start = Instant::now();
    let records = match args.mode {
        SweepMode::N => {
            experiment::sweep_n(&model, &clean, args.fraction, &n_grid, &seeds, opts, &exec)?
        }
        SweepMode::Degradation => {
            experiment::sweep_degradation(&model, &clean, &fractions, args.n, &seeds, opts, &exec)?
        }
    };
    for r in &records {
        println!(
            "fraction {:.2}  N {:>4}  seed {:>3}  degraded {:>7.2} dB  corrected {:>7.2} dB",
            r.degradation_fraction, r.n_passes, r.seed, r.sdr_degraded_db, r.sdr_corrected_db
        );
    }
    println!(
        "{} grid points in {:.1} s",
        records.len(),
        start.elapsed().as_secs_f64()
    );
    if args.mode == SweepMode::Degradation {
        match experiment::improvement_correlation(&records) {
            Ok(r) => println!("pearson r (fraction vs improvement) = {r:.4}"),
            Err(e) => println!("pearson r unavailable: {e}"),
        }
    }
    write_atomically(&args.csv_out, |tmp| {
        let file = fs::File::create(tmp).map_err(|source| CliError::Io {
            path: tmp.display().to_string(),
            source,
        })?;
        records::write_records(std::io::BufWriter::new(file), &records)?;
        Ok(())
    })
}

pub fn cmd_synth(args: &SynthArgs) -> Result<(), CliError> {
    if !(args.seconds.is_finite() && args.seconds > 0.0) {
        return Err(invalid("--seconds must be positive"));
    }
    if args.rate == 0 {
        return Err(invalid("--rate must be positive"));
    }
    let signal = QuasiSpeech::default().generate(args.seconds, args.rate)?;
    write_wav_file(&signal, &args.out_wav)
}
