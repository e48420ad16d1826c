//! SDR sweeps over re-synthesis pass count and degradation level.

use alloc::vec::Vec;

use crate::audio::AudioSignal;
use crate::degrade::{self, DegradeSpec};
use crate::error::{Error, Result};
use crate::exec::FrameExecutor;
use crate::framing;
use crate::metrics::{self, pearson};
use crate::neural::Autoencoder;
use crate::resynth::{self, ResynthConfig};
use crate::rng;

/// Pass counts for the N sweep.
pub const DEFAULT_N_GRID: [usize; 10] = [1, 2, 5, 10, 20, 50, 100, 200, 500, 1000];
/// Pass count for the degradation sweep.
pub const DEFAULT_SWEEP_PASSES: usize = 100;
/// Degradation level for the N sweep.
pub const DEFAULT_N_SWEEP_FRACTION: f64 = 0.1;
pub const DEFAULT_SEED_COUNT: usize = 5;

/// Degradation levels 5 %, 10 %, ..., 95 %.
pub fn default_fractions() -> Vec<f64> {
    (1..=19).map(|k| f64::from(k) / 20.0).collect()
}

/// One grid point. Field order is the CSV column order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRecord {
    pub degradation_fraction: f64,
    pub n_passes: usize,
    pub seed: u64,
    pub sdr_degraded_db: f64,
    pub sdr_corrected_db: f64,
}

impl SweepRecord {
    pub fn improvement_db(&self) -> f64 {
        self.sdr_corrected_db - self.sdr_degraded_db
    }
}

/// Settings shared by every grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub inner_fraction: f64,
    pub hop: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            inner_fraction: resynth::DEFAULT_INNER_FRACTION,
            hop: 1,
        }
    }
}

/// Re-synthesis seed paired with an outer seed. Kept apart from the
/// degradation seed so the two random streams never coincide.
pub fn resynth_seed(outer_seed: u64) -> u64 {
    rng::mix(outer_seed)
}

struct Scorer<'a> {
    model: &'a Autoencoder,
    clean: &'a AudioSignal,
    covered: usize,
    noise: (f64, f64),
    opts: SweepOptions,
    exec: &'a dyn FrameExecutor,
}

impl<'a> Scorer<'a> {
    fn new(
        model: &'a Autoencoder,
        clean: &'a AudioSignal,
        opts: SweepOptions,
        exec: &'a dyn FrameExecutor,
    ) -> Result<Self> {
        if clean.len() < model.frame_len() {
            return Err(Error::SignalTooShort {
                len: clean.len(),
                frame_len: model.frame_len(),
            });
        }
        if opts.hop == 0 {
            return Err(Error::InvalidParameter {
                name: "hop",
                reason: "must be at least 1",
            });
        }
        Ok(Self {
            model,
            clean,
            covered: framing::covered_len(clean.len(), model.frame_len(), opts.hop),
            noise: degrade::match_noise_stats(clean)?,
            opts,
            exec,
        })
    }

    fn degrade(&self, fraction: f64, seed: u64) -> Result<(AudioSignal, f64)> {
        let spec = DegradeSpec::new(fraction, self.noise.0, self.noise.1, seed)?;
        let degraded = degrade::degrade(self.clean, &spec);
        let score = self.score(&degraded)?;
        Ok((degraded, score))
    }

    fn score(&self, estimate: &AudioSignal) -> Result<f64> {
        Ok(metrics::sdr_centered(self.clean.samples(), estimate.samples(), self.covered)?.sdr_db)
    }

    fn corrected(&self, degraded: &AudioSignal, n_passes: usize, seed: u64) -> Result<f64> {
        let cfg = ResynthConfig::new(n_passes, self.opts.inner_fraction, resynth_seed(seed))?;
        let restored = resynth::correct_with(self.model, degraded, &cfg, self.opts.hop, self.exec)?;
        self.score(&restored)
    }
}

fn sort_records(records: &mut [SweepRecord]) {
    records.sort_by(|a, b| {
        a.degradation_fraction
            .total_cmp(&b.degradation_fraction)
            .then(a.n_passes.cmp(&b.n_passes))
            .then(a.seed.cmp(&b.seed))
    });
}

/// SDR against pass count at one degradation level. Each seed degrades the
/// clean signal once and every pass count restores that same degraded copy.
pub fn sweep_n(
    model: &Autoencoder,
    clean_test: &AudioSignal,
    fraction: f64,
    n_values: &[usize],
    seeds: &[u64],
    opts: SweepOptions,
    exec: &dyn FrameExecutor,
) -> Result<Vec<SweepRecord>> {
    let scorer = Scorer::new(model, clean_test, opts, exec)?;
    let mut records = Vec::with_capacity(n_values.len() * seeds.len());
    for &seed in seeds {
        let (degraded, sdr_degraded_db) = scorer.degrade(fraction, seed)?;
        for &n_passes in n_values {
            records.push(SweepRecord {
                degradation_fraction: fraction,
                n_passes,
                seed,
                sdr_degraded_db,
                sdr_corrected_db: scorer.corrected(&degraded, n_passes, seed)?,
            });
        }
    }
    sort_records(&mut records);
    Ok(records)
}

/// SDR against degradation level at a fixed pass count.
pub fn sweep_degradation(
    model: &Autoencoder,
    clean_test: &AudioSignal,
    fractions: &[f64],
    n_passes: usize,
    seeds: &[u64],
    opts: SweepOptions,
    exec: &dyn FrameExecutor,
) -> Result<Vec<SweepRecord>> {
    let scorer = Scorer::new(model, clean_test, opts, exec)?;
    let mut records = Vec::with_capacity(fractions.len() * seeds.len());
    for &fraction in fractions {
        for &seed in seeds {
            let (degraded, sdr_degraded_db) = scorer.degrade(fraction, seed)?;
            records.push(SweepRecord {
                degradation_fraction: fraction,
                n_passes,
                seed,
                sdr_degraded_db,
                sdr_corrected_db: scorer.corrected(&degraded, n_passes, seed)?,
            });
        }
    }
    sort_records(&mut records);
    Ok(records)
}

/// Pearson r between degradation fraction and SDR improvement, taken over
/// every record.
pub fn improvement_correlation(records: &[SweepRecord]) -> Result<f64> {
    let x: Vec<f64> = records.iter().map(|r| r.degradation_fraction).collect();
    let y: Vec<f64> = records.iter().map(SweepRecord::improvement_db).collect();
    pearson(&x, &y)
}

/// Median of `values`; the mean of the middle two for even counts.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}

/// Median corrected SDR per pass count, in ascending pass-count order.
pub fn median_corrected_by_n(records: &[SweepRecord]) -> Vec<(usize, f64)> {
    let mut ns: Vec<usize> = records.iter().map(|r| r.n_passes).collect();
    ns.sort_unstable();
    ns.dedup();
    ns.into_iter()
        .map(|n| {
            let v: Vec<f64> = records
                .iter()
                .filter(|r| r.n_passes == n)
                .map(|r| r.sdr_corrected_db)
                .collect();
            (n, median(&v).expect("at least one record per n"))
        })
        .collect()
}
