use dtransform_core::degrade::{degrade, match_noise_stats};
use dtransform_core::metrics::sdr_centered;
use dtransform_core::synth::QuasiSpeech;
use dtransform_core::{AudioSignal, DegradeSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn differing(a: &AudioSignal, b: &AudioSignal) -> usize {
    a.samples()
        .iter()
        .zip(b.samples())
        .filter(|(x, y)| x != y)
        .count()
}

#[test]
fn recovers_gaussian_stats() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let normal = Normal::new(0.1, 0.3).unwrap();
    let xs: Vec<f64> = (0..1_000_000).map(|_| normal.sample(&mut rng)).collect();
    let (mean, std) = match_noise_stats(&AudioSignal::new(xs, 4000).unwrap()).unwrap();
    assert!((mean - 0.1).abs() < 0.01 * 0.1, "{mean}");
    assert!((std - 0.3).abs() < 0.01 * 0.3, "{std}");
}

#[test]
fn full_replacement_matches_spec_statistics() {
    let n = 100_000;
    let clean = AudioSignal::new(vec![0.0; n], 4000).unwrap();
    let (mu, sigma) = (0.05, 0.2);
    let out = degrade(&clean, &DegradeSpec::new(1.0, mu, sigma, 17).unwrap());
    let (mean, std) = match_noise_stats(&out).unwrap();
    let se_mean = sigma / (n as f64).sqrt();
    let se_std = sigma / (2.0 * (n as f64 - 1.0)).sqrt();
    assert!((mean - mu).abs() < 3.0 * se_mean, "mean {mean}");
    assert!((std - sigma).abs() < 3.0 * se_std, "std {std}");
}

#[test]
fn half_replacement_count_contract() {
    let n = 40_000;
    let clean = QuasiSpeech::default().generate(5.0, 8000).unwrap();
    assert_eq!(clean.len(), n);
    let spec = DegradeSpec::matched(&clean, 0.5, 5).unwrap();
    let changed = differing(&clean, &degrade(&clean, &spec));
    assert_eq!(changed, 20_000);
}

#[test]
fn deterministic_and_seed_sensitive() {
    let clean = QuasiSpeech::default().generate(1.0, 8000).unwrap();
    let a = degrade(&clean, &DegradeSpec::matched(&clean, 0.1, 7).unwrap());
    let b = degrade(&clean, &DegradeSpec::matched(&clean, 0.1, 7).unwrap());
    let c = degrade(&clean, &DegradeSpec::matched(&clean, 0.1, 8).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn degraded_sdr_non_increasing_in_fraction() {
    let clean = QuasiSpeech::default().generate(2.0, 8000).unwrap();
    for seed in 0..3 {
        let mut last = f64::INFINITY;
        for k in 1..=19 {
            let fraction = f64::from(k) / 20.0;
            let d = degrade(
                &clean,
                &DegradeSpec::matched(&clean, fraction, seed).unwrap(),
            );
            let sdr = sdr_centered(clean.samples(), d.samples(), clean.len())
                .unwrap()
                .sdr_db;
            assert!(
                sdr <= last,
                "seed {seed} fraction {fraction}: {sdr} > {last}"
            );
            last = sdr;
        }
    }
}
