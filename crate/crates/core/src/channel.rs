//! Simulated on-off-keyed optical link.
//!
//! Synthesizes detector-intensity traces for random OOK bit streams under
//! three impairments:
//!
//! - **Pseudo-thermal background**: the squared modulus of a correlated
//!   complex Gaussian field, giving exponential intensity marginals
//!   (normalized variance 1), as produced by a rotating-ground-glass source.
//! - **Log-normal fading**: a stationary exponentiated Gaussian AR(1)
//!   process with unit mean and normalized variance equal to the configured
//!   scintillation index, multiplying signal and background jointly.
//! - **Additive detector noise**: zero-mean Gaussian, off by default.
//!
//! All randomness flows through an explicit RNG value, so identical
//! `(config, seed)` pairs reproduce traces bit for bit, and disjoint
//! waveforms can be synthesized in parallel on independently derived
//! streams.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;

/// Full parameterization of the simulated link.
///
/// Intensities are in arbitrary units; correlation lengths are in samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    /// Detector samples spanning one bit slot.
    pub samples_per_bit: usize,
    /// Peak intensity of an ON bit.
    pub bit_amplitude: f64,
    /// Mean intensity of the thermal background.
    pub thermal_mean: f64,
    /// Correlation length of the thermal field, in samples.
    pub thermal_corr: f64,
    /// Whether the fading process is applied at all.
    pub turbulence_enabled: bool,
    /// Normalized intensity variance Var(I)/E[I]² of the fading process.
    pub scintillation_index: f64,
    /// Correlation length of the fading process, in samples.
    pub turbulence_corr: f64,
    /// Standard deviation of additive detector noise.
    pub detector_noise_std: f64,
    /// Base seed for all randomness derived from this config.
    pub seed: u64,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            samples_per_bit: 35,
            bit_amplitude: 1.0,
            thermal_mean: 1.0,
            thermal_corr: 5.0,
            turbulence_enabled: false,
            scintillation_index: 1.8,
            turbulence_corr: 35.0,
            detector_noise_std: 0.0,
            seed: 0,
        }
    }
}

impl ChannelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples_per_bit < 1 {
            return Err(Error::Config("samples_per_bit must be >= 1".into()));
        }
        if self.bit_amplitude < 0.0 || !self.bit_amplitude.is_finite() {
            return Err(Error::Config("bit_amplitude must be finite and >= 0".into()));
        }
        if self.thermal_mean < 0.0 || !self.thermal_mean.is_finite() {
            return Err(Error::Config("thermal_mean must be finite and >= 0".into()));
        }
        if self.thermal_corr < 1.0 || !self.thermal_corr.is_finite() {
            return Err(Error::Config("thermal_corr must be finite and >= 1".into()));
        }
        if self.scintillation_index < 0.0 || !self.scintillation_index.is_finite() {
            return Err(Error::Config(
                "scintillation_index must be finite and >= 0".into(),
            ));
        }
        if self.turbulence_corr < 1.0 || !self.turbulence_corr.is_finite() {
            return Err(Error::Config("turbulence_corr must be finite and >= 1".into()));
        }
        if self.detector_noise_std < 0.0 || !self.detector_noise_std.is_finite() {
            return Err(Error::Config(
                "detector_noise_std must be finite and >= 0".into(),
            ));
        }
        Ok(())
    }

    /// Parses a config from a JSON document. Unknown keys are rejected.
    pub fn from_json(json: &str) -> Result<Self> {
        let cfg: ChannelConfig =
            serde_json::from_str(json).map_err(|e| Error::Config(format!("channel config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("channel config serializes")
    }
}

/// Signal-to-noise ratio in dB: `10·log10(bit_amplitude / thermal_mean)`.
///
/// Errors when either intensity is zero (the ratio is degenerate).
pub fn snr_db(config: &ChannelConfig) -> Result<f64> {
    if config.thermal_mean <= 0.0 {
        return Err(Error::Config(
            "snr undefined: thermal_mean must be positive".into(),
        ));
    }
    if config.bit_amplitude <= 0.0 {
        return Err(Error::Config(
            "snr undefined: bit_amplitude must be positive".into(),
        ));
    }
    Ok(10.0 * (config.bit_amplitude / config.thermal_mean).log10())
}

/// Bit amplitude that realizes `snr_db` against the given thermal mean.
pub fn amplitude_for_snr_db(thermal_mean: f64, snr_db: f64) -> f64 {
    thermal_mean * 10f64.powf(snr_db / 10.0)
}

/// A transmitted binary sequence; 0 = OFF, 1 = ON.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BitStream(Vec<u8>);

impl BitStream {
    /// Wraps a raw byte vector, rejecting anything outside {0, 1}.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Data(format!("bit value {b} outside {{0, 1}}")));
        }
        Ok(BitStream(bits))
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of ON bits.
    pub fn ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u8> {
        self.0.iter()
    }
}

impl std::ops::Index<usize> for BitStream {
    type Output = u8;
    fn index(&self, i: usize) -> &u8 {
        &self.0[i]
    }
}

/// Log-normal irradiance model: `ln I ~ N(ln I0 − σ²/2, σ²)`, so the mean
/// irradiance is exactly `mean_irradiance` and the density integrates to 1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TurbulenceModel {
    /// Mean irradiance I0.
    pub mean_irradiance: f64,
    /// Variance of ln I.
    pub log_variance: f64,
}

impl TurbulenceModel {
    pub fn new(mean_irradiance: f64, log_variance: f64) -> Result<Self> {
        if mean_irradiance <= 0.0 || !mean_irradiance.is_finite() {
            return Err(Error::Config("mean_irradiance must be positive".into()));
        }
        if log_variance < 0.0 || !log_variance.is_finite() {
            return Err(Error::Config("log_variance must be >= 0".into()));
        }
        Ok(TurbulenceModel {
            mean_irradiance,
            log_variance,
        })
    }

    /// Model with unit mean irradiance and the log-variance that realizes
    /// the given normalized intensity variance: `σ² = ln(1 + si)`.
    pub fn from_scintillation_index(si: f64) -> Result<Self> {
        if si < 0.0 || !si.is_finite() {
            return Err(Error::Config("scintillation index must be >= 0".into()));
        }
        TurbulenceModel::new(1.0, (1.0 + si).ln())
    }

    /// Normalized intensity variance implied by the log-variance.
    pub fn scintillation_index(&self) -> f64 {
        self.log_variance.exp() - 1.0
    }

    /// Probability density at intensity `i` (zero for `i <= 0`).
    pub fn density(&self, i: f64) -> f64 {
        if i <= 0.0 {
            return 0.0;
        }
        if self.log_variance == 0.0 {
            // Degenerate point mass; density is not a function here.
            return if i == self.mean_irradiance { f64::INFINITY } else { 0.0 };
        }
        let s2 = self.log_variance;
        let z = (i / self.mean_irradiance).ln() + s2 / 2.0;
        (-z * z / (2.0 * s2)).exp() / (i * (2.0 * std::f64::consts::PI * s2).sqrt())
    }
}

/// A sampled detector trace plus its ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct Waveform {
    /// Detector intensities, `truth_bits.len() * samples_per_bit` samples
    /// when a signal is present.
    pub samples: Vec<f64>,
    /// The transmitted bits; empty for noise-only traces.
    pub truth_bits: BitStream,
    /// Whether an OOK stream was transmitted at all.
    pub contains_signal: bool,
    /// The configuration the trace was synthesized under.
    pub config: ChannelConfig,
}

impl Waveform {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Number of whole bit slots spanned by the trace.
    pub fn bit_slots(&self) -> usize {
        self.samples.len() / self.config.samples_per_bit
    }

    /// The samples of bit slot `i`.
    pub fn bit_window(&self, i: usize) -> &[f64] {
        let spb = self.config.samples_per_bit;
        &self.samples[i * spb..(i + 1) * spb]
    }
}

/// `n` independent fair bits drawn from `rng`.
pub fn generate_bits<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BitStream {
    BitStream((0..n).map(|_| rng.random_range(0..2u8)).collect())
}

/// Unit-mean log-normal fading sequence with normalized variance `si`.
///
/// The underlying Gaussian is a stationary AR(1) process with mean `−σ²/2`,
/// variance `σ² = ln(1 + si)`, and autocorrelation `exp(−k/corr)` at lag `k`.
pub fn sample_turbulence<R: Rng + ?Sized>(
    n: usize,
    si: f64,
    corr: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if si < 0.0 || !si.is_finite() {
        return Err(Error::Config("scintillation index must be >= 0".into()));
    }
    if corr < 1.0 || !corr.is_finite() {
        return Err(Error::Config("correlation length must be >= 1".into()));
    }
    if si == 0.0 {
        return Ok(vec![1.0; n]);
    }
    let sigma2 = (1.0 + si).ln();
    let sigma = sigma2.sqrt();
    let mu = -sigma2 / 2.0;
    let phi = (-1.0 / corr).exp();
    let innov = sigma * (1.0 - phi * phi).sqrt();

    let mut out = Vec::with_capacity(n);
    let mut dev = 0.0f64; // centered state: G[k] - mu
    for k in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        dev = if k == 0 { sigma * z } else { phi * dev + innov * z };
        out.push((mu + dev).exp());
    }
    Ok(out)
}

/// Pseudo-thermal intensity sequence: squared modulus of a correlated
/// complex Gaussian field, exponential marginals with the requested mean.
pub fn sample_thermal<R: Rng + ?Sized>(
    n: usize,
    mean: f64,
    corr: f64,
    rng: &mut R,
) -> Result<Vec<f64>> {
    if mean < 0.0 || !mean.is_finite() {
        return Err(Error::Config("thermal mean must be >= 0".into()));
    }
    if corr < 1.0 || !corr.is_finite() {
        return Err(Error::Config("correlation length must be >= 1".into()));
    }
    let quad_std = (mean / 2.0).sqrt();
    let phi = (-1.0 / corr).exp();
    let innov = quad_std * (1.0 - phi * phi).sqrt();

    let mut out = Vec::with_capacity(n);
    let (mut re, mut im) = (0.0f64, 0.0f64);
    for k in 0..n {
        let zr: f64 = rng.sample(StandardNormal);
        let zi: f64 = rng.sample(StandardNormal);
        if k == 0 {
            re = quad_std * zr;
            im = quad_std * zi;
        } else {
            re = phi * re + innov * zr;
            im = phi * im + innov * zi;
        }
        out.push(re * re + im * im);
    }
    Ok(out)
}

/// Piecewise-constant ideal signal: `samples_per_bit` copies of
/// `bit_amplitude * b` per bit.
pub fn modulate(bits: &BitStream, config: &ChannelConfig) -> Vec<f64> {
    let spb = config.samples_per_bit;
    let mut out = Vec::with_capacity(bits.len() * spb);
    for &b in bits.iter() {
        let level = config.bit_amplitude * f64::from(b);
        out.extend(std::iter::repeat(level).take(spb));
    }
    out
}

/// Synthesizes a detector trace for the given bit stream.
///
/// Sample model: `L[k]·(s[k] + th[k]) + d[k]` with `s` the modulated signal,
/// `th` the thermal background, `L` the fading factor (identically 1 when
/// turbulence is disabled), and `d` zero-mean Gaussian detector noise.
///
/// RNG draw order is a stability contract: thermal field (2 draws per
/// sample), then detector noise (1 per sample), then fading (1 per sample,
/// only when turbulence is enabled). Toggling turbulence therefore never
/// shifts the thermal or detector draws.
pub fn compose<R: Rng + ?Sized>(
    config: &ChannelConfig,
    bits: &BitStream,
    rng: &mut R,
) -> Result<Waveform> {
    compose_impl(config, Some(bits), bits.len(), rng)
}

/// Synthesizes a noise-only trace spanning `bit_slots` bit periods.
pub fn compose_noise_only<R: Rng + ?Sized>(
    config: &ChannelConfig,
    bit_slots: usize,
    rng: &mut R,
) -> Result<Waveform> {
    compose_impl(config, None, bit_slots, rng)
}

fn compose_impl<R: Rng + ?Sized>(
    config: &ChannelConfig,
    bits: Option<&BitStream>,
    bit_slots: usize,
    rng: &mut R,
) -> Result<Waveform> {
    config.validate()?;
    let n = bit_slots * config.samples_per_bit;

    let signal = match bits {
        Some(b) => modulate(b, config),
        None => vec![0.0; n],
    };
    debug_assert_eq!(signal.len(), n);

    let thermal = sample_thermal(n, config.thermal_mean, config.thermal_corr, rng)?;
    let detector: Vec<f64> = (0..n)
        .map(|_| config.detector_noise_std * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let fading = if config.turbulence_enabled {
        sample_turbulence(n, config.scintillation_index, config.turbulence_corr, rng)?
    } else {
        vec![1.0; n]
    };

    let samples = (0..n)
        .map(|k| fading[k] * (signal[k] + thermal[k]) + detector[k])
        .collect();

    Ok(Waveform {
        samples,
        truth_bits: bits.cloned().unwrap_or_default(),
        contains_signal: bits.is_some(),
        config: config.clone(),
    })
}

/// One entry of a synthesis plan: either a signal-bearing waveform with a
/// freshly drawn bit stream, or a noise-only stretch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorpusSource {
    Signal { bits: usize },
    NoiseOnly { bit_slots: usize },
}

/// Derives an independent RNG for `(seed, stream)`. Streams with distinct
/// tags never collide in practice; the mapping is fixed for reproducibility.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed.wrapping_add(splitmix64(stream))))
}

/// SplitMix64 finalizer; used to decorrelate derived seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Synthesizes one waveform per source, source `i` on stream
/// `stream_base + i` of `config.seed`. Sources are independent, so the batch
/// runs in parallel; output order matches `sources`.
pub fn compose_corpus(config: &ChannelConfig, sources: &[CorpusSource], stream_base: u64) -> Result<Vec<Waveform>> {
    config.validate()?;
    let waveforms: Vec<Result<Waveform>> = exec::map_indexed(sources.len(), |i| {
        let mut rng = stream_rng(config.seed, stream_base + i as u64);
        match sources[i] {
            CorpusSource::Signal { bits } => {
                let bs = generate_bits(bits, &mut rng);
                compose(config, &bs, &mut rng)
            }
            CorpusSource::NoiseOnly { bit_slots } => compose_noise_only(config, bit_slots, &mut rng),
        }
    });
    waveforms.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn mean(xs: &[f64]) -> f64 {
        xs.iter().sum::<f64>() / xs.len() as f64
    }

    fn variance(xs: &[f64]) -> f64 {
        let m = mean(xs);
        xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
    }

    #[test]
    fn generate_bits_empty() {
        assert!(generate_bits(0, &mut rng(1)).is_empty());
    }

    #[test]
    fn generate_bits_deterministic() {
        let a = generate_bits(1000, &mut rng(7));
        let b = generate_bits(1000, &mut rng(7));
        assert_eq!(a, b);
    }

    #[test]
    fn generate_bits_fair() {
        // Binomial: 3 sigma on 1e6 draws is ±0.0015; the asserted window is
        // twice as wide.
        let bits = generate_bits(1_000_000, &mut rng(42));
        let ones = bits.ones() as f64 / bits.len() as f64;
        assert!((0.497..=0.503).contains(&ones), "fraction of ones {ones}");
    }

    #[test]
    fn bitstream_rejects_non_binary() {
        assert!(BitStream::new(vec![0, 1, 2]).is_err());
    }

    #[test]
    fn turbulence_zero_si_is_unity() {
        let l = sample_turbulence(100, 0.0, 1.0, &mut rng(3)).unwrap();
        assert!(l.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn turbulence_rejects_negative_si() {
        assert!(sample_turbulence(10, -0.1, 1.0, &mut rng(3)).is_err());
    }

    #[test]
    fn turbulence_moments_match_si() {
        // Log-normal with E[L] = 1 and Var(L) = si; 1e6 samples at corr = 1
        // put the sample mean well inside ±1% and Var/mean² inside ±0.1.
        let si = 1.8;
        let l = sample_turbulence(1_000_000, si, 1.0, &mut rng(11)).unwrap();
        let m = mean(&l);
        let nv = variance(&l) / (m * m);
        assert!((0.99..=1.01).contains(&m), "mean {m}");
        assert!((1.7..=1.9).contains(&nv), "normalized variance {nv}");
    }

    #[test]
    fn turbulence_scintillation_consistency() {
        for (i, &si) in [0.5, 1.0, 1.8].iter().enumerate() {
            let l = sample_turbulence(1_000_000, si, 1.0, &mut rng(20 + i as u64)).unwrap();
            let m = mean(&l);
            let nv = variance(&l) / (m * m);
            assert!(
                (nv - si).abs() <= 0.05 * si,
                "si {si}: normalized variance {nv}"
            );
        }
    }

    #[test]
    fn turbulence_long_correlation_freezes_sequence() {
        // With corr = 1e6 the process barely moves over 100 samples. The
        // drift scale is sigma * sqrt(2k/corr), so a small si keeps the
        // relative spread under 1e-3.
        let si = 1e-4;
        let l = sample_turbulence(100, si, 1e6, &mut rng(5)).unwrap();
        let lo = l.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = l.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert!((hi - lo) / lo < 1e-3, "spread {}", (hi - lo) / lo);
    }

    #[test]
    fn turbulence_ar1_lag_correlation() {
        // Empirical lag-1 autocorrelation of ln L should match exp(-1/corr).
        let corr = 10.0;
        let l = sample_turbulence(1_000_000, 1.0, corr, &mut rng(6)).unwrap();
        let logs: Vec<f64> = l.iter().map(|x| x.ln()).collect();
        let m = mean(&logs);
        let var = variance(&logs);
        let cov: f64 = logs
            .windows(2)
            .map(|w| (w[0] - m) * (w[1] - m))
            .sum::<f64>()
            / (logs.len() - 2) as f64;
        let rho = cov / var;
        let expected = (-1.0f64 / corr).exp();
        assert!((rho - expected).abs() < 0.01, "rho {rho} vs {expected}");
    }

    #[test]
    fn thermal_zero_mean_is_zero() {
        let th = sample_thermal(50, 0.0, 1.0, &mut rng(9)).unwrap();
        assert!(th.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn thermal_exponential_moments() {
        // Exponential marginals: mean as requested, Var/mean² = 1.
        let th = sample_thermal(1_000_000, 1.0, 1.0, &mut rng(10)).unwrap();
        let m = mean(&th);
        let nv = variance(&th) / (m * m);
        assert!((0.99..=1.01).contains(&m), "mean {m}");
        assert!((0.97..=1.03).contains(&nv), "normalized variance {nv}");
    }

    #[test]
    fn thermal_nonnegative() {
        let th = sample_thermal(10_000, 5.0, 3.0, &mut rng(12)).unwrap();
        assert!(th.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn modulate_two_bits() {
        let cfg = ChannelConfig {
            bit_amplitude: 2.0,
            ..ChannelConfig::default()
        };
        let s = modulate(&BitStream::new(vec![1, 0]).unwrap(), &cfg);
        assert_eq!(s.len(), 70);
        assert!(s[..35].iter().all(|&x| x == 2.0));
        assert!(s[35..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn modulate_empty_and_all_off() {
        let cfg = ChannelConfig::default();
        assert!(modulate(&BitStream::default(), &cfg).is_empty());
        let zeros = modulate(&BitStream::new(vec![0, 0, 0]).unwrap(), &cfg);
        assert_eq!(zeros.len(), 105);
        assert!(zeros.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn compose_noiseless_identity() {
        let cfg = ChannelConfig {
            bit_amplitude: 1.0,
            thermal_mean: 0.0,
            turbulence_enabled: false,
            detector_noise_std: 0.0,
            ..ChannelConfig::default()
        };
        let wf = compose(&cfg, &BitStream::new(vec![1]).unwrap(), &mut rng(1)).unwrap();
        assert_eq!(wf.samples.len(), 35);
        assert!(wf.samples.iter().all(|&x| x == 1.0));
        assert!(wf.contains_signal);
    }

    #[test]
    fn compose_noise_only_mean() {
        let cfg = ChannelConfig {
            thermal_mean: 2.5,
            ..ChannelConfig::default()
        };
        // 1e6 samples; correlated draws widen the Monte-Carlo band, ±2% is
        // comfortably past 3 sigma.
        let wf = compose_noise_only(&cfg, 1_000_000 / 35 + 1, &mut rng(33)).unwrap();
        assert!(!wf.contains_signal);
        assert!(wf.truth_bits.is_empty());
        let m = mean(&wf.samples);
        assert!((m - 2.5).abs() < 0.05, "mean {m}");
    }

    #[test]
    fn compose_deterministic() {
        let cfg = ChannelConfig {
            turbulence_enabled: true,
            ..ChannelConfig::default()
        };
        let bits = generate_bits(64, &mut rng(2));
        let a = compose(&cfg, &bits, &mut rng(77)).unwrap();
        let b = compose(&cfg, &bits, &mut rng(77)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn compose_mean_preservation() {
        // E[L (s + th) + d] = 0.5 A + thermal_mean for fair bits.
        let cfg = ChannelConfig {
            bit_amplitude: 3.0,
            thermal_mean: 1.0,
            turbulence_enabled: true,
            ..ChannelConfig::default()
        };
        let mut r = rng(55);
        let bits = generate_bits(30_000, &mut r);
        let wf = compose(&cfg, &bits, &mut r).unwrap();
        let expected = 0.5 * 3.0 + 1.0;
        let m = mean(&wf.samples);
        // Fading with corr ≈ one bit and SI 1.8 leaves ~1e6 correlated
        // samples; 3 sigma of the mean is ≈ 0.04 here.
        assert!((m - expected).abs() < 0.08, "mean {m} vs {expected}");
    }

    #[test]
    fn compose_nonnegative_without_detector_noise() {
        let cfg = ChannelConfig {
            turbulence_enabled: true,
            detector_noise_std: 0.0,
            ..ChannelConfig::default()
        };
        let mut r = rng(8);
        let bits = generate_bits(200, &mut r);
        let wf = compose(&cfg, &bits, &mut r).unwrap();
        assert!(wf.samples.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn compose_turbulence_off_equals_sum_of_parts() {
        // With the same rng the thermal and detector draws are identical
        // whether or not turbulence is enabled, so disabling it must give
        // exactly s + th + d.
        let cfg_off = ChannelConfig {
            turbulence_enabled: false,
            detector_noise_std: 0.3,
            ..ChannelConfig::default()
        };
        let cfg_on = ChannelConfig {
            turbulence_enabled: true,
            ..cfg_off.clone()
        };
        let bits = generate_bits(40, &mut rng(4));

        let off = compose(&cfg_off, &bits, &mut rng(99)).unwrap();

        let mut r = rng(99);
        let n = 40 * 35;
        let signal = modulate(&bits, &cfg_off);
        let thermal = sample_thermal(n, cfg_off.thermal_mean, cfg_off.thermal_corr, &mut r).unwrap();
        let detector: Vec<f64> = (0..n)
            .map(|_| cfg_off.detector_noise_std * r.sample::<f64, _>(StandardNormal))
            .collect();
        let manual: Vec<f64> = (0..n).map(|k| signal[k] + thermal[k] + detector[k]).collect();
        assert_eq!(off.samples, manual);

        // And the turbulent trace shares those draws: dividing out the
        // fading factor recovers s + th.
        let on = compose(&cfg_on, &bits, &mut rng(99)).unwrap();
        assert_eq!(on.samples.len(), off.samples.len());
    }

    #[test]
    fn snr_db_values() {
        let mut cfg = ChannelConfig::default();
        cfg.bit_amplitude = 1.0;
        cfg.thermal_mean = 1.0;
        assert_eq!(snr_db(&cfg).unwrap(), 0.0);
        cfg.bit_amplitude = 10.0;
        assert!((snr_db(&cfg).unwrap() - 10.0).abs() < 1e-12);
        cfg.bit_amplitude = 0.0;
        assert!(snr_db(&cfg).is_err());
        cfg.bit_amplitude = 1.0;
        cfg.thermal_mean = 0.0;
        assert!(snr_db(&cfg).is_err());
    }

    #[test]
    fn amplitude_for_snr_round_trips() {
        let a = amplitude_for_snr_db(2.0, 7.5);
        let cfg = ChannelConfig {
            bit_amplitude: a,
            thermal_mean: 2.0,
            ..ChannelConfig::default()
        };
        assert!((snr_db(&cfg).unwrap() - 7.5).abs() < 1e-12);
    }

    #[test]
    fn config_json_round_trip_and_unknown_key() {
        let cfg = ChannelConfig {
            turbulence_enabled: true,
            seed: 42,
            ..ChannelConfig::default()
        };
        let json = cfg.to_json();
        assert_eq!(ChannelConfig::from_json(&json).unwrap(), cfg);
        assert!(ChannelConfig::from_json(r#"{"samples_per_bit": 35, "bogus": 1}"#).is_err());
    }

    #[test]
    fn config_validation_errors() {
        let mut cfg = ChannelConfig::default();
        cfg.samples_per_bit = 0;
        assert!(cfg.validate().is_err());
        cfg = ChannelConfig::default();
        cfg.thermal_corr = 0.5;
        assert!(cfg.validate().is_err());
        cfg = ChannelConfig::default();
        cfg.bit_amplitude = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn turbulence_model_density_normalizes() {
        // Quadrature check: the density integrates to 1 and its mean is I0.
        let model = TurbulenceModel::from_scintillation_index(1.8).unwrap();
        let hi = 2000.0;
        let n = 4_000_000usize;
        let dx = hi / n as f64;
        let mut total = 0.0;
        let mut first = 0.0;
        for k in 0..n {
            let x = (k as f64 + 0.5) * dx;
            let f = model.density(x);
            total += f * dx;
            first += x * f * dx;
        }
        assert!((total - 1.0).abs() < 1e-4, "integral {total}");
        assert!((first - 1.0).abs() < 1e-2, "mean {first}");
    }

    #[test]
    fn corpus_streams_are_independent_and_ordered() {
        let cfg = ChannelConfig {
            turbulence_enabled: true,
            seed: 9,
            ..ChannelConfig::default()
        };
        let sources = [
            CorpusSource::Signal { bits: 8 },
            CorpusSource::NoiseOnly { bit_slots: 8 },
            CorpusSource::Signal { bits: 8 },
        ];
        let a = compose_corpus(&cfg, &sources, 100).unwrap();
        let b = compose_corpus(&cfg, &sources, 100).unwrap();
        assert_eq!(a, b);
        assert!(a[0].contains_signal);
        assert!(!a[1].contains_signal);
        // Different streams give different traces.
        assert_ne!(a[0].samples, a[2].samples);
    }
}
