use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::filters::Wavelet;
use super::transform::{dwt_forward, dwt_inverse, WaveletDecomposition};
use crate::error::{Error, Result};
use crate::trace::Trace;

/// Consistency constant of the MAD estimator for Gaussian noise.
const MAD_SCALE: f64 = 0.6745;

/// How the detail threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdRule {
    /// `sigma * sqrt(2 ln N)` with `sigma` from [`estimate_noise_sigma`].
    Universal,
    Fixed(f64),
}

impl FromStr for ThresholdRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("universal") {
            return Ok(ThresholdRule::Universal);
        }
        let value: f64 = s.parse().map_err(|_| {
            Error::Config(format!(
                "threshold must be 'universal' or a number, got {s:?}"
            ))
        })?;
        if value.is_nan() || value < 0.0 {
            return Err(Error::Config(format!(
                "threshold must be non-negative, got {s}"
            )));
        }
        Ok(ThresholdRule::Fixed(value))
    }
}

impl fmt::Display for ThresholdRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdRule::Universal => f.write_str("universal"),
            ThresholdRule::Fixed(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdMode {
    #[default]
    Soft,
    Hard,
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "soft" => Ok(ThresholdMode::Soft),
            "hard" => Ok(ThresholdMode::Hard),
            other => Err(Error::Config(format!("unknown threshold mode {other:?}"))),
        }
    }
}

/// Denoising parameters. The default is db4, 4 levels, universal threshold,
/// soft shrinkage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenoiseConfig {
    pub wavelet: Wavelet,
    pub levels: usize,
    pub threshold: ThresholdRule,
    pub mode: ThresholdMode,
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        Self {
            wavelet: Wavelet::Db4,
            levels: 4,
            threshold: ThresholdRule::Universal,
            mode: ThresholdMode::Soft,
        }
    }
}

impl DenoiseConfig {
    /// Identity configuration: hard threshold at zero keeps every coefficient.
    pub fn passthrough() -> Self {
        Self {
            threshold: ThresholdRule::Fixed(0.0),
            mode: ThresholdMode::Hard,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.levels == 0 {
            return Err(Error::Config("levels must be at least 1".into()));
        }
        if let ThresholdRule::Fixed(v) = self.threshold {
            if v.is_nan() || v < 0.0 {
                return Err(Error::Config(format!("negative threshold {v}")));
            }
        }
        Ok(())
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Robust noise level: `median(|finest detail|) / 0.6745`.
pub fn estimate_noise_sigma(decomp: &WaveletDecomposition) -> Result<f64> {
    let finest = decomp
        .details
        .first()
        .filter(|band| !band.is_empty())
        .ok_or_else(|| Error::Inconsistent("no finest detail band".into()))?;
    let mut magnitudes: Vec<f64> = finest.iter().map(|c| c.abs()).collect();
    Ok(median(&mut magnitudes) / MAD_SCALE)
}

/// The threshold `rule` resolves to for this decomposition.
pub fn threshold_value(decomp: &WaveletDecomposition, rule: ThresholdRule) -> Result<f64> {
    match rule {
        ThresholdRule::Fixed(v) if v.is_nan() || v < 0.0 => {
            Err(Error::Config(format!("negative threshold {v}")))
        }
        ThresholdRule::Fixed(v) => Ok(v),
        ThresholdRule::Universal => {
            let n = decomp.original_len as f64;
            Ok(estimate_noise_sigma(decomp)? * (2.0 * n.ln()).sqrt())
        }
    }
}

fn shrink(c: f64, tau: f64, mode: ThresholdMode) -> f64 {
    if c.abs() <= tau {
        return 0.0;
    }
    match mode {
        ThresholdMode::Hard => c,
        ThresholdMode::Soft => c.signum() * (c.abs() - tau),
    }
}

/// Zeroes (hard) or shrinks (soft) detail coefficients; the approximation
/// band is left alone.
pub fn threshold_coefficients(
    decomp: &WaveletDecomposition,
    config: &DenoiseConfig,
) -> Result<WaveletDecomposition> {
    config.validate()?;
    let tau = threshold_value(decomp, config.threshold)?;
    let mut out = decomp.clone();
    for c in out.details.iter_mut().flatten() {
        *c = shrink(*c, tau, config.mode);
    }
    Ok(out)
}

pub fn denoise_signal(signal: &[f64], config: &DenoiseConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let decomp = dwt_forward(signal, config.wavelet, config.levels)?;
    dwt_inverse(&threshold_coefficients(&decomp, config)?)
}

/// Denoised copy of `trace`; metadata and label carry over.
pub fn denoise(trace: &Trace, config: &DenoiseConfig) -> Result<Trace> {
    let samples = denoise_signal(trace.samples(), config)?;
    trace
        .with_samples(samples)
        .map_err(|message| Error::Invalid { index: 0, message })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{correlation, dft_bin_power};
    use crate::trace::AcquisitionMeta;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::PI;

    fn decomp_with_details(details: Vec<f64>) -> WaveletDecomposition {
        WaveletDecomposition {
            approx: vec![10.0],
            details: vec![details],
            levels: 1,
            original_len: 2,
            wavelet: Wavelet::Haar,
        }
    }

    fn fixed(tau: f64, mode: ThresholdMode) -> DenoiseConfig {
        DenoiseConfig {
            threshold: ThresholdRule::Fixed(tau),
            mode,
            ..DenoiseConfig::default()
        }
    }

    fn tone(freq: f64, amp: f64) -> impl Fn(usize) -> f64 {
        move |i| amp * (2.0 * PI * freq * i as f64 / 100.0).sin()
    }

    #[test]
    fn mad_by_hand() {
        let d = decomp_with_details(vec![-1.0, 0.0, 1.0]);
        let sigma = estimate_noise_sigma(&d).unwrap();
        assert!((sigma - 1.0 / 0.6745).abs() < 1e-12);
        assert!((sigma - 1.4826).abs() < 1e-4);

        let zeros = decomp_with_details(vec![0.0; 5]);
        assert_eq!(estimate_noise_sigma(&zeros).unwrap(), 0.0);

        let empty = decomp_with_details(vec![]);
        assert!(estimate_noise_sigma(&empty).is_err());
    }

    #[test]
    fn mad_on_white_noise() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..4096).map(|_| StandardNormal.sample(&mut rng)).collect();
        let d = dwt_forward(&x, Wavelet::Db4, 4).unwrap();
        let sigma = estimate_noise_sigma(&d).unwrap();
        assert!((0.9..=1.1).contains(&sigma), "sigma {sigma}");
    }

    #[test]
    fn shrinkage_by_hand() {
        let d = decomp_with_details(vec![3.0, -1.0, 0.5]);
        let hard = threshold_coefficients(&d, &fixed(1.0, ThresholdMode::Hard)).unwrap();
        assert_eq!(hard.details[0], vec![3.0, 0.0, 0.0]);
        let soft = threshold_coefficients(&d, &fixed(1.0, ThresholdMode::Soft)).unwrap();
        assert_eq!(soft.details[0], vec![2.0, 0.0, 0.0]);
    }

    #[test]
    fn zero_and_infinite_thresholds() {
        let d = decomp_with_details(vec![3.0, -1.0, 0.5, 0.0]);
        let same = threshold_coefficients(&d, &fixed(0.0, ThresholdMode::Hard)).unwrap();
        assert_eq!(same, d);
        let gone = threshold_coefficients(&d, &fixed(f64::INFINITY, ThresholdMode::Soft)).unwrap();
        assert!(gone.details[0].iter().all(|c| *c == 0.0));
        assert_eq!(gone.approx, d.approx);
        assert!(threshold_coefficients(&d, &fixed(-0.1, ThresholdMode::Hard)).is_err());
    }

    #[test]
    fn rule_parsing() {
        assert_eq!(
            "universal".parse::<ThresholdRule>().unwrap(),
            ThresholdRule::Universal
        );
        assert_eq!(
            "0.25".parse::<ThresholdRule>().unwrap(),
            ThresholdRule::Fixed(0.25)
        );
        assert!("-1".parse::<ThresholdRule>().is_err());
        assert!("loud".parse::<ThresholdRule>().is_err());
    }

    #[test]
    fn zero_threshold_denoise_is_identity() {
        let x: Vec<f64> = (0..600)
            .map(|i| (i as f64 * 0.05).cos() * 3.0 + 1.0)
            .collect();
        let y = denoise_signal(&x, &DenoiseConfig::passthrough()).unwrap();
        let err = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-9);
    }

    #[test]
    fn constant_trace_stays_constant() {
        let t = Trace::new(vec![2.5; 600], AcquisitionMeta::default(), None).unwrap();
        let out = denoise(&t, &DenoiseConfig::default()).unwrap();
        assert!(out.samples().iter().all(|v| (v - 2.5).abs() < 1e-9));
        assert_eq!(out.meta(), t.meta());
    }

    #[test]
    fn flicker_tone_removed() {
        let clean: Vec<f64> = (0..600).map(tone(1.0, 1.0)).collect();
        let flicker = tone(20.0, 0.2);
        let noisy: Vec<f64> = (0..600).map(|i| clean[i] + flicker(i)).collect();
        let out = denoise_signal(&noisy, &DenoiseConfig::default()).unwrap();
        assert!(correlation(&out, &clean) >= 0.95);
        let before = dft_bin_power(&noisy, 20.0, 100.0);
        let after = dft_bin_power(&out, 20.0, 100.0);
        let attenuation_db = 10.0 * (before / after).log10();
        assert!(attenuation_db >= 20.0, "attenuation {attenuation_db} dB");
    }

    fn band_strategy() -> impl Strategy<Value = WaveletDecomposition> {
        proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, 1..40), 1..5).prop_map(
            |details| WaveletDecomposition {
                approx: vec![1.0, -2.0],
                levels: details.len(),
                details,
                original_len: 64,
                wavelet: Wavelet::Haar,
            },
        )
    }

    proptest! {
        #[test]
        fn hard_threshold_idempotent(d in band_strategy(), tau in 0.0f64..4.0) {
            let cfg = fixed(tau, ThresholdMode::Hard);
            let once = threshold_coefficients(&d, &cfg).unwrap();
            let twice = threshold_coefficients(&once, &cfg).unwrap();
            prop_assert_eq!(once, twice);
        }

        #[test]
        fn thresholding_never_adds_energy(
            d in band_strategy(),
            tau in 0.0f64..4.0,
            soft in any::<bool>(),
        ) {
            let mode = if soft { ThresholdMode::Soft } else { ThresholdMode::Hard };
            let out = threshold_coefficients(&d, &fixed(tau, mode)).unwrap();
            prop_assert!(out.energy() <= d.energy());
            let universal = DenoiseConfig { mode, ..DenoiseConfig::default() };
            prop_assert!(threshold_coefficients(&d, &universal).unwrap().energy() <= d.energy());
        }
    }
}
