//! Seeded synthetic gesture traces.
//!
//! A trace is `baseline + a(d) * g(t) + n(t)`: `g` is the class template with
//! per-repetition time stretch, amplitude scale and onset, `a(d) = (20/d)^2`
//! and `n` is white Gaussian noise plus, with ambient light on, mains flicker
//! aliased to 20 Hz and 40 Hz.
//!
//! Trace `i` of a dataset (class-major, before shuffling) draws from stream
//! `i` of a ChaCha8 generator keyed by the seed, so it does not depend on the
//! order in which traces are produced.

mod templates;

pub use templates::{ClassTemplate, Pulse, TemplateSet};

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::{AcquisitionMeta, Dataset, GestureLabel, Trace, DEFAULT_DURATION_S};

pub const REFERENCE_DISTANCE_CM: f64 = 20.0;
pub const FLICKER_HZ: [f64; 2] = [20.0, 40.0];
/// Flicker amplitude relative to the baseline.
pub const FLICKER_LEVEL: f64 = 0.1;
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_REPS: usize = 120;

const SHUFFLE_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub seed: u64,
    pub reps_per_class: usize,
    pub distance_cm: f64,
    pub ambient_on: bool,
    pub baseline: f64,
    /// Mean template power over white-noise power at 20 cm, in dB.
    /// `f64::INFINITY` disables the white noise.
    pub snr_ref_db: f64,
    pub time_jitter: f64,
    pub amp_jitter: f64,
    pub onset_range_s: [f64; 2],
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            reps_per_class: DEFAULT_REPS,
            distance_cm: REFERENCE_DISTANCE_CM,
            ambient_on: true,
            baseline: 1.0,
            snr_ref_db: 6.0,
            time_jitter: 0.15,
            amp_jitter: 0.2,
            onset_range_s: [0.5, 2.5],
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.reps_per_class == 0 {
            return fail("reps_per_class must be at least 1".into());
        }
        if !(self.distance_cm > 0.0 && self.distance_cm.is_finite()) {
            return fail(format!(
                "distance_cm must be positive, got {}",
                self.distance_cm
            ));
        }
        if !self.baseline.is_finite() {
            return fail("baseline must be finite".into());
        }
        if self.snr_ref_db.is_nan() || self.snr_ref_db == f64::NEG_INFINITY {
            return fail("snr_ref_db must be a number".into());
        }
        for (name, j) in [
            ("time_jitter", self.time_jitter),
            ("amp_jitter", self.amp_jitter),
        ] {
            if !(0.0..1.0).contains(&j) {
                return fail(format!("{name} must be in [0, 1), got {j}"));
            }
        }
        let [lo, hi] = self.onset_range_s;
        let latest = DEFAULT_DURATION_S - 3.0;
        if !(0.0 <= lo && lo <= hi && hi <= latest) {
            return fail(format!(
                "onset range [{lo}, {hi}] must lie within [0, {latest}]"
            ));
        }
        Ok(())
    }

    /// Signal gain `(20 / d)^2` relative to the reference distance.
    pub fn attenuation(&self) -> f64 {
        attenuation(self.distance_cm)
    }
}

pub fn attenuation(distance_cm: f64) -> f64 {
    (REFERENCE_DISTANCE_CM / distance_cm).powi(2)
}

/// A validated configuration bound to a template set.
#[derive(Debug, Clone)]
pub struct Generator {
    config: GenConfig,
    templates: TemplateSet,
    noise_sigma: f64,
}

impl Generator {
    pub fn new(config: GenConfig, templates: TemplateSet) -> Result<Self> {
        config.validate()?;
        let p_ref = templates.reference_power(meta(&config).sample_rate_hz);
        let noise_sigma = p_ref.sqrt() * 10f64.powf(-config.snr_ref_db / 20.0);
        Ok(Self {
            config,
            templates,
            noise_sigma,
        })
    }

    pub fn config(&self) -> &GenConfig {
        &self.config
    }

    pub fn templates(&self) -> &TemplateSet {
        &self.templates
    }

    /// White-noise standard deviation, the same at every distance.
    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    /// The random stream for trace `index`.
    pub fn trace_rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(index);
        rng
    }

    pub fn generate_trace<R: Rng>(&self, template: &ClassTemplate, rng: &mut R) -> Result<Trace> {
        let cfg = &self.config;
        let meta = meta(cfg);
        let rate = meta.sample_rate_hz;
        let scale = jitter(rng, cfg.time_jitter);
        let gain = cfg.attenuation() * jitter(rng, cfg.amp_jitter);
        let [lo, hi] = cfg.onset_range_s;
        let onset = if lo < hi {
            rng.random_range(lo..=hi)
        } else {
            lo
        };
        let phases: [f64; 2] = [
            rng.random_range(0.0..2.0 * PI),
            rng.random_range(0.0..2.0 * PI),
        ];
        let flicker = if cfg.ambient_on {
            FLICKER_LEVEL * cfg.baseline
        } else {
            0.0
        };

        let samples = (0..meta.expected_len())
            .map(|i| {
                let t = i as f64 / rate;
                let mut v = cfg.baseline + gain * template.value_at(t - onset, scale);
                if self.noise_sigma > 0.0 {
                    v += self.noise_sigma * rng.sample::<f64, _>(StandardNormal);
                }
                for (f, ph) in FLICKER_HZ.iter().zip(phases) {
                    v += flicker * (2.0 * PI * f * t + ph).sin();
                }
                v
            })
            .collect();
        Trace::new(samples, meta, Some(template.label)).map_err(Error::Config)
    }

    /// `reps_per_class` traces per label, shuffled by the seed.
    pub fn generate_dataset(&self) -> Result<Dataset> {
        let reps = self.config.reps_per_class;
        let mut traces = GestureLabel::ALL
            .iter()
            .flat_map(|&l| (0..reps).map(move |r| (l, r)))
            .enumerate()
            .map(|(i, (l, _))| {
                self.generate_trace(self.templates.get(l), &mut self.trace_rng(i as u64))
            })
            .collect::<Result<Vec<_>>>()?;
        traces.shuffle(&mut self.trace_rng(SHUFFLE_STREAM));
        Dataset::new(traces)
    }
}

fn meta(cfg: &GenConfig) -> AcquisitionMeta {
    AcquisitionMeta::new(cfg.distance_cm, cfg.ambient_on)
}

fn jitter<R: Rng>(rng: &mut R, frac: f64) -> f64 {
    if frac > 0.0 {
        rng.random_range(1.0 - frac..=1.0 + frac)
    } else {
        1.0
    }
}

/// Generates a dataset from the bundled templates.
pub fn generate_dataset(config: &GenConfig) -> Result<Dataset> {
    Generator::new(*config, TemplateSet::default())?.generate_dataset()
}
