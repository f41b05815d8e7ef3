//! Traces, gesture labels and datasets.
//!
//! A [`Trace`] is one fixed-duration light-intensity record (6 s at 100 Hz by
//! default) together with the conditions it was captured under. A [`Dataset`]
//! is a non-empty, fully labeled collection of traces sharing one sample rate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_SAMPLE_RATE_HZ: f64 = 100.0;
pub const DEFAULT_DURATION_S: f64 = 6.0;

/// One of the eight gesture classes, written `a`..`h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GestureLabel {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

impl GestureLabel {
    pub const COUNT: usize = 8;

    pub const ALL: [GestureLabel; Self::COUNT] = [
        GestureLabel::A,
        GestureLabel::B,
        GestureLabel::C,
        GestureLabel::D,
        GestureLabel::E,
        GestureLabel::F,
        GestureLabel::G,
        GestureLabel::H,
    ];

    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn from_ordinal(ordinal: usize) -> Option<Self> {
        Self::ALL.get(ordinal).copied()
    }

    pub fn as_char(self) -> char {
        (b'a' + self as u8) as char
    }
}

impl fmt::Display for GestureLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_char().encode_utf8(&mut [0; 4]))
    }
}

impl FromStr for GestureLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c @ 'a'..='h'), None) => Ok(Self::ALL[(c as u8 - b'a') as usize]),
            _ => Err(Error::UnknownLabel(s.to_string())),
        }
    }
}

/// Conditions a trace was recorded under.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionMeta {
    pub distance_cm: f64,
    pub ambient_on: bool,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
}

impl AcquisitionMeta {
    pub fn new(distance_cm: f64, ambient_on: bool) -> Self {
        Self {
            distance_cm,
            ambient_on,
            sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
            duration_s: DEFAULT_DURATION_S,
        }
    }

    /// Number of samples implied by rate and duration.
    pub fn expected_len(&self) -> usize {
        (self.sample_rate_hz * self.duration_s).round() as usize
    }

    pub fn validate(&self) -> std::result::Result<(), String> {
        if !(self.distance_cm.is_finite() && self.distance_cm > 0.0) {
            return Err(format!(
                "distance_cm must be positive, got {}",
                self.distance_cm
            ));
        }
        if !(self.sample_rate_hz.is_finite() && self.sample_rate_hz > 0.0) {
            return Err(format!(
                "sample_rate_hz must be positive, got {}",
                self.sample_rate_hz
            ));
        }
        if !(self.duration_s.is_finite() && self.duration_s > 0.0) {
            return Err(format!(
                "duration_s must be positive, got {}",
                self.duration_s
            ));
        }
        Ok(())
    }
}

impl Default for AcquisitionMeta {
    fn default() -> Self {
        Self::new(20.0, true)
    }
}

/// A single light-intensity record. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    samples: Vec<f64>,
    meta: AcquisitionMeta,
    label: Option<GestureLabel>,
}

impl Trace {
    pub fn new(
        samples: Vec<f64>,
        meta: AcquisitionMeta,
        label: Option<GestureLabel>,
    ) -> std::result::Result<Self, String> {
        meta.validate()?;
        let expected = meta.expected_len();
        if samples.len() != expected {
            return Err(format!(
                "trace has {} samples but metadata implies {}",
                samples.len(),
                expected
            ));
        }
        if let Some(i) = samples.iter().position(|s| !s.is_finite()) {
            return Err(format!("sample {i} is not finite"));
        }
        Ok(Self {
            samples,
            meta,
            label,
        })
    }

    /// Builds a trace whose duration is derived from the sample count.
    pub fn from_samples(
        samples: Vec<f64>,
        distance_cm: f64,
        ambient_on: bool,
        sample_rate_hz: f64,
        label: Option<GestureLabel>,
    ) -> std::result::Result<Self, String> {
        let meta = AcquisitionMeta {
            distance_cm,
            ambient_on,
            sample_rate_hz,
            duration_s: samples.len() as f64 / sample_rate_hz,
        };
        Self::new(samples, meta, label)
    }

    /// Same metadata and label, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> std::result::Result<Self, String> {
        Self::new(samples, self.meta, self.label)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn meta(&self) -> &AcquisitionMeta {
        &self.meta
    }

    pub fn label(&self) -> Option<GestureLabel> {
        self.label
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// A non-empty set of labeled traces sharing one sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    traces: Vec<Trace>,
}

impl Dataset {
    pub fn new(traces: Vec<Trace>) -> Result<Self> {
        let first = traces.first().ok_or(Error::EmptyDataset)?;
        let rate = first.meta.sample_rate_hz;
        for (index, t) in traces.iter().enumerate() {
            if t.label.is_none() {
                return Err(Error::Invalid {
                    index,
                    message: "trace is unlabeled".into(),
                });
            }
            if t.meta.sample_rate_hz != rate {
                return Err(Error::Invalid {
                    index,
                    message: format!(
                        "sample rate {} differs from dataset rate {rate}",
                        t.meta.sample_rate_hz
                    ),
                });
            }
        }
        Ok(Self { traces })
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn into_traces(self) -> Vec<Trace> {
        self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.traces[0].meta.sample_rate_hz
    }

    /// Labels in dataset order.
    pub fn labels(&self) -> Vec<GestureLabel> {
        self.traces
            .iter()
            .map(|t| t.label.expect("dataset traces are labeled"))
            .collect()
    }

    /// The shared distance and ambient flag, if every trace agrees.
    pub fn uniform_conditions(&self) -> Option<(f64, bool)> {
        let m = self.traces[0].meta;
        self.traces
            .iter()
            .all(|t| t.meta.distance_cm == m.distance_cm && t.meta.ambient_on == m.ambient_on)
            .then_some((m.distance_cm, m.ambient_on))
    }
}
