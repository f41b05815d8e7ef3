//! Burst segmentation, zero-padding and z-score standardization.
//!
//! The activity envelope is a centred moving average of `|x - median(x)|`.
//! Everything above `rel_threshold * max(envelope)` counts as gesture
//! activity; the segment spans the first to the last such sample, widened by
//! a margin and clamped to the trace.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::{GestureLabel, Trace};

/// Inclusive sample range of the detected gesture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub start_idx: usize,
    pub end_idx: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end_idx - self.start_idx + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Checks `start <= end < trace_len`.
    pub fn validate(&self, trace_len: usize) -> Result<()> {
        if self.start_idx > self.end_idx || self.end_idx >= trace_len {
            return Err(Error::Config(format!(
                "segment {}..={} is outside a trace of {trace_len} samples",
                self.start_idx, self.end_idx
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentConfig {
    pub envelope_window_s: f64,
    pub rel_threshold: f64,
    pub margin_s: f64,
    pub fixed_len: usize,
}

impl Default for SegmentConfig {
    fn default() -> Self {
        Self {
            envelope_window_s: 0.25,
            rel_threshold: 0.2,
            margin_s: 0.1,
            fixed_len: 600,
        }
    }
}

impl SegmentConfig {
    pub fn window_samples(&self, sample_rate_hz: f64) -> usize {
        (self.envelope_window_s * sample_rate_hz).round() as usize
    }

    pub fn margin_samples(&self, sample_rate_hz: f64) -> usize {
        (self.margin_s * sample_rate_hz).round() as usize
    }

    pub fn validate(&self, sample_rate_hz: f64) -> Result<()> {
        if !(self.rel_threshold > 0.0 && self.rel_threshold < 1.0) {
            return Err(Error::Config(format!(
                "rel_threshold must lie strictly between 0 and 1, got {}",
                self.rel_threshold
            )));
        }
        if !self.envelope_window_s.is_finite() || self.window_samples(sample_rate_hz) < 2 {
            return Err(Error::Config(format!(
                "envelope window of {} s is under 2 samples at {sample_rate_hz} Hz",
                self.envelope_window_s
            )));
        }
        if !(self.margin_s.is_finite() && self.margin_s >= 0.0) {
            return Err(Error::Config(format!(
                "margin must be non-negative, got {}",
                self.margin_s
            )));
        }
        if self.fixed_len == 0 {
            return Err(Error::Config("fixed_len must be positive".into()));
        }
        Ok(())
    }
}

/// Fixed-length classifier input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<GestureLabel>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>, label: Option<GestureLabel>) -> Self {
        Self { values, label }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub(crate) fn median(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Centred moving average of `|x - median(x)|`; windows are truncated at the
/// edges and averaged over the samples they actually cover.
pub fn activity_envelope(x: &[f64], window: usize) -> Vec<f64> {
    let m = median(x);
    let mut prefix = Vec::with_capacity(x.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for v in x {
        acc += (v - m).abs();
        prefix.push(acc);
    }
    let before = window / 2;
    let after = window - 1 - before;
    (0..x.len())
        .map(|i| {
            let lo = i.saturating_sub(before);
            let hi = (i + after).min(x.len() - 1);
            (prefix[hi + 1] - prefix[lo]) / (hi + 1 - lo) as f64
        })
        .collect()
}

/// Segmentation over raw samples at `sample_rate_hz`.
pub fn detect_segment_in(
    x: &[f64],
    sample_rate_hz: f64,
    config: &SegmentConfig,
) -> Result<Segment> {
    config.validate(sample_rate_hz)?;
    let window = config.window_samples(sample_rate_hz);
    if x.len() < window {
        return Err(Error::Config(format!(
            "trace of {} samples is shorter than the {window}-sample envelope window",
            x.len()
        )));
    }
    let full = Segment {
        start_idx: 0,
        end_idx: x.len() - 1,
    };
    let envelope = activity_envelope(x, window);
    let peak = envelope.iter().copied().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Ok(full);
    }
    let tau = config.rel_threshold * peak;
    let first = envelope.iter().position(|e| *e >= tau).unwrap_or(0);
    let last = envelope
        .iter()
        .rposition(|e| *e >= tau)
        .unwrap_or(full.end_idx);
    let margin = config.margin_samples(sample_rate_hz);
    Ok(Segment {
        start_idx: first.saturating_sub(margin),
        end_idx: (last + margin).min(full.end_idx),
    })
}

pub fn detect_segment(trace: &Trace, config: &SegmentConfig) -> Result<Segment> {
    detect_segment_in(trace.samples(), trace.meta().sample_rate_hz, config)
}

/// `samples[start..=end]` followed by zeros up to `fixed_len`; longer
/// segments keep their first `fixed_len` samples.
pub fn extract_and_pad(samples: &[f64], seg: Segment, fixed_len: usize) -> Result<Vec<f64>> {
    if fixed_len == 0 {
        return Err(Error::Config("fixed_len must be positive".into()));
    }
    seg.validate(samples.len())?;
    let mut out: Vec<f64> = samples[seg.start_idx..=seg.end_idx]
        .iter()
        .take(fixed_len)
        .copied()
        .collect();
    out.resize(fixed_len, 0.0);
    Ok(out)
}

/// Z-score with the population standard deviation.
pub fn standardize(values: &[f64]) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::Config(format!(
            "standardize needs at least 2 values, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std < 1e-12 {
        return Err(Error::ConstantVector);
    }
    Ok(values.iter().map(|v| (v - mean) / std).collect())
}
