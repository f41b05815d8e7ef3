//! The full per-trace preparation chain:
//! denoise, detect the burst, cut and zero-pad it, z-score it.
//!
//! Before cutting, the denoised trace is shifted so its median sits at zero.
//! The padding zeros then mean "resting baseline" rather than "no light",
//! and the resulting vector no longer depends on the absolute intensity
//! offset of the record.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::segment::{
    detect_segment, extract_and_pad, median, standardize, FeatureVector, Segment, SegmentConfig,
};
use crate::trace::Trace;
use crate::wavelet::{denoise, DenoiseConfig};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub denoise: DenoiseConfig,
    pub segment: SegmentConfig,
}

/// Every intermediate signal of one preprocessing run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStages {
    pub raw: Vec<f64>,
    pub denoised: Vec<f64>,
    pub segment: Segment,
    /// Baseline-removed segment, zero-padded to `fixed_len`.
    pub segmented_padded: Vec<f64>,
    pub standardized: Vec<f64>,
}

pub fn preprocess_stages(trace: &Trace, config: &PipelineConfig) -> Result<TraceStages> {
    let clean = denoise(trace, &config.denoise)?;
    let segment = detect_segment(&clean, &config.segment)?;
    let baseline = median(clean.samples());
    let centred: Vec<f64> = clean.samples().iter().map(|v| v - baseline).collect();
    let segmented_padded = extract_and_pad(&centred, segment, config.segment.fixed_len)?;
    let standardized = standardize(&segmented_padded)?;
    Ok(TraceStages {
        raw: trace.samples().to_vec(),
        denoised: clean.samples().to_vec(),
        segment,
        segmented_padded,
        standardized,
    })
}

/// Turns one trace into a classifier input, carrying its label through.
pub fn preprocess(trace: &Trace, config: &PipelineConfig) -> Result<FeatureVector> {
    let stages = preprocess_stages(trace, config)?;
    Ok(FeatureVector::new(stages.standardized, trace.label()))
}

/// Per-trace results in input order; failures stay in place.
pub fn preprocess_all(traces: &[Trace], config: &PipelineConfig) -> Vec<Result<FeatureVector>> {
    traces.iter().map(|t| preprocess(t, config)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::trace::{AcquisitionMeta, GestureLabel};

    fn gesture_trace(scale: f64, offset: f64) -> Trace {
        let samples = (0..600)
            .map(|i| {
                let t = i as f64 / 100.0;
                let g = (-0.5 * ((t - 2.0) / 0.2).powi(2)).exp()
                    - 0.6 * (-0.5 * ((t - 2.7) / 0.25).powi(2)).exp();
                let ripple = 0.01 * (2.0 * std::f64::consts::PI * 20.0 * t).sin();
                offset + scale * (g + ripple)
            })
            .collect();
        Trace::new(samples, AcquisitionMeta::default(), Some(GestureLabel::C)).unwrap()
    }

    #[test]
    fn produces_standard_vector() {
        let fv = preprocess(&gesture_trace(0.4, 1.0), &PipelineConfig::default()).unwrap();
        assert_eq!(fv.len(), 600);
        assert_eq!(fv.label, Some(GestureLabel::C));
        let mean = fv.values.iter().sum::<f64>() / 600.0;
        let std = (fv.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 600.0).sqrt();
        assert!(mean.abs() < 1e-9);
        assert!((std - 1.0).abs() < 1e-9);
    }

    #[test]
    fn deterministic() {
        let t = gesture_trace(0.4, 1.0);
        let cfg = PipelineConfig::default();
        assert_eq!(preprocess(&t, &cfg).unwrap(), preprocess(&t, &cfg).unwrap());
    }

    #[test]
    fn affine_invariant() {
        let cfg = PipelineConfig::default();
        let base = preprocess_stages(&gesture_trace(0.4, 1.0), &cfg).unwrap();
        for (scale, offset) in [(3.0, -7.0), (0.01, 250.0), (1.0, 0.0)] {
            let other =
                preprocess_stages(&gesture_trace(0.4 * scale, 1.0 * scale + offset), &cfg).unwrap();
            assert_eq!(other.segment, base.segment);
            for (a, b) in other.standardized.iter().zip(&base.standardized) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn flat_trace_is_constant_vector() {
        let t = Trace::new(vec![1.5; 600], AcquisitionMeta::default(), None).unwrap();
        match preprocess(&t, &PipelineConfig::default()) {
            Err(Error::ConstantVector) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
