//! Gesture recognition from reflected light-intensity traces.
//!
//! A trace is a 6 s, 100 Hz record of the light a photodiode receives while
//! a hand moves above it. [`pipeline::preprocess`] denoises it with a
//! discrete wavelet transform, cuts out the gesture burst, pads it to a fixed
//! length and z-scores it. [`knn`] labels the result, and [`eval`] measures
//! accuracy with K-fold cross-validation. [`synth`] generates seeded labeled
//! traces for eight gesture classes.
//!
//! ```
//! use lightwave_gesture::eval::{cross_validate, make_folds, KnnConfig};
//! use lightwave_gesture::pipeline::PipelineConfig;
//! use lightwave_gesture::synth::{generate_dataset, GenConfig};
//!
//! let data = generate_dataset(&GenConfig { reps_per_class: 5, ..GenConfig::default() })?;
//! let plan = make_folds(&data, 5, 1, true)?;
//! let report = cross_validate(&data, &PipelineConfig::default(), &KnnConfig::default(), &plan)?;
//! assert_eq!(report.per_fold_accuracy.len(), 5);
//! # Ok::<(), lightwave_gesture::Error>(())
//! ```

pub mod dataset_io;
pub mod error;
pub mod eval;
pub mod knn;
pub mod pipeline;
pub mod segment;
pub mod spectral;
pub mod synth;
pub mod trace;
pub mod wavelet;

pub use error::{Error, Result};

// The guide's code blocks run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/traces.md")]
    mod traces {}
    #[doc = include_str!("../../../book/src/denoising.md")]
    mod denoising {}
    #[doc = include_str!("../../../book/src/segmentation.md")]
    mod segmentation {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/synthetic.md")]
    mod synthetic {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
