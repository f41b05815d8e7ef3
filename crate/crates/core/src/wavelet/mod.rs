//! Wavelet denoising: forward DWT, detail thresholding, inverse DWT.

mod denoise;
mod filters;
mod transform;

pub use denoise::{
    denoise, denoise_signal, estimate_noise_sigma, threshold_coefficients, threshold_value,
    DenoiseConfig, ThresholdMode, ThresholdRule,
};
pub use filters::{FilterBank, Wavelet};
pub use transform::{band_lengths, dwt_forward, dwt_inverse, WaveletDecomposition};
