//! Small spectral and similarity measurements used to check denoising and
//! generator output. Plain O(N) DFT per bin; traces are short.

use std::f64::consts::PI;

/// Power of the DFT coefficient at `freq_hz`, normalised by `N^2`.
/// For a sinusoid of amplitude `A` sitting exactly on a bin this is `A^2 / 4`.
pub fn dft_bin_power(x: &[f64], freq_hz: f64, sample_rate_hz: f64) -> f64 {
    let n = x.len() as f64;
    let w = 2.0 * PI * freq_hz / sample_rate_hz;
    let (re, im) = x.iter().enumerate().fold((0.0, 0.0), |(re, im), (i, v)| {
        let phase = w * i as f64;
        (re + v * phase.cos(), im - v * phase.sin())
    });
    (re * re + im * im) / (n * n)
}

/// Sum of bin powers over DFT bins whose frequency lies in `[lo_hz, hi_hz]`.
pub fn band_power(x: &[f64], lo_hz: f64, hi_hz: f64, sample_rate_hz: f64) -> f64 {
    let n = x.len();
    let resolution = sample_rate_hz / n as f64;
    (0..=n / 2)
        .map(|k| k as f64 * resolution)
        .filter(|f| *f >= lo_hz && *f <= hi_hz)
        .map(|f| dft_bin_power(x, f, sample_rate_hz))
        .sum()
}

/// Pearson correlation; 0 when either side has no variance.
pub fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len()) as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        0.0
    } else {
        sab / (saa * sbb).sqrt()
    }
}
