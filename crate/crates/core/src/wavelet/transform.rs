//! Multi-level DWT with symmetric (half-sample) boundary extension.
//!
//! Each analysis step turns `n` samples into `(n + F - 1) / 2` approximation
//! and detail coefficients, where `F` is the filter length. The extra
//! coefficients beyond `n / 2` carry the boundary, which is what makes the
//! transform invertible for any length (including 600) without padding the
//! signal to a power of two. For Haar this is exactly `ceil(n / 2)`.

use serde::{Deserialize, Serialize};

use super::filters::{FilterBank, Wavelet};
use crate::error::{Error, Result};

/// Approximation plus detail bands of a multi-level DWT.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveletDecomposition {
    /// Coarsest-level approximation coefficients.
    pub approx: Vec<f64>,
    /// Detail bands, finest first.
    pub details: Vec<Vec<f64>>,
    pub levels: usize,
    pub original_len: usize,
    pub wavelet: Wavelet,
}

impl WaveletDecomposition {
    /// Sum of squared coefficients over every band.
    pub fn energy(&self) -> f64 {
        self.approx
            .iter()
            .chain(self.details.iter().flatten())
            .map(|c| c * c)
            .sum()
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.approx.iter_mut().for_each(|c| *c *= factor);
        out.details.iter_mut().flatten().for_each(|c| *c *= factor);
        out
    }

    fn check(&self) -> Result<()> {
        if self.levels != self.details.len() {
            return Err(Error::Inconsistent(format!(
                "levels is {} but there are {} detail bands",
                self.levels,
                self.details.len()
            )));
        }
        let lens = band_lengths(self.original_len, self.wavelet.filter_len(), self.levels);
        for (level, band) in self.details.iter().enumerate() {
            if band.len() != lens[level + 1] {
                return Err(Error::Inconsistent(format!(
                    "detail band {} has {} coefficients, expected {}",
                    level,
                    band.len(),
                    lens[level + 1]
                )));
            }
        }
        let coarsest = lens[self.levels];
        if self.approx.len() != coarsest {
            return Err(Error::Inconsistent(format!(
                "approximation has {} coefficients, expected {coarsest}",
                self.approx.len()
            )));
        }
        Ok(())
    }
}

/// Signal length entering each level; `lens[0]` is the input length and
/// `lens[levels]` the coarsest band length.
pub fn band_lengths(original_len: usize, filter_len: usize, levels: usize) -> Vec<usize> {
    let mut lens = Vec::with_capacity(levels + 1);
    let mut n = original_len;
    lens.push(n);
    for _ in 0..levels {
        n = (n + filter_len - 1) / 2;
        lens.push(n);
    }
    lens
}

#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let period = 2 * n as isize;
    let m = i.rem_euclid(period) as usize;
    if m < n {
        m
    } else {
        2 * n - 1 - m
    }
}

fn analysis_step(x: &[f64], bank: &FilterBank) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let f = bank.len();
    let out_len = (n + f - 1) / 2;
    let mut approx = Vec::with_capacity(out_len);
    let mut detail = Vec::with_capacity(out_len);
    for o in 0..out_len {
        let centre = 2 * o as isize + 1;
        let (mut a, mut d) = (0.0, 0.0);
        for j in 0..f {
            let s = x[reflect(centre - j as isize, n)];
            a += bank.dec_lo[j] * s;
            d += bank.dec_hi[j] * s;
        }
        approx.push(a);
        detail.push(d);
    }
    (approx, detail)
}

fn synthesis_step(approx: &[f64], detail: &[f64], bank: &FilterBank, out_len: usize) -> Vec<f64> {
    let f = bank.len();
    let coeffs = approx.len();
    (0..out_len)
        .map(|i| {
            let first = i.saturating_sub(1).div_ceil(2);
            let last = ((i + f - 2) / 2).min(coeffs - 1);
            (first..=last)
                .map(|o| {
                    let tap = i + f - 2 - 2 * o;
                    approx[o] * bank.rec_lo[tap] + detail[o] * bank.rec_hi[tap]
                })
                .sum()
        })
        .collect()
}

/// Decomposes `signal` into `levels` detail bands plus an approximation.
pub fn dwt_forward(
    signal: &[f64],
    wavelet: Wavelet,
    levels: usize,
) -> Result<WaveletDecomposition> {
    if levels == 0 {
        return Err(Error::Config("levels must be at least 1".into()));
    }
    let max = wavelet.max_level(signal.len());
    if signal.len() < 2 || levels > max {
        return Err(Error::TooShort {
            len: signal.len(),
            levels,
            wavelet: wavelet.name(),
            max,
        });
    }
    let bank = wavelet.filter_bank();
    let mut approx = signal.to_vec();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (a, d) = analysis_step(&approx, &bank);
        details.push(d);
        approx = a;
    }
    Ok(WaveletDecomposition {
        approx,
        details,
        levels,
        original_len: signal.len(),
        wavelet,
    })
}

/// Rebuilds the signal from a decomposition.
pub fn dwt_inverse(decomp: &WaveletDecomposition) -> Result<Vec<f64>> {
    decomp.check()?;
    let bank = decomp.wavelet.filter_bank();
    let lens = band_lengths(decomp.original_len, bank.len(), decomp.levels);
    let mut current = decomp.approx.clone();
    for level in (0..decomp.levels).rev() {
        current = synthesis_step(&current, &decomp.details[level], &bank, lens[level]);
    }
    Ok(current)
}
