use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

// Minimum-phase Daubechies scaling filters, normalised to sum sqrt(2).
// Computed by spectral factorisation at 40 significant digits.
const HAAR: [f64; 2] = [
    std::f64::consts::FRAC_1_SQRT_2,
    std::f64::consts::FRAC_1_SQRT_2,
];

#[allow(clippy::excessive_precision)]
const DB2: [f64; 4] = [
    0.482_962_913_144_534_143_374_871_6,
    0.836_516_303_737_807_905_575_293_8,
    0.224_143_868_042_013_381_025_972_8,
    -0.129_409_522_551_260_381_174_449_4,
];

#[allow(clippy::excessive_precision)]
const DB4: [f64; 8] = [
    0.230_377_813_308_896_500_863_291_2,
    0.714_846_570_552_915_647_089_922,
    0.630_880_767_929_858_907_881_716_3,
    -0.027_983_769_416_859_854_211_413_75,
    -0.187_034_811_719_093_084_079_570_7,
    0.030_841_381_835_560_763_627_219_36,
    0.032_883_011_666_885_199_735_407_51,
    -0.010_597_401_785_069_032_104_883_21,
];

/// Supported orthogonal wavelets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wavelet {
    Haar,
    Db2,
    #[default]
    Db4,
}

impl Wavelet {
    pub const ALL: [Wavelet; 3] = [Wavelet::Haar, Wavelet::Db2, Wavelet::Db4];

    pub fn name(self) -> &'static str {
        match self {
            Wavelet::Haar => "haar",
            Wavelet::Db2 => "db2",
            Wavelet::Db4 => "db4",
        }
    }

    /// Reconstruction low-pass (scaling) filter.
    pub fn scaling_filter(self) -> &'static [f64] {
        match self {
            Wavelet::Haar => &HAAR,
            Wavelet::Db2 => &DB2,
            Wavelet::Db4 => &DB4,
        }
    }

    pub fn filter_len(self) -> usize {
        self.scaling_filter().len()
    }

    /// Deepest decomposition allowed for a signal of `len` samples:
    /// the largest `L` with `(filter_len - 1) * 2^L <= len`.
    pub fn max_level(self, len: usize) -> usize {
        let span = self.filter_len() - 1;
        let mut level = 0;
        while span << (level + 1) <= len {
            level += 1;
        }
        level
    }

    pub fn filter_bank(self) -> FilterBank {
        FilterBank::new(self.scaling_filter())
    }
}

impl fmt::Display for Wavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Wavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(Wavelet::Haar),
            "db2" => Ok(Wavelet::Db2),
            "db4" => Ok(Wavelet::Db4),
            other => Err(Error::Config(format!("unknown wavelet {other:?}"))),
        }
    }
}

/// Analysis and synthesis filters of a two-channel orthogonal filter bank.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub dec_lo: Vec<f64>,
    pub dec_hi: Vec<f64>,
    pub rec_lo: Vec<f64>,
    pub rec_hi: Vec<f64>,
}

impl FilterBank {
    fn new(scaling: &[f64]) -> Self {
        let n = scaling.len();
        let rec_lo = scaling.to_vec();
        let dec_lo: Vec<f64> = scaling.iter().rev().copied().collect();
        let rec_hi: Vec<f64> = (0..n)
            .map(|k| if k % 2 == 0 { dec_lo[k] } else { -dec_lo[k] })
            .collect();
        let dec_hi: Vec<f64> = rec_hi.iter().rev().copied().collect();
        Self {
            dec_lo,
            dec_hi,
            rec_lo,
            rec_hi,
        }
    }

    pub fn len(&self) -> usize {
        self.rec_lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rec_lo.is_empty()
    }
}
