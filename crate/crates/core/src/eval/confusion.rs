use serde::{Deserialize, Serialize};

use crate::trace::GestureLabel;

const N: usize = GestureLabel::COUNT;

/// Performed (rows) versus estimated (columns) gesture frequencies.
///
/// Rows with test support sum to one. A row whose class never appeared in
/// the test data is all zeros and has zero support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub rows: [[f64; N]; N],
    /// Test samples behind each row.
    pub support: [usize; N],
}

impl ConfusionMatrix {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (GestureLabel, GestureLabel)>) -> Self {
        let mut counts = [[0usize; N]; N];
        for (performed, estimated) in pairs {
            counts[performed.ordinal()][estimated.ordinal()] += 1;
        }
        Self::from_counts(&counts)
    }

    pub fn from_counts(counts: &[[usize; N]; N]) -> Self {
        let mut rows = [[0.0; N]; N];
        let mut support = [0; N];
        for r in 0..N {
            let total: usize = counts[r].iter().sum();
            support[r] = total;
            if total > 0 {
                for c in 0..N {
                    rows[r][c] = counts[r][c] as f64 / total as f64;
                }
            }
        }
        Self { rows, support }
    }

    pub fn identity() -> Self {
        let mut rows = [[0.0; N]; N];
        for (i, row) in rows.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Self {
            rows,
            support: [1; N],
        }
    }

    /// Element-wise mean. Each row is averaged over the matrices in which
    /// that class had support.
    pub fn mean(matrices: &[ConfusionMatrix]) -> Self {
        let mut rows = [[0.0; N]; N];
        let mut support = [0; N];
        for r in 0..N {
            let present: Vec<&ConfusionMatrix> =
                matrices.iter().filter(|m| m.support[r] > 0).collect();
            support[r] = present.iter().map(|m| m.support[r]).sum();
            if present.is_empty() {
                continue;
            }
            for (c, cell) in rows[r].iter_mut().enumerate() {
                *cell = present.iter().map(|m| m.rows[r][c]).sum::<f64>() / present.len() as f64;
            }
        }
        Self { rows, support }
    }

    pub fn diagonal(&self) -> [f64; N] {
        std::array::from_fn(|i| self.rows[i][i])
    }

    pub fn row_sum(&self, row: usize) -> f64 {
        self.rows[row].iter().sum()
    }

    /// Largest deviation from 1 among supported row sums.
    pub fn max_row_sum_error(&self) -> f64 {
        (0..N)
            .filter(|&r| self.support[r] > 0)
            .map(|r| (self.row_sum(r) - 1.0).abs())
            .fold(0.0, f64::max)
    }
}
