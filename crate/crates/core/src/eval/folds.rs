use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trace::{Dataset, GestureLabel};

/// Fold index for every sample, in dataset order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub assignments: Vec<usize>,
    pub folds: usize,
    pub seed: u64,
    pub stratified: bool,
}

impl FoldPlan {
    /// Sample indices belonging to `fold`, ascending.
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, f)| **f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.folds];
        for f in &self.assignments {
            sizes[*f] += 1;
        }
        sizes
    }
}

pub fn make_folds(ds: &Dataset, folds: usize, seed: u64, stratified: bool) -> Result<FoldPlan> {
    make_folds_for_labels(&ds.labels(), folds, seed, stratified)
}

/// Seeded assignment of samples to `folds` near-equal subsets.
///
/// Stratified plans shuffle each class separately and deal its samples
/// round-robin, continuing the rotation from one class to the next, so
/// fold sizes differ by at most one both per class and overall.
pub fn make_folds_for_labels(
    labels: &[GestureLabel],
    folds: usize,
    seed: u64,
    stratified: bool,
) -> Result<FoldPlan> {
    if folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {folds}")));
    }
    if folds > labels.len() {
        return Err(Error::Config(format!(
            "{folds} folds requested for only {} samples",
            labels.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0; labels.len()];

    let groups: Vec<Vec<usize>> = if stratified {
        GestureLabel::ALL
            .iter()
            .map(|l| {
                (0..labels.len())
                    .filter(|&i| labels[i] == *l)
                    .collect::<Vec<_>>()
            })
            .filter(|g| !g.is_empty())
            .collect()
    } else {
        vec![(0..labels.len()).collect()]
    };

    let mut next = 0;
    for mut group in groups {
        if stratified && group.len() < folds {
            return Err(Error::Config(format!(
                "class {} has {} samples, fewer than {folds} folds",
                labels[group[0]],
                group.len()
            )));
        }
        group.shuffle(&mut rng);
        for i in group {
            assignments[i] = next % folds;
            next += 1;
        }
    }

    Ok(FoldPlan {
        assignments,
        folds,
        seed,
        stratified,
    })
}
