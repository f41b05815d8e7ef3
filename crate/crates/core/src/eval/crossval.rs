use serde::{Deserialize, Serialize};

use super::confusion::ConfusionMatrix;
use super::folds::FoldPlan;
use crate::error::{Error, Result};
use crate::knn::{KnnModel, Metric, TrainingExample, DEFAULT_K};
use crate::pipeline::{preprocess_all, PipelineConfig};
use crate::trace::{Dataset, GestureLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnConfig {
    pub k: usize,
    pub metric: Metric,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            metric: Metric::Euclidean,
        }
    }
}

/// Outcome of a cross-validation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub folds: usize,
    pub seed: u64,
    pub stratified: bool,
    pub k: usize,
    pub metric: Metric,
    /// Shared recording distance, when the dataset has a single one.
    pub distance_cm: Option<f64>,
    pub ambient_on: Option<bool>,
    pub n_traces: usize,
    /// Traces dropped because preprocessing rejected them.
    pub excluded: usize,
    pub excluded_indices: Vec<usize>,
    pub per_fold_accuracy: Vec<f64>,
    pub mean_accuracy: f64,
    /// Sample standard deviation of the per-fold accuracies.
    pub accuracy_sd: f64,
    pub mean_confusion: ConfusionMatrix,
    pub fold_confusion: Vec<ConfusionMatrix>,
}

/// Runs every fold of `plan`: train on the other folds, test on this one.
///
/// Each trace is preprocessed on its own (z-scoring uses only that trace), so
/// preparing all traces up front is the same as preparing them per fold.
pub fn cross_validate(
    ds: &Dataset,
    pipeline: &PipelineConfig,
    knn: &KnnConfig,
    plan: &FoldPlan,
) -> Result<EvalReport> {
    if plan.assignments.len() != ds.len() {
        return Err(Error::LengthMismatch {
            expected: ds.len(),
            actual: plan.assignments.len(),
        });
    }
    let labels = ds.labels();
    let mut vectors: Vec<Option<Vec<f64>>> = Vec::with_capacity(ds.len());
    let mut excluded_indices = Vec::new();
    for (i, result) in preprocess_all(ds.traces(), pipeline)
        .into_iter()
        .enumerate()
    {
        match result {
            Ok(fv) => vectors.push(Some(fv.values)),
            Err(_) => {
                excluded_indices.push(i);
                vectors.push(None);
            }
        }
    }

    let mut per_fold_accuracy = Vec::with_capacity(plan.folds);
    let mut fold_confusion = Vec::with_capacity(plan.folds);
    for fold in 0..plan.folds {
        let mut training = Vec::new();
        let mut tests: Vec<(&[f64], GestureLabel)> = Vec::new();
        for (i, v) in vectors.iter().enumerate() {
            let Some(v) = v else { continue };
            if plan.assignments[i] == fold {
                tests.push((v, labels[i]));
            } else {
                training.push(TrainingExample {
                    label: labels[i],
                    values: v.clone(),
                });
            }
        }
        if tests.is_empty() {
            return Err(Error::EmptyFold { fold });
        }
        let model = KnnModel::from_examples(training, knn.k, knn.metric)?;
        let mut pairs = Vec::with_capacity(tests.len());
        for (values, truth) in &tests {
            pairs.push((*truth, model.predict(values)?.label));
        }
        let correct = pairs.iter().filter(|(t, p)| t == p).count();
        per_fold_accuracy.push(correct as f64 / pairs.len() as f64);
        fold_confusion.push(ConfusionMatrix::from_pairs(pairs));
    }

    let n = per_fold_accuracy.len() as f64;
    let mean_accuracy = per_fold_accuracy.iter().sum::<f64>() / n;
    let accuracy_sd = if per_fold_accuracy.len() > 1 {
        (per_fold_accuracy
            .iter()
            .map(|a| (a - mean_accuracy).powi(2))
            .sum::<f64>()
            / (n - 1.0))
            .sqrt()
    } else {
        0.0
    };
    let conditions = ds.uniform_conditions();

    Ok(EvalReport {
        folds: plan.folds,
        seed: plan.seed,
        stratified: plan.stratified,
        k: knn.k,
        metric: knn.metric,
        distance_cm: conditions.map(|c| c.0),
        ambient_on: conditions.map(|c| c.1),
        n_traces: ds.len(),
        excluded: excluded_indices.len(),
        excluded_indices,
        per_fold_accuracy,
        mean_accuracy,
        accuracy_sd,
        mean_confusion: ConfusionMatrix::mean(&fold_confusion),
        fold_confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::make_folds;
    use crate::trace::{AcquisitionMeta, Trace};

    fn pulse_trace(centre_s: f64, width_s: f64, sign: f64, label: GestureLabel) -> Trace {
        let samples = (0..600)
            .map(|i| {
                let t = i as f64 / 100.0;
                1.0 + sign * 0.3 * (-0.5 * ((t - centre_s) / width_s).powi(2)).exp()
            })
            .collect();
        Trace::new(samples, AcquisitionMeta::default(), Some(label)).unwrap()
    }

    #[test]
    fn duplicated_data_is_perfect() {
        // Every trace has an identical twin of its own class, so k = 1 always
        // finds a zero-distance neighbour with the right label.
        let mut traces = Vec::new();
        for (o, l) in GestureLabel::ALL.iter().enumerate() {
            for rep in 0..10 {
                let t = pulse_trace(2.0 + 0.1 * (rep % 5) as f64, 0.1 + 0.05 * o as f64, 1.0, *l);
                traces.push(t);
            }
        }
        let ds = Dataset::new(traces).unwrap();
        let plan = make_folds(&ds, 5, 4, true).unwrap();
        let knn = KnnConfig {
            k: 1,
            metric: Metric::Euclidean,
        };
        let report = cross_validate(&ds, &PipelineConfig::default(), &knn, &plan).unwrap();
        assert_eq!(report.mean_accuracy, 1.0);
        assert_eq!(report.mean_confusion.rows, ConfusionMatrix::identity().rows);
    }

    #[test]
    fn two_separated_classes() {
        let mut traces = Vec::new();
        for rep in 0..12 {
            let jitter = 0.05 * rep as f64;
            traces.push(pulse_trace(2.0 + jitter, 0.2, 1.0, GestureLabel::A));
            traces.push(pulse_trace(2.0 + jitter, 0.2, -1.0, GestureLabel::F));
        }
        let ds = Dataset::new(traces).unwrap();
        for folds in [2, 3, 6, 12] {
            let plan = make_folds(&ds, folds, 7, true).unwrap();
            let report = cross_validate(
                &ds,
                &PipelineConfig::default(),
                &KnnConfig::default(),
                &plan,
            )
            .unwrap();
            assert_eq!(report.mean_accuracy, 1.0, "folds {folds}");
            assert_eq!(report.accuracy_sd, 0.0);
            assert_eq!(report.mean_confusion.support[0], 12);
            assert_eq!(report.mean_confusion.support[1], 0);
        }
    }

    #[test]
    fn flat_traces_are_excluded() {
        let mut traces: Vec<Trace> = (0..12)
            .map(|i| pulse_trace(2.0 + 0.02 * i as f64, 0.3, 1.0, GestureLabel::B))
            .collect();
        traces.push(
            Trace::new(
                vec![1.0; 600],
                AcquisitionMeta::default(),
                Some(GestureLabel::B),
            )
            .unwrap(),
        );
        let ds = Dataset::new(traces).unwrap();
        let plan = make_folds(&ds, 3, 0, false).unwrap();
        let knn = KnnConfig {
            k: 1,
            metric: Metric::Euclidean,
        };
        let report = cross_validate(&ds, &PipelineConfig::default(), &knn, &plan).unwrap();
        assert_eq!(report.excluded, 1);
        assert_eq!(report.excluded_indices, vec![12]);
    }
}
