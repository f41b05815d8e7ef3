//! Exact k-nearest-neighbour classification.
//!
//! Neighbours are the `k` training vectors with the smallest distance, ties
//! on distance going to the lower training index. The majority label wins;
//! a tie in votes goes to the class whose voting neighbours have the smaller
//! summed distance, then to the lower label ordinal.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segment::FeatureVector;
use crate::trace::GestureLabel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
    Manhattan,
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Metric::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Manhattan => "manhattan",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "manhattan" => Ok(Metric::Manhattan),
            other => Err(Error::Config(format!("unknown metric {other:?}"))),
        }
    }
}

pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub label: GestureLabel,
    pub values: Vec<f64>,
}

/// A fitted (i.e. memorised) training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModel")]
pub struct KnnModel {
    k: usize,
    metric: Metric,
    training: Vec<TrainingExample>,
}

#[derive(Deserialize)]
struct RawModel {
    k: usize,
    metric: Metric,
    training: Vec<TrainingExample>,
}

impl TryFrom<RawModel> for KnnModel {
    type Error = Error;

    fn try_from(raw: RawModel) -> Result<Self> {
        KnnModel::from_examples(raw.training, raw.k, raw.metric)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: GestureLabel,
    /// Labels of the `k` neighbours, nearest first.
    pub neighbor_labels: Vec<GestureLabel>,
    pub neighbor_indices: Vec<usize>,
    pub neighbor_distances: Vec<f64>,
    /// Votes per class, indexed by label ordinal.
    pub vote_counts: [usize; GestureLabel::COUNT],
}

/// Stores `training` for later queries.
pub fn fit(training: Vec<FeatureVector>, k: usize, metric: Metric) -> Result<KnnModel> {
    let examples = training
        .into_iter()
        .enumerate()
        .map(|(index, fv)| match fv.label {
            Some(label) => Ok(TrainingExample {
                label,
                values: fv.values,
            }),
            None => Err(Error::Invalid {
                index,
                message: "training vector is unlabeled".into(),
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    KnnModel::from_examples(examples, k, metric)
}

impl KnnModel {
    pub fn from_examples(training: Vec<TrainingExample>, k: usize, metric: Metric) -> Result<Self> {
        if training.is_empty() {
            return Err(Error::Config("training set is empty".into()));
        }
        if k == 0 || k > training.len() {
            return Err(Error::Config(format!(
                "k must be between 1 and {}, got {k}",
                training.len()
            )));
        }
        let dim = training[0].values.len();
        if let Some(index) = training.iter().position(|e| e.values.len() != dim) {
            return Err(Error::Invalid {
                index,
                message: format!(
                    "vector length {} differs from {dim}",
                    training[index].values.len()
                ),
            });
        }
        Ok(Self {
            k,
            metric,
            training,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.training.len()
    }

    pub fn is_empty(&self) -> bool {
        self.training.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.training[0].values.len()
    }

    pub fn training(&self) -> &[TrainingExample] {
        &self.training
    }

    pub fn predict(&self, query: &[f64]) -> Result<Prediction> {
        if query.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                actual: query.len(),
            });
        }
        let mut ranked: Vec<(f64, usize)> = self
            .training
            .iter()
            .enumerate()
            .map(|(i, e)| (self.metric.distance(&e.values, query), i))
            .collect();
        let by_rank = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < ranked.len() {
            ranked.select_nth_unstable_by(self.k - 1, by_rank);
            ranked.truncate(self.k);
        }
        ranked.sort_unstable_by(by_rank);

        let mut votes = [0usize; GestureLabel::COUNT];
        let mut summed = [0.0f64; GestureLabel::COUNT];
        for &(d, i) in &ranked {
            let o = self.training[i].label.ordinal();
            votes[o] += 1;
            summed[o] += d;
        }
        let best = (0..GestureLabel::COUNT)
            .filter(|&o| votes[o] > 0)
            .min_by(|&a, &b| {
                votes[b]
                    .cmp(&votes[a])
                    .then(summed[a].total_cmp(&summed[b]))
                    .then(a.cmp(&b))
            })
            .expect("k >= 1");

        Ok(Prediction {
            label: GestureLabel::ALL[best],
            neighbor_labels: ranked
                .iter()
                .map(|&(_, i)| self.training[i].label)
                .collect(),
            neighbor_indices: ranked.iter().map(|&(_, i)| i).collect(),
            neighbor_distances: ranked.iter().map(|&(d, _)| d).collect(),
            vote_counts: votes,
        })
    }

    pub fn predict_batch<Q: AsRef<[f64]>>(&self, queries: &[Q]) -> Result<Vec<Prediction>> {
        queries.iter().map(|q| self.predict(q.as_ref())).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::dataset_io::write_atomic(path.as_ref(), self.to_json()?.as_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

impl Prediction {
    /// Largest vote count.
    pub fn max_votes(&self) -> usize {
        self.vote_counts.iter().copied().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use GestureLabel::*;

    fn fv(values: &[f64], label: GestureLabel) -> FeatureVector {
        FeatureVector::new(values.to_vec(), Some(label))
    }

    #[test]
    fn fit_bounds() {
        let train: Vec<FeatureVector> = (0..10).map(|i| fv(&[i as f64], A)).collect();
        assert_eq!(fit(train.clone(), 3, Metric::Euclidean).unwrap().len(), 10);
        assert!(fit(train.clone(), 0, Metric::Euclidean).is_err());
        assert!(fit(train.clone(), 11, Metric::Euclidean).is_err());
        let mut mixed = train;
        mixed.push(fv(&[1.0, 2.0], B));
        assert!(matches!(
            fit(mixed, 1, Metric::Euclidean),
            Err(Error::Invalid { index: 10, .. })
        ));
        assert!(fit(
            vec![FeatureVector::new(vec![0.0], None)],
            1,
            Metric::Euclidean
        )
        .is_err());
    }

    #[test]
    fn exact_match_with_k1() {
        let m = fit(
            vec![fv(&[0.0, 1.0], A), fv(&[5.0, 5.0], G), fv(&[9.0, 1.0], B)],
            1,
            Metric::Euclidean,
        )
        .unwrap();
        assert_eq!(m.predict(&[5.0, 5.0]).unwrap().label, G);
    }

    #[test]
    fn majority_by_hand() {
        let m = fit(
            vec![fv(&[0.0, 0.0], A), fv(&[1.0, 0.0], A), fv(&[4.0, 0.0], B)],
            3,
            Metric::Euclidean,
        )
        .unwrap();
        let p = m.predict(&[0.4, 0.0]).unwrap();
        assert_eq!(p.label, A);
        assert_eq!(p.vote_counts[A.ordinal()], 2);
        assert_eq!(p.vote_counts[B.ordinal()], 1);
        let expect = [0.4, 0.6, 3.6];
        for (d, e) in p.neighbor_distances.iter().zip(expect) {
            assert!((d - e).abs() < 1e-12);
        }
    }

    #[test]
    fn vote_tie_goes_to_closer_class() {
        // One neighbour each; class D is nearer, so D wins despite the higher ordinal.
        let m = fit(vec![fv(&[3.0], B), fv(&[-1.0], D)], 2, Metric::Euclidean).unwrap();
        assert_eq!(m.predict(&[0.0]).unwrap().label, D);
        // Equal summed distance falls back to the lower ordinal.
        let m = fit(vec![fv(&[2.0], E), fv(&[-2.0], C)], 2, Metric::Manhattan).unwrap();
        assert_eq!(m.predict(&[0.0]).unwrap().label, C);
    }

    #[test]
    fn distance_tie_prefers_lower_index() {
        let m = fit(vec![fv(&[1.0], H), fv(&[-1.0], A)], 1, Metric::Euclidean).unwrap();
        let p = m.predict(&[0.0]).unwrap();
        assert_eq!(p.neighbor_indices, vec![0]);
        assert_eq!(p.label, H);
    }

    #[test]
    fn query_length_checked() {
        let m = fit(vec![fv(&[1.0, 2.0], A)], 1, Metric::Euclidean).unwrap();
        assert!(matches!(
            m.predict(&[1.0]),
            Err(Error::LengthMismatch {
                expected: 2,
                actual: 1
            })
        ));
    }

    #[test]
    fn batch_matches_single() {
        let train: Vec<FeatureVector> = (0..20)
            .map(|i| fv(&[i as f64, (i * 7 % 5) as f64], GestureLabel::ALL[i % 8]))
            .collect();
        let m = fit(train, 5, Metric::Euclidean).unwrap();
        let empty: Vec<Vec<f64>> = vec![];
        assert!(m.predict_batch(&empty).unwrap().is_empty());
        let queries: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64 * 3.3, 1.5]).collect();
        let batch = m.predict_batch(&queries).unwrap();
        for (q, p) in queries.iter().zip(&batch) {
            assert_eq!(&m.predict(q).unwrap(), p);
        }
    }

    #[test]
    fn json_roundtrip_and_validation() {
        let m = fit(
            vec![fv(&[0.1, 1e-7], A), fv(&[2.0, 3.0], F)],
            2,
            Metric::Manhattan,
        )
        .unwrap();
        let back = KnnModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        let broken = m.to_json().unwrap().replace("\"k\":2", "\"k\":3");
        assert!(KnnModel::from_json(&broken).is_err());
    }
}
