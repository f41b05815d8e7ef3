use lightwave_gesture::dataset_io::{load_dataset, save_dataset, DataFormat};
use lightwave_gesture::eval::{cross_validate, make_folds, KnnConfig};
use lightwave_gesture::knn::{fit, KnnModel, Metric};
use lightwave_gesture::pipeline::{preprocess, preprocess_all, PipelineConfig};
use lightwave_gesture::synth::{generate_dataset, GenConfig};
use lightwave_gesture::trace::{AcquisitionMeta, Dataset, Trace};

fn small() -> Dataset {
    generate_dataset(&GenConfig {
        reps_per_class: 6,
        ..GenConfig::default()
    })
    .unwrap()
}

#[test]
fn dataset_survives_both_file_formats() {
    let ds = small();
    let dir = tempfile::tempdir().unwrap();
    for (name, fmt) in [("d.csv", DataFormat::Csv), ("d.json", DataFormat::Json)] {
        let path = dir.path().join(name);
        save_dataset(&ds, &path, fmt).unwrap();
        assert_eq!(load_dataset(&path, fmt).unwrap(), ds);
    }
}

#[test]
fn saved_model_predicts_the_same() {
    let ds = small();
    let cfg = PipelineConfig::default();
    let fvs: Vec<_> = ds
        .traces()
        .iter()
        .map(|t| preprocess(t, &cfg).unwrap())
        .collect();
    let (train, test) = fvs.split_at(40);
    let model = fit(train.to_vec(), 3, Metric::Euclidean).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    model.save(&path).unwrap();
    let loaded = KnnModel::load(&path).unwrap();
    assert_eq!(loaded, model);
    for fv in test {
        assert_eq!(
            loaded.predict(&fv.values).unwrap(),
            model.predict(&fv.values).unwrap()
        );
    }
}

#[test]
fn failures_stay_in_place_and_are_excluded() {
    let ds = small();
    let mut traces = ds.traces().to_vec();
    let label = traces[5].label();
    traces[5] = Trace::new(vec![2.0; 600], AcquisitionMeta::default(), label).unwrap();
    let results = preprocess_all(&traces, &PipelineConfig::default());
    assert!(results[5].is_err());
    assert_eq!(results.iter().filter(|r| r.is_err()).count(), 1);

    let ds = Dataset::new(traces).unwrap();
    let plan = make_folds(&ds, 3, 1, true).unwrap();
    let r = cross_validate(
        &ds,
        &PipelineConfig::default(),
        &KnnConfig::default(),
        &plan,
    )
    .unwrap();
    assert_eq!((r.n_traces, r.excluded), (48, 1));
    assert_eq!(r.excluded_indices, vec![5]);
}
