use proptest::prelude::*;
use repen::io::{read_csv, read_libsvm, write_csv, write_libsvm, LabelRule};
use repen::synth::{downsample, synth_gaussian_with_outliers};
use repen_core::{Dataset, Label, SparseRow};

fn sparse_dataset() -> impl Strategy<Value = Dataset> {
    (1usize..40, 1usize..20).prop_flat_map(|(d, n)| {
        let row = proptest::collection::btree_map(0u32..d as u32, -1e6f64..1e6, 0..d.min(8));
        (
            Just(d),
            proptest::collection::vec(row, n),
            proptest::collection::vec(any::<bool>(), n),
        )
            .prop_map(|(d, rows, flags)| {
                let rows = rows
                    .into_iter()
                    .map(|m| SparseRow::from_pairs(m.into_iter().filter(|(_, v)| *v != 0.0).collect()))
                    .collect();
                let labels = flags
                    .into_iter()
                    .map(|o| if o { Label::Outlier } else { Label::Inlier })
                    .collect();
                Dataset::from_sparse(d, rows).with_labels(labels)
            })
    })
}

proptest! {
    #[test]
    fn libsvm_round_trip(ds in sparse_dataset()) {
        let mut buf = Vec::new();
        write_libsvm(&mut buf, &ds).unwrap();
        let back = read_libsvm(buf.as_slice(), Some(ds.n_features()), &LabelRule::default()).unwrap();
        prop_assert_eq!(back, ds);
    }

    #[test]
    fn csv_round_trip(ds in sparse_dataset()) {
        let dense = ds.to_dense();
        let mut buf = Vec::new();
        write_csv(&mut buf, &dense).unwrap();
        prop_assert_eq!(read_csv(buf.as_slice(), Some("label")).unwrap(), dense);
    }
}

#[test]
fn libsvm_examples() {
    let rule = LabelRule::default();
    let ds = read_libsvm("1 3:0.5 7:1.0\n0 1:2.0".as_bytes(), None, &rule).unwrap();
    assert_eq!((ds.n_objects(), ds.n_features()), (2, 8));
    assert_eq!(ds.labels().unwrap()[0], Label::Outlier);
    assert_eq!(ds.row(0).to_dense(8), vec![0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let err = read_libsvm("".as_bytes(), None, &rule).unwrap_err();
    assert_eq!(err.to_string(), "no records");
    let unsorted = read_libsvm("1 7:0.5 3:1.0".as_bytes(), None, &rule).unwrap();
    let sorted = read_libsvm("1 3:1.0 7:0.5".as_bytes(), None, &rule).unwrap();
    assert_eq!(unsorted, sorted);
}

#[test]
fn csv_examples() {
    let ds = read_csv("1,2,3,4\n5,6,7,8\n9,10,11,12\n".as_bytes(), None).unwrap();
    assert_eq!((ds.n_objects(), ds.n_features()), (3, 4));
    assert!(ds.labels().is_none());
    let ds = read_csv("f1,f2,y\n1,2,0\n3,4,1\n".as_bytes(), Some("y")).unwrap();
    assert_eq!(ds.n_features(), 2);
    assert_eq!(ds.labels().unwrap(), &[Label::Inlier, Label::Outlier]);
    let err = read_csv("1,2,3,4\n1,2,3\n".as_bytes(), None).unwrap_err();
    assert!(err.to_string().contains("ragged"), "{err}");
}

#[test]
fn synth_shape_and_determinism() {
    let a = synth_gaussian_with_outliers(100, 5, 5, 9995, 8.0, 42).unwrap();
    assert_eq!((a.n_objects(), a.n_features()), (105, 10_000));
    assert_eq!(a.labels().unwrap().iter().filter(|l| l.is_outlier()).count(), 5);
    let b = synth_gaussian_with_outliers(100, 5, 5, 9995, 8.0, 42).unwrap();
    assert_eq!(a, b);
}

#[test]
fn synth_outliers_sit_further_from_inlier_centroid() {
    let ds = synth_gaussian_with_outliers(300, 20, 6, 0, 8.0, 3).unwrap();
    let v = ds.dense_values().unwrap();
    let d = ds.n_features();
    let mut centroid = vec![0.0; d];
    for i in 0..300 {
        for k in 0..d {
            centroid[k] += v[i * d + k] / 300.0;
        }
    }
    let dist = |i: usize| (0..d).map(|k| (v[i * d + k] - centroid[k]).powi(2)).sum::<f64>().sqrt();
    let inlier_mean = (0..300).map(dist).sum::<f64>() / 300.0;
    let outlier_mean = (300..320).map(dist).sum::<f64>() / 20.0;
    assert!(outlier_mean > inlier_mean, "{outlier_mean} vs {inlier_mean}");
}

#[test]
fn downsample_hits_rate() {
    let ds = synth_gaussian_with_outliers(980, 100, 3, 2, 4.0, 1).unwrap();
    let split = downsample(&ds, 0.02, 5).unwrap();
    let kept = ds.select(&split.kept);
    let outliers = kept.labels().unwrap().iter().filter(|l| l.is_outlier()).count();
    assert_eq!(outliers, 20);
    assert_eq!(split.held_out.len(), 80);
    assert!(split.held_out.iter().all(|i| !split.kept.contains(i)));
}
