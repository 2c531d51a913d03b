mod common;

use std::fs;
use std::path::Path;

use eeg_wnn::data::{
    archetype, load_bonn, shuffled_indices, split, synth_corpus, BonnLayout, DataError, SplitSpec, SEGMENT_LEN,
};
use eeg_wnn::dwt::db4_filter;
use eeg_wnn::features::extract_features;
use eeg_wnn::{Class, SetTag};

use common::fft_dwt_band_energies;

/// Writes `count` segment files of `lines` integer samples into `dir`.
fn write_set(dir: &Path, prefix: char, count: usize, lines: usize) {
    fs::create_dir_all(dir).unwrap();
    for i in 0..count {
        let body: String = (0..lines).map(|n| format!("{}\n", ((n * (i + 3)) % 97) as i64 - 48)).collect();
        fs::write(dir.join(format!("{prefix}{:03}.txt", i + 1)), body).unwrap();
    }
}

fn corpus_tree(root: &Path) {
    write_set(&root.join("Z"), 'Z', 100, 4097);
    write_set(&root.join("N"), 'N', 100, 4097);
    write_set(&root.join("S"), 'S', 100, 4097);
}

#[test]
fn full_corpus_loads_in_stable_order() {
    let tmp = tempfile::tempdir().unwrap();
    corpus_tree(tmp.path());
    let segments = load_bonn(&BonnLayout::new(tmp.path())).unwrap();
    assert_eq!(segments.len(), 300);
    for (block, tag) in SetTag::ALL.iter().enumerate() {
        let slice = &segments[block * 100..(block + 1) * 100];
        assert!(slice.iter().all(|s| s.set_tag == *tag));
        let ids: Vec<&str> = slice.iter().map(|s| s.id.as_str()).collect();
        let mut sorted = ids.clone();
        sorted.sort();
        assert_eq!(ids, sorted);
    }
    assert!(segments.iter().all(|s| s.signal.len() == SEGMENT_LEN));
    assert_eq!(segments[0].id, "Z001.txt");
    assert_eq!(segments[0].signal.samples()[1], -45.0);
    let again = load_bonn(&BonnLayout::new(tmp.path())).unwrap();
    assert_eq!(segments, again);
}

#[test]
fn missing_segment_is_reported_with_its_set() {
    let tmp = tempfile::tempdir().unwrap();
    corpus_tree(tmp.path());
    fs::remove_file(tmp.path().join("N").join("N050.txt")).unwrap();
    match load_bonn(&BonnLayout::new(tmp.path())) {
        Err(DataError::WrongSegmentCount { set, found, expected, .. }) => {
            assert_eq!((set, found, expected), (SetTag::C, 99, 100));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_set_directory_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    write_set(&tmp.path().join("Z"), 'Z', 100, 4097);
    assert!(load_bonn(&BonnLayout::new(tmp.path())).is_err());
}

#[test]
fn renamed_set_directories() {
    let tmp = tempfile::tempdir().unwrap();
    write_set(&tmp.path().join("setA"), 'Z', 3, 4097);
    write_set(&tmp.path().join("setC"), 'N', 3, 4097);
    write_set(&tmp.path().join("setE"), 'S', 3, 4097);
    let mut layout = BonnLayout::new(tmp.path())
        .with_subdir(SetTag::A, "setA")
        .with_subdir(SetTag::C, "setC")
        .with_subdir(SetTag::E, "setE");
    layout.segments_per_set = 3;
    assert_eq!(load_bonn(&layout).unwrap().len(), 9);
}

#[test]
fn short_and_malformed_segments_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    corpus_tree(tmp.path());
    write_set(&tmp.path().join("S"), 'S', 1, 4000);
    assert!(matches!(
        load_bonn(&BonnLayout::new(tmp.path())),
        Err(DataError::ShortSegment { len: 4000, .. })
    ));

    corpus_tree(tmp.path());
    let bad = tmp.path().join("Z").join("Z007.txt");
    let mut text = fs::read_to_string(&bad).unwrap();
    text = text.replacen("\n", "\n12x\n", 4);
    fs::write(&bad, text).unwrap();
    match load_bonn(&BonnLayout::new(tmp.path())) {
        Err(DataError::ParseError { line, content, .. }) => {
            assert_eq!(line, 2);
            assert_eq!(content, "12x");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn split_partitions_and_rejects_bad_counts() {
    let items: Vec<usize> = (0..300).collect();
    let (train, test) = split(&items, &SplitSpec::default()).unwrap();
    assert_eq!((train.len(), test.len()), (250, 50));
    let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
    all.sort();
    assert_eq!(all, items);
    assert!(matches!(
        split(&items, &SplitSpec::new(250, 49, 0)),
        Err(DataError::CountMismatch { total: 300, train: 250, test: 49 })
    ));
    assert_eq!(split(&items, &SplitSpec::new(250, 50, 5)).unwrap(), split(&items, &SplitSpec::new(250, 50, 5)).unwrap());
    assert_ne!(split(&items, &SplitSpec::new(250, 50, 5)).unwrap(), split(&items, &SplitSpec::new(250, 50, 6)).unwrap());
}

#[test]
fn first_shuffled_index_is_uniform() {
    // Chi-square with 9 degrees of freedom; 27.88 is the 0.999 quantile.
    let seeds = 5000;
    let mut counts = [0usize; 10];
    for seed in 0..seeds {
        counts[shuffled_indices(10, seed)[0]] += 1;
    }
    let expected = seeds as f64 / 10.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    assert!(chi2 < 27.88, "chi2 {chi2}, counts {counts:?}");
}

#[test]
fn test_set_class_counts_are_hypergeometric() {
    // 50 draws without replacement from 300 items, 100 per class:
    // mean 50/3, variance 50 * (1/3) * (2/3) * 250/299.
    let labels: Vec<Class> = SetTag::ALL.iter().flat_map(|t| [t.class(); 100]).collect();
    let runs = 1000;
    let counts: Vec<f64> = (0..runs)
        .map(|seed| {
            let (_, test) = split(&labels, &SplitSpec::new(250, 50, seed)).unwrap();
            test.iter().filter(|&&c| c == Class::Healthy).count() as f64
        })
        .collect();
    let mean = counts.iter().sum::<f64>() / runs as f64;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (runs - 1) as f64;
    let expected_var = 50.0 * (1.0 / 3.0) * (2.0 / 3.0) * 250.0 / 299.0;
    assert!((mean - 50.0 / 3.0).abs() < 0.4, "mean {mean}");
    assert!((var - expected_var).abs() < 1.5, "variance {var} vs {expected_var}");
}

#[test]
fn synthetic_class_means_follow_archetypes() {
    let corpus = synth_corpus(17, 100);
    assert_eq!(corpus.len(), 300);
    let records = extract_features(&corpus).unwrap();
    let filter = db4_filter();
    for class in Class::ALL {
        let members: Vec<_> = corpus
            .iter()
            .zip(&records)
            .filter(|(s, _)| s.label() == class)
            .collect();
        assert_eq!(members.len(), 100);
        let mut mean = [0.0; 6];
        let mut oracle_mean = [0.0; 6];
        for (segment, record) in &members {
            let shares = record.feature.shares();
            let energies = fft_dwt_band_energies(segment.signal.samples(), &filter);
            let total: f64 = energies.iter().sum();
            let oracle = energies.map(|e| e / total);
            for k in 0..6 {
                assert!((shares[k] - oracle[k]).abs() < 1e-9, "{} band {k}", segment.id);
                assert!((shares[k] - archetype(class)[k]).abs() <= 0.08, "{} band {k}", segment.id);
                mean[k] += shares[k] / 100.0;
                oracle_mean[k] += oracle[k] / 100.0;
            }
        }
        for k in 0..6 {
            let a = archetype(class)[k];
            assert!((mean[k] - a).abs() <= 0.03, "{class} band {k}: mean {} vs {a}", mean[k]);
            assert!((oracle_mean[k] - a).abs() <= 0.03, "{class} band {k}: fft {} vs {a}", oracle_mean[k]);
        }
    }
}

#[test]
fn synthetic_corpus_is_seeded() {
    let a = synth_corpus(3, 2);
    assert_eq!(a, synth_corpus(3, 2));
    let b = synth_corpus(4, 2);
    assert_ne!(a[0].signal.samples(), b[0].signal.samples());
    let ids: Vec<&str> = a.iter().map(|s| s.id.as_str()).collect();
    assert_eq!(ids, ["synth-A-000", "synth-A-001", "synth-C-000", "synth-C-001", "synth-E-000", "synth-E-001"]);
}
