//! EEG segment ingestion, a synthetic surrogate corpus and seeded splits.
//!
//! The Bonn recordings are ASCII files with one integer sample per line
//! (4097 lines per segment at 173.61 Hz). Each set lives in its own
//! directory; the caller supplies the directory for each of A, C and E.
//! Segments are truncated to [`SEGMENT_LEN`] samples so that five dyadic
//! levels divide them exactly.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::class::{Class, SetTag};
use crate::dwt::{db4_filter, reconstruct, Decomposition, DwtError, Signal};
use crate::energy::{FEATURE_DIM, FEATURE_LEVELS};

/// Sampling rate of the Bonn recordings in Hz.
pub const BONN_SAMPLING_RATE: f64 = 173.61;
/// Samples kept per segment.
pub const SEGMENT_LEN: usize = 4096;
/// Segments per set in the Bonn corpus.
pub const SEGMENTS_PER_SET: usize = 100;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("missing file or directory: {}", .0.display())]
    MissingFile(PathBuf),
    #[error("cannot read {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}:{line}: cannot parse `{content}` as an integer sample", .path.display())]
    ParseError {
        path: PathBuf,
        line: usize,
        content: String,
    },
    #[error("set {set} in {} has {found} segment files, expected {expected}", .dir.display())]
    WrongSegmentCount {
        set: SetTag,
        dir: PathBuf,
        found: usize,
        expected: usize,
    },
    #[error("{} has {len} samples, need at least {min}", .path.display())]
    ShortSegment { path: PathBuf, len: usize, min: usize },
    #[error("split of {total} items into {train} + {test} does not partition them")]
    CountMismatch {
        total: usize,
        train: usize,
        test: usize,
    },
    #[error(transparent)]
    Signal(#[from] DwtError),
}

/// One labelled EEG segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub id: String,
    pub set_tag: SetTag,
    pub signal: Signal,
}

impl Segment {
    pub fn label(&self) -> Class {
        self.set_tag.class()
    }
}

/// Where each set of the corpus lives on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct BonnLayout {
    pub root: PathBuf,
    /// Subdirectory of `root` holding each set.
    pub subdirs: BTreeMap<SetTag, PathBuf>,
    pub sampling_rate: f64,
    pub segments_per_set: usize,
}

impl BonnLayout {
    /// The usual archive layout: `Z` (A), `N` (C) and `S` (E) under `root`.
    pub fn new(root: impl Into<PathBuf>) -> Self {
        let subdirs = [(SetTag::A, "Z"), (SetTag::C, "N"), (SetTag::E, "S")]
            .into_iter()
            .map(|(tag, dir)| (tag, PathBuf::from(dir)))
            .collect();
        Self {
            root: root.into(),
            subdirs,
            sampling_rate: BONN_SAMPLING_RATE,
            segments_per_set: SEGMENTS_PER_SET,
        }
    }

    pub fn with_subdir(mut self, tag: SetTag, dir: impl Into<PathBuf>) -> Self {
        self.subdirs.insert(tag, dir.into());
        self
    }

    pub fn set_dir(&self, tag: SetTag) -> PathBuf {
        match self.subdirs.get(&tag) {
            Some(dir) => self.root.join(dir),
            None => self.root.join(tag.as_str()),
        }
    }
}

/// Reads one sample per line. Surrounding whitespace is ignored and blank
/// lines are accepted only at the end of the file.
pub fn read_samples(path: &Path) -> Result<Vec<f64>, DataError> {
    let text = fs::read_to_string(path).map_err(|source| match source.kind() {
        std::io::ErrorKind::NotFound => DataError::MissingFile(path.to_path_buf()),
        _ => DataError::Io {
            path: path.to_path_buf(),
            source,
        },
    })?;
    parse_samples(&text, path)
}

fn parse_samples(text: &str, path: &Path) -> Result<Vec<f64>, DataError> {
    let mut samples = Vec::with_capacity(SEGMENT_LEN + 1);
    let mut first_blank = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            first_blank.get_or_insert(i + 1);
            continue;
        }
        if let Some(blank) = first_blank {
            return Err(DataError::ParseError {
                path: path.to_path_buf(),
                line: blank,
                content: String::new(),
            });
        }
        let value: i64 = line.parse().map_err(|_| DataError::ParseError {
            path: path.to_path_buf(),
            line: i + 1,
            content: line.to_string(),
        })?;
        samples.push(value as f64);
    }
    Ok(samples)
}

/// Reads a segment file and keeps its first [`SEGMENT_LEN`] samples.
pub fn load_segment(path: &Path, sampling_rate: f64) -> Result<Signal, DataError> {
    let mut samples = read_samples(path)?;
    if samples.len() < SEGMENT_LEN {
        return Err(DataError::ShortSegment {
            path: path.to_path_buf(),
            len: samples.len(),
            min: SEGMENT_LEN,
        });
    }
    samples.truncate(SEGMENT_LEN);
    Ok(Signal::new(samples, sampling_rate)?)
}

fn segment_files(dir: &Path) -> Result<Vec<PathBuf>, DataError> {
    let entries = fs::read_dir(dir).map_err(|source| match source.kind() {
        std::io::ErrorKind::NotFound => DataError::MissingFile(dir.to_path_buf()),
        _ => DataError::Io {
            path: dir.to_path_buf(),
            source,
        },
    })?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| DataError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let hidden = entry.file_name().to_string_lossy().starts_with('.');
        if !hidden && entry.path().is_file() {
            files.push(entry.path());
        }
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

/// Loads sets A, C and E in that order; within a set, files are ordered by
/// name.
pub fn load_bonn(layout: &BonnLayout) -> Result<Vec<Segment>, DataError> {
    let mut jobs = Vec::new();
    for tag in SetTag::ALL {
        let dir = layout.set_dir(tag);
        let files = segment_files(&dir)?;
        if files.len() != layout.segments_per_set {
            return Err(DataError::WrongSegmentCount {
                set: tag,
                dir,
                found: files.len(),
                expected: layout.segments_per_set,
            });
        }
        jobs.extend(files.into_iter().map(|f| (tag, f)));
    }
    jobs.into_par_iter()
        .map(|(set_tag, path)| {
            let signal = load_segment(&path, layout.sampling_rate)?;
            let id = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(Segment {
                id,
                set_tag,
                signal,
            })
        })
        .collect()
}

/// Expected band shares `(D1, D2, D3, D4, D5, A5)` of synthetic segments.
///
/// These are engineering choices that follow the qualitative picture of the
/// three classes: healthy recordings spread energy over alpha and beta with a
/// large delta share, interictal recordings shift energy into theta and delta,
/// and ictal recordings concentrate it in beta, alpha and theta.
pub fn archetype(class: Class) -> [f64; FEATURE_DIM] {
    match class {
        Class::Healthy => [0.01, 0.05, 0.20, 0.20, 0.10, 0.44],
        Class::EpilepsySyndrome => [0.005, 0.02, 0.08, 0.10, 0.20, 0.595],
        Class::Seizure => [0.005, 0.04, 0.22, 0.26, 0.32, 0.155],
    }
}

/// Largest per-band jitter applied to an archetype share.
pub const SYNTH_JITTER: f64 = 0.03;
/// Realized shares are redrawn until every one lies this close to its archetype.
pub const SYNTH_MAX_DEVIATION: f64 = 0.06;

fn jittered_shares(rng: &mut ChaCha8Rng, base: &[f64; FEATURE_DIM]) -> [f64; FEATURE_DIM] {
    loop {
        let mut shares = base.map(|a| a + rng.random_range(-1.0..=1.0) * SYNTH_JITTER.min(a / 2.0));
        let sum: f64 = shares.iter().sum();
        shares.iter_mut().for_each(|s| *s /= sum);
        if shares
            .iter()
            .zip(base)
            .all(|(s, a)| (s - a).abs() <= SYNTH_MAX_DEVIATION)
        {
            return shares;
        }
    }
}

/// Synthesizes one segment whose wavelet band energies follow `shares`
/// exactly: each band is filled with white Gaussian coefficients, rescaled to
/// its share of the total energy and mapped back through the inverse
/// transform.
fn synth_signal(rng: &mut ChaCha8Rng, shares: &[f64; FEATURE_DIM]) -> Vec<f64> {
    let filter = db4_filter();
    let amplitude: f64 = rng.random_range(40.0..120.0);
    let total = amplitude * amplitude * SEGMENT_LEN as f64;
    let band_lengths = (1..=FEATURE_LEVELS)
        .map(|l| SEGMENT_LEN >> l)
        .chain(std::iter::once(SEGMENT_LEN >> FEATURE_LEVELS));
    let mut bands: Vec<Vec<f64>> = band_lengths
        .zip(shares)
        .map(|(len, share)| {
            let mut coeffs: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
            let energy: f64 = coeffs.iter().map(|c| c * c).sum();
            let scale = (share * total / energy).sqrt();
            coeffs.iter_mut().for_each(|c| *c *= scale);
            coeffs
        })
        .collect();
    let approximation = bands.pop().expect("six bands");
    let dec = Decomposition::from_parts(bands, approximation, SEGMENT_LEN)
        .expect("band lengths follow the dyadic layout");
    reconstruct(&dec, &filter).expect("valid decomposition")
}

/// Surrogate corpus of `per_class` segments per class, sets in A, C, E order.
///
/// Each segment draws its own target shares within [`SYNTH_MAX_DEVIATION`] of
/// its class [`archetype`]. Segments are [`SEGMENT_LEN`] samples at
/// [`BONN_SAMPLING_RATE`].
pub fn synth_corpus(seed: u64, per_class: usize) -> Vec<Segment> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(3 * per_class);
    for tag in SetTag::ALL {
        let base = archetype(tag.class());
        for i in 0..per_class {
            let shares = jittered_shares(&mut rng, &base);
            let samples = synth_signal(&mut rng, &shares);
            out.push(Segment {
                id: format!("synth-{tag}-{i:03}"),
                set_tag: tag,
                signal: Signal::new(samples, BONN_SAMPLING_RATE).expect("non-empty signal"),
            });
        }
    }
    out
}

/// Train/test partition sizes and the shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitSpec {
    pub train_count: usize,
    pub test_count: usize,
    pub seed: u64,
}

impl SplitSpec {
    pub fn new(train_count: usize, test_count: usize, seed: u64) -> Self {
        Self {
            train_count,
            test_count,
            seed,
        }
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self::new(250, 50, 0)
    }
}

/// Uniform random permutation of `0..len` from the split seed.
pub fn shuffled_indices(len: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(&mut rng);
    order
}

/// Seeded shuffle followed by a cut into `train_count` and `test_count`
/// items. The split is not stratified by class.
pub fn split<T: Clone>(items: &[T], spec: &SplitSpec) -> Result<(Vec<T>, Vec<T>), DataError> {
    if spec.train_count + spec.test_count != items.len() {
        return Err(DataError::CountMismatch {
            total: items.len(),
            train: spec.train_count,
            test: spec.test_count,
        });
    }
    let order = shuffled_indices(items.len(), spec.seed);
    let (train, test) = order.split_at(spec.train_count);
    Ok((
        train.iter().map(|&i| items[i].clone()).collect(),
        test.iter().map(|&i| items[i].clone()).collect(),
    ))
}
