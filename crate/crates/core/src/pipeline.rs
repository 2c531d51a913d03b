//! End-to-end runs: load or synthesize segments, extract features, split,
//! train and evaluate.
//!
//! A single run seed drives every random choice. Independent sub-seeds for
//! the synthetic corpus, the split and the weight initialization are taken
//! from separate ChaCha8 streams of that seed (see [`derive_seed`]).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::class::SetTag;
use crate::data::{load_bonn, shuffled_indices, synth_corpus, BonnLayout, Segment, SplitSpec};
use crate::energy::{FEATURE_DIM, FEATURE_LEVELS};
use crate::eval::{evaluate, ConfusionMatrix};
use crate::features::{extract_features, FeatureRecord};
use crate::net::{lm_train, ClassEncoding, Network, TrainConfig, TrainReport, DEFAULT_HIDDEN};
use crate::Error;

/// Purpose of a derived seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedStream {
    Synthetic = 1,
    Split = 2,
    Init = 3,
}

/// First `u64` of stream `purpose` of ChaCha8 seeded with `seed`.
pub fn derive_seed(seed: u64, purpose: SeedStream) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose as u64);
    rng.next_u64()
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Bonn(BonnLayout),
    Synthetic { per_class: usize },
}

impl DataSource {
    pub fn describe(&self) -> String {
        match self {
            DataSource::Bonn(layout) => format!("bonn:{}", layout.root.display()),
            DataSource::Synthetic { per_class } => format!("synthetic:{per_class}"),
        }
    }
}

/// Everything a run needs. Defaults follow the reference setup: db4, five
/// levels, a `6-5-1` network, 250 training and 50 test segments and an MSE
/// goal of 0.1.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Option<DataSource>,
    pub levels: usize,
    pub hidden: usize,
    pub train_count: usize,
    pub test_count: usize,
    pub seed: u64,
    pub train: TrainConfig,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            source: None,
            levels: FEATURE_LEVELS,
            hidden: DEFAULT_HIDDEN,
            train_count: 250,
            test_count: 50,
            seed: 0,
            train: TrainConfig::default(),
            out_dir: PathBuf::from("wnn-out"),
        }
    }
}

/// Entries of a `key = value` configuration file, with their line numbers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub const KEYS: [&'static str; 16] = [
        "data_root",
        "set_a",
        "set_c",
        "set_e",
        "sampling_rate",
        "synthetic",
        "per_class",
        "train_count",
        "test_count",
        "seed",
        "levels",
        "hidden",
        "mse_goal",
        "max_epochs",
        "out",
        "segments_per_set",
    ];

    /// Blank lines and lines starting with `#` are ignored. Values may be
    /// wrapped in double quotes.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", i + 1)))?;
            let key = key.trim();
            if !Self::KEYS.contains(&key) {
                return Err(Error::Config(format!("line {}: unknown key `{key}`", i + 1)));
            }
            let value = value.trim().trim_matches('"').to_string();
            entries.insert(key.to_string(), (value, i + 1));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, Error> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((value, line)) => value.parse().map(Some).map_err(|_| {
                Error::Config(format!("line {line}: invalid value `{value}` for {key}"))
            }),
        }
    }

    /// Overlays the file's settings on `config`.
    pub fn apply(&self, config: &mut RunConfig) -> Result<(), Error> {
        if let Some(root) = self.get("data_root") {
            let mut layout = BonnLayout::new(root);
            for (key, tag) in [("set_a", SetTag::A), ("set_c", SetTag::C), ("set_e", SetTag::E)] {
                if let Some(dir) = self.get(key) {
                    layout = layout.with_subdir(tag, dir);
                }
            }
            if let Some(rate) = self.parsed("sampling_rate")? {
                layout.sampling_rate = rate;
            }
            if let Some(n) = self.parsed("segments_per_set")? {
                layout.segments_per_set = n;
            }
            config.source = Some(DataSource::Bonn(layout));
        }
        if self.parsed::<bool>("synthetic")? == Some(true) {
            let per_class = self.parsed("per_class")?.unwrap_or(100);
            config.source = Some(DataSource::Synthetic { per_class });
        }
        if let Some(v) = self.parsed("train_count")? {
            config.train_count = v;
        }
        if let Some(v) = self.parsed("test_count")? {
            config.test_count = v;
        }
        if let Some(v) = self.parsed("seed")? {
            config.seed = v;
        }
        if let Some(v) = self.parsed("levels")? {
            config.levels = v;
        }
        if let Some(v) = self.parsed("hidden")? {
            config.hidden = v;
        }
        if let Some(v) = self.parsed("mse_goal")? {
            config.train.mse_goal = v;
        }
        if let Some(v) = self.parsed("max_epochs")? {
            config.train.max_epochs = v;
        }
        if let Some(v) = self.get("out") {
            config.out_dir = PathBuf::from(v);
        }
        Ok(())
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.levels == 0 {
            return Err(Error::Config("levels must be at least 1".into()));
        }
        if self.hidden == 0 {
            return Err(Error::Config("hidden layer must have at least one neuron".into()));
        }
        self.train.validate()?;
        Ok(())
    }

    pub fn layer_sizes(&self) -> [usize; 3] {
        [FEATURE_DIM, self.hidden, 1]
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec::new(
            self.train_count,
            self.test_count,
            derive_seed(self.seed, SeedStream::Split),
        )
    }

    fn source(&self) -> Result<&DataSource, Error> {
        self.source
            .as_ref()
            .ok_or_else(|| Error::Config("no data source: pass --data-root or --synthetic".into()))
    }
}

pub fn load_segments(config: &RunConfig) -> Result<Vec<Segment>, Error> {
    match config.source()? {
        DataSource::Bonn(layout) => Ok(load_bonn(layout)?),
        DataSource::Synthetic { per_class } => {
            if *per_class == 0 {
                return Err(Error::Config("per_class must be at least 1".into()));
            }
            Ok(synth_corpus(derive_seed(config.seed, SeedStream::Synthetic), *per_class))
        }
    }
}

/// Loads the configured segments and computes their energy distributions.
pub fn featurize(config: &RunConfig) -> Result<Vec<FeatureRecord>, Error> {
    config.validate()?;
    if config.levels != FEATURE_LEVELS {
        return Err(Error::Config(format!(
            "features are defined on {FEATURE_LEVELS} levels; --levels {} only applies to `decompose`",
            config.levels
        )));
    }
    let segments = load_segments(config)?;
    Ok(extract_features(&segments)?)
}

/// A trained network and the data partition it was trained on.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub net: Network,
    pub report: TrainReport,
    pub train: Vec<FeatureRecord>,
    pub test: Vec<FeatureRecord>,
    pub split_seed: u64,
    pub init_seed: u64,
}

/// Network inputs and class targets for a set of records.
pub fn training_pairs(records: &[FeatureRecord], encoding: &ClassEncoding) -> (Vec<[f64; FEATURE_DIM]>, Vec<f64>) {
    records
        .iter()
        .map(|r| (*r.feature.shares(), encoding.target(r.label())))
        .unzip()
}

/// Splits `records` with the run's split seed and trains a fresh network on
/// the training part.
pub fn train(records: &[FeatureRecord], config: &RunConfig) -> Result<TrainOutcome, Error> {
    config.validate()?;
    let spec = config.split_spec();
    if spec.train_count + spec.test_count != records.len() {
        return Err(Error::CountMismatch(format!(
            "{} feature vectors cannot be split into {} training + {} test",
            records.len(),
            spec.train_count,
            spec.test_count
        )));
    }
    if spec.train_count == 0 {
        return Err(Error::CountMismatch("training set is empty".into()));
    }
    let order = shuffled_indices(records.len(), spec.seed);
    let (train_idx, test_idx) = order.split_at(spec.train_count);
    let train: Vec<FeatureRecord> = train_idx.iter().map(|&i| records[i].clone()).collect();
    let test: Vec<FeatureRecord> = test_idx.iter().map(|&i| records[i].clone()).collect();

    let init_seed = derive_seed(config.seed, SeedStream::Init);
    let mut net = Network::random(&config.layer_sizes(), init_seed)?;
    let (inputs, targets) = training_pairs(&train, &ClassEncoding::default());
    let train_config = TrainConfig {
        rng_seed: init_seed,
        ..config.train.clone()
    };
    let report = lm_train(&mut net, &inputs, &targets, &train_config)?;
    Ok(TrainOutcome {
        net,
        report,
        train,
        test,
        split_seed: spec.seed,
        init_seed,
    })
}

/// Confusion matrix of `net` on labelled records.
pub fn evaluate_records(net: &Network, records: &[FeatureRecord]) -> Result<ConfusionMatrix, Error> {
    if records.is_empty() {
        return Err(Error::CountMismatch("no feature vectors to evaluate".into()));
    }
    if net.input_dim() != FEATURE_DIM {
        return Err(Error::Config(format!(
            "model expects {} inputs, features have {FEATURE_DIM}",
            net.input_dim()
        )));
    }
    Ok(evaluate(
        net,
        &ClassEncoding::default(),
        records.iter().map(|r| (&r.feature, r.label())),
    ))
}

/// Result of one seeded train/test run.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub seed: u64,
    pub outcome: TrainOutcome,
    pub confusion: ConfusionMatrix,
}

impl Experiment {
    pub fn overall_accuracy(&self) -> f64 {
        self.confusion
            .overall_accuracy()
            .expect("test set is non-empty")
    }
}

pub fn run_experiment(records: &[FeatureRecord], config: &RunConfig) -> Result<Experiment, Error> {
    let outcome = train(records, config)?;
    let confusion = evaluate_records(&outcome.net, &outcome.test)?;
    Ok(Experiment {
        seed: config.seed,
        outcome,
        confusion,
    })
}

/// Runs the full pipeline once per seed in `seeds`. A Bonn corpus is read
/// once; a synthetic corpus is regenerated per seed.
pub fn run_seeds(config: &RunConfig, seeds: impl IntoIterator<Item = u64>) -> Result<Vec<Experiment>, Error> {
    let shared = match config.source()? {
        DataSource::Bonn(_) => Some(featurize(config)?),
        DataSource::Synthetic { .. } => None,
    };
    seeds
        .into_iter()
        .map(|seed| {
            let cfg = RunConfig {
                seed,
                ..config.clone()
            };
            let records = match &shared {
                Some(records) => records.clone(),
                None => featurize(&cfg)?,
            };
            run_experiment(&records, &cfg)
        })
        .collect()
}

/// Median of a non-empty slice (mean of the two middle values for even lengths).
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    assert!(n > 0, "median of an empty slice");
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// `key = value` record of a training run.
pub fn manifest(config: &RunConfig, outcome: &TrainOutcome) -> String {
    let mut out = String::new();
    let source = config
        .source
        .as_ref()
        .map(DataSource::describe)
        .unwrap_or_else(|| "features-file".into());
    let ids = |records: &[FeatureRecord]| {
        records
            .iter()
            .map(|r| r.segment_id.as_str())
            .collect::<Vec<_>>()
            .join(",")
    };
    let t = &config.train;
    let entries: Vec<(&str, String)> = vec![
        ("source", source),
        ("seed", config.seed.to_string()),
        ("split_seed", outcome.split_seed.to_string()),
        ("init_seed", outcome.init_seed.to_string()),
        ("wavelet", "db4".into()),
        ("levels", config.levels.to_string()),
        ("layers", format!("{},{},1", FEATURE_DIM, config.hidden)),
        ("train_count", outcome.train.len().to_string()),
        ("test_count", outcome.test.len().to_string()),
        ("mse_goal", t.mse_goal.to_string()),
        ("max_epochs", t.max_epochs.to_string()),
        ("mu_init", t.mu_init.to_string()),
        ("mu_decrease", t.mu_decrease.to_string()),
        ("mu_increase", t.mu_increase.to_string()),
        ("mu_max", t.mu_max.to_string()),
        ("min_gradient", t.min_gradient.to_string()),
        ("final_mse", format!("{:.16e}", outcome.report.final_mse)),
        ("epochs_run", outcome.report.epochs_run.to_string()),
        ("stop_reason", outcome.report.stop_reason.to_string()),
        ("train_ids", ids(&outcome.train)),
        ("test_ids", ids(&outcome.test)),
    ];
    for (k, v) in entries {
        writeln!(out, "{k} = {v}").unwrap();
    }
    out
}
