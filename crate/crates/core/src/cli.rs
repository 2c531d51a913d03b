//! The `wnn` command line.
//!
//! Settings resolve in order: command-line flags, then the `--config` file,
//! then built-in defaults. Every command stages its files and only moves them
//! into `--out` once it has succeeded.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::chart::energy_distribution_svg;
use crate::data::{read_samples, BonnLayout, BONN_SAMPLING_RATE};
use crate::dwt::{db4_filter, decompose_samples, energy, Signal};
use crate::energy::BandTable;
use crate::eval::{percent, render_csv, render_table};
use crate::features::{read_records, records_to_csv, summarize, summary_to_csv, summary_to_text};
use crate::net::{load_model, save_model};
use crate::output::OutputStage;
use crate::pipeline::{self, ConfigFile, DataSource, RunConfig};
use crate::Error;

#[derive(Debug, Parser)]
#[command(
    name = "wnn",
    version,
    about = "Wavelet energy-distribution EEG classifier (db4 MRA + Levenberg-Marquardt network)"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct GlobalArgs {
    /// `key = value` settings file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory holding one subdirectory per recording set (Z, N, S by default).
    #[arg(long, global = true, value_name = "PATH")]
    pub data_root: Option<PathBuf>,
    /// Use the synthetic surrogate corpus instead of recorded data.
    #[arg(long, global = true)]
    pub synthetic: bool,
    /// Segments per class for --synthetic.
    #[arg(long, global = true, value_name = "N")]
    pub per_class: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Decomposition depth (features require 5).
    #[arg(long, global = true, value_name = "N")]
    pub levels: Option<usize>,
    /// Hidden-layer width.
    #[arg(long, global = true, value_name = "N")]
    pub hidden: Option<usize>,
    #[arg(long, global = true, value_name = "X")]
    pub mse_goal: Option<f64>,
    #[arg(long, global = true, value_name = "N")]
    pub max_epochs: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub train_count: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub test_count: Option<usize>,
    /// Sampling rate in Hz for segment files.
    #[arg(long, global = true, value_name = "HZ")]
    pub sampling_rate: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract the six-band energy distribution of every segment.
    Featurize {
        /// Skip the SVG chart.
        #[arg(long)]
        no_svg: bool,
    },
    /// Split, train a network and save it.
    Train {
        /// Train from an existing feature CSV instead of the dataset.
        #[arg(long, value_name = "PATH")]
        features: Option<PathBuf>,
    },
    /// Score a saved model on a feature CSV.
    Evaluate {
        /// Model file (default: <out>/model.txt).
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        /// Feature CSV (default: <out>/test_features.csv).
        #[arg(long, value_name = "PATH")]
        features: Option<PathBuf>,
    },
    /// Dump the wavelet coefficients and band energies of one segment file.
    Decompose {
        /// ASCII file with one sample per line.
        segment: PathBuf,
    },
    /// Featurize, train and evaluate in one go.
    Report {
        /// Repeat with this many consecutive seeds and summarize accuracy.
        #[arg(long, default_value_t = 1, value_name = "K")]
        repeats: u64,
    },
}

/// Builds the run configuration from defaults, the config file and flags.
pub fn resolve_config(args: &GlobalArgs) -> Result<RunConfig, Error> {
    let mut config = RunConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        ConfigFile::parse(&text)?.apply(&mut config)?;
    }
    if let Some(root) = &args.data_root {
        let previous = match config.source.take() {
            Some(DataSource::Bonn(layout)) => layout,
            _ => BonnLayout::new(root),
        };
        config.source = Some(DataSource::Bonn(BonnLayout {
            root: root.clone(),
            ..previous
        }));
    }
    if args.synthetic {
        let per_class = match &config.source {
            Some(DataSource::Synthetic { per_class }) => *per_class,
            _ => 100,
        };
        config.source = Some(DataSource::Synthetic { per_class });
    }
    if let Some(n) = args.per_class {
        match &mut config.source {
            Some(DataSource::Synthetic { per_class }) => *per_class = n,
            _ => return Err(Error::Config("--per-class requires --synthetic".into())),
        }
    }
    if let Some(rate) = args.sampling_rate {
        if let Some(DataSource::Bonn(layout)) = &mut config.source {
            layout.sampling_rate = rate;
        }
    }
    macro_rules! set {
        ($flag:ident => $($field:ident).+) => {
            if let Some(v) = args.$flag {
                config.$($field).+ = v;
            }
        };
    }
    set!(seed => seed);
    set!(levels => levels);
    set!(hidden => hidden);
    set!(mse_goal => train.mse_goal);
    set!(max_epochs => train.max_epochs);
    set!(train_count => train_count);
    set!(test_count => test_count);
    if let Some(out) = &args.out {
        config.out_dir = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn sampling_rate(args: &GlobalArgs, config: &RunConfig) -> f64 {
    match (&args.sampling_rate, &config.source) {
        (Some(rate), _) => *rate,
        (None, Some(DataSource::Bonn(layout))) => layout.sampling_rate,
        _ => BONN_SAMPLING_RATE,
    }
}

fn featurize_into(stage: &mut OutputStage, config: &RunConfig, svg: bool) -> Result<Vec<crate::features::FeatureRecord>, Error> {
    let records = pipeline::featurize(config)?;
    let summary = summarize(&records);
    stage.write("features.csv", records_to_csv(&records))?;
    stage.write("class_summary.csv", summary_to_csv(&summary))?;
    if svg {
        stage.write("energy_distribution.svg", energy_distribution_svg(&summary))?;
    }
    println!("{} segments featurized", records.len());
    print!("{}", summary_to_text(&summary));
    Ok(records)
}

fn train_into(
    stage: &mut OutputStage,
    config: &RunConfig,
    records: &[crate::features::FeatureRecord],
) -> Result<pipeline::TrainOutcome, Error> {
    let outcome = pipeline::train(records, config)?;
    stage.write("model.txt", save_model(&outcome.net))?;
    stage.write("manifest.txt", pipeline::manifest(config, &outcome))?;
    stage.write("train_features.csv", records_to_csv(&outcome.train))?;
    stage.write("test_features.csv", records_to_csv(&outcome.test))?;
    let history: String = std::iter::once("epoch,mse\n".to_string())
        .chain(
            outcome
                .report
                .mse_history
                .iter()
                .enumerate()
                .map(|(i, m)| format!("{i},{m:.16e}\n")),
        )
        .collect();
    stage.write("mse_history.csv", history)?;
    println!(
        "trained on {} vectors: stop_reason={} epochs={} final_mse={:.6}",
        outcome.train.len(),
        outcome.report.stop_reason,
        outcome.report.epochs_run,
        outcome.report.final_mse
    );
    Ok(outcome)
}

fn evaluate_into(
    stage: &mut OutputStage,
    net: &crate::net::Network,
    records: &[crate::features::FeatureRecord],
) -> Result<crate::eval::ConfusionMatrix, Error> {
    let cm = pipeline::evaluate_records(net, records)?;
    let table = render_table(&cm);
    stage.write("evaluation.txt", &table)?;
    stage.write("evaluation.csv", render_csv(&cm))?;
    print!("{table}");
    Ok(cm)
}

fn cmd_decompose(args: &GlobalArgs, config: &RunConfig, segment: &Path) -> Result<(), Error> {
    let mut samples = read_samples(segment)?;
    let levels = config.levels;
    let block = 1usize
        .checked_shl(levels as u32)
        .ok_or_else(|| Error::Config(format!("{levels} levels is too deep")))?;
    samples.truncate(samples.len() / block * block);
    let signal = Signal::new(samples, sampling_rate(args, config))?;
    let dec = decompose_samples(signal.samples(), &db4_filter(), levels)?;
    let table = BandTable::new(signal.sampling_rate(), levels);
    let energies: Vec<f64> = dec.bands().map(energy).collect();
    let total: f64 = energies.iter().sum();
    if total <= 0.0 {
        return Err(crate::energy::EnergyError::ZeroEnergy.into());
    }

    let mut stage = OutputStage::new(&config.out_dir)?;
    for (name, coeffs) in dec.band_names().iter().zip(dec.bands()) {
        let mut csv = String::from("index,coefficient\n");
        for (i, c) in coeffs.iter().enumerate() {
            csv.push_str(&format!("{i},{c:.16e}\n"));
        }
        stage.write(&format!("{name}.csv"), csv)?;
    }
    let mut summary = String::from("band,low_hz,high_hz,rhythm,energy,share\n");
    let mut line = Vec::new();
    for ((band, e), name) in table.bands().iter().zip(&energies).zip(dec.band_names()) {
        let share = e / total;
        summary.push_str(&format!(
            "{name},{:.6},{:.6},{},{e:.16e},{share:.16e}\n",
            band.low_hz, band.high_hz, band.rhythm
        ));
        line.push(format!("{name}={}%", percent(share)));
    }
    summary.push_str(&format!("total,,,,{total:.16e},{:.16e}\n", 1.0));
    stage.write("band_energy.csv", summary)?;
    stage.commit()?;
    println!(
        "{} samples, {levels} levels, energy {total:.6e}: {}",
        signal.len(),
        line.join(" ")
    );
    Ok(())
}

/// Runs one parsed command line.
pub fn execute(cli: &Cli) -> Result<(), Error> {
    let config = resolve_config(&cli.global)?;
    match &cli.command {
        Command::Featurize { no_svg } => {
            let mut stage = OutputStage::new(&config.out_dir)?;
            featurize_into(&mut stage, &config, !no_svg)?;
            stage.commit()?;
        }
        Command::Train { features } => {
            let records = match features {
                Some(path) => read_records(path)?,
                None => pipeline::featurize(&config)?,
            };
            let mut stage = OutputStage::new(&config.out_dir)?;
            train_into(&mut stage, &config, &records)?;
            stage.commit()?;
        }
        Command::Evaluate { model, features } => {
            let model = model.clone().unwrap_or_else(|| config.out_dir.join("model.txt"));
            let features = features
                .clone()
                .unwrap_or_else(|| config.out_dir.join("test_features.csv"));
            let net = load_model(&read_text(&model)?).map_err(|e| match e {
                crate::net::NetError::Parse { line, message } => crate::net::NetError::Parse {
                    line,
                    message: format!("{message} ({})", model.display()),
                },
                other => other,
            })?;
            let records = read_records(&features)?;
            let mut stage = OutputStage::new(&config.out_dir)?;
            evaluate_into(&mut stage, &net, &records)?;
            stage.commit()?;
        }
        Command::Decompose { segment } => cmd_decompose(&cli.global, &config, segment)?,
        Command::Report { repeats } => {
            let mut stage = OutputStage::new(&config.out_dir)?;
            if *repeats <= 1 {
                let records = featurize_into(&mut stage, &config, true)?;
                let outcome = train_into(&mut stage, &config, &records)?;
                evaluate_into(&mut stage, &outcome.net, &outcome.test)?;
            } else {
                let seeds = config.seed..config.seed + repeats;
                let runs = pipeline::run_seeds(&config, seeds)?;
                let mut csv = String::from("seed,final_mse,stop_reason,epochs,healthy,epilepsy_syndrome,seizure,overall\n");
                for run in &runs {
                    let acc = run.confusion.accuracies()?;
                    let cells: Vec<String> = acc
                        .per_class
                        .iter()
                        .map(|a| a.map(percent).unwrap_or_else(|| "n/a".into()))
                        .collect();
                    csv.push_str(&format!(
                        "{},{:.6},{},{},{},{}\n",
                        run.seed,
                        run.outcome.report.final_mse,
                        run.outcome.report.stop_reason,
                        run.outcome.report.epochs_run,
                        cells.join(","),
                        percent(acc.overall)
                    ));
                }
                let overall: Vec<f64> = runs.iter().map(|r| r.overall_accuracy()).collect();
                let best = overall.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                print!("{csv}");
                println!(
                    "median overall {} over {} seeds, best {}",
                    percent(pipeline::median(&overall)),
                    runs.len(),
                    percent(best)
                );
                stage.write("repeats.csv", csv)?;
            }
            stage.commit()?;
        }
    }
    Ok(())
}

/// Parses `args` and runs the command, returning the process exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
