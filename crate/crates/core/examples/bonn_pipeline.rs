//! Ten split seeds on the Bonn EEG corpus (sets A, C, E under `Z/`, `N/`,
//! `S/`), reporting the median test accuracy.
//!
//! ```text
//! cargo run --release --example bonn_pipeline -- /path/to/bonn
//! ```

use eeg_wnn::data::BonnLayout;
use eeg_wnn::eval::percent;
use eeg_wnn::pipeline::{median, run_seeds, DataSource, RunConfig};
use eeg_wnn::Class;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let Some(root) = std::env::args_os().nth(1) else {
        eprintln!("usage: bonn_pipeline <DATA_ROOT>");
        std::process::exit(1);
    };
    let config = RunConfig {
        source: Some(DataSource::Bonn(BonnLayout::new(root))),
        ..RunConfig::default()
    };
    let runs = run_seeds(&config, 0..10)?;
    println!("seed  epochs  mse     healthy  overall");
    for run in &runs {
        println!(
            "{:<6}{:<8}{:<8.4}{:<9}{}",
            run.seed,
            run.outcome.report.epochs_run,
            run.outcome.report.final_mse,
            run.confusion
                .class_accuracy(Class::Healthy)
                .map(percent)
                .unwrap_or_else(|_| "n/a".into()),
            percent(run.overall_accuracy())
        );
    }
    let overall: Vec<f64> = runs.iter().map(|r| r.overall_accuracy()).collect();
    println!("median overall {}", percent(median(&overall)));
    Ok(())
}
