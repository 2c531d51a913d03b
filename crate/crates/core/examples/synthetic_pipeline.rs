//! The full pipeline on the synthetic corpus: 300 segments, 250/50 split,
//! 6-5-1 network trained to an MSE of 0.1, confusion matrix on the test set.
//!
//! ```text
//! cargo run --release --example synthetic_pipeline -- [SEED]
//! ```

use eeg_wnn::eval::render_table;
use eeg_wnn::pipeline::{featurize, run_experiment, DataSource, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0);
    let config = RunConfig {
        source: Some(DataSource::Synthetic { per_class: 100 }),
        seed,
        ..RunConfig::default()
    };
    let records = featurize(&config)?;
    let run = run_experiment(&records, &config)?;
    let report = &run.outcome.report;
    println!(
        "seed {seed}: {} after {} epochs, training mse {:.4}\n",
        report.stop_reason, report.epochs_run, report.final_mse
    );
    print!("{}", render_table(&run.confusion));
    Ok(())
}
