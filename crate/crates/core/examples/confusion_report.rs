//! Rendering a confusion matrix as a table and as CSV.
//!
//! ```text
//! cargo run --example confusion_report
//! ```

use eeg_wnn::eval::{render_csv, render_table, ConfusionMatrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // 50 test segments: rows are the true class, columns the decision.
    let cm = ConfusionMatrix::from_counts([[16, 0, 0], [2, 17, 0], [0, 1, 14]]);
    print!("{}", render_table(&cm));
    println!();
    print!("{}", render_csv(&cm));
    let acc = cm.accuracies()?;
    println!("\n{} of {} correct ({:.4})", cm.trace(), cm.total(), acc.overall);
    Ok(())
}
