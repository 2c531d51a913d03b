//! Levenberg-Marquardt on XOR with the 6-5-1 network (inputs padded with
//! zeros).
//!
//! ```text
//! cargo run --example train_xor
//! ```

use eeg_wnn::net::{init_network, lm_train, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inputs = [
        [-0.8, -0.8, 0.0, 0.0, 0.0, 0.0],
        [-0.8, 0.8, 0.0, 0.0, 0.0, 0.0],
        [0.8, -0.8, 0.0, 0.0, 0.0, 0.0],
        [0.8, 0.8, 0.0, 0.0, 0.0, 0.0],
    ];
    let targets = [-0.8, 0.8, 0.8, -0.8];
    let config = TrainConfig {
        mse_goal: 1e-3,
        max_epochs: 200,
        ..TrainConfig::default()
    };
    for seed in 0..5 {
        let mut net = init_network(seed);
        let report = lm_train(&mut net, &inputs, &targets, &config)?;
        let outputs: Vec<String> = inputs.iter().map(|x| format!("{:+.3}", net.forward(x))).collect();
        println!(
            "seed {seed}: {} after {} epochs, mse {:.2e}, outputs [{}]",
            report.stop_reason,
            report.epochs_run,
            report.final_mse,
            outputs.join(", ")
        );
    }
    Ok(())
}
