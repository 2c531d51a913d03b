//! Five-level db4 decomposition of a three-tone test signal.
//!
//! ```text
//! cargo run --example decompose_signal
//! ```

use std::f64::consts::PI;

use eeg_wnn::data::BONN_SAMPLING_RATE;
use eeg_wnn::dwt::{db4_filter, decompose, energy, reconstruct, Signal};
use eeg_wnn::energy::{band_energies, band_table, feature_vector};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fs = BONN_SAMPLING_RATE;
    // 2 Hz delta, 10 Hz alpha and 40 Hz gamma components.
    let samples: Vec<f64> = (0..4096)
        .map(|n| {
            let t = n as f64 / fs;
            60.0 * (2.0 * PI * 2.0 * t).sin() + 30.0 * (2.0 * PI * 10.0 * t).sin() + 10.0 * (2.0 * PI * 40.0 * t).sin()
        })
        .collect();
    let signal = Signal::new(samples, fs)?;
    let filter = db4_filter();
    let dec = decompose(&signal, &filter, 5)?;

    let shares = feature_vector(&band_energies(&dec)?)?;
    let table = band_table(fs);
    println!("{:<5}{:>10}{:>10}  {:<8}{:>8}{:>8}", "band", "low Hz", "high Hz", "rhythm", "coeffs", "share");
    for ((band, coeffs), share) in table.bands().iter().zip(dec.bands()).zip(shares.shares()) {
        println!(
            "{:<5}{:>10.2}{:>10.2}  {:<8}{:>8}{:>7.1}%",
            band.name,
            band.low_hz,
            band.high_hz,
            band.rhythm,
            coeffs.len(),
            share * 100.0
        );
    }

    let back = reconstruct(&dec, &filter)?;
    let err: f64 = signal.samples().iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum();
    println!(
        "\nsignal energy {:.6e}, band sum {:.6e}, reconstruction error {:.3e}",
        signal.energy(),
        dec.bands().map(energy).sum::<f64>(),
        (err / signal.energy()).sqrt()
    );
    Ok(())
}
