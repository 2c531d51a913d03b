//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use eeg_wnn::dwt::WaveletFilter;

pub const FS: f64 = 173.61;
pub const N: usize = 4096;

/// Uniform noise in `[-1, 1)` from a fixed seed.
pub fn random_signal(seed: u64, len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn tone(hz: f64, len: usize, fs: f64) -> Vec<f64> {
    (0..len).map(|n| (2.0 * PI * hz * n as f64 / fs).sin()).collect()
}

/// Band index `0..=5` (`D1..D5, A5`) of a frequency, using edges computed
/// directly from `fs`: `D_l` is `(fs/2^(l+1), fs/2^l]`, `A5` is `[0, fs/64]`.
pub fn oracle_band(hz: f64, fs: f64) -> usize {
    for l in 1..=5 {
        if hz > fs / f64::powi(2.0, l + 1) {
            return (l - 1) as usize;
        }
    }
    5
}

/// Fraction of energy per band `D1..D5, A5` from the discrete Fourier
/// transform of `x`.
pub fn fft_band_shares(x: &[f64], fs: f64) -> [f64; 6] {
    let n = x.len();
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut bands = [0.0; 6];
    for (k, c) in buf.iter().enumerate() {
        let bin = k.min(n - k);
        let hz = bin as f64 * fs / n as f64;
        bands[oracle_band(hz, fs)] += c.norm_sqr();
    }
    let total: f64 = bands.iter().sum();
    bands.map(|b| b / total)
}

/// `|F(w)|^2 / 2` for a filter with taps `f`, so that the lowpass and
/// highpass responses sum to one at every frequency.
pub fn power(f: &[f64], w: f64) -> f64 {
    let (re, im) = f
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(re, im), (k, &c)| (re + c * (w * k as f64).cos(), im - c * (w * k as f64).sin()));
    (re * re + im * im) / 2.0
}

/// Band shares predicted from the Fourier spectrum of `x` and the cascaded
/// filter responses: `D_l` sees `G(2^(l-1) w) * prod_{j<l-1} H(2^j w)`.
pub fn response_weighted_shares(x: &[f64], filter: &WaveletFilter) -> [f64; 6] {
    let n = x.len();
    let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let mut bands = [0.0; 6];
    for (k, c) in buf.iter().enumerate() {
        let w = 2.0 * PI * k as f64 / n as f64;
        let mut pass = 1.0;
        for (l, band) in bands.iter_mut().take(5).enumerate() {
            let scaled = w * 2f64.powi(l as i32);
            *band += c.norm_sqr() * pass * power(filter.highpass(), scaled);
            pass *= power(filter.lowpass(), scaled);
        }
        bands[5] += c.norm_sqr() * pass;
    }
    let total: f64 = bands.iter().sum();
    bands.map(|b| b / total)
}

fn response(f: &[f64], w: f64) -> Complex<f64> {
    f.iter()
        .enumerate()
        .map(|(k, &c)| Complex::from_polar(c, -w * k as f64))
        .sum()
}

/// Band energies `D1..D5, A5` of the periodic DWT computed through the
/// Fourier domain. Band `l` is the circular correlation of `x` with the
/// cascaded filter `G(z^(2^(l-1))) * prod_{j<l-1} H(z^(2^j))`, sampled every
/// `2^l` points.
pub fn fft_dwt_band_energies(x: &[f64], filter: &WaveletFilter) -> [f64; 6] {
    let n = x.len();
    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut spectrum: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
    forward.process(&mut spectrum);
    let band = |level: usize, last: &dyn Fn(f64) -> Complex<f64>| -> f64 {
        let mut buf: Vec<Complex<f64>> = spectrum
            .iter()
            .enumerate()
            .map(|(k, &xk)| {
                let w = 2.0 * PI * k as f64 / n as f64;
                let mut c = last(w * (1 << (level - 1)) as f64);
                for j in 0..level - 1 {
                    c *= response(filter.lowpass(), w * (1 << j) as f64);
                }
                xk * c.conj()
            })
            .collect();
        inverse.process(&mut buf);
        buf.iter().step_by(1 << level).map(|v| (v.re / n as f64).powi(2)).sum()
    };
    let mut out = [0.0; 6];
    for level in 1..=5 {
        out[level - 1] = band(level, &|w| response(filter.highpass(), w));
    }
    out[5] = band(5, &|w| response(filter.lowpass(), w));
    out
}
