//! Orthogonal discrete wavelet transform built on the two-channel decimating
//! filter bank.
//!
//! Every stage uses periodic (circular) extension. For an input `x` of even
//! length `N`, analysis output index `n` reads input indices `(2n + k) mod N`
//! for tap `k`:
//!
//! ```text
//! a[n] = sum_k lowpass[k]  * x[(2n + k) mod N]
//! d[n] = sum_k highpass[k] * x[(2n + k) mod N]
//! ```
//!
//! With an orthonormal filter the analysis operator is an orthogonal matrix, so
//! coefficient energy equals signal energy exactly and synthesis is its
//! transpose. Repeating the step on the running approximation gives the
//! multi-resolution decomposition `D1..Dl, Al`.

use std::sync::OnceLock;

use thiserror::Error;

/// Tolerance used when validating filter invariants.
pub const FILTER_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DwtError {
    #[error("input length {0} is odd; every filter-bank stage needs an even length")]
    OddLength(usize),
    #[error("input length {len} is too short (need at least {min})")]
    TooShort { len: usize, min: usize },
    #[error("decomposition shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("at least one decomposition level is required")]
    ZeroLevels,
    #[error("signal has no samples")]
    EmptySignal,
    #[error("sampling rate must be positive and finite, got {0}")]
    InvalidSamplingRate(f64),
    #[error("filter `{name}` violates {property}")]
    InvalidFilter { name: String, property: String },
}

/// A uniformly sampled real-valued segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    sampling_rate: f64,
}

impl Signal {
    pub fn new(samples: Vec<f64>, sampling_rate: f64) -> Result<Self, DwtError> {
        if samples.is_empty() {
            return Err(DwtError::EmptySignal);
        }
        if !(sampling_rate.is_finite() && sampling_rate > 0.0) {
            return Err(DwtError::InvalidSamplingRate(sampling_rate));
        }
        Ok(Self {
            samples,
            sampling_rate,
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sampling_rate(&self) -> f64 {
        self.sampling_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sum of squared samples.
    pub fn energy(&self) -> f64 {
        energy(&self.samples)
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
}

/// Orthonormal quadrature-mirror filter pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilter {
    name: String,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl WaveletFilter {
    /// Builds a filter from its scaling (lowpass) taps. The wavelet taps follow
    /// from the quadrature-mirror relation `highpass[k] = (-1)^k lowpass[L-1-k]`.
    ///
    /// The result is validated: sums, unit norms and double-shift
    /// orthonormality must hold within [`FILTER_TOLERANCE`].
    pub fn from_lowpass(name: impl Into<String>, lowpass: Vec<f64>) -> Result<Self, DwtError> {
        let len = lowpass.len();
        let highpass = (0..len)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                sign * lowpass[len - 1 - k]
            })
            .collect();
        let filter = Self {
            name: name.into(),
            lowpass,
            highpass,
        };
        filter.validate()?;
        Ok(filter)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }

    /// Checks every orthonormal-QMF invariant.
    pub fn validate(&self) -> Result<(), DwtError> {
        let fail = |property: &str| DwtError::InvalidFilter {
            name: self.name.clone(),
            property: property.to_string(),
        };
        let len = self.lowpass.len();
        if len < 2 || !len.is_multiple_of(2) || self.highpass.len() != len {
            return Err(fail("even, matching tap counts"));
        }
        let close = |a: f64, b: f64| (a - b).abs() <= FILTER_TOLERANCE;
        if !close(self.lowpass.iter().sum(), std::f64::consts::SQRT_2) {
            return Err(fail("lowpass sum = sqrt(2)"));
        }
        if !close(self.highpass.iter().sum(), 0.0) {
            return Err(fail("highpass zero average"));
        }
        for k in 0..len {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            if self.highpass[k] != sign * self.lowpass[len - 1 - k] {
                return Err(fail("quadrature-mirror relation"));
            }
        }
        for m in 0..len / 2 {
            let shift = 2 * m;
            let expected = if m == 0 { 1.0 } else { 0.0 };
            let lo: f64 = (0..len - shift)
                .map(|k| self.lowpass[k] * self.lowpass[k + shift])
                .sum();
            let hi: f64 = (0..len - shift)
                .map(|k| self.highpass[k] * self.highpass[k + shift])
                .sum();
            if !close(lo, expected) || !close(hi, expected) {
                return Err(fail("double-shift orthonormality"));
            }
        }
        Ok(())
    }
}

// Daubechies scaling filter with four vanishing moments (8 taps, "db4").
const DB4_LOWPASS: [f64; 8] = [
    0.230_377_813_308_855_23,
    0.714_846_570_552_541_5,
    0.630_880_767_929_590_4,
    -0.027_983_769_416_983_85,
    -0.187_034_811_718_881_14,
    0.030_841_381_835_986_965,
    0.032_883_011_666_982_945,
    -0.010_597_401_784_997_278,
];

/// The 8-tap Daubechies filter with four vanishing moments.
///
/// The embedded taps are validated once on first use.
pub fn db4_filter() -> WaveletFilter {
    static DB4: OnceLock<WaveletFilter> = OnceLock::new();
    DB4.get_or_init(|| {
        WaveletFilter::from_lowpass("db4", DB4_LOWPASS.to_vec())
            .expect("embedded db4 taps satisfy the orthonormal QMF invariants")
    })
    .clone()
}

/// Detail sequences `D1..Dl` plus the final approximation `Al`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    details: Vec<Vec<f64>>,
    approximation: Vec<f64>,
    source_length: usize,
}

impl Decomposition {
    /// Assembles a decomposition, checking the dyadic length structure.
    pub fn from_parts(
        details: Vec<Vec<f64>>,
        approximation: Vec<f64>,
        source_length: usize,
    ) -> Result<Self, DwtError> {
        check_shape(&details, &approximation, source_length)?;
        Ok(Self {
            details,
            approximation,
            source_length,
        })
    }

    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// `D_level` for `level` in `1..=levels`.
    pub fn detail(&self, level: usize) -> Option<&[f64]> {
        level
            .checked_sub(1)
            .and_then(|i| self.details.get(i))
            .map(Vec::as_slice)
    }

    pub fn details(&self) -> &[Vec<f64>] {
        &self.details
    }

    pub fn approximation(&self) -> &[f64] {
        &self.approximation
    }

    pub fn source_length(&self) -> usize {
        self.source_length
    }

    /// Coefficient bands in reporting order `D1, .., Dl, Al`.
    pub fn bands(&self) -> impl Iterator<Item = &[f64]> {
        self.details
            .iter()
            .map(Vec::as_slice)
            .chain(std::iter::once(self.approximation.as_slice()))
    }

    /// Band names matching [`Decomposition::bands`].
    pub fn band_names(&self) -> Vec<String> {
        (1..=self.levels())
            .map(|i| format!("D{i}"))
            .chain(std::iter::once(format!("A{}", self.levels())))
            .collect()
    }
}

fn check_shape(
    details: &[Vec<f64>],
    approximation: &[f64],
    source_length: usize,
) -> Result<(), DwtError> {
    let levels = details.len();
    if levels == 0 {
        return Err(DwtError::ZeroLevels);
    }
    if levels >= usize::BITS as usize || !source_length.is_multiple_of(1usize << levels) {
        return Err(DwtError::ShapeMismatch(format!(
            "source length {source_length} is not divisible by 2^{levels}"
        )));
    }
    for (i, d) in details.iter().enumerate() {
        let expected = source_length >> (i + 1);
        if d.len() != expected {
            return Err(DwtError::ShapeMismatch(format!(
                "D{} has {} coefficients, expected {expected}",
                i + 1,
                d.len()
            )));
        }
    }
    let expected = source_length >> levels;
    if approximation.len() != expected {
        return Err(DwtError::ShapeMismatch(format!(
            "A{levels} has {} coefficients, expected {expected}",
            approximation.len()
        )));
    }
    Ok(())
}

/// Sum of squares.
pub fn energy(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum()
}

/// One analysis stage: circular filtering followed by decimation by two.
pub fn dwt_step(input: &[f64], filter: &WaveletFilter) -> Result<(Vec<f64>, Vec<f64>), DwtError> {
    let len = input.len();
    if len < 2 {
        return Err(DwtError::TooShort { len, min: 2 });
    }
    if !len.is_multiple_of(2) {
        return Err(DwtError::OddLength(len));
    }
    let half = len / 2;
    let mut approx = vec![0.0; half];
    let mut detail = vec![0.0; half];
    for n in 0..half {
        let mut a = 0.0;
        let mut d = 0.0;
        for (k, (&lo, &hi)) in filter.lowpass.iter().zip(&filter.highpass).enumerate() {
            let x = input[(2 * n + k) % len];
            a += lo * x;
            d += hi * x;
        }
        approx[n] = a;
        detail[n] = d;
    }
    Ok((approx, detail))
}

/// One synthesis stage, the transpose of [`dwt_step`].
pub fn idwt_step(
    approx: &[f64],
    detail: &[f64],
    filter: &WaveletFilter,
) -> Result<Vec<f64>, DwtError> {
    if approx.len() != detail.len() {
        return Err(DwtError::ShapeMismatch(format!(
            "approximation has {} coefficients but detail has {}",
            approx.len(),
            detail.len()
        )));
    }
    if approx.is_empty() {
        return Err(DwtError::TooShort { len: 0, min: 1 });
    }
    let len = 2 * approx.len();
    let mut out = vec![0.0; len];
    for (n, (&a, &d)) in approx.iter().zip(detail).enumerate() {
        for (k, (&lo, &hi)) in filter.lowpass.iter().zip(&filter.highpass).enumerate() {
            out[(2 * n + k) % len] += lo * a + hi * d;
        }
    }
    Ok(out)
}

/// Multi-level decomposition: `levels` analysis stages on the running
/// approximation. The signal length must be a multiple of `2^levels`.
pub fn decompose(
    signal: &Signal,
    filter: &WaveletFilter,
    levels: usize,
) -> Result<Decomposition, DwtError> {
    decompose_samples(signal.samples(), filter, levels)
}

/// [`decompose`] on a bare sample slice.
pub fn decompose_samples(
    samples: &[f64],
    filter: &WaveletFilter,
    levels: usize,
) -> Result<Decomposition, DwtError> {
    if levels == 0 {
        return Err(DwtError::ZeroLevels);
    }
    let len = samples.len();
    let min = 1usize
        .checked_shl(levels as u32)
        .ok_or(DwtError::TooShort { len, min: usize::MAX })?;
    if len < min {
        return Err(DwtError::TooShort { len, min });
    }
    let mut details = Vec::with_capacity(levels);
    let mut running = samples.to_vec();
    for _ in 0..levels {
        let (approx, detail) = dwt_step(&running, filter)?;
        details.push(detail);
        running = approx;
    }
    Ok(Decomposition {
        details,
        approximation: running,
        source_length: len,
    })
}

/// Inverse of [`decompose`]; returns `source_length` samples.
pub fn reconstruct(
    decomposition: &Decomposition,
    filter: &WaveletFilter,
) -> Result<Vec<f64>, DwtError> {
    check_shape(
        &decomposition.details,
        &decomposition.approximation,
        decomposition.source_length,
    )?;
    let mut running = decomposition.approximation.clone();
    for detail in decomposition.details.iter().rev() {
        running = idwt_step(&running, detail, filter)?;
    }
    Ok(running)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn db4_sums_and_moments() {
        let f = db4_filter();
        assert_eq!(f.len(), 8);
        let lo_sum: f64 = f.lowpass().iter().sum();
        assert!((lo_sum - std::f64::consts::SQRT_2).abs() < 1e-12);
        let hi_sum: f64 = f.highpass().iter().sum();
        assert!(hi_sum.abs() < 1e-12);
        // First moment vanishes as well.
        let m1: f64 = f.highpass().iter().enumerate().map(|(k, h)| k as f64 * h).sum();
        assert!(m1.abs() < 1e-10, "first moment {m1}");
        let m2: f64 = f
            .highpass()
            .iter()
            .enumerate()
            .map(|(k, h)| (k * k) as f64 * h)
            .sum();
        assert!(m2.abs() < 1e-9, "second moment {m2}");
    }

    #[test]
    fn rejects_non_orthonormal_filter() {
        let err = WaveletFilter::from_lowpass("bad", vec![0.5, 0.5]).unwrap_err();
        assert!(matches!(err, DwtError::InvalidFilter { .. }));
        let haar = std::f64::consts::FRAC_1_SQRT_2;
        assert!(WaveletFilter::from_lowpass("haar", vec![haar, haar]).is_ok());
    }

    #[test]
    fn step_on_constant_and_zero() {
        let f = db4_filter();
        let (a, d) = dwt_step(&[3.0; 8], &f).unwrap();
        for v in &d {
            assert!(v.abs() < 1e-12);
        }
        for v in &a {
            assert!((v - 3.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
        }
        let (a, d) = dwt_step(&[0.0; 8], &f).unwrap();
        assert!(a.iter().chain(&d).all(|&v| v == 0.0));
    }

    #[test]
    fn step_on_impulse_picks_wrapped_taps() {
        // a[n] = h[(-2n) mod 8]: n = 0..4 -> taps 0, 6, 4, 2.
        let f = db4_filter();
        let mut x = [0.0; 8];
        x[0] = 1.0;
        let (a, d) = dwt_step(&x, &f).unwrap();
        let h = DB4_LOWPASS;
        assert_eq!(a, vec![h[0], h[6], h[4], h[2]]);
        let g: Vec<f64> = (0..8)
            .map(|k| if k % 2 == 0 { h[7 - k] } else { -h[7 - k] })
            .collect();
        assert_eq!(d, vec![g[0], g[6], g[4], g[2]]);
    }

    #[test]
    fn step_length_errors() {
        let f = db4_filter();
        assert_eq!(dwt_step(&[1.0; 7], &f), Err(DwtError::OddLength(7)));
        assert_eq!(
            dwt_step(&[1.0], &f),
            Err(DwtError::TooShort { len: 1, min: 2 })
        );
    }

    #[test]
    fn decompose_lengths() {
        let f = db4_filter();
        let x: Vec<f64> = (0..4096).map(|i| (i as f64 * 0.37).sin()).collect();
        let dec = decompose_samples(&x, &f, 5).unwrap();
        let lens: Vec<usize> = dec.details().iter().map(Vec::len).collect();
        assert_eq!(lens, vec![2048, 1024, 512, 256, 128]);
        assert_eq!(dec.approximation().len(), 128);
        assert_eq!(dec.band_names(), ["D1", "D2", "D3", "D4", "D5", "A5"]);
    }

    #[test]
    fn decompose_errors() {
        let f = db4_filter();
        assert_eq!(
            decompose_samples(&[1.0; 16], &f, 5),
            Err(DwtError::TooShort { len: 16, min: 32 })
        );
        // 48 = 3 * 16: third stage sees length 12, fourth length 6, fifth length 3.
        assert_eq!(
            decompose_samples(&[1.0; 48], &f, 5),
            Err(DwtError::OddLength(3))
        );
        assert_eq!(decompose_samples(&[1.0; 8], &f, 0), Err(DwtError::ZeroLevels));
    }

    #[test]
    fn constant_signal_has_empty_details() {
        let f = db4_filter();
        let dec = decompose_samples(&[2.5; 1024], &f, 5).unwrap();
        for d in dec.details() {
            assert!(d.iter().all(|v| v.abs() <= 1e-12));
        }
        let total = energy(dec.approximation());
        assert!((total - 2.5 * 2.5 * 1024.0).abs() / total < 1e-12);
    }

    #[test]
    fn zero_decomposition_reconstructs_zero() {
        let f = db4_filter();
        let dec = Decomposition::from_parts(
            vec![vec![0.0; 32], vec![0.0; 16]],
            vec![0.0; 16],
            64,
        )
        .unwrap();
        assert!(reconstruct(&dec, &f).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_approximation_coefficient_keeps_its_energy() {
        let f = db4_filter();
        let mut approx = vec![0.0; 128];
        approx[17] = 3.0;
        let details = (1..=5).map(|i| vec![0.0; 4096 >> i]).collect();
        let dec = Decomposition::from_parts(details, approx, 4096).unwrap();
        let x = reconstruct(&dec, &f).unwrap();
        assert_eq!(x.len(), 4096);
        assert!((energy(&x) - 9.0).abs() < 1e-10);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        let err = Decomposition::from_parts(vec![vec![0.0; 31]], vec![0.0; 32], 64).unwrap_err();
        assert!(matches!(err, DwtError::ShapeMismatch(_)));
        let err = Decomposition::from_parts(vec![vec![0.0; 32]], vec![0.0; 30], 64).unwrap_err();
        assert!(matches!(err, DwtError::ShapeMismatch(_)));
    }

    #[test]
    fn signal_invariants() {
        assert_eq!(Signal::new(vec![], 1.0), Err(DwtError::EmptySignal));
        assert!(matches!(
            Signal::new(vec![1.0], 0.0),
            Err(DwtError::InvalidSamplingRate(_))
        ));
        assert!(matches!(
            Signal::new(vec![1.0], f64::NAN),
            Err(DwtError::InvalidSamplingRate(_))
        ));
    }
}
