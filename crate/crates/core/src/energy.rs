//! Band energies of a five-level decomposition and the six-share energy
//! distribution used as the classifier input.
//!
//! With an orthonormal periodic transform the coefficient energies of
//! `D1..D5` and `A5` add up to the energy of the segment, so dividing each by
//! the total gives the fraction of signal energy carried by each band.

use thiserror::Error;

use crate::class::Class;
use crate::dwt::{energy, Decomposition};

/// Number of decomposition levels the feature vector is defined on.
pub const FEATURE_LEVELS: usize = 5;
/// Number of shares: `D1..D5` plus `A5`.
pub const FEATURE_DIM: usize = FEATURE_LEVELS + 1;
/// Column names in feature order.
pub const FEATURE_NAMES: [&str; FEATURE_DIM] = ["D1", "D2", "D3", "D4", "D5", "A5"];
/// Allowed deviation of the share sum from one.
pub const SHARE_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("feature extraction needs exactly {FEATURE_LEVELS} levels, got {0}")]
    WrongLevels(usize),
    #[error("segment has zero energy; its band distribution is undefined")]
    ZeroEnergy,
    #[error("invalid feature shares: {0}")]
    InvalidShares(String),
}

/// Per-band coefficient energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEnergy {
    pub detail_energies: [f64; FEATURE_LEVELS],
    pub approx_energy: f64,
    pub total: f64,
}

impl BandEnergy {
    /// Energies in feature order `D1..D5, A5`.
    pub fn components(&self) -> [f64; FEATURE_DIM] {
        let mut out = [0.0; FEATURE_DIM];
        out[..FEATURE_LEVELS].copy_from_slice(&self.detail_energies);
        out[FEATURE_LEVELS] = self.approx_energy;
        out
    }
}

/// Energy of every band of a five-level decomposition.
pub fn band_energies(decomposition: &Decomposition) -> Result<BandEnergy, EnergyError> {
    if decomposition.levels() != FEATURE_LEVELS {
        return Err(EnergyError::WrongLevels(decomposition.levels()));
    }
    let mut detail_energies = [0.0; FEATURE_LEVELS];
    for (slot, detail) in detail_energies.iter_mut().zip(decomposition.details()) {
        *slot = energy(detail);
    }
    let approx_energy = energy(decomposition.approximation());
    let total = detail_energies.iter().sum::<f64>() + approx_energy;
    Ok(BandEnergy {
        detail_energies,
        approx_energy,
        total,
    })
}

/// Fractional energy distribution over `(D1, D2, D3, D4, D5, A5)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureVector {
    shares: [f64; FEATURE_DIM],
    label: Option<Class>,
}

impl FeatureVector {
    /// Accepts shares that each lie in `[0, 1]` and sum to one.
    pub fn new(shares: [f64; FEATURE_DIM], label: Option<Class>) -> Result<Self, EnergyError> {
        if let Some(bad) = shares.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(EnergyError::InvalidShares(format!(
                "share {bad} outside [0, 1]"
            )));
        }
        let sum: f64 = shares.iter().sum();
        if (sum - 1.0).abs() > SHARE_SUM_TOLERANCE {
            return Err(EnergyError::InvalidShares(format!(
                "shares sum to {sum}, not 1"
            )));
        }
        Ok(Self { shares, label })
    }

    pub fn shares(&self) -> &[f64; FEATURE_DIM] {
        &self.shares
    }

    pub fn label(&self) -> Option<Class> {
        self.label
    }

    pub fn with_label(mut self, label: Class) -> Self {
        self.label = Some(label);
        self
    }
}

/// Normalizes band energies by their total.
pub fn feature_vector(energies: &BandEnergy) -> Result<FeatureVector, EnergyError> {
    if energies.total <= 0.0 {
        return Err(EnergyError::ZeroEnergy);
    }
    let shares = energies.components().map(|c| c / energies.total);
    FeatureVector::new(shares, None)
}

/// Frequency range covered by one band.
#[derive(Debug, Clone, PartialEq)]
pub struct Band {
    pub name: String,
    /// Exclusive lower edge in Hz.
    pub low_hz: f64,
    /// Inclusive upper edge in Hz.
    pub high_hz: f64,
    /// Physiological rhythm the band corresponds to, if any.
    pub rhythm: &'static str,
}

impl Band {
    pub fn contains(&self, hz: f64) -> bool {
        hz > self.low_hz && hz <= self.high_hz
    }
}

/// Frequency bands of a dyadic decomposition, in order `D1..Dl, Al`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandTable {
    sampling_rate: f64,
    bands: Vec<Band>,
}

const RHYTHMS: [&str; FEATURE_DIM] = ["noises", "gamma", "beta", "alpha", "theta", "delta"];

impl BandTable {
    /// Detail level `l` covers `(fs / 2^(l+1), fs / 2^l]`; the final
    /// approximation covers `(0, fs / 2^(levels+1)]`.
    ///
    /// Rhythm labels are only assigned for the five-level layout.
    pub fn new(sampling_rate: f64, levels: usize) -> Self {
        let labelled = levels == FEATURE_LEVELS;
        let mut bands: Vec<Band> = (1..=levels)
            .map(|l| Band {
                name: format!("D{l}"),
                low_hz: sampling_rate / 2f64.powi(l as i32 + 1),
                high_hz: sampling_rate / 2f64.powi(l as i32),
                rhythm: if labelled { RHYTHMS[l - 1] } else { "" },
            })
            .collect();
        bands.push(Band {
            name: format!("A{levels}"),
            low_hz: 0.0,
            high_hz: sampling_rate / 2f64.powi(levels as i32 + 1),
            rhythm: if labelled { RHYTHMS[FEATURE_LEVELS] } else { "" },
        });
        Self {
            sampling_rate,
            bands,
        }
    }

    pub fn sampling_rate(&self) -> f64 {
        self.sampling_rate
    }

    pub fn bands(&self) -> &[Band] {
        &self.bands
    }

    pub fn get(&self, name: &str) -> Option<&Band> {
        self.bands.iter().find(|b| b.name == name)
    }

    /// Index of the band containing `hz`, if it lies in `(0, fs/2]`.
    pub fn locate(&self, hz: f64) -> Option<usize> {
        self.bands.iter().position(|b| b.contains(hz))
    }
}

/// The five-level table used for feature extraction.
pub fn band_table(sampling_rate: f64) -> BandTable {
    BandTable::new(sampling_rate, FEATURE_LEVELS)
}
