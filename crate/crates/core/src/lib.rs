//! Wavelet energy-distribution features and a feed-forward classifier for
//! single-channel EEG segments.
//!
//! The processing chain has two stages:
//!
//! * feature extraction: a five-level db4 [`dwt`] decomposition of each
//!   segment, followed by the fraction of signal energy held by each of the
//!   bands `D1..D5, A5` ([`energy`]);
//! * classification: a `6-5-1` `tanh` network ([`net`]) trained with
//!   Levenberg-Marquardt, scored with a confusion matrix ([`eval`]).
//!
//! [`data`] reads the Bonn EEG corpus (sets A, C, E) or generates a synthetic
//! stand-in, and [`pipeline`] wires the stages together the way the `wnn`
//! binary runs them. Runnable walkthroughs live in the crate's `examples/`.

pub mod chart;
pub mod class;
pub mod cli;
pub mod data;
pub mod dwt;
pub mod energy;
pub mod eval;
pub mod features;
pub mod net;
pub mod output;
pub mod pipeline;

use std::path::PathBuf;

use thiserror::Error;

pub use class::{Class, SetTag};

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Dwt(#[from] dwt::DwtError),
    #[error(transparent)]
    Energy(#[from] energy::EnergyError),
    #[error(transparent)]
    Net(#[from] net::NetError),
    #[error(transparent)]
    Data(#[from] data::DataError),
    #[error(transparent)]
    Eval(#[from] eval::EvalError),
    #[error(transparent)]
    Feature(#[from] features::FeatureError),
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("configuration: {0}")]
    Config(String),
    #[error("count mismatch: {0}")]
    CountMismatch(String),
}

impl Error {
    /// Process exit status: 1 usage, 2 data, 3 numeric or training failure.
    pub fn exit_code(&self) -> u8 {
        use net::NetError;
        match self {
            Error::Config(_) | Error::Energy(energy::EnergyError::WrongLevels(_)) => 1,
            Error::Net(NetError::Parse { .. }) => 2,
            Error::Net(NetError::Config(_)) => 1,
            Error::Net(_) => 3,
            _ => 2,
        }
    }
}
