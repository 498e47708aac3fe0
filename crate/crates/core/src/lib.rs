//! Link-level simulation of single-RF MIMO modulation.
//!
//! This crate implements eleven modulation schemes that convey information
//! with a single radio-frequency chain: five antenna-based schemes (SM,
//! single-RF GSM, QSM, RSM, RQSM) and six metasurface-based schemes (MBM,
//! RIS-MIMO, RIS-SM/GSM, RIS-QSM, RIS-RSM, RIS-RQSM), together with flat
//! Rayleigh fading channel models, maximum-likelihood and greedy detectors,
//! and a deterministic Monte Carlo bit-error-rate engine.
//!
//! The crate is `no_std` (with `alloc`); the default `std` feature adds a
//! multi-threaded sweep runner that produces bit-identical results for any
//! worker count.
//!
//! Module layout:
//!
//! * [`numerics`] — complex vectors/matrices, Gaussian sampling, zero-forcing.
//! * [`mapping`] — Gray-labeled constellations and the combinadic codec.
//! * [`config`] — the scheme configurations and their validation rules.
//! * [`channel`] — Rayleigh MIMO/RIS channel generation and SNR bookkeeping.
//! * [`detect`] — the generic maximum-likelihood detector.
//! * [`antenna`] — SM, GSM, QSM, RSM, RQSM modulators and detectors.
//! * [`ris`] — MBM, RIS-MIMO, RIS-GSM, RIS-QSM, RIS-RSM, RIS-RQSM.
//! * [`sim`] — seeded, chunked BER sweeps with adaptive stopping.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod antenna;
pub mod channel;
pub mod config;
pub mod detect;
pub mod error;
pub mod mapping;
pub mod numerics;
pub mod ris;
pub mod rng;
pub mod sim;

/// Complex baseband sample type used throughout the crate.
pub type C64 = num_complex::Complex<f64>;

pub use config::{ConstellationKind, Detector, SchemeConfig};
pub use error::{Error, Result};
pub use mapping::spectral_efficiency;
pub use rng::SimRng;
pub use sim::{BerPoint, SimSpec, StopRule};
