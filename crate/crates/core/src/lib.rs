//! Exact-arithmetic toolkit for finite extensions of Q_p: unit filtrations,
//! Kummer-line classification, discriminant valuations, mass-formula
//! contributions, explicit pairings, and elliptic discriminant realization,
//! with brute-force oracles at desk scale.

pub mod disc;
pub mod elliptic;
pub mod error;
pub mod exact;
pub mod filtration;
pub mod finite;
pub mod kummer;
pub mod local;

pub use error::{Error, Result};
