//! Spectral measures of one-dimensional Schrödinger operators with
//! inverse-power potentials, Jost-function based wave evolution and
//! late-time tail analysis.

pub mod analysis;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod jost;
pub mod linalg;
pub mod lowenergy;
pub mod panels;
pub mod potential;
pub mod quadrature;
pub mod series;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
