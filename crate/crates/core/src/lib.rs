//! Linearized condensate / normal-fluid phonon kinetics.

pub mod acceptance;
pub mod asymptotics;
pub mod collision;
pub mod config;
pub mod error;
pub mod field;
pub mod gamma;
pub mod grid;
pub mod jacobi;
pub mod output;
pub mod pipeline;
pub mod profile;
pub mod quadrature;
pub mod spectral;
pub mod timechange;

pub use error::{Error, Result};
