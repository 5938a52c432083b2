//! Numerical laboratory for a higher-order nonlinear Schrödinger flow from
//! the AKNS hierarchy: forward scattering on the line, the scalar
//! Riemann-Hilbert function delta and its regularized phase, the explicit
//! parabolic-cylinder long-time formula along rays x/t > 2/3, and an
//! independent pseudo-spectral solver used to verify the predicted decay
//! rates.

pub mod akns;
pub mod asymptotics;
pub mod config;
pub mod delta;
pub mod error;
pub mod gamma;
pub mod grid;
pub mod harness;
pub mod interp;
pub mod pde;
pub mod phase;
pub mod plot;
pub mod quad;
pub mod scattering;

pub use error::{Error, Result};
pub use grid::{Grid, C64};
