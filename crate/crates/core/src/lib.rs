//! Split-step spectral simulation of the defocusing cubic NLS on
//! `R^n x T^(3-n)`, with Fourier multipliers, conserved and modified
//! energies, and the numerical probes built on them.
//!
//! Everything is generic over [`Real`]; the aliases below fix `f64`.

pub mod error;
mod fft;
pub mod grid;
pub mod scalar;

pub mod dynamics;
pub mod functionals;
pub mod multipliers;
pub mod probes;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use grid::{build_grid, Direction, DirectionKind, GridSpec, SpatialField, SpectralField};
pub use scalar::Real;

pub type Grid = GridSpec<f64>;
pub type Field = SpatialField<f64>;
pub type Spectrum = SpectralField<f64>;
pub type Trajectory = dynamics::Trajectory<f64>;
pub type EvolutionConfig = dynamics::EvolutionConfig<f64>;

pub type Grid32 = GridSpec<f32>;
pub type Field32 = SpatialField<f32>;
pub type Spectrum32 = SpectralField<f32>;
