//! Large and moderate deviations toolkit for high-dimensional convex geometry.
//!
//! Samplers for ℓ_p balls, Orlicz balls, Stiefel frames and Schatten eigenvalue
//! gases, a rate-function engine with closed-form catalogs and numerical Legendre
//! transforms, Orlicz-ball volume asymptotics, and Monte-Carlo and convolution
//! oracles that confront rate functions with measured probabilities.

pub mod distributions;
pub mod error;
pub mod measure;
pub mod optim;
pub mod orlicz;
pub mod projections;
pub mod quad;
pub mod ratecalc;
pub mod rng;
pub mod sampling;
pub mod special;
pub mod spectral;
pub mod stats;
pub mod verify;

pub use error::{Error, Flag, Flagged, Result};
pub use measure::{Density1D, EmpiricalMeasure, Measure};
