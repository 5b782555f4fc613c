//! Benchmark systems: Toda lattice, planar n-body, Duffing oscillator, spectral KdV, pendulums.

use thiserror::Error;

mod duffing;
mod harmonic;
mod kdv;
mod nbody;
mod pendulum;
mod toda;

pub use duffing::{duffing_h2, duffing_i1, DuffingProblem, FORCED_AMPLITUDES};
pub use harmonic::HarmonicOscillator;
pub use kdv::KdvSpectral;
pub use nbody::{NBody, FIGURE_EIGHT_PERIOD};
pub use pendulum::{DoublePendulum, FreeParticle, SimplePendulum};
pub use toda::TodaLattice;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("invalid problem parameter: {0}")]
    InvalidParameter(String),
    #[error("bodies {i} and {j} collide (distance {distance:e})")]
    CollisionSingularity { i: usize, j: usize, distance: f64 },
}

pub type Result<T> = std::result::Result<T, ProblemError>;
