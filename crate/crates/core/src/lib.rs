//! Structure-preserving time integration: symplectic Runge-Kutta schemes, Dirac integrators for
//! constrained mechanical systems and the Borel-Padé-Laplace integrator.

pub mod bpl;
pub mod dirac;
pub mod harness;
pub mod hamiltonian;
pub mod integrators;
pub mod numerics;
pub mod problems;
