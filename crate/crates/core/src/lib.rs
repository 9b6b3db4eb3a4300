//! Exact bound-state multiplets of the spiked decadic oscillator
//! `V(r) = r^10 + a r^8 + b r^6 + c r^4 + d r^2 + f/r^2` on PT-symmetric
//! complex contours.
//!
//! The wavefunction ansatz reduces the radial Schrödinger equation to a
//! terminating four-term recurrence. [`solvers`] turns its banded secular
//! matrices into Sturmian couplings (`M = 1`), energy multiplets (`M = 2`)
//! and coupled `(E, d)` solutions (`M >= 2`). [`verify`] and [`shooting`]
//! check those solutions along independent routes, and [`wedges`] maps the
//! asymptotic sectors in which the boundary conditions may be imposed.

pub mod error;
pub mod linalg;
pub mod model;
pub mod polynomial;
pub mod recurrence;
pub mod scalar;
pub mod shooting;
pub mod solvers;
pub mod sweep;
pub mod verify;
pub mod wedges;

pub use error::{Error, Result};
pub use model::{Coupling, ModelSpec, PotentialCoeffs};
pub use num_complex::Complex64;
pub use num_rational::BigRational;
