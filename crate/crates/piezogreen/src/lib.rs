//! Green's function of the infinite hexagonal piezoelectric medium.
//!
//! A point force or point charge in a transversely isotropic piezoelectric
//! crystal produces displacements and an electric potential described by a
//! symmetric 4x4 kernel: rows and columns 1..3 are mechanical, the fourth is
//! electric, and the fourth load slot carries minus the charge. This crate
//! evaluates that kernel two independent ways:
//!
//! * a closed form, summing residues over the four characteristic roots of
//!   the medium ([`GreensEvaluator`]), exact up to roundoff and cheap enough
//!   for millions of points;
//! * an angular quadrature of the inverse symbol matrix over a unit circle
//!   ([`quadrature`]), slower but derived from nothing beyond the operator
//!   itself, which makes it the reference the closed form is tested against.
//!
//! The two routes share the material description and nothing else. On top of
//! them sit the classical limits for coupling-free media ([`decoupled`]) and
//! point-source superposition with grid post-processing ([`field`]).
//!
//! Units are SI throughout: stiffnesses in Pa, coupling constants in C/m^2,
//! permittivities in F/m, coordinates in m. The evaluator makes no attempt to
//! non-dimensionalize user data; only the internal root solve normalizes, and
//! it reports results on the original scale.

// Indexed loops mirror the tensor index notation throughout.
#![allow(clippy::needless_range_loop)]

pub mod decoupled;
pub mod error;
pub mod field;
pub mod greens;
pub mod kernels;
pub mod material;
pub mod quadrature;
pub mod spectrum;

mod linalg;
#[cfg(test)]
mod test_util;

pub use error::{Error, Result};
pub use greens::{relative_deviation, CylindricalComponents, GreensEvaluator, GreensMatrix};
pub use material::{CartesianModuli, MaterialModuli, ValidationReport};
pub use spectrum::{solve_spectrum, CharacteristicSpectrum};
