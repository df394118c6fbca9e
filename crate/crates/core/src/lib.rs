//! Exact short-time dynamics of a perfect-blockade Rydberg lattice gas.
//!
//! Starting from the all-ground state, every expectation value is an entire
//! function of time whose Taylor coefficients are vacuum expectations of
//! iterated commutators with the blockade Hamiltonian. This crate computes
//! those coefficients exactly, both symbolically ([`algebra`], [`series`])
//! and from integer matrices on the blockade subspace ([`space`],
//! [`dynamics`]), evolves finite lattices numerically, and evaluates the
//! bounds that certify when a finite lattice reproduces the
//! thermodynamic-limit behaviour ([`bounds`]).

pub mod algebra;
pub mod bounds;
pub mod dynamics;
mod error;
pub mod export;
pub mod series;
pub mod space;
pub mod verify;

pub use algebra::{Budget, Letter, ModelSpec, OperatorSum, Topology, Word};
pub use error::{Error, Result};
pub use series::{ObservableSpec, SeriesCoefficients};

/// Exact rational with arbitrary-precision numerator and denominator.
pub type Rational = num_rational::BigRational;
