//! Fluctuation theory of random walks: local times at the maximum, ladder
//! processes, norming constants, the Tanaka–Doney transformation, walks
//! conditioned to stay positive and meanders, with an exact enumeration oracle
//! and Monte Carlo checks of the associated invariance principles.
//!
//! Path functionals are generic over [`Scalar`]; simulation runs in `f64`
//! ([`Path`]) and the oracle in exact rationals ([`ExactPath`]).

pub mod conditioning;
pub mod error;
pub mod experiments;
pub mod fluctuation;
pub mod increments;
pub mod lattice;
pub mod limit_laws;
pub mod oracle;
pub mod scalar;
pub mod scaling;
pub mod stats;
pub mod transforms;

pub use error::{Error, Result};
pub use increments::{IncrementLaw, LawKind, WalkPath};
pub use scalar::Scalar;

/// Simulated walk path.
pub type Path = WalkPath<f64>;
/// Lattice walk path with exact rational values.
pub type ExactPath = WalkPath<num_rational::Rational64>;
/// Exact probability.
pub type Prob = num_rational::BigRational;
