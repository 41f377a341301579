//! Relativistic spin in representations induced on a timelike foliation
//! vector `n`, the covariant Dirac-operator toolkit built on it, spin
//! coupling of many-body states on a common fiber, free parametrized
//! (invariant-time) evolution, and the unequal-time two-electron
//! interference computation.
//!
//! Conventions used throughout:
//!
//! * metric `g = diag(-1, 1, 1, 1)`, four-vectors are contravariant `(t, x, y, z)`;
//! * natural units `hbar = c = 1` everywhere except [`palacios`] and the
//!   [`units`] helpers, which work in eV and fs;
//! * the SL(2,C) action is `A X(v) A^dagger = X(Phi(A) v)` with
//!   `X(v) = v^0 + v.sigma` (see [`sl2c`]).

pub mod dirac;
pub mod error;
pub mod evolution;
pub mod little_group;
pub mod minkowski;
pub mod palacios;
pub mod sampling;
pub mod sl2c;
pub mod spin_coupling;
pub mod units;
pub mod verify;

pub use error::{Error, Result};
pub use minkowski::{CausalClass, FourVector, LorentzMatrix};
pub use sl2c::{Rep, SL2CElement};

/// Complex scalar used for every spinor and operator entry.
pub type C64 = num_complex::Complex64;
