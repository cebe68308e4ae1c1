//! Exact computation of the first, second and higher differentials of the
//! period map of a hyperelliptic curve `y² = p(x)`, realized through Laurent
//! expansions at the Weierstrass point at infinity and the action of the Witt
//! algebra of formal vector fields.
//!
//! The crate is layered bottom-up:
//! - [`laurent`]: truncated Laurent series with rational coefficients
//! - [`witt`]: vector fields, their differential-operator images and compositions
//! - [`curve`]: expansions of `x`, `y`, function and vector-field bases, holomorphic integrals
//! - [`hodge`]: gap-monomial normal forms for `H¹(O)` and `H¹(Θ)`, duality, the projection `ρ`
//! - [`period`]: `ν₁`, `ℓ`, `d²Φ`, `II`, `ν₂` and the higher-order maps
//! - [`checks`]: the invariant suite shared by the CLI and the acceptance tests

pub mod checks;
pub mod curve;
pub mod error;
pub mod hodge;
pub mod laurent;
pub mod linalg;
pub mod period;
pub mod rational;
pub mod witt;

pub use curve::{CurveExpansion, HyperellipticCurve};
pub use error::{Error, Result};
pub use hodge::{H1OClass, HomMatrix, KSClass};
pub use laurent::LaurentSeries;
pub use rational::Rational;
pub use witt::{DiffOp, WittElement};
