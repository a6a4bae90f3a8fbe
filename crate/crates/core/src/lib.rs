//! Exact constructions and relation checks for twisted toroidal Lie algebras
//! of types A_{2n-1}, D_{n+1}, A_{2n} and D_4 (triality twist).
//!
//! The crate has three layers. [`mrycheck`] and [`fieldcalc`] verify the
//! generator/relation presentation against explicit quadratic fermion fields
//! symbolically, [`fockrep`] replays the same brackets as operators on an
//! exact fermionic Fock space, and [`loopcore`] checks the map into the
//! loop-plus-Kähler model.

pub mod cliffspace;
pub mod fieldcalc;
pub mod fockrep;
pub mod loopcore;
pub mod mrycheck;
pub mod rational;
pub mod report;
pub mod scalars;
pub mod suites;

pub use rational::Rational;
pub use scalars::Scalar;
