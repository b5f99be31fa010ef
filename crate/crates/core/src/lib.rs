//! # ncvar
//!
//! Numerical noncommutative probability in finite tracial matrix algebras.
//!
//! The ambient algebra is a tensor product `M_{d_1} ⊗ … ⊗ M_{d_n}` equipped with
//! the normalized trace `τ = tr / D`. Subalgebras generated by subsets of tensor
//! factors play the role of σ-algebras, and their conditional expectations are
//! normalized partial traces. On top of that kernel the crate provides checkable
//! forms of the variance inequalities for functions of independent noncommutative
//! random variables:
//!
//! - the martingale-difference variance bound `var(y) ≤ Σ_j τ((y − E_j y)²)`,
//! - the noncommutative Efron–Stein inequality and its matrix-valued version,
//! - a Steele-type bound with leave-one-out approximants,
//! - supporting trace/norm inequalities (trace Jensen, Kadison, a norm bound),
//!
//! plus seeded Monte Carlo estimators for the classical and random-matrix
//! Efron–Stein inequalities.
//!
//! Every check returns an [`InequalityReport`] carrying the measured hypotheses,
//! both sides of the inequality and the slack.

#![forbid(unsafe_code)]

pub mod conditioning;
pub mod element;
pub mod error;
pub mod independence;
pub mod inequalities;
pub mod montecarlo;
pub mod poly;
pub mod random;
pub mod report;
pub mod shape;
pub mod spectral;
pub mod tolerance;

pub use element::{Element, LocalMatrix};
pub use error::{Error, Result};
pub use poly::NcPolynomial;
pub use report::{InequalityReport, Verdict};
pub use shape::{AlgebraShape, FactorSet};
pub use tolerance::Tolerances;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
