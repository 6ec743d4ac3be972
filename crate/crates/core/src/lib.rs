//! Finite-dimensional calculus of monotone operators.
//!
//! Sampled operator graphs are checked for monotonicity, cyclic
//! monotonicity, coercivity and relatedness; convex functions get
//! subdifferentials, conjugates and resolvents; small existence lemmas are
//! run as constructive searches; and a gallery of exact counterexamples
//! reproduces the classical infinite-dimensional pathologies through their
//! finite computations.

pub mod convex;
pub mod duality;
pub mod error;
pub mod extension;
pub mod gallery;
pub mod grid;
pub mod linalg;
pub mod model;
pub mod monotonicity;
pub mod polyhedral;
pub mod region;
pub mod scalar;

pub use error::{Error, Result};
pub use model::{
    dual_norm_eval, norm_eval, pair, Certificate, Covector, GraphPair, Norm, OperatorGraph, Point,
};
pub use scalar::{Extended, Rational, Scalar, Tolerance};
