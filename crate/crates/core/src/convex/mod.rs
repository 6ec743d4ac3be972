//! Convex functions on `R^d`: values, directional derivatives,
//! subdifferentials, conjugates, the sum rule, descent searches and
//! potentials of cyclically monotone graphs.

pub mod conjugate;
pub mod derivative;
pub mod function;
pub mod minty;
pub mod potential;
pub mod search;
pub mod subgradient;

pub use conjugate::{conjugate_value, discrete_conjugate, fenchel_conjugate};
pub use derivative::{difference_quotients, directional_derivative};
pub use function::{eval, ConvexFunction};
pub use minty::{maximality_probe, prox_solve, MintyReport, ProxSolution};
pub use potential::{reconstruct_potential, AffinePiece, PotentialReconstruction};
pub use search::{br_search, descent_witness, BrResult, DescentWitness};
pub use subgradient::{
    eps_subdifferential_test, subgradient_test, sum_rule_check, SplitSearch, SumRuleReport,
};
