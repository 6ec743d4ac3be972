use crate::convex::minty::{prox_solve, ProxSolution};
use crate::convex::ConvexFunction;
use crate::error::Result;
use crate::grid::GridSpec;
use crate::model::Covector;
use crate::monotonicity::step::{maximalize_1d, StepFunction1D};
use crate::scalar::{Scalar, Tolerance};

/// The unique `x` with `y* ∈ T(x) + λx`, `T` the maximal extension of the
/// step function. Exact in the rational backend.
pub fn step_resolvent<S: Scalar>(t: &StepFunction1D<S>, lambda: &S, ystar: &S) -> Result<S> {
    maximalize_1d(t).solve_shifted(lambda, ystar)
}

/// The unique `x` with `y* ∈ ∂f(x) + λx` (Euclidean `J`), with its
/// optimality certificate.
pub fn convex_resolvent(
    f: &ConvexFunction,
    lambda: f64,
    ystar: &Covector,
    grid: Option<&GridSpec>,
    tol: &Tolerance,
) -> Result<ProxSolution> {
    prox_solve(f, lambda, ystar, grid, tol)
}
