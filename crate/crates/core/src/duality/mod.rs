//! Duality maps, metric projections and their variational inequalities,
//! nonexpansive residuals, resolvents and positivity of linear maps.

pub mod dualmap;
pub mod positive;
pub mod projection;
pub mod residual;
pub mod resolvent;

pub use dualmap::{duality_map, DualityImage};
pub use positive::{positive_check, PositivityReport};
pub use projection::{firm_nonexpansive_check, project, projection_vi_check};
pub use residual::{nonexpansive_residual, ResidualReport};
pub use resolvent::{convex_resolvent, step_resolvent};
