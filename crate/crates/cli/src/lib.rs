//! Batch front-end for `cadlag-convex`: theorem verification on instance
//! files, grid refinement, preset models and report comparison.

pub mod functionals;
pub mod presets;
pub mod verify;

pub use functionals::functional_values;
pub use verify::{exit_code, verify, Failure, Theorem, VerifyOpts};
