//! Exact convex duality for càdlàg step processes on finite scenario trees.
//!
//! The crate is organised bottom-up:
//!
//! * [`plconvex`] – exact calculus of piecewise-linear convex functions on ℝ;
//! * [`polycone`] – polyhedral cones in ℝ^d (d ≤ 4), polars and membership;
//! * [`timegrid`] – step paths, atomic measures, the dual pairing and the
//!   integral functionals `I_h` and `J_h`;
//! * [`setmaps`] – interval-valued mappings with distinct point and cell values;
//! * [`scenario`] – scenario trees, adaptedness, projections and pasting;
//! * [`duality`] – conjugate formulas, subgradients and interchange rules with
//!   brute-force lattice oracles;
//! * [`finmodels`] – obstacle, bid-ask, currency and Campi–Schachermayer presets;
//! * [`io`] – the JSON instance format, grid refinement and reports.

pub mod duality;
pub mod error;
pub mod ext;
pub mod finmodels;
pub mod gen;
pub mod io;
pub mod plconvex;
pub mod polycone;
pub mod scenario;
pub mod setmaps;
pub mod timegrid;

pub use error::{Error, Result};
pub use ext::{q, qi, Ext, Q};
pub use plconvex::{PLConvex, RInterval};
pub use polycone::{ConeMap, HalfSpaceCert, PolyCone};
pub use scenario::{Flag, RandomIntegrand, RandomMeasure, RandomPath, RandomSetMap, ScenarioTree};
pub use setmaps::SetMap;
pub use timegrid::{GridMeasure, LebesgueSplit, StepPath, TimeGrid};
