//! Sharp growth constants for p-Laplacian subsolutions on model
//! manifolds, the extremal examples attaining them, and log-domain
//! numerics to verify growth rates and integral inequalities.

// `!(x > y)` guards are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod error;
pub mod growth;
pub mod l1;
pub mod params;
pub mod quadrature;
pub mod radial;
pub mod report;
pub mod roots;
pub mod sharp;

pub use checks::{CheckOptions, CheckReport};
pub use error::{Error, Result};
pub use growth::{GrowthSample, RateEstimate, Regime};
pub use l1::L1Verdict;
pub use params::{
    comparison_constants, compute_c0, liouville_check, solve_c1, ComparisonConstants, DerivedExponents,
    LiouvilleVerdict, Params,
};
pub use quadrature::QuadOptions;
pub use radial::{ModelManifold, Potential, RadialFn, RadialProfile, Warp};
pub use report::{Measurement, Report};
pub use sharp::{build_sharp_example, choose_ac, SharpExample};
