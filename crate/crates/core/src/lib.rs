//! Locally D-optimal experimental design for binary (quantal response)
//! regression.
//!
//! The crate computes, verifies, and compares D-optimal designs for two- and
//! three-parameter binary regression models across six link families:
//!
//! * analytic two-point solutions of the WC stationarity equation
//!   ([`wc::solve_symmetric`], [`wc::solve_asymmetric`]);
//! * particle swarm optimization over weighted k-point designs on a bounded
//!   dose interval ([`pso::optimize`]), for bounded spaces, non-linear
//!   predictors, and the three-parameter background-rate model;
//! * equivalence-theorem verification via sensitivity functions
//!   ([`verify::check_global`]);
//! * maximum-likelihood fitting of dose-response data to localize the
//!   design at plug-in parameter values ([`fit::fit_mle`]).
//!
//! All numerics are generic over the scalar type through [`num::Real`];
//! `f64` aliases for the main types are exported at the crate root.

// published coefficient tables carry more digits than f64 resolves, and
// negated comparisons are deliberate (they also reject NaN)
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fit;
pub mod links;
pub mod model;
pub mod num;
pub mod pso;
pub mod special;
pub mod verify;
pub mod wc;

pub use error::{Error, Result};
pub use links::{EtaDomain, Link, LinkKind};
pub use model::{
    Design, DesignSpace, InfoMatrix, InfoModel, Predictor, ThreeParamModel, TwoParamModel,
};
pub use num::Real;
pub use pso::{PsoConfig, PsoRun};
pub use verify::Verdict;
pub use wc::{WcReport, WcSolution};

/// `f64` aliases for the main types.
pub type Link64 = Link<f64>;
pub type LinkKind64 = LinkKind<f64>;
pub type Design64 = Design<f64>;
pub type DesignSpace64 = DesignSpace<f64>;
pub type Predictor64 = Predictor<f64>;
pub type TwoParamModel64 = TwoParamModel<f64>;
pub type ThreeParamModel64 = ThreeParamModel<f64>;
pub type PsoConfig64 = PsoConfig<f64>;
pub type Verdict64 = Verdict<f64>;
pub type WcSolution64 = WcSolution<f64>;
