//! Thickness, τ-metric and separable-bound norms for functions of two
//! variables on finite product probability spaces.
//!
//! A continuum object on `[0,1]²` is represented by its samples on an
//! `n × m` grid with product weights. Every optimum the crate computes comes
//! with a primal and a dual witness so that it can be re-checked
//! independently of the solver that produced it.
//!
//! The combinatorial solvers are generic over [`Scalar`] and run on `f64`,
//! `f32` or exact rationals ([`Rational`]); the approximation and sampling
//! code needs [`Real`]. Aliases for the common `f64` instantiation live at
//! the crate root.

#![forbid(unsafe_code)]

pub mod approx;
pub mod error;
pub mod flow;
pub mod generate;
pub mod io;
pub mod kernel;
pub mod metric;
pub mod plan;
pub mod sampling;
pub mod scalar;
pub mod space;
pub mod thickness;
pub mod vcnorm;

pub use error::{Error, Result};
pub use kernel::{level_set, CellSet, Kernel};
pub use metric::{validate_metric, MetricMatrix, MetricViolation};
pub use plan::{gen_plan, plan_class, PlanClass, PlanKind, PlanMeasure, PlanReport};
pub use scalar::{Real, Scalar};
pub use space::{make_space, DiscreteSpace};
pub use thickness::{
    extract_null_cover, tau_bisection, tau_distance, thickness, thickness_oracle,
    ThicknessCertificate,
};
pub use vcnorm::{markov_apply, me_norm, pairing, vc_norm, vc_norm_oracle, NormCertificate};

/// Exact rational scalar used by the oracles.
pub type Rational = num_rational::Ratio<i64>;

pub type Space = DiscreteSpace<f64>;
pub type Kernel64 = Kernel<f64>;
pub type Plan = PlanMeasure<f64>;
pub type ExactSpace = DiscreteSpace<Rational>;
pub type ExactKernel = Kernel<Rational>;
