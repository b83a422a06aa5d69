//! Uncertainty representation and propagation.
//!
//! The pieces: [`UncertaintyRepr`] describes a parameter's uncertainty,
//! [`Expr`] hosts metric formulas, [`propagate_interval`] pushes intervals
//! through an expression analytically, and [`propagate_monte_carlo`] does the
//! same by seeded joint sampling.

pub mod expr;
pub mod interval;
pub mod montecarlo;
pub mod repr;
mod rng;

pub use expr::{parse_expression, BinOp, EvalError, Expr, ParseError};
pub use interval::{propagate_interval, Interval, IntervalError, PropagationError};
pub use montecarlo::{propagate_monte_carlo, MonteCarloError, MonteCarloResult};
pub use repr::{
    EmpiricalDistribution, EmpiricalError, ReprError, SampleError, UncertaintyRepr,
    DEFAULT_NORMAL_SUPPORT_K,
};
