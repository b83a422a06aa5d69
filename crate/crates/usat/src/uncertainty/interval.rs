//! Closed intervals and naive interval arithmetic.
//!
//! Propagation follows the textbook endpoint rules without tracking variable
//! repetition, so results enclose the true range but may overestimate it
//! (`a - a` over `[0, 1]` yields `[-1, 1]`). Division by an interval that
//! contains zero is a hard error.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::expr::{BinOp, Expr};

/// A closed interval `[lo, hi]` with finite endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("invalid interval [{lo}, {hi}]: endpoints must be finite with lo <= hi")]
    InvalidEndpoints { lo: String, hi: String },
}

/// Failure while propagating intervals through an expression.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropagationError {
    #[error("division by an interval containing zero")]
    DivisionByZeroInterval,
    #[error("unbound identifier `{0}`")]
    UnboundIdentifier(String),
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Interval, IntervalError> {
        if lo.is_finite() && hi.is_finite() && lo <= hi {
            Ok(Interval { lo, hi })
        } else {
            Err(IntervalError::InvalidEndpoints {
                lo: lo.to_string(),
                hi: hi.to_string(),
            })
        }
    }

    /// The degenerate interval `[v, v]`.
    pub fn point(v: f64) -> Result<Interval, IntervalError> {
        Interval::new(v, v)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        self.lo + (self.hi - self.lo) / 2.0
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Smallest interval covering both operands.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn add(&self, rhs: &Interval) -> Interval {
        Interval {
            lo: self.lo + rhs.lo,
            hi: self.hi + rhs.hi,
        }
    }

    pub fn sub(&self, rhs: &Interval) -> Interval {
        Interval {
            lo: self.lo - rhs.hi,
            hi: self.hi - rhs.lo,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn mul(&self, rhs: &Interval) -> Interval {
        let products = [
            self.lo * rhs.lo,
            self.lo * rhs.hi,
            self.hi * rhs.lo,
            self.hi * rhs.hi,
        ];
        let mut lo = products[0];
        let mut hi = products[0];
        for &p in &products[1..] {
            lo = lo.min(p);
            hi = hi.max(p);
        }
        Interval { lo, hi }
    }

    /// Errors when `rhs` contains zero (including at an endpoint).
    pub fn div(&self, rhs: &Interval) -> Result<Interval, PropagationError> {
        if rhs.contains(0.0) {
            return Err(PropagationError::DivisionByZeroInterval);
        }
        let quotients = [
            self.lo / rhs.lo,
            self.lo / rhs.hi,
            self.hi / rhs.lo,
            self.hi / rhs.hi,
        ];
        let mut lo = quotients[0];
        let mut hi = quotients[0];
        for &q in &quotients[1..] {
            lo = lo.min(q);
            hi = hi.max(q);
        }
        Ok(Interval { lo, hi })
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Evaluates `expr` over interval-valued variables.
///
/// Every identifier must be bound in `env`. The result encloses every value
/// the expression can take when each variable ranges over its interval.
pub fn propagate_interval(
    expr: &Expr,
    env: &BTreeMap<String, Interval>,
) -> Result<Interval, PropagationError> {
    match expr {
        Expr::Num(v) => Ok(Interval { lo: *v, hi: *v }),
        Expr::Var(name) => env
            .get(name)
            .copied()
            .ok_or_else(|| PropagationError::UnboundIdentifier(name.clone())),
        Expr::Neg(inner) => Ok(propagate_interval(inner, env)?.neg()),
        Expr::Bin(op, lhs, rhs) => {
            let l = propagate_interval(lhs, env)?;
            let r = propagate_interval(rhs, env)?;
            match op {
                BinOp::Add => Ok(l.add(&r)),
                BinOp::Sub => Ok(l.sub(&r)),
                BinOp::Mul => Ok(l.mul(&r)),
                BinOp::Div => l.div(&r),
            }
        }
    }
}
