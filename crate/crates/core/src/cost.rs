//! Cost values with an absorbing infeasibility sentinel.
//!
//! Every cost in the planner is either a finite, nonnegative number or the
//! sentinel [`Cost::INFEASIBLE`]. The sentinel absorbs addition, compares
//! greater than every finite cost and equal to itself. Multiplying by a zero
//! weight disables a term entirely, sentinel included.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cost(f64);

impl Cost {
    pub const ZERO: Cost = Cost(0.0);
    pub const INFEASIBLE: Cost = Cost(f64::INFINITY);

    /// Wraps a finite value. Non-finite inputs map to the sentinel.
    pub fn finite(v: f64) -> Self {
        debug_assert!(!v.is_nan(), "cost must not be NaN");
        if v.is_finite() {
            Cost(v)
        } else {
            Cost::INFEASIBLE
        }
    }

    pub fn is_infeasible(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_finite(self) -> bool {
        !self.is_infeasible()
    }

    /// The finite value, or `None` for the sentinel.
    pub fn value(self) -> Option<f64> {
        self.is_finite().then_some(self.0)
    }

    /// Raw representation; `f64::INFINITY` for the sentinel.
    pub fn raw(self) -> f64 {
        self.0
    }

    /// `weight * self`. A zero weight yields zero even for the sentinel.
    pub fn weighted(self, weight: f64) -> Cost {
        debug_assert!(weight >= 0.0);
        if weight == 0.0 {
            Cost::ZERO
        } else if self.is_infeasible() {
            Cost::INFEASIBLE
        } else {
            Cost::finite(weight * self.0)
        }
    }
}

impl Default for Cost {
    fn default() -> Self {
        Cost::ZERO
    }
}

impl From<f64> for Cost {
    fn from(v: f64) -> Self {
        Cost::finite(v)
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        if self.is_infeasible() || rhs.is_infeasible() {
            Cost::INFEASIBLE
        } else {
            Cost::finite(self.0 + rhs.0)
        }
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, Add::add)
    }
}

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("inf"),
        }
    }
}
