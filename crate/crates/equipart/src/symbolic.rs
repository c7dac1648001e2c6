//! Values of the form `slope * d + constant` ordered as `d -> -infinity`.
//!
//! Cross-sections of the dual arrangement with the plane `y = d` are taken
//! symbolically: no explicit "small enough d" is ever chosen, yet every
//! comparison matches the concrete one for all sufficiently negative `d`.

use crate::scalar::Scalar;
use num::Zero;
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicValue {
    pub slope: Scalar,
    pub constant: Scalar,
}

impl SymbolicValue {
    pub fn new(slope: Scalar, constant: Scalar) -> Self {
        SymbolicValue { slope, constant }
    }

    pub fn constant(c: Scalar) -> Self {
        SymbolicValue {
            slope: Scalar::zero(),
            constant: c,
        }
    }

    pub fn zero() -> Self {
        SymbolicValue::constant(Scalar::zero())
    }

    /// Concrete value at a finite `d`.
    pub fn eval(&self, d: &Scalar) -> Scalar {
        &self.slope * d + &self.constant
    }

    /// The unique `d` where two values with distinct slopes coincide.
    pub fn crossing_d(&self, other: &SymbolicValue) -> Option<Scalar> {
        if self.slope == other.slope {
            return None;
        }
        Some((&other.constant - &self.constant) / (&self.slope - &other.slope))
    }
}

/// Larger slope loses as `d -> -infinity`; ties fall back to the constants.
impl Ord for SymbolicValue {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .slope
            .cmp(&self.slope)
            .then_with(|| self.constant.cmp(&other.constant))
    }
}

impl PartialOrd for SymbolicValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &SymbolicValue {
    type Output = SymbolicValue;
    fn add(self, rhs: &SymbolicValue) -> SymbolicValue {
        SymbolicValue {
            slope: &self.slope + &rhs.slope,
            constant: &self.constant + &rhs.constant,
        }
    }
}

impl Sub for &SymbolicValue {
    type Output = SymbolicValue;
    fn sub(self, rhs: &SymbolicValue) -> SymbolicValue {
        SymbolicValue {
            slope: &self.slope - &rhs.slope,
            constant: &self.constant - &rhs.constant,
        }
    }
}

impl Neg for &SymbolicValue {
    type Output = SymbolicValue;
    fn neg(self) -> SymbolicValue {
        SymbolicValue {
            slope: -self.slope.clone(),
            constant: -self.constant.clone(),
        }
    }
}

impl Mul<&Scalar> for &SymbolicValue {
    type Output = SymbolicValue;
    fn mul(self, rhs: &Scalar) -> SymbolicValue {
        SymbolicValue {
            slope: &self.slope * rhs,
            constant: &self.constant * rhs,
        }
    }
}

impl Div<&Scalar> for &SymbolicValue {
    type Output = SymbolicValue;
    fn div(self, rhs: &Scalar) -> SymbolicValue {
        SymbolicValue {
            slope: &self.slope / rhs,
            constant: &self.constant / rhs,
        }
    }
}

/// A `d0` below every pairwise crossing of the given values: for all
/// rational `d < d0` the concrete order equals the symbolic order.
pub fn certified_threshold(values: &[SymbolicValue]) -> Scalar {
    let mut d0 = Scalar::zero();
    for (i, a) in values.iter().enumerate() {
        for b in values.iter().skip(i + 1) {
            if let Some(d) = a.crossing_d(b) {
                if d < d0 {
                    d0 = d;
                }
            }
        }
    }
    d0
}
