//! Exact scalar arithmetic.
//!
//! Every geometric comparison in this crate is exact. The scalar type is an
//! arbitrary-precision rational kept in lowest terms with positive
//! denominator, so ordering and field operations never lose information.

use num::bigint::Sign;
use num::{BigInt, BigRational, One, Signed, Zero};

/// Exact rational scalar: reduced fraction, denominator > 0.
pub type Scalar = BigRational;

/// Shorthand for an integer-valued scalar.
pub fn int(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for `n / d`. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Scalar {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Three-way sign of a scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sgn {
    Neg,
    Zero,
    Pos,
}

impl Sgn {
    pub fn of(q: &Scalar) -> Sgn {
        Sgn::of_int(q.numer())
    }

    pub fn of_int(n: &BigInt) -> Sgn {
        match n.sign() {
            Sign::Minus => Sgn::Neg,
            Sign::NoSign => Sgn::Zero,
            Sign::Plus => Sgn::Pos,
        }
    }

    pub fn flip(self) -> Sgn {
        match self {
            Sgn::Neg => Sgn::Pos,
            Sgn::Zero => Sgn::Zero,
            Sgn::Pos => Sgn::Neg,
        }
    }

    /// -1 / 0 / +1.
    pub fn as_i8(self) -> i8 {
        match self {
            Sgn::Neg => -1,
            Sgn::Zero => 0,
            Sgn::Pos => 1,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Sgn::Zero
    }
}

/// Formats a scalar as `n` or `n/d`, the same syntax the parsers accept.
pub fn scalar_string(q: &Scalar) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Least common multiple of the denominators of `values`.
pub fn denominator_lcm<'a>(values: impl Iterator<Item = &'a Scalar>) -> BigInt {
    let mut l = BigInt::one();
    for v in values {
        l = num::integer::lcm(l, v.denom().clone());
    }
    l
}

/// Rounds down to the nearest integer scalar.
pub fn floor(q: &Scalar) -> BigInt {
    q.floor().numer().clone()
}

/// True when `q` has denominator 1.
pub fn is_integer(q: &Scalar) -> bool {
    q.denom().is_one()
}

/// Approximate f64 value, for informational output only.
pub fn to_f64(q: &Scalar) -> f64 {
    let n = q.numer();
    let d = q.denom();
    // Good enough for logging; exact values always travel as strings.
    let nf = n.to_string().parse::<f64>().unwrap_or(f64::NAN);
    let df = d.to_string().parse::<f64>().unwrap_or(f64::NAN);
    nf / df
}

/// Absolute value.
pub fn abs(q: &Scalar) -> Scalar {
    q.abs()
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_strings() {
        assert_eq!(scalar_string(&int(5)), "5");
        assert_eq!(scalar_string(&ratio(-3, 6)), "-1/2");
        assert_eq!(scalar_string(&ratio(4, 2)), "2");
    }

    #[test]
    fn lcm_of_denominators() {
        let vals = [ratio(1, 4), ratio(1, 6), int(3)];
        assert_eq!(denominator_lcm(vals.iter()), BigInt::from(12));
    }

    #[test]
    fn sign_of() {
        assert_eq!(Sgn::of(&ratio(-1, 7)), Sgn::Neg);
        assert_eq!(Sgn::of(&int(0)), Sgn::Zero);
        assert_eq!(Sgn::of(&ratio(2, 3)), Sgn::Pos);
        assert_eq!(Sgn::Pos.flip(), Sgn::Neg);
    }
}
