//! Scalars: exact elements of ℚ(ζ₈) or approximate complex doubles.
//!
//! Mixing the two backends in one operation always yields an approximate
//! result; an exact value is never silently rounded in place.

mod cyc;
mod parse;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::One;

use crate::error::{HolantError, Result};

pub use cyc::Cyc;
pub use parse::{parse_scalar, scalar_from_json, scalar_to_json};

pub type Rational = num_rational::BigRational;

/// Absolute per-component tolerance used when none is given.
pub const DEFAULT_TOL: f64 = 1e-9;

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Cyc),
    Approx(Complex64),
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Cyc::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(Cyc::one())
    }

    pub fn int(n: i64) -> Self {
        Scalar::Exact(Cyc::from_int(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(Cyc::from_rational(rational(n, d)))
    }

    pub fn from_rational(r: Rational) -> Self {
        Scalar::Exact(Cyc::from_rational(r))
    }

    pub fn i() -> Self {
        Scalar::Exact(Cyc::i())
    }

    pub fn sqrt2() -> Self {
        Scalar::Exact(Cyc::sqrt2())
    }

    pub fn inv_sqrt2() -> Self {
        Scalar::Exact(Cyc::inv_sqrt2())
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Scalar::Approx(Complex64::new(re, im))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&Cyc> {
        match self {
            Scalar::Exact(c) => Some(c),
            Scalar::Approx(_) => None,
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(c) => c.to_c64(),
            Scalar::Approx(z) => *z,
        }
    }

    pub fn to_approx(&self) -> Scalar {
        Scalar::Approx(self.to_c64())
    }

    pub fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Exactly zero on the exact backend, within `DEFAULT_TOL` otherwise.
    pub fn is_zero(&self) -> bool {
        self.is_zero_tol(DEFAULT_TOL)
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(c) => c.is_zero(),
            Scalar::Approx(z) => z.re.abs() <= tol && z.im.abs() <= tol,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(c) => c.is_one(),
            Scalar::Approx(z) => (z.re - 1.0).abs() <= DEFAULT_TOL && z.im.abs() <= DEFAULT_TOL,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Exact(_) => true,
            Scalar::Approx(z) => z.is_finite(),
        }
    }

    pub fn check_finite(self) -> Result<Scalar> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(HolantError::NumericOverflow)
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(c) => Scalar::Exact(c.conj()),
            Scalar::Approx(z) => Scalar::Approx(z.conj()),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        self.inv_tol(DEFAULT_TOL)
    }

    pub fn inv_tol(&self, tol: f64) -> Result<Scalar> {
        match self {
            Scalar::Exact(c) => c.inv().map(Scalar::Exact).ok_or(HolantError::DivisionByZero),
            Scalar::Approx(z) => {
                if z.norm() <= tol {
                    return Err(HolantError::DivisionByZero);
                }
                Scalar::Approx(z.inv()).check_finite()
            }
        }
    }

    pub fn div(&self, b: &Scalar) -> Result<Scalar> {
        self.div_tol(b, DEFAULT_TOL)
    }

    pub fn div_tol(&self, b: &Scalar, tol: f64) -> Result<Scalar> {
        Ok(self * &b.inv_tol(tol)?).and_then(Scalar::check_finite)
    }

    pub fn pow(&self, mut n: u32) -> Scalar {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Exact square root if one is found in ℚ(ζ₈), otherwise the principal
    /// complex root.
    pub fn sqrt(&self) -> Scalar {
        match self {
            Scalar::Exact(c) => match c.try_sqrt() {
                Some(r) => Scalar::Exact(r),
                None => Scalar::Approx(c.to_c64().sqrt()),
            },
            Scalar::Approx(z) => Scalar::Approx(z.sqrt()),
        }
    }

    /// Exact equality between exact values (tolerance ignored); otherwise a
    /// per-component comparison against `tol`.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let d = self.to_c64() - other.to_c64();
                d.re.abs() <= tol && d.im.abs() <= tol
            }
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl From<Cyc> for Scalar {
    fn from(c: Cyc) -> Self {
        Scalar::Exact(c)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Approx(z)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            _ => Scalar::Approx(self.to_c64() + o.to_c64()),
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            _ => Scalar::Approx(self.to_c64() - o.to_c64()),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                if a.is_zero() || b.is_zero() {
                    Scalar::zero()
                } else {
                    Scalar::Exact(a * b)
                }
            }
            _ => Scalar::Approx(self.to_c64() * o.to_c64()),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Approx(z) => Scalar::Approx(-z),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! forward_scalar {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                (&self).$m(&o)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &Scalar) -> Scalar {
                (&self).$m(o)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                self.$m(&o)
            }
        }
    };
}
forward_scalar!(Add, add);
forward_scalar!(Sub, sub);
forward_scalar!(Mul, mul);

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |a, b| a * b)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(c) => write!(f, "{c}"),
            Scalar::Approx(z) => {
                if z.im == 0.0 {
                    write!(f, "{}", z.re)
                } else if z.im < 0.0 {
                    write!(f, "{}-{}i", z.re, -z.im)
                } else {
                    write!(f, "{}+{}i", z.re, z.im)
                }
            }
        }
    }
}

/// `true` when the rational is an integer.
pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Principal argument in `[0, 2π)`.
pub fn principal_arg(z: Complex64) -> f64 {
    if z.norm() == 0.0 {
        return 0.0;
    }
    let a = z.arg();
    if a < 0.0 {
        a + 2.0 * std::f64::consts::PI
    } else {
        a
    }
}
