//! Exact arithmetic in the eighth cyclotomic field.
//!
//! An element is `c0 + c1·ζ + c2·ζ² + c3·ζ³` with `ζ = e^{iπ/4}`. Since
//! `ζ⁴ = −1` the four powers form a basis and every element has exactly one
//! coefficient vector, so equality is coefficient-wise.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Cyc {
    c: [Rational; 4],
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl Cyc {
    pub fn new(c0: Rational, c1: Rational, c2: Rational, c3: Rational) -> Self {
        Cyc { c: [c0, c1, c2, c3] }
    }

    pub fn from_coeffs(c: [Rational; 4]) -> Self {
        Cyc { c }
    }

    pub fn zero() -> Self {
        Cyc { c: [Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero()] }
    }

    pub fn one() -> Self {
        Self::from_rational(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    pub fn from_rational(r: Rational) -> Self {
        let mut z = Self::zero();
        z.c[0] = r;
        z
    }

    /// `re + im·i` with rational parts.
    pub fn gaussian(re: Rational, im: Rational) -> Self {
        let mut z = Self::zero();
        z.c[0] = re;
        z.c[2] = im;
        z
    }

    pub fn i() -> Self {
        Self::gaussian(Rational::zero(), Rational::one())
    }

    pub fn zeta() -> Self {
        let mut z = Self::zero();
        z.c[1] = Rational::one();
        z
    }

    /// √2 = ζ − ζ³.
    pub fn sqrt2() -> Self {
        Cyc::new(Rational::zero(), Rational::one(), Rational::zero(), -Rational::one())
    }

    /// 1/√2 = (ζ − ζ³)/2.
    pub fn inv_sqrt2() -> Self {
        let h = Rational::new(BigInt::from(1), BigInt::from(2));
        Cyc::new(Rational::zero(), h.clone(), Rational::zero(), -h)
    }

    pub fn coeffs(&self) -> &[Rational; 4] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.c[0].is_one() && self.c[1..].iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.c[1..].iter().all(Zero::is_zero)
    }

    /// True when the element lies in ℚ(i), i.e. only `c0` and `c2` are set.
    pub fn is_gaussian(&self) -> bool {
        self.c[1].is_zero() && self.c[3].is_zero()
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        Cyc { c: [&self.c[0] * r, &self.c[1] * r, &self.c[2] * r, &self.c[3] * r] }
    }

    /// The automorphism ζ ↦ ζᵏ for odd k.
    pub fn galois(&self, k: usize) -> Self {
        debug_assert!(k % 2 == 1);
        let mut out = Self::zero();
        for (j, cj) in self.c.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            let e = (j * k) % 8;
            if e < 4 {
                out.c[e] += cj;
            } else {
                out.c[e - 4] -= cj;
            }
        }
        out
    }

    /// Complex conjugation is the automorphism ζ ↦ ζ⁷.
    pub fn conj(&self) -> Self {
        self.galois(7)
    }

    /// Field norm down to ℚ: the product of all four conjugates.
    pub fn norm(&self) -> Rational {
        let p = self * &self.galois(3) * self.galois(5) * self.galois(7);
        debug_assert!(p.is_rational());
        p.c[0].clone()
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.is_rational() {
            return Some(Self::from_rational(self.c[0].recip()));
        }
        let others = self.galois(3) * self.galois(5) * self.galois(7);
        let n = (self * &others).c[0].clone();
        Some(others.scale(&n.recip()))
    }

    pub fn to_c64(&self) -> Complex64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let f = |r: &Rational| r.to_f64().unwrap_or(f64::NAN);
        let (c0, c1, c2, c3) = (f(&self.c[0]), f(&self.c[1]), f(&self.c[2]), f(&self.c[3]));
        // ζ = (1 + i)/√2, ζ³ = (−1 + i)/√2
        Complex64::new(c0 + (c1 - c3) * s, c2 + (c1 + c3) * s)
    }

    /// Exact square root when one exists with small enough coefficients.
    ///
    /// The candidate is recovered from floating point approximations of the
    /// root and of its image under ζ ↦ ζ⁵ (which fixes i and negates √2),
    /// rounded to nearby rationals, and accepted only if it squares back to
    /// `self` exactly.
    pub fn try_sqrt(&self) -> Option<Cyc> {
        if self.is_zero() {
            return Some(Self::zero());
        }
        let z = self.to_c64().sqrt();
        let z5 = self.galois(5).to_c64().sqrt();
        if !z.is_finite() || !z5.is_finite() {
            return None;
        }
        let r2 = std::f64::consts::SQRT_2;
        for sign in [1.0, -1.0] {
            let p = (z + z5 * sign) / 2.0;
            let q = (z - z5 * sign) / (2.0 * r2);
            let parts = [p.re, q.re, p.im, q.im];
            let Some(rs) = parts.iter().map(|&x| nearby_rational(x)).collect::<Option<Vec<_>>>() else {
                continue;
            };
            let [pr, qr, pi, qi]: [Rational; 4] = rs.try_into().ok()?;
            // p + q√2 + i(r + s√2) with √2 = ζ − ζ³ and i√2 = ζ + ζ³
            let cand = Cyc::new(pr, &qr + &qi, pi, &qi - &qr);
            if &cand * &cand == *self {
                return Some(cand);
            }
        }
        None
    }
}

/// Best rational approximation with denominator at most 10⁶, accepted only
/// when it is within 1e−9 (relative) of `x`.
fn nearby_rational(x: f64) -> Option<Rational> {
    if !x.is_finite() || x.abs() > 1e12 {
        return None;
    }
    const MAX_DEN: i64 = 1_000_000;
    let sign = if x < 0.0 { -1 } else { 1 };
    let mut v = x.abs();
    let (mut h0, mut h1, mut k0, mut k1) = (0i128, 1i128, 1i128, 0i128);
    let mut best = None;
    for _ in 0..64 {
        let a = v.floor();
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > MAX_DEN as i128 {
            break;
        }
        best = Some((h2, k2));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = v - a;
        if frac < 1e-12 {
            break;
        }
        v = 1.0 / frac;
    }
    let (h, k) = best?;
    let approx = h as f64 / k as f64;
    if (approx - x.abs()).abs() > 1e-9 * x.abs().max(1.0) {
        return None;
    }
    Some(Rational::new(BigInt::from(sign * h as i64), BigInt::from(k as i64)))
}

impl Add for &Cyc {
    type Output = Cyc;
    fn add(self, o: &Cyc) -> Cyc {
        Cyc { c: std::array::from_fn(|j| &self.c[j] + &o.c[j]) }
    }
}

impl Sub for &Cyc {
    type Output = Cyc;
    fn sub(self, o: &Cyc) -> Cyc {
        Cyc { c: std::array::from_fn(|j| &self.c[j] - &o.c[j]) }
    }
}

impl Mul for &Cyc {
    type Output = Cyc;
    fn mul(self, o: &Cyc) -> Cyc {
        // Most values in practice are rational; skip the 16-term convolution.
        if o.is_rational() {
            return self.scale(&o.c[0]);
        }
        if self.is_rational() {
            return o.scale(&self.c[0]);
        }
        let mut out = Cyc::zero();
        for (j, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, b) in o.c.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let p = a * b;
                if j + k < 4 {
                    out.c[j + k] += p;
                } else {
                    out.c[j + k - 4] -= p;
                }
            }
        }
        out
    }
}

impl Neg for &Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        Cyc { c: std::array::from_fn(|j| -&self.c[j]) }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Cyc {
            type Output = Cyc;
            fn $m(self, o: Cyc) -> Cyc {
                (&self).$m(&o)
            }
        }
        impl $tr<&Cyc> for Cyc {
            type Output = Cyc;
            fn $m(self, o: &Cyc) -> Cyc {
                (&self).$m(o)
            }
        }
        impl $tr<Cyc> for &Cyc {
            type Output = Cyc;
            fn $m(self, o: Cyc) -> Cyc {
                self.$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        -&self
    }
}

fn fmt_rat(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Cyc {
    /// Gaussian rationals print in the `a+bi` literal form, a rational
    /// multiple of √2 as `r*sqrt2`, and anything else as `zeta8(c0,c1,c2,c3)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_gaussian() {
            let (re, im) = (&self.c[0], &self.c[2]);
            return if im.is_zero() {
                write!(f, "{}", fmt_rat(re))
            } else if re.is_zero() {
                write!(f, "{}i", fmt_imag(im))
            } else if im.is_negative() {
                write!(f, "{}-{}i", fmt_rat(re), fmt_imag(&-im))
            } else {
                write!(f, "{}+{}i", fmt_rat(re), fmt_imag(im))
            };
        }
        let c = &self.c;
        if c[0].is_zero() && c[2].is_zero() && c[1] == -c[3].clone() {
            return write!(f, "{}*sqrt2", fmt_rat(&c[1]));
        }
        write!(f, "zeta8({},{},{},{})", fmt_rat(&c[0]), fmt_rat(&c[1]), fmt_rat(&c[2]), fmt_rat(&c[3]))
    }
}

fn fmt_imag(r: &Rational) -> String {
    if r.is_one() {
        String::new()
    } else if *r == -Rational::one() {
        "-".to_string()
    } else {
        fmt_rat(r)
    }
}
