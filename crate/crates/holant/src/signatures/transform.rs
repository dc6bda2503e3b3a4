use std::fmt;

use crate::error::{HolantError, Result};
use crate::numerics::{Scalar, DEFAULT_TOL};

/// A 2×2 matrix, used both as a holographic transformation and as the
/// matrix view of a binary signature (`m[x][y] = f(x, y)`).
#[derive(Clone, Debug, PartialEq)]
pub struct Transform2 {
    pub m: [[Scalar; 2]; 2],
}

impl Transform2 {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Self {
        Transform2 { m: [[a, b], [c, d]] }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1)
    }

    pub fn x() -> Self {
        Self::from_ints(0, 1, 1, 0)
    }

    pub fn diag(a: Scalar, d: Scalar) -> Self {
        Self::new(a, Scalar::zero(), Scalar::zero(), d)
    }

    /// (1/√2)·(1 1; i −i)
    pub fn k1() -> Self {
        let s = Scalar::inv_sqrt2();
        let si = &s * &Scalar::i();
        Self::new(s.clone(), s, si.clone(), -si)
    }

    /// (1/√2)·(1 1; −i i)
    pub fn k2() -> Self {
        let s = Scalar::inv_sqrt2();
        let si = &s * &Scalar::i();
        Self::new(s.clone(), s, -si.clone(), si)
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.m[r][c]
    }

    pub fn column(&self, c: usize) -> [Scalar; 2] {
        [self.m[0][c].clone(), self.m[1][c].clone()]
    }

    pub fn from_columns(c0: &[Scalar; 2], c1: &[Scalar; 2]) -> Self {
        Self::new(c0[0].clone(), c1[0].clone(), c0[1].clone(), c1[1].clone())
    }

    pub fn det(&self) -> Scalar {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    pub fn is_invertible(&self, tol: f64) -> bool {
        !self.det().is_zero_tol(tol)
    }

    pub fn is_exact(&self) -> bool {
        self.m.iter().flatten().all(Scalar::is_exact)
    }

    pub fn mul(&self, o: &Transform2) -> Transform2 {
        let e = |r: usize, c: usize| &self.m[r][0] * &o.m[0][c] + &self.m[r][1] * &o.m[1][c];
        Transform2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn transpose(&self) -> Transform2 {
        Transform2::new(self.m[0][0].clone(), self.m[1][0].clone(), self.m[0][1].clone(), self.m[1][1].clone())
    }

    pub fn scale(&self, s: &Scalar) -> Transform2 {
        let e = |r: usize, c: usize| s * &self.m[r][c];
        Transform2::new(e(0, 0), e(0, 1), e(1, 0), e(1, 1))
    }

    pub fn inverse(&self) -> Result<Transform2> {
        self.inverse_tol(DEFAULT_TOL)
    }

    pub fn inverse_tol(&self, tol: f64) -> Result<Transform2> {
        let det = self.det();
        if det.is_zero_tol(tol) {
            return Err(HolantError::SingularMatrix);
        }
        let inv = det.inv_tol(tol)?;
        let [[a, b], [c, d]] = &self.m;
        Ok(Transform2::new(&inv * d, -(&inv * b), -(&inv * c), &inv * a))
    }

    pub fn apply(&self, v: &[Scalar; 2]) -> [Scalar; 2] {
        [
            &self.m[0][0] * &v[0] + &self.m[0][1] * &v[1],
            &self.m[1][0] * &v[0] + &self.m[1][1] * &v[1],
        ]
    }

    pub fn approx_eq(&self, o: &Transform2, tol: f64) -> bool {
        self.m.iter().flatten().zip(o.m.iter().flatten()).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn is_upper_triangular(&self, tol: f64) -> bool {
        self.m[1][0].is_zero_tol(tol)
    }

    pub fn is_lower_triangular(&self, tol: f64) -> bool {
        self.m[0][1].is_zero_tol(tol)
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.is_upper_triangular(tol) && self.is_lower_triangular(tol)
    }

    /// Mᵀ·M = I.
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        self.transpose().mul(self).approx_eq(&Transform2::identity(), tol)
    }

    pub fn flat(&self) -> [Scalar; 4] {
        [self.m[0][0].clone(), self.m[0][1].clone(), self.m[1][0].clone(), self.m[1][1].clone()]
    }
}

impl fmt::Display for Transform2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_transpose_k_is_x() {
        for k in [Transform2::k1(), Transform2::k2()] {
            assert_eq!(k.transpose().mul(&k), Transform2::x());
            assert_eq!(Transform2::x().mul(&k.transpose()), k.inverse().unwrap());
        }
        assert_eq!(Transform2::k1().mul(&Transform2::x()), Transform2::k2());
    }

    #[test]
    fn singular_inverse_fails() {
        assert_eq!(Transform2::from_ints(1, 2, 2, 4).inverse(), Err(HolantError::SingularMatrix));
    }
}
