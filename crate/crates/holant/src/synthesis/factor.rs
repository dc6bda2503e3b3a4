//! 2×2 factorizations and unitary completion.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{HolantError, Result};
use crate::numerics::Scalar;
use crate::signatures::{transform_to_json, Signature, Transform2};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TriangleSide {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Factorization {
    /// `M = P·L·D·U` with `P ∈ {I, X}`, unit triangular `L`, `U` and
    /// invertible diagonal `D`.
    Pldu { p: Transform2, l: Transform2, d: Transform2, u: Transform2 },
    /// `M = Q·R` with `Q` orthogonal or one of `K1`, `K2`, and `R`
    /// triangular on `side`.
    Qr { q: Transform2, r: Transform2, side: TriangleSide },
}

impl Factorization {
    pub fn product(&self) -> Transform2 {
        match self {
            Factorization::Pldu { p, l, d, u } => p.mul(l).mul(d).mul(u),
            Factorization::Qr { q, r, .. } => q.mul(r),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Factorization::Pldu { p, l, d, u } => json!({
                "kind": "PLDU",
                "P": transform_to_json(p),
                "L": transform_to_json(l),
                "D": transform_to_json(d),
                "U": transform_to_json(u),
            }),
            Factorization::Qr { q, r, side } => json!({
                "kind": "QR",
                "side": match side { TriangleSide::Upper => "upper", TriangleSide::Lower => "lower" },
                "Q": transform_to_json(q),
                "R": transform_to_json(r),
            }),
        }
    }
}

fn invertible(m: &Transform2) -> Result<()> {
    if m.det().is_zero() {
        return Err(HolantError::SingularMatrix);
    }
    Ok(())
}

/// `M = P·L·D·U`; `P = I` when the top-left entry is nonzero, else `P = X`.
pub fn pldu(m: &Transform2) -> Result<Factorization> {
    invertible(m)?;
    let (al, be, ga, de) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let one = Scalar::one;
    let zero = Scalar::zero;
    let f = if !al.is_zero() {
        let det = al * de - be * ga;
        Factorization::Pldu {
            p: Transform2::identity(),
            l: Transform2::new(one(), zero(), ga.div(al)?, one()),
            d: Transform2::diag(al.clone(), det.div(al)?),
            u: Transform2::new(one(), be.div(al)?, zero(), one()),
        }
    } else {
        let det = be * ga - al * de;
        Factorization::Pldu {
            p: Transform2::x(),
            l: Transform2::new(one(), zero(), al.div(ga)?, one()),
            d: Transform2::diag(ga.clone(), det.div(ga)?),
            u: Transform2::new(one(), de.div(ga)?, zero(), one()),
        }
    };
    Ok(f)
}

/// `Q` with `Q⁻¹·M` triangular on `side`.
///
/// The column that must stay a multiple of a unit vector is normalised and
/// completed to an orthogonal matrix; when it is isotropic (`mᵀm = 0`) it is
/// a multiple of a column of `K1` or `K2` instead.
pub fn triangularize(m: &Transform2, side: TriangleSide) -> Result<Factorization> {
    invertible(m)?;
    let done = match side {
        TriangleSide::Upper => m.get(1, 0).is_zero(),
        TriangleSide::Lower => m.get(0, 1).is_zero(),
    };
    if done {
        return Ok(Factorization::Qr { q: Transform2::identity(), r: m.clone(), side });
    }
    let col = match side {
        TriangleSide::Upper => m.column(0),
        TriangleSide::Lower => m.column(1),
    };
    let norm2 = &col[0] * &col[0] + &col[1] * &col[1];
    let q = if !norm2.is_zero_tol(1e-12 * (col[0].abs() + col[1].abs()).powi(2)) {
        let r = norm2.sqrt().inv()?;
        let (x, y) = (&col[0] * &r, &col[1] * &r);
        match side {
            TriangleSide::Upper => Transform2::new(x.clone(), -y.clone(), y, x),
            TriangleSide::Lower => Transform2::new(y.clone(), x.clone(), -x, y),
        }
    } else {
        // col ∝ (1, ±i); pick the K whose matching column has that direction.
        let ratio = col[1].div(&col[0])?;
        let plus_i = ratio.approx_eq(&Scalar::i(), 1e-9);
        match (side, plus_i) {
            (TriangleSide::Upper, true) | (TriangleSide::Lower, false) => Transform2::k1(),
            _ => Transform2::k2(),
        }
    };
    let r = q.inverse()?.mul(m);
    Ok(Factorization::Qr { q, r, side })
}

/// A unitary `2ⁿ×2ⁿ` matrix whose first column is `a/‖a‖`, by Gram–Schmidt
/// against the standard basis. Returned as an arity-`2n` signature laid out
/// as [`Signature::is_unitary`] reads it.
pub fn unitary_completion(a: &[Scalar]) -> Result<Signature> {
    let dim = a.len();
    if dim == 0 || !dim.is_power_of_two() {
        return Err(HolantError::ArityMismatch(format!("vector length {dim} is not a power of two")));
    }
    let n = dim.trailing_zeros() as usize;
    let v: Vec<Complex64> = a.iter().map(Scalar::to_c64).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(HolantError::ZeroVector);
    }
    let mut cols: Vec<Vec<Complex64>> = vec![v.iter().map(|z| z / norm).collect()];
    for k in 0..dim {
        if cols.len() == dim {
            break;
        }
        let mut w = vec![Complex64::new(0.0, 0.0); dim];
        w[k] = Complex64::new(1.0, 0.0);
        // Two passes keep the result orthogonal to working precision.
        for _ in 0..2 {
            for c in &cols {
                let dot: Complex64 = c.iter().zip(&w).map(|(ci, wi)| ci.conj() * wi).sum();
                for (wi, ci) in w.iter_mut().zip(c) {
                    *wi -= dot * ci;
                }
            }
        }
        let wn = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if wn > 1e-8 {
            cols.push(w.iter().map(|z| z / wn).collect());
        }
    }
    let mut values = vec![Scalar::zero(); dim * dim];
    for (c, col) in cols.iter().enumerate() {
        for (r, z) in col.iter().enumerate() {
            values[(c << n) | r] = Scalar::Approx(*z);
        }
    }
    Signature::new(2 * n, values)
}
