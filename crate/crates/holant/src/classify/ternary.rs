//! Entanglement classes of ternary functions and rank-two recovery.

use crate::error::{HolantError, Result};
use crate::numerics::{Cyc, Rational, Scalar};
use crate::signatures::{decompose_atoms, Signature, Transform2};

/// Relative threshold for a nonzero hyperdeterminant on approximate input.
pub const HYPERDET_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TernaryTag {
    Degenerate,
    Ghz,
    W,
}

impl TernaryTag {
    pub fn name(self) -> &'static str {
        match self {
            TernaryTag::Degenerate => "Degenerate",
            TernaryTag::Ghz => "GHZ",
            TernaryTag::W => "W",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TernaryClass {
    pub tag: TernaryTag,
    /// `M` with `f = M∘EQ₃` (GHZ) or `f = M∘ONE₃` (W), when one was found.
    pub witness: Option<Transform2>,
}

/// `h = α·⊗_j c_{a_j} + β·⊗_j c_{ā_j}` where `a` is `pattern` read as bits
/// (most significant first).
#[derive(Clone, Debug, PartialEq)]
pub struct Rank2Split {
    pub c0: [Scalar; 2],
    pub c1: [Scalar; 2],
    pub alpha: Scalar,
    pub beta: Scalar,
    pub pattern: usize,
    /// False when an approximate square root was needed along the way.
    pub exact: bool,
}

/// Cayley's hyperdeterminant of a 2×2×2 table `f000 … f111`.
pub fn hyperdeterminant(f: &Signature) -> Result<Scalar> {
    if f.arity() != 3 {
        return Err(HolantError::ArityMismatch(format!("hyperdeterminant needs arity 3, got {}", f.arity())));
    }
    let v = f.values();
    let (a, b, c, d, e, ff, g, h) = (&v[0], &v[1], &v[2], &v[3], &v[4], &v[5], &v[6], &v[7]);
    let ah = a * h;
    let bg = b * g;
    let cf = c * ff;
    let de = d * e;
    let squares = &ah * &ah + &bg * &bg + &cf * &cf + &de * &de;
    let cross = &ah * &bg + &ah * &cf + &ah * &de + &bg * &cf + &bg * &de + &cf * &de;
    let quartic = &(a * d) * &(ff * g) + &(b * c) * &(e * h);
    Ok(squares - Scalar::int(2) * cross + Scalar::int(4) * quartic)
}

fn is_nonzero(x: &Scalar, scale: f64) -> bool {
    match x {
        Scalar::Exact(c) => !c.is_zero(),
        Scalar::Approx(_) => x.abs() > HYPERDET_TOL * scale,
    }
}

/// Classification from the symmetric list `[f₀, f₁, f₂, f₃]`.
pub fn classify_symmetric_ternary(entries: &[Scalar]) -> Result<TernaryClass> {
    if entries.len() != 4 {
        return Err(HolantError::ArityMismatch(format!("symmetric ternary needs 4 entries, got {}", entries.len())));
    }
    let (f0, f1, f2, f3) = (&entries[0], &entries[1], &entries[2], &entries[3]);
    let p = f0 * f3 - f1 * f2;
    let q = f1 * f1 - f0 * f2;
    let r = f2 * f2 - f1 * f3;
    let disc = &p * &p - Scalar::int(4) * (&q * &r);
    let scale = entries.iter().map(Scalar::abs).fold(0.0, f64::max).powi(4);
    let f = Signature::symmetric(entries)?;
    if is_nonzero(&disc, scale) {
        return Ok(TernaryClass { tag: TernaryTag::Ghz, witness: ghz_witness(&f) });
    }
    let tol = HYPERDET_TOL * scale.sqrt();
    if q.is_zero_tol(tol) && r.is_zero_tol(tol) {
        return Ok(TernaryClass { tag: TernaryTag::Degenerate, witness: None });
    }
    Ok(TernaryClass { tag: TernaryTag::W, witness: w_witness(entries) })
}

/// Classification of an arbitrary ternary table.
pub fn classify_ternary(f: &Signature, tol: f64) -> Result<TernaryClass> {
    if f.arity() != 3 {
        return Err(HolantError::ArityMismatch(format!("ternary classification needs arity 3, got {}", f.arity())));
    }
    let d = decompose_atoms(f, 3, tol)?;
    if d.atoms.len() > 1 || d.scalar.is_zero_tol(tol) {
        return Ok(TernaryClass { tag: TernaryTag::Degenerate, witness: None });
    }
    let delta = hyperdeterminant(f)?;
    if is_nonzero(&delta, f.max_abs().powi(4)) {
        return Ok(TernaryClass { tag: TernaryTag::Ghz, witness: ghz_witness(f) });
    }
    let witness = f.symmetric_entries(tol).and_then(|e| w_witness(&e));
    Ok(TernaryClass { tag: TernaryTag::W, witness })
}

/// Exact cube root of a rational whose numerator and denominator are
/// perfect cubes, otherwise the principal complex cube root.
pub(crate) fn cube_root(x: &Scalar) -> Scalar {
    if let Scalar::Exact(c) = x {
        if c.is_rational() {
            let r = &c.coeffs()[0];
            let root = |n: &num_bigint::BigInt| -> Option<num_bigint::BigInt> {
                let t = n.cbrt();
                (&t * &t * &t == *n).then_some(t)
            };
            if let (Some(n), Some(d)) = (root(r.numer()), root(r.denom())) {
                return Scalar::Exact(Cyc::from_rational(Rational::new(n, d)));
            }
        }
    }
    Scalar::Approx(x.to_c64().powf(1.0 / 3.0))
}

/// `M` with `f = M∘EQ₃` from a rank-two split with pattern 000 or 111.
fn ghz_witness(f: &Signature) -> Option<Transform2> {
    let s = recover_rank2(f, 1e-9).ok()??;
    let (u, v, alpha, beta) = match s.pattern {
        0 => (&s.c0, &s.c1, &s.alpha, &s.beta),
        7 => (&s.c1, &s.c0, &s.beta, &s.alpha),
        _ => return None,
    };
    let ta = cube_root(alpha);
    let tb = cube_root(beta);
    let m = Transform2::new(&ta * &u[0], &tb * &v[0], &ta * &u[1], &tb * &v[1]);
    f.approx_eq(&Signature::eq(3).holo(&m), 1e-7).then_some(m)
}

/// `M` with `M∘ONE₃ = [f₀, f₁, f₂, f₃]`. The first column of `M` spans the
/// repeated root of the binary cubic, read off its Hessian.
fn w_witness(e: &[Scalar]) -> Option<Transform2> {
    let (f0, f1, f2, f3) = (&e[0], &e[1], &e[2], &e[3]);
    let h0 = f0 * f2 - f1 * f1;
    let h1 = f0 * f3 - f1 * f2;
    let h2 = f1 * f3 - f2 * f2;
    let tol = 1e-12;
    let (a, c) = if !(h1.is_zero_tol(tol) && h2.is_zero_tol(tol)) {
        (h1.clone(), Scalar::int(2) * &h2)
    } else {
        (Scalar::int(2) * &h0, h1.clone())
    };
    let (b, d) = if !a.is_zero_tol(tol) {
        let a2 = &a * &a;
        let b = f0.div(&(Scalar::int(3) * &a2)).ok()?;
        let d = (f1 - Scalar::int(2) * (&(&a * &b) * &c)).div(&a2).ok()?;
        (b, d)
    } else {
        let c2 = &c * &c;
        (f2.div(&c2).ok()?, f3.div(&(Scalar::int(3) * &c2)).ok()?)
    };
    let m = Transform2::new(a, b, c, d);
    let target = Signature::symmetric(e).ok()?;
    Signature::one(3).holo(&m).approx_eq(&target, 1e-7).then_some(m)
}

/// Contraction vectors `(1, p)` tried in order.
const PROBES: [(i64, i64); 6] = [(2, 3), (5, 7), (11, 13), (-3, 17), (19, -23), (29, 31)];

/// Contracts arguments `3..k` of `h`, the last one against `(1, p)`, the
/// one before against `(1, p + 6)`, and so on. Distinct vectors per position
/// keep the two terms' factors apart when the contracted bits of the
/// pattern are mixed.
fn probe(h: &Signature, p: i64) -> Transform2 {
    let mut g = h.clone();
    let mut step = 0;
    while g.arity() > 2 {
        let k = g.arity();
        let u = Signature::unary(Scalar::one(), Scalar::int(p + 6 * step));
        g = g.tensor(&u).contract(k - 1, k).expect("valid");
        step += 1;
    }
    g.matrix_view().expect("binary")
}

fn normalise(v: [Scalar; 2], tol: f64) -> Option<[Scalar; 2]> {
    let lead = if !v[0].is_zero_tol(tol) { &v[0] } else if !v[1].is_zero_tol(tol) { &v[1] } else { return None };
    let inv = lead.inv_tol(tol).ok()?;
    Some([&v[0] * &inv, &v[1] * &inv])
}

fn eigvec(n: &Transform2, lambda: &Scalar, tol: f64) -> Option<[Scalar; 2]> {
    let a = [n.get(0, 1).clone(), lambda - n.get(0, 0)];
    normalise(a, tol).or_else(|| normalise([lambda - n.get(1, 1), n.get(1, 0).clone()], tol))
}

/// Recovers `h = α·⊗ c_{a_j} + β·⊗ c_{ā_j}` with one common column pair,
/// or `None` when no such form exists.
pub fn recover_rank2(h: &Signature, tol: f64) -> Result<Option<Rank2Split>> {
    if h.arity() < 3 {
        return Err(HolantError::DegenerateInput(format!("rank-two recovery needs arity ≥ 3, got {}", h.arity())));
    }
    if h.is_zero(tol) {
        return Err(HolantError::DegenerateInput("zero function".into()));
    }
    for &(p, q) in &PROBES {
        let a = probe(h, p);
        let b = probe(h, q);
        let Ok(binv) = b.inverse_tol(tol) else { continue };
        let n = a.mul(&binv);
        let tr = n.get(0, 0) + n.get(1, 1);
        let det = n.det();
        let disc = &tr * &tr - Scalar::int(4) * &det;
        if disc.is_zero_tol(tol) {
            continue;
        }
        let root = disc.sqrt();
        let half = Scalar::ratio(1, 2);
        let l0 = &half * &(&tr + &root);
        let l1 = &half * &(&tr - &root);
        let (Some(c0), Some(c1)) = (eigvec(&n, &l0, tol), eigvec(&n, &l1, tol)) else { continue };
        let exact = h.is_exact() && root.is_exact();
        let cmat = Transform2::from_columns(&c0, &c1);
        let Ok(cinv) = cmat.inverse_tol(tol) else { continue };
        let g = h.holo(&cinv);
        if !g.is_generalised_equality(tol.max(1e-7 * g.max_abs())) {
            // The pair is forced up to scale, so a failed check is final.
            return Ok(None);
        }
        let k = g.arity();
        let full = (1usize << k) - 1;
        let sup = g.support(tol.max(1e-7 * g.max_abs()));
        let pattern = sup[0].min(full ^ sup[0]);
        return Ok(Some(Rank2Split {
            c0,
            c1,
            alpha: g.at(pattern).clone(),
            beta: g.at(full ^ pattern).clone(),
            pattern,
            exact,
        }));
    }
    Ok(None)
}

impl Rank2Split {
    pub fn reassemble(&self, arity: usize) -> Signature {
        let col = |bit: usize| if bit == 0 { &self.c0 } else { &self.c1 };
        let term = |pat: usize, coef: &Scalar| {
            let mut t = Signature::nullary(coef.clone());
            for j in 0..arity {
                let c = col((pat >> (arity - 1 - j)) & 1);
                t = t.tensor(&Signature::unary(c[0].clone(), c[1].clone()));
            }
            t
        };
        let full = (1usize << arity) - 1;
        let a = term(self.pattern, &self.alpha);
        let b = term(full ^ self.pattern, &self.beta);
        Signature::new(arity, a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect()).expect("sized")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_examples() {
        let t = |v: [i64; 4]| classify_symmetric_ternary(&v.map(Scalar::int)).unwrap();
        let g = t([1, 0, 0, 1]);
        assert_eq!(g.tag, TernaryTag::Ghz);
        assert_eq!(g.witness.unwrap(), Transform2::identity());
        let w = t([0, 1, 0, 0]);
        assert_eq!(w.tag, TernaryTag::W);
        assert_eq!(Signature::one(3).holo(&w.witness.unwrap()), Signature::one(3));
        assert_eq!(t([1, 1, 1, 1]).tag, TernaryTag::Degenerate);
    }

    #[test]
    fn w_witness_on_transformed_one3() {
        let m = Transform2::from_ints(2, -1, 3, 5);
        let f = Signature::one(3).holo(&m);
        let c = classify_ternary(&f, 1e-9).unwrap();
        assert_eq!(c.tag, TernaryTag::W);
        assert_eq!(Signature::one(3).holo(&c.witness.unwrap()), f);
    }

    #[test]
    fn ghz_witness_on_transformed_eq3() {
        let m = Transform2::from_ints(1, 2, -1, 3);
        let f = Signature::eq(3).holo(&m);
        let c = classify_ternary(&f, 1e-9).unwrap();
        assert_eq!(c.tag, TernaryTag::Ghz);
        assert_eq!(Signature::eq(3).holo(&c.witness.unwrap()), f);
    }

    #[test]
    fn degenerate_product() {
        let f = Signature::delta0().tensor(&Signature::neq());
        assert_eq!(classify_ternary(&f, 1e-9).unwrap().tag, TernaryTag::Degenerate);
    }

    #[test]
    fn recover_eq3_and_k1() {
        let s = recover_rank2(&Signature::eq(3), 1e-9).unwrap().unwrap();
        assert_eq!(s.pattern, 0);
        assert_eq!(s.reassemble(3), Signature::eq(3));
        let f = Signature::eq(3).holo(&Transform2::k1());
        let s = recover_rank2(&f, 1e-9).unwrap().unwrap();
        for c in [&s.c0, &s.c1] {
            assert!((&c[0] * &c[0] + &c[1] * &c[1]).is_zero_tol(0.0));
        }
        assert_eq!(s.reassemble(3), f);
        assert!(recover_rank2(&Signature::one(3), 1e-9).unwrap().is_none());
    }

    #[test]
    fn hyperdeterminant_matches_symmetric_discriminant() {
        let f = Signature::symmetric_ints(&[2, -1, 3, 7]).unwrap();
        let (f0, f1, f2, f3) = (2i64, -1i64, 3i64, 7i64);
        let disc = (f0 * f3 - f1 * f2).pow(2) - 4 * (f1 * f1 - f0 * f2) * (f2 * f2 - f1 * f3);
        assert_eq!(hyperdeterminant(&f).unwrap(), Scalar::int(disc));
    }
}
