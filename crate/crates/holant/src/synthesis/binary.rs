//! Every binary function from either a GHZ-type ternary `R∘EQ₃` with
//! `R = (a b; 0 1/a)`, or a tractable pair `[1,0,0,a]`, `[b,1,c]`, together
//! with unary functions.
//!
//! Both builders produce three kinds of piece (`NEQ`, invertible diagonals
//! and some `(0 1; 1 μ)`), then realize unit triangular matrices as
//! `k_d·t_μ·k_d·NEQ` and assemble the target along its PLDU factorization.

use crate::classify::cube_root;
use crate::error::{HolantError, Result};
use crate::formulas::PpsHFormula;
use crate::numerics::Scalar;
use crate::signatures::{Signature, Transform2};

use super::factor::{pldu, Factorization};
use super::{chain, scaled, swapped, GadgetRecipe, Provenance};

/// Values below this are treated as zero when steering around excluded
/// parameters.
const GUARD: f64 = 1e-9;

fn nz(x: &Scalar) -> bool {
    !x.is_zero_tol(GUARD)
}

fn div(a: &Scalar, b: &Scalar) -> Result<Scalar> {
    a.div_tol(b, GUARD)
}

fn int(n: i64) -> Scalar {
    Scalar::int(n)
}

trait BinaryKit {
    fn neq(&self) -> Result<PpsHFormula>;
    /// `diag(λ, μ)` for nonzero `λ, μ`.
    fn diag(&self, l: &Scalar, m: &Scalar) -> Result<PpsHFormula>;
    /// `(0 1; 1 μ)` with `μ ≠ 0`, and `μ`.
    fn t(&self) -> Result<(PpsHFormula, Scalar)>;
}

/// `(1 0; l 1) = k_d·t_μ·k_d·X` with `d² = μ/l`.
fn lower_unit(kit: &dyn BinaryKit, l: &Scalar) -> Result<PpsHFormula> {
    let (t, mu) = kit.t()?;
    let d = div(&mu, l)?.sqrt();
    let k = kit.diag(&d, &d.inv_tol(GUARD)?)?;
    chain(&[k.clone(), t, k, kit.neq()?])
}

/// `u ⊗ v` for a rank-one matrix.
fn rank_one(m: &Transform2) -> Result<PpsHFormula> {
    let flat = m.flat();
    let (best, _) = flat.iter().enumerate().fold((0, -1.0), |acc, (i, x)| if x.abs() > acc.1 { (i, x.abs()) } else { acc });
    let (i, j) = (best / 2, best % 2);
    let (u, v) = if flat[best].is_zero() {
        (Signature::unary(Scalar::zero(), Scalar::zero()), Signature::unary(Scalar::one(), Scalar::one()))
    } else {
        let p = m.get(i, j);
        (Signature::unary(m.get(0, j).clone(), m.get(1, j).clone()), Signature::unary(div(m.get(i, 0), p)?, div(m.get(i, 1), p)?))
    };
    let mut f = PpsHFormula::new();
    let x1 = f.fresh_free();
    let x2 = f.fresh_free();
    f.add_atom(u, &[x1])?;
    f.add_atom(v, &[x2])?;
    Ok(f)
}

fn compose(kit: &dyn BinaryKit, target: &Signature, tol: f64) -> Result<PpsHFormula> {
    if target.arity() != 2 {
        return Err(HolantError::ArityMismatch(format!("target must be binary, got arity {}", target.arity())));
    }
    let m = target.matrix_view()?;
    let scale = target.max_abs().max(1.0);
    if m.det().is_zero_tol(tol.max(GUARD) * scale * scale) {
        return rank_one(&m);
    }
    let Factorization::Pldu { p, l, d, u } = pldu(&m)? else { unreachable!() };
    let mut parts = Vec::new();
    if !p.get(0, 0).is_one() {
        parts.push(kit.neq()?);
    }
    if nz(l.get(1, 0)) {
        parts.push(lower_unit(kit, l.get(1, 0))?);
    }
    parts.push(kit.diag(d.get(0, 0), d.get(1, 1))?);
    if nz(u.get(0, 1)) {
        parts.push(swapped(&lower_unit(kit, u.get(0, 1))?)?);
    }
    chain(&parts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum GhzCase {
    /// `a²b² + 1 ≠ 0` and `2a²b² + 1 ≠ 0`.
    Generic,
    /// `a²b² = −1`.
    Isotropic,
    /// `2a²b² = −1`.
    HalfIsotropic,
}

struct GhzKit {
    f: Signature,
    a: Scalar,
    b: Scalar,
    ab: Scalar,
    a2: Scalar,
    a4: Scalar,
    case: GhzCase,
}

impl GhzKit {
    fn new(f: Signature, a: Scalar, b: Scalar) -> Self {
        let ab = &a * &b;
        let e = &ab * &ab;
        let case = if !nz(&(&e + int(1))) {
            GhzCase::Isotropic
        } else if !nz(&(int(2) * &e + int(1))) {
            GhzCase::HalfIsotropic
        } else {
            GhzCase::Generic
        };
        let a2 = &a * &a;
        let a4 = &a2 * &a2;
        GhzKit { f, a, b, ab, a2, a4, case }
    }

    /// `g_c(x₁,x₂) = Σ_y f(x₁,x₂,y)·u'_c(y)` with `u'_c = (Rᵀ)⁻¹·(c, 1/c)`.
    fn g(&self, c: &Scalar) -> Result<PpsHFormula> {
        let u = Signature::unary(div(c, &self.a)?, div(&self.a, c)? - &self.b * c);
        let mut h = PpsHFormula::new();
        let x1 = h.fresh_free();
        let x2 = h.fresh_free();
        let y = h.fresh_bound();
        h.add_atom(self.f.clone(), &[x1, x2, y])?;
        h.add_atom(u, &[y])?;
        Ok(h)
    }

    /// Closed form `R·diag(c, 1/c)·Rᵀ` of `g_c`.
    fn g_matrix(&self, c: &Scalar) -> Result<Transform2> {
        let s = (&self.a2 * c).inv_tol(GUARD)?;
        let top = &self.a2 * (&self.a2 * c * c + &self.b * &self.b) * &s;
        let off = &self.ab * &s;
        Ok(Transform2::new(top, off.clone(), off, s))
    }

    fn chain_g(&self, cs: &[Scalar]) -> Result<PpsHFormula> {
        chain(&cs.iter().map(|c| self.g(c)).collect::<Result<Vec<_>>>()?)
    }

    fn chain_matrix(&self, cs: &[Scalar]) -> Result<Transform2> {
        let mut m = Transform2::identity();
        for c in cs {
            m = m.mul(&self.g_matrix(c)?);
        }
        Ok(m)
    }

    fn matches(&self, cs: &[Scalar], scale: &Scalar, want: &Transform2) -> bool {
        match self.chain_matrix(cs) {
            Ok(m) => {
                let size = want.flat().iter().map(Scalar::abs).fold(1.0, f64::max);
                m.scale(scale).approx_eq(want, 1e-8 * size)
            }
            Err(_) => false,
        }
    }

    /// Parameters `c₁, c₂, …` with `g_{c₁}·g_{c₂}·… = diag(d, 1/d)`.
    fn k_direct(&self, d: &Scalar) -> Result<Option<Vec<Scalar>>> {
        let want = Transform2::diag(d.clone(), d.inv_tol(GUARD)?);
        let (a2, a4, b) = (&self.a2, &self.a4, &self.b);
        let mut candidates = Vec::new();
        match self.case {
            GhzCase::Generic => {
                let e = &self.ab * &self.ab;
                let root = (int(1) - int(4) * (&e + int(1)) * d * d).sqrt();
                for sgn in [1, -1] {
                    let psq = -div(&(int(2) * &e + int(1) + int(sgn) * &root), &(int(2) * a4))?;
                    let n1 = a4 * &psq + &e + int(1);
                    let n2 = a2 * &psq + b * b;
                    if !nz(&psq) || !nz(&n1) || !nz(&n2) {
                        continue;
                    }
                    let p = psq.sqrt();
                    let q = div(&(-(&e + int(1)) * &n1), &(a4 * a2 * &n2))?.sqrt();
                    if !nz(&q) {
                        continue;
                    }
                    candidates.push(vec![p.clone(), q.clone(), p.clone()]);
                    candidates.push(vec![p.clone(), -q, p]);
                }
            }
            GhzCase::Isotropic => {
                let outer = a2.inv_tol(GUARD)?;
                let inner = -(a2 * d).inv_tol(GUARD)?;
                candidates.push(vec![outer.clone(), inner, outer]);
            }
            GhzCase::HalfIsotropic => {
                let root = (int(1) - int(2) * d * d).sqrt();
                for sgn in [1, -1] {
                    let w = div(&(int(sgn) * &root - int(1)), &(int(2) * a2 * d))?;
                    let t = int(2) * a4 * &w * &w;
                    if !nz(&w) || !nz(&(&t - int(1))) || !nz(&(&t + int(1))) {
                        continue;
                    }
                    let v = div(&div(&(&t - int(1)), &(int(2) * (&t + int(1))))?.sqrt(), a2)?;
                    if nz(&v) {
                        candidates.push(vec![v.clone(), w, v]);
                    }
                }
            }
        }
        Ok(candidates.into_iter().find(|cs| self.matches(cs, &Scalar::one(), &want)))
    }

    /// `diag(d, 1/d)`, splitting `d = e·(d/e)` when `d` itself lands on an
    /// excluded value.
    fn k(&self, d: &Scalar) -> Result<PpsHFormula> {
        if let Some(cs) = self.k_direct(d)? {
            return self.chain_g(&cs);
        }
        for e in [int(2), int(3), Scalar::ratio(1, 2), int(-2), int(5), Scalar::ratio(2, 3), int(7)] {
            let rest = div(d, &e)?;
            if let (Some(c1), Some(c2)) = (self.k_direct(&e)?, self.k_direct(&rest)?) {
                return chain(&[self.chain_g(&c1)?, self.chain_g(&c2)?]);
            }
        }
        Err(HolantError::ParameterDegenerate(format!("no diagonal gadget found for d = {d}")))
    }
}

impl BinaryKit for GhzKit {
    fn neq(&self) -> Result<PpsHFormula> {
        let (a, a2, a4, b, ab) = (&self.a, &self.a2, &self.a4, &self.b, &self.ab);
        let e = ab * ab;
        let (cs, scale) = match self.case {
            GhzCase::Generic => {
                let s = div(&(Scalar::i() * b), a)? * div(&(int(2) * (&e + int(1))), &(int(2) * &e + int(1)))?.sqrt();
                let t = div(&(Scalar::i() * (&e + int(1))), &(a2 * a * b))?;
                (vec![s.clone(), t, s], -Scalar::i())
            }
            GhzCase::Isotropic => {
                // p, q with −2a⁴p² + p²/q² + 2 = 0.
                let (p, q) = if nz(&(a4 - int(1))) {
                    (int(1), (int(2) * a4 - int(2)).sqrt().inv_tol(GUARD)?)
                } else {
                    (div(&int(2), &(int(2) * a4 - int(1)))?.sqrt(), int(1))
                };
                let mid = a2.inv_tol(GUARD)?;
                (vec![p.clone(), q.clone(), mid, q, p], ab.clone())
            }
            GhzCase::HalfIsotropic => {
                let r = [int(1), int(2), Scalar::ratio(1, 2), int(3), Scalar::ratio(1, 3)]
                    .into_iter()
                    .find(|r| {
                        let t = int(2) * a4 * r * r;
                        nz(&(&t - int(1))) && nz(&(&t + int(1))) && nz(&(&t * &t + int(1)))
                    })
                    .ok_or_else(|| HolantError::ParameterDegenerate("no admissible r".into()))?;
                let t = int(2) * a4 * &r * &r;
                let s = div(&((&t + int(1)) * (&t - int(1))), &(int(2) * a4 * (&t * &t + int(1))))?.sqrt();
                let u = div(&(&t - int(1)), &(Scalar::sqrt2() * a2 * (&t + int(1))))?;
                (vec![s.clone(), r.clone(), u, r, s], Scalar::sqrt2() * ab)
            }
        };
        if !self.matches(&cs, &scale, &Transform2::x()) {
            return Err(HolantError::ParameterDegenerate("disequality gadget failed its closed-form check".into()));
        }
        scaled(&self.chain_g(&cs)?, &scale)
    }

    fn diag(&self, l: &Scalar, m: &Scalar) -> Result<PpsHFormula> {
        let d = div(l, m)?.sqrt();
        let sigma = div(l, &d)?;
        scaled(&self.k(&d)?, &sigma)
    }

    fn t(&self) -> Result<(PpsHFormula, Scalar)> {
        let (a, a2, b, ab) = (&self.a, &self.a2, &self.b, &self.ab);
        let (c, scale) = match self.case {
            GhzCase::Generic => (div(&(Scalar::i() * b), a)?, Scalar::i()),
            GhzCase::Isotropic => (a2.inv_tol(GUARD)?, -ab.clone()),
            GhzCase::HalfIsotropic => ((Scalar::sqrt2() * a2).inv_tol(GUARD)?, -(Scalar::sqrt2() * ab)),
        };
        let m = self.g_matrix(&c)?.scale(&scale);
        if nz(m.get(0, 0)) || !m.get(0, 1).approx_eq(&Scalar::one(), 1e-8) {
            return Err(HolantError::ParameterDegenerate("t gadget failed its closed-form check".into()));
        }
        Ok((scaled(&self.g(&c)?, &scale)?, m.get(1, 1).clone()))
    }
}

/// `(a, b)` with `f = (a b; 0 1/a)∘EQ₃`. Any cube root of `1/f(1,1,1)`
/// works for `a`; `b` follows from `f(0,1,1) = b/a²`.
pub fn ghz_parameters(f: &Signature, tol: f64) -> Result<(Scalar, Scalar)> {
    if f.arity() != 3 {
        return Err(HolantError::ArityMismatch(format!("expected a ternary function, got arity {}", f.arity())));
    }
    let last = f.at(7);
    if last.is_zero_tol(tol) {
        return Err(HolantError::PreconditionViolated("f(1,1,1) must be nonzero".into()));
    }
    let a = cube_root(&last.inv_tol(tol)?);
    let b = f.at(3) * &a * &a;
    if a.is_zero_tol(tol) || b.is_zero_tol(tol) {
        return Err(HolantError::PreconditionViolated("a and b must be nonzero".into()));
    }
    let r = Transform2::new(a.clone(), b.clone(), Scalar::zero(), a.inv_tol(tol)?);
    let back = Signature::eq(3).holo(&r);
    let ok = if back.is_exact() && f.is_exact() { &back == f } else { back.residual(f) <= 1e-8 * f.max_abs().max(1.0) };
    if !ok {
        return Err(HolantError::PreconditionViolated("f is not (a b; 0 1/a)∘EQ3".into()));
    }
    Ok((a, b))
}

/// A recipe over `{f}` and unary functions realizing `target`.
pub fn binary_from_ghz(f: &Signature, target: &Signature, tol: f64) -> Result<GadgetRecipe> {
    let (a, b) = ghz_parameters(f, tol)?;
    let kit = GhzKit::new(f.clone(), a.clone(), b.clone());
    let formula = compose(&kit, target, tol)?;
    let case = match kit.case {
        GhzCase::Generic => "generic",
        GhzCase::Isotropic => "a2b2=-1",
        GhzCase::HalfIsotropic => "2a2b2=-1",
    };
    let prov = Provenance::new(&format!("binary from GHZ-type ternary ({case})")).with("a", &a).with("b", &b);
    GadgetRecipe::verified(formula, target.clone(), prov)
}

struct PairKit {
    f: Signature,
    g: Signature,
    a: Scalar,
    b: Scalar,
    c: Scalar,
}

impl PairKit {
    /// `f_d = Σ_y f(·,·,y)·[1, d/a](y) = diag(1, d)`.
    fn fd(&self, d: &Scalar) -> Result<PpsHFormula> {
        let mut h = PpsHFormula::new();
        let x1 = h.fresh_free();
        let x2 = h.fresh_free();
        let y = h.fresh_bound();
        h.add_atom(self.f.clone(), &[x1, x2, y])?;
        h.add_atom(Signature::unary(Scalar::one(), div(d, &self.a)?), &[y])?;
        Ok(h)
    }

    fn g(&self) -> Result<PpsHFormula> {
        super::single(self.g.clone())
    }

    /// `h_s = g·f_s·g·f_t·g·f_s·g` and its closed-form entries `(x, y)`
    /// with `h_s = (0 x; x y)`; `None` on an excluded `s`.
    fn h(&self, s: &Scalar) -> Result<Option<(PpsHFormula, Scalar, Scalar)>> {
        let (b, c) = (&self.b, &self.c);
        let bs = b * b + s;
        let cs = c * s + b;
        if !nz(s) || !nz(&bs) || !nz(&cs) {
            return Ok(None);
        }
        let t = -div(&(&bs * &bs), &(&cs * &cs))?;
        let bc1 = b * c - int(1);
        let w = &bc1 * &bc1 * s;
        let x = -div(&(&bs * &w), &cs)?;
        let y = -div(
            &((b * b * c * c * s + int(2) * c * c * s * s + int(2) * b * c * s + int(2) * b * b + s) * &w),
            &(&cs * &cs),
        )?;
        let (g, fs) = (self.g()?, self.fd(s)?);
        let f = chain(&[g.clone(), fs.clone(), g.clone(), self.fd(&t)?, g.clone(), fs, g])?;
        Ok(Some((f, x, y)))
    }
}

impl BinaryKit for PairKit {
    fn neq(&self) -> Result<PpsHFormula> {
        let (b, c) = (&self.b, &self.c);
        let mut picks = Vec::new();
        if !nz(b) {
            picks.push((-(int(2) * c * c).inv_tol(GUARD)?, int(2) * c * c * c));
        } else if !nz(c) {
            picks.push((int(-2) * b * b, (int(-2) * b * b * b).inv_tol(GUARD)?));
        } else {
            let bc = b * c;
            let root = (&bc * &bc + int(6) * &bc + int(1)).sqrt();
            for sgn in [1, -1] {
                let sr = int(sgn) * &root;
                let s = -div(&((&bc + int(1)) * (&bc + int(1)) + &sr * (&bc - int(1))), &(int(4) * c * c))?;
                let bc1 = &bc - int(1);
                let den = (&bc + &sr - int(1)) * &bc1 * &bc1 * &s;
                if let Ok(k) = div(&((&bc + &sr + int(3)) * c), &den) {
                    picks.push((s, k));
                }
            }
        }
        for (s, kappa) in picks {
            if let Some((h, x, y)) = self.h(&s)? {
                if (&kappa * &x).approx_eq(&Scalar::one(), 1e-8) && !nz(&y) {
                    return scaled(&h, &kappa);
                }
            }
        }
        Err(HolantError::ParameterDegenerate("no disequality gadget for this pair".into()))
    }

    fn diag(&self, l: &Scalar, m: &Scalar) -> Result<PpsHFormula> {
        scaled(&self.fd(&div(m, l)?)?, l)
    }

    fn t(&self) -> Result<(PpsHFormula, Scalar)> {
        for s in [int(1), int(2), int(-1), int(3), Scalar::ratio(1, 2), int(-3), int(5)] {
            if let Some((h, x, y)) = self.h(&s)? {
                if nz(&x) && nz(&y) {
                    let xi = x.inv_tol(GUARD)?;
                    return Ok((scaled(&h, &xi)?, &y * &xi));
                }
            }
        }
        Err(HolantError::ParameterDegenerate("no t gadget for this pair".into()))
    }
}

/// A recipe over `{f = [1,0,0,a], g = [b,1,c]}` and unary functions
/// realizing `target`.
pub fn binary_from_tractable_pair(f: &Signature, g: &Signature, target: &Signature, tol: f64) -> Result<GadgetRecipe> {
    let bad = |m: &str| HolantError::PreconditionViolated(m.to_string());
    if f.arity() != 3 || g.arity() != 2 {
        return Err(bad("expected a ternary f and a binary g"));
    }
    let fv = f.values();
    if !fv[0].approx_eq(&Scalar::one(), tol) || fv[1..7].iter().any(|x| !x.is_zero_tol(tol)) || fv[7].is_zero_tol(tol) {
        return Err(bad("f must be [1,0,0,a] with a nonzero"));
    }
    let gv = g.values();
    if !gv[1].approx_eq(&Scalar::one(), tol) || !gv[2].approx_eq(&Scalar::one(), tol) {
        return Err(bad("g must be [b,1,c]"));
    }
    let (a, b, c) = (fv[7].clone(), gv[0].clone(), gv[3].clone());
    if b.is_zero_tol(tol) && c.is_zero_tol(tol) {
        return Err(bad("b and c are both zero"));
    }
    if (&b * &c - int(1)).is_zero_tol(tol) {
        return Err(bad("g is degenerate (bc = 1)"));
    }
    let kit = PairKit { f: f.clone(), g: g.clone(), a: a.clone(), b: b.clone(), c: c.clone() };
    let formula = compose(&kit, target, tol)?;
    let prov = Provenance::new("binary from tractable pair").with("a", &a).with("b", &b).with("c", &c);
    GadgetRecipe::verified(formula, target.clone(), prov)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r_eq3(a: Scalar, b: Scalar) -> Signature {
        let ai = a.inv().unwrap();
        Signature::eq(3).holo(&Transform2::new(a, b, Scalar::zero(), ai))
    }

    fn ok(r: &GadgetRecipe) {
        assert!(r.residual().unwrap() < 1e-6, "{}", r.residual().unwrap());
    }

    #[test]
    fn parameters_recovered() {
        let f = r_eq3(Scalar::int(2), Scalar::int(3));
        let (a, b) = ghz_parameters(&f, 1e-9).unwrap();
        assert_eq!((a, b), (Scalar::int(2), Scalar::int(3)));
        assert!(ghz_parameters(&Signature::one(3), 1e-9).is_err());
    }

    #[test]
    fn ghz_generic_neq() {
        let f = r_eq3(Scalar::one(), Scalar::one());
        let kit = GhzKit::new(f.clone(), Scalar::one(), Scalar::one());
        assert_eq!(kit.case, GhzCase::Generic);
        ok(&binary_from_ghz(&f, &Signature::neq(), 1e-9).unwrap());
        ok(&binary_from_ghz(&f, &Signature::from_ints(2, &[2, -1, 3, 5]).unwrap(), 1e-9).unwrap());
    }

    #[test]
    fn ghz_isotropic_and_half() {
        let f = r_eq3(Scalar::one(), Scalar::i());
        assert_eq!(GhzKit::new(f.clone(), Scalar::one(), Scalar::i()).case, GhzCase::Isotropic);
        let k5 = Signature::from_matrix(&Transform2::diag(Scalar::int(5), Scalar::ratio(1, 5)));
        ok(&binary_from_ghz(&f, &k5, 1e-9).unwrap());
        ok(&binary_from_ghz(&f, &Signature::from_ints(2, &[0, 3, 1, 4]).unwrap(), 1e-9).unwrap());

        let b = Scalar::i() * Scalar::inv_sqrt2();
        let f = r_eq3(Scalar::one(), b.clone());
        assert_eq!(GhzKit::new(f.clone(), Scalar::one(), b).case, GhzCase::HalfIsotropic);
        ok(&binary_from_ghz(&f, &Signature::neq(), 1e-9).unwrap());
        ok(&binary_from_ghz(&f, &Signature::from_ints(2, &[1, 2, 3, 4]).unwrap(), 1e-9).unwrap());
    }

    #[test]
    fn tractable_pair() {
        let f = Signature::symmetric_ints(&[1, 0, 0, 2]).unwrap();
        for (b, c) in [(0, 1), (1, 0), (2, 2)] {
            let g = Signature::symmetric_ints(&[b, 1, c]).unwrap();
            let r = binary_from_tractable_pair(&f, &g, &Signature::neq(), 1e-9).unwrap();
            ok(&r);
            ok(&binary_from_tractable_pair(&f, &g, &Signature::from_ints(2, &[3, 1, -2, 7]).unwrap(), 1e-9).unwrap());
        }
        let g = Signature::symmetric_ints(&[0, 1, 1]).unwrap();
        let r = binary_from_tractable_pair(&f, &g, &Signature::neq(), 1e-9).unwrap();
        assert_eq!(r.residual().unwrap(), 0.0);
        let g = Signature::symmetric_ints(&[1, 1, 1]).unwrap();
        assert!(matches!(
            binary_from_tractable_pair(&f, &g, &Signature::neq(), 1e-9),
            Err(HolantError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn degenerate_target() {
        let f = r_eq3(Scalar::one(), Scalar::one());
        ok(&binary_from_ghz(&f, &Signature::from_ints(2, &[1, 2, 2, 4]).unwrap(), 1e-9).unwrap());
    }
}
