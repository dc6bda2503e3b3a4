//! Formulas for members of `M∘ℰ` over `{M∘𝒰, M∘EQ₃, M∘NEQ}` and for
//! members of `ℳ` over `(𝒟 ∪ {ONE₃, EQ₁}) | {NEQ}`.

use crate::error::{HolantError, Result};
use crate::formulas::{bipartite_pairs, PpsHFormula};
use crate::grids::Side;
use crate::numerics::Scalar;
use crate::signatures::{Signature, Transform2};

use super::{constant, single, GadgetRecipe, Provenance};

/// `EQ₃` chain for the support `{a, ā}`, with a `NEQ` in front of every
/// position where `a` has a one.
fn equality_formula(base: &Signature, tol: f64) -> Result<PpsHFormula> {
    let n = base.arity();
    let full = (1usize << n) - 1;
    let a = base.support(tol).first().copied().unwrap_or(0);
    match n {
        0 => return constant(base.at(0)),
        1 => return single(base.clone()),
        _ => {}
    }
    let mut h = PpsHFormula::new();
    let xs: Vec<usize> = (0..n).map(|_| h.fresh_free()).collect();
    let mut zs = Vec::with_capacity(n);
    for (j, &x) in xs.iter().enumerate() {
        if (a >> (n - 1 - j)) & 1 == 1 {
            let z = h.fresh_bound();
            h.add_atom(Signature::neq(), &[x, z])?;
            zs.push(z);
        } else {
            zs.push(x);
        }
    }
    let ys: Vec<usize> = (0..n - 1).map(|_| h.fresh_bound()).collect();
    h.add_atom(Signature::eq(3), &[zs[0], zs[1], ys[0]])?;
    for k in 0..n - 2 {
        h.add_atom(Signature::eq(3), &[zs[k + 2], ys[k], ys[k + 1]])?;
    }
    h.add_atom(Signature::unary(base.at(a).clone(), base.at(full ^ a).clone()), &[ys[n - 2]])?;
    Ok(h)
}

/// Applies `M` to every atom. With `MᵀM = X` each internal edge would pick
/// up an `X`, so every bound variable is first routed through an `EQ₂`
/// built as `EQ₃` capped by `EQ₁`.
fn transform_formula(f: &PpsHFormula, m: &Transform2, twisted: bool) -> Result<PpsHFormula> {
    let mut out = f.clone();
    if twisted {
        for v in f.bound.clone() {
            let (atom, pos) = out.occurrences(v)[1];
            let v2 = out.fresh_bound();
            out.atoms[atom].scope[pos] = v2;
            let w = out.fresh_bound();
            out.add_atom(Signature::eq(3), &[v, v2, w])?;
            out.add_atom(Signature::eq(1), &[w])?;
        }
    }
    for a in &mut out.atoms {
        a.sig = a.sig.holo(m);
    }
    Ok(out)
}

/// A recipe for `f ∈ M∘ℰ` where `M` is orthogonal or one of `K1`, `K2`.
pub fn express_e(f: &Signature, m: &Transform2, tol: f64) -> Result<GadgetRecipe> {
    let gram = m.transpose().mul(m);
    let twisted = if gram.approx_eq(&Transform2::identity(), tol) {
        false
    } else if gram.approx_eq(&Transform2::x(), tol) {
        true
    } else {
        return Err(HolantError::PreconditionViolated("transform must be orthogonal, K1 or K2".into()));
    };
    let base = f.holo(&m.inverse_tol(tol)?);
    if !base.is_generalised_equality(tol) {
        return Err(HolantError::FamilyViolation("function is not a transformed generalised equality".into()));
    }
    let formula = transform_formula(&equality_formula(&base, tol)?, m, twisted)?;
    let a = base.support(tol).first().copied().unwrap_or(0);
    let prov = Provenance::new("generalised equality from EQ3, NEQ and unaries").with("pattern", &Scalar::int(a as i64));
    GadgetRecipe::verified(formula, f.clone(), prov)
}

fn disequality(p: &Scalar, q: &Scalar) -> Signature {
    Signature::new(2, vec![Scalar::zero(), p.clone(), q.clone(), Scalar::zero()]).expect("four values")
}

fn add(h: &mut PpsHFormula, sig: Signature, scope: &[usize], side: Side) -> Result<()> {
    h.add_labelled_atom(sig, scope, &vec![side; scope.len()])
}

/// A labelled recipe for `f ∈ ℳ`: left atoms from binary disequalities,
/// `ONE₃` and `EQ₁`, right atoms all `NEQ`.
pub fn express_m(f: &Signature, tol: f64) -> Result<GadgetRecipe> {
    if !f.is_generalised_matching(tol) {
        return Err(HolantError::FamilyViolation("function is not a generalised matching".into()));
    }
    let (l, r) = (Side::Left, Side::Right);
    let mut h = PpsHFormula::labelled(bipartite_pairs());
    let n = f.arity();
    match n {
        0 => {
            let v: Vec<usize> = (0..4).map(|_| h.fresh_bound()).collect();
            add(&mut h, Signature::eq(1), &[v[0]], l)?;
            add(&mut h, Signature::neq(), &[v[0], v[1]], r)?;
            add(&mut h, disequality(f.at(0), &Scalar::zero()), &[v[1], v[2]], l)?;
            add(&mut h, Signature::neq(), &[v[2], v[3]], r)?;
            add(&mut h, Signature::eq(1), &[v[3]], l)?;
        }
        1 => {
            let x = h.fresh_free();
            let y = h.fresh_bound();
            let z = h.fresh_bound();
            add(&mut h, disequality(f.at(0), f.at(1)), &[x, y], l)?;
            add(&mut h, Signature::neq(), &[y, z], r)?;
            add(&mut h, Signature::eq(1), &[z], l)?;
        }
        _ => {
            let xs: Vec<usize> = (0..n).map(|_| h.fresh_free()).collect();
            // ONE_{n+1} grown from ONE₃ one argument at a time.
            let mut zs: Vec<usize> = (0..3).map(|_| h.fresh_bound()).collect();
            add(&mut h, Signature::one(3), &zs, l)?;
            while zs.len() < n + 1 {
                let y = zs.pop().expect("nonempty");
                let z = h.fresh_bound();
                let p = h.fresh_bound();
                let q = h.fresh_bound();
                add(&mut h, Signature::neq(), &[y, z], r)?;
                add(&mut h, Signature::one(3), &[z, p, q], l)?;
                zs.push(p);
                zs.push(q);
            }
            for (j, &x) in xs.iter().enumerate() {
                let y = h.fresh_bound();
                add(&mut h, disequality(&Scalar::one(), f.at(1 << (n - 1 - j))), &[x, y], l)?;
                add(&mut h, Signature::neq(), &[y, zs[j]], r)?;
            }
            let w: Vec<usize> = (0..3).map(|_| h.fresh_bound()).collect();
            add(&mut h, Signature::neq(), &[zs[n], w[0]], r)?;
            add(&mut h, disequality(&Scalar::one(), f.at(0)), &[w[1], w[0]], l)?;
            add(&mut h, Signature::neq(), &[w[1], w[2]], r)?;
            add(&mut h, Signature::eq(1), &[w[2]], l)?;
        }
    }
    GadgetRecipe::verified(h, f.clone(), Provenance::new("generalised matching from ONE3, EQ1 and disequalities"))
}
