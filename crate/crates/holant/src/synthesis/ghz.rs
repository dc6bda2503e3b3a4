//! A symmetric GHZ-type ternary function from a W-type one, via the two
//! triangle gadgets.

use crate::classify::{classify_ternary, KChoice, TernaryTag};
use crate::error::{HolantError, Result};
use crate::formulas::PpsHFormula;
use crate::numerics::Scalar;
use crate::signatures::{decompose_atoms, Family, Signature, Transform2};

use super::{GadgetRecipe, Provenance};

/// `g'` for `A = (a b; c d)`: the triangle of `ONE₃` with `A` on every
/// internal edge.
fn triangle_of_one3(m: &Transform2) -> Result<Signature> {
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let three = Scalar::int(3);
    Signature::symmetric(&[
        b * b * b + c * c * c + &three * a * b * d + &three * a * c * d,
        a * b * b + a * b * c + a * c * c + a * a * d,
        a * a * b + a * a * c,
        a * a * a,
    ])
}

/// True when `s` lies in the holant clone of `K∘ℳ`, judged on its atoms.
fn in_k_matching(s: &Signature, k: KChoice, tol: f64) -> Result<bool> {
    let d = decompose_atoms(s, s.arity().max(1), tol)?;
    for a in &d.atoms {
        if !a.in_family(Family::M, Some(&k.matrix()), tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A gadget over `f` (and `s1` or `s2` when `f ∈ K_j∘ℳ`) realizing a
/// symmetric ternary function of GHZ type.
///
/// Outside `K1∘ℳ ∪ K2∘ℳ` the plain triangle is used and the binaries are
/// not consulted; inside `K_j∘ℳ` every triangle edge carries `s_j`, which
/// must then lie outside the clone of `K_j∘ℳ`.
pub fn ghz_from_w(f: &Signature, s1: &Signature, s2: &Signature, tol: f64) -> Result<GadgetRecipe> {
    let bad = |m: String| HolantError::PreconditionViolated(m);
    if f.arity() != 3 || s1.arity() != 2 || s2.arity() != 2 {
        return Err(bad("expected a ternary f and binary s1, s2".into()));
    }
    let class = classify_ternary(f, tol)?;
    if class.tag != TernaryTag::W {
        return Err(bad(format!("f is {}, not W", class.tag.name())));
    }
    let m = class.witness.ok_or_else(|| bad("no W witness found for f".into()))?;
    let mut edge = None;
    for (k, s) in [(KChoice::K1, s1), (KChoice::K2, s2)] {
        if f.in_family(Family::M, Some(&k.matrix()), tol)? {
            if in_k_matching(s, k, tol)? {
                return Err(bad(format!("f lies in {0}∘M but s does not leave the clone of {0}∘M", k.name())));
            }
            edge = Some((k, s.clone()));
            break;
        }
    }

    let mut h = PpsHFormula::new();
    let x: Vec<usize> = (0..3).map(|_| h.fresh_free()).collect();
    let y: Vec<usize> = (0..3).map(|_| h.fresh_bound()).collect();
    let (inner, prov) = match &edge {
        None => {
            h.add_atom(f.clone(), &[x[0], y[1], y[2]])?;
            h.add_atom(f.clone(), &[x[1], y[2], y[0]])?;
            h.add_atom(f.clone(), &[x[2], y[0], y[1]])?;
            (m.transpose().mul(&m), Provenance::new("GHZ from W, plain triangle"))
        }
        Some((k, s)) => {
            let z: Vec<usize> = (0..3).map(|_| h.fresh_bound()).collect();
            h.add_atom(f.clone(), &[x[0], y[1], z[2]])?;
            h.add_atom(f.clone(), &[x[1], y[2], z[0]])?;
            h.add_atom(f.clone(), &[x[2], y[0], z[1]])?;
            for j in 0..3 {
                h.add_atom(s.clone(), &[y[j], z[j]])?;
            }
            let sm = s.matrix_view()?;
            (m.transpose().mul(&sm).mul(&m), Provenance::new(&format!("GHZ from W, triangle with {} edges", k.name())))
        }
    };
    let claimed = triangle_of_one3(&inner)?.holo(&m);
    let (a, b, c, d) = (inner.get(0, 0), inner.get(0, 1), inner.get(1, 0), inner.get(1, 1));
    let prov = prov.with("a", a).with("b", b).with("c", c).with("d", d);
    let recipe = GadgetRecipe::verified(h, claimed, prov)?;
    let out = classify_ternary(&recipe.claimed, tol)?;
    if out.tag != TernaryTag::Ghz {
        return Err(HolantError::ParameterDegenerate(format!("triangle gadget produced a {} function", out.tag.name())));
    }
    Ok(recipe)
}
