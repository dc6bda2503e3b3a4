//! Constructive gadgets: binary functions from a GHZ-type ternary, from a
//! tractable pair, symmetric GHZ functions from W-type ones, formulas for
//! family members from small generator sets, plus the 2×2 factorizations
//! these rely on and a numeric identity suite.

mod appendix;
mod binary;
mod express;
mod factor;
mod ghz;

use serde_json::{json, Value};

use crate::error::{HolantError, Result};
use crate::formulas::PpsHFormula;
use crate::numerics::{scalar_to_json, Scalar};
use crate::signatures::{signature_to_json, Signature};

pub use appendix::{verify_appendix, AppendixReport, IdentityCheck, APPENDIX_TOL};
pub use binary::{binary_from_ghz, binary_from_tractable_pair, ghz_parameters};
pub use express::{express_e, express_m};
pub use factor::{pldu, triangularize, unitary_completion, Factorization, TriangleSide};
pub use ghz::ghz_from_w;

/// Residual allowed when a recipe's parameters needed approximate roots.
pub const RECIPE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    /// Which construction produced the recipe.
    pub construction: String,
    pub params: Vec<(String, Scalar)>,
}

impl Provenance {
    pub fn new(construction: &str) -> Self {
        Provenance { construction: construction.to_string(), params: Vec::new() }
    }

    pub fn with(mut self, name: &str, v: &Scalar) -> Self {
        self.params.push((name.to_string(), v.clone()));
        self
    }
}

/// A formula together with the function it is claimed to realize.
#[derive(Clone, Debug, PartialEq)]
pub struct GadgetRecipe {
    pub formula: PpsHFormula,
    pub claimed: Signature,
    pub provenance: Provenance,
}

impl GadgetRecipe {
    /// Builds the recipe and checks that the formula evaluates to `claimed`.
    pub fn verified(formula: PpsHFormula, claimed: Signature, provenance: Provenance) -> Result<Self> {
        let r = GadgetRecipe { formula, claimed, provenance };
        let res = r.residual()?;
        if res > RECIPE_TOL * r.claimed.max_abs().max(1.0) {
            return Err(HolantError::Validation(format!(
                "{} realizes a different function (residual {res:e})",
                r.provenance.construction
            )));
        }
        Ok(r)
    }

    pub fn realize(&self) -> Result<Signature> {
        self.formula.eval()
    }

    /// Largest componentwise deviation between the realized and the claimed
    /// function; exactly zero for exact recipes that match.
    pub fn residual(&self) -> Result<f64> {
        let got = self.realize()?;
        if got.is_exact() && self.claimed.is_exact() {
            return Ok(if got == self.claimed { 0.0 } else { got.residual(&self.claimed).max(f64::MIN_POSITIVE) });
        }
        Ok(got.residual(&self.claimed))
    }

    pub fn to_json(&self) -> Value {
        let params: serde_json::Map<String, Value> =
            self.provenance.params.iter().map(|(k, v)| (k.clone(), scalar_to_json(v))).collect();
        json!({
            "formula": self.formula.to_json(),
            "claimed": signature_to_json(&self.claimed),
            "provenance": {"construction": self.provenance.construction, "params": params},
        })
    }
}

// Small formula combinators shared by the builders. Binary pieces always
// have exactly two free variables.

/// One atom whose arguments are all fresh free variables.
pub(crate) fn single(sig: Signature) -> Result<PpsHFormula> {
    let mut f = PpsHFormula::new();
    let vars: Vec<usize> = (0..sig.arity()).map(|_| f.fresh_free()).collect();
    f.add_atom(sig, &vars)?;
    Ok(f)
}

/// A closed formula with value `λ`, made of two unary atoms.
pub(crate) fn constant(lambda: &Scalar) -> Result<PpsHFormula> {
    let mut f = PpsHFormula::new();
    let y = f.fresh_bound();
    f.add_atom(Signature::unary(lambda.clone(), Scalar::zero()), &[y])?;
    f.add_atom(Signature::unary(Scalar::one(), Scalar::zero()), &[y])?;
    Ok(f)
}

pub(crate) fn scaled(f: &PpsHFormula, lambda: &Scalar) -> Result<PpsHFormula> {
    if lambda.is_one() {
        return Ok(f.clone());
    }
    PpsHFormula::tensor(f, &constant(lambda)?)
}

/// Matrix product of binary pieces, left to right.
pub(crate) fn chain(parts: &[PpsHFormula]) -> Result<PpsHFormula> {
    let (first, rest) = parts.split_first().ok_or_else(|| HolantError::Validation("empty chain".into()))?;
    let mut acc = first.clone();
    for p in rest {
        acc = PpsHFormula::tensor(&acc, p)?.contract(1, 2)?;
    }
    Ok(acc)
}

pub(crate) fn swapped(f: &PpsHFormula) -> Result<PpsHFormula> {
    f.permute(&[1, 0])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinators() {
        let a = single(Signature::from_ints(2, &[1, 2, 3, 4]).unwrap()).unwrap();
        let b = single(Signature::from_ints(2, &[0, 1, 1, 0]).unwrap()).unwrap();
        let ab = chain(&[a.clone(), b]).unwrap();
        assert_eq!(ab.eval().unwrap(), Signature::from_ints(2, &[2, 1, 4, 3]).unwrap());
        let s = scaled(&swapped(&a).unwrap(), &Scalar::int(3)).unwrap();
        assert_eq!(s.eval().unwrap(), Signature::from_ints(2, &[3, 9, 6, 12]).unwrap());
    }
}
