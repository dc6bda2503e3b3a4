//! Choosing an evaluator for a closed grid.

use std::fmt;
use std::str::FromStr;

use crate::classify::{classify_set, OrthogonalCondition};
use crate::error::{HolantError, Result};
use crate::grids::SignatureGrid;
use crate::numerics::Scalar;
use crate::signatures::{Signature, Transform2, DEFAULT_ARITY_CAP};

use super::{holant_brute, holant_contract, holant_e, holant_km, holant_t, plan_contraction, EvalOptions, Strip};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Evaluator {
    Auto,
    Brute,
    Contract,
    T,
    E,
    Km,
}

impl FromStr for Evaluator {
    type Err = HolantError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => Evaluator::Auto,
            "brute" => Evaluator::Brute,
            "contract" => Evaluator::Contract,
            "T" | "t" => Evaluator::T,
            "E" | "e" => Evaluator::E,
            "KM" | "km" => Evaluator::Km,
            _ => return Err(HolantError::Validation(format!("unknown evaluator {s:?}"))),
        })
    }
}

impl fmt::Display for Evaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Evaluator::Auto => "auto",
            Evaluator::Brute => "brute",
            Evaluator::Contract => "contract",
            Evaluator::T => "T",
            Evaluator::E => "E",
            Evaluator::Km => "KM",
        })
    }
}

/// The value of a closed grid and a label naming how it was computed.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub value: Scalar,
    pub evaluator: String,
}

fn distinct_signatures(grid: &SignatureGrid) -> Vec<Signature> {
    let mut out: Vec<Signature> = Vec::new();
    for v in &grid.vertices {
        if !out.contains(&v.sig) {
            out.push(v.sig.clone());
        }
    }
    out
}

/// Family evaluators certified by the classifier, most specific first.
fn candidates(grid: &SignatureGrid, tol: f64) -> Vec<(String, Strip, Evaluator)> {
    let sigs = distinct_signatures(grid);
    if sigs.iter().any(|s| s.arity() > DEFAULT_ARITY_CAP) {
        return Vec::new();
    }
    let Ok(report) = classify_set(&sigs, DEFAULT_ARITY_CAP, tol) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    if report.cond_t {
        out.push(("T".to_string(), Strip::None, Evaluator::T));
    }
    for k in &report.cond_km {
        out.push((format!("KM[{}]", k.name()), Strip::K(k.matrix()), Evaluator::Km));
    }
    if let OrthogonalCondition::Holds(o) = &report.cond_oe {
        let name = if o == &Transform2::identity() { "E".to_string() } else { "E[O]".to_string() };
        out.push((name, Strip::Orthogonal(o.clone()), Evaluator::E));
    }
    if report.cond_ke {
        out.push(("E[K1]".to_string(), Strip::K(Transform2::k1()), Evaluator::E));
    }
    out
}

fn run_family(grid: &SignatureGrid, strip: &Strip, ev: Evaluator, tol: f64) -> Result<Scalar> {
    match (ev, strip) {
        (Evaluator::T, _) => holant_t(grid, tol),
        (Evaluator::Km, Strip::K(k)) => holant_km(grid, k, tol),
        (Evaluator::E, s) => holant_e(grid, s, tol),
        _ => Err(HolantError::Validation(format!("evaluator {ev} needs a transform"))),
    }
}

/// Evaluates a closed grid. `Auto` tries the family evaluators the
/// classifier certifies, then contraction, then brute force. A forced
/// family evaluator tries each certified strip for that family, and
/// without a certificate runs untransformed (`KM` assumes `K1`).
pub fn evaluate(grid: &SignatureGrid, choice: Evaluator, opts: &EvalOptions, tol: f64) -> Result<Evaluation> {
    grid.validate().into_result()?;
    if !grid.is_closed() {
        return Err(HolantError::Validation("grid has dangling edges".into()));
    }
    let done = |value: Scalar, name: &str| Ok(Evaluation { value, evaluator: name.to_string() });
    match choice {
        Evaluator::Brute => done(holant_brute(grid, opts.budget)?, "brute"),
        Evaluator::Contract => {
            let plan = plan_contraction(grid, opts.order, opts.cap)?;
            done(holant_contract(grid, Some(&plan), opts.cap)?, "contract")
        }
        Evaluator::T | Evaluator::E | Evaluator::Km => {
            let mut last = None;
            for (name, strip, ev) in candidates(grid, tol).into_iter().filter(|c| c.2 == choice) {
                match run_family(grid, &strip, ev, tol) {
                    Ok(z) => return done(z, &name),
                    Err(e) => last = Some(e),
                }
            }
            if let Some(e) = last {
                return Err(e);
            }
            let fallback = match choice {
                Evaluator::Km => Strip::K(Transform2::k1()),
                _ => Strip::None,
            };
            done(run_family(grid, &fallback, choice, tol)?, &choice.to_string())
        }
        Evaluator::Auto => {
            for (name, strip, ev) in candidates(grid, tol) {
                if let Ok(z) = run_family(grid, &strip, ev, tol) {
                    return done(z, &name);
                }
            }
            match plan_contraction(grid, opts.order, opts.cap).and_then(|p| holant_contract(grid, Some(&p), opts.cap)) {
                Ok(z) => done(z, "contract"),
                Err(HolantError::CapExceeded { .. }) => done(holant_brute(grid, opts.budget)?, "brute"),
                Err(e) => Err(e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(sig: Signature, n: usize) -> SignatureGrid {
        let mut g = SignatureGrid::new();
        let ids: Vec<usize> = (0..n).map(|_| g.add_vertex(sig.clone())).collect();
        for i in 0..n {
            g.add_edge(ids[i], 2, ids[(i + 1) % n], 1);
        }
        g
    }

    #[test]
    fn auto_picks_a_family() {
        let opts = EvalOptions::default();
        let r = evaluate(&cycle(Signature::eq(2), 3), Evaluator::Auto, &opts, 1e-9).unwrap();
        assert_eq!(r.value, Scalar::int(2));
        assert_eq!(r.evaluator, "T");
        let f = Signature::one(2).holo(&Transform2::k1());
        let a = evaluate(&cycle(f.clone(), 4), Evaluator::Auto, &opts, 1e-9).unwrap();
        let b = evaluate(&cycle(f, 4), Evaluator::Brute, &opts, 1e-9).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!("km".parse::<Evaluator>().unwrap(), Evaluator::Km);
        assert!("nope".parse::<Evaluator>().is_err());
    }
}
