//! Seeded self-check suites shared by the command line and the test
//! targets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::Result;
use crate::evaluation::{holant_brute, holant_contract};
use crate::formulas::PpsHFormula;
use crate::generators;
use crate::signatures::{Family, Signature, Transform2};
use crate::synthesis::verify_appendix;

#[derive(Clone, Debug, PartialEq)]
pub struct CaseResult {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Largest residual seen; 0 for checks that compare exactly.
    pub max_residual: f64,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub cases: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(CaseResult::passed)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.name,
            "passed": self.passed(),
            "cases": self.cases.iter().map(|c| json!({
                "name": c.name,
                "trials": c.trials,
                "failures": c.failures,
                "max_residual": c.max_residual,
                "passed": c.passed(),
            })).collect::<Vec<_>>(),
        })
    }
}

pub const SUITE_NAMES: [&str; 3] = ["verify-identities", "oracle-equivalence", "closure-laws"];

pub fn run_suite(name: &str, seed: u64) -> Option<SuiteReport> {
    match name {
        "verify-identities" => Some(identities(50, seed)),
        "oracle-equivalence" => Some(oracle_equivalence(200, seed)),
        "closure-laws" => Some(closure_laws(100, seed)),
        _ => None,
    }
}

pub fn identities(draws: usize, seed: u64) -> SuiteReport {
    let r = verify_appendix(draws, seed);
    SuiteReport {
        name: "verify-identities".into(),
        cases: r
            .checks
            .into_iter()
            .map(|c| CaseResult {
                name: c.name,
                trials: c.draws,
                failures: usize::from(!c.passed),
                max_residual: c.max_residual,
            })
            .collect(),
    }
}

fn tally(name: &str, trials: usize, mut check: impl FnMut(usize) -> Result<bool>) -> CaseResult {
    let failures = (0..trials).filter(|&t| !matches!(check(t), Ok(true))).count();
    CaseResult { name: name.into(), trials, failures, max_residual: 0.0 }
}

/// Contraction against brute force on random closed grids with at most 8
/// vertices, 12 edges and arity 4.
pub fn oracle_equivalence(count: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let case = tally("contract = brute", count, |_| {
        let g = generators::closed_grid(&mut rng, 8, 12, 4, generators::signature);
        Ok(holant_contract(&g, None, 16)? == holant_brute(&g, 24)?)
    });
    SuiteReport { name: "oracle-equivalence".into(), cases: vec![case] }
}

fn atom_formula(f: Signature) -> Result<PpsHFormula> {
    let mut h = PpsHFormula::new();
    let xs: Vec<usize> = (0..f.arity()).map(|_| h.fresh_free()).collect();
    h.add_atom(f, &xs)?;
    Ok(h)
}

/// Random tensor/contract sequence over even-arity generators, mirrored on
/// signatures. Both sides must agree and the arity must stay even.
fn parity_case(rng: &mut ChaCha8Rng) -> Result<bool> {
    let k0 = 2 * rng.gen_range(1..=2);
    let mut sig = generators::signature(rng, k0);
    let mut h = atom_formula(sig.clone())?;
    for _ in 0..rng.gen_range(1..6) {
        let k = sig.arity();
        if k >= 2 && (k > 6 || rng.gen_bool(0.5)) {
            let i = rng.gen_range(0..k - 1);
            let j = rng.gen_range(i + 1..k);
            sig = sig.contract(i, j)?;
            h = h.contract(i, j)?;
        } else {
            let kg = 2 * rng.gen_range(0..=1);
            let g = generators::signature(rng, kg);
            h = PpsHFormula::tensor(&h, &atom_formula(g.clone())?)?;
            sig = sig.tensor(&g);
        }
    }
    let got = h.eval()?;
    Ok(got.arity() % 2 == 0 && got == sig)
}

/// `K∘f` contracted on two arguments equals `K` applied to `f` joined
/// through a `NEQ` on those arguments.
fn z_contraction_case(rng: &mut ChaCha8Rng) -> Result<bool> {
    let k = if rng.gen_bool(0.5) { Transform2::k1() } else { Transform2::k2() };
    let n = rng.gen_range(2..=4);
    let f = generators::signature(rng, n);
    let i = rng.gen_range(0..n - 1);
    let j = rng.gen_range(i + 1..n);
    let lhs = f.holo(&k).contract(i, j)?;
    let through = f.tensor(&Signature::neq()).contract(j, n + 1)?.contract(i, n - 1)?;
    Ok(lhs == through.holo(&k))
}

/// Joins two members on one argument each, directly or through a `NEQ`.
fn family_contraction_case(rng: &mut ChaCha8Rng, family: Family, via_neq: bool) -> Result<bool> {
    let member = |rng: &mut ChaCha8Rng, k: usize| match family {
        Family::E => generators::e_member(rng, k),
        _ => generators::m_member(rng, k),
    };
    let (a, b) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
    let f = member(rng, a);
    let g = member(rng, b);
    let i = rng.gen_range(0..a);
    let j = a + rng.gen_range(0..b);
    let mut t = f.tensor(&g);
    if via_neq {
        let n = t.arity();
        t = t.tensor(&Signature::neq()).contract(j, n)?;
        let last = t.arity() - 1;
        t = t.contract(i, last)?;
    } else {
        t = t.contract(i, j)?;
    }
    t.in_family(family, None, 0.0)
}

/// Contracts two arguments of a single matching-family member. (Joining two
/// different members by an equality can put a 1 on both sides, so that
/// case only closes through a `NEQ`.)
fn matching_self_contraction(rng: &mut ChaCha8Rng) -> Result<bool> {
    let k = rng.gen_range(2..=5);
    let f = generators::m_member(rng, k);
    let i = rng.gen_range(0..k - 1);
    let j = rng.gen_range(i + 1..k);
    f.contract(i, j)?.in_family(Family::M, None, 0.0)
}

/// Arity parity, holographic composition, the NEQ form of contraction under
/// `K`, and contraction closure of the equality and matching families.
pub fn closure_laws(count: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = vec![tally("even generators give even arity", count, |_| parity_case(&mut rng))];
    cases.push(tally("holo composition", count, |_| {
        let (a, b) = (generators::invertible(&mut rng), generators::invertible(&mut rng));
        let k = rng.gen_range(0..=4);
        let f = generators::signature(&mut rng, k);
        Ok(f.holo(&b).holo(&a) == f.holo(&a.mul(&b)))
    }));
    cases.push(tally("K contraction becomes NEQ", count, |_| z_contraction_case(&mut rng)));
    cases.push(tally("E closed under contraction", count, |_| family_contraction_case(&mut rng, Family::E, false)));
    cases.push(tally("M closed under self-contraction", count, |_| matching_self_contraction(&mut rng)));
    cases.push(tally("M closed under NEQ contraction", count, |_| family_contraction_case(&mut rng, Family::M, true)));
    SuiteReport { name: "closure-laws".into(), cases }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_and_repeat() {
        let a = oracle_equivalence(20, 1);
        assert!(a.passed(), "{:?}", a);
        assert_eq!(a, oracle_equivalence(20, 1));
        let c = closure_laws(30, 2);
        assert!(c.passed(), "{:?}", c);
        assert!(run_suite("nope", 0).is_none());
    }
}
