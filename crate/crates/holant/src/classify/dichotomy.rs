//! Deciding the four tractability conditions for a finite function set in
//! the conservative setting (all unary functions available).

use serde_json::{json, Value};

use super::ternary::recover_rank2;
use crate::error::Result;
use crate::numerics::Scalar;
use crate::signatures::{decompose_atoms, transform_to_json, Family, Signature, Transform2};

#[derive(Clone, Debug, PartialEq)]
pub enum OrthogonalCondition {
    Holds(Transform2),
    Fails,
    /// Every atom is unary or binary; the condition is not searched.
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KChoice {
    K1,
    K2,
}

impl KChoice {
    pub fn matrix(self) -> Transform2 {
        match self {
            KChoice::K1 => Transform2::k1(),
            KChoice::K2 => Transform2::k2(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            KChoice::K1 => "K1",
            KChoice::K2 => "K2",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    NotUniversal(Vec<String>),
    Universal,
    /// No condition was certified, but the orthogonal search relied on
    /// approximate arithmetic.
    UniversalModuloNumerics,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DichotomyReport {
    pub cond_t: bool,
    pub cond_oe: OrthogonalCondition,
    pub cond_ke: bool,
    pub cond_km: Vec<KChoice>,
    pub verdict: Verdict,
    /// Set when the orthogonal candidate came from approximate recovery.
    pub approximate: bool,
}

impl DichotomyReport {
    pub fn is_universal(&self) -> bool {
        !matches!(self.verdict, Verdict::NotUniversal(_))
    }

    pub fn to_json(&self) -> Value {
        let oe = match &self.cond_oe {
            OrthogonalCondition::Holds(o) => json!({"status": "holds", "O": transform_to_json(o)}),
            OrthogonalCondition::Fails => json!({"status": "fails"}),
            OrthogonalCondition::Undetermined => json!({"status": "undetermined"}),
        };
        let verdict = match &self.verdict {
            Verdict::NotUniversal(r) => json!({"kind": "NotUniversal", "reasons": r}),
            Verdict::Universal => json!({"kind": "Universal"}),
            Verdict::UniversalModuloNumerics => json!({"kind": "UniversalModuloNumerics"}),
        };
        json!({
            "cond_T": self.cond_t,
            "cond_OE": oe,
            "cond_KE": self.cond_ke,
            "cond_KM": self.cond_km.iter().map(|k| k.name()).collect::<Vec<_>>(),
            "verdict": verdict,
            "approximate": self.approximate,
        })
    }
}

/// `v·v` with the plain bilinear form.
fn dot(u: &[Scalar; 2], v: &[Scalar; 2]) -> Scalar {
    &u[0] * &v[0] + &u[1] * &v[1]
}

/// Real parts then imaginary parts of the flattened matrix.
fn sort_key(m: &Transform2) -> Vec<f64> {
    let z: Vec<_> = m.flat().iter().map(Scalar::to_c64).collect();
    z.iter().map(|c| c.re).chain(z.iter().map(|c| c.im)).collect()
}

fn all_in(atoms: &[Signature], family: Family, pre: Option<&Transform2>, tol: f64) -> Result<bool> {
    for a in atoms {
        if !a.in_family(family, pre, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Orthogonal candidates from the column pair of one arity-≥3 atom.
fn orthogonal_search(atoms: &[Signature], tol: f64) -> Result<(OrthogonalCondition, bool)> {
    let Some(big) = atoms.iter().find(|a| a.arity() >= 3) else {
        return Ok((OrthogonalCondition::Undetermined, false));
    };
    let Some(split) = recover_rank2(big, tol)? else {
        return Ok((OrthogonalCondition::Fails, false));
    };
    let mut approximate = !split.exact;
    let (c0, c1) = (&split.c0, &split.c1);
    let n0 = dot(c0, c0);
    let n1 = dot(c1, c1);
    if !dot(c0, c1).is_zero_tol(tol) || n0.is_zero_tol(tol) || n1.is_zero_tol(tol) {
        return Ok((OrthogonalCondition::Fails, approximate));
    }
    let r0 = n0.sqrt().inv_tol(tol)?;
    let r1 = n1.sqrt().inv_tol(tol)?;
    let o = Transform2::new(&c0[0] * &r0, &c1[0] * &r1, &c0[1] * &r0, &c1[1] * &r1);
    approximate |= !o.is_exact();
    let mut passing = Vec::new();
    for base in [o.clone(), o.mul(&Transform2::x())] {
        for (s0, s1) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let cand = base.mul(&Transform2::diag(Scalar::int(s0), Scalar::int(s1)));
            if all_in(atoms, Family::E, Some(&cand), tol)? {
                passing.push(cand);
            }
        }
    }
    // Largest flattened matrix first, so the identity beats its sign flips.
    passing.sort_by(|a, b| sort_key(b).partial_cmp(&sort_key(a)).unwrap_or(std::cmp::Ordering::Equal));
    Ok(match passing.into_iter().next() {
        Some(m) => (OrthogonalCondition::Holds(m), approximate),
        None => (OrthogonalCondition::Fails, approximate),
    })
}

/// Which tractability conditions hold for `fs` together with all unary
/// functions.
pub fn classify_set(fs: &[Signature], cap: usize, tol: f64) -> Result<DichotomyReport> {
    let mut atoms = Vec::new();
    for f in fs {
        let d = decompose_atoms(f, cap, tol)?;
        atoms.extend(d.atoms.into_iter().filter(|a| a.arity() >= 2));
    }
    let cond_t = atoms.iter().all(|a| a.arity() <= 2);
    let cond_ke = all_in(&atoms, Family::E, Some(&Transform2::k1()), tol)?;
    let mut cond_km = Vec::new();
    for k in [KChoice::K1, KChoice::K2] {
        if all_in(&atoms, Family::M, Some(&k.matrix()), tol)? {
            cond_km.push(k);
        }
    }
    let (cond_oe, approximate) = orthogonal_search(&atoms, tol)?;
    let mut reasons = Vec::new();
    if cond_t {
        reasons.push("every atom is unary or binary".to_string());
    }
    if let OrthogonalCondition::Holds(_) = cond_oe {
        reasons.push("orthogonal transform of generalised equalities".to_string());
    }
    if cond_ke {
        reasons.push("K1 transform of generalised equalities".to_string());
    }
    for k in &cond_km {
        reasons.push(format!("{} transform of generalised matchings", k.name()));
    }
    let verdict = if !reasons.is_empty() {
        Verdict::NotUniversal(reasons)
    } else if approximate {
        Verdict::UniversalModuloNumerics
    } else {
        Verdict::Universal
    };
    Ok(DichotomyReport { cond_t, cond_oe, cond_ke, cond_km, verdict, approximate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::DEFAULT_ARITY_CAP;

    fn report(fs: &[Signature]) -> DichotomyReport {
        classify_set(fs, DEFAULT_ARITY_CAP, 1e-9).unwrap()
    }

    #[test]
    fn fixtures() {
        let r = report(&[Signature::eq(2)]);
        assert!(r.cond_t && !r.is_universal());

        let r = report(&[Signature::eq(3)]);
        assert_eq!(r.cond_oe, OrthogonalCondition::Holds(Transform2::identity()));

        let r = report(&[Signature::eq(3).holo(&Transform2::k1())]);
        assert!(r.cond_ke);

        let r = report(&[Signature::one(3).holo(&Transform2::k1())]);
        assert_eq!(r.cond_km, vec![KChoice::K1]);
        assert!(!r.is_universal());

        assert_eq!(report(&[Signature::eq(3), Signature::one(3)]).verdict, Verdict::Universal);
        assert_eq!(report(&[Signature::one(3)]).verdict, Verdict::Universal);
        let md = Signature::symmetric_ints(&[1, 1, 0, 0]).unwrap();
        assert_eq!(report(&[md]).verdict, Verdict::Universal);
    }
}
