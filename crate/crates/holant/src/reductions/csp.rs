//! Counting CSP instances and their holant encoding.

use serde_json::{json, Value};

use crate::error::{HolantError, Result};
use crate::grids::{Side, SignatureGrid};
use crate::numerics::Scalar;
use crate::signatures::{parse_function, signature_to_json, Signature};

/// Weighted constraints over Boolean variables `0..names.len()`. A scope may
/// repeat a variable.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CspInstance {
    pub names: Vec<String>,
    pub constraints: Vec<(Signature, Vec<usize>)>,
}

impl CspInstance {
    pub fn new(vars: usize) -> Self {
        CspInstance { names: (0..vars).map(|i| format!("v{i}")).collect(), constraints: Vec::new() }
    }

    pub fn var_count(&self) -> usize {
        self.names.len()
    }

    pub fn add(&mut self, sig: Signature, scope: &[usize]) -> Result<()> {
        if scope.len() != sig.arity() {
            return Err(HolantError::ArityMismatch(format!("scope of length {} for arity {}", scope.len(), sig.arity())));
        }
        if let Some(&v) = scope.iter().find(|&&v| v >= self.names.len()) {
            return Err(HolantError::IndexOutOfRange(format!("variable {v}")));
        }
        self.constraints.push((sig, scope.to_vec()));
        Ok(())
    }

    /// Occurrence count per variable.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.names.len()];
        for (_, s) in &self.constraints {
            for &v in s {
                m[v] += 1;
            }
        }
        m
    }

    /// `{"variables": [names], "constraints": [{"fn": .., "scope": [names]}]}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |msg: String| HolantError::Parse { pos: 0, msg };
        let names: Vec<String> = v
            .get("variables")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing \"variables\" list".into()))?
            .iter()
            .map(|n| n.as_str().map(str::to_string).ok_or_else(|| bad("variable names must be strings".into())))
            .collect::<Result<_>>()?;
        let mut csp = CspInstance { names, constraints: Vec::new() };
        let cs = v.get("constraints").and_then(Value::as_array).ok_or_else(|| bad("missing \"constraints\" list".into()))?;
        for (i, c) in cs.iter().enumerate() {
            let sig = parse_function(c.get("fn").ok_or_else(|| bad(format!("constraint {i}: missing \"fn\"")))?)?;
            let scope = c
                .get("scope")
                .and_then(Value::as_array)
                .ok_or_else(|| bad(format!("constraint {i}: missing \"scope\"")))?
                .iter()
                .map(|n| {
                    let name = n.as_str().ok_or_else(|| bad(format!("constraint {i}: scope entries must be names")))?;
                    csp.names.iter().position(|x| x == name).ok_or_else(|| bad(format!("constraint {i}: unknown variable {name:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            csp.add(sig, &scope)?;
        }
        Ok(csp)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "variables": self.names,
            "constraints": self.constraints.iter().map(|(s, sc)| json!({
                "fn": signature_to_json(s),
                "scope": sc.iter().map(|&v| self.names[v].clone()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Constraint vertices on the left, one `EQ_m` per variable on the right,
/// where `m` is the variable's number of occurrences.
pub fn csp_to_grid(csp: &CspInstance) -> Result<SignatureGrid> {
    let mult = csp.multiplicities();
    if let Some(v) = mult.iter().position(|&m| m == 0) {
        return Err(HolantError::UnusedVariable(v));
    }
    let mut g = SignatureGrid::new();
    let cons: Vec<usize> = csp.constraints.iter().map(|(s, _)| g.add_vertex(s.clone())).collect();
    let vars: Vec<usize> = mult.iter().map(|&m| g.add_vertex(Signature::eq(m))).collect();
    for &c in &cons {
        g.set_side(c, Side::Left);
    }
    for &v in &vars {
        g.set_side(v, Side::Right);
    }
    let mut used = vec![0; mult.len()];
    for (c, (_, scope)) in cons.iter().zip(&csp.constraints) {
        for (j, &v) in scope.iter().enumerate() {
            used[v] += 1;
            g.add_edge(*c, j + 1, vars[v], used[v]);
        }
    }
    Ok(g)
}

/// The counting CSP value by enumerating all assignments.
pub fn csp_brute(csp: &CspInstance, budget: usize) -> Result<Scalar> {
    let n = csp.var_count();
    if n > budget {
        return Err(HolantError::BudgetExceeded(format!("{n} variables, budget {budget}")));
    }
    let mut total = Scalar::zero();
    for x in 0..1usize << n {
        let mut prod = Scalar::one();
        for (sig, scope) in &csp.constraints {
            let idx = scope.iter().fold(0, |acc, &v| (acc << 1) | ((x >> (n - 1 - v)) & 1));
            prod = prod * sig.at(idx);
            if prod.is_zero() {
                break;
            }
        }
        total = total + prod;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::holant_brute;

    #[test]
    fn repeated_variable() {
        let mut c = CspInstance::new(1);
        c.add(Signature::eq(2), &[0, 0]).unwrap();
        let g = csp_to_grid(&c).unwrap();
        assert_eq!(g.vertices.len(), 2);
        assert_eq!(holant_brute(&g, 24).unwrap(), Scalar::int(2));
        assert_eq!(csp_brute(&c, 24).unwrap(), Scalar::int(2));
    }

    #[test]
    fn weighted_triangle() {
        let w = Signature::from_ints(2, &[1, 1, 1, 3]).unwrap();
        let mut c = CspInstance::new(4);
        for (a, b) in [(0, 1), (1, 2), (2, 0)] {
            c.add(w.clone(), &[a, b]).unwrap();
        }
        c.add(Signature::unary(Scalar::int(2), Scalar::int(5)), &[3]).unwrap();
        let g = csp_to_grid(&c).unwrap();
        assert_eq!(g.vertex(g.vertices[4 + 3].id).unwrap().sig, Signature::eq(1));
        assert_eq!(holant_brute(&g, 24).unwrap(), csp_brute(&c, 24).unwrap());
        assert_eq!(CspInstance::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn unused_variable() {
        let mut c = CspInstance::new(2);
        c.add(Signature::eq(1), &[1]).unwrap();
        assert_eq!(csp_to_grid(&c), Err(HolantError::UnusedVariable(0)));
    }
}
