//! Primitive-product-summation formulas with holant multiplicities.
//!
//! Free variables occur exactly once and bound variables exactly twice.
//! Such a formula is the same thing as a gadget: atoms are vertices, bound
//! variables are internal edges and free variables are dangling edges.

use std::collections::HashMap;

use serde_json::{json, Value};

use crate::error::{HolantError, Result};
use crate::evaluation::{self, EvalOptions};
use crate::grids::{Side, SignatureGrid};
use crate::signatures::{parse_function, signature_to_json, Signature};

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub sig: Signature,
    pub scope: Vec<usize>,
    /// One side per argument, or empty when the formula is unlabelled.
    pub labels: Vec<Side>,
}

/// Which multiplicity rules a formula satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Discipline {
    /// Free variables once, bound variables twice.
    PpsH,
    /// Anything else that is still a well-formed product-sum formula.
    General,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PpsHFormula {
    names: Vec<String>,
    pub free: Vec<usize>,
    pub bound: Vec<usize>,
    pub atoms: Vec<Atom>,
    /// Allowed label pairs for bound variables, as unordered pairs. `Some`
    /// marks the formula as labelled.
    pub allowed: Option<Vec<[Side; 2]>>,
}

fn pair(a: Side, b: Side) -> [Side; 2] {
    if a <= b {
        [a, b]
    } else {
        [b, a]
    }
}

/// `{{L, R}}`, the bipartite restriction.
pub fn bipartite_pairs() -> Vec<[Side; 2]> {
    vec![[Side::Left, Side::Right]]
}

impl PpsHFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn labelled(allowed: Vec<[Side; 2]>) -> Self {
        PpsHFormula { allowed: Some(allowed.into_iter().map(|[a, b]| pair(a, b)).collect()), ..Self::default() }
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn var_count(&self) -> usize {
        self.names.len()
    }

    fn intern(&mut self, name: &str) -> usize {
        if let Some(i) = self.names.iter().position(|n| n == name) {
            return i;
        }
        self.names.push(name.to_string());
        self.names.len() - 1
    }

    /// A fresh variable with a generated name.
    fn fresh(&mut self, prefix: &str) -> usize {
        let mut n = self.names.len();
        loop {
            let name = format!("{prefix}{n}");
            if !self.names.contains(&name) {
                self.names.push(name);
                return self.names.len() - 1;
            }
            n += 1;
        }
    }

    pub fn add_free(&mut self, name: &str) -> usize {
        let v = self.intern(name);
        self.free.push(v);
        v
    }

    pub fn add_bound(&mut self, name: &str) -> usize {
        let v = self.intern(name);
        self.bound.push(v);
        v
    }

    pub fn fresh_free(&mut self) -> usize {
        let v = self.fresh("x");
        self.free.push(v);
        v
    }

    pub fn fresh_bound(&mut self) -> usize {
        let v = self.fresh("y");
        self.bound.push(v);
        v
    }

    pub fn add_atom(&mut self, sig: Signature, scope: &[usize]) -> Result<()> {
        self.push_atom(sig, scope, Vec::new())
    }

    pub fn add_labelled_atom(&mut self, sig: Signature, scope: &[usize], labels: &[Side]) -> Result<()> {
        if labels.len() != scope.len() {
            return Err(HolantError::ArityMismatch(format!("{} labels for {} arguments", labels.len(), scope.len())));
        }
        self.push_atom(sig, scope, labels.to_vec())
    }

    fn push_atom(&mut self, sig: Signature, scope: &[usize], labels: Vec<Side>) -> Result<()> {
        if sig.arity() != scope.len() {
            return Err(HolantError::ArityMismatch(format!("arity {} with scope of length {}", sig.arity(), scope.len())));
        }
        if let Some(&v) = scope.iter().find(|&&v| v >= self.names.len()) {
            return Err(HolantError::IndexOutOfRange(format!("variable {v}")));
        }
        self.atoms.push(Atom { sig, scope: scope.to_vec(), labels });
        Ok(())
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        let mut m = vec![0; self.names.len()];
        for a in &self.atoms {
            for &v in &a.scope {
                m[v] += 1;
            }
        }
        m
    }

    /// Occurrences `(atom, argument)` of variable `v`.
    pub fn occurrences(&self, v: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, a) in self.atoms.iter().enumerate() {
            for (j, &w) in a.scope.iter().enumerate() {
                if w == v {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn discipline(&self) -> Discipline {
        if self.check().is_ok() {
            Discipline::PpsH
        } else {
            Discipline::General
        }
    }

    /// Verifies the multiplicity rules and, for labelled formulas, that each
    /// bound variable's two labels form an allowed pair.
    pub fn check(&self) -> Result<()> {
        let m = self.multiplicities();
        let mut role = vec![None; self.names.len()];
        for &v in &self.free {
            if role[v].replace("free").is_some() {
                return Err(HolantError::Validation(format!("variable {} declared twice", self.names[v])));
            }
            if m[v] != 1 {
                return Err(HolantError::Validation(format!("free variable {} occurs {} times", self.names[v], m[v])));
            }
        }
        for &v in &self.bound {
            if role[v].replace("bound").is_some() {
                return Err(HolantError::Validation(format!("variable {} declared twice", self.names[v])));
            }
            if m[v] != 2 {
                return Err(HolantError::Validation(format!("bound variable {} occurs {} times", self.names[v], m[v])));
            }
        }
        for (v, r) in role.iter().enumerate() {
            if r.is_none() && m[v] > 0 {
                return Err(HolantError::Validation(format!("variable {} is neither free nor bound", self.names[v])));
            }
        }
        if let Some(allowed) = &self.allowed {
            if self.atoms.iter().any(|a| a.labels.len() != a.scope.len()) {
                return Err(HolantError::LabelViolation("labelled formula has an unlabelled atom".into()));
            }
            for &v in &self.bound {
                let occ = self.occurrences(v);
                let l = pair(self.atoms[occ[0].0].labels[occ[0].1], self.atoms[occ[1].0].labels[occ[1].1]);
                if !allowed.contains(&l) {
                    return Err(HolantError::LabelViolation(format!(
                        "bound variable {} joins {} and {}",
                        self.names[v],
                        l[0].tag(),
                        l[1].tag()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Atoms become vertices (id = atom index), bound variables edges and
    /// free variables dangling ports in declaration order. A labelled
    /// formula whose atoms each carry a single side keeps that as the
    /// bipartition.
    pub fn to_gadget(&self) -> Result<SignatureGrid> {
        self.check()?;
        let mut g = SignatureGrid::new();
        for a in &self.atoms {
            g.add_vertex(a.sig.clone());
        }
        let mut first: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut free_port = HashMap::new();
        let is_free: Vec<bool> = {
            let mut f = vec![false; self.names.len()];
            for &v in &self.free {
                f[v] = true;
            }
            f
        };
        for (i, a) in self.atoms.iter().enumerate() {
            for (j, &v) in a.scope.iter().enumerate() {
                if is_free[v] {
                    free_port.insert(v, (i, j + 1));
                } else if let Some((u, s)) = first.remove(&v) {
                    g.add_edge(u, s, i, j + 1);
                } else {
                    first.insert(v, (i, j + 1));
                }
            }
        }
        for v in &self.free {
            let (u, s) = free_port[v];
            g.add_dangling(u, s);
        }
        if self.allowed.is_some() {
            let uniform: Option<Vec<Side>> = self
                .atoms
                .iter()
                .map(|a| a.labels.first().copied().filter(|&s| a.labels.iter().all(|&t| t == s)))
                .collect();
            if let Some(sides) = uniform {
                for (i, s) in sides.into_iter().enumerate() {
                    g.set_side(i, s);
                }
                if !g.validate().ok {
                    g.bipartition = None;
                }
            }
        }
        Ok(g)
    }

    /// Vertices become atoms, edges bound variables `e0, e1, …` and dangling
    /// ports free variables `x1, x2, …`. A bipartite grid yields a formula
    /// labelled by vertex side and restricted to L–R pairs.
    pub fn from_gadget(grid: &SignatureGrid) -> Result<Self> {
        grid.validate().into_result()?;
        let mut f = match grid.bipartition {
            Some(_) => PpsHFormula::labelled(bipartite_pairs()),
            None => PpsHFormula::new(),
        };
        let index = grid.index();
        let mut scopes: Vec<Vec<usize>> = grid.vertices.iter().map(|v| vec![usize::MAX; v.sig.arity()]).collect();
        for (i, p) in grid.dangling.iter().enumerate() {
            let x = f.add_free(&format!("x{}", i + 1));
            scopes[index[&p.vertex]][p.slot - 1] = x;
        }
        for (e, (a, b)) in grid.edges.iter().enumerate() {
            let y = f.add_bound(&format!("e{e}"));
            scopes[index[&a.vertex]][a.slot - 1] = y;
            scopes[index[&b.vertex]][b.slot - 1] = y;
        }
        for (v, scope) in grid.vertices.iter().zip(scopes) {
            match grid.side(v.id) {
                Some(s) => f.add_labelled_atom(v.sig.clone(), &scope, &vec![s; scope.len()])?,
                None => f.add_atom(v.sig.clone(), &scope)?,
            }
        }
        Ok(f)
    }

    /// The represented function, by gadget contraction.
    pub fn eval(&self) -> Result<Signature> {
        self.eval_with(&EvalOptions::default())
    }

    pub fn eval_with(&self, opts: &EvalOptions) -> Result<Signature> {
        evaluation::realize_gadget(&self.to_gadget()?, opts)
    }

    /// Direct summation over all bound assignments; at most `budget` bound
    /// variables.
    pub fn eval_brute(&self, budget: usize) -> Result<Signature> {
        self.check()?;
        if self.bound.len() > budget {
            return Err(HolantError::BudgetExceeded(format!("{} bound variables, budget {budget}", self.bound.len())));
        }
        let k = self.free.len();
        let nb = self.bound.len();
        let mut slot = vec![(false, 0usize); self.names.len()];
        for (i, &v) in self.free.iter().enumerate() {
            slot[v] = (true, i);
        }
        for (i, &v) in self.bound.iter().enumerate() {
            slot[v] = (false, i);
        }
        let mut values = Vec::with_capacity(1 << k);
        for x in 0..1usize << k {
            let mut acc = crate::numerics::Scalar::zero();
            'outer: for y in 0..1usize << nb {
                let mut prod = crate::numerics::Scalar::one();
                for a in &self.atoms {
                    let idx = a.scope.iter().fold(0, |acc, &v| {
                        let (is_free, i) = slot[v];
                        let b = if is_free { (x >> (k - 1 - i)) & 1 } else { (y >> i) & 1 };
                        (acc << 1) | b
                    });
                    let val = a.sig.at(idx);
                    if val.is_zero_tol(0.0) {
                        continue 'outer;
                    }
                    prod = prod * val;
                }
                acc = acc + prod;
            }
            values.push(acc);
        }
        Signature::new(k, values)
    }

    fn import(&mut self, other: &PpsHFormula) -> Vec<usize> {
        let remap: Vec<usize> = (0..other.names.len()).map(|v| self.fresh(&format!("{}_", other.names[v]))).collect();
        for a in &other.atoms {
            self.atoms.push(Atom {
                sig: a.sig.clone(),
                scope: a.scope.iter().map(|&v| remap[v]).collect(),
                labels: a.labels.clone(),
            });
        }
        self.bound.extend(other.bound.iter().map(|&v| remap[v]));
        remap
    }

    /// Formula for `f_a ⊗ f_b`: disjoint variables, `a`'s free ones first.
    pub fn tensor(a: &PpsHFormula, b: &PpsHFormula) -> Result<PpsHFormula> {
        let allowed = match (&a.allowed, &b.allowed) {
            (None, None) => None,
            (Some(x), Some(y)) if x == y => Some(x.clone()),
            _ => return Err(HolantError::LabelViolation("tensor of formulas with different restrictions".into())),
        };
        let mut out = PpsHFormula { allowed, ..Self::default() };
        let ra = out.import(a);
        let rb = out.import(b);
        out.free = a.free.iter().map(|&v| ra[v]).chain(b.free.iter().map(|&v| rb[v])).collect();
        Ok(out)
    }

    /// Reorders free variables so the result represents `f_π`.
    pub fn permute(&self, perm: &[usize]) -> Result<PpsHFormula> {
        let k = self.free.len();
        let mut seen = vec![false; k];
        if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
            return Err(HolantError::InvalidPermutation(format!("{perm:?} is not a permutation of 0..{k}")));
        }
        // Argument j of the old function reads new argument perm[j].
        let mut out = self.clone();
        for (j, &p) in perm.iter().enumerate() {
            out.free[p] = self.free[j];
        }
        Ok(out)
    }

    /// Identifies free arguments `i < j` (0-based) into one bound variable.
    pub fn contract(&self, i: usize, j: usize) -> Result<PpsHFormula> {
        let k = self.free.len();
        if i >= j || j >= k {
            return Err(HolantError::IndexOutOfRange(format!("contract({i}, {j}) on arity {k}")));
        }
        let (vi, vj) = (self.free[i], self.free[j]);
        let mut out = self.clone();
        for a in &mut out.atoms {
            for v in &mut a.scope {
                if *v == vj {
                    *v = vi;
                }
            }
        }
        out.free.retain(|&v| v != vi && v != vj);
        out.bound.push(vi);
        Ok(out)
    }

    /// Like [`contract`](Self::contract), but only when the two arguments'
    /// labels form an allowed pair.
    pub fn labelled_contract(&self, i: usize, j: usize) -> Result<PpsHFormula> {
        let allowed = self.allowed.as_ref().ok_or_else(|| HolantError::LabelViolation("formula is unlabelled".into()))?;
        let k = self.free.len();
        if i >= j || j >= k {
            return Err(HolantError::IndexOutOfRange(format!("contract({i}, {j}) on arity {k}")));
        }
        let label = |v: usize| -> Result<Side> {
            let (a, p) = *self.occurrences(v).first().ok_or_else(|| HolantError::Validation("unused free variable".into()))?;
            self.atoms[a].labels.get(p).copied().ok_or_else(|| HolantError::LabelViolation("unlabelled argument".into()))
        };
        let l = pair(label(self.free[i])?, label(self.free[j])?);
        if !allowed.contains(&l) {
            return Err(HolantError::LabelViolation(format!("cannot contract {} with {}", l[0].tag(), l[1].tag())));
        }
        self.contract(i, j)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |msg: String| HolantError::Parse { pos: 0, msg };
        let obj = v.as_object().ok_or_else(|| bad("formula must be an object".into()))?;
        let names = |key: &str| -> Result<Vec<String>> {
            match obj.get(key) {
                None => Ok(Vec::new()),
                Some(x) => x
                    .as_array()
                    .ok_or_else(|| bad(format!("\"{key}\" must be a list")))?
                    .iter()
                    .map(|n| n.as_str().map(str::to_string).ok_or_else(|| bad(format!("\"{key}\" entries must be strings"))))
                    .collect(),
            }
        };
        let allowed = match obj.get("labels").and_then(|l| l.get("allowed")) {
            None => None,
            Some(a) => {
                let pairs = a.as_array().ok_or_else(|| bad("labels.allowed must be a list".into()))?;
                let mut out = Vec::new();
                for p in pairs {
                    let s: Vec<Side> = p
                        .as_array()
                        .filter(|p| p.len() == 2)
                        .ok_or_else(|| bad("label pair must have two entries".into()))?
                        .iter()
                        .map(|t| t.as_str().and_then(Side::from_tag).ok_or_else(|| bad("label must be \"L\" or \"R\"".into())))
                        .collect::<Result<_>>()?;
                    out.push([s[0], s[1]]);
                }
                Some(out)
            }
        };
        let mut f = match allowed {
            Some(a) => PpsHFormula::labelled(a),
            None => PpsHFormula::new(),
        };
        for n in names("free")? {
            f.add_free(&n);
        }
        for n in names("bound")? {
            f.add_bound(&n);
        }
        let atoms = obj.get("atoms").and_then(Value::as_array).ok_or_else(|| bad("missing \"atoms\" list".into()))?;
        for (i, a) in atoms.iter().enumerate() {
            let sig = parse_function(a.get("fn").ok_or_else(|| bad(format!("atom {i}: missing \"fn\"")))?)?;
            let scope: Vec<usize> = a
                .get("scope")
                .and_then(Value::as_array)
                .ok_or_else(|| bad(format!("atom {i}: missing \"scope\"")))?
                .iter()
                .map(|n| {
                    let name = n.as_str().ok_or_else(|| bad(format!("atom {i}: scope entries must be strings")))?;
                    f.names.iter().position(|m| m == name).ok_or_else(|| bad(format!("atom {i}: undeclared variable {name}")))
                })
                .collect::<Result<_>>()?;
            match a.get("labels") {
                Some(ls) => {
                    let labels: Vec<Side> = ls
                        .as_array()
                        .ok_or_else(|| bad(format!("atom {i}: labels must be a list")))?
                        .iter()
                        .map(|t| t.as_str().and_then(Side::from_tag).ok_or_else(|| bad(format!("atom {i}: bad label"))))
                        .collect::<Result<_>>()?;
                    f.add_labelled_atom(sig, &scope, &labels)?;
                }
                None => f.add_atom(sig, &scope)?,
            }
        }
        Ok(f)
    }

    pub fn to_json(&self) -> Value {
        let names = |vs: &[usize]| vs.iter().map(|&v| self.names[v].clone()).collect::<Vec<_>>();
        let atoms: Vec<Value> = self
            .atoms
            .iter()
            .map(|a| {
                let mut o = json!({"fn": signature_to_json(&a.sig), "scope": names(&a.scope)});
                if !a.labels.is_empty() {
                    o["labels"] = a.labels.iter().map(|s| s.tag()).collect();
                }
                o
            })
            .collect();
        let mut out = json!({"free": names(&self.free), "bound": names(&self.bound), "atoms": atoms});
        if let Some(a) = &self.allowed {
            out["labels"] = json!({"allowed": a.iter().map(|p| [p[0].tag(), p[1].tag()]).collect::<Vec<_>>()});
        }
        out
    }
}
