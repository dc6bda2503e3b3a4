//! Independent-set polynomials as holants of bipartite grids.

use std::collections::BTreeSet;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{HolantError, Result};
use crate::grids::{Side, SignatureGrid};
use crate::numerics::Scalar;
use crate::signatures::Signature;

/// Largest vertex count the exhaustive oracle accepts.
pub const BRUTE_VERTEX_CAP: usize = 24;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<BTreeSet<usize>>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        SimpleGraph { n, edges: Vec::new(), adj: vec![BTreeSet::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        if u >= self.n || v >= self.n {
            return Err(HolantError::IndexOutOfRange(format!("edge ({u},{v}) on {} vertices", self.n)));
        }
        if u == v {
            return Err(HolantError::Validation(format!("self-loop at {u}")));
        }
        if self.adj[u].contains(&v) {
            return Err(HolantError::Validation(format!("repeated edge ({u},{v})")));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        self.edges.push((u, v));
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// `{"n": int, "edges": [[u, v], ...]}`
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |msg: &str| HolantError::Parse { pos: 0, msg: msg.to_string() };
        let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| bad("missing integer \"n\""))? as usize;
        let mut g = Self::new(n);
        if let Some(es) = v.get("edges") {
            for e in es.as_array().ok_or_else(|| bad("\"edges\" must be a list"))? {
                let p = e.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("edge must be [u, v]"))?;
                let end = |x: &Value| x.as_u64().map(|u| u as usize).ok_or_else(|| bad("edge endpoints must be integers"));
                g.add_edge(end(&p[0])?, end(&p[1])?)?;
            }
        }
        Ok(g)
    }

    pub fn to_json(&self) -> Value {
        json!({"n": self.n, "edges": self.edges.iter().map(|&(u, v)| json!([u, v])).collect::<Vec<_>>()})
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| HolantError::Parse { pos: 0, msg: format!("{}: {e}", path.as_ref().display()) })?;
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| HolantError::Parse { pos: e.column(), msg: format!("line {}: {e}", e.line()) })?;
        Self::from_json(&v)
    }
}

/// Left: `EQ_{deg(v)+1}` per vertex. Right: the activity `[1, λ]` on each
/// vertex's extra port and `NAND` on each edge.
pub fn independent_set_grid(g: &SimpleGraph, lambda: &Scalar, cap: usize) -> Result<SignatureGrid> {
    if let Some(v) = (0..g.n).find(|&v| g.degree(v) + 1 > cap) {
        return Err(HolantError::DegreeTooLarge { degree: g.degree(v), cap: cap.saturating_sub(1) });
    }
    let mut out = SignatureGrid::new();
    let eqs: Vec<usize> = (0..g.n).map(|v| out.add_vertex(Signature::eq(g.degree(v) + 1))).collect();
    let mut next_slot = vec![2; g.n];
    for &e in &eqs {
        out.set_side(e, Side::Left);
        let u = out.add_vertex(Signature::activity(lambda.clone()));
        out.set_side(u, Side::Right);
        out.add_edge(e, 1, u, 1);
    }
    for &(a, b) in &g.edges {
        let w = out.add_vertex(Signature::nand());
        out.set_side(w, Side::Right);
        for (k, v) in [a, b].into_iter().enumerate() {
            out.add_edge(eqs[v], next_slot[v], w, k + 1);
            next_slot[v] += 1;
        }
    }
    Ok(out)
}

/// Number of independent sets of each size, by enumeration.
pub fn independent_set_counts(g: &SimpleGraph) -> Result<Vec<u64>> {
    if g.n > BRUTE_VERTEX_CAP {
        return Err(HolantError::BudgetExceeded(format!("{} vertices, cap {BRUTE_VERTEX_CAP}", g.n)));
    }
    let masks: Vec<u32> = (0..g.n).map(|v| g.adj[v].iter().fold(0u32, |m, &u| m | 1 << u)).collect();
    let mut counts = vec![0u64; g.n + 1];
    for s in 0u32..1 << g.n {
        let independent = (0..g.n).all(|v| s & (1 << v) == 0 || s & masks[v] == 0);
        if independent {
            counts[s.count_ones() as usize] += 1;
        }
    }
    Ok(counts)
}

/// `Σ_I λ^{|I|}` over the independent sets `I` of `g`.
pub fn independent_set_poly_brute(g: &SimpleGraph, lambda: &Scalar) -> Result<Scalar> {
    let counts = independent_set_counts(g)?;
    let mut acc = Scalar::zero();
    for c in counts.iter().rev() {
        acc = acc * lambda + Scalar::int(*c as i64);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::holant_brute;

    fn poly(coeffs: &[i64], l: &Scalar) -> Scalar {
        coeffs.iter().rev().fold(Scalar::zero(), |acc, c| acc * l + Scalar::int(*c))
    }

    #[test]
    fn small_graphs() {
        let l = Scalar::int(2);
        let edge = SimpleGraph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(independent_set_poly_brute(&edge, &l).unwrap(), Scalar::int(5));
        assert_eq!(holant_brute(&independent_set_grid(&edge, &l, 12).unwrap(), 24).unwrap(), Scalar::int(5));

        let l = Scalar::ratio(-1, 2);
        let tri = SimpleGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(independent_set_poly_brute(&tri, &l).unwrap(), poly(&[1, 3], &l));
        let empty = SimpleGraph::new(3);
        assert_eq!(independent_set_poly_brute(&empty, &l).unwrap(), poly(&[1, 3, 3, 1], &l));
        let p3 = SimpleGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(independent_set_counts(&p3).unwrap(), vec![1, 3, 1, 0]);
        let k4 = SimpleGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(independent_set_poly_brute(&k4, &l).unwrap(), poly(&[1, 4], &l));
        for g in [tri, empty, p3, k4] {
            let grid = independent_set_grid(&g, &l, 12).unwrap();
            assert!(grid.validate().ok);
            assert_eq!(holant_brute(&grid, 24).unwrap(), independent_set_poly_brute(&g, &l).unwrap());
        }
    }

    #[test]
    fn errors_and_json() {
        let star = SimpleGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(independent_set_grid(&star, &Scalar::one(), 3), Err(HolantError::DegreeTooLarge { degree: 3, cap: 2 }));
        assert!(SimpleGraph::from_edges(2, &[(0, 0)]).is_err());
        assert!(SimpleGraph::from_edges(2, &[(0, 1), (1, 0)]).is_err());
        assert_eq!(SimpleGraph::from_json(&star.to_json()).unwrap(), star);
        assert!(matches!(independent_set_counts(&SimpleGraph::new(25)), Err(HolantError::BudgetExceeded(_))));
    }
}
