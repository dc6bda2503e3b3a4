//! Structural rewrites that leave the holant unchanged.

use std::collections::{BTreeMap, HashMap};

use crate::error::{HolantError, Result};
use crate::evaluation::{realize_gadget, EvalOptions};
use crate::grids::{Port, Side, SignatureGrid};
use crate::signatures::Signature;

use super::require_bipartite;

/// Replacement gadgets, each checked against the signature it stands for
/// when inserted.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GadgetMap {
    entries: Vec<(Signature, SignatureGrid)>,
}

impl GadgetMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `gadget` as a replacement for vertices carrying `sig`.
    /// Fails unless the gadget realizes `sig` (exactly for exact tables).
    pub fn insert(&mut self, sig: Signature, gadget: SignatureGrid, tol: f64) -> Result<()> {
        if gadget.dangling.len() != sig.arity() {
            return Err(HolantError::RuleInapplicable(format!(
                "gadget has {} dangling edges, signature arity {}",
                gadget.dangling.len(),
                sig.arity()
            )));
        }
        let got = realize_gadget(&gadget, &EvalOptions::default())?;
        if !got.approx_eq(&sig, tol) {
            return Err(HolantError::RuleInapplicable("gadget does not realize the signature it replaces".into()));
        }
        self.entries.push((sig, gadget));
        Ok(())
    }

    fn lookup(&self, sig: &Signature, tol: f64) -> Option<&SignatureGrid> {
        self.entries.iter().find(|(s, _)| s.arity() == sig.arity() && s.approx_eq(sig, tol)).map(|(_, g)| g)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Rule {
    /// Put an `EQ₂` vertex on every edge; originals go Left.
    Subdivide,
    /// Remove every Right vertex, all of which must be `EQ₂` with two
    /// internal edges.
    Unsubdivide,
    /// Use the existing sides (missing ones count as Left) and put an `EQ₂`
    /// of the opposite side on every edge joining equal sides.
    Bipartify,
    /// Drop the bipartition.
    Forget,
    /// Replace vertices by gadgets; the result carries no bipartition.
    Substitute(GadgetMap),
    /// Replace vertices by bipartite gadgets, keeping the grid bipartite.
    SubstituteBipartite(GadgetMap),
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Subdivide => "subdivide",
            Rule::Unsubdivide => "unsubdivide",
            Rule::Bipartify => "bipartify",
            Rule::Forget => "forget",
            Rule::Substitute(_) => "substitute",
            Rule::SubstituteBipartite(_) => "substitute-bipartite",
        }
    }
}

fn inapplicable(msg: impl Into<String>) -> HolantError {
    HolantError::RuleInapplicable(msg.into())
}

pub fn rewrite(grid: &SignatureGrid, rule: &Rule, tol: f64) -> Result<SignatureGrid> {
    match rule {
        Rule::Subdivide => {
            grid.validate().into_result()?;
            let mut out = grid.clone();
            out.bipartition = Some(grid.vertices.iter().map(|v| (v.id, Side::Left)).collect());
            subdivide_where(out, |_, _| Some(Side::Right))
        }
        Rule::Bipartify => {
            let mut out = grid.clone();
            out.bipartition = None;
            out.validate().into_result()?;
            let sides: BTreeMap<usize, Side> =
                grid.vertices.iter().map(|v| (v.id, grid.side(v.id).unwrap_or(Side::Left))).collect();
            out.bipartition = Some(sides.clone());
            subdivide_where(out, |a, b| (sides[&a.vertex] == sides[&b.vertex]).then(|| sides[&a.vertex].other()))
        }
        Rule::Unsubdivide => unsubdivide(grid),
        Rule::Forget => {
            grid.validate().into_result()?;
            let mut out = grid.clone();
            out.bipartition = None;
            Ok(out)
        }
        Rule::Substitute(map) => {
            grid.validate().into_result()?;
            substitute(grid, map, false, tol)
        }
        Rule::SubstituteBipartite(map) => {
            require_bipartite(grid)?;
            substitute(grid, map, true, tol)
        }
    }
}

/// Subdivides the edges for which `side` names a side for the new `EQ₂`.
fn subdivide_where(mut out: SignatureGrid, side: impl Fn(&Port, &Port) -> Option<Side>) -> Result<SignatureGrid> {
    let edges = std::mem::take(&mut out.edges);
    for (a, b) in edges {
        match side(&a, &b) {
            None => out.edges.push((a, b)),
            Some(s) => {
                let n = out.add_vertex(Signature::eq(2));
                out.set_side(n, s);
                out.add_edge(a.vertex, a.slot, n, 1);
                out.add_edge(n, 2, b.vertex, b.slot);
            }
        }
    }
    Ok(out)
}

fn unsubdivide(grid: &SignatureGrid) -> Result<SignatureGrid> {
    let bip = require_bipartite(grid).map_err(|e| inapplicable(e.to_string()))?;
    let removed: Vec<usize> = grid.vertices.iter().filter(|v| bip[&v.id] == Side::Right).map(|v| v.id).collect();
    for &id in &removed {
        if grid.vertex(id).expect("listed").sig != Signature::eq(2) {
            return Err(inapplicable(format!("right vertex {id} is not EQ2")));
        }
        if grid.dangling.iter().any(|p| p.vertex == id) {
            return Err(inapplicable(format!("right vertex {id} has a dangling edge")));
        }
    }
    let mut far: HashMap<Port, Port> = HashMap::new();
    for (a, b) in &grid.edges {
        far.insert(*a, *b);
        far.insert(*b, *a);
    }
    let mut out = SignatureGrid::new();
    for v in grid.vertices.iter().filter(|v| bip[&v.id] == Side::Left) {
        out.add_vertex_with_id(v.id, v.sig.clone());
    }
    out.edges = grid.edges.iter().filter(|(a, b)| bip[&a.vertex] == Side::Left && bip[&b.vertex] == Side::Left).copied().collect();
    for &id in &removed {
        out.edges.push((far[&Port::new(id, 1)], far[&Port::new(id, 2)]));
    }
    out.dangling = grid.dangling.clone();
    Ok(out)
}

fn substitute(grid: &SignatureGrid, map: &GadgetMap, bipartite: bool, tol: f64) -> Result<SignatureGrid> {
    let mut next = grid.vertices.iter().map(|v| v.id + 1).max().unwrap_or(0);
    let mut out = SignatureGrid::new();
    // Where each original port now lives.
    let mut moved: HashMap<Port, Port> = HashMap::new();
    for v in &grid.vertices {
        let side = grid.side(v.id);
        let Some(g) = map.lookup(&v.sig, tol) else {
            out.add_vertex_with_id(v.id, v.sig.clone());
            if let (true, Some(s)) = (bipartite, side) {
                out.set_side(v.id, s);
            }
            continue;
        };
        let flip = if bipartite { gadget_orientation(g, side.expect("bipartite grid"))? } else { false };
        let ids: HashMap<usize, usize> = g
            .vertices
            .iter()
            .map(|u| {
                next += 1;
                (u.id, next - 1)
            })
            .collect();
        for u in &g.vertices {
            out.add_vertex_with_id(ids[&u.id], u.sig.clone());
            if bipartite {
                let s = g.side(u.id).expect("checked by orientation");
                out.set_side(ids[&u.id], if flip { s.other() } else { s });
            }
        }
        for (a, b) in &g.edges {
            out.add_edge(ids[&a.vertex], a.slot, ids[&b.vertex], b.slot);
        }
        for (j, p) in g.dangling.iter().enumerate() {
            moved.insert(Port::new(v.id, j + 1), Port::new(ids[&p.vertex], p.slot));
        }
    }
    let place = |p: &Port| moved.get(p).copied().unwrap_or(*p);
    out.edges.extend(grid.edges.iter().map(|(a, b)| (place(a), place(b))));
    out.dangling = grid.dangling.iter().map(place).collect();
    Ok(out)
}

/// Whether the gadget's sides must be swapped to stand in for a vertex on
/// `side`. All dangling ports must sit on one side.
fn gadget_orientation(g: &SignatureGrid, side: Side) -> Result<bool> {
    if g.bipartition.is_none() {
        return Err(inapplicable("bipartite substitution needs a bipartite gadget"));
    }
    require_bipartite(g).map_err(|e| inapplicable(e.to_string()))?;
    let mut outer = None;
    for p in &g.dangling {
        let s = g.side(p.vertex).expect("validated");
        if outer.is_some_and(|o| o != s) {
            return Err(inapplicable("gadget has dangling edges on both sides"));
        }
        outer = Some(s);
    }
    Ok(outer.is_some_and(|o| o != side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::holant_brute;
    use crate::numerics::Scalar;

    fn sample() -> SignatureGrid {
        let mut g = SignatureGrid::new();
        let a = g.add_vertex(Signature::eq(4));
        let b = g.add_vertex(Signature::from_ints(2, &[1, 2, 3, 5]).unwrap());
        let c = g.add_vertex(Signature::from_ints(2, &[0, 1, 4, 1]).unwrap());
        g.add_edge(a, 1, b, 1);
        g.add_edge(b, 2, c, 1);
        g.add_edge(c, 2, a, 2);
        g.add_edge(a, 3, a, 4);
        g
    }

    fn z(g: &SignatureGrid) -> Scalar {
        holant_brute(g, 24).unwrap()
    }

    #[test]
    fn subdivide_round_trip() {
        let g = sample();
        let s = rewrite(&g, &Rule::Subdivide, 0.0).unwrap();
        assert!(s.validate().ok);
        assert_eq!(z(&s), z(&g));
        assert_eq!(rewrite(&s, &Rule::Unsubdivide, 0.0).unwrap(), g);
        assert!(matches!(rewrite(&g, &Rule::Unsubdivide, 0.0), Err(HolantError::RuleInapplicable(_))));
    }

    #[test]
    fn bipartify_pads_same_side_edges() {
        let mut g = sample();
        g.set_side(0, Side::Left);
        g.set_side(1, Side::Right);
        g.set_side(2, Side::Left);
        let b = rewrite(&g, &Rule::Bipartify, 0.0).unwrap();
        assert!(b.validate().ok);
        // c–a and the self-loop on a get padded.
        assert_eq!(b.vertices.len(), 5);
        assert_eq!(z(&b), z(&sample()));
        assert_eq!(rewrite(&b, &Rule::Forget, 0.0).unwrap().bipartition, None);
    }

    #[test]
    fn substitute_eq4() {
        let mut gad = SignatureGrid::new();
        let p = gad.add_vertex(Signature::eq(3));
        let q = gad.add_vertex(Signature::eq(3));
        gad.add_edge(p, 3, q, 1);
        gad.dangling = vec![Port::new(p, 1), Port::new(p, 2), Port::new(q, 2), Port::new(q, 3)];
        let mut map = GadgetMap::new();
        map.insert(Signature::eq(4), gad.clone(), 0.0).unwrap();
        let g = sample();
        let r = rewrite(&g, &Rule::Substitute(map), 0.0).unwrap();
        assert!(r.validate().ok);
        assert_eq!(r.vertices.len(), 4);
        assert_eq!(z(&r), z(&g));

        let mut bad = GadgetMap::new();
        assert!(bad.insert(Signature::neq().tensor(&Signature::eq(2)), gad, 0.0).is_err());
    }

    #[test]
    fn substitute_bipartite_keeps_sides() {
        let g = rewrite(&sample(), &Rule::Subdivide, 0.0).unwrap();
        // EQ₄ on the left as EQ₃ –EQ₂– EQ₃.
        let mut gad = SignatureGrid::new();
        let p = gad.add_vertex(Signature::eq(3));
        let m = gad.add_vertex(Signature::eq(2));
        let q = gad.add_vertex(Signature::eq(3));
        gad.add_edge(p, 3, m, 1);
        gad.add_edge(m, 2, q, 1);
        gad.dangling = vec![Port::new(p, 1), Port::new(p, 2), Port::new(q, 2), Port::new(q, 3)];
        for (v, s) in [(p, Side::Left), (m, Side::Right), (q, Side::Left)] {
            gad.set_side(v, s);
        }
        let mut map = GadgetMap::new();
        map.insert(Signature::eq(4), gad, 0.0).unwrap();
        let r = rewrite(&g, &Rule::SubstituteBipartite(map), 0.0).unwrap();
        assert!(r.validate().ok);
        assert!(r.bipartition.is_some());
        assert_eq!(z(&r), z(&g));
    }
}
