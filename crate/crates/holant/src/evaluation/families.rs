//! Polynomial-time evaluators for grids over the tractable families.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use crate::error::{HolantError, Result};
use crate::grids::SignatureGrid;
use crate::numerics::Scalar;
use crate::signatures::{decompose_atoms, Signature, Transform2, DEFAULT_ARITY_CAP};

/// How a grid over a transformed equality family is normalised before the
/// parity solver runs.
#[derive(Clone, Debug, PartialEq)]
pub enum Strip {
    None,
    /// Vertex signatures are `O∘g` for an orthogonal `O`.
    Orthogonal(Transform2),
    /// Vertex signatures are `K∘g`; edges become disequalities.
    K(Transform2),
}

fn require_closed(grid: &SignatureGrid) -> Result<()> {
    grid.validate().into_result()?;
    if !grid.is_closed() {
        return Err(HolantError::Validation("family evaluators need a closed grid".into()));
    }
    Ok(())
}

fn fingerprint(f: &Signature) -> u64 {
    let mut h = DefaultHasher::new();
    f.arity().hash(&mut h);
    for v in f.values() {
        match v {
            Scalar::Exact(c) => c.hash(&mut h),
            // `+ 0.0` folds -0 into 0 so equal values hash alike.
            Scalar::Approx(z) => ((z.re + 0.0).to_bits(), (z.im + 0.0).to_bits()).hash(&mut h),
        }
    }
    h.finish()
}

/// The distinct signatures among `sigs` and, per input, the index of its
/// representative. Instances draw from a small signature set, so per-vertex
/// work is done once per distinct signature.
fn distinct<'a>(sigs: impl Iterator<Item = &'a Signature>) -> (Vec<&'a Signature>, Vec<usize>) {
    let mut reps: Vec<&Signature> = Vec::new();
    let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
    let class = sigs
        .map(|f| {
            let bucket = buckets.entry(fingerprint(f)).or_default();
            match bucket.iter().find(|&&r| reps[r] == f) {
                Some(&r) => r,
                None => {
                    reps.push(f);
                    bucket.push(reps.len() - 1);
                    reps.len() - 1
                }
            }
        })
        .collect();
    (reps, class)
}

/// `f` or `m∘f` for each distinct vertex signature, with the class map.
fn transformed(grid: &SignatureGrid, m: Option<&Transform2>) -> (Vec<Signature>, Vec<usize>) {
    let (reps, class) = distinct(grid.vertices.iter().map(|v| &v.sig));
    let sigs = reps
        .into_iter()
        .map(|f| match m {
            Some(m) => f.holo(m),
            None => f.clone(),
        })
        .collect();
    (sigs, class)
}

/// Splits every vertex into tensor atoms. Returns the product of the
/// collected scalars, the atoms, and for every edge its two endpoints as
/// `(atom, leg)`.
struct AtomGraph {
    scalar: Scalar,
    atoms: Vec<Signature>,
    ends: Vec<[(usize, usize); 2]>,
}

fn atom_graph(grid: &SignatureGrid, sigs: &[Signature], class: &[usize], tol: f64) -> Result<AtomGraph> {
    let index = grid.index();
    let decomposed = sigs.iter().map(|s| decompose_atoms(s, DEFAULT_ARITY_CAP, tol)).collect::<Result<Vec<_>>>()?;
    let mut uses = vec![0u32; sigs.len()];
    let mut atoms = Vec::new();
    // where[vertex][slot-1] = (atom, leg)
    let mut place: Vec<Vec<(usize, usize)>> = Vec::with_capacity(class.len());
    for &c in class {
        let d = &decomposed[c];
        uses[c] += 1;
        let mut w = vec![(0, 0); sigs[c].arity()];
        for (a, pos) in d.atoms.iter().zip(&d.placement) {
            let id = atoms.len();
            for (leg, &p) in pos.iter().enumerate() {
                w[p] = (id, leg);
            }
            atoms.push(a.clone());
        }
        place.push(w);
    }
    // One power per class: a running product over all vertices is quadratic
    // in the size of the exact result.
    let scalar = decomposed.iter().zip(&uses).fold(Scalar::one(), |acc, (d, &u)| &acc * &d.scalar.pow(u));
    let ends = grid
        .edges
        .iter()
        .map(|(a, b)| [place[index[&a.vertex]][a.slot - 1], place[index[&b.vertex]][b.slot - 1]])
        .collect();
    Ok(AtomGraph { scalar, atoms, ends })
}

/// Holant of a closed grid whose vertices factor into unary and binary
/// atoms. The atom graph is a union of paths and cycles, evaluated as
/// vector-matrix chains and traces.
pub fn holant_t(grid: &SignatureGrid, tol: f64) -> Result<Scalar> {
    require_closed(grid)?;
    let (sigs, class) = transformed(grid, None);
    let g = atom_graph(grid, &sigs, &class, tol)?;
    if let Some(a) = g.atoms.iter().find(|a| a.arity() > 2) {
        return Err(HolantError::FamilyViolation(format!("atom of arity {} is not unary or binary", a.arity())));
    }
    if g.scalar.is_zero_tol(0.0) {
        return Ok(Scalar::zero());
    }
    let n = g.atoms.len();
    // edge_at[atom][leg]
    let mut edge_at: Vec<[usize; 2]> = vec![[usize::MAX; 2]; n];
    for (e, ends) in g.ends.iter().enumerate() {
        for &(a, l) in ends {
            edge_at[a][l] = e;
        }
    }
    let other_end = |e: usize, from: (usize, usize)| -> (usize, usize) {
        let [p, q] = g.ends[e];
        if p == from {
            q
        } else {
            p
        }
    };
    let mut seen = vec![false; n];
    let mut z = g.scalar.clone();

    // Paths start at unary atoms.
    for start in 0..n {
        if seen[start] || g.atoms[start].arity() != 1 {
            continue;
        }
        seen[start] = true;
        let mut v = [g.atoms[start].at(0).clone(), g.atoms[start].at(1).clone()];
        let mut at = (start, 0);
        loop {
            let (b, leg) = other_end(edge_at[at.0][at.1], at);
            seen[b] = true;
            let f = &g.atoms[b];
            if f.arity() == 1 {
                z = &z * &(&v[0] * f.at(0) + &v[1] * f.at(1));
                break;
            }
            // entering through `leg`, leaving through the other one
            let m = |x: usize, y: usize| if leg == 0 { f.at(2 * x + y) } else { f.at(2 * y + x) };
            v = [&v[0] * m(0, 0) + &v[1] * m(1, 0), &v[0] * m(0, 1) + &v[1] * m(1, 1)];
            at = (b, 1 - leg);
        }
    }
    // What is left are cycles of binary atoms.
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let f = &g.atoms[start];
        let mut acc = Transform2::new(f.at(0).clone(), f.at(1).clone(), f.at(2).clone(), f.at(3).clone());
        let mut at = (start, 1);
        loop {
            let (b, leg) = other_end(edge_at[at.0][at.1], at);
            if b == start && leg == 0 {
                break;
            }
            seen[b] = true;
            let f = &g.atoms[b];
            let m = if leg == 0 {
                Transform2::new(f.at(0).clone(), f.at(1).clone(), f.at(2).clone(), f.at(3).clone())
            } else {
                Transform2::new(f.at(0).clone(), f.at(2).clone(), f.at(1).clone(), f.at(3).clone())
            };
            acc = acc.mul(&m);
            at = (b, 1 - leg);
        }
        z = &z * &(acc.get(0, 0) + acc.get(1, 1));
    }
    Ok(z)
}

/// Union-find over vertex states with parity labels.
struct ParityUf {
    parent: Vec<usize>,
    parity: Vec<u8>,
}

impl ParityUf {
    fn new(n: usize) -> Self {
        ParityUf { parent: (0..n).collect(), parity: vec![0; n] }
    }

    /// Root of `x` and the parity of `x` relative to it.
    fn find(&mut self, x: usize) -> (usize, u8) {
        let mut path = Vec::new();
        let mut cur = x;
        while self.parent[cur] != cur {
            path.push(cur);
            cur = self.parent[cur];
        }
        let root = cur;
        // compress from the top down
        for &v in path.iter().rev() {
            let p = self.parent[v];
            if p != root {
                self.parity[v] ^= self.parity[p];
            }
            self.parent[v] = root;
        }
        (root, self.parity[x])
    }

    /// Imposes `s_x ⊕ s_y = d`; false on contradiction.
    fn union(&mut self, x: usize, y: usize, d: u8) -> bool {
        let (rx, px) = self.find(x);
        let (ry, py) = self.find(y);
        if rx == ry {
            return px ^ py == d;
        }
        self.parent[ry] = rx;
        self.parity[ry] = px ^ py ^ d;
        true
    }
}

/// Holant of a closed grid over a (possibly transformed) generalised
/// equality family.
pub fn holant_e(grid: &SignatureGrid, strip: &Strip, tol: f64) -> Result<Scalar> {
    require_closed(grid)?;
    let (inv, neq) = match strip {
        Strip::None => (None, false),
        Strip::Orthogonal(o) => (Some(o.inverse_tol(tol)?), false),
        Strip::K(k) => (Some(k.inverse_tol(tol)?), true),
    };
    let n = grid.vertices.len();
    let mut z = Scalar::one();
    let mut pattern = vec![0usize; n];
    let mut weight: Vec<[Scalar; 2]> = Vec::with_capacity(n);
    let mut arity = vec![0usize; n];
    let (sigs, class) = transformed(grid, inv.as_ref());
    for (i, v) in grid.vertices.iter().enumerate() {
        let g = &sigs[class[i]];
        let k = g.arity();
        arity[i] = k;
        if k == 0 {
            z = &z * g.at(0);
            weight.push([Scalar::one(), Scalar::zero()]);
            continue;
        }
        if !g.is_generalised_equality(tol) {
            return Err(HolantError::FamilyViolation(format!("vertex {} is not a generalised equality", v.id)));
        }
        let full = (1usize << k) - 1;
        match g.support(tol).first() {
            None => return Ok(Scalar::zero()),
            Some(&a) => {
                pattern[i] = a;
                weight.push([g.at(a).clone(), g.at(full ^ a).clone()]);
            }
        }
    }
    let index = grid.index();
    let mut uf = ParityUf::new(n);
    let bit = |i: usize, slot: usize| ((pattern[i] >> (arity[i] - slot)) & 1) as u8;
    for (a, b) in &grid.edges {
        let (u, v) = (index[&a.vertex], index[&b.vertex]);
        let d = bit(u, a.slot) ^ bit(v, b.slot) ^ neq as u8;
        if !uf.union(u, v, d) {
            return Ok(Scalar::zero());
        }
    }
    // Per component: product over both global states.
    let mut comp: Vec<Option<[Scalar; 2]>> = vec![None; n];
    for i in 0..n {
        if arity[i] == 0 {
            continue;
        }
        let (r, p) = uf.find(i);
        let w = &weight[i];
        let entry = comp[r].get_or_insert_with(|| [Scalar::one(), Scalar::one()]);
        entry[0] = &entry[0] * &w[p as usize];
        entry[1] = &entry[1] * &w[1 - p as usize];
    }
    for c in comp.into_iter().flatten() {
        z = &z * &(&c[0] + &c[1]);
    }
    Ok(z)
}

/// Holant of a closed grid over `K∘ℳ`, `K ∈ {K₁, K₂}`.
///
/// After stripping `K`, every edge becomes a disequality, so exactly one of
/// its two half-edges carries a 1. Reading that as "the edge points at that
/// endpoint", nonzero terms are orientations with in-degree at most one.
pub fn holant_km(grid: &SignatureGrid, k: &Transform2, tol: f64) -> Result<Scalar> {
    require_closed(grid)?;
    let kinv = k.inverse_tol(tol)?;
    let (sigs, class) = transformed(grid, Some(&kinv));
    let g = atom_graph(grid, &sigs, &class, tol)?;
    if g.scalar.is_zero_tol(0.0) {
        return Ok(Scalar::zero());
    }
    if let Some(a) = g.atoms.iter().find(|a| !a.is_generalised_matching(tol)) {
        return Err(HolantError::FamilyViolation(format!("atom of arity {} is not a generalised matching", a.arity())));
    }
    let n = g.atoms.len();
    // adjacency: (edge, my leg)
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (e, ends) in g.ends.iter().enumerate() {
        for &(a, l) in ends {
            adj[a].push((e, l));
        }
    }
    let zero_val = |a: usize| g.atoms[a].at(0).clone();
    let leg_val = |a: usize, l: usize| g.atoms[a].at(1 << (g.atoms[a].arity() - 1 - l)).clone();
    let other = |e: usize, a: usize, l: usize| -> (usize, usize) {
        let [p, q] = g.ends[e];
        if p == (a, l) {
            q
        } else {
            p
        }
    };

    // Component sizes.
    let mut comp = vec![usize::MAX; n];
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        let c = comps.len();
        let mut stack = vec![s];
        comp[s] = c;
        let mut members = Vec::new();
        while let Some(v) = stack.pop() {
            members.push(v);
            for &(e, l) in &adj[v] {
                let (u, _) = other(e, v, l);
                if comp[u] == usize::MAX {
                    comp[u] = c;
                    stack.push(u);
                }
            }
        }
        comps.push(members);
    }
    let mut edges_in = vec![0usize; comps.len()];
    for ends in &g.ends {
        edges_in[comp[ends[0].0]] += 1;
    }
    for (c, members) in comps.iter().enumerate() {
        if edges_in[c] > members.len() {
            return Ok(Scalar::zero());
        }
    }

    // Leaf peeling. s0 = Π A over peeled children; s1 = weight where the
    // node takes exactly one child edge.
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; g.ends.len()];
    let mut s0 = vec![Scalar::one(); n];
    let mut s1 = vec![Scalar::zero(); n];
    let mut gone = vec![false; n];
    let mut queue: Vec<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    let mut z = g.scalar.clone();
    while let Some(v) = queue.pop() {
        if gone[v] || deg[v] != 1 {
            continue;
        }
        let &(e, l) = adj[v].iter().find(|(e, _)| !removed[*e]).expect("degree one");
        let a_v = &leg_val(v, l) * &s0[v];
        let b_v = &(&zero_val(v) * &s0[v]) + &s1[v];
        removed[e] = true;
        gone[v] = true;
        let (u, lu) = other(e, v, l);
        s1[u] = &(&s1[u] * &a_v) + &(&(&s0[u] * &leg_val(u, lu)) * &b_v);
        s0[u] = &s0[u] * &a_v;
        deg[u] -= 1;
        if deg[u] == 1 {
            queue.push(u);
        }
    }
    let mut done = vec![false; n];
    for v in 0..n {
        if gone[v] || done[v] {
            continue;
        }
        if deg[v] == 0 {
            // root of a tree component
            done[v] = true;
            z = &z * &(&(&zero_val(v) * &s0[v]) + &s1[v]);
            continue;
        }
        // v lies on the unique cycle of its component.
        let mut into = Scalar::one();
        let mut out_of = Scalar::one();
        let start = v;
        let &(e0, l0) = adj[v].iter().find(|(e, _)| !removed[*e]).unwrap();
        let (mut cur, mut entered, mut via) = (start, usize::MAX, (e0, l0));
        loop {
            done[cur] = true;
            let (e, lout) = via;
            let (next, lin) = other(e, cur, lout);
            // `cur` leaves through lout
            out_of = &out_of * &(&s0[cur] * &leg_val(cur, lout));
            if entered != usize::MAX {
                into = &into * &(&s0[cur] * &leg_val(cur, entered));
            }
            if next == start {
                into = &into * &(&s0[start] * &leg_val(start, lin));
                break;
            }
            entered = lin;
            cur = next;
            via = *adj[cur].iter().find(|(f, fl)| !removed[*f] && !(*f == e && *fl == lin)).unwrap();
        }
        z = &z * &(&into + &out_of);
    }
    Ok(z)
}
