//! Sequential pairwise contraction of a grid viewed as a tensor network.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{HolantError, Result};
use crate::grids::SignatureGrid;
use crate::numerics::Scalar;
use crate::signatures::Signature;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Order {
    #[default]
    Greedy,
    /// Subset dynamic programming on networks of at most 12 tensors; larger
    /// networks fall back to greedy.
    Exhaustive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlanStep {
    pub left: usize,
    pub right: usize,
    /// Arity of the merged tensor.
    pub arity: usize,
}

/// Merge steps over tensor ids. The initial tensors are the grid's vertices
/// (ids `0..n` in vertex order); step `s` creates tensor `n + s`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ContractionPlan {
    pub steps: Vec<PlanStep>,
}

impl ContractionPlan {
    pub fn max_arity(&self) -> usize {
        self.steps.iter().map(|s| s.arity).max().unwrap_or(0)
    }
}

/// A dense tensor whose argument `j` is attached to leg label `legs[j]`.
#[derive(Clone, Debug)]
pub(crate) struct Tensor {
    pub legs: Vec<usize>,
    pub data: Signature,
}

impl Tensor {
    /// Sums out any label that occurs twice on this tensor.
    pub fn trace_loops(mut self) -> Tensor {
        loop {
            let mut found = None;
            'scan: for i in 0..self.legs.len() {
                for j in i + 1..self.legs.len() {
                    if self.legs[i] == self.legs[j] {
                        found = Some((i, j));
                        break 'scan;
                    }
                }
            }
            let Some((i, j)) = found else { return self };
            self.data = self.data.contract(i, j).expect("valid positions");
            self.legs.remove(j);
            self.legs.remove(i);
        }
    }
}

fn shared(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut s: Vec<usize> = a.iter().copied().filter(|l| b.contains(l)).collect();
    s.sort_unstable();
    s.dedup();
    s
}

/// Contracts `a` with `b` over every label they share. The result's legs
/// are `a`'s remaining legs followed by `b`'s.
pub(crate) fn merge(a: &Tensor, b: &Tensor) -> Tensor {
    let common = shared(&a.legs, &b.legs);
    let a_free: Vec<usize> = (0..a.legs.len()).filter(|&j| !common.contains(&a.legs[j])).collect();
    let b_free: Vec<usize> = (0..b.legs.len()).filter(|&j| !common.contains(&b.legs[j])).collect();
    let a_sh: Vec<usize> = common.iter().map(|l| a.legs.iter().position(|x| x == l).unwrap()).collect();
    let b_sh: Vec<usize> = common.iter().map(|l| b.legs.iter().position(|x| x == l).unwrap()).collect();
    let (ka, kb) = (a.legs.len(), b.legs.len());
    let (na, nb, ns) = (a_free.len(), b_free.len(), common.len());

    // Rows of A are indexed by (free, shared), of B by (shared, free).
    let mut am = vec![vec![Scalar::zero(); 1 << ns]; 1 << na];
    for x in 0..1usize << ka {
        let v = a.data.at(x);
        if v.is_zero_tol(0.0) {
            continue;
        }
        let f = a_free.iter().fold(0, |acc, &j| (acc << 1) | ((x >> (ka - 1 - j)) & 1));
        let s = a_sh.iter().fold(0, |acc, &j| (acc << 1) | ((x >> (ka - 1 - j)) & 1));
        am[f][s] = v.clone();
    }
    let mut bm = vec![vec![Scalar::zero(); 1 << nb]; 1 << ns];
    for x in 0..1usize << kb {
        let v = b.data.at(x);
        if v.is_zero_tol(0.0) {
            continue;
        }
        let f = b_free.iter().fold(0, |acc, &j| (acc << 1) | ((x >> (kb - 1 - j)) & 1));
        let s = b_sh.iter().fold(0, |acc, &j| (acc << 1) | ((x >> (kb - 1 - j)) & 1));
        bm[s][f] = v.clone();
    }
    let mut out = vec![Scalar::zero(); 1 << (na + nb)];
    for (fa, row) in am.iter().enumerate() {
        for (s, av) in row.iter().enumerate() {
            if av.is_zero_tol(0.0) {
                continue;
            }
            for (fb, bv) in bm[s].iter().enumerate() {
                if bv.is_zero_tol(0.0) {
                    continue;
                }
                let o = &mut out[(fa << nb) | fb];
                *o = &*o + &(av * bv);
            }
        }
    }
    let legs = a_free.iter().map(|&j| a.legs[j]).chain(b_free.iter().map(|&j| b.legs[j])).collect();
    Tensor { legs, data: Signature::new(na + nb, out).expect("sized") }
}

/// Initial tensors: edge `e` is label `e`, dangling port `d` is label
/// `edges + d`. Self-loops are traced immediately.
pub(crate) fn grid_tensors(grid: &SignatureGrid) -> Vec<Tensor> {
    let index = grid.index();
    let mut legs: Vec<Vec<usize>> = grid.vertices.iter().map(|v| vec![usize::MAX; v.sig.arity()]).collect();
    for (e, (a, b)) in grid.edges.iter().enumerate() {
        legs[index[&a.vertex]][a.slot - 1] = e;
        legs[index[&b.vertex]][b.slot - 1] = e;
    }
    let m = grid.edges.len();
    for (d, p) in grid.dangling.iter().enumerate() {
        legs[index[&p.vertex]][p.slot - 1] = m + d;
    }
    grid.vertices
        .iter()
        .zip(legs)
        .map(|(v, legs)| Tensor { legs, data: v.sig.clone() }.trace_loops())
        .collect()
}

fn result_arity(a: &[usize], b: &[usize]) -> usize {
    let s = shared(a, b).len();
    a.len() + b.len() - 2 * s
}

fn greedy_plan(legs: Vec<Vec<usize>>, cap: usize) -> Result<ContractionPlan> {
    let n = legs.len();
    let mut live: Vec<Option<Vec<usize>>> = legs.into_iter().map(Some).collect();
    let mut owner: HashMap<usize, Vec<usize>> = HashMap::new();
    for (t, ls) in live.iter().enumerate() {
        for &l in ls.as_ref().unwrap() {
            owner.entry(l).or_default().push(t);
        }
    }
    let mut heap = BinaryHeap::new();
    let push_pairs = |t: usize, live: &Vec<Option<Vec<usize>>>, owner: &HashMap<usize, Vec<usize>>, heap: &mut BinaryHeap<Reverse<(usize, usize, usize)>>| {
        let ls = live[t].as_ref().unwrap();
        for l in ls {
            for &u in &owner[l] {
                if u != t && live[u].is_some() {
                    let (lo, hi) = if u < t { (u, t) } else { (t, u) };
                    heap.push(Reverse((result_arity(ls, live[u].as_ref().unwrap()), lo, hi)));
                }
            }
        }
    };
    for t in 0..n {
        push_pairs(t, &live, &owner, &mut heap);
    }
    let mut plan = ContractionPlan::default();
    while let Some(Reverse((arity, lo, hi))) = heap.pop() {
        if live[lo].is_none() || live[hi].is_none() {
            continue;
        }
        if arity > cap {
            return Err(HolantError::CapExceeded { arity, cap });
        }
        let a = live[lo].take().unwrap();
        let b = live[hi].take().unwrap();
        let common = shared(&a, &b);
        let merged: Vec<usize> = a.iter().chain(&b).copied().filter(|l| !common.contains(l)).collect();
        let id = live.len();
        for l in &merged {
            for o in owner.get_mut(l).unwrap() {
                if *o == lo || *o == hi {
                    *o = id;
                }
            }
        }
        live.push(Some(merged));
        plan.steps.push(PlanStep { left: lo, right: hi, arity });
        push_pairs(id, &live, &owner, &mut heap);
    }
    // Disconnected pieces: outer products in id order.
    let rest: Vec<usize> = (0..live.len()).filter(|&t| live[t].is_some()).collect();
    if let Some((&first, others)) = rest.split_first() {
        let mut cur = first;
        for &t in others {
            let a = live[cur].take().unwrap();
            let b = live[t].take().unwrap();
            let arity = a.len() + b.len();
            if arity > cap {
                return Err(HolantError::CapExceeded { arity, cap });
            }
            let id = live.len();
            live.push(Some(a.into_iter().chain(b).collect()));
            plan.steps.push(PlanStep { left: cur, right: t, arity });
            cur = id;
        }
    }
    Ok(plan)
}

/// Minimises the summed size `Σ 2^arity` of intermediate tensors over all
/// binary contraction trees, subject to the arity cap.
fn exhaustive_plan(legs: Vec<Vec<usize>>, cap: usize) -> Result<ContractionPlan> {
    let n = legs.len();
    let full = (1usize << n) - 1;
    // open legs of a subset = labels occurring an odd number of times
    let mut open: Vec<Vec<usize>> = vec![Vec::new(); 1 << n];
    for s in 1..=full {
        let low = s.trailing_zeros() as usize;
        let rest = s & (s - 1);
        let mut v = open[rest].clone();
        for &l in &legs[low] {
            if let Some(p) = v.iter().position(|&x| x == l) {
                v.remove(p);
            } else {
                v.push(l);
            }
        }
        open[s] = v;
    }
    let mut cost = vec![f64::INFINITY; 1 << n];
    let mut split = vec![0usize; 1 << n];
    for i in 0..n {
        cost[1 << i] = 0.0;
    }
    for s in 1..=full {
        if s.count_ones() < 2 || open[s].len() > cap {
            continue;
        }
        let mut sub = (s - 1) & s;
        while sub > 0 {
            let other = s ^ sub;
            if sub < other {
                let c = cost[sub] + cost[other] + (open[s].len() as f64).exp2();
                if c < cost[s] {
                    cost[s] = c;
                    split[s] = sub;
                }
            }
            sub = (sub - 1) & s;
        }
    }
    if !cost[full].is_finite() {
        let arity = open.iter().map(Vec::len).max().unwrap_or(0);
        return Err(HolantError::CapExceeded { arity, cap });
    }
    let mut plan = ContractionPlan::default();
    fn emit(s: usize, split: &[usize], open: &[Vec<usize>], n: usize, plan: &mut ContractionPlan) -> usize {
        if s.count_ones() == 1 {
            return s.trailing_zeros() as usize;
        }
        let a = emit(split[s], split, open, n, plan);
        let b = emit(s ^ split[s], split, open, n, plan);
        plan.steps.push(PlanStep { left: a.min(b), right: a.max(b), arity: open[s].len() });
        n + plan.steps.len() - 1
    }
    if n > 1 {
        emit(full, &split, &open, n, &mut plan);
    }
    Ok(plan)
}

pub fn plan_contraction(grid: &SignatureGrid, order: Order, cap: usize) -> Result<ContractionPlan> {
    let legs: Vec<Vec<usize>> = grid_tensors(grid).into_iter().map(|t| t.legs).collect();
    if let Some(&a) = legs.iter().map(Vec::len).max().as_ref() {
        if a > cap {
            return Err(HolantError::CapExceeded { arity: a, cap });
        }
    }
    match order {
        Order::Exhaustive if legs.len() <= 12 => exhaustive_plan(legs, cap),
        _ => greedy_plan(legs, cap),
    }
}

/// Runs `plan` and returns the final tensor, permuted into dangling order.
pub(crate) fn run_plan(grid: &SignatureGrid, plan: &ContractionPlan, cap: usize) -> Result<Signature> {
    let mut ts: Vec<Option<Tensor>> = grid_tensors(grid).into_iter().map(Some).collect();
    let n = ts.len();
    if n == 0 {
        return Ok(Signature::nullary(Scalar::one()));
    }
    for (i, st) in plan.steps.iter().enumerate() {
        if st.arity > cap {
            return Err(HolantError::CapExceeded { arity: st.arity, cap });
        }
        let bad = || HolantError::Validation(format!("plan step {i} uses a consumed tensor"));
        let a = ts.get_mut(st.left).and_then(Option::take).ok_or_else(bad)?;
        let b = ts.get_mut(st.right).and_then(Option::take).ok_or_else(bad)?;
        let m = merge(&a, &b);
        if m.legs.len() != st.arity {
            return Err(HolantError::Validation(format!("plan step {i} predicts arity {}, got {}", st.arity, m.legs.len())));
        }
        ts.push(Some(m));
    }
    let mut rest: Vec<Tensor> = ts.into_iter().flatten().collect();
    if rest.len() != 1 {
        return Err(HolantError::Validation(format!("plan leaves {} tensors", rest.len())));
    }
    let t = rest.pop().unwrap();
    let m = grid.edges.len();
    if t.legs.iter().any(|&l| l < m) {
        return Err(HolantError::Validation("plan leaves an edge uncontracted".into()));
    }
    // t's argument j is dangling port legs[j] - m.
    let perm: Vec<usize> = t.legs.iter().map(|&l| l - m).collect();
    t.data.permute(&perm)
}
