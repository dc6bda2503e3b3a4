//! Holant values of closed grids and functions realized by gadgets.

mod contract;
mod dispatch;
mod families;

use crate::error::{HolantError, Result};
use crate::grids::SignatureGrid;
use crate::numerics::Scalar;
use crate::signatures::Signature;

pub use contract::{plan_contraction, ContractionPlan, Order, PlanStep};
pub use dispatch::{evaluate, Evaluation, Evaluator};
pub use families::{holant_e, holant_km, holant_t, Strip};

pub const DEFAULT_EDGE_BUDGET: usize = 24;
pub const DEFAULT_CONTRACTION_CAP: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalOptions {
    pub order: Order,
    /// Largest intermediate tensor arity allowed during contraction.
    pub cap: usize,
    /// Largest number of summed edges for brute-force paths.
    pub budget: usize,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { order: Order::Greedy, cap: DEFAULT_CONTRACTION_CAP, budget: DEFAULT_EDGE_BUDGET }
    }
}

struct Wiring {
    /// per vertex, per slot: edge index or `E + dangling index`
    legs: Vec<Vec<usize>>,
}

fn wiring(grid: &SignatureGrid) -> Wiring {
    let index = grid.index();
    let mut legs: Vec<Vec<usize>> = grid.vertices.iter().map(|v| vec![0; v.sig.arity()]).collect();
    for (e, (a, b)) in grid.edges.iter().enumerate() {
        legs[index[&a.vertex]][a.slot - 1] = e;
        legs[index[&b.vertex]][b.slot - 1] = e;
    }
    let m = grid.edges.len();
    for (d, p) in grid.dangling.iter().enumerate() {
        legs[index[&p.vertex]][p.slot - 1] = m + d;
    }
    Wiring { legs }
}

/// Sum over all assignments of the internal edges; `x` fixes the dangling
/// edges (bit `d` of `x`, most significant first).
fn brute_sum(grid: &SignatureGrid, w: &Wiring, x: usize) -> Scalar {
    let m = grid.edges.len();
    let k = grid.dangling.len();
    let mut acc = Scalar::zero();
    'outer: for y in 0..1usize << m {
        let mut prod = Scalar::one();
        for (v, legs) in grid.vertices.iter().zip(&w.legs) {
            let idx = legs.iter().fold(0, |acc, &l| {
                let b = if l < m { (y >> l) & 1 } else { (x >> (k - 1 - (l - m))) & 1 };
                (acc << 1) | b
            });
            let val = v.sig.at(idx);
            if val.is_zero_tol(0.0) {
                continue 'outer;
            }
            prod = prod * val;
        }
        acc = acc + prod;
    }
    acc
}

fn check_budget(grid: &SignatureGrid, budget: usize) -> Result<()> {
    if grid.edges.len() > budget {
        return Err(HolantError::BudgetExceeded(format!("{} edges, budget {budget}", grid.edges.len())));
    }
    Ok(())
}

/// Holant of a closed grid by summing over all `2^|E|` edge assignments.
pub fn holant_brute(grid: &SignatureGrid, budget: usize) -> Result<Scalar> {
    grid.validate().into_result()?;
    if !grid.is_closed() {
        return Err(HolantError::Validation("grid has dangling edges".into()));
    }
    check_budget(grid, budget)?;
    brute_sum(grid, &wiring(grid), 0).check_finite()
}

/// Function realized by a gadget, by brute force over internal edges.
pub fn realize_gadget_brute(grid: &SignatureGrid, budget: usize) -> Result<Signature> {
    grid.validate().into_result()?;
    check_budget(grid, budget)?;
    let w = wiring(grid);
    let k = grid.dangling.len();
    let values = (0..1usize << k).map(|x| brute_sum(grid, &w, x)).collect();
    Signature::new(k, values)
}

/// Function realized by a gadget, by pairwise contraction.
pub fn realize_gadget(grid: &SignatureGrid, opts: &EvalOptions) -> Result<Signature> {
    grid.validate().into_result()?;
    let plan = plan_contraction(grid, opts.order, opts.cap)?;
    contract::run_plan(grid, &plan, opts.cap)
}

/// Holant of a closed grid by contraction along `plan` (or a greedy plan).
pub fn holant_contract(grid: &SignatureGrid, plan: Option<&ContractionPlan>, cap: usize) -> Result<Scalar> {
    grid.validate().into_result()?;
    if !grid.is_closed() {
        return Err(HolantError::Validation("grid has dangling edges".into()));
    }
    let owned;
    let plan = match plan {
        Some(p) => p,
        None => {
            owned = plan_contraction(grid, Order::Greedy, cap)?;
            &owned
        }
    };
    let f = contract::run_plan(grid, plan, cap)?;
    f.at(0).clone().check_finite()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signatures::Transform2;

    fn closed(sigs: Vec<Signature>, edges: &[(usize, usize, usize, usize)]) -> SignatureGrid {
        let mut g = SignatureGrid::new();
        for s in sigs {
            g.add_vertex(s);
        }
        for &(a, sa, b, sb) in edges {
            g.add_edge(a, sa, b, sb);
        }
        g
    }

    fn all_evaluators(g: &SignatureGrid) -> Scalar {
        let b = holant_brute(g, 24).unwrap();
        assert_eq!(holant_contract(g, None, 16).unwrap(), b);
        let plan = plan_contraction(g, Order::Exhaustive, 16).unwrap();
        assert_eq!(holant_contract(g, Some(&plan), 16).unwrap(), b);
        b
    }

    #[test]
    fn brute_examples() {
        let g = closed(vec![Signature::eq(1), Signature::eq(1)], &[(0, 1, 1, 1)]);
        assert_eq!(all_evaluators(&g), Scalar::int(2));
        let g = closed(vec![Signature::neq(), Signature::neq()], &[(0, 1, 1, 1), (0, 2, 1, 2)]);
        assert_eq!(all_evaluators(&g), Scalar::int(2));
        let g = closed(vec![Signature::eq(2); 3], &[(0, 2, 1, 1), (1, 2, 2, 1), (2, 2, 0, 1)]);
        assert_eq!(all_evaluators(&g), Scalar::int(2));
    }

    #[test]
    fn gadget_examples() {
        let mut g = SignatureGrid::new();
        let v = g.add_vertex(Signature::eq(3));
        for s in 1..=3 {
            g.add_dangling(v, s);
        }
        assert_eq!(realize_gadget(&g, &EvalOptions::default()).unwrap(), Signature::eq(3));

        let mut g = SignatureGrid::new();
        let a = g.add_vertex(Signature::eq(3));
        let b = g.add_vertex(Signature::eq(3));
        g.add_edge(a, 3, b, 1);
        g.add_dangling(a, 1);
        g.add_dangling(a, 2);
        g.add_dangling(b, 2);
        g.add_dangling(b, 3);
        assert_eq!(realize_gadget(&g, &EvalOptions::default()).unwrap(), Signature::eq(4));
        assert_eq!(realize_gadget_brute(&g, 24).unwrap(), Signature::eq(4));
    }

    #[test]
    fn dangling_order_is_respected() {
        let mut g = SignatureGrid::new();
        let a = g.add_vertex(Signature::from_ints(2, &[1, 2, 3, 4]).unwrap());
        g.add_dangling(a, 2);
        g.add_dangling(a, 1);
        let want = Signature::from_ints(2, &[1, 3, 2, 4]).unwrap();
        assert_eq!(realize_gadget(&g, &EvalOptions::default()).unwrap(), want);
        assert_eq!(realize_gadget_brute(&g, 24).unwrap(), want);
    }

    #[test]
    fn long_path_and_cycle() {
        let n = 2000;
        let mut g = SignatureGrid::new();
        for _ in 0..n {
            g.add_vertex(Signature::eq(2));
        }
        for i in 0..n {
            g.add_edge(i, 2, (i + 1) % n, 1);
        }
        assert_eq!(holant_contract(&g, None, 16).unwrap(), Scalar::int(2));
        assert_eq!(holant_t(&g, 1e-9).unwrap(), Scalar::int(2));
        assert_eq!(holant_e(&g, &Strip::None, 1e-9).unwrap(), Scalar::int(2));
    }

    #[test]
    fn neq_cycles() {
        for n in 1..7 {
            let mut g = SignatureGrid::new();
            for _ in 0..n {
                g.add_vertex(Signature::neq());
            }
            for i in 0..n {
                g.add_edge(i, 2, (i + 1) % n, 1);
            }
            let want = Scalar::int(if n % 2 == 0 { 2 } else { 0 });
            assert_eq!(holant_t(&g, 1e-9).unwrap(), want);
            assert_eq!(holant_brute(&g, 24).unwrap(), want);
        }
    }

    #[test]
    fn nullary_vertex() {
        let g = closed(vec![Signature::nullary(Scalar::int(5))], &[]);
        assert_eq!(holant_t(&g, 1e-9).unwrap(), Scalar::int(5));
        assert_eq!(all_evaluators(&g), Scalar::int(5));
    }

    #[test]
    fn km_self_loop() {
        let k = Transform2::k1();
        let g = closed(vec![Signature::one(2).holo(&k)], &[(0, 1, 0, 2)]);
        assert_eq!(holant_km(&g, &k, 1e-9).unwrap(), holant_brute(&g, 24).unwrap());
    }

    #[test]
    fn budget_enforced() {
        let mut g = SignatureGrid::new();
        for _ in 0..30 {
            g.add_vertex(Signature::eq(2));
        }
        for i in 0..30 {
            g.add_edge(i, 2, (i + 1) % 30, 1);
        }
        assert!(matches!(holant_brute(&g, 24), Err(HolantError::BudgetExceeded(_))));
    }
}
