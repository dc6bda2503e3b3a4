//! Partition-function laws checked against brute force on random grids.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use holant::evaluation::{holant_brute, holant_contract, plan_contraction, realize_gadget, realize_gadget_brute, EvalOptions, Order};
use holant::generators;
use holant::grids::SignatureGrid;
use holant::numerics::Scalar;
use holant::signatures::Signature;

const BUDGET: usize = 24;

fn z(g: &SignatureGrid) -> Scalar {
    holant_brute(g, BUDGET).unwrap()
}

fn small_grid(seed: u64) -> SignatureGrid {
    generators::closed_grid(&mut ChaCha8Rng::seed_from_u64(seed), 6, 9, 4, generators::signature)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn contraction_agrees_with_brute_force(seed in any::<u64>()) {
        let g = small_grid(seed);
        prop_assert_eq!(holant_contract(&g, None, 16).unwrap(), z(&g));
        let plan = plan_contraction(&g, Order::Exhaustive, 16).unwrap();
        prop_assert_eq!(holant_contract(&g, Some(&plan), 16).unwrap(), z(&g));
    }

    #[test]
    fn disjoint_union_multiplies(a in any::<u64>(), b in any::<u64>()) {
        let (g1, g2) = (small_grid(a), small_grid(b));
        let u = SignatureGrid::disjoint_union(&g1, &g2);
        prop_assert!(u.validate().ok);
        prop_assert_eq!(holant_contract(&u, None, 16).unwrap(), z(&g1) * z(&g2));
    }

    #[test]
    fn relabelling_and_reordering_do_not_change_z(seed in any::<u64>()) {
        let g = small_grid(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let mut ids: Vec<usize> = (0..g.vertices.len()).map(|i| 100 + 3 * i).collect();
        ids.shuffle(&mut rng);
        let map: std::collections::HashMap<usize, usize> = g.vertices.iter().map(|v| v.id).zip(ids).collect();
        let mut h = SignatureGrid::new();
        let mut order: Vec<usize> = (0..g.vertices.len()).collect();
        order.shuffle(&mut rng);
        for i in order {
            h.add_vertex_with_id(map[&g.vertices[i].id], g.vertices[i].sig.clone());
        }
        let mut edges = g.edges.clone();
        edges.shuffle(&mut rng);
        for (p, q) in edges {
            let (p, q) = if rng.gen_bool(0.5) { (p, q) } else { (q, p) };
            h.add_edge(map[&p.vertex], p.slot, map[&q.vertex], q.slot);
        }
        prop_assert_eq!(z(&h), z(&g));
    }

    #[test]
    fn subdividing_an_edge_with_an_equality_keeps_z(seed in any::<u64>()) {
        let g = small_grid(seed);
        prop_assume!(!g.edges.is_empty());
        let mut h = g.clone();
        let k = seed as usize % h.edges.len();
        let (p, q) = h.edges.remove(k);
        let mid = h.add_vertex(Signature::eq(2));
        h.add_edge(p.vertex, p.slot, mid, 1);
        h.add_edge(mid, 2, q.vertex, q.slot);
        prop_assert_eq!(z(&h), z(&g));
    }

    #[test]
    fn scaling_one_vertex_scales_z(seed in any::<u64>(), n in -5i64..=5, d in 1i64..=4) {
        let g = small_grid(seed);
        let c = Scalar::ratio(n, d);
        let mut h = g.clone();
        let v = seed as usize % h.vertices.len();
        h.vertices[v].sig = h.vertices[v].sig.scale(&c);
        prop_assert_eq!(z(&h), c * z(&g));
    }

    #[test]
    fn gadget_realization_agrees_with_brute_force(seed in any::<u64>()) {
        let mut g = small_grid(seed);
        // Cut up to two edges to leave dangling ports.
        let cut = (seed as usize % 3).min(g.edges.len());
        for _ in 0..cut {
            let (p, q) = g.edges.pop().unwrap();
            g.dangling.push(p);
            g.dangling.push(q);
        }
        let a = realize_gadget(&g, &EvalOptions::default()).unwrap();
        let b = realize_gadget_brute(&g, BUDGET).unwrap();
        prop_assert_eq!(a.arity(), g.dangling.len());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn gadget_closed_by_unaries_gives_the_expected_sum(seed in any::<u64>()) {
        let mut g = small_grid(seed);
        prop_assume!(!g.edges.is_empty());
        let (p, q) = g.edges.pop().unwrap();
        g.dangling = vec![p, q];
        let f = realize_gadget(&g, &EvalOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (u, w) = (generators::signature(&mut rng, 1), generators::signature(&mut rng, 1));
        let mut closed = g.clone();
        closed.dangling.clear();
        let a = closed.add_vertex(u.clone());
        let b = closed.add_vertex(w.clone());
        closed.add_edge(p.vertex, p.slot, a, 1);
        closed.add_edge(q.vertex, q.slot, b, 1);
        let expect = f.tensor(&u).tensor(&w).contract(0, 2).unwrap().contract(0, 1).unwrap();
        prop_assert_eq!(z(&closed), expect.values()[0].clone());
    }
}

#[test]
fn json_round_trip_keeps_the_grid() {
    for seed in 0..50 {
        let mut g = small_grid(seed);
        if let Some((p, q)) = g.edges.pop() {
            g.dangling.extend([p, q]);
        }
        let back = SignatureGrid::from_json(&g.to_json()).unwrap();
        assert!(back.validate().ok);
        assert_eq!(back.to_json(), g.to_json());
    }
}
