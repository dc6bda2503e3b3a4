//! Grid reductions and rewrites keep the partition function. Values come
//! from tensor contraction, which `grid_properties` pins to brute force.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use holant::classify::KChoice;
use holant::evaluation::holant_contract;
use holant::generators;
use holant::grids::{Port, Side, SignatureGrid};
use holant::numerics::Scalar;
use holant::reductions::{
    csp_brute, csp_to_grid, independent_set_grid, independent_set_poly_brute, rewrite, strip_k, valiant_transform, GadgetMap,
    Rule,
};
use holant::signatures::Signature;

fn z(g: &SignatureGrid) -> Scalar {
    holant_contract(g, None, 16).unwrap()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_grid(r: &mut ChaCha8Rng) -> SignatureGrid {
    generators::closed_grid(r, 5, 7, 3, generators::signature)
}

/// `f` with every port passed through an `EQ₂` chain of `depth` links.
fn padded(f: &Signature, depth: usize, bipartite: bool) -> SignatureGrid {
    let mut g = SignatureGrid::new();
    let c = g.add_vertex(f.clone());
    if bipartite {
        g.set_side(c, Side::Left);
    }
    for s in 1..=f.arity() {
        let mut prev = Port::new(c, s);
        for d in 0..depth {
            let m = g.add_vertex(Signature::eq(2));
            if bipartite {
                g.set_side(m, if d % 2 == 0 { Side::Right } else { Side::Left });
            }
            g.add_edge(prev.vertex, prev.slot, m, 1);
            prev = Port::new(m, 2);
        }
        g.dangling.push(prev);
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn valiant_transform_keeps_z(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = generators::bipartite_grid(&mut r, 4, 8, generators::signature, generators::signature);
        let m = generators::invertible(&mut r);
        prop_assert_eq!(z(&valiant_transform(&g, &m).unwrap()), z(&g));
    }

    #[test]
    fn strip_k_keeps_z(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = small_grid(&mut r);
        let k = if r.gen_bool(0.5) { KChoice::K1 } else { KChoice::K2 };
        let h = strip_k(&g, k).unwrap();
        prop_assert!(h.validate().ok);
        prop_assert_eq!(z(&h), z(&g));
    }

    #[test]
    fn structural_rewrites_keep_z(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = small_grid(&mut r);
        let want = z(&g);
        let s = rewrite(&g, &Rule::Subdivide, 0.0).unwrap();
        prop_assert_eq!(z(&s), want.clone());
        prop_assert_eq!(&rewrite(&s, &Rule::Unsubdivide, 0.0).unwrap(), &g);
        let f = rewrite(&s, &Rule::Forget, 0.0).unwrap();
        prop_assert!(f.bipartition.is_none());
        prop_assert_eq!(z(&f), want.clone());
        let mut sided = g.clone();
        for v in &g.vertices {
            sided.set_side(v.id, if r.gen_bool(0.5) { Side::Left } else { Side::Right });
        }
        let b = rewrite(&sided, &Rule::Bipartify, 0.0).unwrap();
        prop_assert!(b.validate().ok);
        prop_assert_eq!(z(&b), want);
    }

    #[test]
    fn gadget_substitution_keeps_z(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = small_grid(&mut r);
        let target = g.vertices[r.gen_range(0..g.vertices.len())].sig.clone();
        let mut map = GadgetMap::new();
        map.insert(target.clone(), padded(&target, 1, false), 0.0).unwrap();
        let h = rewrite(&g, &Rule::Substitute(map), 0.0).unwrap();
        prop_assert!(h.validate().ok);
        prop_assert_eq!(z(&h), z(&g));

        let s = rewrite(&g, &Rule::Subdivide, 0.0).unwrap();
        let mut map = GadgetMap::new();
        map.insert(target.clone(), padded(&target, 2, true), 0.0).unwrap();
        let h = rewrite(&s, &Rule::SubstituteBipartite(map), 0.0).unwrap();
        prop_assert!(h.validate().ok);
        prop_assert!(h.bipartition.is_some());
        prop_assert_eq!(z(&h), z(&g));
    }

    #[test]
    fn csp_grid_counts_solutions(seed in any::<u64>()) {
        let c = generators::csp(&mut rng(seed), 5, 5);
        let g = csp_to_grid(&c).unwrap();
        prop_assert_eq!(z(&g), csp_brute(&c, 24).unwrap());
    }

    #[test]
    fn independent_set_grid_matches_enumeration(seed in any::<u64>(), n in 1usize..=7, l in 0usize..4) {
        let g = generators::simple_graph(&mut rng(seed), n, 3);
        let lambda = [Scalar::int(-2), Scalar::ratio(-1, 2), Scalar::one(), Scalar::int(3)][l].clone();
        let grid = independent_set_grid(&g, &lambda, 12).unwrap();
        prop_assert_eq!(z(&grid), independent_set_poly_brute(&g, &lambda).unwrap());
    }
}
