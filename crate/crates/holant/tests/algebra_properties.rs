//! Signature algebra, formula semantics and classifier consistency.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use holant::classify::{classify_set, classify_ternary, hyperdeterminant, KChoice, OrthogonalCondition, TernaryTag};
use holant::formulas::PpsHFormula;
use holant::generators;
use holant::signatures::{signature_to_json, parse_function, Family, Signature, Transform2, DEFAULT_ARITY_CAP};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn atom(f: Signature) -> PpsHFormula {
    let mut h = PpsHFormula::new();
    let xs: Vec<usize> = (0..f.arity()).map(|_| h.fresh_free()).collect();
    h.add_atom(f, &xs).unwrap();
    h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn tensor_is_the_pointwise_product(seed in any::<u64>(), a in 0usize..=3, b in 0usize..=3) {
        let mut r = rng(seed);
        let (f, g) = (generators::signature(&mut r, a), generators::signature(&mut r, b));
        let t = f.tensor(&g);
        for x in 0..1usize << a {
            for y in 0..1usize << b {
                prop_assert_eq!(t.at((x << b) | y), &(f.at(x) * g.at(y)));
            }
        }
    }

    #[test]
    fn permuting_then_inverting_is_the_identity(seed in any::<u64>(), k in 1usize..=5) {
        let mut r = rng(seed);
        let f = generators::signature(&mut r, k);
        let mut perm: Vec<usize> = (0..k).collect();
        perm.shuffle(&mut r);
        let mut inv = vec![0; k];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        prop_assert_eq!(f.permute(&perm).unwrap().permute(&inv).unwrap(), f);
    }

    #[test]
    fn contraction_commutes_with_orthogonal_transforms(seed in any::<u64>(), k in 2usize..=5) {
        let mut r = rng(seed);
        let f = generators::signature(&mut r, k);
        let o = generators::orthogonal(&mut r);
        let i = r.gen_range(0..k - 1);
        let j = r.gen_range(i + 1..k);
        prop_assert_eq!(f.holo(&o).contract(i, j).unwrap(), f.contract(i, j).unwrap().holo(&o));
    }

    #[test]
    fn holo_matches_per_argument_application(seed in any::<u64>(), k in 0usize..=4) {
        let mut r = rng(seed);
        let f = generators::signature(&mut r, k);
        let m = generators::invertible(&mut r);
        prop_assert_eq!(f.holo_per_argument(&vec![m.clone(); k]).unwrap(), f.holo(&m));
        prop_assert_eq!(f.holo(&m).holo(&m.inverse().unwrap()), f.clone());
        prop_assert_eq!(f.holo(&Transform2::identity()), f);
    }

    #[test]
    fn function_literals_round_trip(seed in any::<u64>(), k in 0usize..=4) {
        let f = generators::signature(&mut rng(seed), k).holo(&Transform2::k1());
        prop_assert_eq!(parse_function(&signature_to_json(&f)).unwrap(), f);
    }

    /// A random build-up by tensor, permutation and contraction gives the
    /// same function whether done on formulas or on tables.
    #[test]
    fn formula_operations_track_table_operations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut sig = generators::signature(&mut r, 2);
        let mut h = atom(sig.clone());
        for _ in 0..r.gen_range(1..6) {
            let k = sig.arity();
            match r.gen_range(0..3) {
                0 if k < 6 => {
                    let a = r.gen_range(1..=2);
                    let g = generators::signature(&mut r, a);
                    h = PpsHFormula::tensor(&h, &atom(g.clone())).unwrap();
                    sig = sig.tensor(&g);
                }
                1 if k >= 2 => {
                    let i = r.gen_range(0..k - 1);
                    let j = r.gen_range(i + 1..k);
                    h = h.contract(i, j).unwrap();
                    sig = sig.contract(i, j).unwrap();
                }
                _ => {
                    let mut perm: Vec<usize> = (0..k).collect();
                    perm.shuffle(&mut r);
                    h = h.permute(&perm).unwrap();
                    sig = sig.permute(&perm).unwrap();
                }
            }
        }
        let got = h.eval().unwrap();
        prop_assert_eq!(&got, &sig);
        prop_assert_eq!(&h.eval_brute(24).unwrap(), &sig);
        let back = PpsHFormula::from_gadget(&h.to_gadget().unwrap()).unwrap();
        prop_assert_eq!(back.eval().unwrap(), sig.clone());
        prop_assert_eq!(PpsHFormula::from_json(&h.to_json()).unwrap().eval().unwrap(), sig);
    }

    #[test]
    fn family_membership_survives_its_transform(seed in any::<u64>(), k in 1usize..=5) {
        let mut r = rng(seed);
        let o = generators::orthogonal(&mut r);
        let e = generators::e_member(&mut r, k);
        prop_assert!(e.holo(&o).in_family(Family::E, Some(&o), 0.0).unwrap());
        let m = generators::m_member(&mut r, k);
        prop_assert!(m.holo(&Transform2::k2()).in_family(Family::M, Some(&Transform2::k2()), 0.0).unwrap());
        let t = generators::t_member(&mut r, k);
        let inv = generators::invertible(&mut r);
        prop_assert!(t.holo(&inv).in_family(Family::T, None, 0.0).unwrap());
    }

    /// Each certified condition still certifies after the matching
    /// transformation is applied to a witness member.
    #[test]
    fn classifier_certifies_transformed_members(seed in any::<u64>(), k in 3usize..=4) {
        let mut r = rng(seed);
        let o = generators::orthogonal(&mut r);
        let f = generators::e_member(&mut r, k).holo(&o);
        let rep = classify_set(&[f.clone()], DEFAULT_ARITY_CAP, 1e-9).unwrap();
        match &rep.cond_oe {
            OrthogonalCondition::Holds(w) => {
                let tol = if rep.approximate { 1e-9 } else { 0.0 };
                prop_assert!(f.in_family(Family::E, Some(w), tol).unwrap());
            }
            other => prop_assert!(false, "orthogonal condition {:?} for {:?}", other, f),
        }
        prop_assert!(!rep.is_universal());

        let kc = if r.gen_bool(0.5) { KChoice::K1 } else { KChoice::K2 };
        let g = generators::m_member(&mut r, k).holo(&kc.matrix());
        let rep = classify_set(&[g], DEFAULT_ARITY_CAP, 1e-9).unwrap();
        prop_assert!(rep.cond_km.contains(&kc));
    }

    /// Cayley's hyperdeterminant picks up `det(M)²` per transformed leg, and
    /// the entanglement class is invariant.
    #[test]
    fn hyperdeterminant_is_a_relative_invariant(seed in any::<u64>(), pos in 0usize..3) {
        let mut r = rng(seed);
        let f = generators::signature(&mut r, 3);
        let m = generators::invertible(&mut r);
        let g = f.holo_at(pos, &m);
        let d = m.det();
        prop_assert_eq!(hyperdeterminant(&g).unwrap(), &d * &d * hyperdeterminant(&f).unwrap());
        prop_assert_eq!(classify_ternary(&g, 1e-9).unwrap().tag, classify_ternary(&f, 1e-9).unwrap().tag);
    }

    #[test]
    fn ghz_and_w_witnesses_reconstruct_the_input(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = generators::invertible(&mut r);
        let ghz = Signature::eq(3).holo(&m);
        let c = classify_ternary(&ghz, 1e-9).unwrap();
        prop_assert_eq!(c.tag, TernaryTag::Ghz);
        if let Some(w) = c.witness {
            prop_assert!(Signature::eq(3).holo(&w).approx_eq(&ghz, 1e-9));
        }
        let w3 = Signature::one(3).holo(&m);
        let c = classify_ternary(&w3, 1e-9).unwrap();
        prop_assert_eq!(c.tag, TernaryTag::W);
        if let Some(w) = c.witness {
            prop_assert!(Signature::one(3).holo(&w).approx_eq(&w3, 1e-9));
        }
    }
}
