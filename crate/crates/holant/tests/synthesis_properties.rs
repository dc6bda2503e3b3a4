//! Recipes realize what they claim; factorizations multiply back.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use holant::classify::{classify_ternary, TernaryTag};
use holant::generators;
use holant::numerics::Scalar;
use holant::signatures::{Signature, Transform2};
use holant::synthesis::{
    binary_from_ghz, binary_from_tractable_pair, express_e, express_m, ghz_from_w, pldu, triangularize, unitary_completion,
    Factorization, TriangleSide, RECIPE_TOL,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A binary target with small Gaussian-rational entries.
fn target(r: &mut ChaCha8Rng) -> Signature {
    Signature::new(2, (0..4).map(|_| generators::gaussian(r)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn express_e_reproduces_its_input(seed in any::<u64>(), k in 1usize..=5, which in 0usize..3) {
        let mut r = rng(seed);
        let m = match which {
            0 => generators::orthogonal(&mut r),
            1 => Transform2::k1(),
            _ => Transform2::k2(),
        };
        let f = generators::e_member(&mut r, k).holo(&m);
        let recipe = express_e(&f, &m, 1e-9).unwrap();
        prop_assert_eq!(recipe.realize().unwrap(), f);
    }

    #[test]
    fn express_m_reproduces_its_input(seed in any::<u64>(), k in 1usize..=5) {
        let f = generators::m_member(&mut rng(seed), k);
        prop_assume!(!f.is_zero(0.0));
        let recipe = express_m(&f, 1e-9).unwrap();
        prop_assert_eq!(recipe.realize().unwrap(), f);
    }

    #[test]
    fn express_m_rejects_non_members(seed in any::<u64>(), k in 2usize..=4) {
        let mut v = generators::m_member(&mut rng(seed), k).into_values();
        let last = v.len() - 1;
        v[last] = Scalar::one();
        prop_assert!(express_m(&Signature::new(k, v).unwrap(), 1e-9).is_err());
    }

    #[test]
    fn factorizations_multiply_back(seed in any::<u64>(), upper in any::<bool>()) {
        let m = generators::invertible(&mut rng(seed));
        let f = pldu(&m).unwrap();
        prop_assert_eq!(f.product(), m.clone());
        if let Factorization::Pldu { l, u, .. } = &f {
            prop_assert!(l.get(0, 1).is_zero() && l.get(0, 0).is_one() && l.get(1, 1).is_one());
            prop_assert!(u.get(1, 0).is_zero() && u.get(0, 0).is_one() && u.get(1, 1).is_one());
        }
        let side = if upper { TriangleSide::Upper } else { TriangleSide::Lower };
        let t = triangularize(&m, side).unwrap();
        prop_assert!(t.product().approx_eq(&m, 1e-9));
        if let Factorization::Qr { r, .. } = &t {
            let off = if upper { r.get(1, 0) } else { r.get(0, 1) };
            prop_assert!(off.is_zero_tol(1e-9));
        }
    }

    #[test]
    fn unitary_completion_extends_the_vector(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let a: Vec<Scalar> = (0..1usize << n).map(|_| generators::gaussian(&mut r)).collect();
        prop_assume!(a.iter().any(|x| !x.is_zero()));
        let u = unitary_completion(&a).unwrap();
        prop_assert!(u.is_unitary(1e-9));
        let norm = a.iter().map(|x| x.abs().powi(2)).sum::<f64>().sqrt();
        for (i, x) in a.iter().enumerate() {
            prop_assert!((u.at(i).to_c64() - x.to_c64() / norm).norm() < 1e-9);
        }
    }

    #[test]
    fn binary_from_ghz_hits_its_target(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (generators::nonzero_rational(&mut r), generators::nonzero_rational(&mut r));
        let f = Signature::eq(3).holo(&Transform2::new(a.clone(), b, Scalar::zero(), a.inv().unwrap()));
        let t = target(&mut r);
        let recipe = binary_from_ghz(&f, &t, 1e-9).unwrap();
        prop_assert!(recipe.residual().unwrap() < RECIPE_TOL);
    }

    #[test]
    fn binary_from_pair_hits_its_target(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = generators::nonzero_rational(&mut r);
        let (b, c) = (generators::rational(&mut r), generators::rational(&mut r));
        prop_assume!(!(b.is_zero() && c.is_zero()) && !(&b * &c).is_one());
        let f = Signature::symmetric(&[Scalar::one(), Scalar::zero(), Scalar::zero(), a]).unwrap();
        let g = Signature::symmetric(&[b, Scalar::one(), c]).unwrap();
        let t = target(&mut r);
        let recipe = binary_from_tractable_pair(&f, &g, &t, 1e-9).unwrap();
        prop_assert!(recipe.residual().unwrap() < RECIPE_TOL);
    }

    #[test]
    fn ghz_from_w_gives_ghz(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = generators::invertible(&mut r);
        let f = Signature::one(3).holo(&m);
        let eq2 = Signature::eq(2);
        let recipe = match ghz_from_w(&f, &eq2, &eq2, 1e-9) {
            Ok(x) => x,
            // Inside a K∘ℳ clone the equality edge is not allowed; use a
            // binary with a nonzero transformed (1,1) entry instead.
            Err(_) => {
                let s = Signature::from_ints(2, &[1, 2, 0, 1]).unwrap();
                ghz_from_w(&f, &s, &s, 1e-9).unwrap()
            }
        };
        prop_assert!(recipe.residual().unwrap() < RECIPE_TOL);
        prop_assert_eq!(classify_ternary(&recipe.claimed, 1e-9).unwrap().tag, TernaryTag::Ghz);
    }
}
