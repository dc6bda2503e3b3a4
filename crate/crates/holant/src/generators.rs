//! Seeded random instances for property checks and the test suites.
//!
//! Everything takes the caller's RNG, so a fixed seed gives a fixed stream
//! of instances.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::grids::{Side, SignatureGrid};
use crate::numerics::Scalar;
use crate::reductions::{CspInstance, SimpleGraph};
use crate::signatures::{Signature, Transform2};

/// A rational with numerator in `-6..=6` and denominator in `1..=4`.
pub fn rational<R: Rng>(rng: &mut R) -> Scalar {
    Scalar::ratio(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

/// A nonzero rational.
pub fn nonzero_rational<R: Rng>(rng: &mut R) -> Scalar {
    loop {
        let s = rational(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

/// A Gaussian rational `p + q·i`.
pub fn gaussian<R: Rng>(rng: &mut R) -> Scalar {
    rational(rng) + rational(rng) * Scalar::i()
}

/// A dense exact table with roughly a quarter of its entries zero.
pub fn signature<R: Rng>(rng: &mut R, arity: usize) -> Signature {
    let values = (0..1usize << arity).map(|_| if rng.gen_bool(0.25) { Scalar::zero() } else { rational(rng) }).collect();
    Signature::new(arity, values).expect("length matches")
}

/// An invertible matrix with small integer entries.
pub fn invertible<R: Rng>(rng: &mut R) -> Transform2 {
    loop {
        let [a, b, c, d] = std::array::from_fn(|_| rng.gen_range(-3i64..=3));
        if a * d - b * c != 0 {
            return Transform2::from_ints(a, b, c, d);
        }
    }
}

/// An invertible matrix with approximate entries of modulus at most 2.
pub fn invertible_float<R: Rng>(rng: &mut R) -> Transform2 {
    loop {
        let [a, b, c, d] = std::array::from_fn(|_| Scalar::complex(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
        let m = Transform2::new(a, b, c, d);
        if m.det().abs() > 0.1 {
            return m;
        }
    }
}

/// A rational orthogonal matrix from a Pythagorean triple, possibly with a
/// reflection.
pub fn orthogonal<R: Rng>(rng: &mut R) -> Transform2 {
    let (a, b, c) = *[(3, 4, 5), (5, 12, 13), (8, 15, 17), (1, 0, 1), (0, 1, 1)].choose(rng).expect("nonempty");
    let (x, y) = (Scalar::ratio(a, c), Scalar::ratio(b, c));
    if rng.gen_bool(0.5) {
        Transform2::new(x.clone(), -y.clone(), y, x)
    } else {
        Transform2::new(x.clone(), y.clone(), y, -x)
    }
}

/// A member of the equality family: nonzero values on a random
/// complementary pair.
pub fn e_member<R: Rng>(rng: &mut R, arity: usize) -> Signature {
    let mut v = vec![Scalar::zero(); 1 << arity];
    let full = (1usize << arity) - 1;
    let a = rng.gen_range(0..=full);
    v[a] = nonzero_rational(rng);
    if full != 0 {
        v[full ^ a] = nonzero_rational(rng);
    }
    Signature::new(arity, v).expect("length matches")
}

/// A member of the matching family: arbitrary values on inputs of weight at
/// most one.
pub fn m_member<R: Rng>(rng: &mut R, arity: usize) -> Signature {
    let values = (0..1usize << arity)
        .map(|x: usize| if x.count_ones() <= 1 && !rng.gen_bool(0.15) { rational(rng) } else { Scalar::zero() })
        .collect();
    Signature::new(arity, values).expect("length matches")
}

/// A tensor product of random unary and binary tables, arity `arity`.
pub fn t_member<R: Rng>(rng: &mut R, arity: usize) -> Signature {
    let mut f = Signature::nullary(nonzero_rational(rng));
    let mut left = arity;
    while left > 0 {
        let k = if left >= 2 && rng.gen_bool(0.5) { 2 } else { 1 };
        f = f.tensor(&signature(rng, k));
        left -= k;
    }
    let mut perm: Vec<usize> = (0..arity).collect();
    perm.shuffle(rng);
    f.permute(&perm).expect("valid permutation")
}

/// Arities and port pairings of a random closed multigraph (self-loops and
/// parallel edges allowed). Arities lie in `1..=max_arity`, the vertex count
/// in `1..=max_vertices`, and there are at most `max_edges` edges.
pub fn skeleton<R: Rng>(rng: &mut R, max_vertices: usize, max_edges: usize, max_arity: usize) -> (Vec<usize>, Vec<((usize, usize), (usize, usize))>) {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let mut arity: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=max_arity.max(1))).collect();
    let total = |a: &[usize]| a.iter().sum::<usize>();
    while total(&arity) > 2 * max_edges || total(&arity) % 2 == 1 {
        let v = rng.gen_range(0..n);
        if arity[v] > 0 {
            arity[v] -= 1;
        }
    }
    let mut ports: Vec<(usize, usize)> = arity.iter().enumerate().flat_map(|(v, &k)| (1..=k).map(move |s| (v, s))).collect();
    ports.shuffle(rng);
    let edges = ports.chunks(2).map(|p| (p[0], p[1])).collect();
    (arity, edges)
}

/// A closed grid on a random skeleton, signatures drawn by `fill(rng, arity)`.
pub fn closed_grid<R: Rng>(
    rng: &mut R,
    max_vertices: usize,
    max_edges: usize,
    max_arity: usize,
    mut fill: impl FnMut(&mut R, usize) -> Signature,
) -> SignatureGrid {
    let (arity, edges) = skeleton(rng, max_vertices, max_edges, max_arity);
    let mut g = SignatureGrid::new();
    for &k in &arity {
        let s = fill(rng, k);
        g.add_vertex(s);
    }
    for ((a, sa), (b, sb)) in edges {
        g.add_edge(a, sa, b, sb);
    }
    g
}

/// A random bipartite closed grid: Left vertices from `left`, Right from
/// `right`, every edge joining the two sides.
pub fn bipartite_grid<R: Rng>(
    rng: &mut R,
    max_side: usize,
    max_edges: usize,
    mut left: impl FnMut(&mut R, usize) -> Signature,
    mut right: impl FnMut(&mut R, usize) -> Signature,
) -> SignatureGrid {
    let m = rng.gen_range(1..=max_edges.max(1));
    let nl = rng.gen_range(1..=max_side.max(1)).min(m);
    let nr = rng.gen_range(1..=max_side.max(1)).min(m);
    // Every vertex gets at least one edge.
    let mut ends: Vec<(usize, usize)> = (0..m).map(|e| (e.min(nl - 1), e.min(nr - 1))).collect();
    for e in ends.iter_mut().skip(nl.max(nr)) {
        *e = (rng.gen_range(0..nl), rng.gen_range(0..nr));
    }
    ends.shuffle(rng);
    let mut dl = vec![0; nl];
    let mut dr = vec![0; nr];
    for &(a, b) in &ends {
        dl[a] += 1;
        dr[b] += 1;
    }
    let mut g = SignatureGrid::new();
    let ls: Vec<usize> = dl.iter().map(|&k| g.add_vertex(left(rng, k))).collect();
    let rs: Vec<usize> = dr.iter().map(|&k| g.add_vertex(right(rng, k))).collect();
    for &v in &ls {
        g.set_side(v, Side::Left);
    }
    for &v in &rs {
        g.set_side(v, Side::Right);
    }
    let (mut sl, mut sr) = (vec![0; nl], vec![0; nr]);
    for (a, b) in ends {
        sl[a] += 1;
        sr[b] += 1;
        g.add_edge(ls[a], sl[a], rs[b], sr[b]);
    }
    g
}

/// A simple graph on `n` vertices with maximum degree at most `max_degree`.
pub fn simple_graph<R: Rng>(rng: &mut R, n: usize, max_degree: usize) -> SimpleGraph {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    pairs.shuffle(rng);
    let keep = rng.gen_range(0..=pairs.len());
    let mut g = SimpleGraph::new(n);
    for (u, v) in pairs.into_iter().take(keep) {
        if g.degree(u) < max_degree && g.degree(v) < max_degree {
            g.add_edge(u, v).expect("fresh pair");
        }
    }
    g
}

/// A counting CSP with `1..=max_vars` variables, each used at least once.
pub fn csp<R: Rng>(rng: &mut R, max_vars: usize, max_constraints: usize) -> CspInstance {
    let n = rng.gen_range(1..=max_vars.max(1));
    let mut c = CspInstance::new(n);
    let k = rng.gen_range(1..=max_constraints.max(1));
    for _ in 0..k {
        let arity = rng.gen_range(1..=3);
        let scope: Vec<usize> = (0..arity).map(|_| rng.gen_range(0..n)).collect();
        c.add(signature(rng, arity), &scope).expect("in range");
    }
    for v in 0..n {
        if c.multiplicities()[v] == 0 {
            c.add(signature(rng, 1), &[v]).expect("in range");
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::signatures::Family;

    #[test]
    fn generated_instances_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let g = closed_grid(&mut rng, 8, 12, 4, signature);
            assert!(g.validate().ok);
            assert!(g.edges.len() <= 12);
            let b = bipartite_grid(&mut rng, 4, 8, signature, signature);
            assert!(b.validate().ok, "{:?}", b.validate());
            let k = rng.gen_range(1..5);
            assert!(e_member(&mut rng, k).in_family(Family::E, None, 0.0).unwrap());
            assert!(m_member(&mut rng, k).in_family(Family::M, None, 0.0).unwrap());
            assert!(t_member(&mut rng, k).in_family(Family::T, None, 0.0).unwrap());
            assert!(orthogonal(&mut rng).is_orthogonal(0.0));
            assert!(simple_graph(&mut rng, 8, 3).max_degree() <= 3);
            assert!(csp(&mut rng, 5, 4).multiplicities().iter().all(|&m| m > 0));
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let a = closed_grid(&mut ChaCha8Rng::seed_from_u64(9), 8, 12, 4, signature);
        let b = closed_grid(&mut ChaCha8Rng::seed_from_u64(9), 8, 12, 4, signature);
        assert_eq!(a, b);
    }
}
