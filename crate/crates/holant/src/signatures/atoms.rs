//! Splitting a signature into tensor factors.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{bit, Signature};
use crate::error::{HolantError, Result};
use crate::numerics::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct AtomDecomposition {
    pub scalar: Scalar,
    /// Each atom is unary or entangled, normalised so its first nonzero
    /// value is 1.
    pub atoms: Vec<Signature>,
    /// `placement[i]` lists the (0-based) argument positions of atom `i`,
    /// in the atom's own argument order.
    pub placement: Vec<Vec<usize>>,
}

impl AtomDecomposition {
    pub fn arity(&self) -> usize {
        self.placement.iter().map(Vec::len).sum()
    }

    /// Rebuilds the decomposed signature.
    pub fn reassemble(&self) -> Signature {
        let mut t = Signature::nullary(self.scalar.clone());
        for a in &self.atoms {
            t = t.tensor(a);
        }
        // t's arguments follow concat(placement); map them back.
        let order: Vec<usize> = self.placement.iter().flatten().copied().collect();
        t.permute(&order).expect("placement is a partition")
    }
}

/// Rearranges `f` into a matrix: rows indexed by the arguments in `rows`,
/// columns by the rest, both in increasing position order.
fn flatten(f: &Signature, rows: &[usize]) -> (Vec<usize>, Vec<Vec<Scalar>>) {
    let k = f.arity();
    let cols: Vec<usize> = (0..k).filter(|p| !rows.contains(p)).collect();
    let mut m = vec![vec![Scalar::zero(); 1 << cols.len()]; 1 << rows.len()];
    for x in 0..1usize << k {
        let r = rows.iter().fold(0, |acc, &p| (acc << 1) | bit(x, k, p));
        let c = cols.iter().fold(0, |acc, &p| (acc << 1) | bit(x, k, p));
        m[r][c] = f.at(x).clone();
    }
    (cols, m)
}

fn pivot(m: &[Vec<Scalar>], exact: bool, tol: f64) -> Option<(usize, usize)> {
    if exact {
        for (r, row) in m.iter().enumerate() {
            if let Some(c) = row.iter().position(|v| !v.is_zero_tol(0.0)) {
                return Some((r, c));
            }
        }
        None
    } else {
        let mut best = (0, 0, 0.0);
        for (r, row) in m.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                let a = v.abs();
                if a > best.2 {
                    best = (r, c, a);
                }
            }
        }
        (best.2 > tol).then_some((best.0, best.1))
    }
}

fn is_rank_one(m: &[Vec<Scalar>], exact: bool, tol: f64, piv: (usize, usize)) -> bool {
    let (r0, c0) = piv;
    if exact {
        let p = &m[r0][c0];
        for (r, row) in m.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if r == r0 || c == c0 {
                    continue;
                }
                if v * p != &m[r][c0] * &m[r0][c] {
                    return false;
                }
            }
        }
        true
    } else {
        let nr = m.len();
        let nc = m[0].len();
        let mat = DMatrix::<Complex64>::from_fn(nr, nc, |r, c| m[r][c].to_c64());
        let sv = mat.singular_values();
        let mut s: Vec<f64> = sv.iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s.get(1).copied().unwrap_or(0.0) <= tol * (s[0] + 1.0)
    }
}

/// If the arguments in `block` can be split off as a tensor factor, returns
/// `(g, h)` with `f = g ⊗ h` after grouping: `g` over `block` (increasing
/// order), `h` over the remaining positions (increasing order).
pub fn rank_one_split(f: &Signature, block: &[usize], tol: f64) -> Option<(Signature, Signature)> {
    let exact = f.is_exact();
    let (cols, m) = flatten(f, block);
    let (r0, c0) = pivot(&m, exact, tol)?;
    if !is_rank_one(&m, exact, tol, (r0, c0)) {
        return None;
    }
    let inv = m[r0][c0].inv_tol(0.0).ok()?;
    let g = Signature::new(block.len(), m.iter().map(|row| row[c0].clone()).collect()).ok()?;
    let h = Signature::new(cols.len(), m[r0].iter().map(|v| v * &inv).collect()).ok()?;
    Some((g, h))
}

/// Subsets of `0..k` that contain position 0, by size then lexicographically.
fn blocks_with_first(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..k {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            if comb[0] == 0 {
                out.push(comb.clone());
            } else {
                break;
            }
            // next combination in lexicographic order
            let mut i = size;
            while i > 0 && comb[i - 1] == k - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            comb[i - 1] += 1;
            for j in i..size {
                comb[j] = comb[j - 1] + 1;
            }
        }
    }
    out
}

fn normalise(f: Signature, tol: f64, exact: bool) -> (Scalar, Signature) {
    let lead = if exact {
        f.values().iter().find(|v| !v.is_zero_tol(0.0)).cloned()
    } else {
        let m = f.max_abs();
        f.values().iter().find(|v| v.abs() > tol.max(1e-3 * m)).cloned()
    };
    match lead.and_then(|l| l.inv_tol(0.0).ok().map(|inv| (l, inv))) {
        Some((l, inv)) => (l, f.scale(&inv)),
        None => (Scalar::one(), f),
    }
}

fn split_rec(f: &Signature, positions: &[usize], tol: f64, out: &mut AtomDecomposition) {
    let k = f.arity();
    let exact = f.is_exact();
    if k >= 2 {
        for block in blocks_with_first(k) {
            if let Some((g, h)) = rank_one_split(f, &block, tol) {
                let gpos: Vec<usize> = block.iter().map(|&p| positions[p]).collect();
                let hpos: Vec<usize> = (0..k).filter(|p| !block.contains(p)).map(|p| positions[p]).collect();
                split_rec(&g, &gpos, tol, out);
                split_rec(&h, &hpos, tol, out);
                return;
            }
        }
    }
    let (s, a) = normalise(f.clone(), tol, exact);
    out.scalar = &out.scalar * &s;
    out.atoms.push(a);
    out.placement.push(positions.to_vec());
}

/// Splits `f` into unary and entangled factors. The zero function yields
/// scalar 0 with `k` unary atoms `[1, 1]`.
pub fn decompose_atoms(f: &Signature, cap: usize, tol: f64) -> Result<AtomDecomposition> {
    let k = f.arity();
    if k > cap {
        return Err(HolantError::ArityTooLarge { arity: k, cap });
    }
    let zero = if f.is_exact() { f.is_zero(0.0) } else { f.max_abs() <= tol };
    if k == 0 || zero {
        let scalar = if k == 0 { f.at(0).clone() } else { Scalar::zero() };
        return Ok(AtomDecomposition {
            scalar,
            atoms: vec![Signature::unary(Scalar::one(), Scalar::one()); k],
            placement: (0..k).map(|p| vec![p]).collect(),
        });
    }
    let mut out = AtomDecomposition { scalar: Scalar::one(), atoms: Vec::new(), placement: Vec::new() };
    let positions: Vec<usize> = (0..k).collect();
    split_rec(f, &positions, tol, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::DEFAULT_TOL;

    #[test]
    fn product_of_deltas() {
        let d = decompose_atoms(&Signature::delta0().tensor(&Signature::delta1()), 12, DEFAULT_TOL).unwrap();
        assert_eq!(d.scalar, Scalar::one());
        assert_eq!(d.atoms, vec![Signature::delta0(), Signature::delta1()]);
    }

    #[test]
    fn eq3_is_one_atom() {
        let d = decompose_atoms(&Signature::eq(3), 12, DEFAULT_TOL).unwrap();
        assert_eq!(d.atoms, vec![Signature::eq(3)]);
        assert_eq!(d.placement, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn shuffled_product_recovers_placement() {
        let f = Signature::eq(2).scale(&Scalar::int(2)).tensor(&Signature::one(3));
        let g = f.permute(&[3, 0, 4, 2, 1]).unwrap();
        let d = decompose_atoms(&g, 12, DEFAULT_TOL).unwrap();
        assert_eq!(d.scalar, Scalar::int(2));
        assert_eq!(d.atoms.len(), 2);
        assert!(d.atoms.contains(&Signature::eq(2)) && d.atoms.contains(&Signature::one(3)));
        assert_eq!(d.reassemble(), g);
    }

    #[test]
    fn approximate_split() {
        let f = Signature::unary(Scalar::complex(0.3, 0.1), Scalar::complex(-1.2, 0.0))
            .tensor(&Signature::eq(2).to_approx());
        let d = decompose_atoms(&f, 12, DEFAULT_TOL).unwrap();
        assert_eq!(d.atoms.len(), 2);
        assert!(d.reassemble().approx_eq(&f, 1e-9));
    }

    #[test]
    fn zero_function() {
        let d = decompose_atoms(&Signature::from_ints(2, &[0, 0, 0, 0]).unwrap(), 12, DEFAULT_TOL).unwrap();
        assert_eq!(d.scalar, Scalar::zero());
        assert_eq!(d.atoms.len(), 2);
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(
            decompose_atoms(&Signature::eq(5), 4, DEFAULT_TOL),
            Err(HolantError::ArityTooLarge { arity: 5, cap: 4 })
        ));
    }
}
