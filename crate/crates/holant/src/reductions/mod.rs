//! Grid compilers that preserve (or produce a known) holant value.

mod csp;
mod independent;
mod rewrite;

use std::collections::BTreeMap;

use crate::classify::KChoice;
use crate::error::{HolantError, Result};
use crate::grids::{Side, SignatureGrid};
use crate::signatures::{Signature, Transform2};

pub use csp::{csp_brute, csp_to_grid, CspInstance};
pub use independent::{independent_set_counts, independent_set_grid, independent_set_poly_brute, SimpleGraph};
pub use rewrite::{rewrite, GadgetMap, Rule};

fn require_bipartite(grid: &SignatureGrid) -> Result<&BTreeMap<usize, Side>> {
    let bip = grid.bipartition.as_ref().ok_or_else(|| HolantError::NotBipartite("grid has no bipartition".into()))?;
    let report = grid.validate();
    if let Some((at, msg)) = report.issues.iter().find(|(_, m)| m.contains("bipartition")) {
        return Err(HolantError::NotBipartite(format!("{at}: {msg}")));
    }
    report.into_result()?;
    Ok(bip)
}

/// Left signatures become `M∘f`, right ones `(M⁻¹)ᵀ∘g`.
pub fn valiant_transform(grid: &SignatureGrid, m: &Transform2) -> Result<SignatureGrid> {
    let bip = require_bipartite(grid)?;
    if m.det().is_zero() {
        return Err(HolantError::SingularMatrix);
    }
    let dual = m.inverse()?.transpose();
    let mut out = grid.clone();
    for v in &mut out.vertices {
        v.sig = match bip[&v.id] {
            Side::Left => v.sig.holo(m),
            Side::Right => v.sig.holo(&dual),
        };
    }
    Ok(out)
}

/// Rewrites a grid over `K∘F` as a bipartite grid over `F | {NEQ}`: every
/// vertex gets `K⁻¹` applied and every edge is subdivided by a `NEQ`.
/// Dangling ports are left on the original vertices.
pub fn strip_k(grid: &SignatureGrid, k: KChoice) -> Result<SignatureGrid> {
    grid.validate().into_result()?;
    let inv = k.matrix().inverse()?;
    let mut out = SignatureGrid::new();
    for v in &grid.vertices {
        out.add_vertex_with_id(v.id, v.sig.holo(&inv));
        out.set_side(v.id, Side::Left);
    }
    for (a, b) in &grid.edges {
        let n = out.add_vertex(Signature::neq());
        out.set_side(n, Side::Right);
        out.add_edge(a.vertex, a.slot, n, 1);
        out.add_edge(n, 2, b.vertex, b.slot);
    }
    out.dangling = grid.dangling.clone();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluation::holant_brute;
    use crate::numerics::Scalar;

    fn eq1_pair(sig: Signature) -> SignatureGrid {
        let mut g = SignatureGrid::new();
        let a = g.add_vertex(sig.clone());
        let b = g.add_vertex(sig);
        g.add_edge(a, 1, b, 1);
        g
    }

    #[test]
    fn valiant_identity_and_orthogonal() {
        let mut g = SignatureGrid::new();
        let a = g.add_vertex(Signature::from_ints(3, &[1, 2, 0, 3, 1, 1, 5, -1]).unwrap());
        let b = g.add_vertex(Signature::eq(2));
        let c = g.add_vertex(Signature::from_ints(1, &[2, 7]).unwrap());
        let d = g.add_vertex(Signature::eq(2));
        g.add_edge(a, 1, b, 1);
        g.add_edge(b, 2, c, 1);
        g.add_edge(a, 2, d, 1);
        g.add_edge(a, 3, d, 2);
        for (id, s) in [(a, Side::Left), (b, Side::Right), (c, Side::Left), (d, Side::Right)] {
            g.set_side(id, s);
        }
        assert_eq!(valiant_transform(&g, &Transform2::identity()).unwrap(), g);
        let z = holant_brute(&g, 24).unwrap();
        let m = Transform2::from_ints(2, 1, 1, 1);
        assert_eq!(holant_brute(&valiant_transform(&g, &m).unwrap(), 24).unwrap(), z);
        let o = Transform2::new(Scalar::ratio(3, 5), Scalar::ratio(-4, 5), Scalar::ratio(4, 5), Scalar::ratio(3, 5));
        let t = valiant_transform(&g, &o).unwrap();
        assert_eq!(t.vertex(b).unwrap().sig, Signature::eq(2));
        assert_eq!(holant_brute(&t, 24).unwrap(), z);
        assert_eq!(valiant_transform(&g, &Transform2::from_ints(1, 2, 2, 4)), Err(HolantError::SingularMatrix));
        assert!(matches!(valiant_transform(&eq1_pair(Signature::eq(1)), &m), Err(HolantError::NotBipartite(_))));
    }

    #[test]
    fn strip_k_keeps_z() {
        let g = eq1_pair(Signature::eq(1).holo(&Transform2::k1()));
        let s = strip_k(&g, KChoice::K1).unwrap();
        assert_eq!(s.vertices.len(), 3);
        assert!(s.validate().ok);
        assert_eq!(holant_brute(&s, 24).unwrap(), holant_brute(&g, 24).unwrap());
    }
}
