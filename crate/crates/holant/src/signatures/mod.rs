//! Dense Boolean functions `{0,1}^k → Scalar`.
//!
//! The value of `f(x₁, …, x_k)` is stored at index `Σ x_j·2^{k−j}`, so `x₁`
//! is the most significant bit. With that ordering the table of `M∘f` is
//! literally `M^{⊗k}` applied to the table of `f`.

mod atoms;
mod io;
mod transform;

use crate::error::{HolantError, Result};
use crate::numerics::{Scalar, DEFAULT_TOL};

pub use atoms::{decompose_atoms, rank_one_split, AtomDecomposition};
pub use io::{parse_function, signature_to_json, transform_from_json, transform_to_json};
pub use transform::Transform2;

/// Default cap on the arity of tables that are decomposed or classified.
pub const DEFAULT_ARITY_CAP: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct Signature {
    arity: usize,
    values: Vec<Scalar>,
}

/// The named families of functions the classifier works with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Support inside a complementary pair `{a, ā}`.
    E,
    /// Support on inputs of Hamming weight at most one.
    M,
    /// Every tensor atom has arity at most two.
    T,
}

#[inline]
pub fn bit(index: usize, arity: usize, pos: usize) -> usize {
    (index >> (arity - 1 - pos)) & 1
}

impl Signature {
    pub fn new(arity: usize, values: Vec<Scalar>) -> Result<Self> {
        if values.len() != 1usize << arity {
            return Err(HolantError::ArityMismatch(format!(
                "arity {arity} needs {} values, got {}",
                1usize << arity,
                values.len()
            )));
        }
        Ok(Signature { arity, values })
    }

    pub fn from_ints(arity: usize, values: &[i64]) -> Result<Self> {
        Self::new(arity, values.iter().map(|&v| Scalar::int(v)).collect())
    }

    pub fn nullary(v: Scalar) -> Self {
        Signature { arity: 0, values: vec![v] }
    }

    pub fn unary(a: Scalar, b: Scalar) -> Self {
        Signature { arity: 1, values: vec![a, b] }
    }

    /// `[f₀, …, f_k]`: value `f_j` on inputs of Hamming weight `j`.
    pub fn symmetric(entries: &[Scalar]) -> Result<Self> {
        if entries.is_empty() {
            return Err(HolantError::ArityMismatch("symmetric list is empty".into()));
        }
        let k = entries.len() - 1;
        Ok(Signature { arity: k, values: (0..1usize << k).map(|x| entries[x.count_ones() as usize].clone()).collect() })
    }

    pub fn symmetric_ints(entries: &[i64]) -> Result<Self> {
        Self::symmetric(&entries.iter().map(|&v| Scalar::int(v)).collect::<Vec<_>>())
    }

    pub fn eq(k: usize) -> Self {
        let mut v = vec![Scalar::zero(); 1 << k];
        v[0] = Scalar::one();
        v[(1 << k) - 1] = Scalar::one();
        Signature { arity: k, values: v }
    }

    pub fn neq() -> Self {
        Self::from_ints(2, &[0, 1, 1, 0]).expect("static")
    }

    /// 1 exactly on inputs of Hamming weight one.
    pub fn one(k: usize) -> Self {
        Signature {
            arity: k,
            values: (0..1usize << k).map(|x| if x.count_ones() == 1 { Scalar::one() } else { Scalar::zero() }).collect(),
        }
    }

    pub fn nand() -> Self {
        Self::from_ints(2, &[1, 1, 1, 0]).expect("static")
    }

    pub fn even3() -> Self {
        Self::symmetric_ints(&[1, 0, 1, 0]).expect("static")
    }

    pub fn delta0() -> Self {
        Self::unary(Scalar::one(), Scalar::zero())
    }

    pub fn delta1() -> Self {
        Self::unary(Scalar::zero(), Scalar::one())
    }

    /// `[1, λ]`
    pub fn activity(lambda: Scalar) -> Self {
        Self::unary(Scalar::one(), lambda)
    }

    /// Named constructor by string, checking the arity against the name.
    pub fn named(name: &str, arity: Option<usize>) -> Result<Self> {
        let need = |fixed: usize| -> Result<()> {
            match arity {
                Some(a) if a != fixed => Err(HolantError::ArityMismatch(format!("{name} has arity {fixed}, not {a}"))),
                _ => Ok(()),
            }
        };
        let free = || arity.ok_or_else(|| HolantError::ArityMismatch(format!("{name} needs an arity")));
        match name {
            "EQ" => Ok(Self::eq(free()?)),
            "ONE" => Ok(Self::one(free()?)),
            "NEQ" => need(2).map(|_| Self::neq()),
            "NAND" => need(2).map(|_| Self::nand()),
            "EVEN3" => need(3).map(|_| Self::even3()),
            "DELTA0" => need(1).map(|_| Self::delta0()),
            "DELTA1" => need(1).map(|_| Self::delta1()),
            _ => Err(HolantError::ArityMismatch(format!("unknown function name {name}"))),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Scalar> {
        self.values
    }

    pub fn at(&self, index: usize) -> &Scalar {
        &self.values[index]
    }

    pub fn value(&self, bits: &[usize]) -> &Scalar {
        debug_assert_eq!(bits.len(), self.arity);
        &self.values[bits.iter().fold(0, |acc, &b| (acc << 1) | b)]
    }

    pub fn is_exact(&self) -> bool {
        self.values.iter().all(Scalar::is_exact)
    }

    pub fn to_approx(&self) -> Signature {
        Signature { arity: self.arity, values: self.values.iter().map(Scalar::to_approx).collect() }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.values.iter().all(|v| v.is_zero_tol(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(Scalar::abs).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: &Scalar) -> Signature {
        Signature { arity: self.arity, values: self.values.iter().map(|v| s * v).collect() }
    }

    pub fn approx_eq(&self, o: &Signature, tol: f64) -> bool {
        self.arity == o.arity && self.values.iter().zip(&o.values).all(|(a, b)| a.approx_eq(b, tol))
    }

    /// Largest component-wise difference, as a float.
    pub fn residual(&self, o: &Signature) -> f64 {
        if self.arity != o.arity {
            return f64::INFINITY;
        }
        self.values
            .iter()
            .zip(&o.values)
            .map(|(a, b)| {
                let d = a.to_c64() - b.to_c64();
                d.re.abs().max(d.im.abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.values.len()).all(|x| {
            let canon = (1usize << x.count_ones()) - 1;
            self.values[x].approx_eq(&self.values[canon], tol)
        })
    }

    /// `[f₀, …, f_k]` if the signature is symmetric.
    pub fn symmetric_entries(&self, tol: f64) -> Option<Vec<Scalar>> {
        if !self.is_symmetric(tol) {
            return None;
        }
        Some((0..=self.arity).map(|w| self.values[(1usize << w) - 1].clone()).collect())
    }

    /// Kronecker product: `h(x, y) = f(x)·g(y)`.
    pub fn tensor(&self, g: &Signature) -> Signature {
        let mut values = Vec::with_capacity(self.values.len() * g.values.len());
        for a in &self.values {
            for b in &g.values {
                values.push(a * b);
            }
        }
        Signature { arity: self.arity + g.arity, values }
    }

    /// `f_π(x₁, …, x_k) = f(x_{π(1)}, …, x_{π(k)})`, with `perm` 0-based.
    pub fn permute(&self, perm: &[usize]) -> Result<Signature> {
        let k = self.arity;
        let mut seen = vec![false; k];
        if perm.len() != k || perm.iter().any(|&p| p >= k || std::mem::replace(&mut seen[p], true)) {
            return Err(HolantError::InvalidPermutation(format!("{perm:?} is not a permutation of 0..{k}")));
        }
        let values = (0..self.values.len())
            .map(|x| {
                let src = (0..k).fold(0, |acc, j| (acc << 1) | bit(x, k, perm[j]));
                self.values[src].clone()
            })
            .collect();
        Ok(Signature { arity: k, values })
    }

    /// Sums over `y` with arguments `i` and `j` (0-based) both set to `y`.
    pub fn contract(&self, i: usize, j: usize) -> Result<Signature> {
        let k = self.arity;
        if i >= j || j >= k {
            return Err(HolantError::IndexOutOfRange(format!("contract({i}, {j}) on arity {k}")));
        }
        let out_k = k - 2;
        let values = (0..1usize << out_k)
            .map(|x| {
                let mut acc = Scalar::zero();
                for y in 0..2 {
                    let mut src = 0;
                    let mut r = 0;
                    for p in 0..k {
                        let b = if p == i || p == j {
                            y
                        } else {
                            r += 1;
                            bit(x, out_k, r - 1)
                        };
                        src = (src << 1) | b;
                    }
                    acc = acc + &self.values[src];
                }
                acc
            })
            .collect();
        Ok(Signature { arity: out_k, values })
    }

    /// `M∘f`: applies `M` to every argument. Nullary functions are unchanged.
    pub fn holo(&self, m: &Transform2) -> Signature {
        let mut v = self.values.clone();
        let k = self.arity;
        for pos in 0..k {
            let stride = 1usize << (k - 1 - pos);
            for base in 0..v.len() {
                if base & stride != 0 {
                    continue;
                }
                let (a, b) = (&v[base], &v[base | stride]);
                let na = &m.m[0][0] * a + &m.m[0][1] * b;
                let nb = &m.m[1][0] * a + &m.m[1][1] * b;
                v[base] = na;
                v[base | stride] = nb;
            }
        }
        Signature { arity: k, values: v }
    }

    /// Applies a possibly different matrix to each argument.
    pub fn holo_per_argument(&self, ms: &[Transform2]) -> Result<Signature> {
        if ms.len() != self.arity {
            return Err(HolantError::ArityMismatch(format!("{} matrices for arity {}", ms.len(), self.arity)));
        }
        let mut out = self.clone();
        for (pos, m) in ms.iter().enumerate() {
            out = out.holo_at(pos, m);
        }
        Ok(out)
    }

    /// Applies `m` to argument `pos` only.
    pub fn holo_at(&self, pos: usize, m: &Transform2) -> Signature {
        let mut v = self.values.clone();
        let stride = 1usize << (self.arity - 1 - pos);
        for base in 0..v.len() {
            if base & stride != 0 {
                continue;
            }
            let (a, b) = (&v[base], &v[base | stride]);
            let na = &m.m[0][0] * a + &m.m[0][1] * b;
            let nb = &m.m[1][0] * a + &m.m[1][1] * b;
            v[base] = na;
            v[base | stride] = nb;
        }
        Signature { arity: self.arity, values: v }
    }

    /// Indices of values that are nonzero (exactly, or above `tol`).
    pub fn support(&self, tol: f64) -> Vec<usize> {
        (0..self.values.len()).filter(|&x| !self.values[x].is_zero_tol(tol)).collect()
    }

    /// Membership in one of the families, optionally after stripping a
    /// transformation: with `pre = Some(M)` the test runs on `M⁻¹∘f`.
    pub fn in_family(&self, family: Family, pre: Option<&Transform2>, tol: f64) -> Result<bool> {
        let f = match pre {
            Some(m) => self.holo(&m.inverse_tol(tol)?),
            None => self.clone(),
        };
        Ok(match family {
            Family::E => f.is_generalised_equality(tol),
            Family::M => f.is_generalised_matching(tol),
            Family::T => {
                let d = decompose_atoms(&f, DEFAULT_ARITY_CAP, tol)?;
                d.atoms.iter().all(|a| a.arity() <= 2)
            }
        })
    }

    /// Support inside `{a, ā}` for some `a`; an empty or single-point support
    /// also counts.
    pub fn is_generalised_equality(&self, tol: f64) -> bool {
        let sup = self.support(tol);
        let full = self.values.len() - 1;
        match sup.first() {
            None => true,
            Some(&a) => sup.iter().all(|&x| x == a || x == full ^ a),
        }
    }

    pub fn is_generalised_matching(&self, tol: f64) -> bool {
        self.support(tol).iter().all(|x| x.count_ones() <= 1)
    }

    /// Even arity `2n` and the `2ⁿ×2ⁿ` matrix with rows indexed by the last
    /// `n` arguments and columns by the first `n` satisfies `U†U = I`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        if self.arity % 2 != 0 {
            return false;
        }
        let n = self.arity / 2;
        let dim = 1usize << n;
        let u = |r: usize, c: usize| &self.values[(c << n) | r];
        for c1 in 0..dim {
            for c2 in 0..dim {
                let s: Scalar = (0..dim).map(|r| u(r, c1).conj() * u(r, c2)).sum();
                let want = if c1 == c2 { Scalar::one() } else { Scalar::zero() };
                if !s.approx_eq(&want, tol) {
                    return false;
                }
            }
        }
        true
    }

    pub fn matrix_view(&self) -> Result<Transform2> {
        if self.arity != 2 {
            return Err(HolantError::ArityMismatch(format!("matrix view needs arity 2, got {}", self.arity)));
        }
        let v = &self.values;
        Ok(Transform2::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()))
    }

    pub fn from_matrix(m: &Transform2) -> Signature {
        Signature { arity: 2, values: m.flat().to_vec() }
    }
}

/// `(M⁻¹)ᵀ`, the transformation applied to the other side of a bipartite
/// grid so that the holant is preserved.
pub fn dual_transform(m: &Transform2) -> Result<Transform2> {
    Ok(m.inverse()?.transpose())
}

#[allow(dead_code)]
pub(crate) fn default_tol() -> f64 {
    DEFAULT_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &Signature) -> Vec<i64> {
        s.values()
            .iter()
            .map(|v| {
                let c = v.as_exact().unwrap();
                assert!(c.is_rational());
                c.coeffs()[0].to_integer().try_into().unwrap()
            })
            .collect()
    }

    #[test]
    fn named_tables() {
        assert_eq!(ints(&Signature::eq(3)), vec![1, 0, 0, 0, 0, 0, 0, 1]);
        assert_eq!(ints(&Signature::one(3)), vec![0, 1, 1, 0, 1, 0, 0, 0]);
        assert_eq!(ints(&Signature::activity(Scalar::int(2))), vec![1, 2]);
        assert!(Signature::named("NEQ", Some(3)).is_err());
        assert_eq!(Signature::named("EVEN3", None).unwrap(), Signature::even3());
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(ints(&Signature::delta0().tensor(&Signature::delta0())), vec![1, 0, 0, 0]);
        assert_eq!(ints(&Signature::eq(2).tensor(&Signature::nullary(Scalar::int(3)))), vec![3, 0, 0, 3]);
        let a = Signature::unary(Scalar::int(1), Scalar::int(2));
        let b = Signature::unary(Scalar::int(3), Scalar::int(4));
        assert_eq!(ints(&a.tensor(&b)), vec![3, 4, 6, 8]);
    }

    #[test]
    fn permute_swaps() {
        let f = Signature::from_ints(2, &[1, 2, 3, 4]).unwrap();
        assert_eq!(ints(&f.permute(&[1, 0]).unwrap()), vec![1, 3, 2, 4]);
        assert!(f.permute(&[0, 0]).is_err());
    }

    #[test]
    fn permute_follows_argument_convention() {
        // f(x1,x2,x3) = x1 + 2·x2 + 4·x3 as a table; f_π(x) = f(x_{π(1)}, x_{π(2)}, x_{π(3)})
        let f = Signature::new(3, (0..8).map(|i| Scalar::int((i >> 2) + 2 * ((i >> 1) & 1) + 4 * (i & 1))).collect()).unwrap();
        let p = [2, 0, 1];
        let g = f.permute(&p).unwrap();
        for x in 0..8usize {
            let xs = [x >> 2 & 1, x >> 1 & 1, x & 1];
            let want = f.value(&[xs[p[0]], xs[p[1]], xs[p[2]]]);
            assert_eq!(g.at(x), want);
        }
    }

    #[test]
    fn contract_examples() {
        assert_eq!(ints(&Signature::eq(2).contract(0, 1).unwrap()), vec![2]);
        assert_eq!(ints(&Signature::eq(3).contract(1, 2).unwrap()), vec![1, 1]);
        assert_eq!(ints(&Signature::neq().contract(0, 1).unwrap()), vec![0]);
        assert!(Signature::neq().contract(1, 1).is_err());
    }

    #[test]
    fn holographic_example_gives_two_neq() {
        let m = Transform2::new(Scalar::int(1), Scalar::i(), Scalar::int(1), -Scalar::i());
        assert_eq!(Signature::eq(2).holo(&m), Signature::neq().scale(&Scalar::int(2)));
        assert_eq!(Signature::eq(3).holo(&Transform2::x()), Signature::eq(3));
        let f = Signature::one(3);
        assert_eq!(f.holo(&Transform2::identity()), f);
    }

    #[test]
    fn family_examples() {
        let tol = DEFAULT_TOL;
        assert!(Signature::eq(3).in_family(Family::E, None, tol).unwrap());
        assert!(Signature::one(3).in_family(Family::M, None, tol).unwrap());
        assert!(!Signature::one(3).in_family(Family::E, None, tol).unwrap());
        let k = Transform2::k1();
        assert!(Signature::one(3).holo(&k).in_family(Family::M, Some(&k), tol).unwrap());
    }

    #[test]
    fn unitary_examples() {
        let mut cnot = vec![0; 16];
        for idx in [0b0000, 0b0101, 0b1011, 0b1110] {
            cnot[idx] = 1;
        }
        assert!(Signature::from_ints(4, &cnot).unwrap().is_unitary(0.0));
        assert!(Signature::eq(2).is_unitary(0.0));
        assert!(!Signature::nand().is_unitary(0.0));
    }

    #[test]
    fn matrix_view_round_trip() {
        assert_eq!(Signature::neq().matrix_view().unwrap(), Transform2::x());
        assert_eq!(Signature::eq(2).matrix_view().unwrap(), Transform2::identity());
        let f = Signature::from_ints(2, &[5, 1, 1, 7]).unwrap();
        assert_eq!(Signature::from_matrix(&f.matrix_view().unwrap()), f);
        assert!(Signature::eq(3).matrix_view().is_err());
    }
}
