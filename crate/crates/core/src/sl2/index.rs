use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use super::{enumerate_group_capped, Moduli, ResidueMatrix, TripleElement, FACTOR_CAP, PRODUCT_CAP};
use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
enum Lookup {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

impl Lookup {
    fn build(keys: impl Iterator<Item = u64>, universe: u64, len: usize) -> Self {
        let dense = (universe as u128) <= PRODUCT_CAP && universe <= 64 * len as u64 + (1 << 16);
        if dense {
            let mut t = vec![NONE; universe as usize];
            for (i, k) in keys.enumerate() {
                t[k as usize] = i as u32;
            }
            Lookup::Dense(t)
        } else {
            Lookup::Sparse(keys.enumerate().map(|(i, k)| (k, i as u32)).collect())
        }
    }

    #[inline]
    fn get(&self, key: u64) -> Option<u32> {
        match self {
            Lookup::Dense(t) => t.get(key as usize).copied().filter(|&v| v != NONE),
            Lookup::Sparse(m) => m.get(&key).copied(),
        }
    }
}

/// Enumerated `Λ_q` with index lookup, inverses and (for small groups) a
/// multiplication table.
#[derive(Debug)]
pub struct FactorGroup {
    q: u64,
    elems: Vec<ResidueMatrix>,
    lookup: Lookup,
    inv: Vec<u32>,
    identity: u32,
    table: OnceLock<Option<Vec<u32>>>,
}

impl FactorGroup {
    pub fn new(q: u64) -> Result<Arc<Self>> {
        Self::with_cap(q, FACTOR_CAP)
    }

    pub fn with_cap(q: u64, cap: u128) -> Result<Arc<Self>> {
        let elems = enumerate_group_capped(q, cap)?;
        let universe = (q as u128).pow(4);
        let lookup = if universe <= 1 << 22 {
            Lookup::build(elems.iter().map(|m| Self::key(m)), universe as u64, elems.len())
        } else {
            Lookup::Sparse(elems.iter().enumerate().map(|(i, m)| (Self::key(m), i as u32)).collect())
        };
        let inv = elems
            .iter()
            .map(|m| lookup.get(Self::key(&m.inv())).expect("closed under inverse"))
            .collect();
        let identity = lookup.get(Self::key(&ResidueMatrix::identity(q))).expect("identity");
        Ok(Arc::new(Self { q, elems, lookup, inv, identity, table: OnceLock::new() }))
    }

    fn key(m: &ResidueMatrix) -> u64 {
        let q = m.modulus();
        let [a, b, c, d] = m.entries();
        ((a * q + b) * q + c) * q + d
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn elements(&self) -> &[ResidueMatrix] {
        &self.elems
    }

    pub fn element(&self, i: u32) -> ResidueMatrix {
        self.elems[i as usize]
    }

    pub fn index_of(&self, m: &ResidueMatrix) -> Option<u32> {
        if m.modulus() != self.q {
            return None;
        }
        self.lookup.get(Self::key(m))
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn inv(&self, i: u32) -> u32 {
        self.inv[i as usize]
    }

    fn table(&self) -> Option<&Vec<u32>> {
        self.table
            .get_or_init(|| {
                let n = self.elems.len();
                if n * n > 1 << 22 {
                    return None;
                }
                let mut t = Vec::with_capacity(n * n);
                for x in &self.elems {
                    for y in &self.elems {
                        t.push(self.lookup.get(Self::key(&x.mul_unchecked(y))).unwrap());
                    }
                }
                Some(t)
            })
            .as_ref()
    }

    #[inline]
    pub fn mul(&self, i: u32, j: u32) -> u32 {
        match self.table() {
            Some(t) => t[i as usize * self.elems.len() + j as usize],
            None => {
                let m = self.elems[i as usize].mul_unchecked(&self.elems[j as usize]);
                self.lookup.get(Self::key(&m)).unwrap()
            }
        }
    }
}

/// The ambient product `Λ_{q₁} × Λ_{q₂} × Λ_{q₃}`; elements are addressed by
/// a code `(i₁·n₂ + i₂)·n₃ + i₃` whose order is lexicographic in the factors.
#[derive(Debug)]
pub struct ProductGroup {
    moduli: Moduli,
    factors: [Arc<FactorGroup>; 3],
    sizes: [u64; 3],
}

impl ProductGroup {
    pub fn new(moduli: Moduli) -> Result<Arc<Self>> {
        let factors = [
            FactorGroup::new(moduli.0[0])?,
            FactorGroup::new(moduli.0[1])?,
            FactorGroup::new(moduli.0[2])?,
        ];
        let sizes = [0, 1, 2].map(|i| factors[i].len() as u64);
        Ok(Arc::new(Self { moduli, factors, sizes }))
    }

    pub fn moduli(&self) -> Moduli {
        self.moduli
    }

    pub fn factor(&self, i: usize) -> &Arc<FactorGroup> {
        &self.factors[i]
    }

    pub fn order(&self) -> u64 {
        self.sizes.iter().product()
    }

    #[inline]
    pub fn decode(&self, code: u64) -> [u32; 3] {
        let i3 = code % self.sizes[2];
        let rest = code / self.sizes[2];
        [(rest / self.sizes[1]) as u32, (rest % self.sizes[1]) as u32, i3 as u32]
    }

    #[inline]
    pub fn encode(&self, parts: [u32; 3]) -> u64 {
        (parts[0] as u64 * self.sizes[1] + parts[1] as u64) * self.sizes[2] + parts[2] as u64
    }

    #[inline]
    pub fn mul_code(&self, a: u64, b: u64) -> u64 {
        let x = self.decode(a);
        let y = self.decode(b);
        self.encode([
            self.factors[0].mul(x[0], y[0]),
            self.factors[1].mul(x[1], y[1]),
            self.factors[2].mul(x[2], y[2]),
        ])
    }

    #[inline]
    pub fn inv_code(&self, a: u64) -> u64 {
        let x = self.decode(a);
        self.encode([0, 1, 2].map(|i| self.factors[i].inv(x[i])))
    }

    pub fn identity_code(&self) -> u64 {
        self.encode([0, 1, 2].map(|i| self.factors[i].identity()))
    }

    pub fn element(&self, code: u64) -> TripleElement {
        let x = self.decode(code);
        TripleElement([0, 1, 2].map(|i| self.factors[i].element(x[i])))
    }

    pub fn code_of(&self, g: &TripleElement) -> Option<u64> {
        let mut parts = [0u32; 3];
        for i in 0..3 {
            parts[i] = self.factors[i].index_of(&g.0[i])?;
        }
        Some(self.encode(parts))
    }
}

/// Bijection between a finite set of triples and `[0, N)`.
#[derive(Debug, Clone)]
pub struct GroupIndex {
    group: Arc<ProductGroup>,
    codes: Vec<u64>,
    lookup: Lookup,
    radius: Option<Vec<u32>>,
}

impl GroupIndex {
    /// The whole product group, indexed in lexicographic order.
    pub fn full(moduli: Moduli) -> Result<Self> {
        Self::full_of(ProductGroup::new(moduli)?)
    }

    pub fn full_of(group: Arc<ProductGroup>) -> Result<Self> {
        let order = group.order();
        if order as u128 > PRODUCT_CAP {
            return Err(Error::CapExceeded {
                what: "product group",
                needed: order as u128,
                cap: PRODUCT_CAP,
            });
        }
        Ok(Self::from_codes(group, (0..order).collect(), None))
    }

    /// Builds from distinct ambient codes; the order of `codes` fixes the numbering.
    pub fn from_codes(group: Arc<ProductGroup>, codes: Vec<u64>, radius: Option<Vec<u32>>) -> Self {
        let lookup = Lookup::build(codes.iter().copied(), group.order(), codes.len());
        Self { group, codes, lookup, radius }
    }

    pub fn group(&self) -> &Arc<ProductGroup> {
        &self.group
    }

    pub fn moduli(&self) -> Moduli {
        self.group.moduli()
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn codes(&self) -> &[u64] {
        &self.codes
    }

    pub fn code_at(&self, i: usize) -> u64 {
        self.codes[i]
    }

    pub fn element_at(&self, i: usize) -> TripleElement {
        self.group.element(self.codes[i])
    }

    pub fn index_of(&self, g: &TripleElement) -> Option<usize> {
        if g.moduli() != self.moduli() {
            return None;
        }
        self.index_of_code(self.group.code_of(g)?)
    }

    #[inline]
    pub fn index_of_code(&self, code: u64) -> Option<usize> {
        self.lookup.get(code).map(|i| i as usize)
    }

    /// Index of `element(i) · element(j)`, if that product lies in the set.
    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> Option<usize> {
        self.index_of_code(self.group.mul_code(self.codes[i], self.codes[j]))
    }

    pub fn inv(&self, i: usize) -> Option<usize> {
        self.index_of_code(self.group.inv_code(self.codes[i]))
    }

    pub fn identity(&self) -> Option<usize> {
        self.index_of_code(self.group.identity_code())
    }

    /// Word length from the identity when built by breadth-first search.
    pub fn radius(&self, i: usize) -> Option<u32> {
        self.radius.as_ref().map(|r| r[i])
    }

    pub fn radii(&self) -> Option<&[u32]> {
        self.radius.as_deref()
    }

    /// Same vertex set and numbering.
    pub fn same_as(&self, other: &GroupIndex) -> bool {
        std::ptr::eq(self, other) || (self.moduli() == other.moduli() && self.codes == other.codes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_group_tables_agree() {
        for q in [1, 2, 3, 4, 6] {
            let g = FactorGroup::new(q).unwrap();
            for i in 0..g.len() as u32 {
                assert_eq!(g.mul(i, g.inv(i)), g.identity());
                for j in 0..g.len() as u32 {
                    let direct = g.element(i).mul(&g.element(j)).unwrap();
                    assert_eq!(g.element(g.mul(i, j)), direct);
                }
            }
        }
    }

    #[test]
    fn large_factor_without_table() {
        let g = FactorGroup::new(16).unwrap();
        assert_eq!(g.len(), 3072);
        let x = g.elements()[100];
        let y = g.elements()[2000];
        let i = g.index_of(&x).unwrap();
        let j = g.index_of(&y).unwrap();
        assert_eq!(g.element(g.mul(i, j)), x.mul(&y).unwrap());
    }

    #[test]
    fn index_round_trip() {
        let idx = GroupIndex::full(Moduli::new(2, 3, 1).unwrap()).unwrap();
        assert_eq!(idx.len(), 6 * 24);
        for i in 0..idx.len() {
            assert_eq!(idx.index_of(&idx.element_at(i)), Some(i));
            let inv = idx.inv(i).unwrap();
            assert_eq!(idx.mul(i, inv), idx.identity());
        }
        // lexicographic in (g₁, g₂, g₃)
        for i in 1..idx.len() {
            assert!(idx.element_at(i - 1) < idx.element_at(i));
        }
    }

    #[test]
    fn product_cap() {
        let m = Moduli::new(7, 7, 7).unwrap();
        assert!(matches!(GroupIndex::full(m), Err(Error::CapExceeded { .. })));
    }
}
