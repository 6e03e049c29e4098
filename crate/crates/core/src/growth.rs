//! Product sets in `Γ_q`, triple-product growth, congruence-subgroup covering
//! by powers `A^k`, and additive covering of residue lattices.

use std::io::{BufRead, Write};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use num_integer::Integer;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cayley::build_cayley;
use crate::error::{Error, Result};
use crate::genset::GeneratingSet;
use crate::modarith::{divisors, exact_divisors};
use crate::sl2::{GroupIndex, Moduli};
use crate::walk::{for_each_walk_power, ratio_f64, ratio_string};

#[derive(Debug, Clone)]
pub struct GroupSubset {
    index: Arc<GroupIndex>,
    bits: FixedBitSet,
    len: usize,
}

impl PartialEq for GroupSubset {
    fn eq(&self, other: &Self) -> bool {
        self.index.same_as(&other.index) && self.bits == other.bits
    }
}

impl GroupSubset {
    pub fn empty(index: Arc<GroupIndex>) -> Self {
        let bits = FixedBitSet::with_capacity(index.len());
        Self { index, bits, len: 0 }
    }

    pub fn full(index: Arc<GroupIndex>) -> Self {
        let mut bits = FixedBitSet::with_capacity(index.len());
        bits.insert_range(..);
        let len = index.len();
        Self { index, bits, len }
    }

    pub fn identity(index: Arc<GroupIndex>) -> Result<Self> {
        let e = index.identity().ok_or_else(|| Error::InvalidSubset("index lacks the identity".into()))?;
        Self::from_indices(index, &[e])
    }

    pub fn from_indices(index: Arc<GroupIndex>, members: &[usize]) -> Result<Self> {
        let mut s = Self::empty(index);
        for &i in members {
            s.insert(i)?;
        }
        Ok(s)
    }

    fn from_bits(index: Arc<GroupIndex>, bits: FixedBitSet) -> Self {
        let len = bits.count_ones(..);
        Self { index, bits, len }
    }

    pub fn insert(&mut self, i: usize) -> Result<bool> {
        if i >= self.index.len() {
            return Err(Error::VertexOutOfRange(i));
        }
        let was = self.bits.put(i);
        if !was {
            self.len += 1;
        }
        Ok(!was)
    }

    pub fn index(&self) -> &Arc<GroupIndex> {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.bits.len() && self.bits.contains(i)
    }

    pub fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    /// Members in increasing index order.
    pub fn indices(&self) -> Vec<usize> {
        self.bits.ones().collect()
    }

    pub fn is_subset(&self, other: &GroupSubset) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn contains_identity(&self) -> bool {
        self.index.identity().is_some_and(|e| self.contains(e))
    }

    pub fn is_symmetric(&self) -> bool {
        self.bits.ones().all(|i| self.index.inv(i).is_some_and(|j| self.contains(j)))
    }

    pub fn union(&self, other: &GroupSubset) -> Result<GroupSubset> {
        if !self.index.same_as(&other.index) {
            return Err(Error::IndexMismatch);
        }
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Ok(Self::from_bits(self.index.clone(), bits))
    }

    /// Sorted index list, one per line under an `index` header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "index")?;
        for i in self.bits.ones() {
            writeln!(w, "{i}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(index: Arc<GroupIndex>, r: R) -> Result<Self> {
        let mut s = Self::empty(index);
        for (n, line) in r.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || (n == 0 && t == "index") {
                continue;
            }
            let i: usize = t.parse().map_err(|_| Error::Parse(format!("line {}: {t:?} is not an index", n + 1)))?;
            s.insert(i)?;
        }
        Ok(s)
    }
}

/// `A·B = {ab : a ∈ A, b ∈ B}`.
pub fn product_set(a: &GroupSubset, b: &GroupSubset) -> Result<GroupSubset> {
    Ok(GroupSubset::from_bits(a.index.clone(), product_bits(a, &b.bits)?))
}

fn product_bits(a: &GroupSubset, b: &FixedBitSet) -> Result<FixedBitSet> {
    let idx = &a.index;
    if b.len() != idx.len() {
        return Err(Error::IndexMismatch);
    }
    let n = idx.len();
    let av = a.indices();
    let mut out = FixedBitSet::with_capacity(n);
    let mut count = 0;
    for bj in b.ones() {
        for &ai in &av {
            let p = idx.mul(ai, bj).ok_or_else(|| Error::InvalidSubset("index is not closed under products".into()))?;
            if !out.put(p) {
                count += 1;
            }
        }
        if count == n {
            break;
        }
    }
    Ok(out)
}

/// Random symmetric subset with at least `target` elements, grown by
/// adjoining random `g` together with `g⁻¹`.
pub fn random_symmetric_subset<R: Rng>(index: Arc<GroupIndex>, target: usize, rng: &mut R) -> Result<GroupSubset> {
    let n = index.len();
    if target > n {
        return Err(Error::InvalidSubset(format!("target {target} exceeds group size {n}")));
    }
    let mut s = GroupSubset::empty(index.clone());
    while s.len() < target {
        let i = rng.gen_range(0..n);
        let j = index.inv(i).ok_or_else(|| Error::InvalidSubset("index not closed under inverses".into()))?;
        s.insert(i)?;
        s.insert(j)?;
    }
    Ok(s)
}

/// Words of length at most `r` in the generators (given as indices).
pub fn ball(index: Arc<GroupIndex>, generators: &[usize], r: u32) -> Result<GroupSubset> {
    let mut step = GroupSubset::from_indices(index.clone(), generators)?;
    step.insert(index.identity().ok_or_else(|| Error::InvalidSubset("index lacks the identity".into()))?)?;
    let mut acc = GroupSubset::identity(index)?;
    for _ in 0..r {
        acc = product_set(&acc, &step)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisParams {
    pub delta: f64,
    pub epsilon: f64,
    pub l: u32,
    pub generators: GeneratingSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    /// `lcm(q₁,q₂,q₃)`.
    pub q: u64,
    pub walk_mass: String,
    pub walk_mass_ok: bool,
    pub walk_length_ok: bool,
    pub size_ok: bool,
    pub hypotheses_hold: bool,
    /// `|AAA| > |A|^{1+δ}`.
    pub conclusion_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub size: usize,
    pub triple_size: usize,
    pub group_size: usize,
    pub exponent: f64,
    pub flags: Option<HypothesisFlags>,
}

/// `e = ln|AAA| / ln|A|` (and `1` when `|A| = 1`).
pub fn growth_exponent(a: &GroupSubset, params: Option<&HypothesisParams>) -> Result<GrowthReport> {
    if a.is_empty() {
        return Err(Error::InvalidSubset("A is empty".into()));
    }
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric("A is not closed under inverses".into()));
    }
    let aa = product_set(a, a)?;
    let aaa = product_set(&aa, a)?;
    let exponent = exponent_of(a.len(), aaa.len());
    let group_size = a.index.len();
    let flags = params.map(|p| hypothesis_flags(a, aaa.len(), group_size, p)).transpose()?;
    Ok(GrowthReport { size: a.len(), triple_size: aaa.len(), group_size, exponent, flags })
}

pub fn exponent_of(size: usize, triple: usize) -> f64 {
    if size <= 1 {
        1.0
    } else {
        (triple as f64).ln() / (size as f64).ln()
    }
}

fn hypothesis_flags(a: &GroupSubset, triple: usize, group_size: usize, p: &HypothesisParams) -> Result<HypothesisFlags> {
    let moduli = a.index.moduli();
    let q = moduli.0.iter().fold(1u64, |acc, &m| acc.lcm(&m));
    let g = build_cayley(&p.generators, moduli)?;
    let mut mass = None;
    if p.l == 0 {
        return Err(Error::ZeroPower);
    }
    for_each_walk_power(&g, p.l, |l, mu| {
        if l == p.l {
            let mut num = num_bigint::BigUint::from(0u32);
            for v in mu.support() {
                if let Some(i) = a.index.index_of_code(g.index().code_at(v)) {
                    if a.contains(i) {
                        num += mu.numerator(v);
                    }
                }
            }
            mass = Some(num_rational::Ratio::new(num, mu.denominator().clone()));
        }
        Ok(())
    })?;
    let mass = mass.expect("l >= 1");
    let qf = q as f64;
    let walk_mass_ok = ratio_f64(&mass) > qf.powf(-p.delta);
    let walk_length_ok = p.l as f64 > qf.ln() / p.delta;
    let size_ok = (a.len() as f64) < (group_size as f64).powf(1.0 - p.epsilon);
    Ok(HypothesisFlags {
        q,
        walk_mass: ratio_string(&mass),
        walk_mass_ok,
        walk_length_ok,
        size_ok,
        hypotheses_hold: walk_mass_ok && walk_length_ok && size_ok,
        conclusion_holds: (triple as f64) > (a.len() as f64).powf(1.0 + p.delta),
    })
}

/// Triples `≡ 1 mod (q₁′,q₂′,q₃′)` inside the full `Γ` indexed by `index`.
pub fn congruence_subgroup(q_prime: [u64; 3], index: Arc<GroupIndex>) -> Result<GroupSubset> {
    let group = index.group().clone();
    let moduli = group.moduli();
    let mut kernels: Vec<Vec<u32>> = Vec::with_capacity(3);
    for i in 0..3 {
        let (qp, q) = (q_prime[i], moduli.get(i));
        if qp == 0 || q % qp != 0 {
            return Err(Error::NotDivisor { target: qp, modulus: q });
        }
        let f = group.factor(i);
        let ker = (0..f.len() as u32)
            .filter(|&j| f.element(j).reduce(qp).map(|m| m.is_identity()).unwrap_or(false))
            .collect();
        kernels.push(ker);
    }
    let mut s = GroupSubset::empty(index.clone());
    for &a in &kernels[0] {
        for &b in &kernels[1] {
            for &c in &kernels[2] {
                let code = group.encode([a, b, c]);
                let i = index.index_of_code(code).ok_or_else(|| Error::InvalidSubset("index does not contain the congruence subgroup".into()))?;
                s.insert(i)?;
            }
        }
    }
    Ok(s)
}

/// Outcome of a covering search over stages `X_0 ⊆ X_1 ⊆ …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverResult {
    /// `false` when the stage cap was hit before the stages stabilised and
    /// before the whole ambient set was covered; fields then hold the best so far.
    pub found: bool,
    pub k_star: u32,
    pub q_prime: [u64; 3],
    pub stages: u32,
    pub stabilized: bool,
    /// `|X_k|` for `k = 0..=stages`.
    pub sizes: Vec<usize>,
}

/// Candidates are tried in minimality order (product, then lexicographic);
/// `X_0` must cover the last candidate.
fn cover_search<F>(candidates: &[([u64; 3], FixedBitSet)], x0: FixedBitSet, k_max: u32, mut next: F) -> Result<(CoverResult, Vec<FixedBitSet>)>
where
    F: FnMut(&FixedBitSet) -> Result<FixedBitSet>,
{
    let mut first: Vec<Option<u32>> = vec![None; candidates.len()];
    let mut stages = vec![x0];
    let mut stabilized = false;
    loop {
        let k = stages.len() as u32 - 1;
        let x = stages.last().unwrap();
        for (slot, (_, target)) in first.iter_mut().zip(candidates) {
            if slot.is_none() && target.is_subset(x) {
                *slot = Some(k);
            }
        }
        if first[0].is_some() || stabilized || k >= k_max {
            break;
        }
        let y = next(x)?;
        stabilized = &y == x;
        stages.push(y);
    }
    let best = first.iter().position(|f| f.is_some()).ok_or_else(|| Error::Precondition("X_0 covers no candidate".into()))?;
    let k = stages.len() as u32 - 1;
    let result = CoverResult {
        found: first[0].is_some() || stabilized,
        k_star: first[best].unwrap(),
        q_prime: candidates[best].0,
        stages: k,
        stabilized,
        sizes: stages.iter().map(|s| s.count_ones(..)).collect(),
    };
    Ok((result, stages))
}

fn sorted_triples(choices: [Vec<u64>; 3]) -> Vec<[u64; 3]> {
    let mut out = Vec::new();
    for &a in &choices[0] {
        for &b in &choices[1] {
            for &c in &choices[2] {
                out.push([a, b, c]);
            }
        }
    }
    out.sort_by_key(|t| (t[0] as u128 * t[1] as u128 * t[2] as u128, *t));
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedGeneration {
    pub result: CoverResult,
    pub identity_adjoined: bool,
    /// `Γ(q′) ⊆ A^{k*}`.
    pub contains_at_k_star: bool,
    /// `Γ(q′) ⊄ A^{k*−1}`; `None` when `k* = 0`.
    pub excluded_before: Option<bool>,
    pub densities: Densities,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Densities {
    /// `|A| / |Γ|`.
    pub fraction: f64,
    /// `ln|A| / ln|Γ|`.
    pub relative_exponent: f64,
    /// `ln|A| / ln(q₁q₂q₃)`, to compare with `3 − δ`.
    pub modulus_exponent: f64,
}

fn densities(size: usize, group: usize, moduli: Moduli) -> Densities {
    let qq = moduli.0.iter().map(|&q| q as f64).product::<f64>();
    let s = size as f64;
    Densities {
        fraction: s / group as f64,
        relative_exponent: if group > 1 { s.ln() / (group as f64).ln() } else { 1.0 },
        modulus_exponent: if qq > 1.0 { s.ln() / qq.ln() } else { 1.0 },
    }
}

/// Least `k ≤ k_max` and minimal exact divisors `q′ᵢ ‖ qᵢ` with
/// `A^k ⊇ Γ(q′)`. `A` must be a symmetric subset of the full group.
pub fn bounded_generation_search(a: &GroupSubset, k_max: u32) -> Result<BoundedGeneration> {
    let index = a.index.clone();
    let order = index.group().order();
    if index.len() as u64 != order {
        return Err(Error::Precondition("bounded generation needs the full group index".into()));
    }
    if a.is_empty() {
        return Err(Error::InvalidSubset("A is empty".into()));
    }
    if !a.is_symmetric() {
        return Err(Error::NotSymmetric("A is not closed under inverses".into()));
    }
    let mut a = a.clone();
    let identity_adjoined = !a.contains_identity();
    a.insert(index.identity().expect("full index"))?;
    let moduli = index.moduli();
    let triples = sorted_triples([0, 1, 2].map(|i| exact_divisors(moduli.get(i)).expect("valid modulus")));
    let candidates: Vec<([u64; 3], FixedBitSet)> = triples
        .into_iter()
        .map(|t| Ok((t, congruence_subgroup(t, index.clone())?.bits)))
        .collect::<Result<_>>()?;
    let x0 = GroupSubset::identity(index.clone())?.bits;
    let (result, stages) = cover_search(&candidates, x0, k_max, |x| product_bits(&GroupSubset::from_bits(index.clone(), x.clone()), &a.bits))?;
    let target = &candidates.iter().find(|c| c.0 == result.q_prime).unwrap().1;
    let k = result.k_star as usize;
    Ok(BoundedGeneration {
        contains_at_k_star: target.is_subset(&stages[k]),
        excluded_before: (k > 0).then(|| !target.is_subset(&stages[k - 1])),
        densities: densities(a.len(), index.len(), moduli),
        identity_adjoined,
        result,
    })
}

/// Subset of `ℤ/q₁ × ℤ/q₂ × ℤ/q₃`, coded as `(x₁·q₂ + x₂)·q₃ + x₃`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueTripleSet {
    moduli: [u64; 3],
    bits: FixedBitSet,
}

/// Ambient size limit for residue triple sets.
pub const RESIDUE_CAP: u64 = 1 << 24;

impl ResidueTripleSet {
    pub fn empty(moduli: [u64; 3]) -> Result<Self> {
        let size = moduli.iter().try_fold(1u64, |a, &q| if q == 0 { None } else { a.checked_mul(q) });
        match size {
            Some(n) if n <= RESIDUE_CAP => Ok(Self { moduli, bits: FixedBitSet::with_capacity(n as usize) }),
            Some(n) => Err(Error::CapExceeded { what: "residue triple set", needed: n as u128, cap: RESIDUE_CAP as u128 }),
            None => Err(Error::InvalidModulus(0)),
        }
    }

    pub fn full(moduli: [u64; 3]) -> Result<Self> {
        let mut s = Self::empty(moduli)?;
        s.bits.insert_range(..);
        Ok(s)
    }

    pub fn from_elements(moduli: [u64; 3], elems: &[[u64; 3]]) -> Result<Self> {
        let mut s = Self::empty(moduli)?;
        for e in elems {
            s.insert(*e);
        }
        Ok(s)
    }

    pub fn moduli(&self) -> [u64; 3] {
        self.moduli
    }

    fn encode(&self, x: [u64; 3]) -> usize {
        let [_, q2, q3] = self.moduli;
        (((x[0] % self.moduli[0]) * q2 + x[1] % q2) * q3 + x[2] % q3) as usize
    }

    fn decode(&self, c: usize) -> [u64; 3] {
        let [_, q2, q3] = self.moduli;
        let c = c as u64;
        [c / (q2 * q3), (c / q3) % q2, c % q3]
    }

    /// Inserts the reduction of `x`.
    pub fn insert(&mut self, x: [u64; 3]) {
        let c = self.encode(x);
        self.bits.insert(c);
    }

    pub fn contains(&self, x: [u64; 3]) -> bool {
        self.bits.contains(self.encode(x))
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn elements(&self) -> Vec<[u64; 3]> {
        self.bits.ones().map(|c| self.decode(c)).collect()
    }

    fn combine(&self, other: &Self, op: impl Fn(u64, u64, u64) -> u64) -> Result<Self> {
        if self.moduli != other.moduli {
            return Err(Error::ModulusMismatch(self.moduli.iter().product(), other.moduli.iter().product()));
        }
        let mut out = Self::empty(self.moduli)?;
        let ys = other.elements();
        for x in self.elements() {
            for y in &ys {
                let z = [0, 1, 2].map(|i| op(x[i], y[i], self.moduli[i]));
                out.insert(z);
            }
        }
        Ok(out)
    }

    /// `{ab}` with componentwise multiplication.
    pub fn pointwise_product(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b, q| ((a as u128 * b as u128) % q as u128) as u64)
    }

    /// `{a − b}`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b, q| (a + q - b) % q)
    }

    /// `{a + b}`.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b, q| (a + b) % q)
    }

    /// The sublattice `q₁′ℤ/q₁ × q₂′ℤ/q₂ × q₃′ℤ/q₃`.
    pub fn lattice(moduli: [u64; 3], q_prime: [u64; 3]) -> Result<Self> {
        for i in 0..3 {
            if q_prime[i] == 0 || moduli[i] % q_prime[i] != 0 {
                return Err(Error::NotDivisor { target: q_prime[i], modulus: moduli[i] });
            }
        }
        let mut s = Self::empty(moduli)?;
        let steps = |i: usize| (0..moduli[i]).step_by(q_prime[i] as usize);
        for a in steps(0) {
            for b in steps(1) {
                for c in steps(2) {
                    s.insert([a, b, c]);
                }
            }
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumsetCover {
    pub result: CoverResult,
    /// `|AB − AB|`.
    pub difference_size: usize,
    pub contains_at_m_star: bool,
    pub excluded_before: Option<bool>,
}

/// Least `m ≤ m_max` and minimal divisors `q′ᵢ | qᵢ` with
/// `Σ_m (AB − AB) ⊇ q′ℤ/q` (with `Σ_0 = {0}`).
pub fn sumset_cover(a: &ResidueTripleSet, b: &ResidueTripleSet, m_max: u32) -> Result<SumsetCover> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidSubset("A and B must be nonempty".into()));
    }
    let moduli = a.moduli;
    let ab = a.pointwise_product(b)?;
    let c = ab.difference(&ab)?;
    let triples = sorted_triples([0, 1, 2].map(|i| divisors(moduli[i]).expect("valid modulus")));
    let candidates: Vec<([u64; 3], FixedBitSet)> = triples
        .into_iter()
        .map(|t| Ok((t, ResidueTripleSet::lattice(moduli, t)?.bits)))
        .collect::<Result<_>>()?;
    let x0 = ResidueTripleSet::from_elements(moduli, &[[0, 0, 0]])?.bits;
    let (result, stages) = cover_search(&candidates, x0, m_max, |x| {
        let cur = ResidueTripleSet { moduli, bits: x.clone() };
        Ok(cur.sum(&c)?.bits)
    })?;
    let target = &candidates.iter().find(|t| t.0 == result.q_prime).unwrap().1;
    let m = result.k_star as usize;
    Ok(SumsetCover {
        contains_at_m_star: target.is_subset(&stages[m]),
        excluded_before: (m > 0).then(|| !target.is_subset(&stages[m - 1])),
        difference_size: c.len(),
        result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genset::{reduced_codes, Preset};
    use crate::sl2::group_order;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    fn gamma(q: u64) -> Arc<GroupIndex> {
        Arc::new(GroupIndex::full(Moduli::uniform(q).unwrap()).unwrap())
    }

    fn naive_product(a: &GroupSubset, b: &GroupSubset) -> HashSet<usize> {
        let idx = a.index();
        let mut out = HashSet::new();
        for x in a.indices() {
            for y in b.indices() {
                let p = idx.element_at(x).mul(&idx.element_at(y)).unwrap();
                out.insert(idx.index_of(&p).unwrap());
            }
        }
        out
    }

    #[test]
    fn product_with_identity_and_subgroups() {
        let idx = gamma(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_symmetric_subset(idx.clone(), 10, &mut rng).unwrap();
        let e = GroupSubset::identity(idx.clone()).unwrap();
        assert_eq!(product_set(&a, &e).unwrap(), a);
        assert_eq!(product_set(&e, &a).unwrap(), a);
        let h = congruence_subgroup([1, 2, 2], idx.clone()).unwrap();
        assert_eq!(product_set(&h, &h).unwrap(), h);
    }

    #[test]
    fn product_matches_pairwise_oracle() {
        let idx = gamma(2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let a = random_symmetric_subset(idx.clone(), 10, &mut rng).unwrap();
            let p = product_set(&a, &a).unwrap();
            let want = naive_product(&a, &a);
            assert_eq!(p.len(), want.len());
            assert!(want.iter().all(|&i| p.contains(i)));
        }
    }

    #[test]
    fn product_monotone_and_symmetric() {
        let idx = gamma(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = random_symmetric_subset(idx.clone(), 20, &mut rng).unwrap();
            let extra = random_symmetric_subset(idx.clone(), 6, &mut rng).unwrap();
            let bigger = a.union(&extra).unwrap();
            let b = random_symmetric_subset(idx.clone(), 15, &mut rng).unwrap();
            assert!(product_set(&a, &b).unwrap().is_subset(&product_set(&bigger, &b).unwrap()));
            let aaa = product_set(&product_set(&a, &a).unwrap(), &a).unwrap();
            assert!(aaa.is_symmetric());
        }
    }

    #[test]
    fn exponents_of_subgroups_and_full_group() {
        let idx = gamma(3);
        let full = GroupSubset::full(idx.clone());
        let r = growth_exponent(&full, None).unwrap();
        assert_eq!(r.exponent, 1.0);
        let h = congruence_subgroup([3, 1, 3], idx.clone()).unwrap();
        let r = growth_exponent(&h, None).unwrap();
        assert_eq!((r.size, r.triple_size, r.exponent), (24, 24, 1.0));
        let e = GroupSubset::identity(idx).unwrap();
        assert_eq!(growth_exponent(&e, None).unwrap().exponent, 1.0);
    }

    #[test]
    fn hypothesis_flags_on_full_group() {
        let idx = gamma(2);
        let params = HypothesisParams { delta: 0.1, epsilon: 0.1, l: 4, generators: GeneratingSet::preset(Preset::Twisted) };
        let r = growth_exponent(&GroupSubset::full(idx), Some(&params)).unwrap();
        let f = r.flags.unwrap();
        assert!(!f.size_ok);
        assert!(!f.hypotheses_hold);
        assert_eq!(f.walk_mass, "1/1");
        assert!(f.walk_mass_ok);
        assert!(!f.walk_length_ok);
        assert!(!f.conclusion_holds);
    }

    #[test]
    fn ball_of_radius_two() {
        let idx = gamma(3);
        let s = GeneratingSet::preset(Preset::Twisted);
        let gens: Vec<usize> = reduced_codes(&s, idx.group()).unwrap().iter().map(|&c| idx.index_of_code(c).unwrap()).collect();
        let b = ball(idx.clone(), &gens, 2).unwrap();
        let mut want: HashSet<usize> = HashSet::from([idx.identity().unwrap()]);
        for &x in &gens {
            want.insert(x);
            for &y in &gens {
                want.insert(idx.mul(x, y).unwrap());
            }
        }
        assert_eq!(b.len(), want.len());
        let r = growth_exponent(&b, None).unwrap();
        assert!(r.exponent > 1.0);
    }

    #[test]
    fn congruence_sizes() {
        let idx = gamma(4);
        assert_eq!(congruence_subgroup([2, 2, 2], idx.clone()).unwrap().len(), 512);
        assert_eq!(congruence_subgroup([1, 1, 1], idx.clone()).unwrap().len(), idx.len());
        assert_eq!(congruence_subgroup([4, 4, 4], idx.clone()).unwrap().len(), 1);
        assert!(congruence_subgroup([3, 1, 1], idx.clone()).is_err());
        let m = Moduli::new(6, 4, 3).unwrap();
        let idx = Arc::new(GroupIndex::full(m).unwrap());
        let s = congruence_subgroup([2, 4, 1], idx).unwrap();
        let want = group_order(6).unwrap() / group_order(2).unwrap() * group_order(3).unwrap();
        assert_eq!(s.len() as u128, want);
    }

    #[test]
    fn congruence_matches_direct_kernel() {
        let idx = gamma(4);
        let s = congruence_subgroup([2, 1, 4], idx.clone()).unwrap();
        let direct: Vec<usize> = (0..idx.len())
            .filter(|&i| {
                let g = idx.element_at(i);
                g.0[0].reduce(2).unwrap().is_identity() && g.0[2].is_identity()
            })
            .collect();
        assert_eq!(s.indices(), direct);
    }

    #[test]
    fn bounded_generation_full_group() {
        let idx = gamma(2);
        let r = bounded_generation_search(&GroupSubset::full(idx), 5).unwrap();
        assert!(r.result.found);
        assert_eq!((r.result.k_star, r.result.q_prime), (1, [1, 1, 1]));
        assert!(!r.identity_adjoined);
        assert_eq!(r.excluded_before, Some(true));
        assert!(r.contains_at_k_star);
    }

    #[test]
    fn bounded_generation_proper_subgroup_stabilises() {
        // Γ(2) in Γ₄ is a subgroup: stabilises covering only itself
        let idx = gamma(4);
        let h = congruence_subgroup([2, 2, 2], idx.clone()).unwrap();
        let r = bounded_generation_search(&h, 10).unwrap();
        assert!(r.result.found && r.result.stabilized);
        assert_eq!(r.result.q_prime, [4, 4, 4]);
        assert_eq!(r.result.k_star, 0);
        assert_eq!(r.excluded_before, None);
    }

    #[test]
    fn bounded_generation_cap_reports_best_so_far() {
        let idx = gamma(3);
        let s = GeneratingSet::preset(Preset::Twisted);
        let gens: Vec<usize> = reduced_codes(&s, idx.group()).unwrap().iter().map(|&c| idx.index_of_code(c).unwrap()).collect();
        let a = GroupSubset::from_indices(idx, &gens).unwrap();
        let r = bounded_generation_search(&a, 2).unwrap();
        assert!(!r.result.found);
        assert!(r.identity_adjoined);
        assert_eq!(r.result.stages, 2);
        let r = bounded_generation_search(&a, 40).unwrap();
        assert!(r.result.found);
        assert_eq!(r.result.q_prime, [1, 1, 1]);
        assert_eq!(r.excluded_before, Some(true));
    }

    #[test]
    fn bounded_generation_dense_subset() {
        let idx = gamma(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_symmetric_subset(idx.clone(), (idx.len() * 9).div_ceil(10), &mut rng).unwrap();
        let r = bounded_generation_search(&a, 6).unwrap();
        assert!(r.result.found);
        assert!(r.result.k_star <= 3);
        assert_eq!(r.result.q_prime, [1, 1, 1]);
        // explicit powers
        let mut p = GroupSubset::identity(idx.clone()).unwrap();
        let mut a1 = a.clone();
        a1.insert(idx.identity().unwrap()).unwrap();
        for _ in 0..r.result.k_star - 1 {
            p = product_set(&p, &a1).unwrap();
        }
        assert!(p.len() < idx.len());
        assert_eq!(product_set(&p, &a1).unwrap().len(), idx.len());
    }

    #[test]
    fn residue_set_arithmetic() {
        let m = [5, 5, 5];
        let full = ResidueTripleSet::full(m).unwrap();
        let r = sumset_cover(&full, &full, 3).unwrap();
        assert_eq!((r.result.k_star, r.result.q_prime), (1, [1, 1, 1]));
        let zero = ResidueTripleSet::from_elements(m, &[[0, 0, 0]]).unwrap();
        let r = sumset_cover(&zero, &zero, 3).unwrap();
        assert!(r.result.found && r.result.stabilized);
        assert_eq!((r.result.k_star, r.result.q_prime), (0, [5, 5, 5]));
        assert_eq!(r.difference_size, 1);
        assert_eq!(ResidueTripleSet::lattice([4, 6, 1], [2, 3, 1]).unwrap().len(), 4);
    }

    #[test]
    fn sumset_partial_lattice() {
        // A = B = {(x, 0, 0)} generate only the first axis.
        let m = [4, 2, 3];
        let a = ResidueTripleSet::from_elements(m, &[[1, 0, 0], [2, 0, 0]]).unwrap();
        let r = sumset_cover(&a, &a, 10).unwrap();
        assert_eq!(r.result.q_prime, [1, 2, 3]);
        assert!(r.contains_at_m_star);
        assert_eq!(r.excluded_before, Some(true));
    }

    fn naive_sumset_cover(a: &[[u64; 3]], b: &[[u64; 3]], m: [u64; 3], m_max: u32) -> (u32, [u64; 3]) {
        let mut ab = HashSet::new();
        for x in a {
            for y in b {
                ab.insert([0, 1, 2].map(|i| x[i] * y[i] % m[i]));
            }
        }
        let mut c = HashSet::new();
        for x in &ab {
            for y in &ab {
                c.insert([0, 1, 2].map(|i| (x[i] + m[i] - y[i]) % m[i]));
            }
        }
        let mut stages: Vec<HashSet<[u64; 3]>> = vec![HashSet::from([[0, 0, 0]])];
        for _ in 0..m_max {
            let last = stages.last().unwrap();
            let mut next = HashSet::new();
            for x in last {
                for y in &c {
                    next.insert([0, 1, 2].map(|i| (x[i] + y[i]) % m[i]));
                }
            }
            let done = &next == last;
            stages.push(next);
            if done {
                break;
            }
        }
        let last = stages.last().unwrap();
        let mut best: Option<(u64, [u64; 3])> = None;
        let ds = |q: u64| (1..=q).filter(move |d| q % d == 0);
        for d1 in ds(m[0]) {
            for d2 in ds(m[1]) {
                for d3 in ds(m[2]) {
                    let lat: Vec<[u64; 3]> = (0..m[0]).step_by(d1 as usize).flat_map(|x| (0..m[1]).step_by(d2 as usize).flat_map(move |y| (0..m[2]).step_by(d3 as usize).map(move |z| [x, y, z]))).collect();
                    if lat.iter().all(|v| last.contains(v)) {
                        let key = (d1 * d2 * d3, [d1, d2, d3]);
                        if best.is_none_or(|b| key < b) {
                            best = Some(key);
                        }
                    }
                }
            }
        }
        let q = best.unwrap().1;
        let lat = ResidueTripleSet::lattice(m, q).unwrap().elements();
        let k = stages.iter().position(|s| lat.iter().all(|v| s.contains(v))).unwrap();
        (k as u32, q)
    }

    #[test]
    fn sumset_matches_naive_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = [5, 5, 5];
        for _ in 0..6 {
            let mut all: Vec<[u64; 3]> = (0..125).map(|c| [c / 25, (c / 5) % 5, c % 5]).collect();
            for i in 0..all.len() {
                let j = rng.gen_range(i..all.len());
                all.swap(i, j);
            }
            let (a, b) = all.split_at(62);
            let sa = ResidueTripleSet::from_elements(m, a).unwrap();
            let sb = ResidueTripleSet::from_elements(m, b).unwrap();
            let r = sumset_cover(&sa, &sb, 20).unwrap();
            assert_eq!((r.result.k_star, r.result.q_prime), naive_sumset_cover(a, b, m, 20));
        }
        // sparse sets over composite moduli
        let m = [4, 6, 2];
        for _ in 0..10 {
            let pick = |rng: &mut ChaCha8Rng| (0..3).map(|_| [rng.gen_range(0..4), 2 * rng.gen_range(0..3), 0]).collect::<Vec<_>>();
            let a = pick(&mut rng);
            let b = pick(&mut rng);
            let r = sumset_cover(&ResidueTripleSet::from_elements(m, &a).unwrap(), &ResidueTripleSet::from_elements(m, &b).unwrap(), 20).unwrap();
            assert_eq!((r.result.k_star, r.result.q_prime), naive_sumset_cover(&a, &b, m, 20));
        }
    }

    #[test]
    fn subset_csv_round_trip() {
        let idx = gamma(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_symmetric_subset(idx.clone(), 30, &mut rng).unwrap();
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        let b = GroupSubset::read_csv(idx.clone(), buf.as_slice()).unwrap();
        assert_eq!(a, b);
        assert!(GroupSubset::read_csv(idx.clone(), "index\nx\n".as_bytes()).is_err());
        assert_eq!(GroupSubset::read_csv(idx, "index\n999\n".as_bytes()).unwrap_err(), Error::VertexOutOfRange(999));
    }
}
