//! Approximate homomorphisms between small groups and the commutator
//! covering check in `Lie(SL₂)(ℤ)`.

use std::collections::VecDeque;
use std::io::{BufRead, Write};
use std::sync::Arc;

use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::factorize;
use crate::sl2::GroupIndex;

/// Largest source group for pair enumeration.
pub const PAIR_CAP: usize = 10_000;
/// Largest number of generator-image tuples for homomorphism recovery.
pub const HOM_SEARCH_CAP: u128 = 10_000_000;

/// A finite group given by its multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    n: usize,
    table: Vec<u32>,
    inv: Vec<u32>,
    identity: u32,
    generators: Vec<u32>,
}

impl GroupTable {
    /// Table of a closed [`GroupIndex`] with a greedy generating list.
    pub fn from_index(index: &GroupIndex) -> Result<Self> {
        let n = index.len();
        if n > PAIR_CAP {
            return Err(Error::CapExceeded { what: "group table", needed: n as u128, cap: PAIR_CAP as u128 });
        }
        let not_closed = || Error::InvalidSubset("index is not a group".into());
        let mut table = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                table.push(index.mul(i, j).ok_or_else(not_closed)? as u32);
            }
        }
        let inv = (0..n).map(|i| index.inv(i).map(|j| j as u32).ok_or_else(not_closed)).collect::<Result<_>>()?;
        let identity = index.identity().ok_or_else(not_closed)? as u32;
        let mut g = Self { n, table, inv, identity, generators: Vec::new() };
        g.generators = g.greedy_generators();
        Ok(g)
    }

    /// `ℤ/n` under addition.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n * n).map(|k| ((k / n + k % n) % n) as u32).collect();
        let inv = (0..n).map(|i| ((n - i) % n) as u32).collect();
        let generators = if n > 1 { vec![1] } else { Vec::new() };
        Self { n, table, inv, identity: 0, generators }
    }

    pub fn with_generators(mut self, generators: Vec<u32>) -> Result<Self> {
        if generators.iter().any(|&g| g as usize >= self.n) {
            return Err(Error::VertexOutOfRange(self.n));
        }
        if self.closure(&generators).len() != self.n {
            return Err(Error::Precondition("generators do not generate the group".into()));
        }
        self.generators = generators;
        Ok(self)
    }

    fn closure(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.n];
        seen[self.identity as usize] = true;
        let mut out = vec![self.identity];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !std::mem::replace(&mut seen[y as usize], true) {
                    out.push(y);
                }
            }
            i += 1;
        }
        out
    }

    fn greedy_generators(&self) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut reached = self.closure(&gens).len();
        for c in 0..self.n as u32 {
            if reached == self.n {
                break;
            }
            let mut trial = gens.clone();
            trial.push(c);
            let r = self.closure(&trial).len();
            if r > reached {
                gens = trial;
                reached = r;
            }
        }
        gens
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.n + b as usize]
    }

    pub fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize]
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }
}

/// A map `ψ: G₁ → G₂` given pointwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapTable {
    source: Arc<GroupTable>,
    target: Arc<GroupTable>,
    image: Vec<u32>,
}

impl MapTable {
    pub fn new(source: Arc<GroupTable>, target: Arc<GroupTable>, image: Vec<u32>) -> Result<Self> {
        if image.len() != source.order() {
            return Err(Error::InvalidSubset(format!("map has {} entries, source has {}", image.len(), source.order())));
        }
        if let Some(&bad) = image.iter().find(|&&y| y as usize >= target.order()) {
            return Err(Error::VertexOutOfRange(bad as usize));
        }
        Ok(Self { source, target, image })
    }

    pub fn source(&self) -> &Arc<GroupTable> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GroupTable> {
        &self.target
    }

    pub fn image(&self) -> &[u32] {
        &self.image
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.image[x as usize]
    }

    /// `x ↦ ψ(g·x)`.
    pub fn left_translate(&self, g: u32) -> MapTable {
        let image = (0..self.source.order() as u32).map(|x| self.apply(self.source.mul(g, x))).collect();
        MapTable { source: self.source.clone(), target: self.target.clone(), image }
    }

    /// CSV with `source_index,target_index` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "source_index,target_index")?;
        for (x, y) in self.image.iter().enumerate() {
            writeln!(w, "{x},{y}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(source: Arc<GroupTable>, target: Arc<GroupTable>, r: R) -> Result<Self> {
        let mut image: Vec<Option<u32>> = vec![None; source.order()];
        for (n, line) in r.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with("source_index") {
                continue;
            }
            let bad = || Error::Parse(format!("line {}: expected source_index,target_index", n + 1));
            let (a, b) = t.split_once(',').ok_or_else(bad)?;
            let x: usize = a.trim().parse().map_err(|_| bad())?;
            let y: u32 = b.trim().parse().map_err(|_| bad())?;
            let slot = image.get_mut(x).ok_or(Error::VertexOutOfRange(x))?;
            if slot.replace(y).is_some() {
                return Err(Error::Parse(format!("source index {x} listed twice")));
            }
        }
        let image = image
            .into_iter()
            .enumerate()
            .map(|(x, y)| y.ok_or_else(|| Error::Parse(format!("source index {x} missing"))))
            .collect::<Result<_>>()?;
        Self::new(source, target, image)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failures {
    pub count: u64,
    pub pairs: u64,
}

impl Failures {
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.count, self.pairs.max(1))
    }
}

/// Number of pairs `(x,y)` with `ψ(xy) ≠ ψ(x)ψ(y)`.
pub fn multiplicativity_failures(psi: &MapTable) -> Result<Failures> {
    let n = psi.source.order();
    if n > PAIR_CAP {
        return Err(Error::CapExceeded { what: "pair enumeration", needed: n as u128, cap: PAIR_CAP as u128 });
    }
    let count = (0..n as u32)
        .into_par_iter()
        .map(|x| {
            let px = psi.apply(x);
            (0..n as u32).filter(|&y| psi.apply(psi.source.mul(x, y)) != psi.target.mul(px, psi.apply(y))).count() as u64
        })
        .sum();
    Ok(Failures { count, pairs: (n * n) as u64 })
}

/// A homomorphism determined by the images of the source generators.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homomorphism {
    pub generator_images: Vec<u32>,
    pub image: Vec<u32>,
}

/// Every homomorphism `G₁ → G₂`, in lexicographic order of generator images.
pub fn enumerate_homomorphisms(source: &GroupTable, target: &GroupTable) -> Result<Vec<Homomorphism>> {
    let k = source.generators.len() as u32;
    let m = target.order() as u128;
    let tuples = m.checked_pow(k).filter(|&t| t <= HOM_SEARCH_CAP).ok_or(Error::CapExceeded {
        what: "homomorphism search",
        needed: m.saturating_pow(k),
        cap: HOM_SEARCH_CAP,
    })?;
    let found: Vec<Option<Homomorphism>> = (0..tuples as u64)
        .into_par_iter()
        .map(|t| {
            let mut rest = t;
            let mut imgs = vec![0u32; k as usize];
            for slot in imgs.iter_mut().rev() {
                *slot = (rest % m as u64) as u32;
                rest /= m as u64;
            }
            extend(source, target, &imgs).map(|image| Homomorphism { generator_images: imgs, image })
        })
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// Extends generator images along the Cayley graph; `None` on any conflict.
fn extend(source: &GroupTable, target: &GroupTable, imgs: &[u32]) -> Option<Vec<u32>> {
    const UNSET: u32 = u32::MAX;
    let mut f = vec![UNSET; source.order()];
    f[source.identity as usize] = target.identity;
    let mut queue = VecDeque::from([source.identity]);
    while let Some(x) = queue.pop_front() {
        for (&g, &t) in source.generators.iter().zip(imgs) {
            let y = source.mul(x, g) as usize;
            let want = target.mul(f[x as usize], t);
            if f[y] == UNSET {
                f[y] = want;
                queue.push_back(y as u32);
            } else if f[y] != want {
                return None;
            }
        }
    }
    Some(f)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "kebab-case")]
pub enum Dichotomy {
    /// Agreeing pairs below `(1−ε)|G₁|²`.
    Case1 { failures: u64, agreeing: u64, threshold: f64 },
    /// A homomorphism agreeing with `ψ` on more than `(1−√ε)|G₁|` points.
    Case2 { subset: Vec<u32>, generator_images: Vec<u32>, agreement: usize, threshold: f64 },
    DichotomyViolationCandidate { agreeing: u64, best_agreement: usize },
}

/// Dichotomy test with homomorphisms `G₁ → G₂` precomputed by
/// [`enumerate_homomorphisms`].
pub fn dichotomy_test(psi: &MapTable, epsilon: f64, homs: &[Homomorphism]) -> Result<Dichotomy> {
    if !(epsilon > 0.0 && epsilon < 1.0 / 1600.0) {
        return Err(Error::Precondition(format!("ε = {epsilon} outside (0, 1/1600)")));
    }
    let fails = multiplicativity_failures(psi)?;
    let agreeing = fails.pairs - fails.count;
    let n = psi.source.order() as f64;
    let pair_threshold = (1.0 - epsilon) * n * n;
    if (agreeing as f64) < pair_threshold {
        return Ok(Dichotomy::Case1 { failures: fails.count, agreeing, threshold: pair_threshold });
    }
    let mut best: Option<(usize, &Homomorphism)> = None;
    for h in homs {
        let a = h.image.iter().zip(&psi.image).filter(|(x, y)| x == y).count();
        if best.is_none_or(|(b, _)| a > b) {
            best = Some((a, h));
        }
    }
    let point_threshold = (1.0 - epsilon.sqrt()) * n;
    match best {
        Some((a, h)) if a as f64 > point_threshold => Ok(Dichotomy::Case2 {
            subset: (0..psi.image.len() as u32).filter(|&x| h.image[x as usize] == psi.apply(x)).collect(),
            generator_images: h.generator_images.clone(),
            agreement: a,
            threshold: point_threshold,
        }),
        other => Ok(Dichotomy::DichotomyViolationCandidate { agreeing, best_agreement: other.map_or(0, |b| b.0) }),
    }
}

/// Traceless matrix `[[x, y], [z, −x]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LieVector {
    pub x: i64,
    pub y: i64,
    pub z: i64,
}

impl LieVector {
    pub fn new(x: i64, y: i64, z: i64) -> Self {
        Self { x, y, z }
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        [[self.x, self.y], [self.z, -self.x]]
    }

    pub fn content(&self) -> i64 {
        self.x.gcd(&self.y).gcd(&self.z)
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// `[self, a] = self·a − a·self`.
    pub fn bracket(&self, a: &LieVector) -> LieVector {
        LieVector {
            x: self.y * a.z - self.z * a.y,
            y: 2 * (self.x * a.y - self.y * a.x),
            z: 2 * (self.z * a.x - self.x * a.z),
        }
    }

    /// Matrix of `a ↦ [self, a]` in the `(x, y, z)` basis.
    pub fn ad_matrix(&self) -> [[i64; 3]; 3] {
        let (x, y, z) = (self.x, self.y, self.z);
        [[0, -z, y], [-2 * y, 2 * x, 0], [2 * z, 0, -2 * x]]
    }

    fn cross(&self, o: &LieVector) -> [i128; 3] {
        let (a, b) = ([self.x, self.y, self.z].map(i128::from), [o.x, o.y, o.z].map(i128::from));
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutatorCover {
    pub holds: bool,
    /// The 3×6 matrix of `(a, b) ↦ [v,a] + [w,b]`.
    pub matrix: [[i64; 6]; 3],
    /// Elementary divisors `d₁ | d₂ | d₃`, zero past the rank.
    pub elementary_divisors: [u128; 3],
    pub gcds_with_q: [u128; 3],
}

/// Whether `[v, V] + [w, V] ⊇ 2V (mod q)`.
pub fn commutator_cover_check(v: &LieVector, w: &LieVector, q: u64) -> Result<CommutatorCover> {
    for u in [v, w] {
        if !u.is_primitive() {
            return Err(Error::NotPrimitive(u.content()));
        }
    }
    if q == 0 {
        return Err(Error::InvalidModulus(0));
    }
    let cross = v.cross(w);
    for p in factorize(q)?.primes() {
        if cross.iter().all(|c| c.rem_euclid(p as i128) == 0) {
            return Err(Error::Precondition(format!("v and w are linearly dependent mod p = {p}")));
        }
    }
    let (mv, mw) = (v.ad_matrix(), w.ad_matrix());
    let mut matrix = [[0i64; 6]; 3];
    for r in 0..3 {
        matrix[r][..3].copy_from_slice(&mv[r]);
        matrix[r][3..].copy_from_slice(&mw[r]);
    }
    let d = elementary_divisors(&matrix);
    let g = d.map(|di| di.gcd(&(q as u128)));
    Ok(CommutatorCover { holds: g.iter().all(|&x| 2 % x == 0), matrix, elementary_divisors: d, gcds_with_q: g })
}

/// Elementary divisors of a 3×6 integer matrix from its determinantal
/// divisors `D_k = gcd` of all `k×k` minors.
pub fn elementary_divisors(m: &[[i64; 6]; 3]) -> [u128; 3] {
    let a = m.map(|r| r.map(i128::from));
    let cols: Vec<usize> = (0..6).collect();
    let mut dk = [0u128; 4];
    dk[0] = 1;
    for (k, slot) in dk.iter_mut().enumerate().skip(1) {
        let mut g: u128 = 0;
        for rows in subsets(&[0, 1, 2], k) {
            for cs in subsets(&cols, k) {
                g = g.gcd(&det(&a, &rows, &cs).unsigned_abs());
            }
        }
        *slot = g;
    }
    let mut out = [0u128; 3];
    for k in 1..=3 {
        out[k - 1] = if dk[k] == 0 { 0 } else { dk[k] / dk[k - 1] };
    }
    out
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in subsets(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

fn det(a: &[[i128; 6]; 3], rows: &[usize], cols: &[usize]) -> i128 {
    let e = |r: usize, c: usize| a[rows[r]][cols[c]];
    match rows.len() {
        1 => e(0, 0),
        2 => e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0),
        _ => {
            e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::Moduli;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lambda(q: u64) -> Arc<GroupTable> {
        let idx = GroupIndex::full(Moduli::new(q, 1, 1).unwrap()).unwrap();
        Arc::new(GroupTable::from_index(&idx).unwrap())
    }

    fn hom_map(src: &Arc<GroupTable>, dst: &Arc<GroupTable>, h: &Homomorphism) -> MapTable {
        MapTable::new(src.clone(), dst.clone(), h.image.clone()).unwrap()
    }

    fn brute_failures(psi: &MapTable) -> u64 {
        let (s, t) = (psi.source(), psi.target());
        let n = s.order() as u32;
        let mut c = 0;
        for x in 0..n {
            for y in 0..n {
                if psi.apply(s.mul(x, y)) != t.mul(psi.apply(x), psi.apply(y)) {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn tables_are_groups() {
        for g in [lambda(2), lambda(3), Arc::new(GroupTable::cyclic(7))] {
            let n = g.order() as u32;
            for a in 0..n {
                assert_eq!(g.mul(a, g.inv(a)), g.identity());
                for b in 0..n {
                    for c in 0..n {
                        assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                    }
                }
            }
            assert_eq!(g.closure(g.generators()).len(), g.order());
        }
        assert_eq!(lambda(2).generators().len(), 2);
    }

    #[test]
    fn hom_counts() {
        // S₃→S₃ has 10, ℤ/6→S₃ has 6, S₃→ℤ/2 has 2, SL₂(3)→ℤ/3 has 3.
        let s3 = lambda(2);
        let c6 = Arc::new(GroupTable::cyclic(6));
        let c2 = Arc::new(GroupTable::cyclic(2));
        let c3 = Arc::new(GroupTable::cyclic(3));
        assert_eq!(enumerate_homomorphisms(&s3, &s3).unwrap().len(), 10);
        assert_eq!(enumerate_homomorphisms(&c6, &s3).unwrap().len(), 6);
        assert_eq!(enumerate_homomorphisms(&s3, &c2).unwrap().len(), 2);
        assert_eq!(enumerate_homomorphisms(&lambda(3), &c3).unwrap().len(), 3);
        for h in enumerate_homomorphisms(&lambda(3), &s3).unwrap() {
            assert_eq!(multiplicativity_failures(&hom_map(&lambda(3), &s3, &h)).unwrap().count, 0);
        }
    }

    #[test]
    fn zero_failures_iff_hom() {
        let s3 = lambda(2);
        let c2 = Arc::new(GroupTable::cyclic(2));
        let homs: Vec<Vec<u32>> = enumerate_homomorphisms(&s3, &c2).unwrap().into_iter().map(|h| h.image).collect();
        for code in 0..64u32 {
            let image: Vec<u32> = (0..6).map(|i| (code >> i) & 1).collect();
            let psi = MapTable::new(s3.clone(), c2.clone(), image.clone()).unwrap();
            let f = multiplicativity_failures(&psi).unwrap().count;
            assert_eq!(f, brute_failures(&psi));
            assert_eq!(f == 0, homs.contains(&image));
        }
    }

    #[test]
    fn constant_map_fails_everywhere() {
        let s3 = lambda(2);
        let c = (0..6).find(|&c| s3.mul(c, c) != c).unwrap();
        let psi = MapTable::new(s3.clone(), s3.clone(), vec![c; 6]).unwrap();
        let f = multiplicativity_failures(&psi).unwrap();
        assert_eq!(f.count, 36);
        assert_eq!(f.ratio(), Ratio::from_integer(1));
    }

    #[test]
    fn one_corrupted_point_count() {
        let s3 = lambda(2);
        let homs = enumerate_homomorphisms(&s3, &s3).unwrap();
        let id = homs.iter().find(|h| h.image.iter().enumerate().all(|(i, &y)| y == i as u32)).unwrap();
        let mut image = id.image.clone();
        let x0 = (0..6).find(|&x| x != s3.identity()).unwrap();
        image[x0 as usize] = s3.identity();
        let psi = MapTable::new(s3.clone(), s3.clone(), image).unwrap();
        assert_eq!(multiplicativity_failures(&psi).unwrap().count, brute_failures(&psi));
        let order = (1..=6).find(|&k| (0..k).fold(s3.identity(), |y, _| s3.mul(y, x0)) == s3.identity()).unwrap();
        let frozen = FROZEN_ONE_CORRUPTION_S3.iter().find(|r| r.0 == order).unwrap().1;
        assert_eq!(brute_failures(&psi), frozen);
    }

    #[test]
    fn left_translation_recount() {
        let g = lambda(3);
        let s3 = lambda(2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let image: Vec<u32> = (0..24).map(|_| rng.gen_range(0..6)).collect();
        let psi = MapTable::new(g.clone(), s3, image).unwrap();
        for t in [0u32, 5, 17] {
            let moved = psi.left_translate(t);
            assert_eq!(multiplicativity_failures(&moved).unwrap().count, brute_failures(&moved));
        }
    }

    #[test]
    fn dichotomy_cases() {
        let g = lambda(3);
        let s3 = lambda(2);
        let homs = enumerate_homomorphisms(&g, &s3).unwrap();
        let h = &homs[homs.len() / 2];
        match dichotomy_test(&hom_map(&g, &s3, h), 1e-4, &homs).unwrap() {
            Dichotomy::Case2 { subset, agreement, .. } => {
                assert_eq!(agreement, 24);
                assert_eq!(subset.len(), 24);
            }
            other => panic!("{other:?}"),
        }
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let image: Vec<u32> = (0..24).map(|_| rng.gen_range(0..6)).collect();
        let psi = MapTable::new(g.clone(), s3.clone(), image).unwrap();
        assert!(matches!(dichotomy_test(&psi, 1e-4, &homs).unwrap(), Dichotomy::Case1 { .. }));
        let mut image = h.image.clone();
        image[3] = (image[3] + 1) % 6;
        let psi = MapTable::new(g, s3, image).unwrap();
        assert!(matches!(dichotomy_test(&psi, 1e-4, &homs).unwrap(), Dichotomy::Case1 { .. }));
        assert!(dichotomy_test(&psi, 0.01, &homs).is_err());
    }

    #[test]
    fn hom_search_tie_break_is_lexicographic() {
        // Every hom S₃ → ℤ/2 agrees with the zero map on the kernel; the trivial
        // one wins on ties because its generator images are least.
        let s3 = lambda(2);
        let c2 = Arc::new(GroupTable::cyclic(2));
        let homs = enumerate_homomorphisms(&s3, &c2).unwrap();
        assert_eq!(homs[0].generator_images, vec![0, 0]);
        let psi = MapTable::new(s3, c2, vec![0; 6]).unwrap();
        match dichotomy_test(&psi, 1e-4, &homs).unwrap() {
            Dichotomy::Case2 { generator_images, .. } => assert_eq!(generator_images, vec![0, 0]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn map_csv_round_trip() {
        let g = lambda(2);
        let psi = MapTable::new(g.clone(), g.clone(), vec![0, 2, 1, 3, 5, 4]).unwrap();
        let mut buf = Vec::new();
        psi.write_csv(&mut buf).unwrap();
        assert_eq!(MapTable::read_csv(g.clone(), g.clone(), buf.as_slice()).unwrap(), psi);
        assert!(MapTable::read_csv(g.clone(), g.clone(), "0,1\n".as_bytes()).is_err());
        assert!(MapTable::read_csv(g.clone(), g, "0,1\n0,2\n".as_bytes()).is_err());
    }

    #[test]
    fn bracket_matches_matrix_commutator() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let v = LieVector::new(rng.gen_range(-5..=5), rng.gen_range(-5..=5), rng.gen_range(-5..=5));
            let a = LieVector::new(rng.gen_range(-5..=5), rng.gen_range(-5..=5), rng.gen_range(-5..=5));
            let (m, n) = (v.matrix(), a.matrix());
            let mul = |p: [[i64; 2]; 2], q: [[i64; 2]; 2]| {
                [[p[0][0] * q[0][0] + p[0][1] * q[1][0], p[0][0] * q[0][1] + p[0][1] * q[1][1]], [p[1][0] * q[0][0] + p[1][1] * q[1][0], p[1][0] * q[0][1] + p[1][1] * q[1][1]]]
            };
            let (ab, ba) = (mul(m, n), mul(n, m));
            let c = v.bracket(&a);
            assert_eq!(c.matrix(), [[ab[0][0] - ba[0][0], ab[0][1] - ba[0][1]], [ab[1][0] - ba[1][0], ab[1][1] - ba[1][1]]]);
            let ad = v.ad_matrix();
            let col = [a.x, a.y, a.z];
            let via = [0, 1, 2].map(|r| (0..3).map(|k| ad[r][k] * col[k]).sum::<i64>());
            assert_eq!(via, [c.x, c.y, c.z]);
        }
    }

    /// Exhaustive scan of `(ℤ/q)⁶ → (ℤ/q)³`.
    fn scan(v: &LieVector, w: &LieVector, q: u64) -> bool {
        let q = q as i64;
        let mut hit = vec![false; (q * q * q) as usize];
        for code in 0..q.pow(6) {
            let mut c = code;
            let mut d = [0i64; 6];
            for slot in d.iter_mut() {
                *slot = c % q;
                c /= q;
            }
            let a = v.bracket(&LieVector::new(d[0], d[1], d[2]));
            let b = w.bracket(&LieVector::new(d[3], d[4], d[5]));
            let t = [a.x + b.x, a.y + b.y, a.z + b.z].map(|x| x.rem_euclid(q));
            hit[((t[0] * q + t[1]) * q + t[2]) as usize] = true;
        }
        (0..q * q * q).all(|c| {
            let t = [c / (q * q), (c / q) % q, c % q].map(|x| (2 * x) % q);
            hit[((t[0] * q + t[1]) * q + t[2]) as usize]
        })
    }

    #[test]
    fn commutator_examples() {
        let e = LieVector::new(0, 1, 0);
        let f = LieVector::new(0, 0, 1);
        let h = LieVector::new(1, 0, 0);
        assert!(commutator_cover_check(&e, &f, 5).unwrap().holds);
        assert!(scan(&e, &f, 5));
        assert!(matches!(commutator_cover_check(&e, &e, 5), Err(Error::Precondition(_))));
        assert_eq!(commutator_cover_check(&h, &e, 2).unwrap().holds, scan(&h, &e, 2));
        assert_eq!(commutator_cover_check(&LieVector::new(2, 0, 2), &e, 3), Err(Error::NotPrimitive(2)));
    }

    #[test]
    fn commutator_matches_scan_small() {
        let mut vecs = Vec::new();
        for x in -2..=2 {
            for y in -2..=2 {
                for z in -2..=2 {
                    let v = LieVector::new(x, y, z);
                    if v.is_primitive() {
                        vecs.push(v);
                    }
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for q in 2..=4u64 {
            for _ in 0..40 {
                let v = vecs[rng.gen_range(0..vecs.len())];
                let w = vecs[rng.gen_range(0..vecs.len())];
                match commutator_cover_check(&v, &w, q) {
                    Ok(c) => assert_eq!(c.holds, scan(&v, &w, q), "{v:?} {w:?} {q}"),
                    Err(Error::Precondition(_)) => {}
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }

    #[test]
    fn elementary_divisors_examples() {
        let m = [[2, 0, 0, 0, 0, 0], [0, 6, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0]];
        assert_eq!(elementary_divisors(&m), [2, 6, 0]);
        let m = [[2, 4, 0, 0, 0, 0], [0, 0, 3, 0, 0, 0], [0, 0, 0, 0, 0, 5]];
        assert_eq!(elementary_divisors(&m), [1, 1, 30]);
    }

    /// (order of the corrupted point, failing pairs).
    const FROZEN_ONE_CORRUPTION_S3: [(usize, u64); 2] = [(2, 12), (3, 13)];
}
