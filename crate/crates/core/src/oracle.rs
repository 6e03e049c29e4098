//! Brute-force reference computations. Each one avoids the optimized code
//! path it checks: products go through explicit matrix multiplication, sets
//! through plain vectors, and counts through direct enumeration.

use num_rational::Ratio;

use crate::cayley::CayleyGraph;
use crate::error::{Error, Result};
use crate::glue::LieVector;
use crate::growth::GroupSubset;
use crate::sl2::{GroupIndex, Moduli, TripleElement};

fn primes_dividing(q: u64) -> Vec<u64> {
    (2..=q).filter(|&p| q % p == 0 && (2..p).all(|d| p % d != 0)).collect()
}

/// `q³ ∏_{p | q} (1 − p⁻²)` as an exact rational.
pub fn lambda_order_formula(q: u64) -> Ratio<u128> {
    let q3 = Ratio::from_integer((q as u128).pow(3));
    primes_dividing(q).into_iter().fold(q3, |acc, p| {
        let p2 = (p as u128) * (p as u128);
        acc * Ratio::new(p2 - 1, p2)
    })
}

/// `#{(a,b,c,d) ∈ (ℤ/q)⁴ : ad − bc ≡ 1}`.
pub fn count_det_one(q: u64) -> u64 {
    let q = q as i64;
    let mut n = 0;
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                for d in 0..q {
                    if (a * d - b * c - 1).rem_euclid(q) == 0 {
                        n += 1;
                    }
                }
            }
        }
    }
    n
}

fn generator_elements(g: &CayleyGraph) -> Vec<TripleElement> {
    let group = g.index().group();
    g.generator_codes().iter().map(|&c| group.element(c)).collect()
}

fn times(index: &GroupIndex, x: usize, s: &TripleElement) -> Result<usize> {
    let p = index.element_at(x).mul(s)?;
    index.index_of(&p).ok_or_else(|| Error::InvalidSubset("product left the vertex set".into()))
}

/// Dense `T` with `T[v][w] = #{s : v·s = w} / |S|`, from matrix products.
pub fn dense_walk_operator(g: &CayleyGraph) -> Result<Vec<Vec<f64>>> {
    let index = g.index();
    let gens = generator_elements(g);
    let n = index.len();
    let k = gens.len() as f64;
    let mut t = vec![vec![0.0; n]; n];
    for (v, row) in t.iter_mut().enumerate() {
        for s in &gens {
            row[times(index, v, s)?] += 1.0 / k;
        }
    }
    Ok(t)
}

/// `T^l δ_e` for `l = 1..=l_max` by repeated dense matrix-vector products.
pub fn walk_powers_of_delta(g: &CayleyGraph, l_max: u32) -> Result<Vec<Vec<f64>>> {
    let t = dense_walk_operator(g)?;
    let e = g.index().identity().ok_or_else(|| Error::InvalidSubset("no identity".into()))?;
    let mut x = vec![0.0; t.len()];
    x[e] = 1.0;
    let mut out = Vec::new();
    for _ in 0..l_max {
        x = t.iter().map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum()).collect();
        out.push(x.clone());
    }
    Ok(out)
}

/// Minimum of `|∂A|/|A|` over all `0 < |A| ≤ N/2`, by plain subset loops.
pub fn cheeger_brute(g: &CayleyGraph) -> Result<Ratio<u64>> {
    let index = g.index();
    let n = index.len();
    if !(2..=20).contains(&n) {
        return Err(Error::TooLargeForExactCheeger(n));
    }
    let gens = generator_elements(g);
    let mut edges = Vec::new();
    for v in 0..n {
        for s in &gens {
            edges.push((v, times(index, v, s)?));
        }
    }
    let mut best: Option<Ratio<u64>> = None;
    for mask in 1u32..(1 << n) {
        let size = mask.count_ones() as u64;
        if 2 * size > n as u64 {
            continue;
        }
        let inside = |v: usize| mask >> v & 1 == 1;
        // Each undirected edge appears once from each endpoint.
        let boundary = edges.iter().filter(|&&(a, b)| inside(a) && !inside(b)).count() as u64;
        let r = Ratio::new(boundary, size);
        if best.is_none_or(|b| r < b) {
            best = Some(r);
        }
    }
    Ok(best.expect("n >= 2"))
}

fn product_of(index: &GroupIndex, xs: &[usize], ys: &[usize]) -> Result<Vec<usize>> {
    let ex: Vec<TripleElement> = xs.iter().map(|&i| index.element_at(i)).collect();
    let ey: Vec<TripleElement> = ys.iter().map(|&i| index.element_at(i)).collect();
    let mut seen = vec![false; index.len()];
    for a in &ex {
        for b in &ey {
            let p = a.mul(b)?;
            let i = index.index_of(&p).ok_or_else(|| Error::InvalidSubset("product left the index".into()))?;
            seen[i] = true;
        }
    }
    Ok((0..seen.len()).filter(|&i| seen[i]).collect())
}

/// `|A·A·A|` from explicit matrix products.
pub fn triple_product_size(a: &GroupSubset) -> Result<usize> {
    let index = a.index();
    let xs = a.indices();
    let aa = product_of(index, &xs, &xs)?;
    Ok(product_of(index, &aa, &xs)?.len())
}

/// `X_0 = {e}`, `X_k = X_{k−1}·(A ∪ {e})` for `k = 0..=k_max`, sorted.
pub fn power_stages(a: &GroupSubset, k_max: u32) -> Result<Vec<Vec<usize>>> {
    let index = a.index();
    let e = index.identity().ok_or_else(|| Error::InvalidSubset("no identity".into()))?;
    let mut step = a.indices();
    if !step.contains(&e) {
        step.push(e);
    }
    let mut stages = vec![vec![e]];
    for _ in 0..k_max {
        let next = product_of(index, stages.last().unwrap(), &step)?;
        stages.push(next);
    }
    Ok(stages)
}

/// Indices of elements congruent to the identity mod `q′`.
pub fn congruence_members(q_prime: [u64; 3], index: &GroupIndex) -> Result<Vec<usize>> {
    let target = Moduli(q_prime);
    (0..index.len())
        .filter_map(|i| match index.element_at(i).reduce(target) {
            Ok(r) if r.is_identity() => Some(Ok(i)),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        })
        .collect()
}

/// A small group realized independently of [`crate::glue::GroupTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SmallGroup {
    /// `ℤ/n`.
    Cyclic(u32),
    /// `SL₂(ℤ/q)`, numbered as the full index of moduli `(q, 1, 1)`.
    Lambda(u64),
}

impl SmallGroup {
    pub fn order(&self) -> Result<usize> {
        match self {
            SmallGroup::Cyclic(n) => Ok(*n as usize),
            SmallGroup::Lambda(q) => Ok(self.index(*q)?.len()),
        }
    }

    fn index(&self, q: u64) -> Result<GroupIndex> {
        GroupIndex::full(Moduli::new(q, 1, 1)?)
    }

    /// Full multiplication table by direct arithmetic.
    pub fn table(&self) -> Result<Vec<Vec<u32>>> {
        match *self {
            SmallGroup::Cyclic(n) => Ok((0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()),
            SmallGroup::Lambda(q) => {
                let index = self.index(q)?;
                let n = index.len();
                (0..n)
                    .map(|a| {
                        let ea = index.element_at(a);
                        (0..n)
                            .map(|b| {
                                let p = ea.mul(&index.element_at(b))?;
                                index.index_of(&p).map(|i| i as u32).ok_or(Error::InvalidSubset("not closed".into()))
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }
}

/// `#{(x,y) : ψ(xy) ≠ ψ(x)ψ(y)}` from two multiplication tables.
pub fn multiplicativity_failures(source: &[Vec<u32>], target: &[Vec<u32>], image: &[u32]) -> u64 {
    let n = source.len();
    let mut count = 0;
    for x in 0..n {
        for y in 0..n {
            let lhs = image[source[x][y] as usize];
            let rhs = target[image[x] as usize][image[y] as usize];
            if lhs != rhs {
                count += 1;
            }
        }
    }
    count
}

/// Whether `a·v + b·w ≡ 0 (mod p)` only for `a ≡ b ≡ 0`.
pub fn independent_mod_p(v: &LieVector, w: &LieVector, p: u64) -> bool {
    let p = p as i64;
    let (v, w) = ([v.x, v.y, v.z], [w.x, w.y, w.z]);
    for a in 0..p {
        for b in 0..p {
            if (a, b) != (0, 0) && (0..3).all(|i| (a * v[i] + b * w[i]).rem_euclid(p) == 0) {
                return false;
            }
        }
    }
    true
}

/// Whether `2·(ℤ/q)³ ⊆ {[v,a] + [w,b] : a, b ∈ (ℤ/q)³}` by listing the image.
pub fn commutator_scan(v: &LieVector, w: &LieVector, q: u64) -> bool {
    let q = q as i64;
    let code = |u: LieVector| ((u.x.rem_euclid(q) * q + u.y.rem_euclid(q)) * q + u.z.rem_euclid(q)) as usize;
    let cube = (q * q * q) as usize;
    let image_of = |u: &LieVector| {
        let mut seen = vec![false; cube];
        let mut list = Vec::new();
        for x in 0..q {
            for y in 0..q {
                for z in 0..q {
                    let b = u.bracket(&LieVector::new(x, y, z));
                    let c = code(b);
                    if !std::mem::replace(&mut seen[c], true) {
                        list.push(b);
                    }
                }
            }
        }
        list
    };
    let (iv, iw) = (image_of(v), image_of(w));
    let mut hit = vec![false; cube];
    for a in &iv {
        for b in &iw {
            hit[code(LieVector::new(a.x + b.x, a.y + b.y, a.z + b.z))] = true;
        }
    }
    (0..q).all(|x| (0..q).all(|y| (0..q).all(|z| hit[code(LieVector::new(2 * x, 2 * y, 2 * z))])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::build_cayley;
    use crate::genset::{GeneratingSet, Preset};

    #[test]
    fn formula_matches_count() {
        for q in 1..=8 {
            assert_eq!(lambda_order_formula(q), Ratio::from_integer(count_det_one(q) as u128));
        }
    }

    #[test]
    fn walk_operator_is_stochastic() {
        let g = build_cayley(&GeneratingSet::preset(Preset::Twisted), Moduli::new(2, 1, 1).unwrap()).unwrap();
        for row in dense_walk_operator(&g).unwrap() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn cyclic_table() {
        let t = SmallGroup::Cyclic(5).table().unwrap();
        assert_eq!(t[3][4], 2);
        assert_eq!(SmallGroup::Lambda(2).order().unwrap(), 6);
    }

    #[test]
    fn scan_basic() {
        assert!(commutator_scan(&LieVector::new(0, 1, 0), &LieVector::new(0, 0, 1), 5));
        assert!(!independent_mod_p(&LieVector::new(1, 2, 0), &LieVector::new(2, 4, 0), 3));
    }
}
