//! Cayley multigraphs `Cay(G mod q, S mod q)` with right multiplication
//! `v ~ v·s`, edge boundaries and Cheeger ratios.

use std::io::Write;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::genset::{generated_subgroup, reduced_codes, GeneratingSet};
use crate::sl2::{GroupIndex, Moduli};

/// Largest graph accepted by [`CayleyGraph::exact_cheeger`].
pub const EXACT_CHEEGER_MAX: usize = 24;

#[derive(Debug, Clone)]
pub struct CayleyGraph {
    index: Arc<GroupIndex>,
    gen_codes: Vec<u64>,
    /// `pair[j]` is the generator index carrying the reverse half-edge of `j`.
    pair: Vec<usize>,
    /// `adj[v * k + j] = v · s_j`.
    adj: Vec<u32>,
}

/// Build `Cay(⟨S⟩ mod q, S mod q)`; one edge per generator (with multiplicity)
/// at every vertex.
pub fn build_cayley(s: &GeneratingSet, moduli: Moduli) -> Result<CayleyGraph> {
    let index = Arc::new(generated_subgroup(s, moduli)?);
    let codes = reduced_codes(s, index.group())?;
    CayleyGraph::from_codes(index, codes)
}

impl CayleyGraph {
    /// Graph on the vertex set `index` with generators given by ambient codes.
    /// The generator multiset must be symmetric and keep `index` closed.
    pub fn from_codes(index: Arc<GroupIndex>, gen_codes: Vec<u64>) -> Result<Self> {
        if gen_codes.is_empty() {
            return Err(Error::EmptyGeneratingSet);
        }
        let group = index.group().clone();
        let k = gen_codes.len();
        let mut pair = vec![usize::MAX; k];
        for j in 0..k {
            if pair[j] != usize::MAX {
                continue;
            }
            let inv = group.inv_code(gen_codes[j]);
            let partner = (j + 1..k).find(|&t| pair[t] == usize::MAX && gen_codes[t] == inv);
            match partner {
                Some(t) => {
                    pair[j] = t;
                    pair[t] = j;
                }
                None if inv == gen_codes[j] => pair[j] = j,
                None => {
                    return Err(Error::NotSymmetric(format!(
                        "generator {j} has no unpaired inverse"
                    )))
                }
            }
        }
        let n = index.len();
        let mut adj = Vec::with_capacity(n * k);
        for v in 0..n {
            let x = index.code_at(v);
            for &g in &gen_codes {
                let y = index
                    .index_of_code(group.mul_code(x, g))
                    .ok_or_else(|| Error::InvalidSubset("vertex set not closed under generators".into()))?;
                adj.push(y as u32);
            }
        }
        Ok(Self { index, gen_codes, pair, adj })
    }

    pub fn index(&self) -> &Arc<GroupIndex> {
        &self.index
    }

    pub fn moduli(&self) -> Moduli {
        self.index.moduli()
    }

    pub fn num_vertices(&self) -> usize {
        self.index.len()
    }

    /// `|S|` with multiplicity, the degree of every vertex.
    pub fn degree(&self) -> usize {
        self.gen_codes.len()
    }

    pub fn generator_codes(&self) -> &[u64] {
        &self.gen_codes
    }

    /// Index of the generator paired with `j` (its inverse).
    pub fn paired(&self, j: usize) -> usize {
        self.pair[j]
    }

    #[inline]
    pub fn neighbor(&self, v: usize, j: usize) -> usize {
        self.adj[v * self.gen_codes.len() + j] as usize
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        let k = self.gen_codes.len();
        &self.adj[v * k..(v + 1) * k]
    }

    pub fn adjacency(&self) -> &[u32] {
        &self.adj
    }

    /// Number of generators `j` with `s_j = 1` (identical at every vertex).
    pub fn identity_multiplicity(&self) -> usize {
        let id = self.index.group().identity_code();
        self.gen_codes.iter().filter(|&&c| c == id).count()
    }

    /// Undirected edges `(u, v, j)`: one per orbit of the half-edge pairing
    /// `(v, j) ↔ (v·s_j, pair(j))`, represented by its smaller half-edge.
    pub fn edges(&self) -> Vec<(usize, usize, usize)> {
        let k = self.degree();
        let mut out = Vec::with_capacity(self.num_vertices() * k / 2);
        for v in 0..self.num_vertices() {
            for j in 0..k {
                let w = self.neighbor(v, j);
                let back = (w, self.pair[j]);
                if (v, j) <= back {
                    out.push((v, w, j));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in self.neighbors(v) {
                if !std::mem::replace(&mut seen[w as usize], true) {
                    count += 1;
                    stack.push(w as usize);
                }
            }
        }
        count == n
    }

    fn mask_of(&self, subset: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.num_vertices()];
        for &v in subset {
            if v >= mask.len() {
                return Err(Error::VertexOutOfRange(v));
            }
            mask[v] = true;
        }
        Ok(mask)
    }

    /// `|∂A|`: edges with exactly one endpoint in `A`. Loops never count.
    pub fn boundary_size(&self, subset: &[usize]) -> Result<u64> {
        Ok(self.boundary_of_mask(&self.mask_of(subset)?))
    }

    pub fn boundary_of_mask(&self, mask: &[bool]) -> u64 {
        let k = self.degree();
        let mut b = 0u64;
        for (v, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
            for j in 0..k {
                if !mask[self.adj[v * k + j] as usize] {
                    b += 1;
                }
            }
        }
        b
    }

    /// `|∂A| / |A|` for `0 < |A| ≤ N/2`.
    pub fn cheeger_ratio(&self, subset: &[usize]) -> Result<Ratio<u64>> {
        let mask = self.mask_of(subset)?;
        let size = mask.iter().filter(|&&m| m).count();
        if size == 0 || 2 * size > self.num_vertices() {
            return Err(Error::InvalidSubset(format!(
                "need 0 < |A| <= N/2, got |A| = {size}, N = {}",
                self.num_vertices()
            )));
        }
        Ok(Ratio::new(self.boundary_of_mask(&mask), size as u64))
    }

    /// Exact `h = min |∂A|/|A|` by Gray-code enumeration of all subsets.
    /// The witness is the lexicographically least minimizer (as a sorted vertex list).
    pub fn exact_cheeger(&self) -> Result<(Ratio<u64>, Vec<usize>)> {
        let n = self.num_vertices();
        if n > EXACT_CHEEGER_MAX {
            return Err(Error::TooLargeForExactCheeger(n));
        }
        if n < 2 {
            return Err(Error::InvalidSubset("need at least 2 vertices".into()));
        }
        let k = self.degree();
        let nbr: Vec<Vec<u32>> = (0..n).map(|v| self.neighbors(v).to_vec()).collect();
        let mut mask: u32 = 0;
        let mut size = 0u64;
        let mut boundary: i64 = 0;
        let mut best: Option<(u64, u64, u32)> = None;
        for i in 1u64..(1u64 << n) {
            let v = i.trailing_zeros() as usize;
            let bit = 1u32 << v;
            let adding = mask & bit == 0;
            let base = mask & !bit;
            let mut delta: i64 = 0;
            for &w in &nbr[v] {
                let w = w as usize;
                if w == v {
                    continue;
                }
                if base & (1 << w) != 0 {
                    delta -= 1;
                } else {
                    delta += 1;
                }
            }
            if adding {
                boundary += delta;
                size += 1;
            } else {
                boundary -= delta;
                size -= 1;
            }
            mask ^= bit;
            debug_assert!(k > 0);
            if size == 0 || 2 * size > n as u64 {
                continue;
            }
            let b = boundary as u64;
            let better = match best {
                None => true,
                Some((bb, bs, bm)) => {
                    let lhs = b as u128 * bs as u128;
                    let rhs = bb as u128 * size as u128;
                    lhs < rhs || (lhs == rhs && lex_less(mask, bm))
                }
            };
            if better {
                best = Some((b, size, mask));
            }
        }
        let (b, s, m) = best.expect("n >= 2 has a valid subset");
        let witness = (0..n).filter(|&v| m & (1 << v) != 0).collect();
        Ok((Ratio::new(b, s), witness))
    }

    /// Edge list as CSV `u,v,generator_index`.
    pub fn write_edge_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "u,v,generator_index")?;
        for (u, v, j) in self.edges() {
            writeln!(w, "{u},{v},{j}")?;
        }
        Ok(())
    }

    pub fn header(&self) -> GraphHeader {
        GraphHeader {
            moduli: self.moduli().0,
            degree: self.degree(),
            vertices: self.num_vertices(),
            edges: self.edges().len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphHeader {
    pub moduli: [u64; 3],
    pub degree: usize,
    pub vertices: usize,
    pub edges: usize,
}

/// Lexicographic order on sorted vertex lists, for bitmask-encoded sets.
fn lex_less(a: u32, b: u32) -> bool {
    let d = a ^ b;
    if d == 0 {
        return false;
    }
    let low = d.trailing_zeros();
    let above = |m: u32| low < 31 && m >> (low + 1) != 0;
    if a & (1 << low) != 0 {
        // a has the smaller element at the first difference unless b has ended
        above(b)
    } else {
        !above(a)
    }
}
