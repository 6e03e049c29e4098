//! Exact random-walk measures `χ_S^(l)` on a finite group and their mass on
//! linear-form and trace-form level sets.

use std::io::Write;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cayley::CayleyGraph;
use crate::error::{Error, Result};
use crate::genset::{generated_subgroup, reduced_codes, GeneratingSet};
use crate::modarith::factorize;
use crate::sl2::{GroupIndex, IntMatrix, Moduli};

/// Supports at or below this size are powered by repeated convolution.
pub const SPARSE_POWER_SUPPORT: usize = 64;

#[derive(Debug, Clone, PartialEq)]
enum Numerators {
    Small(Vec<u128>),
    Big(Vec<BigUint>),
}

impl Numerators {
    fn len(&self) -> usize {
        match self {
            Numerators::Small(v) => v.len(),
            Numerators::Big(v) => v.len(),
        }
    }

    fn get(&self, i: usize) -> BigUint {
        match self {
            Numerators::Small(v) => BigUint::from(v[i]),
            Numerators::Big(v) => v[i].clone(),
        }
    }

    fn is_zero(&self, i: usize) -> bool {
        match self {
            Numerators::Small(v) => v[i] == 0,
            Numerators::Big(v) => v[i].is_zero(),
        }
    }

    fn sum(&self) -> BigUint {
        match self {
            Numerators::Small(v) => v.iter().map(|&x| BigUint::from(x)).sum(),
            Numerators::Big(v) => v.iter().sum(),
        }
    }

    fn small_sum(&self) -> Option<u128> {
        match self {
            Numerators::Small(v) => v.iter().try_fold(0u128, |a, &x| a.checked_add(x)),
            Numerators::Big(_) => None,
        }
    }

    fn to_f64(&self, i: usize) -> f64 {
        match self {
            Numerators::Small(v) => v[i] as f64,
            Numerators::Big(v) => v[i].to_f64().unwrap_or(f64::INFINITY),
        }
    }
}

/// A non-negative measure on the elements of a [`GroupIndex`], stored as
/// integer numerators over one common denominator.
#[derive(Debug, Clone)]
pub struct GroupMeasure {
    index: Arc<GroupIndex>,
    num: Numerators,
    den: BigUint,
}

impl GroupMeasure {
    pub fn from_counts(index: Arc<GroupIndex>, counts: Vec<u128>, den: u128) -> Result<Self> {
        if counts.len() != index.len() {
            return Err(Error::IndexMismatch);
        }
        if den == 0 {
            return Err(Error::Precondition("denominator must be positive".into()));
        }
        Ok(Self { index, num: Numerators::Small(counts), den: BigUint::from(den) })
    }

    pub fn delta(index: Arc<GroupIndex>, at: usize) -> Result<Self> {
        if at >= index.len() {
            return Err(Error::VertexOutOfRange(at));
        }
        let mut c = vec![0u128; index.len()];
        c[at] = 1;
        Self::from_counts(index, c, 1)
    }

    pub fn uniform(index: Arc<GroupIndex>) -> Self {
        let n = index.len() as u128;
        Self { num: Numerators::Small(vec![1; n as usize]), den: BigUint::from(n), index }
    }

    pub fn index(&self) -> &Arc<GroupIndex> {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.num.len()
    }

    pub fn is_empty(&self) -> bool {
        self.num.len() == 0
    }

    pub fn denominator(&self) -> &BigUint {
        &self.den
    }

    pub fn numerator(&self, i: usize) -> BigUint {
        self.num.get(i)
    }

    pub fn mass(&self, i: usize) -> Ratio<BigUint> {
        Ratio::new(self.num.get(i), self.den.clone())
    }

    pub fn total(&self) -> Ratio<BigUint> {
        Ratio::new(self.num.sum(), self.den.clone())
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.num.is_zero(i)).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        let den = self.den.to_f64().unwrap_or(f64::INFINITY);
        (0..self.len()).map(|i| self.num.to_f64(i) / den).collect()
    }

    /// Exact equality of every mass.
    pub fn exact_eq(&self, other: &GroupMeasure) -> bool {
        self.index.same_as(&other.index)
            && (0..self.len()).all(|i| self.num.get(i) * &other.den == other.num.get(i) * &self.den)
    }

    /// `μ(g) = μ(g⁻¹)` for every `g`.
    pub fn is_symmetric(&self) -> bool {
        (0..self.len()).all(|i| match self.index.inv(i) {
            Some(j) => self.num.get(i) == self.num.get(j),
            None => false,
        })
    }

    /// `‖μ − u‖₂²` with `u` uniform on the index, exactly.
    pub fn l2_squared_to_uniform(&self) -> Ratio<BigInt> {
        let n = BigInt::from(self.len());
        let den = BigInt::from(self.den.clone());
        let sq: BigUint = match &self.num {
            Numerators::Small(v) => v.iter().map(|&x| BigUint::from(x) * BigUint::from(x)).sum(),
            Numerators::Big(v) => v.iter().map(|x| x * x).sum(),
        };
        let total = BigInt::from(self.num.sum());
        // Σμ² − 2·T/N + 1/N, put over N·den²
        let numer = &n * BigInt::from(sq) - BigInt::from(2) * &total * &den + &den * &den;
        Ratio::new(numer, n * &den * &den)
    }

    pub fn l2_distance_to_uniform(&self) -> f64 {
        self.l2_squared_to_uniform().to_f64().unwrap_or(f64::NAN).max(0.0).sqrt()
    }
}

/// `π(χ_S)` on the subgroup generated by `S` mod `moduli`.
pub fn chi_s(s: &GeneratingSet, moduli: Moduli) -> Result<GroupMeasure> {
    let index = Arc::new(generated_subgroup(s, moduli)?);
    let codes = reduced_codes(s, index.group())?;
    chi_s_on(index, &codes)
}

/// `χ_S` for generator codes on an existing index.
pub fn chi_s_on(index: Arc<GroupIndex>, gen_codes: &[u64]) -> Result<GroupMeasure> {
    if gen_codes.is_empty() {
        return Err(Error::EmptyGeneratingSet);
    }
    let mut c = vec![0u128; index.len()];
    for &g in gen_codes {
        let i = index.index_of_code(g).ok_or_else(|| Error::InvalidSubset("generator outside index".into()))?;
        c[i] += 1;
    }
    GroupMeasure::from_counts(index, c, gen_codes.len() as u128)
}

/// `χ_S` for the generators of a Cayley graph.
pub fn chi_s_of_graph(g: &CayleyGraph) -> Result<GroupMeasure> {
    chi_s_on(g.index().clone(), g.generator_codes())
}

/// `(μ ∗ ν)(x) = Σ_y μ(y) ν(x y⁻¹)`, exactly.
pub fn convolve(mu: &GroupMeasure, nu: &GroupMeasure) -> Result<GroupMeasure> {
    if !mu.index.same_as(&nu.index) {
        return Err(Error::IndexMismatch);
    }
    let idx = &mu.index;
    let n = idx.len();
    let su = mu.support();
    let sv = nu.support();
    let den = &mu.den * &nu.den;
    let closed = || Error::InvalidSubset("index is not closed under the convolution".into());
    let small_bound = match (mu.num.small_sum(), nu.num.small_sum()) {
        (Some(a), Some(b)) => a.checked_mul(b),
        _ => None,
    };
    if let (Some(_), Numerators::Small(a), Numerators::Small(b)) = (small_bound, &mu.num, &nu.num) {
        let out = if su.len().saturating_mul(sv.len()) <= n {
            let mut out = vec![0u128; n];
            for &y in &su {
                for &z in &sv {
                    out[idx.mul(z, y).ok_or_else(closed)?] += a[y] * b[z];
                }
            }
            out
        } else {
            // gather: (μ ∗ ν)(x) = Σ_z ν(z) μ(z⁻¹ x)
            let zinv: Vec<usize> = sv.iter().map(|&z| idx.inv(z).ok_or_else(closed)).collect::<Result<_>>()?;
            let out: Result<Vec<u128>> = (0..n)
                .into_par_iter()
                .map(|x| {
                    let mut s = 0u128;
                    for (&z, &zi) in sv.iter().zip(&zinv) {
                        s += b[z] * a[idx.mul(zi, x).ok_or_else(closed)?];
                    }
                    Ok(s)
                })
                .collect();
            out?
        };
        return Ok(GroupMeasure { index: idx.clone(), num: Numerators::Small(out), den });
    }
    let mut out = vec![BigUint::zero(); n];
    for &y in &su {
        let my = mu.num.get(y);
        for &z in &sv {
            out[idx.mul(z, y).ok_or_else(closed)?] += &my * nu.num.get(z);
        }
    }
    Ok(GroupMeasure { index: idx.clone(), num: Numerators::Big(out), den })
}

/// `μ^(l)`, the `l`-fold self-convolution.
pub fn power(mu: &GroupMeasure, l: u32) -> Result<GroupMeasure> {
    if l == 0 {
        return Err(Error::ZeroPower);
    }
    if mu.support().len() <= SPARSE_POWER_SUPPORT {
        let mut acc = mu.clone();
        for _ in 1..l {
            acc = convolve(&acc, mu)?;
        }
        return Ok(acc);
    }
    let mut result: Option<GroupMeasure> = None;
    let mut base = mu.clone();
    let mut e = l;
    loop {
        if e & 1 == 1 {
            result = Some(match result {
                None => base.clone(),
                Some(r) => convolve(&r, &base)?,
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = convolve(&base, &base)?;
    }
    Ok(result.expect("l >= 1"))
}

/// Calls `f(l, μ^(l))` for `l = 1..=l_max`, keeping one measure alive at a time.
pub fn for_each_power<F>(mu: &GroupMeasure, l_max: u32, mut f: F) -> Result<()>
where
    F: FnMut(u32, &GroupMeasure) -> Result<()>,
{
    let mut acc = mu.clone();
    for l in 1..=l_max {
        if l > 1 {
            acc = convolve(&acc, mu)?;
        }
        f(l, &acc)?;
    }
    Ok(())
}

/// Calls `f(l, χ_S^(l))` for `l = 1..=l_max` using `χ^(l) = T χ^(l−1)` on the
/// graph's adjacency; exact word counts over `|S|^l`.
pub fn for_each_walk_power<F>(g: &CayleyGraph, l_max: u32, mut f: F) -> Result<()>
where
    F: FnMut(u32, &GroupMeasure) -> Result<()>,
{
    let chi = chi_s_of_graph(g)?;
    let k = g.degree();
    let adj = g.adjacency();
    let mut acc = chi.clone();
    for l in 1..=l_max {
        if l > 1 {
            let fits = (k as u128).checked_pow(l).is_some();
            acc = match (&acc.num, fits) {
                (Numerators::Small(c), true) => {
                    let next: Vec<u128> = (0..c.len())
                        .into_par_iter()
                        .map(|v| adj[v * k..(v + 1) * k].iter().map(|&w| c[w as usize]).sum())
                        .collect();
                    GroupMeasure { index: acc.index.clone(), num: Numerators::Small(next), den: &acc.den * &chi.den }
                }
                _ => convolve(&chi, &acc)?,
            };
        }
        f(l, &acc)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub l: u32,
    pub distance: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayTable {
    pub moduli: [u64; 3],
    pub reached: usize,
    pub surjective: bool,
    pub lambda_star: f64,
    pub rows: Vec<DecayRow>,
}

impl DecayTable {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.ok)
    }
}

pub const DECAY_SLACK: f64 = 1e-9;

/// `‖χ^(l) − u‖₂` against `λ_*^l` for `l = 1..=l_max`, with `u` uniform on the
/// reached subgroup.
pub fn decay_check(s: &GeneratingSet, moduli: Moduli, l_max: u32) -> Result<DecayTable> {
    let g = crate::cayley::build_cayley(s, moduli)?;
    let gap = crate::spectral::spectral_gap(&g)?;
    decay_table(&g, gap.lambda_star, l_max)
}

pub fn decay_table(g: &CayleyGraph, lambda_star: f64, l_max: u32) -> Result<DecayTable> {
    let mut rows = Vec::new();
    for_each_walk_power(g, l_max, |l, mu| {
        let distance = mu.l2_distance_to_uniform();
        let bound = lambda_star.powi(l as i32);
        rows.push(DecayRow { l, distance, bound, ok: distance <= bound + DECAY_SLACK });
        Ok(())
    })?;
    let full = g.moduli().product_order()?;
    Ok(DecayTable {
        moduli: g.moduli().0,
        reached: g.num_vertices(),
        surjective: full == g.num_vertices() as u128,
        lambda_star,
        rows,
    })
}

/// Integer linear form on the twelve entries `(x₁,y₁,z₁,w₁, …, x₃,y₃,z₃,w₃)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 12]", into = "[i64; 12]")]
pub struct LinearForm([i64; 12]);

impl LinearForm {
    pub fn new(coeffs: [i64; 12]) -> Result<Self> {
        let g = coeffs.iter().fold(0i64, |a, &c| a.gcd(&c));
        if g != 1 {
            return Err(Error::NotPrimitive(g));
        }
        Ok(Self(coeffs))
    }

    pub fn coefficients(&self) -> [i64; 12] {
        self.0
    }

    /// `L(g) mod Q` on canonical residues.
    pub fn eval_mod(&self, entries: &[u64; 12], q: u64) -> u64 {
        let q = q as i128;
        let mut s: i128 = 0;
        for (c, &e) in self.0.iter().zip(entries) {
            s = (s + (*c as i128).rem_euclid(q) * (e as i128 % q)) % q;
        }
        s as u64
    }
}

impl TryFrom<[i64; 12]> for LinearForm {
    type Error = Error;
    fn try_from(c: [i64; 12]) -> Result<Self> {
        Self::new(c)
    }
}

impl From<LinearForm> for [i64; 12] {
    fn from(l: LinearForm) -> Self {
        l.0
    }
}

fn check_divides(q: u64, moduli: Moduli) -> Result<()> {
    if q == 0 {
        return Err(Error::InvalidModulus(0));
    }
    for &m in &moduli.0 {
        if m % q != 0 {
            return Err(Error::NotDivisor { target: q, modulus: m });
        }
    }
    Ok(())
}

/// Partition of an index by a function with values in `0..q`.
#[derive(Debug, Clone)]
pub struct LevelSets {
    q: u64,
    level: Vec<u32>,
    sizes: Vec<u64>,
}

impl LevelSets {
    pub fn linear(index: &GroupIndex, form: &LinearForm, q: u64) -> Result<Self> {
        check_divides(q, index.moduli())?;
        let level = (0..index.len())
            .into_par_iter()
            .map(|i| form.eval_mod(&index.element_at(i).entries(), q) as u32)
            .collect();
        Ok(Self::from_levels(q, level))
    }

    fn from_levels(q: u64, level: Vec<u32>) -> Self {
        let mut sizes = vec![0u64; q as usize];
        for &l in &level {
            sizes[l as usize] += 1;
        }
        Self { q, level, sizes }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn level_of(&self, i: usize) -> u32 {
        self.level[i]
    }

    /// Exact `μ(level n)` for every `n`.
    pub fn masses(&self, mu: &GroupMeasure) -> Result<Vec<Ratio<BigUint>>> {
        if mu.len() != self.level.len() {
            return Err(Error::IndexMismatch);
        }
        let mut acc = vec![BigUint::zero(); self.q as usize];
        match &mu.num {
            Numerators::Small(v) => {
                let mut small = vec![0u128; self.q as usize];
                for (i, &x) in v.iter().enumerate() {
                    let slot = &mut small[self.level[i] as usize];
                    match slot.checked_add(x) {
                        Some(s) => *slot = s,
                        None => {
                            acc[self.level[i] as usize] += BigUint::from(*slot) + BigUint::from(x);
                            *slot = 0;
                        }
                    }
                }
                for (a, s) in acc.iter_mut().zip(small) {
                    *a += BigUint::from(s);
                }
            }
            Numerators::Big(v) => {
                for (i, x) in v.iter().enumerate() {
                    acc[self.level[i] as usize] += x;
                }
            }
        }
        Ok(acc.into_iter().map(|a| Ratio::new(a, mu.den.clone())).collect())
    }
}

/// `μ({g : L(g) ≡ n mod Q})`.
pub fn mass_on_linear_form(mu: &GroupMeasure, form: &LinearForm, q: u64, n: i64) -> Result<Ratio<BigUint>> {
    let sets = LevelSets::linear(&mu.index, form, q)?;
    let n = n.rem_euclid(q as i64) as usize;
    Ok(sets.masses(mu)?.swap_remove(n))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub masses: Vec<String>,
    pub max_mass: String,
    pub argmax: u64,
    pub max_float: f64,
}

/// All level masses and the largest (smallest `n` on ties).
pub fn level_report(masses: &[Ratio<BigUint>]) -> LevelReport {
    let mut argmax = 0;
    for (n, m) in masses.iter().enumerate() {
        if m > &masses[argmax] {
            argmax = n;
        }
    }
    LevelReport {
        masses: masses.iter().map(ratio_string).collect(),
        max_mass: ratio_string(&masses[argmax]),
        argmax: argmax as u64,
        max_float: ratio_f64(&masses[argmax]),
    }
}

pub fn ratio_string(r: &Ratio<BigUint>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn ratio_f64(r: &Ratio<BigUint>) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `ξ = (ξ₁,ξ₂,ξ₃)`, `η = (η₁,η₂,η₃)` traceless with nonzero reductions mod
/// every prime dividing `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFormData {
    pub xi: [IntMatrix; 3],
    pub eta: [IntMatrix; 3],
    pub q: u64,
}

impl TraceFormData {
    pub fn new(xi: [IntMatrix; 3], eta: [IntMatrix; 3], q: u64) -> Result<Self> {
        let d = Self { xi, eta, q };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q == 0 {
            return Err(Error::InvalidModulus(0));
        }
        for (name, ms) in [("ξ", &self.xi), ("η", &self.eta)] {
            for (i, m) in ms.iter().enumerate() {
                if m.trace() != 0 {
                    return Err(Error::TraceForm(format!("Tr({name}{}) = {} ≠ 0", i + 1, m.trace())));
                }
            }
        }
        for p in factorize(self.q)?.primes() {
            for (name, ms) in [("ξ", &self.xi), ("η", &self.eta)] {
                for (i, m) in ms.iter().enumerate() {
                    if m.is_zero_mod(p) {
                        return Err(Error::TraceForm(format!("{name}{} vanishes mod p = {p}", i + 1)));
                    }
                }
            }
        }
        Ok(())
    }

    /// `κ_i(g) = Tr(g ξ_i g⁻¹ η_i) mod Q` for a residue matrix `[a,b,c,d]`.
    pub fn kappa(&self, i: usize, g: [u64; 4]) -> u64 {
        let q = self.q as i128;
        let r = |x: i64| (x as i128).rem_euclid(q);
        let [a, b, c, d] = g.map(|x| x as i128 % q);
        let gm = [[a, b], [c, d]];
        let gi = [[d, q - b], [q - c, a]].map(|row| row.map(|x| x % q));
        let xi = self.xi[i].0.map(|row| row.map(r));
        let eta = self.eta[i].0.map(|row| row.map(r));
        let m = |x: [[i128; 2]; 2], y: [[i128; 2]; 2]| {
            let mut z = [[0i128; 2]; 2];
            for (r, zr) in z.iter_mut().enumerate() {
                for (c, zc) in zr.iter_mut().enumerate() {
                    *zc = (x[r][0] * y[0][c] + x[r][1] * y[1][c]) % q;
                }
            }
            z
        };
        let p = m(m(m(gm, xi), gi), eta);
        ((p[0][0] + p[1][1]) % q) as u64
    }

    pub fn level_sets(&self, index: &GroupIndex) -> Result<LevelSets> {
        self.validate()?;
        check_divides(self.q, index.moduli())?;
        let level = (0..index.len())
            .into_par_iter()
            .map(|v| {
                let g = index.element_at(v);
                let s: u64 = (0..3).map(|i| self.kappa(i, g.0[i].entries())).sum();
                (s % self.q) as u32
            })
            .collect();
        Ok(LevelSets::from_levels(self.q, level))
    }
}

/// `μ({g : Σ κ_i(g_i) ≡ 0 mod Q})`.
pub fn mass_on_trace_form(mu: &GroupMeasure, data: &TraceFormData) -> Result<Ratio<BigUint>> {
    let sets = data.level_sets(&mu.index)?;
    Ok(sets.masses(mu)?.swap_remove(0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonconcRow {
    pub l: u32,
    pub q: u64,
    pub form: usize,
    pub argmax: u64,
    pub max_mass: String,
    pub max_float: f64,
    pub max_level_size: u64,
    pub bound: f64,
    pub ok: bool,
    /// `−ln(max mass)/ln Q`.
    pub exponent: f64,
}

/// The Cauchy–Schwarz consequence of the decay bound:
/// `μ(E) ≤ |E|/N + sqrt(|E|)·λ_*^l` applied to the largest level set.
pub fn nonconc_bound(max_level: u64, n: usize, lambda_star: f64, l: u32) -> f64 {
    max_level as f64 / n as f64 + (max_level as f64).sqrt() * lambda_star.powi(l as i32)
}

pub fn measured_exponent(max_mass: f64, q: u64) -> f64 {
    -max_mass.ln() / (q as f64).ln()
}

/// Non-concentration rows for each form and `l = 1..=l_max` of the walk on `g`.
pub fn nonconc_linear(g: &CayleyGraph, lambda_star: f64, forms: &[LinearForm], q: u64, l_max: u32) -> Result<Vec<NonconcRow>> {
    let sets: Vec<LevelSets> = forms.iter().map(|f| LevelSets::linear(g.index(), f, q)).collect::<Result<_>>()?;
    nonconc_rows(g, lambda_star, &sets, l_max)
}

pub fn nonconc_rows(g: &CayleyGraph, lambda_star: f64, sets: &[LevelSets], l_max: u32) -> Result<Vec<NonconcRow>> {
    let n = g.num_vertices();
    let mut rows = Vec::new();
    for_each_walk_power(g, l_max, |l, mu| {
        for (k, s) in sets.iter().enumerate() {
            let masses = s.masses(mu)?;
            let rep = level_report(&masses);
            let max_level = *s.sizes().iter().max().unwrap_or(&0);
            let bound = nonconc_bound(max_level, n, lambda_star, l);
            rows.push(NonconcRow {
                l,
                q: s.modulus(),
                form: k,
                argmax: rep.argmax,
                max_mass: rep.max_mass,
                max_float: rep.max_float,
                max_level_size: max_level,
                bound,
                ok: rep.max_float <= bound + DECAY_SLACK,
                exponent: measured_exponent(rep.max_float, s.modulus()),
            });
        }
        Ok(())
    })?;
    Ok(rows)
}

/// CSV rows `l,Q,n,mass_numerator,mass_denominator,float_value`.
pub fn write_level_csv<W: Write>(mut w: W, rows: &[(u32, u64, Vec<Ratio<BigUint>>)]) -> Result<()> {
    writeln!(w, "l,Q,n,mass_numerator,mass_denominator,float_value")?;
    for (l, q, masses) in rows {
        for (n, m) in masses.iter().enumerate() {
            writeln!(w, "{l},{q},{n},{},{},{:.17e}", m.numer(), m.denom(), ratio_f64(m))?;
        }
    }
    Ok(())
}
