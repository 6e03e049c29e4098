//! Arithmetic in `SL₂(ℤ/qℤ)` and in triple products of such groups.

mod index;

pub use index::{FactorGroup, GroupIndex, ProductGroup};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modarith::{factorize, MAX_MODULUS};

/// Default cap on the size of an enumerated factor group `Λ_q`.
pub const FACTOR_CAP: u128 = 2_000_000;

/// Cap on any materialized product-group index.
pub const PRODUCT_CAP: u128 = 10_000_000;

/// 2×2 integer matrix `[[a, b], [c, d]]`, used for lifts to `SL₂(ℤ)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct IntMatrix(pub [[i64; 2]; 2]);

impl IntMatrix {
    pub const IDENTITY: IntMatrix = IntMatrix([[1, 0], [0, 1]]);
    /// Upper unipotent `[[1,1],[0,1]]`.
    pub const UPPER: IntMatrix = IntMatrix([[1, 1], [0, 1]]);
    /// Lower unipotent `[[1,0],[1,1]]`.
    pub const LOWER: IntMatrix = IntMatrix([[1, 0], [1, 1]]);

    pub fn det(&self) -> i128 {
        let [[a, b], [c, d]] = self.0;
        a as i128 * d as i128 - b as i128 * c as i128
    }

    pub fn trace(&self) -> i128 {
        self.0[0][0] as i128 + self.0[1][1] as i128
    }

    /// Overflow-checked product.
    pub fn checked_mul(&self, other: &IntMatrix) -> Option<IntMatrix> {
        let x = &self.0;
        let y = &other.0;
        let entry = |i: usize, j: usize| -> Option<i64> {
            x[i][0]
                .checked_mul(y[0][j])?
                .checked_add(x[i][1].checked_mul(y[1][j])?)
        };
        Some(IntMatrix([
            [entry(0, 0)?, entry(0, 1)?],
            [entry(1, 0)?, entry(1, 1)?],
        ]))
    }

    /// Adjugate, which is the inverse when `det = 1`.
    pub fn adjugate(&self) -> IntMatrix {
        let [[a, b], [c, d]] = self.0;
        IntMatrix([[d, -b], [-c, a]])
    }

    pub fn is_zero_mod(&self, p: u64) -> bool {
        self.0.iter().flatten().all(|&e| e.rem_euclid(p as i64) == 0)
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.0;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

fn check_modulus(q: u64) -> Result<()> {
    if q == 0 || q > MAX_MODULUS {
        Err(Error::InvalidModulus(q))
    } else {
        Ok(())
    }
}

#[inline]
fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

/// Element of `Λ_q = SL₂(ℤ/qℤ)` with canonical residues in `[0, q)`.
///
/// Modulus 1 is allowed and gives the trivial group (all entries 0).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct ResidueMatrix {
    q: u64,
    e: [u64; 4],
}

impl ResidueMatrix {
    /// Builds from entries `[a, b, c, d]`, reducing them and checking `ad − bc ≡ 1`.
    pub fn new(q: u64, entries: [u64; 4]) -> Result<Self> {
        check_modulus(q)?;
        let e = entries.map(|x| x % q);
        let det = (mulmod(e[0], e[3], q) + q - mulmod(e[1], e[2], q)) % q;
        if det != 1 % q {
            return Err(Error::ResidueDeterminant { det, modulus: q });
        }
        Ok(Self { q, e })
    }

    pub fn identity(q: u64) -> Self {
        Self { q, e: [1 % q, 0, 0, 1 % q] }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Entries `[a, b, c, d]`.
    pub fn entries(&self) -> [u64; 4] {
        self.e
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.q)
    }

    pub fn mul(&self, other: &ResidueMatrix) -> Result<ResidueMatrix> {
        if self.q != other.q {
            return Err(Error::ModulusMismatch(self.q, other.q));
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, y: &ResidueMatrix) -> ResidueMatrix {
        let q = self.q;
        let [a, b, c, d] = self.e;
        let [e, f, g, h] = y.e;
        let add = |x: u64, y: u64| ((x as u128 + y as u128) % q as u128) as u64;
        ResidueMatrix {
            q,
            e: [
                add(mulmod(a, e, q), mulmod(b, g, q)),
                add(mulmod(a, f, q), mulmod(b, h, q)),
                add(mulmod(c, e, q), mulmod(d, g, q)),
                add(mulmod(c, f, q), mulmod(d, h, q)),
            ],
        }
    }

    /// `[[d, −b], [−c, a]]` reduced.
    pub fn inv(&self) -> ResidueMatrix {
        let q = self.q;
        let [a, b, c, d] = self.e;
        let neg = |x: u64| (q - x) % q;
        ResidueMatrix { q, e: [d, neg(b), neg(c), a] }
    }

    /// Reduces modulo a divisor `target` of the current modulus.
    pub fn reduce(&self, target: u64) -> Result<ResidueMatrix> {
        check_modulus(target)?;
        if self.q % target != 0 {
            return Err(Error::NotDivisor { target, modulus: self.q });
        }
        Ok(ResidueMatrix { q: target, e: self.e.map(|x| x % target) })
    }

    /// Trace `a + d` reduced modulo `q`.
    pub fn trace(&self) -> u64 {
        (self.e[0] + self.e[3]) % self.q
    }
}

impl fmt::Display for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "[[{a},{b}],[{c},{d}]] mod {}", self.q)
    }
}

/// The residue map `π_q` on an integer matrix of determinant 1.
pub fn reduce_int_matrix(m: &IntMatrix, q: u64) -> Result<ResidueMatrix> {
    check_modulus(q)?;
    let det = m.det();
    if det != 1 {
        return Err(Error::Determinant(det));
    }
    let r = |x: i64| x.rem_euclid(q as i64) as u64;
    let [[a, b], [c, d]] = m.0;
    Ok(ResidueMatrix { q, e: [r(a), r(b), r(c), r(d)] })
}

/// `|Λ_q| = q³ ∏_{p | q} (1 − p⁻²)`.
pub fn group_order(q: u64) -> Result<u128> {
    let f = factorize(q)?;
    Ok(f.pairs()
        .iter()
        .map(|&(p, n)| {
            let p = p as u128;
            p.pow(3 * n - 2) * (p * p - 1)
        })
        .product())
}

/// All of `Λ_q` in lexicographic order of `(a, b, c, d)`.
pub fn enumerate_group(q: u64) -> Result<Vec<ResidueMatrix>> {
    enumerate_group_capped(q, FACTOR_CAP)
}

pub fn enumerate_group_capped(q: u64, cap: u128) -> Result<Vec<ResidueMatrix>> {
    let order = group_order(q)?;
    if order > cap {
        return Err(Error::CapExceeded { what: "factor group", needed: order, cap });
    }
    let mut out = Vec::with_capacity(order as usize);
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                // ad ≡ 1 + bc (mod q)
                let rhs = (1 + mulmod(b, c, q)) % q;
                for d in 0..q {
                    if mulmod(a, d, q) == rhs {
                        out.push(ResidueMatrix { q, e: [a, b, c, d] });
                    }
                }
            }
        }
    }
    debug_assert_eq!(out.len() as u128, order);
    Ok(out)
}

/// Three component moduli `(q₁, q₂, q₃)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Moduli(pub [u64; 3]);

impl Moduli {
    pub fn new(q1: u64, q2: u64, q3: u64) -> Result<Self> {
        for q in [q1, q2, q3] {
            check_modulus(q)?;
        }
        Ok(Moduli([q1, q2, q3]))
    }

    pub fn uniform(q: u64) -> Result<Self> {
        Self::new(q, q, q)
    }

    pub fn get(&self, i: usize) -> u64 {
        self.0[i]
    }

    pub fn product_order(&self) -> Result<u128> {
        let mut acc: u128 = 1;
        for q in self.0 {
            acc = acc.saturating_mul(group_order(q)?);
        }
        Ok(acc)
    }
}

impl fmt::Display for Moduli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// Triple of integer matrices, an element of `Γ = SL₂(ℤ)³` when each has det 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct IntTriple(pub [IntMatrix; 3]);

impl IntTriple {
    pub const IDENTITY: IntTriple = IntTriple([IntMatrix::IDENTITY; 3]);

    pub fn inverse(&self) -> IntTriple {
        IntTriple(self.0.map(|m| m.adjugate()))
    }

    pub fn checked_mul(&self, other: &IntTriple) -> Option<IntTriple> {
        Some(IntTriple([
            self.0[0].checked_mul(&other.0[0])?,
            self.0[1].checked_mul(&other.0[1])?,
            self.0[2].checked_mul(&other.0[2])?,
        ]))
    }

    pub fn reduce(&self, moduli: Moduli) -> Result<TripleElement> {
        Ok(TripleElement([
            reduce_int_matrix(&self.0[0], moduli.0[0])?,
            reduce_int_matrix(&self.0[1], moduli.0[1])?,
            reduce_int_matrix(&self.0[2], moduli.0[2])?,
        ]))
    }
}

impl fmt::Display for IntTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Element of `Λ_{q₁} × Λ_{q₂} × Λ_{q₃}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct TripleElement(pub [ResidueMatrix; 3]);

impl TripleElement {
    pub fn identity(moduli: Moduli) -> Self {
        TripleElement(moduli.0.map(ResidueMatrix::identity))
    }

    pub fn moduli(&self) -> Moduli {
        Moduli(self.0.map(|m| m.modulus()))
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|m| m.is_identity())
    }

    pub fn mul(&self, other: &TripleElement) -> Result<TripleElement> {
        Ok(TripleElement([
            self.0[0].mul(&other.0[0])?,
            self.0[1].mul(&other.0[1])?,
            self.0[2].mul(&other.0[2])?,
        ]))
    }

    pub fn inv(&self) -> TripleElement {
        TripleElement(self.0.map(|m| m.inv()))
    }

    /// The projection `𝙿ᵢ` for `i ∈ {1, 2, 3}`.
    pub fn project(&self, i: usize) -> Result<ResidueMatrix> {
        match i {
            1..=3 => Ok(self.0[i - 1]),
            _ => Err(Error::ComponentIndex(i)),
        }
    }

    /// Embeds `m` in factor `i`, identity elsewhere.
    pub fn embed(m: ResidueMatrix, i: usize, moduli: Moduli) -> Result<TripleElement> {
        if !(1..=3).contains(&i) {
            return Err(Error::ComponentIndex(i));
        }
        if moduli.0[i - 1] != m.modulus() {
            return Err(Error::ModulusMismatch(moduli.0[i - 1], m.modulus()));
        }
        let mut t = TripleElement::identity(moduli);
        t.0[i - 1] = m;
        Ok(t)
    }

    /// Componentwise reduction `π_{q₁,q₂,q₃}` to divisors of the current moduli.
    pub fn reduce(&self, target: Moduli) -> Result<TripleElement> {
        Ok(TripleElement([
            self.0[0].reduce(target.0[0])?,
            self.0[1].reduce(target.0[1])?,
            self.0[2].reduce(target.0[2])?,
        ]))
    }

    /// The twelve entries `(x₁,y₁,z₁,w₁, x₂,…, w₃)` as canonical residues.
    pub fn entries(&self) -> [u64; 12] {
        let mut out = [0u64; 12];
        for (k, m) in self.0.iter().enumerate() {
            out[4 * k..4 * k + 4].copy_from_slice(&m.entries());
        }
        out
    }
}

impl fmt::Display for TripleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {}; {})", self.0[0], self.0[1], self.0[2])
    }
}

/// `π_{q₁,q₂,q₃}` applied to a triple given by integer lifts or by residues of larger moduli.
pub fn reduce_triple(g: &TripleElement, target: Moduli) -> Result<TripleElement> {
    g.reduce(target)
}
