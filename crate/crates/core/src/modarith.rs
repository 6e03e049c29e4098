//! Integer factorization, exact divisibility (`a ‖ b`), fractional-exponent
//! parts `q^{α}` and CRT split/combine over prime-power factors.

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted anywhere in the crate.
pub const MAX_MODULUS: u64 = i64::MAX as u64;

/// Prime-power decomposition, primes strictly increasing, exponents ≥ 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Builds from raw pairs, validating ordering and exponents.
    pub fn from_pairs(mut factors: Vec<(u64, u32)>) -> Result<Self> {
        factors.sort_unstable();
        for w in factors.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Parse(format!("repeated prime {}", w[0].0)));
            }
        }
        if factors.iter().any(|&(p, n)| n == 0 || !is_prime(p)) {
            return Err(Error::Parse("factor pairs need prime bases and exponents >= 1".into()));
        }
        let f = Self { factors };
        f.checked_value()?;
        Ok(f)
    }

    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// The prime powers `p^n` in ascending order of `p`.
    pub fn prime_powers(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, n)| p.pow(n)).collect()
    }

    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(pp, _)| pp == p)
            .map_or(0, |&(_, n)| n)
    }

    pub fn value(&self) -> u64 {
        self.factors.iter().map(|&(p, n)| p.pow(n)).product()
    }

    fn checked_value(&self) -> Result<u64> {
        let mut acc: u64 = 1;
        for &(p, n) in &self.factors {
            for _ in 0..n {
                acc = acc
                    .checked_mul(p)
                    .filter(|&v| v <= MAX_MODULUS)
                    .ok_or(Error::InvalidModulus(u64::MAX))?;
            }
        }
        Ok(acc)
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }
}

fn check_modulus(q: u64) -> Result<()> {
    if q == 0 || q > MAX_MODULUS {
        Err(Error::InvalidModulus(q))
    } else {
        Ok(())
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

// Brent's variant; deterministic sequence of constants.
fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    for c in 1u64.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

fn split_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    split_into(d, out);
    split_into(n / d, out);
}

/// Factorizes `q` by trial division up to 1000, then Pollard rho.
pub fn factorize(q: u64) -> Result<Factorization> {
    check_modulus(q)?;
    let mut n = q;
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p < 1000 && p * p <= n {
        while n % p == 0 {
            primes.push(p);
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    split_into(n, &mut primes);
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((last, n)) if *last == p => *n += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { factors })
}

/// `a ‖ b`: every prime power exactly dividing `a` also exactly divides `b`.
pub fn exact_divides(a: u64, b: u64) -> Result<bool> {
    check_modulus(a)?;
    check_modulus(b)?;
    let fa = factorize(a)?;
    let fb = factorize(b)?;
    Ok(fa.pairs().iter().all(|&(p, n)| fb.exponent_of(p) == n))
}

/// All exact divisors of `q` (products of subsets of its prime powers), ascending.
pub fn exact_divisors(q: u64) -> Result<Vec<u64>> {
    let f = factorize(q)?;
    let mut out = vec![1u64];
    for pp in f.prime_powers() {
        let extra: Vec<u64> = out.iter().map(|d| d * pp).collect();
        out.extend(extra);
    }
    out.sort_unstable();
    Ok(out)
}

/// All positive divisors of `q`, ascending.
pub fn divisors(q: u64) -> Result<Vec<u64>> {
    let f = factorize(q)?;
    let mut out = vec![1u64];
    for &(p, n) in f.pairs() {
        let mut extra = Vec::new();
        for d in &out {
            let mut pk = 1;
            for _ in 0..n {
                pk *= p;
                extra.push(d * pk);
            }
        }
        out.extend(extra);
    }
    out.sort_unstable();
    Ok(out)
}

/// `q^{α} = ∏ p^{⌊nα⌋}` for an exact rational `α ∈ (0, 1]`.
pub fn alpha_part(q: u64, alpha: Ratio<u64>) -> Result<u64> {
    check_modulus(q)?;
    if *alpha.numer() == 0 || alpha > Ratio::from_integer(1) {
        return Err(Error::InvalidExponent(format!("{}/{}", alpha.numer(), alpha.denom())));
    }
    let f = factorize(q)?;
    Ok(f.pairs()
        .iter()
        .map(|&(p, n)| {
            let floor = (Ratio::from_integer(n as u64) * alpha).floor().to_integer();
            p.pow(floor as u32)
        })
        .product())
}

/// Reduces `x mod q` to its residues modulo each prime power of `factors`.
pub fn crt_split(x: u64, factors: &Factorization) -> Vec<u64> {
    factors.prime_powers().into_iter().map(|m| x % m).collect()
}

/// Inverse of [`crt_split`].
pub fn crt_combine(residues: &[u64], factors: &Factorization) -> Result<u64> {
    let moduli = factors.prime_powers();
    if residues.len() != moduli.len() {
        return Err(Error::ResidueCount {
            expected: moduli.len(),
            got: residues.len(),
        });
    }
    let pairs: Vec<(u64, u64)> = residues.iter().copied().zip(moduli).collect();
    crt_combine_moduli(&pairs)
}

/// Combines `(residue, modulus)` pairs with pairwise coprime moduli.
pub fn crt_combine_moduli(pairs: &[(u64, u64)]) -> Result<u64> {
    for &(_, m) in pairs {
        check_modulus(m)?;
    }
    for (i, &(_, a)) in pairs.iter().enumerate() {
        for &(_, b) in &pairs[i + 1..] {
            if a.gcd(&b) != 1 {
                return Err(Error::NotCoprime(a, b));
            }
        }
    }
    let mut x: u128 = 0;
    let mut m: u128 = 1;
    for &(r, mi) in pairs {
        let mi = mi as u128;
        let r = r as u128 % mi;
        // Solve x + m*t ≡ r (mod mi).
        let inv = mod_inverse((m % mi) as u64, mi as u64).expect("coprime moduli") as u128;
        let diff = (r + mi - x % mi) % mi;
        let t = diff * inv % mi;
        x += m * t;
        m *= mi;
        if m > MAX_MODULUS as u128 {
            return Err(Error::InvalidModulus(u64::MAX));
        }
    }
    Ok(x as u64)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).unwrap().pairs(), &[(2, 2), (3, 1)]);
        assert!(factorize(1).unwrap().is_one());
        assert_eq!(factorize(360).unwrap().pairs(), &[(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(0), Err(Error::InvalidModulus(0)));
        assert!(factorize(1u64 << 63).is_err());
    }

    #[test]
    fn factorize_large() {
        // 2^61 - 1 is prime; the product exercises Pollard rho.
        let p = (1u64 << 61) - 1;
        assert_eq!(factorize(p).unwrap().pairs(), &[(p, 1)]);
        let n = 1_000_000_007u64 * 998_244_353;
        assert_eq!(
            factorize(n).unwrap().pairs(),
            &[(998_244_353, 1), (1_000_000_007, 1)]
        );
        assert_eq!(factorize(MAX_MODULUS).unwrap().value(), MAX_MODULUS);
    }

    #[test]
    fn exact_divides_examples() {
        assert!(exact_divides(4, 12).unwrap());
        assert!(!exact_divides(2, 12).unwrap());
        for n in 1..50 {
            assert!(exact_divides(1, n).unwrap());
        }
        assert!(exact_divides(0, 3).is_err());
    }

    #[test]
    fn exact_divides_order_properties() {
        for a in 1..60u64 {
            assert!(exact_divides(a, a).unwrap());
            for b in 1..60u64 {
                let ab = exact_divides(a, b).unwrap();
                if ab && exact_divides(b, a).unwrap() {
                    assert_eq!(a, b);
                }
                if !ab {
                    continue;
                }
                for c in 1..60u64 {
                    if exact_divides(b, c).unwrap() {
                        assert!(exact_divides(a, c).unwrap(), "{a} {b} {c}");
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_part_examples() {
        assert_eq!(alpha_part(8, Ratio::new(1, 2)).unwrap(), 2);
        assert_eq!(alpha_part(1, Ratio::new(1, 3)).unwrap(), 1);
        assert_eq!(alpha_part(72, Ratio::new(2, 3)).unwrap(), 12);
        assert!(alpha_part(72, Ratio::new(0, 1)).is_err());
        assert!(alpha_part(72, Ratio::new(4, 3)).is_err());
    }

    #[test]
    fn alpha_part_boundary_is_exact() {
        // ⌊3 · 2/3⌋ = 2 exactly; a float 0.666.. could give 1.
        assert_eq!(alpha_part(27, Ratio::new(2, 3)).unwrap(), 9);
        for q in 1..200u64 {
            assert_eq!(alpha_part(q, Ratio::from_integer(1)).unwrap(), q);
        }
    }

    #[test]
    fn alpha_part_prime_exponents() {
        for q in 1..300u64 {
            for (num, den) in [(1, 2), (1, 3), (2, 3), (3, 4), (1, 7)] {
                let a = alpha_part(q, Ratio::new(num, den)).unwrap();
                let fa = factorize(a).unwrap();
                for &(p, n) in factorize(q).unwrap().pairs() {
                    let expect = (n as u64 * num / den) as u32;
                    assert_eq!(fa.exponent_of(p), expect);
                }
            }
        }
    }

    #[test]
    fn crt_examples() {
        let f = factorize(12).unwrap();
        assert_eq!(crt_split(7, &f), vec![3, 1]);
        assert_eq!(crt_combine(&[3, 1], &f).unwrap(), 7);
        assert_eq!(crt_split(0, &f), vec![0, 0]);
        assert_eq!(crt_combine_moduli(&[(1, 4), (1, 6)]), Err(Error::NotCoprime(4, 6)));
        assert!(crt_combine(&[1], &f).is_err());
    }

    #[test]
    fn crt_round_trip_exhaustive() {
        for q in 1..=1000u64 {
            let f = factorize(q).unwrap();
            for x in 0..q {
                assert_eq!(crt_combine(&crt_split(x, &f), &f).unwrap(), x);
            }
        }
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(exact_divisors(12).unwrap(), vec![1, 3, 4, 12]);
        assert_eq!(divisors(12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
    }

    proptest! {
        #[test]
        fn factorization_recovers_value(q in 1u64..=MAX_MODULUS) {
            let f = factorize(q).unwrap();
            prop_assert_eq!(f.value(), q);
            for w in f.pairs().windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
            for &(p, n) in f.pairs() {
                prop_assert!(is_prime(p) && n >= 1);
            }
        }
    }
}
