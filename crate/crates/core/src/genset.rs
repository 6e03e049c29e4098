//! Symmetric generating sets in `SL₂(ℤ)³`, their reductions, and the
//! subgroup they reach modulo `(q₁, q₂, q₃)`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sl2::{GroupIndex, IntMatrix, IntTriple, Moduli, ProductGroup, TripleElement, PRODUCT_CAP};

/// Seed used by the `dense-random` preset when none is given.
pub const DENSE_RANDOM_SEED: u64 = 4;

/// A finite multiset `S ⊂ SL₂(ℤ)³` with `S = S⁻¹` (multiplicities included).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<IntTriple>", into = "Vec<IntTriple>")]
pub struct GeneratingSet {
    elems: Vec<IntTriple>,
}

/// Why a list of triples is not a valid symmetric generating set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Empty,
    Determinant { element: IntTriple, component: usize },
    MissingInverse { element: IntTriple, count: usize, inverse_count: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "empty set"),
            Violation::Determinant { element, component } => {
                write!(f, "component {component} of {element} has determinant != 1")
            }
            Violation::MissingInverse { element, count, inverse_count } => write!(
                f,
                "{element} appears {count} times but its inverse appears {inverse_count} times"
            ),
        }
    }
}

/// Checks determinants and that every element's inverse occurs with equal multiplicity.
pub fn validate_symmetric(elems: &[IntTriple]) -> std::result::Result<(), Violation> {
    if elems.is_empty() {
        return Err(Violation::Empty);
    }
    for s in elems {
        for (k, m) in s.0.iter().enumerate() {
            if m.det() != 1 {
                return Err(Violation::Determinant { element: *s, component: k + 1 });
            }
        }
    }
    let mut counts: HashMap<IntTriple, usize> = HashMap::new();
    for s in elems {
        *counts.entry(*s).or_default() += 1;
    }
    for s in elems {
        let c = counts[s];
        let ci = counts.get(&s.inverse()).copied().unwrap_or(0);
        if c != ci {
            return Err(Violation::MissingInverse { element: *s, count: c, inverse_count: ci });
        }
    }
    Ok(())
}

impl GeneratingSet {
    pub fn new(elems: Vec<IntTriple>) -> Result<Self> {
        validate_symmetric(&elems).map_err(|v| match v {
            Violation::Empty => Error::EmptyGeneratingSet,
            Violation::Determinant { element, .. } => {
                let bad = element.0.iter().find(|m| m.det() != 1).unwrap();
                Error::Determinant(bad.det())
            }
            other => Error::NotSymmetric(other.to_string()),
        })?;
        Ok(Self { elems })
    }

    /// Adds `s⁻¹` after every `s`.
    pub fn symmetrize(generators: &[IntTriple]) -> Result<Self> {
        let elems = generators.iter().flat_map(|s| [*s, s.inverse()]).collect();
        Self::new(elems)
    }

    pub fn elements(&self) -> &[IntTriple] {
        &self.elems
    }

    /// `|S|` counted with multiplicity.
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn reduce(&self, moduli: Moduli) -> Result<Vec<TripleElement>> {
        self.elems.iter().map(|s| s.reduce(moduli)).collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let elems: Vec<IntTriple> = serde_json::from_str(text)?;
        Self::new(elems)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.elems).expect("serializable")
    }

    pub fn preset(p: Preset) -> Self {
        let a = IntMatrix::UPPER;
        let b = IntMatrix::LOWER;
        let ab = a.checked_mul(&b).unwrap();
        let gens: Vec<IntTriple> = match p {
            Preset::Diagonal => vec![IntTriple([a; 3]), IntTriple([b; 3])],
            Preset::Twisted => {
                let aab = a.checked_mul(&ab).unwrap();
                let ba = b.checked_mul(&a).unwrap();
                vec![
                    IntTriple([a, b, ab]),
                    IntTriple([a, b, aab]),
                    IntTriple([b, ab, a]),
                    IntTriple([ab, ba, ab]),
                ]
            }
            Preset::DenseRandom(seed) => {
                // four random triples with entries in [-3, 3], plus inverses
                let pool = small_sl2_matrices(3);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..4)
                    .map(|_| IntTriple([0; 3].map(|_| *pool.choose(&mut rng).unwrap())))
                    .collect()
            }
        };
        Self::symmetrize(&gens).expect("presets are valid")
    }
}

impl TryFrom<Vec<IntTriple>> for GeneratingSet {
    type Error = Error;
    fn try_from(v: Vec<IntTriple>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<GeneratingSet> for Vec<IntTriple> {
    fn from(s: GeneratingSet) -> Self {
        s.elems
    }
}

/// All matrices in `SL₂(ℤ)` with entries in `[−bound, bound]`, sorted.
pub fn small_sl2_matrices(bound: i64) -> Vec<IntMatrix> {
    let r = -bound..=bound;
    let mut out = Vec::new();
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    let m = IntMatrix([[a, b], [c, d]]);
                    if m.det() == 1 {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

/// Shipped generating sets. They are fixtures, not data from the literature:
/// `Diagonal` never fills the product (it stays on the diagonal copy of `Λ_q`);
/// `Twisted` and the default `DenseRandom` reach all of `Λ_q³` for `q = 2..=5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    Diagonal,
    Twisted,
    DenseRandom(u64),
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Diagonal, Preset::Twisted, Preset::DenseRandom(DENSE_RANDOM_SEED)];

    pub fn name(&self) -> String {
        match self {
            Preset::Diagonal => "diagonal".into(),
            Preset::Twisted => "twisted".into(),
            Preset::DenseRandom(DENSE_RANDOM_SEED) => "dense-random".into(),
            Preset::DenseRandom(s) => format!("dense-random:{s}"),
        }
    }
}

impl FromStr for Preset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "diagonal" => Ok(Preset::Diagonal),
            "twisted" => Ok(Preset::Twisted),
            "dense-random" => Ok(Preset::DenseRandom(DENSE_RANDOM_SEED)),
            other => match other.strip_prefix("dense-random:") {
                Some(seed) => seed
                    .parse()
                    .map(Preset::DenseRandom)
                    .map_err(|_| Error::Parse(format!("bad preset seed in {s:?}"))),
                None => Err(Error::Parse(format!("unknown preset {s:?}"))),
            },
        }
    }
}

/// Breadth-first closure of `π(S)` from the identity. Vertex numbering is the
/// discovery order (parent index, then generator index); radii are word lengths.
pub fn generated_subgroup(s: &GeneratingSet, moduli: Moduli) -> Result<GroupIndex> {
    let group = ProductGroup::new(moduli)?;
    let gens = reduced_codes(s, &group)?;
    generated_from_codes(group, &gens)
}

pub(crate) fn reduced_codes(s: &GeneratingSet, group: &ProductGroup) -> Result<Vec<u64>> {
    s.reduce(group.moduli())?
        .iter()
        .map(|g| Ok(group.code_of(g).expect("reduced element lies in the group")))
        .collect()
}

/// Closure of a list of generator codes; duplicates are harmless.
pub fn generated_from_codes(group: Arc<ProductGroup>, gens: &[u64]) -> Result<GroupIndex> {
    let mut distinct: Vec<u64> = Vec::new();
    for &g in gens {
        if !distinct.contains(&g) {
            distinct.push(g);
        }
    }
    let order = group.order();
    let mut seen = Visited::new(order);
    let id = group.identity_code();
    let mut codes = vec![id];
    let mut radius = vec![0u32];
    seen.insert(id, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let x = codes[v];
        for &g in &distinct {
            let y = group.mul_code(x, g);
            if seen.insert(y, codes.len() as u32) {
                if codes.len() as u128 >= PRODUCT_CAP {
                    return Err(Error::CapExceeded {
                        what: "generated subgroup",
                        needed: PRODUCT_CAP + 1,
                        cap: PRODUCT_CAP,
                    });
                }
                codes.push(y);
                radius.push(radius[v] + 1);
                queue.push_back(codes.len() - 1);
            }
        }
    }
    Ok(GroupIndex::from_codes(group, codes, Some(radius)))
}

enum Visited {
    Dense(Vec<bool>),
    Sparse(std::collections::HashSet<u64>),
}

impl Visited {
    fn new(universe: u64) -> Self {
        if universe as u128 <= PRODUCT_CAP {
            Visited::Dense(vec![false; universe as usize])
        } else {
            Visited::Sparse(Default::default())
        }
    }

    fn insert(&mut self, code: u64, _slot: u32) -> bool {
        match self {
            Visited::Dense(v) => !std::mem::replace(&mut v[code as usize], true),
            Visited::Sparse(s) => s.insert(code),
        }
    }
}

/// Outcome of comparing the reached subgroup with the full product.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surjectivity {
    pub surjective: bool,
    pub reached: u128,
    pub full: u128,
    /// `[Λ_{q₁}×Λ_{q₂}×Λ_{q₃} : ⟨π(S)⟩]`.
    pub index: u128,
}

pub fn surjectivity_check(s: &GeneratingSet, moduli: Moduli) -> Result<Surjectivity> {
    let reached = generated_subgroup(s, moduli)?.len() as u128;
    let full = moduli.product_order()?;
    Ok(Surjectivity { surjective: reached == full, reached, full, index: full / reached })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    const A: IntMatrix = IntMatrix::UPPER;
    const B: IntMatrix = IntMatrix::LOWER;

    fn ab() -> IntMatrix {
        A.checked_mul(&B).unwrap()
    }

    // Orbit enumeration by repeated left multiplication until a fixpoint,
    // using plain triples and a hash set.
    fn orbit_oracle(s: &GeneratingSet, m: Moduli) -> HashSet<TripleElement> {
        let gens = s.reduce(m).unwrap();
        let mut set: HashSet<TripleElement> = HashSet::from([TripleElement::identity(m)]);
        loop {
            let next: HashSet<TripleElement> = set
                .iter()
                .flat_map(|x| gens.iter().map(move |g| g.mul(x).unwrap()))
                .chain(set.iter().copied())
                .collect();
            if next.len() == set.len() {
                return set;
            }
            set = next;
        }
    }

    #[test]
    fn symmetric_validation() {
        let g = IntTriple([A, B, ab()]);
        assert_eq!(validate_symmetric(&[g, g.inverse()]), Ok(()));
        assert!(matches!(
            validate_symmetric(&[IntTriple([A; 3])]),
            Err(Violation::MissingInverse { .. })
        ));
        assert_eq!(validate_symmetric(&[IntTriple::IDENTITY]), Ok(()));
        assert_eq!(validate_symmetric(&[]), Err(Violation::Empty));
        // multiplicity must match
        let v = validate_symmetric(&[g, g, g.inverse()]);
        assert!(matches!(v, Err(Violation::MissingInverse { count: 2, inverse_count: 1, .. })));
        let bad = IntTriple([IntMatrix([[2, 0], [0, 1]]), A, A]);
        assert!(matches!(validate_symmetric(&[bad]), Err(Violation::Determinant { component: 1, .. })));
    }

    #[test]
    fn identity_generates_trivial_group() {
        let s = GeneratingSet::new(vec![IntTriple::IDENTITY]).unwrap();
        let m = Moduli::uniform(3).unwrap();
        let h = generated_subgroup(&s, m).unwrap();
        assert_eq!(h.len(), 1);
        let surj = surjectivity_check(&s, Moduli::uniform(2).unwrap()).unwrap();
        assert!(!surj.surjective);
        assert_eq!(surj.index, 216);
    }

    #[test]
    fn diagonal_preset_mod_two() {
        let s = GeneratingSet::preset(Preset::Diagonal);
        let m = Moduli::uniform(2).unwrap();
        let h = generated_subgroup(&s, m).unwrap();
        assert_eq!(h.len(), 6);
        assert_eq!(h.len(), orbit_oracle(&s, m).len());
        for i in 0..h.len() {
            let g = h.element_at(i);
            assert_eq!(g.0[0], g.0[1]);
            assert_eq!(g.0[1], g.0[2]);
        }
        let surj = surjectivity_check(&s, m).unwrap();
        assert!(!surj.surjective);
        assert_eq!(surj.index, 36);
    }

    #[test]
    fn words_in_a_b_mod_two_match_orbit_oracle() {
        let s = GeneratingSet::symmetrize(&[
            IntTriple([A, B, ab()]),
            IntTriple([B, ab(), A]),
            IntTriple([ab(), A, B]),
        ])
        .unwrap();
        let m = Moduli::uniform(2).unwrap();
        let h = generated_subgroup(&s, m).unwrap();
        let oracle = orbit_oracle(&s, m);
        assert_eq!(h.len(), oracle.len());
        for i in 0..h.len() {
            assert!(oracle.contains(&h.element_at(i)));
        }
        // The sign characters of S₃ ≅ Λ₂ force an even total, index 2.
        assert_eq!(h.len(), 108);
    }

    #[test]
    fn whole_group_listed_is_surjective() {
        let m = Moduli::uniform(2).unwrap();
        let full = GroupIndex::full(m).unwrap();
        // integer lifts of every element of Λ₂, entries in [-3, 3]
        let pool = small_sl2_matrices(3);
        let lift = |r: &crate::sl2::ResidueMatrix| {
            *pool
                .iter()
                .find(|p| crate::sl2::reduce_int_matrix(p, 2).unwrap() == *r)
                .unwrap()
        };
        let elems: Vec<IntTriple> = (0..full.len())
            .map(|i| IntTriple(full.element_at(i).0.map(|r| lift(&r))))
            .collect();
        let s = GeneratingSet::symmetrize(&elems).unwrap();
        assert!(surjectivity_check(&s, m).unwrap().surjective);
    }

    #[test]
    fn subgroup_properties() {
        for preset in Preset::ALL {
            let s = GeneratingSet::preset(preset);
            for m in [
                Moduli::uniform(2).unwrap(),
                Moduli::new(2, 3, 1).unwrap(),
                Moduli::new(3, 1, 1).unwrap(),
                Moduli::new(4, 1, 2).unwrap(),
            ] {
                let h = generated_subgroup(&s, m).unwrap();
                let id = h.identity().expect("contains identity");
                assert_eq!(id, 0);
                for g in s.reduce(m).unwrap() {
                    assert!(h.index_of(&g).is_some());
                }
                if h.len() <= 10_000 {
                    for i in 0..h.len() {
                        for j in 0..h.len() {
                            assert!(h.mul(i, j).is_some());
                        }
                    }
                }
                assert_eq!(m.product_order().unwrap() % h.len() as u128, 0);
            }
        }
    }

    #[test]
    fn reduction_is_monotone_in_moduli() {
        let s = GeneratingSet::preset(Preset::Twisted);
        let big = Moduli::new(4, 6, 2).unwrap();
        let small = Moduli::new(2, 3, 2).unwrap();
        let hb = generated_subgroup(&s, big).unwrap();
        let hs = generated_subgroup(&s, small).unwrap();
        let image: HashSet<TripleElement> =
            (0..hb.len()).map(|i| hb.element_at(i).reduce(small).unwrap()).collect();
        let direct: HashSet<TripleElement> = (0..hs.len()).map(|i| hs.element_at(i)).collect();
        assert_eq!(image, direct);
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let s = GeneratingSet::preset(Preset::Twisted);
        let back = GeneratingSet::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let text = "[[[[1,1],[0,1]],[[1,0],[0,1]],[[1,0],[0,1]]]]";
        assert!(matches!(GeneratingSet::from_json(text), Err(Error::NotSymmetric(_))));
        assert!(matches!(GeneratingSet::from_json("[1,2"), Err(Error::Parse(_))));
        let text = "[[[[2,0],[0,1]],[[1,0],[0,1]],[[1,0],[0,1]]]]";
        assert!(GeneratingSet::from_json(text).is_err());
    }

    #[test]
    fn twisted_and_dense_random_are_surjective() {
        for preset in [Preset::Twisted, Preset::DenseRandom(DENSE_RANDOM_SEED)] {
            let s = GeneratingSet::preset(preset);
            for q in 2..=4 {
                assert!(surjectivity_check(&s, Moduli::uniform(q).unwrap()).unwrap().surjective);
            }
        }
    }

    #[test]
    fn preset_names_parse() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert_eq!("dense-random:9".parse::<Preset>().unwrap(), Preset::DenseRandom(9));
        assert!("nope".parse::<Preset>().is_err());
    }
}
