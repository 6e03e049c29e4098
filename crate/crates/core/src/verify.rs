//! Acceptance suites. Each suite returns a [`SuiteReport`] whose JSON form is
//! a deterministic function of the inputs (no timings, no thread counts).

use std::collections::HashMap;
use std::sync::Arc;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cayley::{build_cayley, CayleyGraph, EXACT_CHEEGER_MAX};
use crate::error::{Error, Result};
use crate::genset::{surjectivity_check, GeneratingSet, Preset};
use crate::glue::{
    commutator_cover_check, dichotomy_test, enumerate_homomorphisms, multiplicativity_failures, Dichotomy, GroupTable,
    Homomorphism, LieVector, MapTable,
};
use crate::growth::{bounded_generation_search, congruence_subgroup, growth_exponent, random_symmetric_subset, GroupSubset};
use crate::oracle::{self, SmallGroup};
use crate::sl2::{enumerate_group, GroupIndex, Moduli};
use crate::spectral::{apply_walk, cheeger_bounds, spectral_gap, spectral_gap_with, spectrum, GapReport, Mode};
use crate::walk::{chi_s_of_graph, decay_table, for_each_walk_power, nonconc_linear, power, LinearForm};

/// Suites in criterion order, followed by the auxiliary ones.
pub const SUITES: [&str; 12] = [
    "group-order",
    "operator",
    "spectral",
    "spectral-sandwich",
    "decay",
    "nonconc",
    "growth",
    "bounded-gen",
    "dichotomy",
    "commutator",
    "conservation",
    "determinism",
];

/// Seed shared by every randomized suite.
pub const VERIFY_SEED: u64 = 0x5eed_2024;

const SLACK: f64 = 1e-9;

/// Moduli with every reached subgroup of at most 1000 elements for the presets.
pub const SMALL_MODULI: [[u64; 3]; 7] = [[2, 2, 2], [2, 3, 1], [3, 3, 1], [4, 1, 1], [5, 1, 1], [2, 1, 5], [1, 4, 3]];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub criterion: Option<u32>,
    pub passed: bool,
    pub checks: u64,
    pub summary: String,
    pub failures: Vec<String>,
    pub measurements: Value,
}

impl SuiteReport {
    fn new(suite: &str, criterion: Option<u32>) -> Self {
        Self {
            suite: suite.into(),
            criterion,
            passed: true,
            checks: 0,
            summary: String::new(),
            failures: Vec::new(),
            measurements: Value::Null,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.passed = false;
            if self.failures.len() < 20 {
                self.failures.push(what());
            }
        }
    }

    fn finish(mut self, summary: String, measurements: Value) -> Self {
        self.summary = summary;
        self.measurements = measurements;
        self
    }

    pub fn line(&self) -> String {
        let tag = match self.criterion {
            Some(c) => format!("criterion {c:>2}"),
            None => "auxiliary   ".into(),
        };
        format!("{} {tag} {:<18} {}", if self.passed { "PASS" } else { "FAIL" }, self.suite, self.summary)
    }
}

struct Prepared {
    graph: Arc<CayleyGraph>,
    gap: Option<GapReport>,
}

/// Runs suites, caching Cayley graphs and spectral gaps between them.
#[derive(Default)]
pub struct Verifier {
    graphs: HashMap<(Preset, Moduli), Prepared>,
}

impl Verifier {
    pub fn new() -> Self {
        Self::default()
    }

    fn graph(&mut self, p: Preset, m: Moduli) -> Result<Arc<CayleyGraph>> {
        if let Some(e) = self.graphs.get(&(p, m)) {
            return Ok(e.graph.clone());
        }
        let graph = Arc::new(build_cayley(&GeneratingSet::preset(p), m)?);
        self.graphs.insert((p, m), Prepared { graph: graph.clone(), gap: None });
        Ok(graph)
    }

    fn gap(&mut self, p: Preset, m: Moduli) -> Result<GapReport> {
        let g = self.graph(p, m)?;
        let entry = self.graphs.get_mut(&(p, m)).expect("just inserted");
        if entry.gap.is_none() {
            entry.gap = Some(spectral_gap(&g)?);
        }
        Ok(entry.gap.unwrap())
    }

    pub fn run(&mut self, suite: &str) -> Result<SuiteReport> {
        match suite {
            "group-order" => group_order(),
            "operator" => self.operator(),
            "spectral" => self.spectral(),
            "spectral-sandwich" => self.sandwich(),
            "decay" => self.decay(),
            "nonconc" => self.nonconc(),
            "growth" => growth(),
            "bounded-gen" => bounded_gen(),
            "dichotomy" => dichotomy(),
            "commutator" => commutator(),
            "conservation" => self.conservation(),
            "determinism" => determinism(),
            other => Err(Error::Parse(format!("unknown suite {other:?}; known: {}", SUITES.join(", ")))),
        }
    }

    /// Criteria 1–10 in order.
    pub fn run_criteria(&mut self) -> Result<Vec<SuiteReport>> {
        SUITES[..10].iter().map(|s| self.run(s)).collect()
    }

    fn small_graphs(&mut self) -> Result<Vec<(Preset, Moduli, Arc<CayleyGraph>)>> {
        let mut out = Vec::new();
        for m in SMALL_MODULI {
            let m = Moduli(m);
            for p in Preset::ALL {
                let g = self.graph(p, m)?;
                if g.num_vertices() <= 1000 {
                    out.push((p, m, g));
                }
            }
        }
        Ok(out)
    }

    fn operator(&mut self) -> Result<SuiteReport> {
        let mut r = SuiteReport::new("operator", Some(2));
        let mut rows = Vec::new();
        let mut worst: f64 = 0.0;
        for (p, m, g) in self.small_graphs()? {
            let chi = chi_s_of_graph(&g)?;
            let reference = oracle::walk_powers_of_delta(&g, 8)?;
            let mut diff: f64 = 0.0;
            for (l, want) in (1..=8).zip(&reference) {
                let got = power(&chi, l)?.to_f64();
                let d = got.iter().zip(want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                r.check(d <= 1e-12, || format!("{} {m} l={l}: max diff {d:e}", p.name()));
                diff = diff.max(d);
            }
            worst = worst.max(diff);
            rows.push(json!({"preset": p.name(), "moduli": m.0, "vertices": g.num_vertices(), "max_diff": diff}));
        }
        let summary = format!("{} graphs, l ≤ 8, max |power − T^l δ| = {worst:.2e}", rows.len());
        Ok(r.finish(summary, Value::Array(rows)))
    }

    fn spectral(&mut self) -> Result<SuiteReport> {
        let mut r = SuiteReport::new("spectral", Some(3));
        let mut rows = Vec::new();
        let mut worst_agree: f64 = 0.0;
        for (p, m, g) in self.small_graphs()? {
            let n = g.num_vertices();
            if n < 2 {
                continue;
            }
            let name = format!("{} {m}", p.name());
            let sp = spectrum(&g, Mode::Dense)?;
            let top = sp.eigenvalues[0];
            r.check((top - 1.0).abs() <= SLACK, || format!("{name}: top eigenvalue {top}"));
            let ones = vec![1.0; n];
            let mut t1 = vec![0.0; n];
            apply_walk(&g, &ones, &mut t1);
            let dev = t1.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max);
            r.check(dev <= SLACK, || format!("{name}: T·1 deviates by {dev:e}"));
            let lo = sp.eigenvalues[n - 1];
            r.check(top <= 1.0 + SLACK && lo >= -1.0 - SLACK, || format!("{name}: spectrum [{lo}, {top}]"));
            r.check(sp.max_residual() <= SLACK, || format!("{name}: residual {:e}", sp.max_residual()));
            let dense = spectral_gap_with(&g, Mode::Dense)?;
            let iter = spectral_gap_with(&g, Mode::Iterative)?;
            let agree = (dense.lambda2 - iter.lambda2).abs();
            worst_agree = worst_agree.max(agree);
            r.check(agree <= 1e-7, || format!("{name}: dense λ₂ {} vs iterative {}", dense.lambda2, iter.lambda2));
            rows.push(json!({
                "preset": p.name(), "moduli": m.0, "vertices": n,
                "lambda2": dense.lambda2, "lambda_min": dense.lambda_min, "gap": dense.gap,
                "iterative_lambda2": iter.lambda2, "bipartite": dense.bipartite,
            }));
        }
        let summary = format!("{} graphs, max |λ₂ dense − iterative| = {worst_agree:.2e}", rows.len());
        Ok(r.finish(summary, Value::Array(rows)))
    }

    fn sandwich(&mut self) -> Result<SuiteReport> {
        let mut r = SuiteReport::new("spectral-sandwich", Some(4));
        let mut rows = Vec::new();
        for q1 in 1..=5u64 {
            for q2 in 1..=5u64 {
                for q3 in 1..=5u64 {
                    let m = Moduli::new(q1, q2, q3)?;
                    if m.product_order()? > 20_000 {
                        continue;
                    }
                    for p in Preset::ALL {
                        let g = self.graph(p, m)?;
                        let n = g.num_vertices();
                        if !(2..=EXACT_CHEEGER_MAX).contains(&n) {
                            continue;
                        }
                        let gap = self.gap(p, m)?;
                        let (h, _) = g.exact_cheeger()?;
                        let hf = ratio_u64(h);
                        let b = cheeger_bounds(g.degree(), gap.lambda2);
                        let name = format!("{} {m}", p.name());
                        r.check(b.lower - SLACK <= hf && hf <= b.upper + SLACK, || {
                            format!("{name}: h = {h} outside [{}, {}]", b.lower, b.upper)
                        });
                        if n <= 16 {
                            let brute = oracle::cheeger_brute(&g)?;
                            r.check(brute == h, || format!("{name}: exact {h} vs brute force {brute}"));
                        }
                        rows.push(json!({
                            "preset": p.name(), "moduli": m.0, "vertices": n, "h": h.to_string(),
                            "lower": b.lower, "upper": b.upper, "lambda2": gap.lambda2,
                        }));
                    }
                }
            }
        }
        let summary = format!("{} graphs with N ≤ {EXACT_CHEEGER_MAX}, all inside the Cheeger bounds", rows.len());
        let summary = if r.passed { summary } else { format!("{} violations", r.failures.len()) };
        Ok(r.finish(summary, Value::Array(rows)))
    }

    fn decay(&mut self) -> Result<SuiteReport> {
        let mut r = SuiteReport::new("decay", Some(5));
        let mut rows = Vec::new();
        let mut tables = 0;
        for q in 2..=5 {
            let m = Moduli::uniform(q)?;
            for p in Preset::ALL {
                if !surjectivity_check(&GeneratingSet::preset(p), m)?.surjective {
                    rows.push(json!({"preset": p.name(), "q": q, "surjective": false}));
                    continue;
                }
                let g = self.graph(p, m)?;
                let gap = self.gap(p, m)?;
                let t = decay_table(&g, gap.lambda_star, 12)?;
                tables += 1;
                for row in &t.rows {
                    r.check(row.ok, || format!("{} q={q} l={}: {} > {}", p.name(), row.l, row.distance, row.bound));
                }
                rows.push(json!({"preset": p.name(), "q": q, "surjective": true, "table": t}));
            }
        }
        let summary = format!("{tables} surjective (preset, q) pairs, l = 1..12, distance ≤ λ_*^l + 1e-9");
        Ok(r.finish(summary, Value::Array(rows)))
    }

    fn nonconc(&mut self) -> Result<SuiteReport> {
        let mut r = SuiteReport::new("nonconc", Some(6));
        let forms = nonconc_forms()?;
        let mut rows = Vec::new();
        let mut min_twisted = f64::INFINITY;
        for q in [2u64, 3, 5] {
            let m = Moduli::uniform(q)?;
            for p in Preset::ALL {
                if !surjectivity_check(&GeneratingSet::preset(p), m)?.surjective {
                    continue;
                }
                let g = self.graph(p, m)?;
                let gap = self.gap(p, m)?;
                for row in nonconc_linear(&g, gap.lambda_star, &forms, q, 10)? {
                    r.check(row.ok, || format!("{} Q={q} form {} l={}: {} > {}", p.name(), row.form, row.l, row.max_float, row.bound));
                    if p == Preset::Twisted && row.l >= 4 {
                        min_twisted = min_twisted.min(row.exponent);
                        r.check(row.exponent > 0.0, || format!("twisted Q={q} form {} l={}: ĉ = {}", row.form, row.l, row.exponent));
                    }
                    rows.push(json!({"preset": p.name(), "row": row}));
                }
            }
        }
        let summary = format!("{} rows over 5 forms, Q ∈ {{2,3,5}}; min ĉ (twisted, l ≥ 4) = {min_twisted:.4}", rows.len());
        Ok(r.finish(summary, Value::Array(rows)))
    }

    fn conservation(&mut self) -> Result<SuiteReport> {
        let mut r = SuiteReport::new("conservation", None);
        let mut measures = 0;
        for (p, m, g) in self.small_graphs()? {
            for_each_walk_power(&g, 12, |l, mu| {
                measures += 1;
                let total = mu.total();
                r.check(total.is_one(), || format!("{} {m} l={l}: total {total}", p.name()));
                Ok(())
            })?;
            let chi = chi_s_of_graph(&g)?;
            let sq = power(&chi, 5)?;
            measures += 1;
            r.check(sq.total().is_one(), || format!("{} {m}: power(χ, 5) total {}", p.name(), sq.total()));
        }
        let summary = format!("{measures} measures, all of total mass exactly 1");
        Ok(r.finish(summary, json!({"measures": measures})))
    }
}

fn ratio_u64(r: Ratio<u64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Five primitive forms on the entries `(a₁,b₁,c₁,d₁, a₂,…, d₃)`.
pub fn nonconc_forms() -> Result<Vec<LinearForm>> {
    [
        [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0],
        [1, 0, 0, -1, 0, 0, 0, 0, 0, 2, 0, 0],
        [1, 0, 0, 1, 1, 0, 0, 1, 1, 0, 0, 1],
        [0, 0, 3, 0, 0, 2, 0, 0, 1, 0, 0, -5],
    ]
    .into_iter()
    .map(LinearForm::new)
    .collect()
}

fn group_order() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("group-order", Some(1));
    let mut rows = Vec::new();
    for q in 1..=16u64 {
        let enumerated = enumerate_group(q)?.len() as u128;
        let formula = oracle::lambda_order_formula(q);
        let brute = oracle::count_det_one(q) as u128;
        r.check(formula.is_integer() && formula.to_integer() == enumerated && brute == enumerated, || {
            format!("q={q}: enumerated {enumerated}, formula {formula}, brute {brute}")
        });
        rows.push(json!({"q": q, "order": enumerated, "formula": formula.to_string()}));
    }
    Ok(r.finish("|Λ_q| = q³∏(1−p⁻²) for q = 1..16".into(), Value::Array(rows)))
}

fn growth() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("growth", Some(7));
    let index = Arc::new(GroupIndex::full(Moduli::uniform(3)?)?);
    let n = index.len();
    let mut subgroup_rows = Vec::new();
    let mut subgroups: Vec<(String, GroupSubset)> = Vec::new();
    for qp in [[1, 1, 1], [3, 1, 1], [1, 3, 3], [3, 3, 1]] {
        subgroups.push((format!("Γ({},{},{})", qp[0], qp[1], qp[2]), congruence_subgroup(qp, index.clone())?));
    }
    let diag = crate::genset::generated_subgroup(&GeneratingSet::preset(Preset::Diagonal), Moduli::uniform(3)?)?;
    let members: Vec<usize> = diag.codes().iter().map(|&c| index.index_of_code(c).expect("full index")).collect();
    subgroups.push(("diagonal".into(), GroupSubset::from_indices(index.clone(), &members)?));
    for (name, s) in &subgroups {
        let rep = growth_exponent(s, None)?;
        r.check(rep.exponent == 1.0, || format!("subgroup {name}: exponent {}", rep.exponent));
        subgroup_rows.push(json!({"subgroup": name, "size": rep.size, "exponent": rep.exponent}));
    }
    let (lo, hi) = ((n as f64).powf(0.5).ceil() as usize, (n as f64).powf(0.8).floor() as usize);
    let mut rows = Vec::new();
    let mut growing = 0;
    for i in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED ^ (0x6700 + i));
        let target = ((lo as f64).ln() + rng.gen::<f64>() * ((hi - 1) as f64 / lo as f64).ln()).exp() as usize;
        let a = random_symmetric_subset(index.clone(), target.max(lo), &mut rng)?;
        r.check((lo..=hi).contains(&a.len()), || format!("set {i}: size {} outside [{lo}, {hi}]", a.len()));
        let rep = growth_exponent(&a, None)?;
        let brute = oracle::triple_product_size(&a)?;
        r.check(brute == rep.triple_size, || format!("set {i}: |AAA| {} vs oracle {brute}", rep.triple_size));
        if rep.exponent > 1.05 {
            growing += 1;
        }
        rows.push(json!({"seed_offset": i, "size": rep.size, "triple_size": rep.triple_size, "exponent": rep.exponent}));
    }
    r.check(growing >= 18, || format!("only {growing}/20 sets have exponent > 1.05"));
    let summary = format!("subgroups e = 1; {growing}/20 random sets with e > 1.05, |AAA| matches oracle");
    Ok(r.finish(summary, json!({"subgroups": subgroup_rows, "random": rows})))
}

fn bounded_gen() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("bounded-gen", Some(8));
    let mut rows = Vec::new();
    let mut verified = 0;
    for q in [2u64, 3] {
        let index = Arc::new(GroupIndex::full(Moduli::uniform(q)?)?);
        let n = index.len();
        for i in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED ^ (0x8000 + 16 * q + i));
            let fraction = 0.02 + 0.18 * rng.gen::<f64>();
            let a = random_symmetric_subset(index.clone(), ((n as f64 * fraction) as usize).max(1), &mut rng)?;
            let bg = bounded_generation_search(&a, 6)?;
            let res = &bg.result;
            let name = format!("q={q} set {i}");
            if res.found {
                let stages = oracle::power_stages(&a, res.k_star)?;
                let target = oracle::congruence_members(res.q_prime, &index)?;
                let covered = |k: usize| target.iter().all(|t| stages[k].binary_search(t).is_ok());
                let k = res.k_star as usize;
                r.check(bg.contains_at_k_star && covered(k), || format!("{name}: Γ{:?} not inside A^{k}", res.q_prime));
                match bg.excluded_before {
                    Some(ex) => r.check(ex && !covered(k - 1), || format!("{name}: Γ{:?} already inside A^{}", res.q_prime, k - 1)),
                    None => r.check(k == 0 && target.len() == 1, || format!("{name}: missing k*−1 certificate")),
                }
                verified += 1;
            }
            rows.push(json!({"q": q, "seed_offset": i, "size": a.len(), "search": bg}));
        }
    }
    let summary = format!("{verified}/20 dense subsets of Γ₂, Γ₃ with certificates verified at k* and k*−1");
    Ok(r.finish(summary, Value::Array(rows)))
}

/// Groups of order at most 24 used by the dichotomy family.
pub const DICHOTOMY_GROUPS: [SmallGroup; 9] = [
    SmallGroup::Cyclic(2),
    SmallGroup::Cyclic(3),
    SmallGroup::Cyclic(4),
    SmallGroup::Cyclic(6),
    SmallGroup::Cyclic(8),
    SmallGroup::Cyclic(12),
    SmallGroup::Lambda(2),
    SmallGroup::Lambda(3),
    SmallGroup::Cyclic(24),
];

fn small_table(g: SmallGroup) -> Result<GroupTable> {
    match g {
        SmallGroup::Cyclic(n) => Ok(GroupTable::cyclic(n as usize)),
        SmallGroup::Lambda(q) => GroupTable::from_index(&GroupIndex::full(Moduli::new(q, 1, 1)?)?),
    }
}

fn dichotomy() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("dichotomy", Some(9));
    let epsilon = 1e-4;
    let tables: Vec<Arc<GroupTable>> = DICHOTOMY_GROUPS.iter().map(|&g| small_table(g).map(Arc::new)).collect::<Result<_>>()?;
    let oracle_tables: Vec<Vec<Vec<u32>>> = DICHOTOMY_GROUPS.iter().map(|g| g.table()).collect::<Result<_>>()?;
    let mut homs: HashMap<(usize, usize), Vec<Homomorphism>> = HashMap::new();
    let mut counts = [0u64; 3];
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED ^ 0x9000);
    for i in 0..1000 {
        let (s, t) = (rng.gen_range(0..tables.len()), rng.gen_range(0..tables.len()));
        let (src, dst) = (&tables[s], &tables[t]);
        let hs = match homs.get(&(s, t)) {
            Some(h) => h,
            None => homs.entry((s, t)).or_insert(enumerate_homomorphisms(src, dst)?),
        };
        let m = dst.order() as u32;
        let image: Vec<u32> = match rng.gen_range(0..4) {
            0 => (0..src.order()).map(|_| rng.gen_range(0..m)).collect(),
            kind => {
                let mut img = hs[rng.gen_range(0..hs.len())].image.clone();
                for _ in 0..kind - 1 {
                    let x = rng.gen_range(0..img.len());
                    img[x] = rng.gen_range(0..m);
                }
                img
            }
        };
        let psi = MapTable::new(src.clone(), dst.clone(), image.clone())?;
        let fails = multiplicativity_failures(&psi)?.count;
        let brute = oracle::multiplicativity_failures(&oracle_tables[s], &oracle_tables[t], &image);
        r.check(fails == brute, || format!("ψ #{i}: failures {fails} vs oracle {brute}"));
        match dichotomy_test(&psi, epsilon, hs)? {
            Dichotomy::Case1 { agreeing, .. } => {
                counts[0] += 1;
                let n = src.order() as f64;
                r.check((agreeing as f64) < (1.0 - epsilon) * n * n, || format!("ψ #{i}: Case1 with {agreeing} agreeing pairs"));
            }
            Dichotomy::Case2 { subset, generator_images, .. } => {
                counts[1] += 1;
                let f = hs.iter().find(|h| h.generator_images == generator_images).expect("certificate from the list");
                let hom_fails = oracle::multiplicativity_failures(&oracle_tables[s], &oracle_tables[t], &f.image);
                let agrees: Vec<u32> = (0..image.len() as u32).filter(|&x| f.image[x as usize] == image[x as usize]).collect();
                r.check(hom_fails == 0 && agrees == subset, || format!("ψ #{i}: Case2 certificate does not verify"));
            }
            Dichotomy::DichotomyViolationCandidate { .. } => {
                counts[2] += 1;
                r.check(false, || format!("ψ #{i}: dichotomy-violation-candidate"));
            }
        }
    }
    let summary = format!("1000 maps: {} case 1, {} case 2, {} violation candidates", counts[0], counts[1], counts[2]);
    Ok(r.finish(summary, json!({"case1": counts[0], "case2": counts[1], "violations": counts[2], "epsilon": epsilon})))
}

fn commutator() -> Result<SuiteReport> {
    let mut r = SuiteReport::new("commutator", Some(10));
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
    let mut rows = Vec::new();
    for q in 1..=6u64 {
        let primes: Vec<u64> = (2..=q).filter(|&p| q % p == 0 && (2..p).all(|d| p % d != 0)).collect();
        let (mut pairs, mut holds) = (0u64, 0u64);
        for v in &vecs {
            for w in &vecs {
                let independent = primes.iter().all(|&p| oracle::independent_mod_p(v, w, p));
                match commutator_cover_check(v, w, q) {
                    Ok(c) if independent => {
                        pairs += 1;
                        let scan = oracle::commutator_scan(v, w, q);
                        holds += c.holds as u64;
                        r.check(c.holds == scan, || format!("q={q} v={v:?} w={w:?}: check {} vs scan {scan}", c.holds));
                    }
                    Err(Error::Precondition(_)) if !independent => {}
                    other => r.check(false, || format!("q={q} v={v:?} w={w:?}: independent={independent}, got {other:?}")),
                }
            }
        }
        rows.push(json!({"q": q, "pairs": pairs, "holds": holds}));
    }
    let total: u64 = rows.iter().map(|x| x["pairs"].as_u64().unwrap_or(0)).sum();
    let summary = format!("{total} independent primitive pairs over q = 1..6 agree with image enumeration");
    Ok(r.finish(summary, Value::Array(rows)))
}

/// Criteria 1–10 serialized under a pool of `threads` threads.
pub fn criteria_json(threads: usize) -> Result<(Vec<SuiteReport>, String)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    pool.install(|| {
        let reports = Verifier::new().run_criteria()?;
        let text = serde_json::to_string_pretty(&reports)?;
        Ok((reports, text))
    })
}

/// Criteria 1–10 under pools of 1 and 8 threads, and their byte comparison.
pub fn determinism_pair() -> Result<(Vec<SuiteReport>, SuiteReport)> {
    let (reports, one) = criteria_json(1)?;
    let (_, eight) = criteria_json(8)?;
    let mut r = SuiteReport::new("determinism", Some(11));
    r.check(one == eight, || "reports differ between 1 and 8 threads".into());
    let summary = format!("{} bytes of criteria 1–10 output, identical with 1 and 8 threads", one.len());
    let r = r.finish(summary, json!({"bytes": one.len(), "identical": one == eight}));
    Ok((reports, r))
}

fn determinism() -> Result<SuiteReport> {
    Ok(determinism_pair()?.1)
}

/// Ratio of two integers as the `"num/den"` string used in reports.
pub fn ratio_text(r: &Ratio<u64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `h` as a float, for CSV output.
pub fn ratio_value(r: &Ratio<u64>) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suites_pass() {
        for s in ["group-order", "spectral-sandwich", "commutator", "conservation"] {
            let rep = Verifier::new().run(s).unwrap();
            assert!(rep.passed, "{}: {:?}", rep.line(), rep.failures);
        }
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(Verifier::new().run("nope"), Err(Error::Parse(_))));
    }

    #[test]
    fn forms_are_primitive() {
        assert_eq!(nonconc_forms().unwrap().len(), 5);
    }
}
