use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use sl2x_core::cayley::{build_cayley, EXACT_CHEEGER_MAX};
use sl2x_core::genset::surjectivity_check;
use sl2x_core::glue::{dichotomy_test, enumerate_homomorphisms, multiplicativity_failures, Dichotomy, MapTable};
use sl2x_core::growth::{bounded_generation_search, growth_exponent, random_symmetric_subset};
use sl2x_core::sl2::{GroupIndex, Moduli};
use sl2x_core::spectral::{spectral_gap, summarize};
use sl2x_core::verify::nonconc_forms;
use sl2x_core::walk::{decay_table, nonconc_linear, LinearForm};

use crate::commands::{decay_csv, load_genset, nonconc_csv, parse_group};
use crate::output::{CliResult, Failure, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Analysis {
    Spectral,
    Walk,
    Growth,
    Glue,
}

/// `q = from..=to` as `(q,q,q)`, or `(q,1,1)` when `components` is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QRange {
    pub from: u64,
    pub to: u64,
    #[serde(default = "three")]
    pub components: u8,
}

fn three() -> u8 {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Preset name or path to a JSON generator list.
    #[serde(default = "default_genset")]
    pub genset: String,
    #[serde(default)]
    pub moduli: Vec<[u64; 3]>,
    #[serde(default)]
    pub q_range: Option<QRange>,
    pub analysis: Analysis,
    #[serde(default)]
    pub l_max: Option<u32>,
    /// `Q` values for walk analyses.
    #[serde(default)]
    pub q_list: Vec<u64>,
    #[serde(default)]
    pub forms: Vec<LinearForm>,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub k_max: Option<u32>,
    #[serde(default)]
    pub m_max: Option<u32>,
    /// Largest accepted eigenpair residual.
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Growth: fraction of the group in each random subset.
    #[serde(default)]
    pub density: Option<f64>,
    /// Glue: groups as `cyclic:n` or `lambda:q`, and the number of maps.
    #[serde(default)]
    pub source: Option<String>,
    #[serde(default)]
    pub target: Option<String>,
    #[serde(default)]
    pub maps: Option<usize>,
}

fn default_genset() -> String {
    "twisted".into()
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Failure::config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn moduli_list(&self) -> CliResult<Vec<Moduli>> {
        let mut out: Vec<Moduli> = self.moduli.iter().map(|m| Moduli::new(m[0], m[1], m[2])).collect::<Result<_, _>>()?;
        if let Some(r) = self.q_range {
            if r.from > r.to || !matches!(r.components, 1 | 3) {
                return Err(Failure::config("q_range needs from ≤ to and components 1 or 3"));
            }
            for q in r.from..=r.to {
                out.push(if r.components == 1 { Moduli::new(q, 1, 1)? } else { Moduli::uniform(q)? });
            }
        }
        Ok(out)
    }

    fn validate(&self) -> CliResult<()> {
        let needs_seed = matches!(self.analysis, Analysis::Growth | Analysis::Glue);
        if needs_seed && self.seed.is_none() {
            return Err(Failure::config("randomized analyses need a seed"));
        }
        let moduli = self.moduli_list()?;
        match self.analysis {
            Analysis::Spectral | Analysis::Growth if moduli.is_empty() => {
                return Err(Failure::config("no moduli given (moduli or q_range)"));
            }
            Analysis::Walk if self.q_list.is_empty() => return Err(Failure::config("walk analysis needs q_list")),
            Analysis::Glue if self.source.is_none() || self.target.is_none() => {
                return Err(Failure::config("glue analysis needs source and target groups"));
            }
            _ => {}
        }
        if let Some(e) = self.epsilon {
            if self.analysis == Analysis::Glue && !(e > 0.0 && e < 1.0 / 1600.0) {
                return Err(Failure::config(format!("epsilon {e} outside (0, 1/1600)")));
            }
        }
        if let Some(d) = self.density {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Failure::config(format!("density {d} outside (0, 1]")));
            }
        }
        if let Some(t) = self.tolerance {
            if !(t > 0.0) {
                return Err(Failure::config("tolerance must be positive"));
            }
        }
        if self.l_max == Some(0) {
            return Err(Failure::config("l_max must be at least 1"));
        }
        for &q in &self.q_list {
            Moduli::uniform(q)?;
        }
        load_genset(&self.genset)?;
        Ok(())
    }
}

pub fn run_config(path: &Path) -> CliResult<Output> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::config(format!("reading {}: {e}", path.display())))?;
    let cfg = ExperimentConfig::parse(&text)?;
    run(&cfg)
}

pub fn run(cfg: &ExperimentConfig) -> CliResult<Output> {
    let mut o = Output::new("run", cfg);
    match cfg.analysis {
        Analysis::Spectral => spectral(cfg, &mut o)?,
        Analysis::Walk => walk(cfg, &mut o)?,
        Analysis::Growth => growth(cfg, &mut o)?,
        Analysis::Glue => glue(cfg, &mut o)?,
    }
    Ok(o)
}

fn spectral(cfg: &ExperimentConfig, o: &mut Output) -> CliResult<()> {
    let s = load_genset(&cfg.genset)?;
    let mut csv = String::from("q1,q2,q3,N,lambda2,lambda_min,gap,h_lower,h_upper,h_exact\n");
    let mut rows = Vec::new();
    for m in cfg.moduli_list()? {
        let g = build_cayley(&s, m)?;
        let report = spectral_gap(&g)?;
        if let Some(tol) = cfg.tolerance {
            if report.max_residual > tol {
                return Err(Failure::Analysis(format!("{m}: residual {:e} above tolerance {tol:e}", report.max_residual)));
            }
        }
        let exact = if g.num_vertices() <= EXACT_CHEEGER_MAX { Some(g.exact_cheeger()?.0) } else { None };
        let sum = summarize(&g, &report, exact);
        let [q1, q2, q3] = m.0;
        let _ = writeln!(
            csv,
            "{q1},{q2},{q3},{},{:e},{:e},{:e},{:e},{:e},{}",
            sum.vertices,
            sum.lambda2,
            sum.lambda_min,
            sum.gap,
            sum.cheeger_lower,
            sum.cheeger_upper,
            sum.exact_cheeger.clone().unwrap_or_default()
        );
        rows.push(json!({"moduli": m.0, "summary": sum, "max_residual": report.max_residual, "bipartite": report.bipartite}));
    }
    o.csv("spectral.csv", csv);
    o.result(&json!({"rows": rows}));
    Ok(())
}

fn walk(cfg: &ExperimentConfig, o: &mut Output) -> CliResult<()> {
    let s = load_genset(&cfg.genset)?;
    let l_max = cfg.l_max.unwrap_or(10);
    let forms = if cfg.forms.is_empty() { nonconc_forms()? } else { cfg.forms.clone() };
    let (mut decay, mut nonconc, mut summary) = (Vec::new(), Vec::new(), Vec::new());
    for &q in &cfg.q_list {
        let m = Moduli::uniform(q)?;
        let surj = surjectivity_check(&s, m)?;
        let g = build_cayley(&s, m)?;
        let report = spectral_gap(&g)?;
        let table = decay_table(&g, report.lambda_star, l_max)?;
        let rows = nonconc_linear(&g, report.lambda_star, &forms, q, l_max)?;
        o.passed &= rows.iter().all(|r| r.ok) && (!surj.surjective || table.all_ok());
        summary.push(json!({
            "Q": q, "surjective": surj.surjective, "lambda_star": report.lambda_star,
            "decay_ok": table.all_ok(), "nonconc_ok": rows.iter().all(|r| r.ok),
        }));
        decay.push((format!("Q={q}"), table));
        nonconc.extend(rows.into_iter().map(|r| (format!("Q={q}"), r)));
    }
    o.csv("decay.csv", decay_csv(&decay));
    o.csv("nonconc.csv", nonconc_csv(&nonconc));
    o.result(&json!({"forms": forms, "per_Q": summary}));
    Ok(())
}

fn growth(cfg: &ExperimentConfig, o: &mut Output) -> CliResult<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.expect("validated"));
    let density = cfg.density.unwrap_or(0.05);
    let k_max = cfg.k_max.unwrap_or(6);
    let mut csv = String::from("q1,q2,q3,size,triple_size,exponent,found,k_star,q1_prime,q2_prime,q3_prime\n");
    let mut rows = Vec::new();
    for m in cfg.moduli_list()? {
        let index = Arc::new(GroupIndex::full(m)?);
        let target = ((index.len() as f64 * density).round() as usize).clamp(1, index.len());
        let a = random_symmetric_subset(index, target, &mut rng)?;
        let rep = growth_exponent(&a, None)?;
        let bg = bounded_generation_search(&a, k_max)?;
        let [q1, q2, q3] = m.0;
        let [p1, p2, p3] = bg.result.q_prime;
        let _ = writeln!(
            csv,
            "{q1},{q2},{q3},{},{},{:e},{},{},{p1},{p2},{p3}",
            rep.size, rep.triple_size, rep.exponent, bg.result.found, bg.result.k_star
        );
        rows.push(json!({"moduli": m.0, "growth": rep, "bounded_generation": bg}));
    }
    o.csv("growth.csv", csv);
    o.result(&json!({"rows": rows}));
    Ok(())
}

fn glue(cfg: &ExperimentConfig, o: &mut Output) -> CliResult<()> {
    let src = Arc::new(parse_group(cfg.source.as_deref().expect("validated"))?);
    let dst = Arc::new(parse_group(cfg.target.as_deref().expect("validated"))?);
    let epsilon = cfg.epsilon.unwrap_or(1e-4);
    let homs = enumerate_homomorphisms(&src, &dst)?;
    if homs.is_empty() {
        return Err(Failure::Analysis("no homomorphisms found".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.expect("validated"));
    let mut csv = String::from("map,kind,failures,case,agreement\n");
    let mut counts = [0usize; 3];
    for i in 0..cfg.maps.unwrap_or(100) {
        let m = dst.order() as u32;
        let kind = rng.gen_range(0..3);
        let image: Vec<u32> = if kind == 0 {
            (0..src.order()).map(|_| rng.gen_range(0..m)).collect()
        } else {
            let mut img = homs[rng.gen_range(0..homs.len())].image.clone();
            if kind == 2 {
                let x = rng.gen_range(0..img.len());
                img[x] = rng.gen_range(0..m);
            }
            img
        };
        let psi = MapTable::new(src.clone(), dst.clone(), image)?;
        let fails = multiplicativity_failures(&psi)?.count;
        let (case, agreement) = match dichotomy_test(&psi, epsilon, &homs)? {
            Dichotomy::Case1 { .. } => (0, String::new()),
            Dichotomy::Case2 { agreement, .. } => (1, agreement.to_string()),
            Dichotomy::DichotomyViolationCandidate { best_agreement, .. } => (2, best_agreement.to_string()),
        };
        counts[case] += 1;
        let kind_name = ["random", "hom", "hom+1"][kind];
        let case_name = ["case1", "case2", "dichotomy-violation-candidate"][case];
        let _ = writeln!(csv, "{i},{kind_name},{fails},{case_name},{agreement}");
    }
    o.passed = counts[2] == 0;
    o.csv("dichotomy.csv", csv);
    o.result(&json!({"homomorphisms": homs.len(), "case1": counts[0], "case2": counts[1], "violations": counts[2]}));
    Ok(())
}
