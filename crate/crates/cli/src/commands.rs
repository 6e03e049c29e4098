use std::fmt::Write as _;
use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sl2x_core::cayley::{build_cayley, CayleyGraph};
use sl2x_core::genset::{surjectivity_check, GeneratingSet, Preset};
use sl2x_core::glue::{
    commutator_cover_check, dichotomy_test, enumerate_homomorphisms, multiplicativity_failures, GroupTable, LieVector,
    MapTable,
};
use sl2x_core::growth::{
    bounded_generation_search, growth_exponent, random_symmetric_subset, sumset_cover, GroupSubset, HypothesisParams,
    ResidueTripleSet,
};
use sl2x_core::modarith::factorize;
use sl2x_core::sl2::{group_order, GroupIndex, Moduli};
use sl2x_core::spectral::{cheeger_bounds, spectral_gap, spectral_gap_with, summarize, GapReport, Mode};
use sl2x_core::verify::{nonconc_forms, Verifier, SUITES};
use sl2x_core::walk::{decay_table, for_each_walk_power, nonconc_linear, nonconc_rows, GroupMeasure, LinearForm, NonconcRow, TraceFormData};

use crate::cli::*;
use crate::output::{CliResult, Failure, Output};

pub fn parse_moduli(s: &str) -> CliResult<Moduli> {
    let parts: Vec<u64> = s
        .split(',')
        .map(|p| p.trim().parse::<u64>().map_err(|_| Failure::config(format!("bad modulus {p:?} in {s:?}"))))
        .collect::<CliResult<_>>()?;
    Ok(match parts[..] {
        [q] => Moduli::uniform(q)?,
        [a, b, c] => Moduli::new(a, b, c)?,
        _ => return Err(Failure::config(format!("moduli {s:?}: expected q or q1,q2,q3"))),
    })
}

fn parse_ints<const N: usize>(s: &str) -> CliResult<[i64; N]> {
    let v: Vec<i64> = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| Failure::config(format!("bad integer {p:?} in {s:?}"))))
        .collect::<CliResult<_>>()?;
    v.try_into().map_err(|_| Failure::config(format!("{s:?}: expected {N} comma-separated integers")))
}

pub fn load_genset(spec: &str) -> CliResult<GeneratingSet> {
    if let Ok(p) = Preset::from_str(spec) {
        return Ok(GeneratingSet::preset(p));
    }
    let text = fs::read_to_string(spec).map_err(|e| Failure::config(format!("generating set {spec:?} is neither a preset nor a readable file: {e}")))?;
    Ok(GeneratingSet::from_json(&text)?)
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::config(format!("reading {}: {e}", path.display())))
}

fn graph(args: &GraphArgs) -> CliResult<CayleyGraph> {
    Ok(build_cayley(&load_genset(&args.genset)?, parse_moduli(&args.moduli)?)?)
}

fn require_seed(seed: Option<u64>, what: &str) -> CliResult<u64> {
    seed.ok_or_else(|| Failure::config(format!("{what} is randomized and needs --seed")))
}

pub fn dispatch(cli: Cli) -> CliResult<bool> {
    let out = cli.out.as_deref();
    let output = match cli.command {
        Command::Group(GroupCmd::Info { moduli, genset }) => group_info(&moduli, genset.as_deref())?,
        Command::Cayley(CayleyCmd::Build(a)) => cayley_build(&a)?,
        Command::Spectral(SpectralCmd::Gap { graph, mode }) => spectral_cmd(&graph, mode)?,
        Command::Cheeger(CheegerCmd::Exact(a)) => cheeger_exact(&a)?,
        Command::Cheeger(CheegerCmd::Bounds(a)) => cheeger_bounds_cmd(&a)?,
        Command::Walk(WalkCmd::Power(a)) => walk_power(&a)?,
        Command::Walk(WalkCmd::Decay(a)) => walk_decay(&a)?,
        Command::Walk(WalkCmd::NonconcLinear(a)) => nonconc_linear_cmd(&a)?,
        Command::Walk(WalkCmd::NonconcTrace { walk, trace }) => nonconc_trace_cmd(&walk, &trace)?,
        Command::Growth(GrowthCmd::Exponent { subset, delta, epsilon, l, genset }) => {
            growth_exponent_cmd(&subset, delta, epsilon, l, &genset)?
        }
        Command::Growth(GrowthCmd::BoundedGen { subset, kmax }) => bounded_gen_cmd(&subset, kmax)?,
        Command::Growth(GrowthCmd::SumsetCover { moduli, a, b, seed, kmax }) => {
            sumset_cmd(&moduli, a.as_deref(), b.as_deref(), seed, kmax)?
        }
        Command::Glue(GlueCmd::Failures(m)) => glue_failures(&m)?,
        Command::Glue(GlueCmd::Dichotomy { map, epsilon }) => glue_dichotomy(&map, epsilon)?,
        Command::Glue(GlueCmd::CommutatorCover { v, w, q }) => commutator_cmd(&v, &w, q)?,
        Command::Verify { suite } => verify_cmd(&suite)?,
        Command::Run { config } => crate::run::run_config(&config)?,
    };
    output.emit(out)?;
    Ok(output.passed)
}

fn group_info(moduli: &str, genset: Option<&str>) -> CliResult<Output> {
    let m = parse_moduli(moduli)?;
    let mut o = Output::new("group info", &json!({"moduli": m.0, "genset": genset}));
    let factors: Vec<_> = m
        .0
        .iter()
        .map(|&q| Ok(json!({"q": q, "factorization": factorize(q)?.pairs(), "order": group_order(q)?.to_string()})))
        .collect::<CliResult<_>>()?;
    let reached = match genset {
        Some(g) => Some(surjectivity_check(&load_genset(g)?, m)?),
        None => None,
    };
    o.result(&json!({"factors": factors, "product_order": m.product_order()?.to_string(), "generated": reached}));
    Ok(o)
}

fn cayley_build(a: &GraphArgs) -> CliResult<Output> {
    let g = graph(a)?;
    let mut o = Output::new("cayley build", a);
    let mut buf = Vec::new();
    g.write_edge_csv(&mut buf)?;
    o.csv("edges.csv", String::from_utf8(buf).expect("ASCII CSV"));
    o.result(&json!({"header": g.header(), "connected": g.is_connected(), "identity_multiplicity": g.identity_multiplicity()}));
    Ok(o)
}

fn gap_for(g: &CayleyGraph, mode: ModeArg) -> CliResult<GapReport> {
    Ok(match mode {
        ModeArg::Auto => spectral_gap(g)?,
        ModeArg::Dense => spectral_gap_with(g, Mode::Dense)?,
        ModeArg::Iterative => spectral_gap_with(g, Mode::Iterative)?,
    })
}

fn spectral_cmd(a: &GraphArgs, mode: ModeArg) -> CliResult<Output> {
    let g = graph(a)?;
    let report = gap_for(&g, mode)?;
    let exact = if g.num_vertices() <= sl2x_core::cayley::EXACT_CHEEGER_MAX { Some(g.exact_cheeger()?.0) } else { None };
    let mut o = Output::new("spectral gap", &json!({"graph": a, "mode": mode}));
    o.result(&json!({"gap": report, "summary": summarize(&g, &report, exact)}));
    Ok(o)
}

fn cheeger_exact(a: &GraphArgs) -> CliResult<Output> {
    let g = graph(a)?;
    let (h, set) = g.exact_cheeger()?;
    let report = spectral_gap(&g)?;
    let b = cheeger_bounds(g.degree(), report.lambda2);
    let hf = *h.numer() as f64 / *h.denom() as f64;
    let mut o = Output::new("cheeger exact", a);
    o.passed = b.lower - 1e-9 <= hf && hf <= b.upper + 1e-9;
    o.result(&json!({
        "h": format!("{}/{}", h.numer(), h.denom()), "h_float": hf, "minimizer": set,
        "bounds": b, "within_bounds": o.passed,
    }));
    Ok(o)
}

fn cheeger_bounds_cmd(a: &GraphArgs) -> CliResult<Output> {
    let g = graph(a)?;
    let report = spectral_gap(&g)?;
    let mut o = Output::new("cheeger bounds", a);
    o.result(&json!({"lambda2": report.lambda2, "degree": g.degree(), "bounds": cheeger_bounds(g.degree(), report.lambda2)}));
    Ok(o)
}

fn measure_csv(mu: &GroupMeasure) -> String {
    let mut s = String::from("index,code,num,den,float\n");
    let den = mu.denominator().to_string();
    let f = mu.to_f64();
    for i in mu.support() {
        let _ = writeln!(s, "{i},{},{},{den},{:e}", mu.index().code_at(i), mu.numerator(i), f[i]);
    }
    s
}

fn walk_power(a: &WalkArgs) -> CliResult<Output> {
    if a.l == 0 {
        return Err(Failure::config("--l must be at least 1"));
    }
    let g = graph(&a.graph)?;
    let mut last = None;
    for_each_walk_power(&g, a.l, |l, mu| {
        if l == a.l {
            last = Some(mu.clone());
        }
        Ok(())
    })?;
    let mu = last.expect("l >= 1");
    let mut o = Output::new("walk power", a);
    o.csv("measure.csv", measure_csv(&mu));
    let d2 = mu.l2_squared_to_uniform();
    o.result(&json!({
        "l": a.l, "vertices": mu.len(), "support": mu.support().len(), "denominator": mu.denominator().to_string(),
        "total": mu.total().to_string(), "l2_squared_to_uniform": format!("{}/{}", d2.numer(), d2.denom()),
        "l2_distance_to_uniform": mu.l2_distance_to_uniform(),
    }));
    Ok(o)
}

pub fn decay_csv(rows: &[(String, sl2x_core::walk::DecayTable)]) -> String {
    let mut s = String::from("label,q1,q2,q3,l,distance,bound,ok\n");
    for (label, t) in rows {
        for r in &t.rows {
            let [q1, q2, q3] = t.moduli;
            let _ = writeln!(s, "{label},{q1},{q2},{q3},{},{:e},{:e},{}", r.l, r.distance, r.bound, r.ok);
        }
    }
    s
}

fn walk_decay(a: &WalkArgs) -> CliResult<Output> {
    let g = graph(&a.graph)?;
    let report = spectral_gap(&g)?;
    let table = decay_table(&g, report.lambda_star, a.l)?;
    let mut o = Output::new("walk decay", a);
    o.passed = table.all_ok();
    o.csv("decay.csv", decay_csv(&[(a.graph.genset.clone(), table.clone())]));
    o.result(&json!({"gap": report, "table": table, "all_ok": o.passed}));
    Ok(o)
}

pub fn nonconc_csv(rows: &[(String, NonconcRow)]) -> String {
    let mut s = String::from("label,l,Q,form,argmax,max_mass,max_float,max_level_size,bound,ok,exponent\n");
    for (label, r) in rows {
        let _ = writeln!(
            s,
            "{label},{},{},{},{},{},{:e},{},{:e},{},{:e}",
            r.l, r.q, r.form, r.argmax, r.max_mass, r.max_float, r.max_level_size, r.bound, r.ok, r.exponent
        );
    }
    s
}

fn nonconc_linear_cmd(a: &NonconcArgs) -> CliResult<Output> {
    let (q, forms) = (a.q, &a.forms);
    let forms: Vec<LinearForm> = if forms.is_empty() {
        nonconc_forms()?
    } else {
        forms.iter().map(|f| Ok(LinearForm::new(parse_ints::<12>(f)?)?)).collect::<CliResult<_>>()?
    };
    let ga = GraphArgs { moduli: a.moduli.clone().unwrap_or_else(|| q.to_string()), genset: a.genset.clone() };
    let g = graph(&ga)?;
    let report = spectral_gap(&g)?;
    let rows = nonconc_linear(&g, report.lambda_star, &forms, q, a.l)?;
    let mut o = Output::new("walk nonconc-linear", &json!({"args": a, "forms": forms}));
    o.passed = rows.iter().all(|r| r.ok);
    let labelled: Vec<_> = rows.iter().map(|r| (a.genset.clone(), r.clone())).collect();
    o.csv("nonconc.csv", nonconc_csv(&labelled));
    o.result(&json!({"lambda_star": report.lambda_star, "rows": rows, "all_ok": o.passed}));
    Ok(o)
}

fn nonconc_trace_cmd(a: &WalkArgs, trace: &Path) -> CliResult<Output> {
    let data: TraceFormData = serde_json::from_str(&read_text(trace)?).map_err(|e| Failure::config(format!("trace form: {e}")))?;
    data.validate()?;
    let g = graph(&a.graph)?;
    let report = spectral_gap(&g)?;
    let sets = data.level_sets(g.index())?;
    let rows = nonconc_rows(&g, report.lambda_star, &[sets], a.l)?;
    let mut o = Output::new("walk nonconc-trace", &json!({"walk": a, "trace": data}));
    o.passed = rows.iter().all(|r| r.ok);
    let labelled: Vec<_> = rows.iter().map(|r| (a.graph.genset.clone(), r.clone())).collect();
    o.csv("nonconc.csv", nonconc_csv(&labelled));
    o.result(&json!({"lambda_star": report.lambda_star, "rows": rows, "all_ok": o.passed}));
    Ok(o)
}

fn load_subset(a: &SubsetArgs) -> CliResult<GroupSubset> {
    let index = Arc::new(GroupIndex::full(parse_moduli(&a.moduli)?)?);
    match (&a.subset, a.size) {
        (Some(path), None) => {
            let f = fs::File::open(path).map_err(|e| Failure::config(format!("reading {}: {e}", path.display())))?;
            Ok(GroupSubset::read_csv(index, BufReader::new(f))?)
        }
        (None, Some(size)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(require_seed(a.seed, "a random subset")?);
            Ok(random_symmetric_subset(index, size, &mut rng)?)
        }
        _ => Err(Failure::config("give exactly one of --subset FILE or --size N (with --seed)")),
    }
}

fn growth_exponent_cmd(a: &SubsetArgs, delta: Option<f64>, epsilon: f64, l: u32, genset: &str) -> CliResult<Output> {
    let set = load_subset(a)?;
    let params = match delta {
        Some(delta) => {
            if !(delta > 0.0 && epsilon > 0.0) {
                return Err(Failure::config("--delta and --epsilon must be positive"));
            }
            Some(HypothesisParams { delta, epsilon, l, generators: load_genset(genset)? })
        }
        None => None,
    };
    let report = growth_exponent(&set, params.as_ref())?;
    let mut o = Output::new("growth exponent", &json!({"subset": a, "delta": delta, "epsilon": epsilon, "l": l, "genset": genset}));
    o.result(&report);
    Ok(o)
}

fn bounded_gen_cmd(a: &SubsetArgs, kmax: u32) -> CliResult<Output> {
    let set = load_subset(a)?;
    let bg = bounded_generation_search(&set, kmax)?;
    let mut o = Output::new("growth bounded-gen", &json!({"subset": a, "kmax": kmax}));
    o.result(&json!({"size": set.len(), "search": bg}));
    Ok(o)
}

fn residue_set(moduli: [u64; 3], path: Option<&Path>, rng: Option<&mut ChaCha8Rng>) -> CliResult<ResidueTripleSet> {
    if let Some(path) = path {
        let mut elems = Vec::new();
        for (n, line) in read_text(path)?.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') || t.starts_with("x1") {
                continue;
            }
            let v = parse_ints::<3>(t).map_err(|_| Failure::config(format!("{}:{}: expected x1,x2,x3", path.display(), n + 1)))?;
            elems.push([0, 1, 2].map(|i| v[i].rem_euclid(moduli[i] as i64) as u64));
        }
        return Ok(ResidueTripleSet::from_elements(moduli, &elems)?);
    }
    let rng = rng.expect("seeded when no file is given");
    let mut all = ResidueTripleSet::full(moduli)?.elements();
    all.shuffle(rng);
    all.truncate(all.len().div_ceil(2));
    Ok(ResidueTripleSet::from_elements(moduli, &all)?)
}

fn sumset_cmd(moduli: &str, a: Option<&Path>, b: Option<&Path>, seed: Option<u64>, kmax: u32) -> CliResult<Output> {
    let m = parse_moduli(moduli)?.0;
    let mut rng = match (a, b) {
        (Some(_), Some(_)) => None,
        _ => Some(ChaCha8Rng::seed_from_u64(require_seed(seed, "random residue sets")?)),
    };
    let sa = residue_set(m, a, rng.as_mut())?;
    let sb = residue_set(m, b, rng.as_mut())?;
    let cover = sumset_cover(&sa, &sb, kmax)?;
    let mut o = Output::new("growth sumset-cover", &json!({"moduli": m, "a": a, "b": b, "seed": seed, "kmax": kmax}));
    o.result(&json!({"a_size": sa.len(), "b_size": sb.len(), "cover": cover}));
    Ok(o)
}

pub fn parse_group(spec: &str) -> CliResult<GroupTable> {
    let bad = || Failure::config(format!("group {spec:?}: expected cyclic:n or lambda:q"));
    let (kind, n) = spec.split_once(':').ok_or_else(bad)?;
    let n: u64 = n.trim().parse().map_err(|_| bad())?;
    match kind.trim() {
        "cyclic" if n >= 1 => Ok(GroupTable::cyclic(n as usize)),
        "lambda" => Ok(GroupTable::from_index(&GroupIndex::full(Moduli::new(n, 1, 1)?)?)?),
        _ => Err(bad()),
    }
}

fn load_map(m: &MapArgs) -> CliResult<MapTable> {
    let (s, t) = (Arc::new(parse_group(&m.source)?), Arc::new(parse_group(&m.target)?));
    match &m.map {
        Some(path) => Ok(MapTable::read_csv(s, t, read_text(path)?.as_bytes())?),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(require_seed(m.seed, "a random map")?);
            let image = (0..s.order()).map(|_| rng.gen_range(0..t.order() as u32)).collect();
            Ok(MapTable::new(s, t, image)?)
        }
    }
}

fn glue_failures(m: &MapArgs) -> CliResult<Output> {
    let psi = load_map(m)?;
    let f = multiplicativity_failures(&psi)?;
    let mut o = Output::new("glue failures", m);
    let r = f.ratio();
    o.result(&json!({"failures": f.count, "pairs": f.pairs, "ratio": format!("{}/{}", r.numer(), r.denom())}));
    Ok(o)
}

fn glue_dichotomy(m: &MapArgs, epsilon: f64) -> CliResult<Output> {
    let psi = load_map(m)?;
    let homs = enumerate_homomorphisms(psi.source(), psi.target())?;
    let outcome = dichotomy_test(&psi, epsilon, &homs)?;
    let f = multiplicativity_failures(&psi)?;
    let mut o = Output::new("glue dichotomy", &json!({"map": m, "epsilon": epsilon}));
    o.passed = !matches!(outcome, sl2x_core::glue::Dichotomy::DichotomyViolationCandidate { .. });
    o.result(&json!({"failures": f.count, "homomorphisms": homs.len(), "outcome": outcome}));
    Ok(o)
}

fn commutator_cmd(v: &str, w: &str, q: u64) -> CliResult<Output> {
    let [x, y, z] = parse_ints::<3>(v)?;
    let vv = LieVector::new(x, y, z);
    let [x, y, z] = parse_ints::<3>(w)?;
    let ww = LieVector::new(x, y, z);
    let c = commutator_cover_check(&vv, &ww, q)?;
    let mut o = Output::new("glue commutator-cover", &json!({"v": vv, "w": ww, "q": q}));
    o.result(&c);
    Ok(o)
}

fn verify_cmd(suite: &str) -> CliResult<Output> {
    let names: Vec<&str> = match suite {
        "all" => SUITES[..11].to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => return Err(Failure::config(format!("unknown suite {other:?}; known: all, {}", SUITES.join(", ")))),
    };
    let mut v = Verifier::new();
    let mut reports = Vec::new();
    for name in names {
        let r = v.run(name)?;
        println!("{}", r.line());
        for f in &r.failures {
            println!("       {f}");
        }
        reports.push(r);
    }
    let mut o = Output::new("verify", &json!({"suite": suite}));
    o.print_json = false;
    o.passed = reports.iter().all(|r| r.passed);
    o.result(&reports);
    Ok(o)
}
