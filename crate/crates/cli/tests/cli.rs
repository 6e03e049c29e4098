use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sl2x_core::cayley::build_cayley;
use sl2x_core::genset::{GeneratingSet, Preset};
use sl2x_core::sl2::Moduli;
use sl2x_core::spectral::spectral_gap;

fn sl2x(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sl2x")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn csv_rows(p: &Path) -> (String, Vec<Vec<String>>) {
    let text = fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let comment = lines.next().unwrap().to_string();
    let _header = lines.next().unwrap();
    (comment, lines.map(|l| l.split(',').map(str::to_string).collect()).collect())
}

#[test]
fn invalid_modulus_is_a_config_error_without_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = sl2x(&["cayley", "build", "--moduli", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"analysis":"spectral","moduli":[[0,2,2]]}"#).unwrap();
    let o = sl2x(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}

#[test]
fn exit_codes() {
    assert_eq!(code(&sl2x(&["cheeger", "exact", "--moduli", "3"])), 4);
    assert_eq!(code(&sl2x(&["verify", "no-such-suite"])), 2);
    assert_eq!(code(&sl2x(&["glue", "commutator-cover", "--v", "0,1,0", "--w", "0,-1,0", "--q", "5"])), 2);
    assert_eq!(code(&sl2x(&["growth", "exponent", "--moduli", "2", "--size", "10"])), 2);
    assert_eq!(code(&sl2x(&["run", "--config", "/nonexistent/config.json"])), 2);
}

#[test]
fn outputs_embed_hash_and_version() {
    let dir = tempfile::tempdir().unwrap();
    let o = sl2x(&["cayley", "build", "--moduli", "2", "--genset", "diagonal", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&dir.path().join("result.json"));
    let hash = doc["config_hash"].as_str().unwrap();
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["result"]["header"]["vertices"], 6);
    let (comment, rows) = csv_rows(&dir.path().join("edges.csv"));
    assert_eq!(comment, format!("# sl2x {} config-sha256={hash}", env!("CARGO_PKG_VERSION")));
    assert_eq!(rows.len(), 12);
    let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with('.')).collect();
    assert!(leftovers.is_empty());
}

#[test]
fn spectral_run_over_q_range() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"analysis":"spectral","genset":"twisted","q_range":{"from":2,"to":8,"components":1}}"#).unwrap();
    let out = dir.path().join("out");
    let o = sl2x(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = csv_rows(&out.join("spectral.csv"));
    assert_eq!(rows.len(), 7);
    for row in &rows {
        let q: u64 = row[0].parse().unwrap();
        let g = build_cayley(&GeneratingSet::preset(Preset::Twisted), Moduli::new(q, 1, 1).unwrap()).unwrap();
        let want = spectral_gap(&g).unwrap();
        let lambda2: f64 = row[4].parse().unwrap();
        assert!((lambda2 - want.lambda2).abs() < 1e-12, "q={q}");
        assert_eq!(row[3].parse::<usize>().unwrap(), g.num_vertices());
        let (lo, hi): (f64, f64) = (row[7].parse().unwrap(), row[8].parse().unwrap());
        if !row[9].is_empty() {
            let (n, d) = row[9].split_once('/').unwrap();
            let h = n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap();
            assert!(lo - 1e-9 <= h && h <= hi + 1e-9);
        }
    }
}

#[test]
fn walk_run_q5() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"analysis":"walk","genset":"twisted","q_list":[5],"l_max":10}"#).unwrap();
    let out = dir.path().join("out");
    let o = sl2x(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (_, rows) = csv_rows(&out.join("nonconc.csv"));
    assert_eq!(rows.len(), 50);
    for row in &rows {
        assert_eq!(row[9], "true");
        let (n, d) = row[5].split_once('/').unwrap();
        let mass = n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap();
        let exponent: f64 = row[10].parse().unwrap();
        assert!((exponent - (-mass.ln() / 5f64.ln())).abs() < 1e-9);
    }
    let (_, decay) = csv_rows(&out.join("decay.csv"));
    assert_eq!(decay.len(), 10);
    assert!(decay.iter().all(|r| r[7] == "true"));
}

#[test]
fn identical_runs_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"analysis":"growth","moduli":[[2,2,2],[3,1,1]],"seed":11,"density":0.1}"#).unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = sl2x(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        (fs::read(out.join("result.json")).unwrap(), fs::read(out.join("growth.csv")).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn glue_from_csv_map() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("psi.csv");
    let o = sl2x(&["glue", "failures", "--source", "lambda:2", "--target", "lambda:2", "--seed", "1"]);
    assert_eq!(code(&o), 0);
    // Identity map of S3.
    let mut text = String::from("source_index,target_index\n");
    for i in 0..6 {
        text.push_str(&format!("{i},{i}\n"));
    }
    fs::write(&map, &text).unwrap();
    let o = sl2x(&["glue", "dichotomy", "--source", "lambda:2", "--target", "lambda:2", "--map", map.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["result"]["failures"], 0);
    assert_eq!(doc["result"]["outcome"]["case"], "case2");
    assert_eq!(doc["result"]["outcome"]["agreement"], 6);
}

#[test]
fn verify_conservation_passes() {
    let o = sl2x(&["verify", "conservation"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("PASS"));
}

#[test]
fn walk_and_growth_subcommands() {
    let o = sl2x(&["walk", "power", "--moduli", "2", "--l", "3"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["result"]["total"], "1");
    let o = sl2x(&["walk", "nonconc-linear", "--Q", "3", "--l", "4", "--form", "1,0,0,0,0,0,0,0,0,0,0,-1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = sl2x(&["growth", "bounded-gen", "--moduli", "2", "--size", "40", "--seed", "3", "--kmax", "5"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["result"]["search"]["contains_at_k_star"], true);
    let o = sl2x(&["growth", "sumset-cover", "--moduli", "5", "--seed", "2"]);
    assert_eq!(code(&o), 0);
    let o = sl2x(&["growth", "exponent", "--moduli", "2", "--size", "20", "--seed", "5", "--delta", "0.05"]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc["result"]["flags"].is_object());
}
