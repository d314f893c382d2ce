use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn fqcf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqcf"))
        .args(args)
        .env_remove("FQCF_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Run with `--json`, check exit 0 and the published schema, return the value.
fn json(schema: &str, args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = fqcf(&full);
    assert!(out.status.success(), "{args:?}: {}", stderr(&out));
    let value: Value = serde_json::from_slice(&out.stdout).unwrap();
    let path = format!("{}/schemas/{schema}.schema.json", env!("CARGO_MANIFEST_DIR"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{args:?}: {errors:?}");
    value
}

#[test]
fn measure_example() {
    let v = json("measure", &["measure", "--q", "2", "--k", "2", "--m", "3"]);
    assert_eq!(v["count"], "16");
    assert_eq!(v["measure_num"], "1");
    assert_eq!(v["measure_den"], "4");
    let human = stdout(&fqcf(&["measure", "--q", "2", "--k", "2", "--m", "3"]));
    assert!(human.contains("1/4"), "{human}");
}

#[test]
fn tail_measure_of_everything_is_one() {
    let v = json("measure", &["measure", "--q", "3", "--k", "3", "--tail-from", "2"]);
    assert_eq!((v["measure_num"].as_str(), v["measure_den"].as_str()), (Some("1"), Some("1")));
}

#[test]
fn count_table_matches_single_counts() {
    let table = json("count", &["count", "--q", "3", "--k", "2", "--m-max", "6"]);
    for row in table["rows"].as_array().unwrap() {
        let m = row["m"].to_string();
        let single = json("count", &["count", "--q", "3", "--k", "2", "--m", &m]);
        assert_eq!(single["count"], row["count"]);
    }
}

#[test]
fn dimension_linear() {
    let v = json("dimension", &["dimension", "--q", "2", "--k", "1", "--phi", "linear:1"]);
    let s = v["value"].as_f64().unwrap();
    assert!((s - 0.8232).abs() < 5e-5, "{s}");
    assert_eq!(v["case"], "b_finite");
    assert!(v["solver"]["residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(v["exact"], Value::Null);
}

#[test]
fn dimension_presets() {
    let exact = |args: &[&str]| {
        let mut full = vec!["dimension"];
        full.extend_from_slice(args);
        let v = json("dimension", &full);
        (v["exact"]["num"].as_str().unwrap().to_string(), v["exact"]["den"].as_str().unwrap().to_string())
    };
    let frac = |n: &str, d: &str| (n.to_string(), d.to_string());
    assert_eq!(exact(&["--phi", "exp:2", "--set", "G"]), frac("1", "3"));
    assert_eq!(exact(&["--phi", "exp:2"]), frac("1", "3"));
    assert_eq!(exact(&["--phi", "log"]), frac("1", "1"));
    assert_eq!(exact(&["--phi", "power:2"]), frac("1", "2"));
    assert_eq!(exact(&["--phi", "exppow:2:2"]), frac("0", "1"));
}

#[test]
fn dimension_from_table_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    for n in 1..=40 {
        writeln!(file, "{n} {}", 2 * n).unwrap();
    }
    let path = file.path().to_str().unwrap();
    let v = json("dimension", &["dimension", "--k", "1", "--phi-table", path]);
    assert_eq!(v["invariants"]["estimate"], true);
    let preset = json("dimension", &["dimension", "--k", "1", "--phi", "linear:2"]);
    assert!((v["value"].as_f64().unwrap() - preset["value"].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn truncated_dimension_is_below_full() {
    let v = json("dimension", &["dimension", "--k", "2", "--phi", "linear:1", "--M", "4"]);
    assert!(v["truncated"]["value"].as_f64().unwrap() < v["value"].as_f64().unwrap());
    let out = fqcf(&["dimension", "--phi", "exp:2", "--M", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--M"));
}

#[test]
fn expand_rational_and_series() {
    let v = json("expand", &["expand", "--x", "z^2+z+1/z^3+z+1", "--convergents"]);
    assert_eq!(v["int_part"], "0");
    assert_eq!(v["terminated"], true);
    let degrees: usize = v["quotients"].as_array().unwrap().iter().map(|a| a["degree"].as_u64().unwrap() as usize).sum();
    assert_eq!(degrees, 3);
    let last = v["convergents"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last["q"], "z^3+z+1");

    let series = json("expand", &["expand", "--x", "int=z; frac=1,0,1,1,0,0,1,0", "--n-max", "2"]);
    assert_eq!(series["int_part"], "z");
    assert!(series["quotients"].as_array().unwrap().len() <= 2);
}

#[test]
fn cantor_relaxed_desk_scale() {
    let v = json(
        "cantor",
        &["cantor", "--k", "2", "--B", "2", "--M", "2", "--eps", "0.0959", "--depth", "6", "--relaxed", "3,6", "--mode", "explicit"],
    );
    assert!(v["mass"]["worst_relative_residual"].as_f64().unwrap() <= 1e-10);
    assert!(v["mass"]["nodes"].as_u64().unwrap() > 0);
}

#[test]
fn cantor_strict_passes() {
    let v = json("cantor", &["cantor", "--k", "2", "--B", "2", "--M", "2", "--eps", "0.0959", "--depth", "14"]);
    assert_eq!(v["holder"]["passed"], true);
    assert_eq!(v["passed"], true);
    let csv = stdout(&fqcf(&["--csv", "cantor", "--k", "2", "--B", "2", "--M", "2", "--eps", "0.0959", "--depth", "14"]));
    assert!(csv.starts_with("order,count,min_ratio"));
    assert_eq!(csv.lines().count(), 15);
}

#[test]
fn budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_fqcf"))
        .args(["cantor", "--k", "2", "--B", "2", "--M", "2", "--eps", "0.0959", "--depth", "8", "--relaxed", "3,6"])
        .args(["--mode", "explicit"])
        .env("FQCF_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--budget"), "{}", stderr(&out));
}

#[test]
fn mc_is_deterministic() {
    let args = ["--json", "mc", "--stat", "tail", "--n-samples", "5000", "--seed", "7", "--n-range", "1..6"];
    let a = fqcf(&args);
    let b = fqcf(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let single = Command::new(env!("CARGO_BIN_EXE_fqcf"))
        .args(args)
        .env("RAYON_NUM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a.stdout, single.stdout);
    let other = fqcf(&["--json", "mc", "--stat", "tail", "--n-samples", "5000", "--seed", "8", "--n-range", "1..6"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn mc_statistics_validate() {
    let d = json("mc", &["mc", "--stat", "degree", "--n-samples", "4000"]);
    assert_eq!(d["bins"].as_array().unwrap().len(), 6);
    let i = json("mc", &["mc", "--stat", "indep", "--n-samples", "4000", "--positions", "2,3"]);
    assert_eq!(i["positions"], serde_json::json!([2, 3]));
    json("mc", &["mc", "--stat", "tail", "--n-samples", "4000", "--k", "3", "--phi", "linear:1/2"]);
}

#[test]
fn dirichlet_verdicts() {
    let v = json("dirichlet", &["dirichlet", "--x", "z^2+1/z^5+z^2+1", "--tau", "2"]);
    assert_eq!(v["verdict"]["holds"], true);
    assert!(v["witness"]["q_log_norm"].as_u64().unwrap() < 2);
    let half = json("dirichlet", &["dirichlet", "--x", "z^2+1/z^5+z^2+1", "--phi", "half-inverse"]);
    assert_eq!(half["verdict"]["holds"], false);
    assert_eq!(half["verdict"]["first_failure"], 1);
}

#[test]
fn dirichlet_table_file() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "# m phi(q^m)").unwrap();
    for m in 0..=8 {
        writeln!(file, "{m} 1/{}", 1u64 << m).unwrap();
    }
    let path = file.path().to_str().unwrap();
    let v = json("dirichlet", &["dirichlet", "--x", "z/z^3+1", "--phi-table", path]);
    assert_eq!(v["verdict"]["holds"], true);
}

#[test]
fn validation_errors_name_the_flag() {
    for (args, name) in [
        (vec!["measure", "--q", "4", "--k", "1", "--m", "2"], "--q"),
        (vec!["measure", "--k", "0", "--m", "2"], "--k"),
        (vec!["dimension", "--phi", "linear:-1"], "--phi"),
        (vec!["dimension", "--phi", "wobbly"], "--phi"),
        (vec!["cantor", "--k", "2", "--B", "2", "--M", "1", "--eps", "0.05", "--depth", "3"], "--M"),
        (vec!["cantor", "--k", "2", "--B", "2", "--M", "2", "--eps", "0.5", "--depth", "3"], "--eps"),
        (vec!["cantor", "--k", "2", "--B", "2", "--M", "2", "--eps", "0.05", "--depth", "3", "--relaxed", "3,4"], "--relaxed"),
        (vec!["mc", "--stat", "tail", "--n-range", "5..2"], "--n-range"),
        (vec!["mc", "--stat", "degree", "--n-samples", "0"], "--n-samples"),
        (vec!["dirichlet", "--x", "z/0"], "--x"),
        (vec!["dirichlet", "--x", "z/z^2", "--phi", "power:1:-1"], "--phi"),
    ] {
        let out = fqcf(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr(&out).contains(name), "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn usage_and_version() {
    let out = fqcf(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Usage"));
    let out = fqcf(&["--version"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn outputs_are_byte_identical() {
    for args in [
        vec!["--json", "cantor", "--k", "2", "--B", "2", "--M", "2", "--eps", "0.0959", "--depth", "6", "--relaxed", "3,6"],
        vec!["--csv", "mc", "--stat", "indep", "--n-samples", "3000", "--seed", "3"],
        vec!["--json", "dimension", "--k", "3", "--phi", "linear:10"],
    ] {
        assert_eq!(fqcf(&args).stdout, fqcf(&args).stdout, "{args:?}");
    }
}
