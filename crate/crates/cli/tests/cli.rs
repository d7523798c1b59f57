//! End-to-end runs of the `nicel` binary: outputs, exit codes, files.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const A842_117: &str = "(0,0,0,0,e^{12},e^{34},e^{15}+e^{24}+e^{36},e^{13}+e^{25}+e^{46})";
const A952_355: &str = "(0,0,0,0,e^{12},e^{34},e^{13}+e^{24},e^{15}+e^{23},e^{14}+e^{36})";

fn nicel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nicel")).args(args).env_remove("NICEL_TOL").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn analyze_reports_klh() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "952_355.alg", &format!("# nonsurjective sign example\n{A952_355}\n"));
    let o = nicel(&["analyze", &f]);
    assert_eq!(code(&o), 0);
    assert!(
        stdout(&o).contains("K: solvable, unique X = (-6,-6,4,-3,-7,8,8,-7); H: clean; L: clean; M_{Δ,2}: surjective"),
        "{}",
        stdout(&o)
    );
    let h = write(dir.path(), "heisenberg.alg", "(0,0,e^{12})\n");
    assert!(stdout(&nicel(&["analyze", &h])).contains("K: obstructed"));
    assert!(stdout(&nicel(&["analyze", "corpus:9631:93a"])).contains("L: obstructed"));
}

#[test]
fn analyze_matrix_and_involutions() {
    let o = nicel(&["analyze", "corpus:842:117", "--matrix", "--involutions"]);
    let s = stdout(&o);
    assert!(s.contains("root matrix"), "{s}");
    assert!(s.contains("det 9"), "{s}");
    assert!(s.contains("(1,3)(2,4)(5,6)"), "{s}");
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.alg", "dim 3\n1 2 3 1\n2 3 7 1\n");
    let o = nicel(&["analyze", &f]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    let o = nicel(&["analyze", "corpus:no-such-label"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn solve_examples() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "842_117.alg", &format!("{A842_117}\n"));
    let o = nicel(&["solve", &f]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("(6,2)"), "{}", stdout(&o));

    let o = nicel(&["solve", &f, "--sigma", "(1,4)(2,3)(5,6)(7,8)"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("(g14,g23,g56,g78) = (7/15,7/15,49/45,-343/225)"), "{s}");
    assert!(s.contains("(4,4)"), "{s}");

    let o = nicel(&["solve", "corpus:952:355", "--sigma", "(1,3)(2,4)(5,6)(8,9)"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("obstructed: condition (iii) incompatible"), "{}", stdout(&o));

    let o = nicel(&["solve", "corpus:96421:147a"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("nonexistent: Sturm certificate"), "{}", stdout(&o));

    let o = nicel(&["solve", &f, "--sigma", "(1,3"]);
    assert_eq!(code(&o), 2);
    let o = nicel(&["solve", &f, "--sigma", "(1,2)(3,4)"]);
    assert_eq!(code(&o), 2, "not a diagram automorphism");
}

#[test]
fn negate_reverses_signature() {
    let o = nicel(&["solve", "corpus:842:117", "--negate"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("(2,6)"), "{}", stdout(&o));
    let j: Value = serde_json::from_slice(&nicel(&["solve", "corpus:842:117", "--negate", "--json"]).stdout).unwrap();
    assert_eq!(j["runs"][0]["certificates"][0]["lambda"], "-1/2");
}

#[test]
fn all_involutions_runs_every_sigma() {
    let o = nicel(&["solve", "corpus:842:117", "--all-involutions", "--json"]);
    assert_eq!(code(&o), 0);
    let j: Value = serde_json::from_slice(&o.stdout).unwrap();
    let sigmas: Vec<&str> = j["runs"].as_array().unwrap().iter().map(|r| r["sigma"].as_str().unwrap()).collect();
    assert!(sigmas.len() > 3, "{sigmas:?}");
    assert!(sigmas.contains(&"(1,3)(2,4)(5,6)"), "{sigmas:?}");
}

#[test]
fn verify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let ortho = write(dir.path(), "ortho.met", "signature ++++--++\n");
    let plus = write(dir.path(), "plus.met", "signature ++++++++\n");
    // orthonormal basis: the constants carry the square roots
    let alg = write(
        dir.path(),
        "842_117_on.alg",
        "(0,0,0,0,sqrt(5)*e^{12},sqrt(5)*e^{34},sqrt(3)*e^{15}+sqrt(7)*e^{24}+sqrt(3)*e^{36},sqrt(7)*e^{13}+sqrt(3)*e^{25}+sqrt(3)*e^{46})\n",
    );
    let o = nicel(&["verify", &alg, &ortho]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("exact pass"));
    let o = nicel(&["verify", &alg, &plus]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL"));
    assert!(stdout(&o).contains("(ric - lambda id)_ij"));

    let abelian = write(dir.path(), "ab.alg", "dim 4\n");
    let met = write(dir.path(), "ab.met", "1 1 2\n2 2 -3\n3 3 1/2\n4 4 sqrt(2)\n");
    assert_eq!(code(&nicel(&["verify", &abelian, &met, "--lambda", "0"])), 0);
    assert_eq!(code(&nicel(&["verify", &abelian, &met, "--lambda", "-1/2"])), 1);

    let asym = write(dir.path(), "asym.met", "1 1 1\n2 2 1\n3 3 1\n1 2 1\n2 1 2\n");
    let h = write(dir.path(), "h.alg", "(0,0,e^{12})\n");
    assert_eq!(code(&nicel(&["verify", &h, &asym])), 2);
    let degenerate = write(dir.path(), "deg.met", "1 1 1\n2 2 0\n3 3 1\n");
    assert_eq!(code(&nicel(&["verify", &h, &degenerate])), 2);
}

#[test]
fn extend_writes_levels() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = nicel(&["extend", "corpus:842:117", "--edge", "1,4", "--depth", "1", "--out-dir", out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("952:394"), "{}", stdout(&o));
    let alg = dir.path().join("842_117_ext1.alg");
    // the written file parses and is the 9-dimensional algebra
    let a = nicel(&["analyze", alg.to_str().unwrap(), "--json"]);
    let j: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(j["dimension"], 9);

    let o = nicel(&["extend", "corpus:842:117", "--edge", "1,4", "--depth", "4", "--out-dir", out]);
    assert_eq!(code(&o), 0);
    for level in 1..=4 {
        let cert = fs::read_to_string(dir.path().join(format!("842_117_ext{level}.cert.json"))).unwrap();
        let j: Value = serde_json::from_str(&cert).unwrap();
        assert_eq!(j["verdict"], "certified", "level {level}");
        assert!(!j["certificates"].as_array().unwrap().is_empty());
    }

    let o = nicel(&["extend", "corpus:842:117", "--edge", "1,2", "--out-dir", out]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("precondition"), "{}", stderr(&o));
}

#[test]
fn corpus_runs_clean() {
    let o = nicel(&["corpus"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains(" 0 mismatches"), "{}", stdout(&o));

    let j: Value = serde_json::from_slice(&nicel(&["corpus", "--filter", "84", "--json"]).stdout).unwrap();
    let labels: Vec<&str> = j["entries"].as_array().unwrap().iter().map(|e| e["label"].as_str().unwrap()).collect();
    assert!(!labels.is_empty());
    assert!(labels.iter().all(|l| l.starts_with("84")), "{labels:?}");
}

#[test]
fn json_is_byte_identical_across_runs() {
    for args in [
        &["solve", "corpus:952:782", "--gauge", "1", "--json"][..],
        &["analyze", "corpus:952:355", "--json", "--matrix", "--involutions"],
        &["corpus", "--json"],
    ] {
        let a = nicel(args);
        let b = nicel(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        let v: Value = serde_json::from_slice(&a.stdout).unwrap();
        let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
        assert_eq!(v, again);
    }
}

#[test]
fn solve_certificates_verify_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    for (label, gauge) in [("842:117", None), ("952:355", Some("2")), ("8531:60a", None)] {
        let mut args = vec!["solve".to_owned(), format!("corpus:{label}"), "--json".into()];
        if let Some(g) = gauge {
            args.extend(["--gauge".into(), g.into()]);
        }
        let o = Command::new(env!("CARGO_BIN_EXE_nicel")).args(&args).output().unwrap();
        let j: Value = serde_json::from_slice(&o.stdout).unwrap();
        for (k, cert) in j["runs"][0]["certificates"].as_array().unwrap().iter().enumerate() {
            // metric files take the exact number grammar only
            if cert["mode"] != "exact" {
                continue;
            }
            let lines: String = cert["g"]
                .as_array()
                .unwrap()
                .iter()
                .enumerate()
                .map(|(i, v)| format!("{} {} {}\n", i + 1, i + 1, v.as_str().unwrap()))
                .collect();
            let met = write(dir.path(), &format!("{}_{k}.met", label.replace(':', "_")), &lines);
            let v = nicel(&["verify", &format!("corpus:{label}"), &met]);
            assert_eq!(code(&v), 0, "{label} certificate {k}: {}", stdout(&v));
        }
    }
}

#[test]
fn tolerance_from_environment() {
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_nicel"))
            .args(["solve", "corpus:952:782", "--gauge", "1", "--json"])
            .env("NICEL_TOL", tol)
            .output()
            .unwrap()
    };
    let o = run("1e-6");
    assert_eq!(code(&o), 0);
    let j: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["tolerance"], 1e-6);
    assert_eq!(code(&run("lots")), 2);
    let o = nicel(&["solve", "corpus:952:782", "--gauge", "1", "--json", "--tol", "1e-8"]);
    let j: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["tolerance"], 1e-8);
}

#[test]
fn obstruction_kinds_in_json() {
    let o = nicel(&["solve", "corpus:952:355", "--sigma", "(1,3)(2,4)(5,6)(8,9)", "--json"]);
    let j: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(j["runs"][0]["verdict"], "obstructed:condition_iii");
    assert_eq!(j["runs"][0]["report"]["verdict"]["obstruction"]["kind"], "condition_iii");
}
