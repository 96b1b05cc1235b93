//! End-to-end runs of the `hypercut` binary.

use std::path::Path;
use std::process::Command;

use hypercut_core::hypergraph::{exact_ckp_weights, CutCheckReport};
use hypercut_core::intersection::RankReport;
use hypercut_core::io::write_hypergraph;
use hypercut_core::rational::ratio;
use hypercut_core::structure::{DensityVector, StructureReport};
use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn run(args: &[&str], dir: &Path) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_hypercut")).args(args).current_dir(dir).output().unwrap();
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn ok(args: &[&str], dir: &Path) -> Value {
    let r = run(args, dir);
    assert_eq!(r.code, 0, "{args:?}: {}{}", r.stdout, r.stderr);
    r.json()
}

/// The report parses into `T` and serialises back unchanged.
fn round_trips<T: serde::de::DeserializeOwned + serde::Serialize>(report: &Value) -> T {
    let parsed: T = serde_json::from_value(report.clone()).unwrap();
    assert_eq!(&serde_json::to_value(&parsed).unwrap(), report);
    parsed
}

#[test]
fn rank_reports() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok(&["rank", "--t", "8", "--k", "2", "--v", "4,4"], dir.path());
    assert_eq!(v["command"], "rank");
    assert_eq!(v["config"]["seed"], 0);
    let report: RankReport = round_trips(&v["report"]);
    assert_eq!((report.computed_rank, report.predicted_rank, report.matches), (21, Some(21), Some(true)));

    let v = ok(&["rank", "--t", "9", "--k", "2", "--v", "4,5"], dir.path());
    assert_eq!((v["report"]["computed_rank"].as_u64(), v["report"]["matches"].as_bool()), (Some(36), Some(true)));

    let v = ok(&["rank", "--t", "5", "--k", "2", "--v", "1,4"], dir.path());
    assert!(v["report"]["predicted_rank"].is_null());
    assert_eq!(v["report"]["regime"], "degenerate");

    let bad = run(&["rank", "--t", "5", "--k", "2", "--v", "2,4"], dir.path());
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.contains("does not sum"));
}

#[test]
fn spectrum_reports() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok(&["spectrum", "--t", "12", "--k", "3"], dir.path());
    assert_eq!(v["report"]["lambda1_is_zero"], true);
    assert_eq!(v["report"]["other_eigenvalues_positive"], true);
    let v = ok(&["spectrum", "--t", "8", "--k", "2"], dir.path());
    let mult: Vec<&str> = v["report"]["table"].as_array().unwrap().iter().map(|r| r["multiplicity"].as_str().unwrap()).collect();
    assert_eq!(mult, ["1", "7", "20"]);
    assert_eq!(v["report"]["multiplicity_total"], "28");
    assert_eq!(run(&["spectrum", "--t", "7", "--k", "3"], dir.path()).code, 2);
}

#[test]
fn goodfn_reports() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok(&["goodfn", "--j", "2", "--k", "3", "--brute"], dir.path());
    assert_eq!((v["report"]["closed_form"].as_str(), v["report"]["brute_force"].as_u64()), (Some("3"), Some(3)));
    assert_eq!(v["report"]["equal"], true);
    assert_eq!(ok(&["goodfn", "--j", "1", "--k", "5"], dir.path())["report"]["closed_form"], "0");
    assert_eq!(ok(&["goodfn", "--j", "0", "--k", "4"], dir.path())["report"]["closed_form"], "1");
    let big = run(&["goodfn", "--j", "9", "--k", "9", "--brute"], dir.path());
    assert_eq!(big.code, 2);
    assert!(big.stderr.contains("too large"));
}

#[test]
fn sampling_and_the_separation_pair() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let v = ok(&["sample", "ckp", "--n", "100", "--k", "2", "--p", "1/4", "--seed", "7", "--out", "ckp.hg"], d);
    assert_eq!(v["report"]["density_inside_b"]["exact"], "0");
    ok(&["sample", "ckp", "--n", "100", "--k", "2", "--p", "1/4", "--seed", "7", "--out", "again.hg"], d);
    assert_eq!(std::fs::read(d.join("ckp.hg")).unwrap(), std::fs::read(d.join("again.hg")).unwrap());

    let v = ok(&["sample", "gnp", "--n", "40", "--k", "3", "--p", "0", "--seed", "1", "--out", "g.hg"], d);
    assert_eq!(v["report"]["edges"], 0);

    let v = ok(&["verify", "cuts", "--in", "ckp.hg", "--alpha", "1/3,1/3,1/3", "--trials", "50"], d);
    let report: CutCheckReport = round_trips(&v["report"]);
    assert!(report.passed && report.trials == 50);
    assert_eq!(v["config"]["class_sizes"], serde_json::json!([34, 33, 33]));

    let d1 = run(&["verify", "d1", "--in", "ckp.hg"], d);
    assert_eq!(d1.code, 1, "{}", d1.stdout);
    let v = d1.json();
    assert_eq!(v["passed"], false);
    assert!(v["report"]["explicit_set"]["z_score"].as_f64().unwrap() > 10.0);
}

#[test]
fn verify_suites() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok(&["verify", "identity", "--r", "5", "--k", "3", "--samples", "100"], dir.path());
    assert_eq!((v["report"]["all_equal_p"].as_bool(), v["report"]["higher_monomials_vanish"].as_bool()), (Some(true), Some(true)));
    let v = ok(&["verify", "structure", "--t", "8", "--k", "2", "--p", "1/4"], dir.path());
    let report: StructureReport = round_trips(&v["report"]);
    assert_eq!((report.affine_rank_points, report.nullity), (8, 7));
}

#[test]
fn solve_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let v = ok(&["solve", "--t", "6", "--k", "2", "--p", "1/4", "--out", "x.vec"], d);
    assert_eq!((v["report"]["system_rank"].as_u64(), v["report"]["nullity"].as_u64()), (Some(10), Some(5)));
    ok(&["solve", "--t", "6", "--k", "2", "--p", "1/4", "--check", "x.vec"], d);
    let text = std::fs::read_to_string(d.join("x.vec")).unwrap();
    let bumped: Vec<&str> = text.lines().map(|l| if l.starts_with("0 ") { "0 7/8" } else { l }).collect();
    std::fs::write(d.join("y.vec"), bumped.join("\n")).unwrap();
    let bad = run(&["solve", "--t", "6", "--k", "2", "--p", "1/4", "--check", "y.vec"], d);
    assert_eq!(bad.code, 1, "{}{}", bad.stdout, bad.stderr);
    assert_eq!(bad.json()["report"]["check"]["solves_system"], false);
}

#[test]
fn graphs_and_densities() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("c4.gr"), "4\n1 0 1\n1 0\n1\n").unwrap();
    std::fs::write(d.join("e4.gr"), "4\n0 0 0\n0 0\n0\n").unwrap();
    let v = ok(&["cutnorm", "--g1", "c4.gr", "--g2", "e4.gr"], d);
    assert_eq!((v["report"]["value"].as_str(), v["report"]["exact"].as_bool()), (Some("1/2"), Some(true)));
    let w = ok(&["cutnorm", "--g1", "e4.gr", "--g2", "c4.gr"], d);
    assert_eq!(w["report"]["value"], "1/2");

    let v = ok(&["quotient", "--graph", "c4.gr", "--parts", "2", "--out", "q.gr"], d);
    assert_eq!(v["report"]["part_densities"][0][1], "1/2");
    assert!(v["report"]["part_densities"][0][0].is_null());
    assert_eq!(std::fs::read_to_string(d.join("q.gr")).unwrap(), "4\n0 1/2 1/2\n1/2 1/2\n0\n");

    let a: Vec<usize> = (1..=24).filter(|v| v % 2 == 1).collect();
    let h = exact_ckp_weights(24, 3, &ratio(1, 4), &a).unwrap();
    std::fs::write(d.join("exact.hg"), write_hypergraph(&h)).unwrap();
    let v = ok(&["density", "--in", "exact.hg", "--t", "12", "--p", "1/4", "--out", "d.vec"], d);
    let density: DensityVector = round_trips(&{
        let mut r = v["report"].clone();
        r.as_object_mut().unwrap().remove("solves_balanced_system");
        r
    });
    assert_eq!(density.entries.len(), 220);
    assert_eq!(v["report"]["solves_balanced_system"], true);
}

#[test]
fn formats_threads_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["verify", "identity", "--r", "4", "--k", "2", "--samples", "5", "--seed", "9", "--threads", "2"];
    let csv = run(&[&args[..], &["--format", "csv"]].concat(), dir.path());
    assert_eq!(csv.code, 0);
    assert!(csv.stdout.starts_with("key,value\ncommand,verify identity\n"));
    assert!(csv.stdout.contains("config.threads,2\n"));
    let text = run(&[&args[..], &["--format", "text"]].concat(), dir.path());
    assert!(text.stdout.lines().any(|l| l.starts_with("passed") && l.ends_with("true")));
    assert_eq!(run(&args, dir.path()).stdout, run(&args, dir.path()).stdout);
    assert_eq!(run(&["rank", "--t", "4", "--k", "2", "--v", "2,2", "--tolerance", "x"], dir.path()).code, 2);
}
