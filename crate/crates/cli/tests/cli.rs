use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn rrcr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrcr")).args(args).output().expect("run rrcr")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const C6: &str = "6 6\n0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n";

#[test]
fn sample_is_deterministic_and_regular() {
    let a = rrcr(&["sample", "--n", "20", "--d", "3", "--seed", "7"]);
    let b = rrcr(&["sample", "--n", "20", "--d", "3", "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("20 30\n"));
    let mut deg = [0; 20];
    for line in text.lines().skip(1) {
        for v in line.split(' ') {
            deg[v.parse::<usize>().unwrap()] += 1;
        }
    }
    assert!(deg.iter().all(|&x| x == 3));
}

#[test]
fn sample_rejects_odd_degree_sum() {
    let o = rrcr(&["sample", "--n", "5", "--d", "3"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("odd"));
}

#[test]
fn refine_cycle_from_singleton() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "c6.txt", C6);
    let o = rrcr(&["refine", "--graph", s(&g), "--seed", "singleton:0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "rounds 2\nclasses 2 3 4 4\ndiscrete false\n0\n1 5\n2 4\n3\n");

    let parts = write(dir.path(), "p.txt", "0 1 2\n3 4 5\n");
    let o = rrcr(&["refine", "--graph", s(&g), "--seed", &format!("parts:{}", s(&parts))]);
    assert!(stdout(&o).starts_with("rounds 1\n"), "{}", stdout(&o));

    let o = rrcr(&["refine", "--graph", s(&g), "--seed", "bogus"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn canon_and_iso() {
    let dir = tempfile::tempdir().unwrap();
    let out = rrcr(&["sample", "--n", "40", "--d", "6", "--seed", "3"]);
    let g1 = write(dir.path(), "g1.txt", &stdout(&out));
    // swap labels 0 and 1
    let swapped: String = stdout(&out)
        .lines()
        .enumerate()
        .map(|(i, line)| {
            if i == 0 {
                return format!("{line}\n");
            }
            let f: Vec<String> = line
                .split(' ')
                .map(|t| match t {
                    "0" => "1".to_string(),
                    "1" => "0".to_string(),
                    x => x.to_string(),
                })
                .collect();
            format!("{}\n", f.join(" "))
        })
        .collect();
    let g2 = write(dir.path(), "g2.txt", &swapped);

    let form1 = dir.path().join("f1.txt");
    let form2 = dir.path().join("f2.txt");
    let c1 = rrcr(&["canon", "--graph", s(&g1), "--emit-form", s(&form1)]);
    let c2 = rrcr(&["canon", "--graph", s(&g2), "--emit-form", s(&form2)]);
    assert!(c1.status.success() && c2.status.success());
    assert_eq!(fs::read(&form1).unwrap(), fs::read(&form2).unwrap());

    let o = rrcr(&["iso", "--g1", s(&g1), "--g2", s(&g2)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("isomorphic\nmapping 1 0 "));

    let other = rrcr(&["sample", "--n", "40", "--d", "6", "--seed", "4"]);
    let g3 = write(dir.path(), "g3.txt", &stdout(&other));
    assert_eq!(rrcr(&["iso", "--g1", s(&g1), "--g2", s(&g3)]).status.code(), Some(1));

    let pet = "10 15\n0 1\n1 2\n2 3\n3 4\n0 4\n0 5\n1 6\n2 7\n3 8\n4 9\n5 7\n7 9\n6 9\n6 8\n5 8\n";
    let p = write(dir.path(), "pet.txt", pet);
    assert_eq!(rrcr(&["iso", "--g1", s(&p), "--g2", s(&p)]).status.code(), Some(2));
    assert_eq!(rrcr(&["canon", "--graph", s(&p)]).status.code(), Some(1));
}

#[test]
fn analyze_outputs_json() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "c6.txt", C6);
    let o = rrcr(&["analyze", "--graph", s(&g), "lambda"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["estimate"]["lambda_hat"].as_f64().unwrap() - 2.0).abs() < 1e-6);

    let set = write(dir.path(), "u.txt", "0 1\n");
    let o = rrcr(&["analyze", "--graph", s(&g), "hist", "--set", s(&set)]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v, serde_json::json!({"0": 2, "1": 2}));

    let o = rrcr(&["analyze", "--graph", s(&g), "mixing", "--pairs", "5", "--seed", "1"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pairs"].as_array().unwrap().len(), 5);
    assert_eq!(v["all_ok"], true);

    let o = rrcr(&["analyze", "--graph", s(&g), "spheres", "--source", "0", "--c", "0.5"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["vacuous"], true);
}

#[test]
fn check_inequalities_small_range() {
    let o = rrcr(&["check", "inequalities", "--max", "10", "--kmax", "3"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["anticoncentration"]["arithmetic"], "exact");
}

#[test]
fn experiment_reports_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = rrcr(&["experiment", "discreteness", "--n", "32", "--d", "6", "--samples", "10", "--seed", "1", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("discreteness,32,6,singleton,10,0,10,1.000000,"));

    // cycles never become discrete
    let o = rrcr(&["experiment", "discreteness", "--n", "8", "--d", "2", "--samples", "5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["cells"][0]["fraction_discrete"], 0.0);

    let o = rrcr(&["experiment", "iso", "--n", "5", "--d", "3", "--samples", "5"]);
    assert_eq!(o.status.code(), Some(4));
}
