use std::process::{Command, Output};

use serde_json::Value;

fn qgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgraph")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let o = qgraph(args);
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn path_spectrum_table() {
    let o = qgraph(&["spectrum", "path", "--length", "1", "--count", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for mu in ["9.86960440109", "39.4784176043", "88.8264396098"] {
        assert!(text.contains(mu), "{text}");
    }
}

#[test]
fn star_spectrum_reports_multiplicity() {
    let v = json(&["spectrum", "star3", "--lengths", "1,1,1", "--count", "3", "--json"]);
    let list = v["eigenvalues"].as_array().unwrap();
    assert_eq!(list.len(), 2);
    assert_eq!(list[1]["mu"].as_f64().unwrap(), 2.46740110027);
    assert_eq!(list[1]["multiplicity"], 2);
}

#[test]
fn spectrum_csv_and_dirichlet() {
    let o = qgraph(&["spectrum", "path", "--count", "2", "--dirichlet", "a,b", "--csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("index,mu,k,multiplicity\n1,9.86960440109,"), "{text}");
}

#[test]
fn graph_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    std::fs::write(&path, r#"{"vertices":["a","b"],"edges":[{"id":"e1","from":"a","to":"b","length":2.0}]}"#).unwrap();
    let v = json(&["spectrum", "--graph", path.to_str().unwrap(), "--count", "2", "--json"]);
    assert_eq!(v["eigenvalues"][1]["mu"].as_f64().unwrap(), 2.46740110027);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{not json").unwrap();
    let o = qgraph(&["spectrum", "--graph", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(!o.stderr.is_empty());
    assert_eq!(qgraph(&["spectrum", "nonsense"]).status.code(), Some(2));
    assert_eq!(qgraph(&["spectrum", "path", "--dirichlet", "zz"]).status.code(), Some(2));
    assert_eq!(qgraph(&["nodal-report", "path", "--index", "0"]).status.code(), Some(2));
    assert_eq!(qgraph(&["verify", "bogus", "--graph", "path"]).status.code(), Some(2));
}

#[test]
fn tadpole_nodal_counts() {
    let phi: Vec<u64> = (1..=5)
        .map(|n| json(&["nodal-report", "tadpole", "--index", &n.to_string(), "--json"])["node_count"].as_u64().unwrap())
        .collect();
    assert_eq!(phi, [0, 1, 3, 2, 4]);
}

#[test]
fn star_index_two_is_flagged_not_generic() {
    let v = json(&["nodal-report", "star3", "--index", "2", "--json"]);
    assert_eq!(v["is_generic"], false);
    assert_eq!(v["multiplicity"], 2);
}

#[test]
fn path_neumann_domains() {
    let v = json(&["neumann-report", "path", "--index", "6", "--json"]);
    assert_eq!(v["neumann_domain_count"], 5);
    let constant = json(&["neumann-report", "path", "--index", "1", "--json"]);
    assert_eq!(constant["neumann_applicable"], false);
}

#[test]
fn eigenfunction_csv() {
    let o = qgraph(&["eigenfunction", "path", "--index", "1", "--samples", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "edge_id,x,value,derivative");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("e,0,1,") && lines[2].starts_with("e,1,1,"), "{text}");

    let o = qgraph(&["eigenfunction", "tadpole", "--index", "2", "--samples", "50"]);
    let tail: Vec<f64> = stdout(&o).lines().filter(|l| l.starts_with("tail,")).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    let changes = tail.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
    assert_eq!(changes, 1);
}

#[test]
fn degenerate_eigenfunction_writes_basis_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("mu1.csv");
    let o = qgraph(&["eigenfunction", "tadpole", "--index", "4", "--samples", "5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for name in ["mu1_basis1.csv", "mu1_basis2.csv", "mu1_morse.csv"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert_eq!(text.lines().count(), 11);
    }
}

#[test]
fn minpart_examples() {
    let pi2 = std::f64::consts::PI.powi(2);
    let path = json(&["minpart", "path", "--k", "3", "--json"]);
    assert!((path["energy"].as_f64().unwrap() / (9.0 * pi2) - 1.0).abs() < 1e-10);
    assert_eq!(path["equipartition"], true);
    assert_eq!(path["cuts"].as_array().unwrap().len(), 2);

    let star = json(&["minpart", "star3", "--lengths", "1,1,1", "--k", "2", "--json"]);
    assert!((star["energy"].as_f64().unwrap() / pi2 - 1.0).abs() < 1e-10);
    assert_eq!(star["equipartition"], false);

    let tad = json(&["minpart", "tadpole", "--k", "2", "--json"]);
    assert!((tad["energy"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    assert_eq!(tad["kind"], "neumann");

    let d = json(&["minpart", "path", "--k", "2", "--kind", "dirichlet", "--json"]);
    assert!((d["energy"].as_f64().unwrap() / pi2 - 1.0).abs() < 1e-10);
    assert_eq!(qgraph(&["minpart", "path", "--k", "1"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["minpart", "tadpole", "--k", "3", "--json"];
    assert_eq!(qgraph(&args).stdout, qgraph(&args).stdout);
    let args = ["verify", "courant", "--random-trees", "3", "--seed", "11", "--nmax", "4", "--json"];
    assert_eq!(qgraph(&args).stdout, qgraph(&args).stdout);
}

#[test]
fn verify_courant_on_random_trees_passes() {
    let v = json(&["verify", "courant", "--random-trees", "20", "--seed", "7", "--nmax", "8", "--json"]);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["passed"], 160);
}

#[test]
fn verify_courant_tadpole_witness() {
    let o = qgraph(&["verify", "courant", "--graph", "tadpole", "--nmax", "7", "--json"]);
    assert_eq!(o.status.code(), Some(5));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let witness = v["cases"].as_array().unwrap().iter().find(|c| c["status"] == "fail").unwrap();
    assert_eq!(witness["n"], 3);
    assert_eq!(witness["detail"]["phi"], 3);

    let o = qgraph(&["verify", "courant", "--graph", "tadpole", "--nmax", "7", "--expect-violation"]);
    assert_eq!(o.status.code(), Some(0));
    let o = qgraph(&["verify", "courant", "--graph", "path", "--nmax", "4", "--expect-violation"]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn verify_spm_equality_on_path() {
    let v = json(&["verify", "spm-equality", "--graph", "path", "--nmax", "5", "--json"]);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["passed"], 4);
}
