use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn grw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grw")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn gen(dir: &Path, name: &str, scale: &str, seed: &str) -> String {
    let path = dir.join(name);
    let o = grw(&["gen-rmat", "--scale", scale, "--edge-factor", "2", "--seed", seed, "-o", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    path.to_str().unwrap().to_string()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn gen_rmat_is_deterministic_and_writes_metadata() {
    let dir = TempDir::new().unwrap();
    let a = gen(dir.path(), "a.edges", "4", "7");
    let b = gen(dir.path(), "b.edges", "4", "7");
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 32);
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["num_vertices"], 16);
    assert_eq!(meta["num_edges"], 32);
    assert_eq!(meta["seed"], 7);
}

#[test]
fn convert_then_run_from_the_cache_matches_the_edge_list() {
    let dir = TempDir::new().unwrap();
    let edges = gen(dir.path(), "g.edges", "6", "1");
    let cache = dir.path().join("g.csr");
    let o = grw(&["convert", &edges, "-o", cache.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut paths = Vec::new();
    for (graph, out) in [(edges.as_str(), "from_edges"), (cache.to_str().unwrap(), "from_cache")] {
        let out = dir.path().join(out);
        let o = grw(&[
            "run", "--graph", graph, "--seed", "3", "--queries", "200", "--pipelines", "4",
            "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        paths.push(fs::read_to_string(out.join("paths.txt")).unwrap());
        assert!(out.join("report.json").exists());
        assert_eq!(csv_rows(&out.join("summary.csv")).len(), 1);
    }
    assert_eq!(paths[0].lines().count(), 200);
    assert_eq!(paths[0], paths[1]);
}

#[test]
fn malformed_edge_list_names_the_line() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.edges");
    fs::write(&bad, "0 1\n1 2\n2 3\n# note\n3 0\n\n4 x\n").unwrap();
    let o = grw(&["convert", bad.to_str().unwrap(), "-o", dir.path().join("bad.csr").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 7"), "{}", stderr(&o));
}

#[test]
fn zero_queries_run_cleanly() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = grw(&[
        "run", "--set", "graph.rmat_scale=5", "--seed", "1", "--queries", "0", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(out.join("paths.txt")).unwrap(), "");
    let row = &csv_rows(&out.join("summary.csv"))[0];
    assert_eq!(row[4..6], ["0".to_string(), "0".to_string()]);
}

#[test]
fn configuration_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    for args in [
        vec!["run", "--set", "graph.rmat_scale=5", "--seed", "1", "--algo", "bfs", "--out", out],
        vec!["run", "--set", "graph.rmat_scale=5", "--out", out],
        vec!["run", "--set", "graph.rmat_scale=5", "--seed", "1", "--pipelines", "6", "--out", out],
        vec!["run", "--set", "sim.nonsense=1", "--seed", "1", "--out", out],
        vec!["sweep", "--set", "graph.rmat_scale=5", "--seed", "1", "--axis", "N", "--values", ",", "--out", out],
        vec!["frobnicate"],
    ] {
        let o = grw(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
    assert!(!Path::new(out).exists(), "nothing is written before validation passes");
    let o = grw(&["run", "--set", "graph.rmat_scale=5", "--out", out]);
    assert!(stderr(&o).contains("seed"), "{}", stderr(&o));
}

#[test]
fn missing_input_exits_with_two() {
    let o = grw(&["run", "--graph", "/nonexistent/g.edges", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn config_file_with_overrides() {
    let dir = TempDir::new().unwrap();
    let ini = dir.path().join("exp.ini");
    let out = dir.path().join("out");
    fs::write(
        &ini,
        format!(
            "[graph]\nrmat_scale = 6\nrmat_edge_factor = 4\n\n[algo]\nname = ppr\nalpha = 0.3\n\n[sim]\npipelines = 2\n\n[run]\nseed = 11\nqueries = 50\n\n[output]\ndir = {}\n",
            out.display()
        ),
    )
    .unwrap();
    let o = grw(&["run", "--config", ini.to_str().unwrap(), "--set", "algo.max_len=5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let row = &csv_rows(&out.join("summary.csv"))[0];
    assert_eq!(row[1], "ppr");
    assert_eq!(row[2], "SC6-4");
    assert_eq!(row[3], "2");
    let text = fs::read_to_string(out.join("paths.txt")).unwrap();
    assert!(text.lines().all(|l| l.split('\t').nth(1).unwrap().split(' ').count() <= 6));
}

#[test]
fn ablation_covers_every_mode_and_repetition_in_order() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("abl");
    let o = grw(&[
        "ablate", "--set", "graph.rmat_scale=7", "--set", "graph.rmat_edge_factor=8", "--seed", "2",
        "--queries", "256", "--pipelines", "4", "--repetitions", "3", "--set", "algo.max_len=20",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out.join("ablation.csv"));
    assert_eq!(rows.len(), 12);
    let ids: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(&ids[..4], ["baseline-r0", "scheduler-only-r0", "async-only-r0", "combined-r0"]);
    assert_eq!(ids[11], "combined-r2");
    for rep in rows.chunks(4) {
        let steps: Vec<&str> = rep.iter().map(|r| r[5].as_str()).collect();
        assert!(steps.iter().all(|s| *s == steps[0]), "{steps:?}");
        let cycles: Vec<u64> = rep.iter().map(|r| r[4].parse().unwrap()).collect();
        assert!(cycles[3] < cycles[0], "combined beats baseline: {cycles:?}");
    }
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 13);
}

#[test]
fn sweep_writes_one_row_per_point() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sw");
    let common = ["--set", "graph.rmat_scale=6", "--seed", "4", "--queries", "64", "--out", out.to_str().unwrap()];
    let mut args = vec!["sweep", "--axis", "N", "--values", "4"];
    args.extend(common);
    let o = grw(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = csv_rows(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "N=4-r0");
    assert_eq!(rows[0][3], "4");

    let mut args = vec!["sweep", "--axis", "skew", "--values", "0.25,0.57"];
    args.extend(common);
    let o = grw(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(csv_rows(&out.join("sweep.csv")).len(), 2);
}

#[test]
fn report_reads_saved_runs() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("r1");
    let o = grw(&[
        "run", "--set", "graph.rmat_scale=6", "--seed", "5", "--queries", "100", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    let report = out.join("report.json");
    let o = grw(&["report", report.to_str().unwrap(), "--graph", "SC6-16"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let fields = |s: &str| s.lines().nth(1).unwrap().split(',').skip(1).map(String::from).collect::<Vec<_>>();
    assert_eq!(fields(&stdout), fields(&summary));

    let o = grw(&["report", report.to_str().unwrap(), "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows[0]["run_id"], "r1");
    let o = grw(&["report", report.to_str().unwrap(), "--format", "xml"]);
    assert_eq!(o.status.code(), Some(1));
}
