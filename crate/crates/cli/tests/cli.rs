use std::path::Path;
use std::process::{Command, Output};

fn mixlab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixlab"))
        .args(args)
        .current_dir(cwd)
        .env_remove("MIXLAB_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const C4: &str =
    "mixlab-graph v1 4 4\n0 1 1.0\n0 3 1.0\n1 2 1.0\n2 3 1.0\nlabel 0 plain\nlabel 1 plain\nlabel 2 plain\nlabel 3 plain\n";
const K2: &str = "mixlab-graph v1 2 1\n0 1 1.0\nlabel 0 plain\nlabel 1 plain\n";

#[test]
fn gap_of_c4_is_one_half() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c4.txt", C4);
    let o = mixlab(&["gap", "--in", "c4.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "0.5");
    let o = mixlab(&["gap", "--in", "c4.txt", "--method", "lanczos"], dir.path());
    assert_eq!(stdout(&o), "0.5");
}

#[test]
fn mixing_time_of_k2_is_one() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "k2.txt", K2);
    let o = mixlab(&["mix", "--in", "k2.txt", "--start", "0"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1");
}

#[test]
fn unknown_flag_exits_2_with_usage() {
    let dir = tempfile::tempdir().unwrap();
    let o = mixlab(&["gap", "--frobnicate"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn missing_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = mixlab(&["gap", "--in", "nope.txt"], dir.path());
    assert_ne!(o.status.code(), Some(0));
    assert!(!o.stderr.is_empty());
}

#[test]
fn build_writes_graph_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let o = mixlab(&["build", "--family", "simple", "--K", "8", "--seed", "3", "--out", "g.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("g.txt.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 3);
    assert_eq!(meta["details"]["vertex_count"], meta["vertex_count"]);
    assert_eq!(meta["details"]["closed_form_vertex_count"], meta["vertex_count"]);

    // same seed, same bytes
    let o = mixlab(&["build", "--family", "simple", "--K", "8", "--seed", "3", "--out", "h.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(dir.path().join("g.txt")).unwrap(), std::fs::read(dir.path().join("h.txt")).unwrap());
}

#[test]
fn literal_ell_rule_is_infeasible() {
    let dir = tempfile::tempdir().unwrap();
    let o = mixlab(&["build", "--family", "main", "--K", "8", "--out", "g.txt"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("K=8"));
}

#[test]
fn perturb_then_measure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(mixlab(&["build", "--family", "simple", "--K", "8", "--out", "g.txt"], d).status.code(), Some(0));
    let o = mixlab(&["perturb", "--in", "g.txt", "--out", "gp.txt"], d);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let a: f64 = stdout(&mixlab(&["hit", "--in", "g.txt"], d)).parse().unwrap();
    let b: f64 = stdout(&mixlab(&["hit", "--in", "gp.txt"], d)).parse().unwrap();
    assert!(a > 0.0 && b > 0.0 && a != b);

    let o = mixlab(&["visits", "--in", "g.txt", "--walkers", "200", "--out", "rep"], d);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("total"));
    assert!(d.join("rep/visits.csv").exists());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("rep/visits_report.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], "mixlab-report v1");

    let o = mixlab(&["excursions", "--in", "g.txt", "--max-anchors", "2", "--walkers", "200"], d);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn oracle_matches_fast_paths_on_c4() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "c4.txt", C4);
    let o = mixlab(&["oracle", "--in", "c4.txt", "--target", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("gap\t0.5"));
    assert!(text.contains("hitting\t8"));
    let hit = stdout(&mixlab(&["hit", "--in", "c4.txt", "--target", "2"], dir.path()));
    assert_eq!(hit, "8");
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(mixlab(&["build", "--family", "simple", "--K", "8", "--out", "g.txt"], d).status.code(), Some(0));
    let run = |t: &str| stdout(&mixlab(&["--threads", t, "hit", "--in", "g.txt", "--method", "mc", "--walkers", "300"], d));
    assert_eq!(run("1"), run("3"));
}

#[test]
fn scaling_experiment_with_infeasible_rule_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(
        d,
        "exp.toml",
        "[experiment]\nkind = \"scaling\"\n\n[construction]\nfamily = \"main\"\nk_values = [8, 10]\n",
    );
    let o = mixlab(&["--config", "exp.toml", "--out", "run", "experiment", "scaling"], d);
    assert_eq!(o.status.code(), Some(2));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("run/scaling_report.json")).unwrap()).unwrap();
    for row in report["body"]["rows"].as_array().unwrap() {
        assert_eq!(row["error"]["kind"], "infeasible-ell-rule");
    }
}

#[test]
fn output_dir_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(
        d,
        "exp.toml",
        "[experiment]\nkind = \"robustness\"\n\n[robustness]\nfamily = \"hypercube\"\nsize = 4\ntrials = 2\n",
    );
    let o = Command::new(env!("CARGO_BIN_EXE_mixlab"))
        .args(["--config", "exp.toml", "experiment", "robustness"])
        .current_dir(d)
        .env("MIXLAB_OUT", "from-env")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.join("from-env/robustness_report.json").exists());
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "exp.toml", "[measurements]\nwalkerz = 3\n");
    let o = mixlab(&["--config", "exp.toml", "experiment", "scaling"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}
