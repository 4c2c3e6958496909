use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latticewave")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn newton_reports_distance_and_multiplicity() {
    let o = run(&["newton", "--poly", "x1^2*x2 - x2^3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["newton"]["d_s"], "3/2");
    assert_eq!(v["newton"]["k_s"], 1);
}

#[test]
fn table2_manifest_lists_exact_matches() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t2.json");
    let man = dir.path().join("manifest.json");
    let o = run(&["table2", "--out", path_str(&out), "--manifest", path_str(&man)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("4/4 exact matches"));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&man).unwrap()).unwrap();
    let rows = m["results"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r["status"] == "exact match"));
    assert_eq!(m["outputs"].as_array().unwrap().len(), 1);
    assert_eq!(m["outputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn manifest_without_outputs_is_valid() {
    let dir = tempfile::tempdir().unwrap();
    let man = dir.path().join("m.json");
    let o = run(&["critical", "--xi", "1.5707963267948966,1.5707963267948966,1.5707963267948966,1", "--manifest", path_str(&man)]);
    assert_eq!(o.status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&man).unwrap()).unwrap();
    assert_eq!(m["outputs"].as_array().unwrap().len(), 0);
    assert_eq!(m["subcommand"], "critical");
    assert_eq!(m["results"]["label"], "Sigma2");
}

#[test]
fn green_ray_csv_has_versioned_header() {
    let o = run(&["green", "--dim", "4", "--ray", "1,1,1,1", "--mmax", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# latticewave v1, green, d=4, mass=0"));
    assert_eq!(lines.next(), Some("m,t,x1,x2,x3,x4,value,n,converged"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let t: f64 = row[1].parse().unwrap();
    assert!((t - 8f64.sqrt()).abs() < 1e-12);
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn outputs_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut digests = Vec::new();
    for threads in ["1", "4", "16"] {
        let out = dir.path().join(format!("g{threads}.csv"));
        let man = dir.path().join(format!("m{threads}.json"));
        let o = run(&["green", "--dim", "2", "--ray", "1,1", "--mmax", "12", "--threads", threads, "--out", path_str(&out), "--manifest", path_str(&man)]);
        assert_eq!(o.status.code(), Some(0));
        let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&man).unwrap()).unwrap();
        digests.push((std::fs::read(&out).unwrap(), m["outputs"][0]["sha256"].clone()));
    }
    assert_eq!(digests[0], digests[1]);
    assert_eq!(digests[0], digests[2]);
}

#[test]
fn dump_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["oscint", "--velocity", "0.3,-0.2", "--t", "10,20", "--cutoff", "0.75", "--dump-config"]);
    assert_eq!(o.status.code(), Some(0));
    let first = stdout(&o);
    assert!(first.starts_with("subcommand = oscint\n"));
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, &first).unwrap();
    let again = run(&["--config", path_str(&cfg), "--dump-config"]);
    assert_eq!(again.status.code(), Some(0), "{}", String::from_utf8_lossy(&again.stderr));
    assert_eq!(stdout(&again), first);
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# green along a ray\nsubcommand = green\ndim = 2\nray = 1,1\nmmax = 9\n").unwrap();
    let o = run(&["green", "--config", path_str(&cfg), "--mmax", "2", "--dump-config"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("mmax = 2\n"));
    assert!(text.contains("ray = 1,1\n"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["green", "--dim", "2"]).status.code(), Some(2));
    assert_eq!(run(&["newton", "--poly", "x1 +* x2"]).status.code(), Some(2));
    assert_eq!(run(&["conj", "--dim", "4", "--no-fit"]).status.code(), Some(2));
    let o = run(&["green", "--dim", "3", "--x", "1,2,3", "--t", "50", "--budget", "1000"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn help_lists_defaults() {
    let o = run(&["probe", "--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("[default: 100]"), "{text}");
    assert!(text.contains("[default: 0.05]"));
    let o = run(&["decay-fit", "--help"]);
    assert!(stdout(&o).contains("[default: 8]"));
}

#[test]
fn conj_without_fit() {
    let o = run(&["conj", "--dim", "3", "--no-fit"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("d_S = 6/7, k_S = 1"));
}

#[test]
fn decay_fit_on_synthetic_samples() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let mut text = String::from("# synthetic\nt,magnitude,tag\n");
    for k in 0..40 {
        let t = 10.0 * 1.1f64.powi(k);
        text.push_str(&format!("{t},{},syn\n", 3.0 * t.powf(-1.5) * t.ln()));
    }
    std::fs::write(&csv, text).unwrap();
    let o = run(&["decay-fit", "--input", path_str(&csv)]);
    assert_eq!(o.status.code(), Some(0));
    let fit: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((fit["beta"].as_f64().unwrap() + 1.5).abs() < 1e-6);
    assert_eq!(fit["p"], 1);
}

#[test]
fn small_evolution_commands() {
    let dir = tempfile::tempdir().unwrap();
    let field = dir.path().join("u.bin");
    let o = run(&["evolve", "--dim", "2", "--side", "32", "--t", "1,2", "--save", path_str(&field)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 4);
    assert!(field.exists());
    let o = run(&["evolve", "--dim", "2", "--side", "8", "--t", "10"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["evolve", "--dim", "2", "--side", "32", "--t", "1", "--f", path_str(&field)]);
    assert_eq!(o.status.code(), Some(0));

    let o = run(&["lplq", "--dim", "2", "--side", "32", "--t-max", "8", "--steps", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("periodic surrogate"));

    let o = run(&["strichartz", "--dim", "2", "--side", "16", "--count", "3", "--t-max", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let s: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(s["ratios"].as_array().unwrap().len(), 3);

    let o = run(&["nonlinear", "--dim", "2", "--side", "16", "--t-end", "2", "--observe-every", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2 + 5);
}

#[test]
fn quadrature_commands() {
    let o = run(&["oscint", "--velocity", "0.3,0.2", "--t", "10,20"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);

    let o = run(&["jphase", "--model", "A1", "--t-min", "10", "--t-max", "40"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("fit beta = -0.5"));

    let o = run(&["critical", "--velocity", "0.5,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Sigma1''"));

    let o = run(&["b0", "--dim", "3", "--grid-density", "8"]);
    assert!(matches!(o.status.code(), Some(0) | Some(3)));
    let b: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(b["sup"].as_f64().unwrap() < 1.0);
}

#[test]
fn table1_short_range() {
    let o = run(&["table1", "--dim", "2", "--names", "Sigma1''", "--t-max", "40"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("# latticewave v1, table1, d=2\n"));
    assert!(text.contains("Sigma1''"));
}

#[test]
fn probe_is_deterministic() {
    let args = ["probe", "--poly", "x1^2*x2", "--count", "4", "--t-min", "10", "--t-max", "40", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}
