use std::fs;
use std::process::{Command, Output};

use sosgibbs::{count_n, theta_critical};

fn sosgibbs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sosgibbs")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let o = sosgibbs(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn criticals_examples() {
    let o = sosgibbs(&["criticals", "--d", "2", "--theta", "0.2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(&format!("theta_c  {}", sosgibbs_cli::format::human(1.0 / 17f64.sqrt()))));

    let o = sosgibbs(&["criticals", "--d", "2", "--theta", "critical"]);
    assert!(stdout(&o).contains("x1 = x2"));
    let v = json(&["criticals", "--d", "2", "--theta", "critical", "--format", "json"]);
    assert_eq!(v["k_over_h_star"]["x1"], v["k_over_h_star"]["x2"]);

    let o = sosgibbs(&["criticals", "--d", "3", "--theta", "0.5"]);
    assert!(stdout(&o).contains("unique-solution regime; no critical pair"));

    let o = sosgibbs(&["criticals", "--d", "3", "--k", "6", "--theta", "0.1"]);
    assert!(stdout(&o).contains("inconsistent prefactor"));
}

#[test]
fn solve_examples() {
    let v = json(&["solve", "--mode", "ti", "--theta", "1", "--k", "3", "--format", "json"]);
    let roots = v["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    assert_eq!(roots[0]["h2"].as_f64().unwrap(), 0.0);

    let v = json(&["solve", "--mode", "b-zero", "--theta", "0.2", "--k", "3", "--c", "1", "--format", "json"]);
    let h_star = v["diagnostics"].as_array().unwrap().iter().find(|d| d[0] == "h_star").unwrap()[1]
        .as_f64()
        .unwrap();
    let n = v["roots"].as_array().unwrap().len();
    assert_eq!(n, count_n(0.2, 1.0, 3, 2, h_star).unwrap());
    assert_eq!(v["prediction"]["n_predicted"].as_u64().unwrap() as usize, n);

    let o = sosgibbs(&["solve", "--mode", "periodic", "--theta", "3", "--k", "5"]);
    let text = stdout(&o);
    assert!(text.contains("g'(h*)") && text.contains(">= -1"));
}

#[test]
fn solve_eq23_tags_roots() {
    let v = json(&["solve", "--mode", "eq23", "--theta", "0.05", "--k", "3", "--pattern", "3,0,1,2", "--format", "json"]);
    for r in v["roots"].as_array().unwrap() {
        assert!(r["tag"] == "known_subcase" || r["tag"] == "new");
    }
    let o = sosgibbs(&["solve", "--mode", "eq23", "--theta", "0.05", "--k", "3", "--pattern", "3,0,2,1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_round_trips_byte_identically() {
    for args in [
        vec!["criticals", "--d", "3", "--k", "5", "--theta", "0.07", "--format", "json"],
        vec!["solve", "--mode", "b-nonzero", "--theta", "0.02", "--k", "2", "--pattern", "0,2,0,2", "--format", "json"],
        vec!["verify-tree", "--theta", "0.1", "--k", "2", "--pattern", "2,0,0,2", "--root-split", "2,1", "--format", "json"],
        vec!["sweep", "--theta", "0.05:0.5:4", "--c", "0:2", "--k", "3", "--format", "json"],
    ] {
        let o = sosgibbs(&args);
        assert!(o.status.success());
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        let again = sosgibbs_cli::format::json(&v).unwrap();
        assert_eq!(again, String::from_utf8(o.stdout).unwrap(), "{args:?}");
    }
}

#[test]
fn verify_tree_examples() {
    let v = json(&[
        "verify-tree", "--theta", "0.1", "--k", "2", "--pattern", "2,0,0,2", "--root-split", "2,1", "--perturb", "0.5",
        "--format", "json",
    ]);
    assert_eq!(v["regime"], "triple");
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 3);
    for s in sols {
        assert!(s["deviation"].as_f64().unwrap() < 1e-12);
        assert!(s["perturbed_deviation"].as_f64().unwrap() > 1e-4);
    }
    for p in v["pairwise"].as_array().unwrap() {
        assert!(p["sup_distance"].as_f64().unwrap() > 1e-6);
    }
    let o = sosgibbs(&["verify-tree", "--theta", "0.1", "--k", "3", "--pattern", "3,0,1,2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("enumeration budget"));
}

#[test]
fn seeded_perturbation_is_reproducible() {
    let args = [
        "verify-tree", "--theta", "0.3", "--k", "2", "--pattern", "1,1,1,1", "--perturb", "0.5", "--seed", "11",
        "--format", "json",
    ];
    assert_eq!(sosgibbs(&args).stdout, sosgibbs(&args).stdout);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# b = 0 run\nmode = b-zero\ntheta = 0.2\nk = 3\nc = 1\nformat = json\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let v = json(&["solve", "--config", cfg]);
    assert_eq!(v["pattern"]["c"], 1);
    let v = json(&["solve", "--config", cfg, "--c", "0"]);
    assert_eq!(v["pattern"]["c"], 0);
    let out = dir.path().join("sweep.csv");
    let o = sosgibbs(&["--config", cfg, "sweep", "--theta", "0.1:0.2:2", "--c", "0,1", "--out", out.to_str().unwrap(), "--format", "csv"]);
    // keys that sweep does not know are a usage error
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(sosgibbs(&["solve", "--mode", "ti", "--theta", "0.5"]).status.code(), Some(2));
    assert_eq!(sosgibbs(&["sweep", "--theta", "0.1:0.2:5", "--c", "7", "--k", "3"]).status.code(), Some(2));
    assert_eq!(sosgibbs(&["criticals", "--d", "1", "--theta", "0.2"]).status.code(), Some(1));
    assert_eq!(sosgibbs(&["solve", "--mode", "ti", "--theta", "0.5", "--k", "3", "--m", "3"]).status.code(), Some(1));
    let o = sosgibbs(&["solve", "--mode", "ti", "--theta", "0.5", "--k", "3", "--out", "/nonexistent/dir/x"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(sosgibbs(&["solve", "--config", "/nonexistent.cfg", "--mode", "ti"]).status.code(), Some(4));
    assert_eq!(sosgibbs(&["--help"]).status.code(), Some(0));
    assert!(theta_critical(2).is_ok());
}

#[test]
fn sweep_shows_drop_across_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = sosgibbs(&["sweep", "--theta", "0.01:0.6:30", "--c", "0:4", "--k", "4", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# "));
    let mut saw_triple = false;
    let mut saw_unique_after = false;
    for line in lines.skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let (theta, c): (f64, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
        let (pred, found): (usize, usize) = (f[7].parse().unwrap(), f[8].parse().unwrap());
        assert!(found >= pred);
        if c == 1 && pred == 3 {
            saw_triple = true;
        }
        if c == 1 && theta > theta_critical(3).unwrap() {
            assert_eq!(pred, 1);
            saw_unique_after = true;
        }
    }
    assert!(saw_triple && saw_unique_after);
}
