use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cmosb"))
}

fn run(config: &Path, args: &[&str]) -> Output {
    bin().arg("--config").arg(config).args(args).output().unwrap()
}

fn ok(out: Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Writes `body` as a config whose output directory is `<tmp>/<name>`.
fn config(tmp: &TempDir, name: &str, body: &str) -> (PathBuf, PathBuf) {
    let out = tmp.path().join(name);
    let path = tmp.path().join(format!("{name}.toml"));
    std::fs::write(&path, format!("out = {:?}\n{body}", out.to_str().unwrap())).unwrap();
    (path, out)
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&read(path)).unwrap()
}

const SMALL: &str = "[dataset]\ninstances = 600\n";

#[test]
fn print_defaults_is_a_valid_config() {
    let out = ok(bin().arg("--print-defaults").output().unwrap());
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("d.toml");
    std::fs::write(&path, out).unwrap();
    assert!(cmosb::campaign::ExperimentConfig::load(&path)
        .unwrap()
        .validate()
        .is_ok());
}

#[test]
fn gen_data_presets_and_reruns_match() {
    let tmp = TempDir::new().unwrap();
    let (c1, o1) = config(&tmp, "s1", "");
    let (c2, o2) = config(&tmp, "s2", "[dataset]\ninstances = 10000\nclasses = 10\n");
    ok(run(&c1, &["gen-data"]));
    ok(run(&c2, &["gen-data"]));
    for (dir, rows, classes) in [(&o1, 2000, 2), (&o2, 10_000, 10)] {
        let meta = json(&dir.join("dataset.json"));
        assert_eq!(meta["schema_version"], "1.0");
        assert_eq!(meta["rows"], rows);
        assert_eq!(meta["features"], 10);
        assert_eq!(meta["classes"], classes);
        let text = String::from_utf8(read(&dir.join("dataset.csv"))).unwrap();
        assert_eq!(text.lines().count(), rows + 1);
        assert!(text.lines().next().unwrap().split(',').any(|h| h == "label"));
    }
    let first = read(&o1.join("dataset.csv"));
    ok(run(&c1, &["gen-data"]));
    assert_eq!(first, read(&o1.join("dataset.csv")));
    let other = tmp.path().join("seed9");
    ok(run(&c1, &["gen-data", "--seed", "9", "--out", other.to_str().unwrap()]));
    assert_ne!(first, read(&other.join("dataset.csv")));
}

#[test]
fn train_reports_every_federated_round() {
    let tmp = TempDir::new().unwrap();
    let body = format!("{SMALL}[training]\nn_f = 20\nmax_depth = 7\nlearning_rate = 0.1\nsubsample = 0.8\n");
    let (c, o) = config(&tmp, "vf2", &body);
    ok(run(&c, &["train"]));
    let report = json(&o.join("train_report.json"));
    assert_eq!(report["schema_version"], "1.0");
    let rounds = report["rounds"].as_array().unwrap();
    assert_eq!(rounds.len(), 20);
    for (i, r) in rounds.iter().enumerate() {
        assert_eq!(r["round"], i + 1);
    }
    for key in ["epsilon_u", "epsilon_c", "epsilon_p"] {
        assert!(report[key].as_f64().unwrap().is_finite());
    }
    assert_eq!(json(&o.join("forest.json"))["schema_version"], "1.0");
    assert!(json(&o.join("leaf_log.json")).get("schema_version").is_some());
}

#[test]
fn low_purity_threshold_logs_fewer_leaves() {
    let tmp = TempDir::new().unwrap();
    let leaves = |name: &str, p: &str| {
        let body =
            format!("{SMALL}[training]\ncomplete_secure = false\npurity_threshold = {p}\nunrestricted_purity = true\n");
        let (c, o) = config(&tmp, name, &body);
        ok(run(&c, &["train"]));
        json(&o.join("train_report.json"))["logged_leaves"].as_u64().unwrap()
    };
    let strict = leaves("p01", "0.1");
    let loose = leaves("p10", "1.0");
    assert!(strict < loose, "{strict} vs {loose}");
}

#[test]
fn config_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    let (c, o) = config(&tmp, "deep", "[training]\nmax_depth = 9\n");
    let out = run(&c, &["train"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("max_depth"));
    assert!(!o.exists());

    let (c, _) = config(&tmp, "typo", "[training]\nn_ff = 3\n");
    assert_eq!(run(&c, &["train"]).status.code(), Some(2));
    assert_eq!(
        bin()
            .arg("--config")
            .arg(tmp.path().join("missing.toml"))
            .arg("train")
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );
    assert_eq!(bin().output().unwrap().status.code(), Some(2));
    assert_eq!(
        bin().args(["train", "--workers", "0"]).output().unwrap().status.code(),
        Some(2)
    );
}

#[test]
fn attack_without_train_exits_3_and_repeats_identically() {
    let tmp = TempDir::new().unwrap();
    let (c, o) = config(&tmp, "atk", &format!("{SMALL}[training]\ncomplete_secure = false\n"));
    assert_eq!(run(&c, &["attack"]).status.code(), Some(3));
    ok(run(&c, &["train"]));
    let first = ok(run(&c, &["attack"]));
    let report = read(&o.join("attack_report.json"));
    assert_eq!(first, ok(run(&c, &["attack"])));
    assert_eq!(report, read(&o.join("attack_report.json")));
    let v = json(&o.join("attack_report.json"));
    assert!((0.0..=1.0).contains(&v["epsilon_p"].as_f64().unwrap()));
}

#[test]
fn optimize_is_worker_count_independent_and_plots() {
    let tmp = TempDir::new().unwrap();
    let body = format!("{SMALL}[ga]\npopulation = 4\ngenerations = 2\n");
    let (c, o1) = config(&tmp, "w1", &body);
    ok(run(&c, &["optimize", "--workers", "1"]));
    let o4 = tmp.path().join("w4");
    ok(run(&c, &["optimize", "--workers", "4", "--out", o4.to_str().unwrap()]));
    for f in [
        "front.csv",
        "archive.json",
        "hv_trace.csv",
        "baselines.csv",
        "baselines.json",
    ] {
        assert_eq!(read(&o1.join(f)), read(&o4.join(f)), "{f}");
    }
    let trace = String::from_utf8(read(&o1.join("hv_trace.csv"))).unwrap();
    assert_eq!(trace.lines().next().unwrap(), "generation,hypervolume");
    assert_eq!(trace.lines().count(), 1 + 3);
    let archive = json(&o1.join("archive.json"));
    assert_eq!(archive["schema_version"], "1.0");
    assert_eq!(archive["archive"].as_array().unwrap().len(), 4 * 3);
    assert_eq!(
        json(&o1.join("baselines.json"))["baselines"].as_array().unwrap().len(),
        3
    );
    let front = String::from_utf8(read(&o1.join("front.csv"))).unwrap();
    assert_eq!(
        front.lines().next().unwrap(),
        "n_f,n_l,d,r,p,eta,utility_loss,cost,leakage"
    );

    let listed = ok(run(&c, &["plot"]));
    assert_eq!(listed.lines().count(), 2);
    let svg = String::from_utf8(read(&o1.join("front.svg"))).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("VF2Boost"));
    assert!(read(&o1.join("hv.svg")).starts_with(b"<svg"));
}

#[test]
fn plot_rejects_an_empty_front_without_writing() {
    let tmp = TempDir::new().unwrap();
    let (c, o) = config(&tmp, "empty", "");
    std::fs::create_dir_all(&o).unwrap();
    let archive = serde_json::json!({
        "schema_version": "1.0",
        "reference": [1.0, 500.0, 1.0],
        "front": [],
        "archive": [],
        "hv_trace": [0.0],
        "evaluations": 0,
        "trainings": 0
    });
    std::fs::write(o.join("archive.json"), archive.to_string()).unwrap();
    assert_eq!(run(&c, &["plot"]).status.code(), Some(3));
    assert!(!o.join("front.svg").exists() && !o.join("hv.svg").exists());

    let (c, _) = config(&tmp, "nothing", "");
    assert_eq!(run(&c, &["plot"]).status.code(), Some(3));
}
