use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn oftrl(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oftrl"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

const OMWU: &str = "\
[game]
kind = \"a_delta\"
delta = 0.01

[algorithm]
algorithm = \"omwu\"
eta = 0.1
horizon = 100000

[outputs]
svg = \"regret.svg\"
";

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn run_writes_all_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "run.toml", OMWU);
    let out = oftrl(&["run", "--config", &cfg, "--out", "res"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let res = tmp.path().join("res");
    for f in ["trajectory.csv", "convergence.csv", "summary.json", "regret.svg"] {
        assert!(res.join(f).is_file(), "{f} missing");
    }
    let summary: Value = serde_json::from_str(&fs::read_to_string(res.join("summary.json")).unwrap()).unwrap();
    let mut keys: Vec<&str> = summary.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["avg_gap", "best_gap", "best_t", "config", "landmarks", "last_gap", "prediction"]);
    assert!(summary["best_gap"].as_f64().unwrap() <= summary["avg_gap"].as_f64().unwrap());
    assert_eq!(summary["config"]["game"]["kind"], "a_delta");
    assert!(summary["landmarks"]["t1"].as_u64().is_some());
    assert!(summary["prediction"]["t_upper"].as_f64().is_some());

    let traj = fs::read_to_string(res.join("trajectory.csv")).unwrap();
    assert!(traj.starts_with("t,x0,x1,y0,y1,gap\n"));
    assert_eq!(traj.lines().count(), 100_001);
    let svg = fs::read_to_string(res.join("regret.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("fill=\"red\" fill-opacity"));
    assert!(!svg.contains("href"));
}

#[test]
fn csv_output_is_byte_identical_across_runs_and_independent_of_svg() {
    let tmp = TempDir::new().unwrap();
    let small = OMWU.replace("100000", "3000");
    let with_svg = write_config(tmp.path(), "a.toml", &small);
    let without_svg = write_config(tmp.path(), "b.toml", &small.replace("svg = \"regret.svg\"\n", ""));
    for (cfg, dir) in [(&with_svg, "a"), (&with_svg, "b"), (&without_svg, "c")] {
        assert!(oftrl(&["run", "--config", cfg, "--out", dir], tmp.path()).status.success());
    }
    for f in ["trajectory.csv", "convergence.csv", "summary.json"] {
        let a = fs::read(tmp.path().join("a").join(f)).unwrap();
        assert_eq!(a, fs::read(tmp.path().join("b").join(f)).unwrap(), "{f}");
        if f != "summary.json" {
            assert_eq!(a, fs::read(tmp.path().join("c").join(f)).unwrap(), "{f}");
        }
    }
    assert!(!tmp.path().join("c/regret.svg").exists());
}

#[test]
fn zero_matrix_has_zero_gaps() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "zero.toml",
        "[game]\nkind = \"explicit\"\nentries = [[0, 0], [0, 0]]\n\n[algorithm]\nalgorithm = \"oftrl\"\nregularizer = \"log_barrier\"\neta = 0.1\nhorizon = 200\n",
    );
    let out = oftrl(&["run", "--config", &cfg, "--out", "z"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let traj = fs::read_to_string(tmp.path().join("z/trajectory.csv")).unwrap();
    let gaps = column(&traj, "gap");
    assert_eq!(gaps.len(), 200);
    assert!(gaps.iter().all(|g| *g == 0.0));
}

#[test]
fn malformed_config_exits_2_without_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cases = [
        OMWU.replace("delta = 0.01", "delta = 0.01\nbogus = 1"),
        OMWU.replace("horizon = 100000", "horizon = -5"),
        OMWU.replace("delta = 0.01", "delta = 0.7"),
        OMWU.replace("\"omwu\"", "\"ogda\"\nregularizer = \"entropy\""),
        OMWU.replace("[outputs]", "[outputs]\ngap_threshold = 0"),
        "not toml at all [".to_string(),
    ];
    for (i, text) in cases.iter().enumerate() {
        let cfg = write_config(tmp.path(), &format!("bad{i}.toml"), text);
        let dir = format!("out{i}");
        let out = oftrl(&["run", "--config", &cfg, "--out", &dir], tmp.path());
        assert_eq!(out.status.code(), Some(2), "case {i}");
        assert!(!tmp.path().join(&dir).exists(), "case {i} left artifacts");
        assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
    }
    let err = oftrl(&["run", "--config", "bad0.toml"], tmp.path());
    assert!(String::from_utf8_lossy(&err.stderr).contains("bogus"));
    assert!(String::from_utf8_lossy(&err.stderr).contains("line"));
}

#[test]
fn usage_errors_exit_2() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(oftrl(&["run"], tmp.path()).status.code(), Some(2));
    assert_eq!(oftrl(&["run", "--config", "missing.toml"], tmp.path()).status.code(), Some(2));
    assert_eq!(oftrl(&["frobnicate"], tmp.path()).status.code(), Some(2));
    assert_eq!(oftrl(&["verify", "nope"], tmp.path()).status.code(), Some(2));
    assert_eq!(oftrl(&["figure1", "--delta", "0.5", "--out", "f"], tmp.path()).status.code(), Some(2));
    assert_eq!(oftrl(&["figure1", "--delta", "0", "--out", "f"], tmp.path()).status.code(), Some(2));
    assert_eq!(oftrl(&["figure1", "--horizon", "entropy=x", "--out", "f"], tmp.path()).status.code(), Some(2));
    assert_eq!(oftrl(&["predict", "--regularizer", "tsallis"], tmp.path()).status.code(), Some(2));
    assert!(!tmp.path().join("f").exists());
}

#[test]
fn help_documents_config_keys() {
    let out = oftrl(&["--help"], Path::new("."));
    let text = String::from_utf8_lossy(&out.stdout);
    for key in ["a_delta", "a_dxdy", "explicit", "record_stride", "gap_threshold", "beta", "[sweep]", "convergence_csv"] {
        assert!(text.contains(key), "--help lacks {key}");
    }
}

#[test]
fn figure1_panels() {
    let tmp = TempDir::new().unwrap();
    let out = oftrl(&["figure1", "--out", "fig", "--threads", "2"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let fig = tmp.path().join("fig");
    let labels = ["ogda", "oftrl_log_barrier", "oftrl_entropy", "oftrl_tsallis_0.5", "oftrl_sq_euclid"];
    for l in labels {
        assert!(fig.join(format!("{l}.csv")).is_file());
        assert!(fig.join(format!("{l}.svg")).is_file());
    }
    let summary: Value = serde_json::from_str(&fs::read_to_string(fig.join("figure1.json")).unwrap()).unwrap();
    let horizons: Vec<u64> = summary["panels"].as_array().unwrap().iter().map(|p| p["horizon"].as_u64().unwrap()).collect();
    assert_eq!(horizons, [10_000, 37_000, 6_000, 6_000, 2_000]);

    let ogda = column(&fs::read_to_string(fig.join("ogda.csv")).unwrap(), "avg_regret");
    assert!(ogda[100..].windows(2).all(|w| w[1] <= w[0]));
    let sq = fs::read_to_string(fig.join("oftrl_sq_euclid.csv")).unwrap();
    assert!(column(&sq, "gap").iter().any(|g| *g >= 0.1));
    assert!(fs::read_to_string(fig.join("oftrl_entropy.svg")).unwrap().contains("class=\"bad\""));
}

#[test]
fn figure1_horizon_override() {
    let tmp = TempDir::new().unwrap();
    let args = [
        "figure1", "--out", "f", "--horizon", "ogda=50", "--horizon", "log_barrier=60", "--horizon", "entropy=70",
        "--horizon", "tsallis=80", "--horizon", "sq_euclid=90",
    ];
    assert!(oftrl(&args, tmp.path()).status.success());
    let csv = fs::read_to_string(tmp.path().join("f/oftrl_entropy.csv")).unwrap();
    assert_eq!(csv.lines().count(), 71);
}

#[test]
fn sweep_writes_one_directory_per_point() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "sweep.toml",
        &format!(
            "{}\n[sweep]\ndelta = [0.05, 0.02]\nregularizer = [\"entropy\", \"sq_euclid\"]\n",
            OMWU.replace("\"omwu\"", "\"oftrl\"").replace("100000", "500").replace("svg = \"regret.svg\"\n", "")
        ),
    );
    let out = oftrl(&["sweep", "--config", &cfg, "--out", "sw", "--threads", "2"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let index = fs::read_to_string(tmp.path().join("sw/sweep.csv")).unwrap();
    assert_eq!(index.lines().count(), 5);
    assert!(index.lines().nth(2).unwrap().contains("oftrl-sq_euclid"));
    for i in 0..4 {
        assert!(tmp.path().join(format!("sw/run_{i:03}/summary.json")).is_file());
    }

    let bad = write_config(tmp.path(), "bad.toml", &fs::read_to_string(tmp.path().join("sweep.toml")).unwrap().replace("0.02]", "0.9]"));
    assert_eq!(oftrl(&["sweep", "--config", &bad, "--out", "sw2"], tmp.path()).status.code(), Some(2));
    assert!(!tmp.path().join("sw2").exists());
}

#[test]
fn predict_reports_block() {
    let tmp = TempDir::new().unwrap();
    let out = oftrl(&["predict", "--delta", "0.01", "--horizon", "8000", "--out", "p"], tmp.path());
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["prediction"]["c1"].as_f64().unwrap() - 0.024979).abs() < 1e-6);
    assert_eq!(v["phases"]["bad_runs"].as_array().unwrap().iter().map(|r| r["end"].as_u64().unwrap() - r["start"].as_u64().unwrap() + 1).max(), Some(2281));
    assert!(tmp.path().join("p/prediction.json").is_file());
}

#[test]
fn verify_suite_prints_checks() {
    let tmp = TempDir::new().unwrap();
    let out = oftrl(&["verify", "reduction", "--out", "v", "--seedless"], tmp.path());
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().any(|l| l.trim_start().starts_with("PASS affine reduction")));
    assert!(tmp.path().join("v/reduction/reduction_affine.csv").is_file());
    assert!(tmp.path().join("v/verify.json").is_file());

    let oracles = oftrl(&["verify", "oracles"], tmp.path());
    assert!(oracles.status.success());
    assert!(!String::from_utf8_lossy(&oracles.stdout).contains("FAIL"));
}
