use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn nocollapse() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nocollapse"));
    cmd.env_remove("NOCOLLAPSE_OUT_DIR");
    cmd
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    nocollapse().current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = run_in(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Data rows of a CSV file: comment lines and the header skipped.
fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let text = fs::read_to_string(path).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    let i = header.split(',').position(|c| c == name).unwrap();
    rows(path).iter().map(|r| r[i].parse().unwrap()).collect()
}

fn read_dir_sorted(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = fs::read(&p).unwrap();
            (PathBuf::from(p.file_name().unwrap()), bytes)
        })
        .collect();
    files.sort();
    files
}

fn exact_binomial_over_2_100(n: u32) -> f64 {
    // C(100, n) fits in u128 for every n
    let mut c: u128 = 1;
    for k in 0..n {
        c = c * (100 - k) as u128 / (k + 1) as u128;
    }
    c as f64 / 2f64.powi(100)
}

#[test]
fn record_has_101_rows_matching_the_binomial() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["record", "--trials", "100", "--a2", "0.5"]);
    let path = dir.path().join("out/record.csv");
    let rho = column(&path, "rho");
    assert_eq!(rho.len(), 101);
    for (n, &r) in rho.iter().enumerate() {
        let exact = exact_binomial_over_2_100(n as u32);
        assert!((r / exact - 1.0).abs() <= 1e-12, "n = {n}: {r} vs {exact}");
    }
}

#[test]
fn record_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["record"]);
    let got = fs::read_to_string(dir.path().join("out/record.csv")).unwrap();
    let golden = include_str!("golden/record.csv");
    assert_eq!(got, golden);

    let meta: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/record.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["rows"], 101);
    assert_eq!(meta["N"], 100);
    assert_eq!(meta["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn floats_round_trip_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["record", "--a2", "0.3", "--trials", "40"]);
    let path = dir.path().join("out/record.csv");
    let text = fs::read_to_string(&path).unwrap();
    assert!(!text.contains('\r'));
    let r = column(&path, "r");
    for (n, x) in r.iter().enumerate() {
        assert_eq!(*x, n as f64 / 40.0);
    }
}

#[test]
fn freq_scan_tails_decrease() {
    let dir = tempfile::tempdir().unwrap();
    ok(
        dir.path(),
        &["freq-scan", "--a2", "0.3", "--trials", "1000,10000,100000", "--epsilon", "0.05", "--tables", "false"],
    );
    let path = dir.path().join("out/freq_scan.csv");
    let n = column(&path, "N");
    assert_eq!(n, vec![1e3, 1e4, 1e5]);
    let log_tail = column(&path, "log_tail_mass");
    assert!(log_tail.windows(2).all(|w| w[1] < w[0]), "{log_tail:?}");
    let tail = column(&path, "tail_mass");
    assert!(tail[1] <= 1e-20);
    for total in column(&path, "total") {
        assert!((total - 1.0).abs() <= 1e-10);
    }
}

#[test]
fn freq_scan_writes_tables_with_checksums() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["freq-scan", "--trials", "50,20"]);
    let out = dir.path().join("out");
    for n in [20, 50] {
        let table = out.join(format!("density_N{n}.csv"));
        assert_eq!(rows(&table).len(), n + 1);
        let meta: Value =
            serde_json::from_str(&fs::read_to_string(out.join(format!("density_N{n}.meta.json"))).unwrap()).unwrap();
        assert_eq!(meta["table"], format!("density_N{n}.csv"));
        assert_eq!(meta["spec"]["a2"], 0.3);
        let cumulative = column(&table, "cumulative");
        assert!((cumulative.last().unwrap() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn outputs_are_byte_identical_across_runs_and_threads() {
    let args = [
        "freq-scan",
        "--trials",
        "300,100,200,50",
        "--a2",
        "0.25",
    ];
    let mut snapshots = Vec::new();
    for threads in ["1", "4", "4"] {
        let dir = tempfile::tempdir().unwrap();
        let out = nocollapse()
            .current_dir(dir.path())
            .env("RAYON_NUM_THREADS", threads)
            .args(args)
            .output()
            .unwrap();
        assert!(out.status.success());
        snapshots.push(read_dir_sorted(&dir.path().join("out")));
    }
    assert_eq!(snapshots[0].len(), 9);
    assert_eq!(snapshots[0], snapshots[1]);
    assert_eq!(snapshots[1], snapshots[2]);

    let mut sweeps = Vec::new();
    for threads in ["1", "3"] {
        let dir = tempfile::tempdir().unwrap();
        let out = nocollapse()
            .current_dir(dir.path())
            .env("RAYON_NUM_THREADS", threads)
            .args(["two-slit", "--grid-points", "2001", "--pattern-overlaps", "0.2,0.7"])
            .output()
            .unwrap();
        assert!(out.status.success());
        sweeps.push(read_dir_sorted(&dir.path().join("out")));
    }
    assert_eq!(sweeps[0], sweeps[1]);
}

#[test]
fn two_slit_visibility_equals_overlap() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["two-slit"]);
    let path = dir.path().join("out/visibility.csv");
    let overlap = column(&path, "overlap");
    let visibility = column(&path, "visibility");
    assert_eq!(overlap.len(), 11);
    for (g, v) in overlap.iter().zip(&visibility) {
        assert!((g - v).abs() <= 1e-6, "{g} vs {v}");
    }
    let pattern = dir.path().join("out/pattern_g0.0000000000000000e0.csv");
    let header = fs::read_to_string(&pattern).unwrap();
    assert!(header.contains("\nx,amp1_re,amp1_im,amp2_re,amp2_im,intensity\n"));
    assert_eq!(rows(&pattern).len(), 10_001);
}

#[test]
fn state_round_trips_through_readoff_and_branch() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["state", "--a2", "0.3", "--trials", "3", "--phase", "0.4"]);
    let state: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/state.json")).unwrap()).unwrap();
    assert_eq!(state["dims"], serde_json::json!([2, 2, 2]));
    assert_eq!(state["amps"].as_array().unwrap().len(), 8);

    // a bare copy without the config echo reads the same
    let bare = serde_json::json!({"dims": state["dims"], "amps": state["amps"]});
    fs::write(dir.path().join("bare.json"), bare.to_string()).unwrap();

    for file in ["out/state.json", "bare.json"] {
        ok(
            dir.path(),
            &["readoff", "--source", "state", "--state", file, "--variable", "factor", "--factor", "2", "--out-dir", "r"],
        );
        let mass = column(&dir.path().join("r/marginal.csv"), "mass");
        assert!((mass[0] - 0.3).abs() <= 1e-12 && (mass[1] - 0.7).abs() <= 1e-12);
        let result: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("r/readoff.json")).unwrap()).unwrap();
        assert_eq!(result["kind"], "Indeterminate");
        assert_eq!(result["tolerance_used"], 1e-8);
    }

    ok(dir.path(), &["branch", "--state", "out/state.json", "--pointer-factor", "1", "--env-overlap", "0.5", "--env-factors", "3"]);
    let b: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/branch.json")).unwrap()).unwrap();
    let weights: Vec<f64> = b["branches"].as_array().unwrap().iter().map(|x| x["weight"].as_f64().unwrap()).collect();
    assert!((weights[0] - 0.3).abs() <= 1e-12 && (weights[1] - 0.7).abs() <= 1e-12);
    assert!((b["total_weight"].as_f64().unwrap() - 1.0).abs() <= 1e-10);
    assert!((b["cross_overlaps"][0][1][0].as_f64().unwrap() - 0.125).abs() <= 1e-15);
    assert_eq!(b["cross_overlaps"][1][1], serde_json::json!([1.0, 0.0]));
}

#[test]
fn readoff_of_binned_frequencies_is_determined() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["readoff", "--cell-width", "0.05", "--trials", "100000", "--a2", "0.3", "--tolerance", "1e-8"]);
    let result: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/readoff.json")).unwrap()).unwrap();
    assert_eq!(result["kind"], "Determined");
    assert_eq!(result["value"], 6);
    let marginal = dir.path().join("out/marginal.csv");
    let header = fs::read_to_string(&marginal).unwrap();
    assert!(header.contains("\nq_label,mass,fraction\n"));
}

#[test]
fn oracle_agrees_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["oracle"]);
    let diffs = column(&dir.path().join("out/oracle.csv"), "abs_diff");
    assert_eq!(diffs.len(), 4 * (3 + 5 + 9 + 13 + 17));
    assert!(diffs.iter().all(|&d| d <= 1e-12));
}

#[test]
fn cat_report_totals_agree() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["cat", "--a2", "0.3", "--phase", "1.1"]);
    let r: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/cat.json")).unwrap()).unwrap();
    for probe in ["decayed_alive", "rotated"] {
        let p = &r["probes"][probe];
        for i in 0..2 {
            let s = p["standard_total"][i].as_f64().unwrap();
            let w = p["rewritten_total"][i].as_f64().unwrap();
            assert!((s - w).abs() <= 1e-12);
        }
    }
    assert_eq!(r["probes"]["decayed_alive"]["standard_terms"], serde_json::json!([[0.0, 0.0], [0.0, 0.0]]));
}

#[test]
fn json_format_tables() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["suppress", "--factors", "5", "--format", "json"]);
    let t: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/suppress.json")).unwrap()).unwrap();
    assert_eq!(t["columns"][0], "m");
    assert_eq!(t["rows"].as_array().unwrap().len(), 6);
    assert_eq!(t["config"]["params"]["factors"], 5);
    assert_eq!(t["rows"][4][4], "ambiguous");
}

#[test]
fn config_file_flags_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("exp.toml"),
        "experiment = \"record\"\nout_dir = \"from-file\"\n\n[params]\na2 = 0.4\ntrials = 10\n",
    )
    .unwrap();
    ok(dir.path(), &["run", "--config", "exp.toml"]);
    assert_eq!(rows(&dir.path().join("from-file/record.csv")).len(), 11);

    // flag beats file
    ok(dir.path(), &["record", "--config", "exp.toml", "--trials", "12"]);
    let text = fs::read_to_string(dir.path().join("from-file/record.csv")).unwrap();
    assert!(text.contains("\"a2\":0.4"));
    assert_eq!(rows(&dir.path().join("from-file/record.csv")).len(), 13);

    // environment beats file, flag beats environment
    let out = nocollapse()
        .current_dir(dir.path())
        .env("NOCOLLAPSE_OUT_DIR", "from-env")
        .args(["run", "--config", "exp.toml"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("from-env/record.csv").exists());
    let out = nocollapse()
        .current_dir(dir.path())
        .env("NOCOLLAPSE_OUT_DIR", "from-env")
        .args(["run", "--config", "exp.toml", "--out-dir", "from-flag"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("from-flag/record.csv").exists());
}

fn error_of(out: &Output) -> Value {
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    serde_json::from_str(stderr.trim()).unwrap_or_else(|_| panic!("stderr is not JSON: {stderr}"))
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("typo.toml"), "experiment = \"record\"\n[params]\ntrails = 10\n").unwrap();
    fs::write(dir.path().join("top.toml"), "experiment = \"record\"\ncolour = \"red\"\n").unwrap();
    fs::write(dir.path().join("broken.toml"), "experiment = \n").unwrap();
    fs::write(dir.path().join("nope.toml"), "experiment = \"nope\"\n").unwrap();
    fs::write(dir.path().join("cat.toml"), "experiment = \"cat\"\n").unwrap();
    let cases: [&[&str]; 8] = [
        &["run", "--config", "typo.toml"],
        &["run", "--config", "top.toml"],
        &["run", "--config", "broken.toml"],
        &["run", "--config", "nope.toml"],
        &["run", "--config", "missing.toml"],
        &["record", "--config", "cat.toml"],
        &["record", "--trials", "ten"],
        &["readoff", "--source", "state"],
    ];
    for args in cases {
        let out = run_in(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let e = error_of(&out);
        assert_eq!(e["error"], "config");
        assert_eq!(e["code"], 2);
    }
    assert!(!dir.path().join("out").exists());
}

#[test]
fn precondition_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 6] = [
        &["record", "--a2", "1.5"],
        &["record", "--trials", "0"],
        &["freq-scan", "--epsilon", "0"],
        &["gauss-compare", "--a2", "1"],
        &["two-slit", "--overlaps", "1.2"],
        &["pnorm", "--weights", "0"],
    ];
    for args in cases {
        let out = run_in(dir.path(), args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        assert_eq!(error_of(&out)["error"], "precondition");
    }
    // nothing is written when validation fails
    assert!(!dir.path().join("out").exists());
}

#[test]
fn capacity_errors_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["state", "--trials", "25"][..], &["oracle", "--trials", "30"][..]] {
        let out = run_in(dir.path(), args);
        assert_eq!(out.status.code(), Some(4), "{args:?}");
        assert_eq!(error_of(&out)["error"], "capacity");
    }
}

#[test]
fn help_and_version_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["--version"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains(env!("CARGO_PKG_VERSION")));
    assert!(run_in(dir.path(), &["freq-scan", "--help"]).status.success());
}

#[test]
fn rotated_amplitude_and_pnorm_tables_on_request() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["two-slit", "--grid-points", "401", "--width", "0.3", "--rotated", "true"]);
    let path = dir.path().join("out/rotated.csv");
    let x = column(&path, "x");
    let rotated = column(&path, "rotated_intensity");
    let sum = column(&path, "sum_intensity");
    let mid = x.len() / 2;
    assert_eq!(x[mid], 0.0);
    assert!(rotated[mid] <= 1e-30);
    // the two combinations share the single-slit intensities between them
    let pattern = dir.path().join("out/pattern_g1.0000000000000000e0.csv");
    let (a1r, a1i, a2r, a2i) = (
        column(&pattern, "amp1_re"),
        column(&pattern, "amp1_im"),
        column(&pattern, "amp2_re"),
        column(&pattern, "amp2_im"),
    );
    for i in 0..x.len() {
        let singles = a1r[i] * a1r[i] + a1i[i] * a1i[i] + a2r[i] * a2r[i] + a2i[i] * a2i[i];
        assert!((rotated[i] + sum[i] - 2.0 * singles).abs() <= 1e-12 * (1.0 + singles));
    }

    ok(dir.path(), &["pnorm", "--trials", "50", "--tables", "true"]);
    let tables = fs::read_dir(dir.path().join("out"))
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("pnorm_p"))
        .count();
    assert_eq!(tables, 6);
    let t = dir.path().join("out/pnorm_p4.0000000000000000e0_w5.9999999999999998e-1.csv");
    assert_eq!(rows(&t).len(), 51);
}
