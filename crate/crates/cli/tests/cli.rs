use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use secexp_cli::spec::ChannelSpec;
use tempfile::TempDir;

const BSC: &str = r#"{"input_size": 2, "output_size": 2, "W": [[0.89, 0.11], [0.11, 0.89]], "P_X": [0.5, 0.5]}"#;
const FLAT_ROWS: &str = r#"{"input_size": 2, "output_size": 2, "W": [[0.3, 0.7], [0.3, 0.7]], "P_X": [0.5, 0.5]}"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn secexp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_secexp")).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Data rows (non-comment lines after the header) split on commas.
fn table(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn sweep_writes_the_documented_columns() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "bsc.json", BSC);
    let out = secexp(&["sweep", p(&spec), "--r-min", "0.3", "--r-max", "1.0", "--r-steps", "8", "--no-timestamp"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.contains("# spec_sha256: "));
    assert!(!text.contains("# timestamp"));
    let (header, rows) = table(&text);
    assert_eq!(header.join(","), "R,E_iid,E_cc,E_cc_lower,regime_iid,regime_cc");
    assert_eq!(rows.len(), 8);
    let mut last = -1.0;
    for row in &rows {
        let r = num(&row[0]);
        assert!(r > last);
        last = r;
        assert!((num(&row[1]) - num(&row[2])).abs() < 2e-4);
        assert!(num(&row[3]) >= 0.0);
        if r < 0.3466 {
            assert_eq!(row[4], "zero");
        }
    }
}

#[test]
fn bits_divide_by_ln2() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "bsc.json", BSC);
    let run = |units: &str| {
        let out = secexp(&["sweep", p(&spec), "--r-min", "0.5", "--r-max", "0.9", "--r-steps", "2", "--no-timestamp", "--units", units]);
        table(&String::from_utf8(out.stdout).unwrap()).1
    };
    let (nats, bits) = (run("nats"), run("bits"));
    for (a, b) in nats.iter().zip(&bits) {
        for k in 0..4 {
            assert!((num(&a[k]) / std::f64::consts::LN_2 - num(&b[k])).abs() < 1e-12);
        }
    }
}

#[test]
fn zero_capacity_exits_with_code_2() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "flat.json", FLAT_ROWS);
    for args in [
        vec!["sweep", p(&spec), "--r-min", "0", "--r-max", "1"],
        vec!["simulate", p(&spec), "--ensemble", "iid", "--rate", "0.5", "--n", "2,3,4", "--trials", "2"],
        vec!["finite-n", p(&spec), "--ensemble", "iid", "--rate", "0.5", "--n", "4"],
    ] {
        assert_eq!(secexp(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn input_errors_map_to_their_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"input_size": 2, "output_size": 2, "W": [[0.5, 0.6], [0.5, 0.5]], "P_X": [0.5, 0.5]}"#);
    assert_eq!(secexp(&["sweep", p(&bad), "--r-min", "0", "--r-max", "1"]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(secexp(&["sweep", p(&missing), "--r-min", "0", "--r-max", "1"]).status.code(), Some(1));
    let spec = write(&dir, "bsc.json", BSC);
    let budget = secexp(&["simulate", p(&spec), "--ensemble", "iid", "--rate", "0.3", "--n", "17", "--trials", "1"]);
    assert_eq!(budget.status.code(), Some(3));
    let cap = secexp(&["finite-n", p(&spec), "--ensemble", "iid", "--rate", "0.6", "--n", "64", "--budget", "100"]);
    assert_eq!(cap.status.code(), Some(3));
}

#[test]
fn finite_n_iid_gap_closes() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "bsc.json", BSC);
    let out = secexp(&["finite-n", p(&spec), "--ensemble", "iid", "--rate", "0.6", "--n", "4,8,16,32,64", "--no-timestamp"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let (header, rows) = table(&text);
    assert_eq!(header.join(","), "n,E_n,E_asymptotic,gap");
    let last = rows.last().unwrap();
    assert_eq!(last[0], "64");
    assert!(num(&last[3]) < 3e-2 && num(&last[3]) >= 0.0);
    assert!(text.contains("# gap trend: "));
}

#[test]
fn finite_n_cc_notes_the_quantized_composition() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "bac.json", r#"{"input_size": 2, "output_size": 2, "W": [[0.99, 0.01], [0.303, 0.697]], "P_X": [0.42, 0.58]}"#);
    let out = secexp(&["finite-n", p(&spec), "--ensemble", "cc", "--rate", "0.4", "--n", "5", "--no-timestamp"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# n=5: composition [2, 3]"));
    assert!(!text.contains("# gap trend"));
    assert_eq!(table(&text).1.len(), 1);
}

#[test]
fn simulate_is_reproducible_and_reports_the_fit() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "bsc.json", BSC);
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        let out = secexp(&["simulate", p(&spec), "--ensemble", "cc", "--rate", "0.4", "--n", "4,6,8", "--trials", "20", "--seed", "7", "--no-timestamp", "-o", p(path)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(text.contains("# rng: ChaCha8"));
    assert!(text.contains("# fit,slope,intercept,residual_rms,confidence\n"));
    let (header, rows) = table(&text);
    assert_eq!(header.join(","), "n,mean_D,stderr_D,minus_log_mean_D");
    assert_eq!(rows.len(), 3);
}

#[test]
fn binned_simulation_has_a_vanishing_identity_residual() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "z.json", r#"{"input_size": 2, "output_size": 2, "W": [[1.0, 0.0], [0.303, 0.697]], "P_X": [0.36, 0.64]}"#);
    let out = secexp(&["simulate", p(&spec), "--ensemble", "iid", "--rate", "0.2", "--n", "4,6,8", "--trials", "10", "--bins", "4", "--no-timestamp"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = table(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(header[4..].join(","), "mean_leak,max_identity_residual");
    for row in rows {
        assert!(num(&row[5]) < 1e-10);
    }
}

#[test]
fn normalize_round_trips_bit_for_bit() {
    let dir = TempDir::new().unwrap();
    let text = r#"{"input_size": 2, "output_size": 3, "W": [0.1, 0.2, 0.7, 0.3333333333333333, 0.3333333333333333, 0.33333333333333337],
        "P_X": [0.1, 0.9], "prefix": {"P_XU": [[0.2, 0.8], [1, 0]], "P_U": [0.7, 0.3]}}"#;
    let src = write(&dir, "in.json", text);
    let dst = dir.path().join("out.json");
    assert!(secexp(&["spec", "normalize", p(&src), "-o", p(&dst)]).status.success());
    let (a, b) = (ChannelSpec::parse(text).unwrap(), ChannelSpec::read(&dst).unwrap());
    assert_eq!(a.w, b.w);
    assert_eq!(a.p_x, b.p_x);
    assert_eq!(a.prefix, b.prefix);
    // Normalizing again changes nothing.
    assert_eq!(b.normalized(), std::fs::read_to_string(&dst).unwrap());
}

#[test]
fn prefix_is_recorded_in_provenance() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "pre.json", r#"{"input_size": 2, "output_size": 2, "W": [[0.89, 0.11], [0.11, 0.89]], "P_X": [0.5, 0.5],
        "prefix": {"P_XU": [[1, 0], [0, 1], [0.5, 0.5]], "P_U": [0.4, 0.4, 0.2]}}"#);
    let out = secexp(&["sweep", p(&spec), "--r-min", "0.4", "--r-max", "0.6", "--r-steps", "2", "--no-timestamp"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# prefix P_XU: "));
    assert!(text.contains("# effective channel: [[0.89, 0.11], [0.11, 0.89], [0.5, 0.5]]"));
}

#[test]
fn timestamp_is_present_by_default() {
    let dir = TempDir::new().unwrap();
    let spec = write(&dir, "bsc.json", BSC);
    let out = secexp(&["sweep", p(&spec), "--r-min", "0.4", "--r-max", "0.6", "--r-steps", "2"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("# timestamp: "));
}
