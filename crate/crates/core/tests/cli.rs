use std::path::Path;
use std::process::{Command, Output};

fn zpf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zpf")).args(args).output().expect("zpf runs")
}

fn experiment(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("experiments").join(name).display().to_string()
}

#[test]
fn run_is_byte_stable_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let common = ["run", "--builtin", "dc", "--seed", "7", "--trials", "20000"];
    let first = zpf(&[&common[..], &["--threads", "1", "--out", a.to_str().unwrap()]].concat());
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let second = zpf(&[&common[..], &["--threads", "3", "--out", b.to_str().unwrap()]].concat());
    assert!(second.status.success());
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    assert!(text.starts_with("# zpf-optics v0.1.0 experiment=dc seed=7 trials=20000\n"));
    assert_eq!(text.lines().nth(1).unwrap(), "theta,phi,numerator,denominator,estimate,ci_lo,ci_hi");
    assert_eq!(text.lines().count(), 2 + 75);
}

#[test]
fn log_sweep_gives_one_witness_row_per_intensity() {
    let out = zpf(&["run", "--builtin", "dw", "--sweep", "alpha2=0.01:100:log25", "--trials", "50000"]);
    // At the bright end both detectors always fire, so some cells never see
    // an exclusive single: every row is still written, then exit code 3.
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(2).unwrap().split(',').all(|v| v != "NaN"));
    assert!(text.lines().last().unwrap().ends_with(",NaN"));
    let header = text.lines().nth(1).unwrap();
    assert!(header.starts_with("alpha2,numerator,denominator,estimate,ci_lo,ci_hi,p_x1_y1,"));
    assert!(header.ends_with(",det_w2"));
    assert_eq!(text.lines().count(), 2 + 25);
    assert!(String::from_utf8(out.stderr).unwrap().contains("|det W2|"));
}

#[test]
fn file_experiment_with_idw_witness() {
    let out = zpf(&["run", "--file", &experiment("dw_idw.zpf"), "--trials", "20000", "--sweep", "alpha2=1.3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let header: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    let idw: f64 = row[header.iter().position(|h| *h == "idw").unwrap()].parse().unwrap();
    assert!((idw - 4.53).abs() < 0.15, "{idw}");
}

#[test]
fn analytic_subjects() {
    let out = zpf(&["analytic", "dw", "--alpha2", "1.3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    let det: f64 = row[6].parse().unwrap();
    assert!((det - 0.95).abs() < 0.01);
    assert_eq!(row[1], "");

    let out = zpf(&["analytic", "marcum", "--a", "0", "--b", "1,2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.zpf");
    std::fs::write(&bad, "experiment \"x\"\nmode a\nsource vacuum -> a\ndetector D on a\ndetector D on a\n").unwrap();
    let out = zpf(&["run", "--file", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("5:"), "position missing");

    let never = dir.path().join("never.zpf");
    std::fs::write(
        &never,
        "experiment \"x\"\nmode a\nsource vacuum -> a\ndetector D on a\ncondition on click(D) & noclick(D)\ntrials 100\n",
    )
    .unwrap();
    assert_eq!(zpf(&["run", "--file", never.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(zpf(&["run"]).status.code(), Some(1));
    assert_eq!(zpf(&["run", "--file", "/nonexistent.zpf"]).status.code(), Some(1));
}
