use std::path::Path;
use std::process::{Command, Output};

fn dac_secrecy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dac-secrecy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn field(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find(|l| l.starts_with(key))
        .and_then(|l| l.split_whitespace().nth(1))
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| panic!("no numeric field {key} in\n{report}"))
}

const PAPER: [&str; 8] = ["--n", "128", "--k", "8", "--m", "16", "--snr-db", "0"];

#[test]
fn analytic_peak_secrecy() {
    let mut args = vec!["analytic"];
    args.extend(PAPER);
    args.extend(["--phi", "0.3452", "--dac-bits", "inf", "--an", "null"]);
    let out = dac_secrecy(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!((field(&stdout(&out), "Rsec") - 1.4788).abs() < 5e-4);
}

#[test]
fn analytic_singular_without_an() {
    let mut args = vec!["analytic"];
    args.extend(PAPER);
    args.extend(["--phi", "1", "--dac-bits", "inf", "--an", "null"]);
    let out = dac_secrecy(&args);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("X singular at phi=1, rho=0"));
}

#[test]
fn invalid_regime_exit_code() {
    let out = dac_secrecy(&["analytic", "--n", "100", "--k", "50", "--m", "60", "--snr-db", "0", "--phi", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("alpha+beta≥1"));
}

#[test]
fn bad_flag_exit_code() {
    assert_eq!(dac_secrecy(&["analytic", "--dac-bits", "9"]).status.code(), Some(2));
    assert_eq!(dac_secrecy(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn threshold_and_optimize_phi() {
    let out = dac_secrecy(&["threshold", "--n", "128", "--k", "8", "--m", "16", "--snr-db", "0", "--phi", "0.8"]);
    assert!(out.status.success());
    assert!((field(&stdout(&out), "snr_thresh_closed") - 5.6838).abs() < 1e-3);

    let mut args = vec!["optimize-phi"];
    args.extend(PAPER);
    args.extend(["--an", "random"]);
    let out = dac_secrecy(&args);
    assert!(out.status.success());
    assert!(stdout(&out).contains("phi=0.388"));
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--n", "32", "--k", "4", "--m", "4", "--snr-db", "5", "--phi", "0.7",
        "--dac-bits", "2", "--trials", "20", "--seed", "4"];
    let a = dac_secrecy(&args);
    let b = dac_secrecy(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn rho_table_output() {
    let out = dac_secrecy(&["rho-table", "--max-bits", "3"]);
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "bits,rho");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("1,0.36338"));
}

#[test]
fn config_file_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# paper setup\nn=128\nk=8\nm=16\nsnr_db=0\nphi=0.3452\n").unwrap();
    let out = dac_secrecy(&["analytic", "--config", cfg.to_str().unwrap(), "--m", "12"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("M=12"));

    std::fs::write(&cfg, "n==5\n").unwrap();
    let out = dac_secrecy(&["analytic", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 1"));

    std::fs::write(&cfg, "n=128\nk=8\nsnr_db=0\n").unwrap();
    let out = dac_secrecy(&["analytic", "--config", cfg.to_str().unwrap()]);
    assert!(stderr(&out).contains("missing required key 'm'"));
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn snr_sweep_monotone_with_fixed_shape() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("snr.csv");
    let out = dac_secrecy(&["sweep", "--n", "128", "--k", "8", "--m", "16", "--phi", "0.8",
        "--param", "snr_db", "--from", "0", "--to", "20", "--step", "1", "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = read_csv(&csv);
    assert_eq!(rows.len(), 22);
    assert!(rows.iter().all(|r| r.len() == 12));
    let rsec: Vec<f64> = rows[1..].iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(rsec.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn phi_sweep_peaks_near_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("phi.csv");
    let mut args = vec!["sweep"];
    args.extend(PAPER);
    args.extend(["--param", "phi", "--from", "0.02", "--to", "1.0", "--step", "0.02", "--out", csv.to_str().unwrap()]);
    let out = dac_secrecy(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = read_csv(&csv);
    assert_eq!(rows.len(), 51);
    let (mut best_phi, mut best) = (0.0f64, f64::NEG_INFINITY);
    for r in &rows[1..] {
        if let Ok(v) = r[4].parse::<f64>() {
            if v > best {
                best = v;
                best_phi = r[1].parse().unwrap();
            }
        }
    }
    assert!(best_phi < 1.0 && (best_phi - 0.3452).abs() <= 0.02);
    // phi=1 with ideal DACs has no finite capacity bound
    assert!(rows.last().unwrap()[11].contains("singular"));
}

#[test]
fn single_point_sweep_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let csv = dir.path().join(name);
        let out = dac_secrecy(&["sweep", "--n", "32", "--k", "4", "--m", "4", "--snr-db", "5",
            "--param", "phi", "--from", "0.6", "--to", "0.6", "--step", "0.1", "--mode", "both",
            "--trials", "10", "--dac-bits", "2", "--full-precision", "--out", csv.to_str().unwrap()]);
        assert!(out.status.success(), "{}", stderr(&out));
        std::fs::read(csv).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().contains(",10,"));
}

#[test]
fn figure_writes_tables_and_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dac_secrecy(&["figure", "--id", "2", "--mode", "analytic", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    for f in ["fig2.csv", "fig2_markers.csv", "fig2.gp"] {
        assert!(dir.path().join(f).exists());
    }
    assert_eq!(dac_secrecy(&["figure", "--id", "1"]).status.code(), Some(2));
}
