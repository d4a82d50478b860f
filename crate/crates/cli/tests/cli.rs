use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_predrobust"));
    cmd.env_remove("PREDROBUST_WORKERS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn predrobust")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn simulate(dir: &TempDir, name: &str, extra: &[&str]) -> std::path::PathBuf {
    let path = dir.path().join(name);
    let mut args = vec!["simulate", "--out", p(&path)];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    path
}

#[test]
fn simulate_matches_golden_file() {
    let dir = TempDir::new().unwrap();
    let path = simulate(&dir, "a.csv", &["--model", "cnst", "--T", "20", "--seed", "7"]);
    let golden = include_str!("golden/simulate_cnst_T20_seed7.csv");
    assert_eq!(fs::read_to_string(path).unwrap(), golden);
}

#[test]
fn simulate_is_byte_identical_for_same_seed() {
    let dir = TempDir::new().unwrap();
    for model in [["--model", "garch", "--T", "240"], ["--model", "rs", "--years", "5"]] {
        let mut flags = model.to_vec();
        flags.extend(["--kappa", "5", "--beta", "2", "--seed", "11"]);
        let a = fs::read(simulate(&dir, "a.csv", &flags)).unwrap();
        let b = fs::read(simulate(&dir, "b.csv", &flags)).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with(b"t,y,x,true_vol\n"));
    }
}

#[test]
fn simulate_prints_break_smoke_check() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("sb.csv");
    let out = run(&[
        "simulate", "--model", "sb", "--sigma0", "1", "--sigma1", "4", "--T", "600", "--seed", "3", "--out",
        p(&path),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let line = text.lines().find(|l| l.starts_with("smoke check")).expect("smoke line");
    assert!(line.contains("true volatility 16.00"), "{line}");
    let ratio: f64 = line.split('=').nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!((10.0..26.0).contains(&ratio), "{ratio}");
}

#[test]
fn simulate_usage_errors_exit_64() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("x.csv");
    let out = p(&out_path);
    for args in [
        vec!["simulate", "--T", "60", "--out", out],
        vec!["simulate", "--model", "cnst", "--out", out],
        vec!["simulate", "--model", "cnst", "--T", "60"],
        vec!["simulate", "--model", "rs", "--T", "60", "--out", out],
        vec!["simulate", "--model", "nope", "--T", "60", "--out", out],
        vec!["simulate", "--model", "cnst", "--T", "60", "--out", out, "--bogus"],
        vec![],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 64, "{args:?}: {}", stderr(&o));
    }
    assert!(!out_path.exists());
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["test", "--help"])), 0);
}

#[test]
fn test_command_reports_all_methods() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "d.csv", &["--model", "cnst", "--T", "240", "--seed", "5"]);
    let out = run(&["test", p(&data), "--method", "tau,ols,nonlinear,oracle"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("# resolved configuration\ncommand = test\n"));
    for m in ["tau_sigma_hat", "ols_t", "tau_nonlinear_iv", "tau_oracle"] {
        assert!(text.lines().any(|l| l.starts_with(m)), "{m} missing:\n{text}");
    }
    assert!(text.contains("rej@0.05"));
}

#[test]
fn bandwidth_rate_is_reported() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "d.csv", &["--model", "cnst", "--T", "600", "--seed", "1"]);
    let out = run(&["test", p(&data), "--bandwidth-rate", "1", "0.333"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let line = text.lines().find(|l| l.starts_with("bandwidth h = ")).unwrap();
    let h: f64 = line["bandwidth h = ".len()..].split_whitespace().next().unwrap().parse().unwrap();
    assert!((h - 600f64.powf(-0.333)).abs() < 1e-3, "{h}");
    assert!((h - 0.119).abs() < 1e-3);
}

#[test]
fn three_rows_is_too_short() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("short.csv");
    fs::write(&path, "y,x\n0.1,1\n0.2,2\n-0.3,1.5\n").unwrap();
    let out = run(&["test", p(&path)]);
    assert_eq!(code(&out), 1);
    let err = stderr(&out);
    assert!(err.starts_with("error: too short"), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn input_errors_are_one_line() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.csv");
    let out = run(&["test", p(&missing)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).starts_with("error: file not found"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "date,y,x\nd1,0.1,1\nd2,abc,2\nd3,0.3,1\n").unwrap();
    let out = run(&["test", p(&bad)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let no_x = dir.path().join("nox.csv");
    fs::write(&no_x, "y,z\n1,2\n").unwrap();
    let out = run(&["test", p(&no_x)]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line 1"));

    let flat = dir.path().join("flat.csv");
    let body: String = (0..50).map(|i| format!("{},0\n", (i as f64 * 0.7).sin())).collect();
    fs::write(&flat, format!("y,x\n{body}")).unwrap();
    let out = run(&["test", p(&flat), "--demean", "none"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).starts_with("error: degenerate input"), "{}", stderr(&out));
}

#[test]
fn extra_columns_are_ignored() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "d.csv", &["--model", "cnst", "--T", "120", "--seed", "2"]);
    let text = fs::read_to_string(&data).unwrap();
    let swapped: String = text
        .lines()
        .map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            format!("{},note,{},{}\n", c[2], c[1], c[0])
        })
        .collect();
    let other = dir.path().join("swapped.csv");
    fs::write(&other, swapped.replacen("note", "comment", 1)).unwrap();
    let table = |path: &Path| {
        let out = run(&["test", p(path), "--method", "tau"]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        stdout(&out).lines().filter(|l| l.starts_with("tau_sigma_hat")).collect::<String>()
    };
    assert_eq!(table(&data), table(&other));
}

#[test]
fn gate_exit_code() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "alt.csv", &["--model", "cnst", "--T", "600", "--beta", "60", "--seed", "4"]);
    assert_eq!(code(&run(&["test", p(&data)])), 0);
    let out = run(&["test", p(&data), "--gate"]);
    assert_eq!(code(&out), 2, "{}", stdout(&out));
    assert!(stdout(&out).contains("tau_sigma_hat rejects"));
}

#[test]
fn diagnostics_csv() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "d.csv", &["--model", "sb", "--T", "100", "--seed", "9"]);
    let diag = dir.path().join("vol.csv");
    let out = run(&["test", p(&data), "--diagnostics", p(&diag)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = fs::read_to_string(diag).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("row,r,sigma_hat"));
    // 100 pairs, one dropped by recursive demeaning
    assert_eq!(lines.clone().count(), 99);
    assert!(lines.next().unwrap().starts_with("2,"));
}

#[test]
fn config_file_precedence() {
    let dir = TempDir::new().unwrap();
    let data = simulate(&dir, "d.csv", &["--model", "cnst", "--T", "120", "--seed", "2"]);
    let cfg = dir.path().join("cfg.toml");
    fs::write(&cfg, "[test]\nkernel = \"uniform\"\nlevels = [0.05]\n").unwrap();
    let from_file = stdout(&run(&["test", p(&data), "--config", p(&cfg)]));
    assert!(from_file.contains("kernel = uniform\n"));
    assert!(from_file.contains("levels = 0.05\n"));
    let flag = stdout(&run(&["test", p(&data), "--config", p(&cfg), "--kernel", "quartic"]));
    assert!(flag.contains("kernel = quartic\n"));
    let default = stdout(&run(&["test", p(&data)]));
    assert!(default.contains("kernel = half-epanechnikov\n"));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[test]\nkernal = \"uniform\"\n").unwrap();
    assert_eq!(code(&run(&["test", p(&data), "--config", p(&bad)])), 64);
}

#[test]
fn seed_and_workers_are_echoed() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("o");
    let out = bin()
        .args(["reproduce", "--table", "2", "--reps", "100", "--only", "CNST", "--out-dir", p(&out_dir)])
        .env("PREDROBUST_WORKERS", "3")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("workers = 3\n"));
    assert!(text.contains("chosen from entropy"));

    let path = dir.path().join("s.csv");
    let text = stdout(&run(&["simulate", "--model", "cnst", "--T", "30", "--out", p(&path)]));
    assert!(text.contains("chosen from entropy"));
}

#[test]
fn reproduce_reps_usage_errors() {
    for reps in ["0", "50"] {
        assert_eq!(code(&run(&["reproduce", "--table", "2", "--reps", reps])), 64);
    }
    assert_eq!(code(&run(&["reproduce", "--table", "3"])), 64);
    assert_eq!(code(&run(&["reproduce"])), 64);
    assert_eq!(
        code(&run(&["reproduce", "--power", "--model", "cnst", "--T", "600", "--reps", "500"])),
        64
    );
}

#[test]
fn reproduce_table_outputs() {
    let dir = TempDir::new().unwrap();
    let args = |d: &Path| {
        run(&[
            "reproduce", "--table", "2", "--reps", "100", "--seed", "1", "--only", "CNST,ARCH(0.5773)",
            "--workers", "2", "--out-dir", p(d),
        ])
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert_eq!(code(&args(&a)), 0);
    assert_eq!(code(&args(&b)), 0);
    let csv = fs::read_to_string(a.join("table2_size.csv")).unwrap();
    assert_eq!(csv, fs::read_to_string(b.join("table2_size.csv")).unwrap());
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("model,method,kappa,T,level,reject_pct,mc_se,reps,seed"));
    // 2 models x 3 kappas x 3 sizes x 2 methods x 3 levels
    assert_eq!(lines.clone().count(), 108);
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 9, "{line}");
        let rate = cols[5];
        assert_eq!(rate.split('.').nth(1).map(str::len), Some(4), "{line}");
    }
    let md = fs::read_to_string(a.join("table2_report.md")).unwrap();
    assert!(md.contains("| model | method | kappa | T | reference | ours | abs diff | MC SE |"));
    assert!(md.contains("| CNST | tau_sigma_hat | 0 | 60 | 5.5 |"));
}

#[test]
fn reproduce_power_curve() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "reproduce", "--power", "--model", "cnst", "--kappa", "0", "--T", "600", "--reps", "1000", "--seed", "1",
        "--svg", "--out-dir", p(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("power_cnst_k0_T600.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("model,method,kappa,T,beta_bar,level,reject_pct,mc_se,critical_value,reps,seed")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    let tau5: Vec<&Vec<&str>> = rows.iter().filter(|r| r[1] == "tau_sigma_hat" && r[5] == "0.05").collect();
    assert_eq!(tau5.len(), 11);
    assert_eq!(tau5[0][4], "0");
    assert_eq!(tau5[0][6], "5.0000");
    assert!(fs::read_to_string(dir.path().join("power_cnst_k0_T600.svg")).unwrap().starts_with("<svg"));
}
