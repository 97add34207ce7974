use std::path::Path;
use std::process::{Command, Output};

fn sss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sss"))
        .args(args)
        .env_remove("SSS_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).expect("output file")
}

#[test]
fn alpha_rows_match_known_values() {
    let out = sss(&["alpha", "--dim", "1", "--max-k", "2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,sign,alpha,beta,residual,ident_check,bracket_lo,bracket_hi"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    let find = |k: &str, sign: &str| -> f64 {
        let row = rows.iter().find(|r| r[0] == k && r[1] == sign).unwrap();
        row[2].parse().unwrap()
    };
    assert!((find("1", "plus") - 2.3970745860689089).abs() < 1e-9);
    assert!((find("1", "minus") - 1.7142661389626594).abs() < 1e-9);
    assert!((find("2", "minus") - 4.7075413270109925).abs() < 1e-9);
}

#[test]
fn csv_output_is_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<u8>> = ["1", "4"]
        .iter()
        .enumerate()
        .map(|(i, threads)| {
            let path = dir.path().join(format!("alpha{i}.csv"));
            let p = path.to_str().unwrap();
            let out = sss(&["alpha", "--max-k", "3", "--dim", "2", "--threads", threads, "--out", p]);
            assert_eq!(code(&out), 0);
            read(&path)
        })
        .collect();
    assert_eq!(runs[0], runs[1]);

    let a = sss(&["profile", "--alpha", "3.1", "--sign", "minus", "--points", "300"]);
    let b = sss(&["profile", "--alpha", "3.1", "--sign", "minus", "--points", "300"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sweep_writes_curves_and_companions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let p = path.to_str().unwrap();
    let out = sss(&["sweep", "--s-range", "0.8:3:12", "--out", p]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let curves = String::from_utf8(read(&path)).unwrap();
    assert_eq!(curves.lines().count(), 13);
    assert!(dir.path().join("sweep_intersections.csv").exists());
    assert!(dir.path().join("sweep_heat_dots.csv").exists());
}

#[test]
fn config_file_and_thread_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# tighter event location\nevent_tol = 1e-13\nthreads = 2\n").unwrap();
    let c = cfg.to_str().unwrap();
    let out = sss(&["alpha", "--config", c, "--k", "1", "--sign", "plus"]);
    assert_eq!(code(&out), 0);

    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let out = sss(&["alpha", "--config", c, "--k", "1", "--sign", "plus"]);
    assert_eq!(code(&out), 2);

    let out = Command::new(env!("CARGO_BIN_EXE_sss"))
        .args(["alpha", "--k", "1", "--sign", "plus"])
        .env("SSS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_sss"))
        .args(["alpha", "--k", "1", "--sign", "plus", "--threads", "1"])
        .env("SSS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn exit_codes_follow_contract() {
    assert_eq!(code(&sss(&["alpha"])), 2);
    assert_eq!(code(&sss(&["frobnicate"])), 2);
    assert_eq!(code(&sss(&["alpha", "--k", "0", "--sign", "plus"])), 2);
    assert_eq!(code(&sss(&["profile", "--alpha", "-1"])), 2);
    assert_eq!(code(&sss(&["verify", "--suite", "nonsense"])), 2);
    let out = sss(&["verify", "--suite", "ode", "--dim", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("summary ") && l.ends_with("status=PASS")));
}

#[test]
fn appell_dual_starts_at_one() {
    let out = sss(&["appell", "--alpha", "2", "--sign", "plus"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "r,f,psi,g");
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((first[3] - 1.0).abs() < 1e-6, "{first:?}");
}
