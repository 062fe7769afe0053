use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn aidyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aidyn"))
        .args(args)
        .env_remove("AIDYN_TABLE_DIR")
        .output()
        .expect("binary runs")
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

#[test]
fn no_arguments_prints_usage_and_exits_2() {
    let out = aidyn(&[]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stderr).to_string() + &String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Usage"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(aidyn(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(aidyn(&["eca", "--rule", "30", "--bogus"]).status.code(), Some(2));
    assert_eq!(aidyn(&["eca", "--width", "5"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_1() {
    assert_eq!(aidyn(&["eca", "--rule", "256"]).status.code(), Some(1));
    assert_eq!(aidyn(&["bdm", "/nonexistent/file"]).status.code(), Some(1));
}

#[test]
fn eca_single_seed_rule_30() {
    let out = aidyn(&["eca", "--rule", "30", "--width", "7", "--steps", "1", "--init", "single"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "P2\n7 2\n2\n0 0 0 1 0 0 0\n0 0 1 1 1 0 0\n"
    );
}

#[test]
fn ctm_build_two_states() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.tsv");
    let out = aidyn(&["ctm-build", "--n", "2", "--cutoff", "107", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(read(&path).lines().any(|l| l == "#total=10000"));
}

#[test]
fn bdm_reads_digit_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.txt");
    fs::write(&path, "000000000000\n").unwrap();
    let out = aidyn(&["bdm", path.to_str().unwrap(), "--block", "6"]);
    assert!(out.status.success());
    let v: f64 = String::from_utf8(out.stdout).unwrap().trim().parse().unwrap();
    let t = aidyn::CtmTable::shipped();
    assert!((v - (t.lookup("000000").unwrap() + 1.0)).abs() < 1e-6);
}

#[test]
fn sweep_files_are_byte_stable_across_workers() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let base = ["perturb", "--rules", "30,54", "--width", "12", "--steps", "8", "--seeds", "2"];
    for (dir, w) in [(&a, "1"), (&b, "3")] {
        let mut args = base.to_vec();
        args.extend(["--workers", w, "--out", dir.path().to_str().unwrap()]);
        assert!(aidyn(&args).status.success());
    }
    for f in ["sweep.csv", "sweep_mean.csv", "heatmap_delta_bdm.csv", "heatmap_delta_lzw.csv"] {
        assert_eq!(read(&a.path().join(f)), read(&b.path().join(f)), "{f}");
    }
    let sweep = read(&a.path().join("sweep.csv"));
    assert!(sweep.starts_with("# command=perturb\n"));
    assert!(sweep.contains("\nrule,seed,flip_pos,delta_bdm,delta_lzw_bytes,delta_entropy\n"));
    assert_eq!(sweep.lines().filter(|l| !l.starts_with('#')).count(), 1 + 2 * 2 * 12);
    let heat = read(&a.path().join("heatmap_delta_bdm.csv"));
    assert_eq!(heat.lines().filter(|l| !l.starts_with('#')).count(), 3);
}

#[test]
fn single_flip_writes_pgm_pair_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "perturb", "--single", "--rule", "54", "--width", "24", "--steps", "20", "--every", "5", "--out",
        dir.path().to_str().unwrap(),
    ];
    assert!(aidyn(&args).status.success());
    let orig = read(&dir.path().join("unperturbed.pgm"));
    assert!(orig.starts_with("P2\n24 21\n2\n"));
    assert!(dir.path().join("perturbed.pgm").exists());
    let trace = read(&dir.path().join("trace.csv"));
    let rows: Vec<&str> = trace.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "step,delta_bdm");
    assert_eq!(rows.len(), 1 + 5);
}

#[test]
fn collide_writes_csv_and_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "collide", "--gap", "6", "--steps", "10", "--rules", "3", "--dump", "2", "--out",
        dir.path().to_str().unwrap(),
    ];
    assert!(aidyn(&args).status.success());
    let text = read(&dir.path().join("collision.csv"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("30,22,0,"));
    assert!(dir.path().join("collision_1.pgm").exists());
    assert!(!dir.path().join("collision_2.pgm").exists());
    assert!(read(&dir.path().join("isolated_a.pgm")).starts_with("P2\n28 11\n2\n"));
}

#[test]
fn gol_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "gol", "--width", "12", "--height", "12", "--pre-steps", "5", "--post-steps", "4", "--seeds", "2",
        "--block", "2", "--out", dir.path().to_str().unwrap(),
    ];
    let out = aidyn(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(&dir.path().join("gol.csv"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 3);
    assert!(text.contains("# block=2\n"));
}
