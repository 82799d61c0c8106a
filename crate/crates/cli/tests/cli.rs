use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_local-racing"))
}

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn exec(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn gen_track(dir: &Path, kind: &str) -> PathBuf {
    let out = dir.join(format!("{kind}.json"));
    let o = exec(bin().args(["gen-track", "--kind", kind, "--seed", "0", "--out"]).arg(&out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn gen_track_writes_a_track_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen_track(dir.path(), "paper_like");
    let text = std::fs::read_to_string(path).unwrap();
    assert!(local_racing::sim::Track::from_json(&text).is_ok());
}

#[test]
fn gen_track_rejects_unknown_kind() {
    let dir = tempfile::tempdir().unwrap();
    let o = exec(bin().args(["gen-track", "--kind", "spiral", "--out"]).arg(dir.path().join("t.json")));
    assert!(!o.status.success());
}

#[test]
fn completed_run_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let track = gen_track(dir.path(), "corridor");
    let o = exec(bin().args(["run", "--laps", "1", "--track"]).arg(&track).arg("--config").arg(configs().join("base.cfg")));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("lap 1:"));
}

#[test]
fn collision_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let track = gen_track(dir.path(), "paper_like");
    let cfg = dir.path().join("blind.cfg");
    let base = std::fs::read_to_string(configs().join("base.cfg")).unwrap();
    let blind: String = base
        .lines()
        .map(|l| match l.split('=').next().map(str::trim) {
            Some(key @ ("k_ang" | "k_dist")) => format!("{key} = 0.0"),
            _ => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(&cfg, blind).unwrap();
    let o = exec(bin().args(["run", "--laps", "1", "--track"]).arg(&track).arg("--config").arg(&cfg));
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn malformed_track_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let track = dir.path().join("bad.json");
    std::fs::write(&track, "{ not json").unwrap();
    let o = exec(bin().args(["run", "--track"]).arg(&track).arg("--config").arg(configs().join("base.cfg")));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
}

#[test]
fn unknown_sweep_key_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let track = gen_track(dir.path(), "corridor");
    let grid = dir.path().join("bad.grid");
    std::fs::write(&grid, "k_bogus=1\n").unwrap();
    let o = exec(
        bin()
            .args(["sweep", "--laps", "1", "--track"])
            .arg(&track)
            .arg("--config")
            .arg(configs().join("base.cfg"))
            .arg("--grid")
            .arg(&grid)
            .arg("--out")
            .arg(dir.path().join("out.csv")),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k_bogus"));
}

#[test]
fn sweep_writes_one_row_per_setting() {
    let dir = tempfile::tempdir().unwrap();
    let track = gen_track(dir.path(), "corridor");
    let grid = dir.path().join("look.grid");
    std::fs::write(&grid, "L_max=0.2\nL_max=0.4\n").unwrap();
    let out = dir.path().join("out.csv");
    let o = exec(
        bin()
            .args(["sweep", "--laps", "1", "--parallel", "--track"])
            .arg(&track)
            .arg("--config")
            .arg(configs().join("base.cfg"))
            .arg("--grid")
            .arg(&grid)
            .arg("--out")
            .arg(&out),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out).unwrap();
    assert_eq!(csv.lines().count(), 3, "{csv}");
}

#[test]
fn traces_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let track = gen_track(dir.path(), "slalom");
    let trace = |name: &str| {
        let path = dir.path().join(name);
        let o = exec(
            bin()
                .args(["run", "--laps", "1", "--seed", "7", "--track"])
                .arg(&track)
                .arg("--config")
                .arg(configs().join("optimal.cfg"))
                .arg("--trace")
                .arg(&path),
        );
        assert!(o.status.code().is_some());
        std::fs::read(path).unwrap()
    };
    let a = trace("a.csv");
    assert!(!a.is_empty());
    assert_eq!(a, trace("b.csv"));
}

#[test]
fn logged_scans_replay_through_plan_debug() {
    let dir = tempfile::tempdir().unwrap();
    let track = gen_track(dir.path(), "corridor");
    let scans = dir.path().join("scans");
    let o = exec(
        bin()
            .args(["run", "--laps", "1", "--scan-every", "80", "--track"])
            .arg(&track)
            .arg("--config")
            .arg(configs().join("base.cfg"))
            .arg("--scan-log")
            .arg(&scans),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("debug");
    let o = exec(bin().args(["plan-debug", "--scan-log"]).arg(&scans).arg("--out").arg(&out));
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("planned "));
    assert!(std::fs::read_dir(&out).unwrap().next().is_some());
}
