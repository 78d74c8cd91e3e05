use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

struct Run {
    code: i32,
    dir: tempfile::TempDir,
}

impl Run {
    fn report(&self) -> Value {
        let s = std::fs::read_to_string(self.dir.path().join("report.json")).unwrap();
        serde_json::from_str(&s).unwrap()
    }

    fn report_text(&self) -> String {
        std::fs::read_to_string(self.dir.path().join("report.json")).unwrap()
    }

    fn has(&self, name: &str) -> bool {
        self.dir.path().join(name).exists()
    }
}

fn run(cmd: &str, config: &str, extra: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_euler-relax"))
        .arg(cmd)
        .arg("--config")
        .arg(fixture(config))
        .arg("--out")
        .arg(dir.path())
        .args(extra)
        .output()
        .unwrap();
    Run { code: status.status.code().unwrap(), dir }
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

#[test]
fn symbols_default_passes_and_is_byte_stable() {
    let a = run("symbols", "symbols_default.json", &[]);
    assert_eq!(a.code, 0);
    assert!(a.has("symbols.csv") && a.has("timings.json"));
    let b = run("symbols", "symbols_default.json", &[]);
    assert_eq!(a.report_text(), b.report_text());
    assert_eq!(a.report()["data"]["directions"], 10_000);
}

#[test]
fn symbols_unstable_tolerance_is_flagged() {
    let r = run("symbols", "symbols_unstable.json", &[]);
    assert_eq!(r.code, 1);
    let rep = r.report();
    let c = check(&rep, "rank_tolerance");
    assert_eq!(c["pass"], false);
    assert!(c["detail"].as_str().unwrap().contains("machine precision"));
}

#[test]
fn config_errors_exit_two() {
    assert_eq!(run("symbols", "symbols_zero_samples.json", &[]).code, 2);
    assert_eq!(run("symbols", "symbols_unknown_key.json", &[]).code, 2);
    assert_eq!(run("symbols", "does_not_exist.json", &[]).code, 2);
    assert_eq!(run("shear", "symbols_default.json", &[]).code, 2);
}

#[test]
fn solve_fixtures() {
    let r = run("solve", "solve_roundtrip.json", &["--seed", "7"]);
    assert_eq!(r.code, 0);
    let rep = r.report();
    assert!(check(&rep, "potential_residual")["value"].as_f64().unwrap() <= 1e-8);
    assert!(r.has("potential.bin") && r.has("potential.bin.json") && r.has("residual_slice.csv"));
    let again = run("solve", "solve_roundtrip.json", &["--seed", "7"]);
    assert_eq!(r.report_text(), again.report_text());

    let c = run("solve", "solve_constant.json", &[]);
    assert_eq!(c.code, 3);
    assert!(c.report()["data"]["error"].as_str().unwrap().contains("mean"));

    assert_eq!(run("solve", "solve_shear.json", &[]).code, 0);
}

#[test]
fn solve_reads_written_field() {
    let first = run("solve", "solve_roundtrip.json", &[]);
    let dir = first.dir.path();
    // solve B_E of the written potential again from disk
    let w = euler_relax::torus::io::read_field(&dir.join("potential.bin")).unwrap();
    let z = euler_relax::torus::apply_potential_operator(&w).unwrap();
    euler_relax::torus::io::write_field(&dir.join("z.bin"), &z).unwrap();
    let cfg = dir.join("solve_file.json");
    std::fs::write(&cfg, r#"{"input": {"kind": "file", "path": "z.bin"}}"#).unwrap();
    let out = tempfile::tempdir().unwrap();
    let code = euler_relax::cli::run([
        "euler-relax",
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
}

#[test]
fn shear_fixtures() {
    for f in ["shear_smooth.json", "shear_discontinuous.json", "shear_degenerate.json"] {
        let r = run("shear", f, &[]);
        assert_eq!(r.code, 0, "{f}");
        assert!(r.has("shear_profiles.csv"));
    }
    let rep = run("shear", "shear_degenerate.json", &[]).report();
    assert_eq!(rep["data"]["degenerate"], true);
    let wc = check(&rep, "wave_cone_distance");
    assert!(wc["detail"].as_str().unwrap().starts_with("skipped"));
}

#[test]
fn laminate_fixtures() {
    let r = run("laminate", "laminate_sweep.json", &[]);
    assert_eq!(r.code, 0);
    assert!(r.has("laminate_convergence.csv") && r.has("jensen.csv"));
    assert_eq!(run("laminate", "laminate_symmetric.json", &[]).code, 0);
    let bad = run("laminate", "laminate_not_wave_cone.json", &[]);
    assert_eq!(bad.code, 3);
}

#[test]
fn hausdorff_fixtures() {
    let r = run("hausdorff", "hausdorff_cube.json", &[]);
    assert_eq!(r.code, 0);
    let rep = r.report();
    let slope = rep["data"]["cases"]["cube"]["empirical_slope"].as_f64().unwrap();
    assert!((slope - 1.0).abs() < 1e-12);
    assert_eq!(run("hausdorff", "hausdorff_octahedron.json", &[]).code, 0);
    assert_eq!(run("hausdorff", "hausdorff_empty_slice.json", &[]).code, 3);
}
