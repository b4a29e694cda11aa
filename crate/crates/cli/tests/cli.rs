use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn kipq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kipq")).args(args).output().expect("binary runs")
}

fn scenario(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", name].iter().collect();
    p.display().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn bg_catalog_is_unit_diffusion() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("cat");
    let o = kipq(&["catalog", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("catalog.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let (fi, ft) = (
        header.iter().position(|h| *h == "f").unwrap(),
        header.iter().position(|h| *h == "f_tilde").unwrap(),
    );
    let mut rows = 0;
    for l in lines {
        let cols: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
        assert!((cols[fi] - 1.0).abs() < 1e-15 && (cols[ft] - 1.0).abs() < 1e-15, "{l}");
        rows += 1;
    }
    assert_eq!(rows, 41);
}

#[test]
fn gauge_check_tsallis_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("g");
    let o = kipq(&["gauge-check", "--scenario", &scenario("gauge_tsallis.ini"), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!(m["pass"], true);
    assert!(m["checks"][0]["value"].as_f64().unwrap() < 1e-4);
    assert!(out.join("gauge_check.csv").exists());
}

#[test]
fn tightened_tolerance_is_an_acceptance_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("g");
    let o = kipq(&[
        "gauge-check",
        "--scenario",
        &scenario("gauge_tsallis.ini"),
        "--out",
        out.to_str().unwrap(),
        "--tolerance-scale",
        "1e-12",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(manifest(&out)["exit_code"], 3);
}

#[test]
fn broken_model_names_the_bad_interval() {
    let o = kipq(&["verify", "--scenario", &scenario("broken_eip.ini")]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("not increasing on (2e0, 1e1)"), "{err}");
}

#[test]
fn oversized_dt_is_rejected_with_a_suggestion() {
    let tmp = tempfile::tempdir().unwrap();
    let s = write(tmp.path(), "s.ini", "[integrator]\nkind = nse\ndt = 0.5\nt_end = 1\n");
    let o = kipq(&["nse-evolve", "--scenario", &s]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("suggested dt"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(kipq(&["nfpe-relax"]).status.code(), Some(1));
    let o = kipq(&["nfpe-relax", "--scenario", &scenario("gauge_tsallis.ini")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(kipq(&["verify", "--criteria", "12"]).status.code(), Some(1));
}

#[test]
fn runs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let s = write(
        tmp.path(),
        "n.ini",
        "[model]\nvariant = tsallis\nq = 2\n[grid]\nn = 128\n[physics]\ndiffusion = 1\n[potential]\nkind = harmonic\n\
         [initial]\nkind = equilibrium\nshift = 0.5\n[integrator]\nkind = nfpe\nt_end = 0.2\ncadence = 20\n",
    );
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        assert_eq!(kipq(&["nfpe-relax", "--scenario", &s, "--out", d.to_str().unwrap()]).status.code(), Some(0));
    }
    for f in ["trajectory.csv", "final_density.csv", "scenario.ini"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let (mut ma, mut mb) = (manifest(&a), manifest(&b));
    for m in [&mut ma, &mut mb] {
        let o = m.as_object_mut().unwrap();
        o.remove("started_unix");
        o.remove("finished_unix");
    }
    assert_eq!(ma, mb);
    assert_eq!(ma["scenario_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn verify_records_seed_and_writes_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("v");
    let o = kipq(&["verify", "--criteria", "10,11", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 2);
    let m = manifest(&out);
    assert_eq!(m["seed"], 7);
    assert!(fs::read_to_string(out.join("verify.csv")).unwrap().starts_with("criterion,check"));
}

#[test]
fn nse_evolve_writes_residuals_and_snapshots() {
    let tmp = tempfile::tempdir().unwrap();
    let s = write(
        tmp.path(),
        "e.ini",
        "[physics]\ndiffusion = 0.1\n[potential]\nkind = harmonic\n[initial]\nk = 1\n\
         [integrator]\nkind = nse\nt_end = 0.1\ncadence = 5\n[output]\nsnapshot_every = 100\n",
    );
    let out = tmp.path().join("e");
    let o = kipq(&["nse-evolve", "--scenario", &s, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let traj = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert!(traj.lines().nth(2).unwrap().split(',').nth(5).is_some_and(|c| !c.is_empty()));
    assert!(out.join("snapshot_00000.csv").exists());
    assert!(manifest(&out)["summary"]["r1_rel"].as_f64().unwrap() < 1e-3);
}
