use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use spinarrival::csv_out::{read_rows, HEADER};
use spinarrival::config::{resolve, Overrides, Preset, SweepSpec};
use spinarrival::sweep::{run_sweep, Status};
use spinarrival::validate::{run_with, ClosedForm, Tier};
use spinarrival_core::{CurrentSample, CurrentSource, Packet, SpaceTimePoint};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spinarrival"));
    c.env_remove("SPINARRIVAL_OUT_DIR");
    c
}

fn ok(out: Output) -> Output {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn sweep_to(path: &Path, extra: &[&str]) -> String {
    ok(bin().arg("sweep").args(extra).arg("--out").arg(path).output().unwrap());
    fs::read_to_string(path).unwrap()
}

#[test]
fn minimal_sweep_has_exactly_two_rows_and_the_fixed_header() {
    let dir = tempfile::tempdir().unwrap();
    let text = sweep_to(&dir.path().join("s.csv"), &["--preset", "fig1", "--n-points", "2"]);
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0], HEADER.join(","));
    assert!(lines[1].starts_with("5.00000000000e-1,,,2.1"), "{}", lines[1]);
    assert!(lines[2].starts_with("1.00000000000e1,,,"));
    for l in &lines[1..] {
        assert_eq!(l.split(',').count(), 9);
        assert!(l.ends_with(",OK"));
    }
}

#[test]
fn presets_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for preset in ["fig1", "fig2"] {
        let a = sweep_to(&dir.path().join("a.csv"), &["--preset", preset, "--n-points", "6"]);
        let b = sweep_to(&dir.path().join("b.csv"), &["--preset", preset, "--n-points", "6"]);
        assert_eq!(a, b, "{preset}");
    }
}

#[test]
fn flags_override_config_which_overrides_preset() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(
        &cfg,
        "# narrower range\npreset = fig2\nu_min = 1.0   # inline comment\nu_max = 2.0\nn_points = 5\nselectors = tau\n",
    )
    .unwrap();
    let text = sweep_to(
        &dir.path().join("o.csv"),
        &["--config", cfg.to_str().unwrap(), "--n-points", "3"],
    );
    let rows = read_rows(text.as_bytes()).unwrap();
    assert_eq!(rows.iter().map(|r| r.u).collect::<Vec<_>>(), vec![1.0, 1.5, 2.0]);
    assert!(rows.iter().all(|r| r.tau.is_some() && r.tau_i.is_none() && r.tau_s.is_none()));

    // the same layering through the library
    let config = Overrides::parse_config(&fs::read_to_string(&cfg).unwrap()).unwrap();
    let flags = Overrides {
        n_points: Some(3),
        ..Overrides::default()
    };
    let spec = resolve(&config, &flags).unwrap();
    assert_eq!(spec.a, SweepSpec::preset(Preset::Fig2).a);
    assert_eq!((spec.u_min, spec.n_points), (1.0, 3));
    let flags = Overrides {
        preset: Some(Preset::Fig1),
        ..Overrides::default()
    };
    assert_eq!(resolve(&config, &flags).unwrap().sigma0, 0.01);
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    ok(bin()
        .env("SPINARRIVAL_OUT_DIR", dir.path())
        .args(["sweep", "--preset", "fig2", "--n-points", "2"])
        .output()
        .unwrap());
    let rows = read_rows(fs::File::open(dir.path().join("fig2.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.tau.unwrap() > r.tau_i.unwrap()));
}

#[test]
fn invalid_sweeps_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["sweep", "--u-min", "3", "--u-max", "1", "--out"])
        .arg(dir.path().join("x.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("u_min"));
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn plotscript_for_both_presets_and_empty_data() {
    let dir = tempfile::tempdir().unwrap();
    let fig2 = dir.path().join("fig2.csv");
    sweep_to(&fig2, &["--preset", "fig2", "--n-points", "3"]);
    ok(bin().arg("plotscript").arg(&fig2).output().unwrap());
    let script = fs::read_to_string(dir.path().join("fig2.py")).unwrap();
    assert!(script.contains("tau (upper)") && script.contains("tau_i (lower)"));
    assert!(script.contains("fig2.png"));

    let fig1 = dir.path().join("fig1.csv");
    sweep_to(&fig1, &["--preset", "fig1", "--n-points", "2"]);
    let target = dir.path().join("plot1.py");
    ok(bin().arg("plotscript").arg(&fig1).arg("--out").arg(&target).output().unwrap());
    let script = fs::read_to_string(&target).unwrap();
    assert!(script.contains("(\"tau_s\", \"tau_s\")") && !script.contains("(upper)"));

    let empty = dir.path().join("empty.csv");
    fs::write(&empty, format!("{}\n", HEADER.join(","))).unwrap();
    let out = bin().arg("plotscript").arg(&empty).output().unwrap();
    assert!(!out.status.success());
    assert!(!dir.path().join("empty.py").exists());
}

#[test]
fn point_prints_density_and_three_currents() {
    let out = ok(bin()
        .args(["point", "--sigma0", "0.01", "--u", "1", "--x", "1", "--y", "1", "--z", "1", "--t", "1"])
        .output()
        .unwrap());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split(' ').next().unwrap()).collect();
    assert_eq!(names, ["rho", "j_i", "j_s", "j"]);
    let numeric = ok(bin()
        .args(["point", "--u", "1", "--x", "1", "--y", "1", "--z", "1", "--t", "1", "--method", "numeric"])
        .output()
        .unwrap());
    let rho = |s: &str| -> f64 { s.lines().next().unwrap()[4..].parse().unwrap() };
    let (a, b) = (rho(&text), rho(&String::from_utf8(numeric.stdout).unwrap()));
    assert!((a - b).abs() <= 1e-12 * a);

    let bad = bin()
        .args(["point", "--sigma0", "-1", "--u", "1", "--x", "1", "--y", "1", "--z", "1", "--t", "1"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn fast_validation_passes() {
    let out = bin().args(["validate", "--tier", "fast"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.split(' ').count() == 5 && l.ends_with("PASS")));
    assert!(!text.contains("mean_arrival"));
}

#[test]
fn flipped_spin_current_passes_continuity_but_fails_the_numeric_oracle() {
    let mutant = |p: &Packet, pt: SpaceTimePoint| {
        let c = p.current(pt);
        CurrentSample::new(c.rho, c.j_i, -c.j_s)
    };
    let report = run_with(Tier::Fast, &mutant);
    assert!(report.suite("continuity").all(|c| c.passed));
    assert!(report.suite("spin_divergence").all(|c| c.passed));
    assert!(report.suite("closed_vs_numeric").all(|c| !c.passed));
    assert!(!report.all_passed());
    assert!(run_with(Tier::Fast, &ClosedForm).all_passed());
}

#[test]
fn sweep_rows_follow_velocity_order() {
    let spec = SweepSpec {
        n_points: 7,
        ..SweepSpec::preset(Preset::Fig1)
    };
    let rows = run_sweep(&spec).unwrap();
    let u: Vec<f64> = rows.iter().map(|r| r.u).collect();
    assert_eq!(u, spec.velocities());
    assert!(rows.iter().all(|r| r.status == Status::Ok));
}
