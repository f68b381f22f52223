use std::process::{Command, Output};

fn hamext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamext"))
        .args(args)
        .env_remove("HAMEXT_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn list_names_every_system() {
    let o = hamext(&["list"]);
    assert!(o.status.success());
    let out = stdout(&o);
    for name in [
        "ttw_angular",
        "s3_hopf",
        "circle_free",
        "flat_harmonic",
        "radial_oscillator",
    ] {
        assert!(out.contains(name), "{name} missing from\n{out}");
    }
}

#[test]
fn classical_suite_on_ttw_exits_zero() {
    let o = hamext(&["verify", "ttw_angular", "--suite", "classical"]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("0 failed, 0 errored"));
}

#[test]
fn quantum_suite_on_circle_with_options() {
    let o = hamext(&[
        "verify",
        "circle_free",
        "--suite",
        "quantum",
        "--mn",
        "2/1",
        "--tol",
        "1e-7",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("X/2-1/"));
    assert!(!out.contains("X/3-2/"));
}

#[test]
fn unknown_system_exits_two() {
    let o = hamext(&["verify", "nosuch"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown system"), "{}", stderr(&o));
}

#[test]
fn bad_arguments_are_rejected() {
    assert_eq!(
        hamext(&["verify", "ttw_angular", "--suite", "nosuch"]).status.code(),
        Some(2)
    );
    assert_eq!(hamext(&["verify", "ttw_angular", "--mn", "0/1"]).status.code(), Some(2));
}

#[test]
fn json_reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = hamext(&["verify", "flat_harmonic", "--json", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);
    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["failed"], 0);
    assert!(v["catalog_version"].is_string());
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        for key in ["name", "status", "max_abs_residual", "max_rel_residual", "points"] {
            assert!(c.get(key).is_some(), "{key} missing in {c}");
        }
        assert!(c.get("wall_time_ms").is_none());
    }
}

#[test]
fn seed_changes_the_sample_points() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    hamext(&[
        "verify",
        "flat_harmonic",
        "--suite",
        "classical",
        "--json",
        a.to_str().unwrap(),
    ]);
    let o = Command::new(env!("CARGO_BIN_EXE_hamext"))
        .args([
            "verify",
            "flat_harmonic",
            "--suite",
            "classical",
            "--json",
            b.to_str().unwrap(),
        ])
        .env("HAMEXT_SEED", "7")
        .output()
        .unwrap();
    assert!(o.status.success());
    let vb: serde_json::Value = serde_json::from_slice(&std::fs::read(&b).unwrap()).unwrap();
    assert_eq!(vb["seed"], 7);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn timings_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let o = hamext(&[
        "verify",
        "flat_harmonic",
        "--suite",
        "classical",
        "--timings",
        "--json",
        a.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert!(v["checks"][0].get("wall_time_ms").is_some());
}

#[test]
fn check_config_accepts_and_rejects() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(
        &good,
        r#"{
            "coordinates": ["q"],
            "metric": ["1"],
            "potential": "q^2/2",
            "G": "q",
            "constants": {"c": 0, "c0": 0.5, "C": 1, "k": "1/1"},
            "domain": {"q": [-2, 2]}
        }"#,
    )
    .unwrap();
    let o = hamext(&["check-config", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("config ok"));

    let wrong_c0 = dir.path().join("wrong.json");
    std::fs::write(
        &wrong_c0,
        std::fs::read_to_string(&good)
            .unwrap()
            .replace(r#""c0": 0.5"#, r#""c0": 2"#),
    )
    .unwrap();
    assert_eq!(
        hamext(&["check-config", wrong_c0.to_str().unwrap()]).status.code(),
        Some(1)
    );

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ not json").unwrap();
    assert_eq!(
        hamext(&["check-config", broken.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn extend_prints_the_extension() {
    let o = hamext(&["extend", "flat_harmonic", "--k", "2/1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    for prefix in ["L = ", "gamma = ", "H = ", "K_2,1 = "] {
        assert!(out.contains(prefix), "{prefix} missing from\n{out}");
    }
    let o = hamext(&["extend", "flat_harmonic", "--k", "3/2", "--omega", "0.5"]);
    assert!(stdout(&o).contains("Kbar_6,4 = "));
    assert_eq!(hamext(&["extend", "radial_oscillator"]).status.code(), Some(2));
}
