use std::process::Command;

use hartree_cli::{emit_plot, parse_config, run_experiment, sha256_hex, PlotStyle, Series, Status, OUT_ENV};
use serde_json::Value;

const EQUILIBRIUM: &str = "kind = equilibrium-check\nf.kind = fermi\ngrid.N = 32\nT = 0.1\ndt = 0.01\nstride = 2\n";

fn payload_number(v: &Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("{key} missing in {v}"))
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let text = "kind = simulate\nf.kind = fermi\nw.kind = delta\ngrid.N = 32\nT = 0.1\ndt = 0.01\nstride = 3\npert.amplitude = 0.05\n";
    let cfg = parse_config(text).unwrap();
    let a = run_experiment(&cfg);
    let b = run_experiment(&cfg);
    assert_eq!(a.status, Status::Pass);
    assert_eq!(a.artifacts.len(), 3);
    for (x, y) in a.artifacts.iter().zip(&b.artifacts) {
        assert_eq!(x.name, y.name);
        assert_eq!(x.bytes, y.bytes, "{} differs", x.name);
    }
    assert_eq!(a.config_sha256, b.config_sha256);
}

#[test]
fn written_files_match_their_checksums() {
    let dir = tempfile::tempdir().unwrap();
    let env = run_experiment(&parse_config(EQUILIBRIUM).unwrap());
    env.write(dir.path()).unwrap();
    let json: Value = serde_json::from_slice(&std::fs::read(dir.path().join("envelope.json")).unwrap()).unwrap();
    assert_eq!(json["status"], "pass");
    assert_eq!(json["kind"], "equilibrium-check");
    let files = json["files"].as_array().unwrap();
    assert_eq!(files.len(), 3);
    for f in files {
        let bytes = std::fs::read(dir.path().join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"].as_str().unwrap(), sha256_hex(&bytes));
        assert_eq!(f["bytes"].as_u64().unwrap() as usize, bytes.len());
    }
    let ndjson = std::fs::read_to_string(dir.path().join("trajectory.ndjson")).unwrap();
    for line in ndjson.lines() {
        let row: Value = serde_json::from_str(line).unwrap();
        assert!(row["time"].is_f64() && row["mode_masses"].is_array() && row["energy"].is_f64());
    }
    let csv = std::fs::read_to_string(dir.path().join("density.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("index,x1,rho"));
    assert_eq!(csv.lines().count(), 33);
}

#[test]
fn output_formats_filter_artifacts() {
    let cfg = parse_config(&format!("{EQUILIBRIUM}output.formats = csv\n")).unwrap();
    let env = run_experiment(&cfg);
    let names: Vec<&str> = env.files.iter().map(|f| f.path.as_str()).collect();
    assert_eq!(names, ["density.csv"]);
}

#[test]
fn free_stability_margin_is_one() {
    let cfg = parse_config("kind = stability-check\nf.kind = fermi\nw.kind = zero\ngrid.d = 2\ntau.n = 4\nxi.n = 4\n")
        .unwrap();
    let env = run_experiment(&cfg);
    assert_eq!(env.status, Status::Pass);
    assert_eq!(env.payload["margin"]["min"].as_f64(), Some(1.0));
    assert!(env.verdicts.iter().any(|v| v.name == "margin-unit" && v.pass));
}

#[test]
fn massless_two_wave_band_is_empty() {
    let cfg = parse_config("kind = instability\nw.kind = delta\nm = 0\nxi = 1\nr.n = 200\n").unwrap();
    let env = run_experiment(&cfg);
    assert_eq!(env.status, Status::Pass);
    assert!(env.payload["detected"].as_array().unwrap().is_empty());
    assert!(payload_number(&env.payload, "max_growth").abs() <= 1e-10);
    let band = std::str::from_utf8(&env.artifacts.iter().find(|a| a.name == "band.csv").unwrap().bytes)
        .unwrap()
        .to_string();
    assert_eq!(band.lines().count(), 201);
}

#[test]
fn unit_mass_band_brackets_the_predicted_interval() {
    let cfg = parse_config("kind = instability\nw.kind = delta\nm = 1\nxi = 1\n").unwrap();
    let env = run_experiment(&cfg);
    assert_eq!(env.status, Status::Pass, "{:?}", env.verdicts);
    let band = &env.payload["detected"][0];
    assert!((band[0].as_f64().unwrap() - 2f64.sqrt()).abs() < 4e-3);
    assert!((band[1].as_f64().unwrap() - 2.0).abs() < 4e-3);
}

#[test]
fn svg_edge_cases() {
    let style = PlotStyle {
        log_y: true,
        provenance: "test -- run".into(),
        ..Default::default()
    };
    let empty = emit_plot(&[Series::new("none", vec![])], &style).unwrap();
    assert!(empty.contains("warning: empty series"));
    let nonpos = emit_plot(&[Series::new("z", vec![(0.0, 0.0), (1.0, -1.0)])], &style).unwrap();
    assert!(nonpos.contains("no positive values for a log axis"));
    let mixed = emit_plot(&[Series::new("m", vec![(0.0, 1e-3), (1.0, 0.0), (2.0, 10.0)])], &style).unwrap();
    assert!(mixed.contains("warning: 1 nonpositive values omitted"));
    assert!(mixed.contains("<polyline"));
    assert!(mixed.contains("<!-- provenance: test - - run -->"));
    let one = emit_plot(&[Series::new("p", vec![(3.0, 4.0)])], &PlotStyle::default()).unwrap();
    assert_eq!(one.matches("<circle").count(), 1);
    assert!(emit_plot(&[Series::new("bad", vec![(f64::INFINITY, 1.0)])], &style).is_err());
}

fn hartree() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hartree"))
}

#[test]
fn binary_exit_codes_and_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("eq.conf");
    std::fs::write(&conf, EQUILIBRIUM).unwrap();

    let out = dir.path().join("out");
    let run = hartree()
        .args(["equilibrium-check", "--config"])
        .arg(&conf)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let stdout = String::from_utf8(run.stdout).unwrap();
    assert!(stdout.contains("PASS mode-mass-drift"));
    assert!(out.join("equilibrium-check/envelope.json").exists());

    let env_out = dir.path().join("from-env");
    let run = hartree()
        .args(["equilibrium-check", "--config"])
        .arg(&conf)
        .env(OUT_ENV, &env_out)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0));
    assert!(env_out.join("equilibrium-check/density.csv").exists());

    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "kind = norms\ngrid.d = 5\n").unwrap();
    let run = hartree().args(["norms", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("d must be in 1..=4"));

    let run = hartree().args(["nonsense", "--config"]).arg(&conf).output().unwrap();
    assert_eq!(run.status.code(), Some(2));
    let run = hartree()
        .args(["norms", "--config", "/nonexistent/x.conf"])
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn failing_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("p.conf");
    // a strong perturbation on a coarse lattice: the iteration no longer contracts
    std::fs::write(
        &conf,
        "kind = picard\nf.kind = fermi\nw.kind = delta\nw.amplitude = 50\ngrid.N = 16\npert.amplitude = 5\nT = 2\npicard.dt = 0.05\n",
    )
    .unwrap();
    let run = hartree()
        .args(["picard", "--config"])
        .arg(&conf)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(1), "{}", String::from_utf8_lossy(&run.stdout));
    let json: Value = serde_json::from_slice(&std::fs::read(dir.path().join("picard/envelope.json")).unwrap()).unwrap();
    assert_ne!(json["status"], "pass");
}
