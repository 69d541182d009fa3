use std::path::Path;
use std::process::{Command, Output};

fn emitter(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emitter"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .env_remove("EMITTER_OUT_DIR")
        .output()
        .expect("binary runs")
}

const OSCILLATOR: [&str; 10] = ["--units", "reduced", "--tau0", "0.01", "--gamma0", "1", "--omega0", "1", "--temperature", "1"];

#[test]
fn constants_prints_the_universal_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let o = emitter(dir.path(), &["constants"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("1/102.78"), "{text}");
    assert!(text.contains("c/17.97"), "{text}");
    assert!(text.contains("21.490 fm"), "{text}");
    assert!(dir.path().join("constants.json").exists());
}

#[test]
fn spectrum_has_one_row_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["spectrum", "--kind", "xx", "--points", "1000", "--omega-max", "3"];
    args.extend(OSCILLATOR);
    assert!(emitter(dir.path(), &args).status.success());
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1001);
    assert_eq!(csv.lines().next(), Some("omega,value"));
    assert!(dir.path().join("spectrum.params.json").exists());
}

#[test]
fn synthesis_is_byte_identical_per_seed() {
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut args = vec!["synthesize", "--n", "4096", "--dt", "0.1"];
    args.extend(OSCILLATOR);
    let seeded = |dir: &Path, seed: &str| {
        let mut full = args.clone();
        full.extend(["--seed", seed]);
        assert!(emitter(dir, &full).status.success());
        std::fs::read(dir.join("trajectory.csv")).unwrap()
    };
    let first = seeded(a.path(), "7");
    assert_eq!(first, seeded(b.path(), "7"));
    assert_ne!(first, seeded(c.path(), "8"));
}

#[test]
fn manifest_lists_every_artifact_with_its_checksum() {
    use sha2::{Digest, Sha256};
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["simulate", "--classical", "--n", "2000", "--dt", "0.01", "--seed", "3"];
    args.extend(OSCILLATOR);
    assert!(emitter(dir.path(), &args).status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("run_manifest.json")).unwrap()).unwrap();
    let artifacts = manifest["artifacts"].as_object().unwrap();
    assert_eq!(artifacts.len(), 4);
    for (name, hash) in artifacts {
        let bytes = std::fs::read(dir.path().join(name)).unwrap();
        assert_eq!(hex::encode(Sha256::digest(&bytes)), hash.as_str().unwrap());
    }
    assert_eq!(manifest["seeds"], serde_json::json!([3]));
    assert_eq!(manifest["config"]["classical"], "true");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# oscillator\nunits = reduced\ntau0 = 0.01\ngamma0 = 1\nomega0 = 1\nT = 1\n").unwrap();
    let o = emitter(dir.path(), &["moments", "--quantity", "diffusion", "--config", cfg.to_str().unwrap(), "--gamma0", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("moments.csv")).unwrap();
    // D = kT/(m gamma0) with the flag's gamma0
    assert!(csv.contains("einstein-diffusion,,0.25,"), "{csv}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(emitter(dir.path(), &["no-such-command"]).status.code(), Some(1));
    assert_eq!(emitter(dir.path(), &["constants", "--no-such-flag"]).status.code(), Some(1));
    // quantum mode has no time-domain integrator
    let mut args = vec!["simulate", "--n", "100", "--dt", "0.01"];
    args.extend(OSCILLATOR);
    assert_eq!(emitter(dir.path(), &args).status.code(), Some(1));
    // starting off the physical branch collapses the reduced vacuum equation
    let o = emitter(
        dir.path(),
        &["kinetics", "dispersion-ode", "--units", "reduced", "--tau0", "0.03", "--y0", "1,1,0.1", "--t0", "1", "--t1", "10"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn outputs_stay_inside_the_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let inner = dir.path().join("out");
    let mut args = vec!["kinetics", "smoluchowski", "--classical", "--times", "0.1", "--out", "../escape.csv"];
    args.extend(OSCILLATOR);
    assert_eq!(emitter(&inner, &args).status.code(), Some(1));
    assert!(!dir.path().join("escape.csv").exists());
}

#[test]
fn psd_estimate_reads_a_written_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["synthesize", "--n", "8192", "--dt", "0.1", "--seed", "1"];
    args.extend(OSCILLATOR);
    assert!(emitter(dir.path(), &args).status.success());
    let input = dir.path().join("trajectory.csv");
    let o = emitter(dir.path(), &["estimate-psd", "--input", input.to_str().unwrap(), "--segment", "256"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("psd.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 129);
}
