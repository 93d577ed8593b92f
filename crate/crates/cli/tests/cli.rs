use std::path::Path;
use std::process::{Command, Output};

use nplattice::config::extract_embedded;

fn nplattice(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nplattice")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

const IDENTITY_NOISE: &str = r#"{
  "code": {"type": "dnp", "s": 2, "p": 1, "q": 2},
  "sweep": {"alpha": [3.0]},
  "noise": {"gamma_t": 0.0, "kappa_t": 0.0}
}"#;

#[test]
fn malformed_json_is_a_config_error_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"code": {"type": "dnp", "s": 2,"#);
    let out = dir.path().join("out.csv");
    let res = nplattice(&["fidelity", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!out.exists());

    let cfg = write(dir.path(), "unknown.json", &IDENTITY_NOISE.replace(r#""s": 2"#, r#""s": 2, "shear": 1"#));
    let res = nplattice(&["fidelity", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!out.exists());
    assert!(String::from_utf8_lossy(&res.stderr).contains("shear"));
}

#[test]
fn fidelity_runs_are_byte_identical_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "id.json", IDENTITY_NOISE);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(nplattice(&["fidelity", "--config", &cfg, "--seed", "5", "--out", a.to_str().unwrap()]).status.success());
    assert!(nplattice(&["fidelity", "--config", &cfg, "--seed", "5", "--jobs", "1", "--out", b.to_str().unwrap()])
        .status
        .success());
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());

    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 1);
    let infidelity: f64 = rows[0][10].parse().unwrap();
    assert!(infidelity < 1e-3, "{infidelity}");
    assert_eq!(rows[0][12], "5");

    // the embedded config reproduces the rows
    let embedded = extract_embedded(&text).unwrap();
    let replay = write(dir.path(), "replay.json", &embedded.config.canonical_json());
    let c = dir.path().join("c.csv");
    let seed = embedded.seed.unwrap().to_string();
    assert!(nplattice(&["fidelity", "--config", &replay, "--seed", &seed, "--out", c.to_str().unwrap()]).status.success());
    assert_eq!(text, std::fs::read_to_string(&c).unwrap());
}

#[test]
fn repeater_rows_follow_the_loss_model() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "rep.json",
        r#"{
          "code": {"type": "dnp", "s": 2, "p": 1, "q": 2, "amplitude": {"alpha": 1.7320508075688772}},
          "repeater": {"spacing_km": [0.5, 2.0], "eps": 0.01, "h": 0.1, "distances_km": [0, 10]}
        }"#,
    );
    let res = nplattice(&["repeater", "--config", &cfg]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rows = csv_rows(&String::from_utf8(res.stdout).unwrap());
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let spacing: f64 = row[6].parse().unwrap();
        let gamma: f64 = row[8].parse().unwrap();
        assert!((gamma - (1.0 - (-spacing / 20.0).exp() + 0.01)).abs() < 1e-12);
        if row[7].parse::<f64>().unwrap() == 0.0 {
            assert_eq!(row[12].parse::<f64>().unwrap(), 1.0);
        }
    }
}

#[test]
fn codes_report_shows_metrics_and_syndrome_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "dnp.json",
        r#"{"code": {"type": "dnp", "s": 2, "p": 1, "q": 2, "amplitude": {"alpha": 1.7320508075688772}}}"#,
    );
    let res = nplattice(&["codes", "--config", &cfg]);
    assert!(res.status.success());
    let v: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    let code = &v["codes"][0];
    assert_eq!(code["d_N"], 4);
    assert!((code["d_phi"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    assert!((code["nbar"].as_f64().unwrap() - 6.0).abs() < 1e-6);

    let rect = write(dir.path(), "rect.json", r#"{"code": {"type": "binomial", "s": 4, "amplitude": {"k": 3}}}"#);
    let res = nplattice(&["codes", "--config", &rect]);
    let v: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(v["codes"][0]["syndrome"], "(k, phi_e)");
}

#[test]
fn lattice_and_wigner_emit_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "onp.json", r#"{"code": {"type": "onp", "s": 1, "p": 1, "q": 4, "amplitude": {"alpha": 2.449489742783178}}}"#);
    let res = nplattice(&["lattice", "--config", &cfg]);
    assert!(res.status.success());
    assert!(csv_rows(&String::from_utf8(res.stdout).unwrap()).len() > 4);

    let res = nplattice(&["wigner", "--config", &cfg, "--points", "41"]);
    assert!(res.status.success());
    let rows = csv_rows(&String::from_utf8(res.stdout).unwrap());
    assert_eq!(rows.len(), 41 * 41);
    let step = rows[1][0].parse::<f64>().unwrap() - rows[0][0].parse::<f64>().unwrap();
    let total: f64 = rows.iter().map(|r| r[2].parse::<f64>().unwrap()).sum::<f64>() * step * step;
    assert!((total - 1.0).abs() < 1e-2, "{total}");
}

#[test]
fn quick_validation_passes_and_catches_a_flipped_decoder() {
    let res = nplattice(&["validate", "--level", "quick"]);
    let text = String::from_utf8(res.stdout).unwrap();
    assert_eq!(res.status.code(), Some(0), "{text}");
    assert!(!text.contains("FAIL"));

    let res = nplattice(&["validate", "--level", "quick", "--inject-fault", "sign-flip"]);
    let text = String::from_utf8(res.stdout).unwrap();
    assert_eq!(res.status.code(), Some(1));
    assert!(text.contains("FAIL syndrome round trip"), "{text}");
}
