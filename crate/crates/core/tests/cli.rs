use std::path::Path;
use std::process::{Command, Output};

use isotypic::cli::{main_with, EXIT_INCONCLUSIVE, EXIT_INCONSISTENT, EXIT_INVALID, EXIT_OK};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isotypic"))
        .args(args)
        .output()
        .unwrap()
}

fn in_process(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with(
        std::iter::once("isotypic").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn scenarios_lists_the_catalog() {
    let (code, out, _) = in_process(&["scenarios"]);
    assert_eq!(code, EXIT_OK);
    for name in [
        "trivial_action",
        "free_dense",
        "reflection_circle",
        "s3_through_z2_circle",
        "product",
        "free_z3",
    ] {
        assert!(out.contains(name), "{name} missing from\n{out}");
    }
    let (_, json, _) = in_process(&["scenarios", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 10);
    assert!(v
        .as_array()
        .unwrap()
        .iter()
        .all(|e| !e["regime"].as_str().unwrap().is_empty()));
}

#[test]
fn irreps_prints_the_table() {
    let (code, out, _) = in_process(&["irreps", "D4"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().filter(|l| l.starts_with("chi")).count(), 5);
    let (_, json, _) = in_process(&["irreps", "S4", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["degrees"], serde_json::json!([1, 1, 2, 3, 3]));
}

#[test]
fn validation_errors_exit_with_4() {
    assert_eq!(in_process(&["irreps", "Q8"]).0, EXIT_INVALID);
    assert_eq!(
        in_process(&["orbit-types", "--model", "torus"]).0,
        EXIT_INVALID
    );
    assert_eq!(
        in_process(&[
            "fredholm-verify",
            "--scenario",
            "reflection",
            "--radii",
            "64,32,128"
        ])
        .0,
        EXIT_INVALID
    );
    assert_eq!(
        in_process(&[
            "alpha-check",
            "--model",
            "product",
            "--family",
            "{ kind = \"bogus\" }"
        ])
        .0,
        EXIT_INVALID
    );
    assert_eq!(in_process(&["no-such-command"]).0, EXIT_INVALID);
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "[model]\nbuiltin = \"product\"\n[circle]\nscenario = \"reflection\"\neps = 0.5\n",
    );
    let (code, _, err) = in_process(&["run", &cfg]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("eps"), "{err}");
    let mixed = write(
        dir.path(),
        "mixed.toml",
        "[model]\nbuiltin = \"product\"\n[circle]\nscenario = \"reflection\"\n",
    );
    assert_eq!(in_process(&["run", &mixed]).0, EXIT_INVALID);
    let out = bin(&["run", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(EXIT_INVALID));
}

#[test]
fn orbit_types_of_the_product_model() {
    let (code, json, _) = in_process(&["orbit-types", "--model", "product", "--json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let orders: Vec<u64> = v["orbit_types"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["order"].as_u64().unwrap())
        .collect();
    assert_eq!(orders, vec![1, 2, 2, 4]);
}

#[test]
fn alpha_check_and_spectrum_are_consistent() {
    let (code, out, _) = in_process(&[
        "alpha-check",
        "--model",
        "s3_through_z2_circle",
        "--seed",
        "5",
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("methods_agree") && out.contains("status: Consistent"));
    let (code, out, _) = in_process(&["spectrum", "--model", "trivial_action", "--group", "S3"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("closure_equals_direct"));
}

const TOLERANCE_CONFIG: &str = r#"
name = "tolerance"
seed = 3
alphas = [1]
[circle]
scenario = "trivial_z2"
families = [{ kind = "identity" }]
radii = [16, 24, 32]
local_radius = 64
"#;

/// `diag(1, s)` on the two isotypes of the `trivial_z2` fiber.
fn scaled(s: f64) -> String {
    format!(
        "{TOLERANCE_CONFIG}[[circle.symbols]]\nname = \"scaled\"\nplus = [{{ freq = 0, matrix = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [{s}, 0.0]]] }}]\nminus = [{{ freq = 0, matrix = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [{s}, 0.0]]] }}]\n"
    )
}

#[test]
fn exit_codes_follow_the_report_status() {
    let dir = tempfile::tempdir().unwrap();
    // Well separated: consistent.
    let ok = write(dir.path(), "ok.toml", &scaled(0.5));
    assert_eq!(in_process(&["run", &ok]).0, EXIT_OK);
    // Singular values just above the cut with no margin: the probe will not
    // decide.
    let edge = write(dir.path(), "edge.toml", &scaled(5e-6));
    let (code, out, _) = in_process(&["run", &edge]);
    assert_eq!(code, EXIT_INCONCLUSIVE, "{out}");
    assert!(out.contains("status: Inconclusive"));
    // Invertible symbol below the probe cut: the probe and the symbol
    // disagree, which the report flags.
    let clash = write(dir.path(), "clash.toml", &scaled(5e-7));
    let (code, out, _) = in_process(&["run", &clash]);
    assert_eq!(code, EXIT_INCONSISTENT, "{out}");
    assert!(out.contains("probe_matches_alpha_ellipticity") && out.contains("FAIL"));
    let status = bin(&["run", &clash]).status;
    assert_eq!(status.code(), Some(EXIT_INCONSISTENT));
}

#[test]
fn reports_replay_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        r#"
        name = "replay"
        seed = 21
        [model]
        builtin = "reflection_circle"
        [symbols]
        [circle]
        scenario = "reflection"
        radii = [16, 24, 32]
        local_radius = 64
        "#,
    );
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let out_a = bin(&["run", &cfg, "-o", a.to_str().unwrap()]);
    let out_b = bin(&["run", &cfg, "--json", "-o", b.to_str().unwrap()]);
    assert_eq!(
        out_a.status.code(),
        Some(EXIT_OK),
        "{}",
        String::from_utf8_lossy(&out_a.stderr)
    );
    let (ja, jb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ja, jb);
    assert_eq!(out_b.stdout, jb);
    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["format"], "isotypic-report/1");
    assert_eq!(v["seed"], 21);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["status"], "consistent");
}

#[test]
fn fredholm_verify_reports_the_winding_index() {
    let (code, json, _) = in_process(&[
        "fredholm-verify",
        "--scenario",
        "trivial_s3",
        "--family",
        "{ kind = \"winding\", irrep = 2, k = 1 }",
        "--radii",
        "16,24,32",
        "--skip-local",
        "--json",
    ]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let idx: Vec<i64> = v["circle"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["index"].as_i64().unwrap())
        .collect();
    assert_eq!(idx, vec![0, 0, -2]);
}
