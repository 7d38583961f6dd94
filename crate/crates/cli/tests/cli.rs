use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn pqw() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pqw"));
    c.env_remove("PQW_LIMITS");
    c
}

fn repo(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

/// Runs with `--no-timing --json -` and parses the report.
fn report(args: &[&str]) -> (i32, Value) {
    let out = pqw().args(args).args(["--no-timing", "--json", "-"]).output().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn x_spec(n: usize) -> String {
    let mut factors = vec![r#"{"branch": "[0; 4,4,4]", "vector": ["(1,0)", "(0,1)", "(3,3)"]}"#.to_string()];
    factors.extend((1..n).map(|_| r#"{"branch": "[0; 4,4,4]", "vector": ["(1,2)", "(2,3)", "(1,3)"]}"#.to_string()));
    format!(r#"{{"group": {{"abelian": [4, 4]}}, "factors": [{}]}}"#, factors.join(", "))
}

fn report_validator() -> jsonschema::Validator {
    let load = |f: &str| -> Value { serde_json::from_str(&std::fs::read_to_string(repo(&format!("schema/{f}"))).unwrap()).unwrap() };
    let registry = jsonschema::Registry::new().add("urn:pqw:spec-v1", load("spec-v1.json")).unwrap().prepare().unwrap();
    jsonschema::options().with_registry(&registry).build(&load("report-v1.json")).unwrap()
}

#[test]
fn validate_bundled_spec() {
    let out = pqw().arg("validate").arg(repo("specs/x-family-n3.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = pqw().arg("validate").arg(repo("specs/y-family-n3.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn validation_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(repo("specs/x-family-n3.json")).unwrap();
    let bad = text.replacen("\"(3,3)\"", "\"(1,1)\"", 1);
    let out = pqw().arg("validate").arg(write(&dir, "bad.json", &bad)).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("factors[0].vector"), "{}", stderr(&out));
    assert!(stderr(&out).contains("long relator"), "{}", stderr(&out));

    let out = pqw().arg("validate").arg(write(&dir, "broken.json", "{\n  \"group\": {\"abelian\": [4, 4]},\n  \"factors\": [\n")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 4"), "{}", stderr(&out));

    let small = r#"{"group": {"abelian": [2, 2]}, "factors": [{"branch": "[0; 2,2,2,2]", "vector": ["(1,0)", "(1,0)", "(0,1)", "(0,1)"]}]}"#;
    let out = pqw().arg("validate").arg(write(&dir, "small.json", small)).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("genus 1"), "{}", stderr(&out));

    let out = pqw().arg("validate").arg(dir.path().join("missing.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invariants_of_the_families() {
    let (code, r) = report(&["invariants", repo("specs/x-family-n3.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    let inv = &r["invariants"];
    assert_eq!(inv["h1_theta"]["value"], 0);
    assert_eq!(inv["b1"]["value"], 0);
    assert_eq!(inv["census"]["singular_points"], 24);
    assert_eq!(inv["terminal"]["status"], "cited");
    assert_eq!(inv["etale_cover"]["degree"], 4);
    assert_eq!(inv["etale_cover"]["unramified"]["value"], true);

    let (_, r) = report(&["invariants", repo("specs/y-family-n3.json").to_str().unwrap()]);
    assert_eq!(r["invariants"]["h1_theta"]["value"], 9);

    let dir = tempfile::tempdir().unwrap();
    let (_, r) = report(&["invariants", write(&dir, "x5.json", &x_spec(5)).to_str().unwrap()]);
    assert_eq!(r["invariants"]["census"]["singular_points"], 384);
    assert_eq!(r["invariants"]["census"]["types"][0]["type"], "1/2(1,1,1,1,1)");
}

#[test]
fn pi1_command() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = report(&["pi1", write(&dir, "x2.json", &x_spec(2)).to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["pi1"]["status"], "certified");
    assert_eq!(r["pi1"]["isomorphism_type"], "Z2^3");
    assert_eq!(r["pi1"]["abelianization"]["torsion"], serde_json::json!([2, 2, 2]));

    let (code, r) = report(&["pi1", write(&dir, "x1.json", &x_spec(1)).to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["pi1"]["order"], 1);
    assert_eq!(r["pi1"]["universal_cover"]["simply_connected"], true);
}

#[test]
fn limits_and_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let x3 = write(&dir, "x3.json", &x_spec(3));
    let (code, r) = report(&["pi1", x3.to_str().unwrap(), "--limits", "max-cosets=100"]);
    assert_eq!(code, 3);
    assert_eq!(r["pi1"]["status"], "undetermined");
    assert_eq!(r["limits"]["max_cosets"], 100);
    assert_eq!(r["verdict"], "UNDETERMINED");

    let out = pqw().args(["pi1", x3.to_str().unwrap()]).env("PQW_LIMITS", "max-cosets=100").output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = pqw()
        .args(["pi1", x3.to_str().unwrap(), "--limits", "max-cosets=4000"])
        .env("PQW_LIMITS", "max-cosets=100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = pqw().args(["pi1", x3.to_str().unwrap()]).env("PQW_LIMITS", "cosets").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("PQW_LIMITS"));

    let with_limits = x_spec(3).replacen('{', r#"{"limits": {"max_cosets": 100}, "#, 1);
    let out = pqw().args(["pi1", write(&dir, "lim.json", &with_limits).to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn paper_command() {
    let (code, r) = report(&["paper", "--family", "X", "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdict"], "PASS");
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    assert_eq!(r["pi1"]["universal_cover"]["singular_points"], 384);

    let (code, r) = report(&["paper", "--family", "Y", "--n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(r["invariants"]["h1_theta"]["value"], 6);
    assert_eq!(r["pi1"]["isomorphism_type"], "Z2");

    let (code, r) = report(&["paper", "--family", "X", "--n", "6", "--limits", "max-cosets=1000"]);
    assert_eq!(code, 3);
    assert_eq!(r["flags"][0], "beyond paper-verified range");
    assert_eq!(r["pi1"]["beyond_verified_range"], true);
    assert_eq!(r["invariants"]["census"]["singular_points"], 3 * (1 << 9));

    let out = pqw().args(["paper", "--family", "Z", "--n", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bundled_specs_match_the_generator() {
    let dir = tempfile::tempdir().unwrap();
    for (family, file) in [("X", "x-family-n3.json"), ("Y", "y-family-n3.json")] {
        let out = dir.path().join(file);
        let status = pqw().args(["paper", "--family", family, "--n", "3", "--spec-out"]).arg(&out).output().unwrap();
        assert_eq!(status.status.code(), Some(0));
        assert_eq!(std::fs::read_to_string(out).unwrap(), std::fs::read_to_string(repo(&format!("specs/{file}"))).unwrap());
    }
}

#[test]
fn fermat_verify() {
    let (code, r) = report(&["fermat-verify"]);
    assert_eq!(code, 0);
    assert_eq!(r["fermat"]["marked_points"].as_array().unwrap().len(), 12);
    assert_eq!(r["fermat"]["orbits"].as_array().unwrap().len(), 3);
    let (code, r) = report(&["fermat-verify", "--subgroup", "H"]);
    assert_eq!(code, 0);
    assert_eq!(r["fermat"]["subgroup"]["orbit_sizes"], serde_json::json!([2, 2, 2, 2, 2, 2]));
    let (code, r) = report(&["fermat-verify", "--subgroup", "(2,2)"]);
    assert_eq!(code, 0);
    assert_eq!(r["fermat"]["subgroup"]["elements"], serde_json::json!(["(0,0)", "(2,2)"]));
}

#[test]
fn reports_are_deterministic_and_schema_valid() {
    let validator = report_validator();
    let dir = tempfile::tempdir().unwrap();
    let x2 = write(&dir, "x2.json", &x_spec(2));
    let x3 = repo("specs/x-family-n3.json");
    let y3 = repo("specs/y-family-n3.json");
    let runs: Vec<Vec<&str>> = vec![
        vec!["validate", x2.to_str().unwrap()],
        vec!["invariants", x3.to_str().unwrap()],
        vec!["pi1", y3.to_str().unwrap()],
        vec!["paper", "--family", "Y", "--n", "3"],
        vec!["fermat-verify", "--subgroup", "H"],
    ];
    for args in runs {
        let a = dir.path().join("a.json");
        let b = dir.path().join("b.json");
        for p in [&a, &b] {
            let out = pqw().args(&args).arg("--no-timing").arg("--json").arg(p).output().unwrap();
            assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
        }
        let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        assert_eq!(ta, tb, "{args:?}");
        let v: Value = serde_json::from_slice(&ta).unwrap();
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
        assert!(v.get("timing").is_none());
    }
    // With timing the report still validates.
    let out = pqw().args(["pi1", x2.to_str().unwrap(), "--json", "-"]).output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(validator.is_valid(&v));
    assert!(v["timing"].is_array());
}

#[test]
fn spec_files_match_their_schema() {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(repo("schema/spec-v1.json")).unwrap()).unwrap();
    let v = jsonschema::validator_for(&schema).unwrap();
    for f in ["specs/x-family-n3.json", "specs/y-family-n3.json"] {
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(repo(f)).unwrap()).unwrap();
        assert!(v.is_valid(&doc), "{f}");
    }
    let bad: Value = serde_json::json!({"group": {"abelian": [4, 4], "labels": []}, "factors": []});
    assert!(!v.is_valid(&bad));
}
