use std::path::PathBuf;
use std::process::Command;

use asdlift::cli::{main_with, EXIT_CHECK_FAILURE, EXIT_NUMERIC, EXIT_PASS, EXIT_USAGE};
use serde_json::Value;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("asdlift").chain(args.iter().copied());
    let code = main_with(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn config(name: &str) -> String {
    format!("{}/configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("asdlift-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn gallery_list_names_every_example() {
    let r = run(&["gallery", "list"]);
    assert_eq!(r.code, EXIT_PASS);
    for name in ["flat", "skew", "sl2", "submaximal", "flat_n3"] {
        assert!(r.out.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn json_report_round_trips() {
    let r = run(&["gallery", "run", "flat", "--json", "--points", "4"]);
    assert_eq!(r.code, EXIT_PASS, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["tool"], "asdlift");
    assert_eq!(v["subject"], "flat");
    assert_eq!(v["points"], 4);
    assert_eq!(v["pass"], true);
    assert_eq!(v["calibration"]["kappa"], 0.5);
    assert!(v.get("wall_time_ms").is_none());
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        for key in ["name", "points", "max_residual", "min_residual", "tolerance", "comparison", "pass"] {
            assert!(c.get(key).is_some(), "{key} missing in {c}");
        }
    }
    assert!(r.out.ends_with("}\n"));
    assert!(!r.out.contains('\r'));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        &["gallery", "run", "sl2", "--json"][..],
        &["verify", &config("random_einstein.toml"), "--json"][..],
        &["twistor", "skew", "--lambda", "2"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.code, EXIT_PASS, "{args:?}: {}", a.err);
        assert_eq!(a.out, b.out, "{args:?}");
    }
}

#[test]
fn seed_changes_the_sample() {
    let a = run(&["gallery", "run", "flat", "--json", "--seed", "1"]);
    let b = run(&["gallery", "run", "flat", "--json", "--seed", "2"]);
    assert_ne!(a.out, b.out);
}

#[test]
fn text_report_has_one_line_per_check() {
    let r = run(&["gallery", "run", "submaximal"]);
    assert_eq!(r.code, EXIT_PASS, "{}", r.out);
    let json: Value = serde_json::from_str(&run(&["gallery", "run", "submaximal", "--json"]).out).unwrap();
    let checks = json["checks"].as_array().unwrap().len();
    let verdicts = r.out.lines().filter(|l| l.starts_with("PASS ") || l.starts_with("FAIL ")).count();
    assert_eq!(verdicts, checks);
    assert_eq!(r.out.lines().last(), Some("RESULT PASS"));
}

#[test]
fn sample_configs_verify() {
    for name in ["flat.toml", "random_einstein.toml", "sl2.toml", "modified_walker.toml"] {
        let r = run(&["verify", &config(name)]);
        assert_eq!(r.code, EXIT_PASS, "{name}: {}{}", r.out, r.err);
    }
}

#[test]
fn zero_tolerance_fails_checks() {
    let r = run(&["gallery", "run", "flat", "--tol", "0"]);
    assert_eq!(r.code, EXIT_CHECK_FAILURE);
    assert!(r.out.contains("RESULT FAIL"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["gallery", "run", "nowhere"]).code, EXIT_USAGE);
    assert_eq!(run(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(run(&["verify"]).code, EXIT_USAGE);
    assert_eq!(run(&["gallery", "run", "flat", "--points", "many"]).code, EXIT_USAGE);
    assert_eq!(run(&["curvature", "flat", "--at", "1,2"]).code, EXIT_USAGE);
    assert_eq!(run(&["verify", "/nonexistent/job.toml"]).code, EXIT_USAGE);
    assert_eq!(run(&["--help"]).code, EXIT_PASS);
}

#[test]
fn malformed_config_points_at_the_line() {
    let r = run(&["verify", &config("malformed.toml")]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("malformed.toml:5"), "{}", r.err);
    assert!(r.err.contains("x1 + * x2"), "{}", r.err);
}

#[test]
fn singular_structures_exit_three() {
    let path = scratch("singular.toml");
    std::fs::write(
        &path,
        "[structure]\nfamily = \"walker\"\n\n[structure.gamma]\n\"1,1,1\" = \"1/(x1 - x1)\"\n",
    )
    .unwrap();
    let r = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_NUMERIC, "{}", r.err);
}

#[test]
fn out_and_golden_files() {
    let out = scratch("flat.json");
    let r = run(&["gallery", "run", "flat", "--json", "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_PASS);
    assert!(r.out.is_empty());
    let written = std::fs::read_to_string(&out).unwrap();
    assert_eq!(written, run(&["gallery", "run", "flat", "--json"]).out);

    let same = run(&["gallery", "run", "flat", "--json", "--golden", out.to_str().unwrap()]);
    assert_eq!(same.code, EXIT_PASS);
    let other = run(&["gallery", "run", "flat", "--json", "--seed", "3", "--golden", out.to_str().unwrap()]);
    assert_eq!(other.code, EXIT_CHECK_FAILURE);
    assert!(other.err.contains("golden"));
}

#[test]
fn timing_is_opt_in() {
    let r = run(&["gallery", "run", "flat", "--json", "--timing", "--points", "2"]);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert!(v["wall_time_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn curvature_dump_at_a_point() {
    let r = run(&["curvature", "flat", "--at", "0.1,-0.2,0.3,0.4", "--lambda", "2", "--json"]);
    assert_eq!(r.code, EXIT_PASS, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    assert!((v["scalar"].as_f64().unwrap() + 48.0).abs() < 1e-9);
    assert!((v["weyl_norm_squared"].as_f64().unwrap() - 384.0).abs() < 1e-8);
    assert!(v["self_dual_weyl"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["metric"].as_array().unwrap().len(), 16);
}

#[test]
fn suites_restrict_the_checks() {
    let r = run(&["killing", "sl2", "--json"]);
    assert_eq!(r.code, EXIT_PASS, "{}", r.err);
    let v: Value = serde_json::from_str(&r.out).unwrap();
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["killing", "symplectic"]);

    let r = run(&["invariance", "flat", "--lambda", "-1.5"]);
    assert_eq!(r.code, EXIT_PASS, "{}", r.out);
    assert!(r.out.contains("PASS invariance"));
}

#[test]
fn binary_forwards_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_asdlift");
    let ok = Command::new(bin).args(["gallery", "run", "skew", "--points", "3"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_PASS));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("RESULT PASS"));
    let bad = Command::new(bin).args(["verify", &config("malformed.toml")]).output().unwrap();
    assert_eq!(bad.status.code(), Some(EXIT_USAGE));
    assert!(!bad.stderr.is_empty());
}
