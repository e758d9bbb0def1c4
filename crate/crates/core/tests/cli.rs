//! Command-line surface: worked examples, output formats and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hurwitz")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn expand_examples() {
    let v = json(&run(&["expand", "2/5+0/1 i"]));
    assert_eq!(v["digits"], serde_json::json!([[3, 0], [-2, 0]]));
    assert_eq!(v["roundtrip"], true);
    assert_eq!(v["terminated"], true);

    let v = json(&run(&["expand", "0/1+0/1 i"]));
    assert_eq!(v["digits"], serde_json::json!([]));
    assert_eq!(v["terminated"], true);

    let out = run(&["expand", "1/2+0/1 i"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("re = 1/2"), "{}", stderr(&out));
}

#[test]
fn expand_float_mode_reports_digits() {
    let v = json(&run(&["expand", "2/5+0/1 i", "--float"]));
    assert_eq!(v["mode"], "float");
    assert!(v["expansion"].is_object());
}

#[test]
fn eval_and_classify() {
    let v = json(&run(&["eval", "3,0;-2,0"]));
    assert_eq!(v["value"], "2/5");
    let v = json(&run(&["eval", "[[2,2]]"]));
    assert_eq!(v["value"], "1/4-1/4i");
    for (d, class) in [("1,0", "invalid"), ("2,1", "exceptional"), ("2,2", "regular")] {
        assert_eq!(json(&run(&["classify", d]))["class"], class);
    }
    assert_eq!(run(&["classify", "two"]).status.code(), Some(2));
}

#[test]
fn tessellate_examples() {
    let out = run(&["tessellate", "--norm-sq-max", "8"]);
    assert!(out.status.success());
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<path").count(), 20);
    assert_eq!(svg.matches("clip-path=\"url(#unit-box)\"").count(), 16);
    assert_eq!(svg.matches("data-norm-sq=\"8\"").count(), 4);

    let svg = String::from_utf8(run(&["tessellate", "--norm-sq-max", "2"]).stdout).unwrap();
    assert_eq!(svg.matches("<path").count(), 4);

    assert_eq!(run(&["tessellate", "--norm-sq-max", "1"]).status.code(), Some(2));
}

#[test]
fn tessellate_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cylinders.svg");
    let status = run(&["tessellate", "--out", out.to_str().unwrap()]).status;
    assert!(status.success());
    let svg = std::fs::read_to_string(out).unwrap();
    assert!(svg.trim_end().ends_with("</svg>"));
    assert!(!svg.contains("date") && !svg.contains("time"));
}

#[test]
fn verify_examples() {
    let names = |suite: &str| -> Vec<String> {
        json(&run(&["verify", suite]))
            .as_array()
            .unwrap()
            .iter()
            .map(|r| r["check"].as_str().unwrap().to_string())
            .collect()
    };
    assert!(names("arith").contains(&"arith.count_in_square".to_string()));
    assert!(names("ifs").contains(&"ifs.contraction_sup".to_string()));
    assert!(names("schedule").contains(&"schedule.block_sums".to_string()));
    assert_eq!(run(&["verify", "bogus"]).status.code(), Some(2));
}

#[test]
fn verify_failure_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.toml");
    std::fs::write(&cfg, "max_digits = 1\n").unwrap();
    let out = run(&["--config", cfg.to_str().unwrap(), "verify", "expansion"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let failed: Vec<&Value> = v.as_array().unwrap().iter().filter(|r| r["status"] == "fail").collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|r| r["witness"].is_string()));
}

#[test]
fn tau_lattice_writes_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("tau.csv");
    let v = json(&run(&["tau", "--horizon", "1000000", "--trajectory", csv.to_str().unwrap()]));
    assert!((v["estimate"].as_f64().unwrap() - 2.0).abs() < 0.02);
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,x_n,ratio,anchored"));
    assert!(lines.count() > 100);
}

#[test]
fn dim_single_branch_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("one.txt");
    std::fs::write(&file, "2,2\n").unwrap();
    let v = json(&run(&["dim", "--alphabet", file.to_str().unwrap()]));
    assert_eq!(v["s_low"].as_f64().unwrap(), 0.0);
    assert!(v["s_high"].as_f64().unwrap() <= 1e-3);
    assert!(v["n_used"].is_u64());
}

#[test]
fn schedule_json_passes_validator() {
    let v = json(&run(&["schedule", "--set", "d2", "--growth", "n+3", "--epsilon", "0.5", "--horizon", "3000"]));
    assert_eq!(v["horizon"], 3000);
    assert!(v["anchors"].as_array().unwrap().len() >= 3);
    let blocks = v["blocks"].as_array().unwrap();
    for key in ["norm_lo", "norm_hi", "count", "t"] {
        assert!(blocks[0][key].is_u64(), "{key}");
    }
    let total: u64 = blocks.iter().map(|b| b["t"].as_u64().unwrap()).sum();
    assert_eq!(total, 3000);
}

#[test]
fn schedule_with_bounded_growth_warns() {
    let out = run(&["schedule", "--growth", "3", "--epsilon", "0.5", "--horizon", "100"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("warning"));
    assert_eq!(json(&out)["truncated"], true);
}

#[test]
fn pressure_json_and_csv() {
    let v = json(&run(&["pressure", "--alphabet", "2,2;-2,-2", "--n", "1", "--s", "0"]));
    for key in ["s", "n", "logZ_over_n", "lo", "hi"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!((v["logZ_over_n"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-15);

    let out = run(&["pressure", "--alphabet", "2,2;3,0", "--n", "3", "--s", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("key,value"));
    assert!(text.lines().any(|l| l.starts_with("logZ_over_n,")));
}

#[test]
fn budget_exhaustion_exits_three() {
    let out = run(&["pressure", "--alphabet", "2,2;-2,-2;3,0", "--n", "30", "--s", "0.5"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("budget"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["expand"]).status.code(), Some(2));
    assert_eq!(run(&["--format", "xml", "classify", "2,2"]).status.code(), Some(2));
    assert_eq!(run(&["dim", "--alphabet", "1,0"]).status.code(), Some(2));
    assert_eq!(run(&["expand", "two fifths"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "classify", "2,2"]).status.code(), Some(2));
    let missing = Path::new("/nonexistent/run.toml");
    assert_eq!(run(&["--config", missing.to_str().unwrap(), "classify", "2,2"]).status.code(), Some(2));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("seeded.toml");
    std::fs::write(&cfg, "seed = 1\nmax_digits = 1\n").unwrap();
    let witnesses = |seed: &str| {
        let out = run(&["--config", cfg.to_str().unwrap(), "--seed", seed, "verify", "expansion"]);
        assert_eq!(out.status.code(), Some(1));
        String::from_utf8(out.stdout).unwrap()
    };
    assert_eq!(witnesses("5"), witnesses("5"));
    assert_ne!(witnesses("5"), witnesses("6"));
}
