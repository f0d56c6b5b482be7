//! End-to-end tests of the `kzlie` binary: golden fixtures, exit codes and
//! configuration handling.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn kzlie(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kzlie")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("fixtures")
}

/// Every key of `want` must be present in `got` with an equal value; numbers
/// compare within `tol`, arrays compare elementwise with equal length.
fn subset_match(want: &Value, got: &Value, tol: f64, at: &str) -> Result<(), String> {
    match (want, got) {
        (Value::Object(w), Value::Object(g)) => {
            for (k, wv) in w {
                let gv = g.get(k).ok_or_else(|| format!("{at}.{k}: missing"))?;
                subset_match(wv, gv, tol, &format!("{at}.{k}"))?;
            }
            Ok(())
        }
        (Value::Array(w), Value::Array(g)) => {
            if w.len() != g.len() {
                return Err(format!("{at}: length {} vs {}", w.len(), g.len()));
            }
            for (i, (wv, gv)) in w.iter().zip(g).enumerate() {
                subset_match(wv, gv, tol, &format!("{at}[{i}]"))?;
            }
            Ok(())
        }
        (Value::Number(w), Value::Number(g)) => {
            let (w, g) = (w.as_f64().unwrap(), g.as_f64().unwrap());
            if (w - g).abs() <= tol {
                Ok(())
            } else {
                Err(format!("{at}: {g} differs from {w} by more than {tol}"))
            }
        }
        _ if want == got => Ok(()),
        _ => Err(format!("{at}: expected {want}, got {got}")),
    }
}

#[test]
fn golden_fixtures() {
    let mut paths: Vec<_> = std::fs::read_dir(fixtures_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    assert!(paths.len() >= 15, "fixtures missing");
    let mut failures = Vec::new();
    for p in &paths {
        let fx: Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        let args: Vec<&str> = fx["args"].as_array().unwrap().iter().map(|a| a.as_str().unwrap()).collect();
        let out = kzlie(&args);
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        let want_exit = fx["exit"].as_i64().unwrap() as i32;
        if out.status.code() != Some(want_exit) {
            failures.push(format!("{name}: exit {:?}, expected {want_exit}", out.status.code()));
            continue;
        }
        let tol = fx.get("tolerance").and_then(Value::as_f64).unwrap_or(0.0);
        if let Err(e) = subset_match(&fx["output"], &stdout_json(&out), tol, "$") {
            failures.push(format!("{name}: {e}"));
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

/// Reference values computed by direct series summation.
fn zeta(s: i32) -> f64 {
    let n = 20_000u32;
    let head: f64 = (1..n).map(|k| (k as f64).powi(-s)).sum();
    let nf = n as f64;
    let sf = s as f64;
    // Euler-Maclaurin tail from n.
    head + nf.powf(1.0 - sf) / (sf - 1.0) + 0.5 * nf.powi(-s) + sf / 12.0 * nf.powf(-sf - 1.0)
}

#[test]
fn polylog_at_one_matches_zeta_values() {
    for (word, s) in [("x0x1", 2), ("x0x0x1", 3), ("x0x0x0x1", 4)] {
        let out = kzlie(&["li", "--word", word, "--z", "1", "--tol", "1e-12"]);
        assert!(out.status.success());
        let v = stdout_json(&out)["value"].clone();
        assert!((v[0].as_f64().unwrap() - zeta(s)).abs() < 1e-9, "{word}: {v}");
        assert!(v[1].as_f64().unwrap().abs() < 1e-12);
    }
}

#[test]
fn hyperlog_on_two_letters_is_minus_dilog() {
    // x0 x2 with singularities 0, 1, 2 equals -Li2(z/2).
    let z = 0.8f64;
    let li2: f64 = (1..200).map(|k| (z / 2.0).powi(k) / (k * k) as f64).sum();
    let out = kzlie(&["hyperlog", "--sing", "0,1,2", "--word", "x0x2", "--z", "0.8"]);
    assert!(out.status.success());
    let got = stdout_json(&out)["value"][0].as_f64().unwrap();
    assert!((got + li2).abs() < 1e-9, "{got} vs {}", -li2);
}

#[test]
fn shuffle_output_round_trips_through_a_file() {
    let out = kzlie(&["shuffle", "--left", "x0x1", "--right", "x1x0"]);
    assert!(out.status.success());
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.json");
    std::fs::write(&file, &out.stdout).unwrap();
    let arg = format!("@{}", file.display());
    // Shuffling with the empty word is the identity.
    let again = kzlie(&["shuffle", "--left", &arg, "--right", ""]);
    assert!(again.status.success(), "{}", String::from_utf8_lossy(&again.stderr));
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn shuffle_is_commutative_on_the_command_line() {
    let a = kzlie(&["shuffle", "--left", "x0x1x1", "--right", "x1x0"]);
    let b = kzlie(&["shuffle", "--left", "x1x0", "--right", "x0x1x1"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn lyndon_counts_follow_the_necklace_formula() {
    // Binary Lyndon words of length 1..=6: 2, 1, 2, 3, 6, 9.
    let out = kzlie(&["lyndon", "--max-len", "6"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["count"], 23);
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["kz3"][..],
        &["kz4"],
        &["pbw"],
        &["diagonal", "--check", "split"],
        &["li", "--word", "x0x1", "--z", "not-a-number"],
        &["lyndon", "--alphabet", "x0,x0"],
        &["frobnicate"],
    ] {
        let out = kzlie(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn divergent_polylog_is_a_domain_error() {
    let out = kzlie(&["li", "--word", "x1x0", "--z", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = kzlie(&["li", "--word", "x1", "--z", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cap_above_limit_is_a_resource_error() {
    let out = kzlie(&["diagonal", "--check", "mrs", "--cap", "40"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_sets_defaults_and_limits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"cap": 2, "max_cap": 4}"#).unwrap();
    let c = cfg.to_str().unwrap();
    let out = kzlie(&["--config", c, "diagonal", "--check", "mrs"]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["cap"], 2);
    let out = kzlie(&["--config", c, "diagonal", "--check", "mrs", "--cap", "5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn corrupted_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [
        ("unknown.json", r#"{"cap": 2, "bogus": 1}"#),
        ("broken.json", r#"{"cap": 2"#),
        ("invalid.json", r#"{"tol": -1.0}"#),
    ] {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        let out = kzlie(&["--config", p.to_str().unwrap(), "lyndon"]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(!out.stderr.is_empty());
    }
    let out = kzlie(&["--config", "/nonexistent/run.json", "lyndon"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn checkall_fast_profile_passes() {
    let start = std::time::Instant::now();
    let out = kzlie(&["checkall", "--profile", "fast"]);
    assert!(start.elapsed().as_secs() < 120);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["checks"].as_array().unwrap().len(), 12);
    assert_eq!(v["failing"], serde_json::json!([]));
}

#[test]
fn checkall_full_profile_reports_only_the_split_identity() {
    let out = kzlie(&["checkall", "--profile", "full"]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["failing"], serde_json::json!([3]));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.lines().filter(|l| l.starts_with("PASS")).count(), 11);
}
