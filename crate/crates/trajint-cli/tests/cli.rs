//! End-to-end checks of the command-line interface and its exit-code
//! contract: 0 success, 1 verified property failed, 2 usage/file error.

use std::path::Path;
use std::process::{Command, Output};

fn trajint(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trajint"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn gen_then_verify_l_on_example2() {
    let dir = tempfile::tempdir().unwrap();
    let out = trajint(
        &["gen", "example2", "--horizon", "8", "--exact", "-o", "m.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    assert!(dir.path().join("m.json").exists());

    let out = trajint(
        &["verify", "m.json", "--properties", "l", "--exact"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).contains("property L: PASS"));
}

#[test]
fn price_zero_claim_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    trajint(
        &["gen", "example2", "--horizon", "4", "-o", "m.json"],
        dir.path(),
    );
    let out = trajint(
        &[
            "price", "m.json", "--payoff", "const:0", "--mode", "upper", "--node", "root",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "0");
}

#[test]
fn classify_type_ii_model_reports_flag_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    trajint(
        &[
            "gen", "binomial", "--horizon", "2", "-u", "3", "-d", "2", "-o", "m.json",
        ],
        dir.path(),
    );
    let out = trajint(&["classify", "m.json", "--format", "json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "classification is not a failure");
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["has_type_II"], serde_json::Value::Bool(true));
    assert_eq!(doc["locally_arbitrage_free"], serde_json::Value::Bool(false));
}

#[test]
fn verify_l_fails_with_exit_1_on_type_ii_model() {
    let dir = tempfile::tempdir().unwrap();
    trajint(
        &[
            "gen", "binomial", "--horizon", "1", "-u", "3", "-d", "2", "-o", "m.json",
        ],
        dir.path(),
    );
    let out = trajint(&["verify", "m.json", "--properties", "l"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("property L: FAIL"));
}

#[test]
fn malformed_model_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
    let out = trajint(
        &["price", "bad.json", "--payoff", "const:0", "--mode", "upper"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn price_binomial_call_exact_third_with_certificate() {
    let dir = tempfile::tempdir().unwrap();
    trajint(
        &[
            "gen", "binomial", "--horizon", "1", "-u", "2", "-d", "1/2", "--exact", "-o",
            "m.json",
        ],
        dir.path(),
    );
    let out = trajint(
        &[
            "price",
            "m.json",
            "--payoff",
            "call:1",
            "--mode",
            "upper",
            "--exact",
            "--certificate",
            "cert.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert_eq!(stdout(&out).trim(), "1/3");
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("cert.json")).unwrap())
            .unwrap();
    assert_eq!(cert["total_premium"], serde_json::json!("1/3"));
}

#[test]
fn martingale_terminal_value_classifies_as_martingale() {
    let dir = tempfile::tempdir().unwrap();
    trajint(
        &[
            "gen", "binomial", "--horizon", "3", "-u", "2", "-d", "1/2", "--exact", "-o",
            "m.json",
        ],
        dir.path(),
    );
    let out = trajint(
        &[
            "martingale",
            "m.json",
            "--payoff",
            "terminal",
            "--mode",
            "integral",
            "--classify",
            "--check-tower",
            "1,2",
            "--exact",
            "--out",
            "proc.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("classification: martingale"));
    assert!(text.contains("tower 1,2: chain PASS, integral equality PASS"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("proc.json")).unwrap())
            .unwrap();
    assert_eq!(doc["mode"], serde_json::json!("integral"));
}

#[test]
fn nullcheck_jump_subtree_below_type_i_node() {
    let dir = tempfile::tempdir().unwrap();
    trajint(
        &["gen", "example1", "--horizon", "2", "--exact", "-o", "m.json"],
        dir.path(),
    );
    // the jump-at-1 leaf is 0,0; it sits below the type I root
    let out = trajint(
        &["nullcheck", "m.json", "--set", "0,0", "--exact"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("-> null"), "{text}");
}

#[test]
fn oracle_grid_and_dual_agree_with_engine() {
    let dir = tempfile::tempdir().unwrap();
    trajint(
        &[
            "gen", "binomial", "--horizon", "1", "-u", "2", "-d", "0.5", "-o", "m.json",
        ],
        dir.path(),
    );
    let out = trajint(
        &[
            "oracle", "m.json", "--payoff", "call:1", "--method", "grid", "--h-range", "4",
            "--step", "0.0001",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    let grid: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("grid value:"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((grid - 1.0 / 3.0).abs() < 1e-3);

    let out = trajint(
        &["oracle", "m.json", "--payoff", "call:1", "--method", "dual"],
        dir.path(),
    );
    let text = stdout(&out);
    let dual: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("dual value:"))
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    assert!((dual - 1.0 / 3.0).abs() < 1e-9);
}

#[test]
fn threads_flag_and_env_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    trajint(
        &["gen", "example2", "--horizon", "2", "-o", "m.json"],
        dir.path(),
    );
    let out = trajint(
        &["--threads", "2", "verify", "m.json", "--properties", "l"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let out = Command::new(env!("CARGO_BIN_EXE_trajint"))
        .args(["verify", "m.json", "--properties", "l"])
        .env("TRAJINT_THREADS", "2")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
