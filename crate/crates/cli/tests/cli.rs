use std::path::{Path, PathBuf};
use std::process::Command;

use proptest::prelude::*;
use serde_json::Value;
use syz_cli::RunConfig;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_syz-skeleton"));
    c.env("SOURCE_DATE_EPOCH", "1700000000").env_remove("SYZ_SKELETON_THREADS");
    c
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

/// Runs a subcommand and returns (exit code, output file contents).
fn run(dir: &Path, cmd: &str, config: &Path, extra: &[&str]) -> (i32, String) {
    let out = dir.join(format!("{cmd}-{}.out", extra.join("_").replace(['-', '='], "")));
    let status = bin()
        .args([cmd, "--quiet", "--config"])
        .arg(config)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .status()
        .unwrap();
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    (status.code().unwrap(), text)
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn critical_small_shapes_match_the_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", "[shape]\np = 1\nq = 1\n[solver]\nseed = 3\n");
    let (code, text) = run(dir.path(), "critical", &cfg, &[]);
    assert_eq!(code, 0);
    let v = json(&text);
    assert_eq!(v["payload"]["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["passed"], Value::Bool(true));

    let cfg = write_config(dir.path(), "c2.toml", "[shape]\np = 1\nq = 2\n[solver]\nseed = 3\n");
    let (code, text) = run(dir.path(), "critical", &cfg, &[]);
    assert_eq!(code, 0);
    let rows = json(&text)["payload"]["rows"].as_array().unwrap().clone();
    let expected: Vec<u64> = rows.iter().map(|r| r["expected_index"].as_u64().unwrap()).collect();
    assert_eq!(expected, vec![0, 1, 1, 2]);
}

#[test]
fn extra_clusters_give_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", "[shape]\np = 2\nq = 1\n[solver]\nseed = 3\n");
    let (code, text) = run(dir.path(), "critical", &cfg, &[]);
    assert_eq!(code, 1);
    assert!(!json(&text)["payload"]["unmatched_clusters"].as_array().unwrap().is_empty());
}

#[test]
fn invalid_configs_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", "[shape]\neps = 2.0\nl = 1.0\n[solver]\nseed = 1\n");
    let out = bin().args(["critical", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("shape.l"));

    let cfg = write_config(dir.path(), "q3.toml", "[shape]\nq = 3\n[solver]\nseed = 1\n");
    assert_eq!(bin().args(["figure", "--config"]).arg(&cfg).output().unwrap().status.code(), Some(2));

    // solver runs need a seed
    assert_eq!(bin().arg("critical").output().unwrap().status.code(), Some(2));
}

#[test]
fn failed_identity_gives_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    // The blowup presentation needs n >= 1.
    let cfg = write_config(dir.path(), "b.toml", "[bside]\nn = 0\nm = 2\n");
    let (code, text) = run(dir.path(), "bside", &cfg, &[]);
    assert_eq!(code, 1);
    assert!(json(&text)["payload"]["blowup"]["error"].is_string());
}

#[test]
fn skeleton_examples() {
    let dir = tempfile::tempdir().unwrap();
    for (p, q, ranks) in [(1, 1, vec![1, 1, 1]), (0, 1, vec![1, 1]), (1, 2, vec![1, 2, 1, 1])] {
        let cfg = write_config(dir.path(), "s.toml", &format!("[shape]\np = {p}\nq = {q}\n"));
        let (code, text) = run(dir.path(), "skeleton", &cfg, &[]);
        assert_eq!(code, 0, "({p},{q})");
        let v = json(&text);
        let got: Vec<u64> = v["payload"]["homology_ranks"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap())
            .collect();
        assert_eq!(got, ranks, "({p},{q})");
        assert_eq!(v["payload"]["euler"]["additive"], Value::Bool(true));
    }
}

#[test]
fn figure_markers_match_critical_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "f.toml", "[shape]\np = 1\nq = 2\n[solver]\nseed = 5\n");
    let (code, svg) = run(dir.path(), "figure", &cfg, &[]);
    assert_eq!(code, 0);
    assert!(svg.starts_with("<?xml") && svg.contains(r#"version="1.1""#));
    assert_eq!(svg.matches(r#"fill="red""#).count(), 1);
    assert_eq!(svg.matches(r#"fill="green""#).count(), 3);
    assert!(svg.contains(r#"<g id="skeleton-region" fill="blue""#));
    assert!(svg.contains(r#"<g id="spine""#) && svg.contains(r#"<g id="amoeba""#));
    let region = svg.split(r#"<g id="skeleton-region""#).nth(1).unwrap().split("</g>").next().unwrap();
    assert!(region.matches("<rect").count() > 10);

    let (_, text) = run(dir.path(), "critical", &cfg, &[]);
    let rows = json(&text)["payload"]["rows"].as_array().unwrap().clone();
    for r in rows {
        let subset: Vec<String> = r["subset"].as_array().unwrap().iter().map(|x| x.to_string()).collect();
        let found = r["found_xi"].as_array().unwrap();
        let tag = format!(
            r#"data-subset="{{{}}}" data-xi1="{}" data-xi2="{}""#,
            subset.join(","),
            found[0].as_f64().unwrap(),
            found[1].as_f64().unwrap()
        );
        assert!(svg.contains(&tag), "missing {tag}");
    }
}

#[test]
fn outputs_are_byte_identical_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "d.toml", "[shape]\np = 1\nq = 2\n[solver]\nseed = 9\n");
    for cmd in ["spine", "amoeba", "critical", "skeleton", "bside", "figure"] {
        let (c1, a) = run(dir.path(), cmd, &cfg, &[]);
        let (c2, b) = run(dir.path(), cmd, &cfg, &[]);
        assert_eq!((c1, c2), (0, 0), "{cmd}");
        assert!(!a.is_empty());
        assert_eq!(a, b, "{cmd}");
    }
    let out = |threads: &str| {
        bin()
            .env("SYZ_SKELETON_THREADS", threads)
            .args(["critical", "--quiet", "--config"])
            .arg(&cfg)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(out("1"), out("4"));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.toml", "[shape]\np = 1\nq = 1\n[solver]\nseed = 1\n");
    let (_, text) = run(dir.path(), "critical", &cfg, &["--seed", "42"]);
    let v = json(&text);
    assert_eq!(v["payload"]["seed"], 42);
    assert_eq!(v["config"]["solver"]["seed"], 42);
}

#[test]
fn envelope_checksum_matches_payload() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "e.toml", "");
    let (_, text) = run(dir.path(), "spine", &cfg, &[]);
    let v = json(&text);
    let payload = syz_cli::envelope::to_canonical_string(&v["payload"]);
    assert_eq!(v["payload_sha256"].as_str().unwrap(), syz_cli::envelope::sha256_hex(payload.as_bytes()));
    assert_eq!(v["tool"], "syz-skeleton");
    assert_eq!(v["timestamp"], "2023-11-14T22:13:20Z");
}

fn arb_config() -> impl Strategy<Value = RunConfig> {
    (
        (0usize..4, 1usize..4, 0.01f64..1.0, 10.0f64..40.0, 0.0f64..0.1, 0.05f64..1.0, 0.0f64..=1.0),
        (proptest::option::of(0u64..=i64::MAX as u64), proptest::option::of(1usize..500), 1e-14f64..1e-6, 1usize..1000),
        (-10.0f64..-1.0, 0.5f64..5.0, 2usize..300, proptest::option::of("[a-z]{1,8}\\.json")),
    )
        .prop_map(|(s, v, g)| {
            let mut c = RunConfig::default();
            (c.shape.p, c.shape.q, c.shape.eps) = (s.0, s.1, s.2);
            c.shape.l = s.2 * s.3;
            (c.shape.eps_pert, c.shape.chi_radius, c.shape.s) = (s.4, s.5, s.6);
            (c.solver.seed, c.solver.n_starts, c.solver.grad_tol, c.solver.max_iters) = v;
            (c.grid.xi_min, c.grid.xi_max, c.grid.resolution) = (g.0, g.1, g.2);
            c.output.path = g.3;
            c
        })
}

proptest! {
    #[test]
    fn config_round_trip_is_identity(c in arb_config()) {
        let text = c.to_toml();
        let back = RunConfig::from_toml(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_toml(), text);
    }
}
