use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SEED: &str = "0101010101010101010101010101010101010101010101010101010101010101";

fn lrpc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrpc")).current_dir(dir).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn keygen_is_deterministic_under_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for out in ["a", "b"] {
        let o = lrpc(p, &["keygen", "--level", "128", "--scheme", "kem", "--seed", SEED, "--out", out]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
    assert_eq!(fs::read(p.join("a.pk")).unwrap(), fs::read(p.join("b.pk")).unwrap());
    assert_eq!(fs::read(p.join("a.sk")).unwrap(), fs::read(p.join("b.sk")).unwrap());
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let mode = fs::metadata(p.join("a.sk")).unwrap().permissions().mode();
        assert_eq!(mode & 0o777, 0o600);
    }
}

#[test]
fn kem_round_trip_and_truncated_ciphertext() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&lrpc(p, &["keygen", "--level", "192", "--seed", SEED, "--out", "k"])), 0);
    let o = lrpc(p, &["encap", "--pk", "k.pk", "--ct-out", "ct", "--key-out", "key1"]);
    assert_eq!(code(&o), 0);
    // the drawn seed is echoed for replay
    assert!(String::from_utf8_lossy(&o.stderr).contains("seed: "));
    assert_eq!(code(&lrpc(p, &["decap", "--sk", "k.sk", "--ct", "ct", "--key-out", "key2"])), 0);
    let key = fs::read(p.join("key1")).unwrap();
    assert_eq!(key.len(), 32);
    assert_eq!(key, fs::read(p.join("key2")).unwrap());

    let ct = fs::read(p.join("ct")).unwrap();
    fs::write(p.join("short"), &ct[..ct.len() - 1]).unwrap();
    assert_eq!(code(&lrpc(p, &["decap", "--sk", "k.sk", "--ct", "short", "--key-out", "key3"])), 1);
    assert!(!p.join("key3").exists());
    // a public key where a secret key belongs
    assert_eq!(code(&lrpc(p, &["decap", "--sk", "k.pk", "--ct", "ct", "--key-out", "key3"])), 1);
}

#[test]
fn pke_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let msg: Vec<u8> = (0..=255u8).cycle().take(700).collect();
    fs::write(p.join("msg"), &msg).unwrap();
    assert_eq!(code(&lrpc(p, &["keygen", "--scheme", "pke", "--seed", SEED, "--out", "k"])), 0);
    assert_eq!(code(&lrpc(p, &["encrypt", "--pk", "k.pk", "--in", "msg", "--out", "ct", "--seed", SEED])), 0);
    assert_eq!(code(&lrpc(p, &["decrypt", "--sk", "k.sk", "--ct", "ct", "--out", "back"])), 0);
    assert_eq!(fs::read(p.join("back")).unwrap(), msg);
}

#[test]
fn one_seed_for_every_command_still_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    for s in ["02", "03", "04"] {
        let seed = s.repeat(32);
        assert_eq!(code(&lrpc(p, &["keygen", "--seed", &seed, "--out", "k"])), 0);
        assert_eq!(code(&lrpc(p, &["encap", "--pk", "k.pk", "--ct-out", "c", "--key-out", "x", "--seed", &seed])), 0);
        assert_eq!(code(&lrpc(p, &["decap", "--sk", "k.sk", "--ct", "c", "--key-out", "y"])), 0);
        assert_eq!(fs::read(p.join("x")).unwrap(), fs::read(p.join("y")).unwrap());
    }
}

#[test]
fn params_report_for_level_192() {
    let dir = tempfile::tempdir().unwrap();
    let o = lrpc(dir.path(), &["params", "--level", "192", "--scheme", "kem", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rep = &v["report"];
    assert!((rep["structural_log2"].as_f64().unwrap() - 207.0).abs() < 2.0);
    assert!((rep["generic_log2"].as_f64().unwrap() - 221.0).abs() < 2.0);
    let text = lrpc(dir.path(), &["params", "--set", "kem-128", "--format", "text"]);
    assert!(String::from_utf8_lossy(&text.stdout).starts_with("kem-128"));
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(code(&lrpc(p, &["params", "--level", "100"])), 1);
    assert_eq!(code(&lrpc(p, &["keygen", "--seed", "abcd", "--out", "x"])), 1);
    assert_eq!(code(&lrpc(p, &["params", "--set", "nope"])), 1);
    assert_eq!(code(&lrpc(p, &["encap", "--pk", "missing", "--ct-out", "c", "--key-out", "k"])), 1);
    assert_eq!(code(&lrpc(p, &["--help"])), 0);
    assert_eq!(code(&lrpc(p, &["--version"])), 0);
}

#[test]
fn simulate_writes_outputs_and_flags_breaches() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    let spec = |expected: f64| {
        format!(
            r#"{{"name": "cli", "algorithm": "fprob", "planting": {{"forced-codim": 1}}, "trials": 60,
                "base_seed": 3, "grid": [{{"q": 2, "m": 31, "n": 16, "k": 8, "d": 3, "r": 3}}],
                "expected": {expected}, "tolerance": {{"kind": "upper", "factor": 1.0}}}}"#
        )
    };
    fs::write(p.join("ok.json"), spec(1.0)).unwrap();
    let o = lrpc(p, &["simulate", "--spec", "ok.json", "--out", "res", "--threads", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(p.join("res/results.jsonl").exists() && p.join("res/summary.csv").exists());
    // some codim-1 instances fail at this size, so a zero ceiling is breached
    fs::write(p.join("bad.json"), spec(0.0)).unwrap();
    assert_eq!(code(&lrpc(p, &["simulate", "--spec", "bad.json", "--out", "res2", "--threads", "1"])), 3);
    fs::write(p.join("broken.json"), "{").unwrap();
    assert_eq!(code(&lrpc(p, &["simulate", "--spec", "broken.json", "--out", "res3"])), 1);
}
