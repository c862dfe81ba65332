//! End-to-end tests through the built binary: encode, lose a node, repair
//! under both strategies, decode, and exit-code conventions.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn htlrc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_htlrc"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = htlrc(dir, args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}{}",
        args,
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn node_bytes(stripe: &Path, node: usize, alpha: usize) -> Vec<Vec<u8>> {
    (1..=alpha)
        .map(|s| fs::read(stripe.join(format!("node{node}")).join(format!("s{s}"))).unwrap())
        .collect()
}

fn test_file(dir: &Path, len: usize) -> PathBuf {
    let path = dir.join("input.bin");
    let bytes: Vec<u8> = (0..len).map(|i| (i * 131 % 251) as u8).collect();
    fs::write(&path, bytes).unwrap();
    path
}

#[test]
fn repair_strategies_rebuild_identical_bytes_and_decode_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &[
        "gen-code", "--n", "9", "--k", "6", "--alpha", "9", "--field", "gf256", "--seed", "7",
        "--out", "code.json",
    ]);
    ok(dir, &["split", "--spec", "code.json", "--kld", "6,2,2", "--out", "lrc.json"]);
    test_file(dir, 54 * 1024);
    ok(dir, &[
        "encode", "--spec", "lrc.json", "--file", "input.bin", "--out-dir", "stripes",
        "--substripe-size", "1024",
    ]);
    let stripe = dir.join("stripes/stripe0");

    // strategy local
    fs::remove_dir_all(stripe.join("node2")).unwrap();
    let out = ok(dir, &[
        "repair", "--spec", "lrc.json", "--dir", "stripes/stripe0", "--lost", "2",
        "--strategy", "local",
    ]);
    assert!(out.contains("27 substripes in 3 read ops"), "{out}");
    let local_bytes = node_bytes(&stripe, 2, 9);

    // strategy global rebuilds the same content with different metrics
    fs::remove_dir_all(stripe.join("node2")).unwrap();
    let out = ok(dir, &[
        "repair", "--spec", "lrc.json", "--dir", "stripes/stripe0", "--lost", "2",
        "--strategy", "global",
    ]);
    assert!(out.contains("24 substripes"), "{out}");
    assert_eq!(node_bytes(&stripe, 2, 9), local_bytes);

    // auto at 1 KB substripes picks local (the worked small-file case)
    fs::remove_dir_all(stripe.join("node2")).unwrap();
    let out = ok(dir, &[
        "repair", "--spec", "lrc.json", "--dir", "stripes/stripe0", "--lost", "2",
        "--strategy", "auto",
    ]);
    assert!(out.contains("-> local"), "{out}");
    assert_eq!(node_bytes(&stripe, 2, 9), local_bytes);

    // auto at a 10 MB pricing override picks global
    fs::remove_dir_all(stripe.join("node2")).unwrap();
    let out = ok(dir, &[
        "repair", "--spec", "lrc.json", "--dir", "stripes/stripe0", "--lost", "2",
        "--strategy", "auto", "--substripe-size", "10485760",
    ]);
    assert!(out.contains("-> global"), "{out}");
    assert_eq!(node_bytes(&stripe, 2, 9), local_bytes);

    // decode from a mixed subset and compare byte-exactly
    ok(dir, &[
        "decode", "--spec", "lrc.json", "--dir", "stripes/stripe0", "--nodes",
        "1,2,3,4,5,7,9,10", "--out", "restored.bin",
    ]);
    assert_eq!(
        fs::read(dir.join("restored.bin")).unwrap(),
        fs::read(dir.join("input.bin")).unwrap()
    );

    // the stripe passes verification after repair
    let out = htlrc(dir, &["verify", "--spec", "lrc.json", "--dir", "stripes/stripe0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn global_lrc_stripe_repairs_a_lost_global_node() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &[
        "gen-global-lrc", "--k", "4", "--l", "2", "--g", "2", "--field", "gf256", "--seed", "3",
        "--out", "glrc.json",
    ]);
    test_file(dir, 2000);
    ok(dir, &[
        "encode", "--spec", "glrc.json", "--file", "input.bin", "--out-dir", "stripes",
    ]);
    // node 7 is the first global (4 data + 2 locals)
    fs::remove_dir_all(dir.join("stripes/stripe0/node7")).unwrap();
    ok(dir, &[
        "repair", "--spec", "glrc.json", "--dir", "stripes/stripe0", "--lost", "7",
    ]);
    let out = htlrc(dir, &["verify", "--spec", "glrc.json", "--dir", "stripes/stripe0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));

    // corrupt one substripe: verification must fail with code 4
    let victim = dir.join("stripes/stripe0/node1/s1");
    let mut bytes = fs::read(&victim).unwrap();
    bytes[0] ^= 0x55;
    fs::write(&victim, bytes).unwrap();
    let out = htlrc(dir, &["verify", "--spec", "glrc.json", "--dir", "stripes/stripe0"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn exit_codes_follow_the_convention() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    // validation error: missing required parameters
    let out = htlrc(dir, &["gen-code", "--out", "x.json"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: validation:"), "{err}");

    // io error: repairing a stripe that does not exist
    ok(dir, &[
        "gen-code", "--n", "6", "--k", "4", "--alpha", "2", "--field", "gf256", "--out",
        "code.json",
    ]);
    let out = htlrc(dir, &[
        "repair", "--spec", "code.json", "--dir", "nowhere/stripe0", "--lost", "1",
    ]);
    assert_eq!(out.status.code(), Some(3));

    // verification failure: the built-in reference code carries misprints
    ok(dir, &["gen-code", "--golden-9-6", "--out", "golden.json"]);
    let out = htlrc(dir, &["verify", "--spec", "golden.json"]);
    assert_eq!(out.status.code(), Some(4));

    // strategy without locality groups
    let out = htlrc(dir, &[
        "plan-repair", "--spec", "code.json", "--lost", "1", "--strategy", "local",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plan_dump_and_curves_are_parseable() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    ok(dir, &["gen-code", "--golden-9-6", "--out", "golden.json"]);
    let out = ok(dir, &[
        "plan-repair", "--spec", "golden.json", "--lost", "1", "--dump", "plan.json",
    ]);
    assert!(out.contains("24 substripes in 8 read ops"), "{out}");
    let plan: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("plan.json")).unwrap()).unwrap();
    assert_eq!(plan["lost_node"], 1);
    assert_eq!(plan["metrics"]["substripes"], 24);
    assert_eq!(plan["metrics"]["gamma"][0], 8);
    assert_eq!(plan["metrics"]["gamma"][1], 3);

    let csv = ok(dir, &["curves", "--k", "8", "--delta", "2", "--l", "2,4", "--n", "9..16"]);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,k,l,delta,gamma_local_branch,gamma_global_branch,gamma_min"
    );
    assert_eq!(csv.lines().count(), 1 + 2 * 8);
    assert!(csv.contains("9,8,2,2,0.500000000000,1.000000000000,0.500000000000"));
    assert!(csv.contains("11,8,4,2,0.250000000000,0.416666666667,0.250000000000"));

    // the worked small/large decision table
    let table = ok(dir, &["simulate", "--l", "2", "--substripe", "1024,10485760"]);
    let small: Vec<&str> = table.lines().filter(|l| l.contains(",1024,1,")).collect();
    assert!(small[0].ends_with("local"), "{}", small[0]);
    let large: Vec<&str> = table
        .lines()
        .filter(|l| l.contains(",10485760,1,"))
        .collect();
    assert!(large[0].ends_with("global"), "{}", large[0]);
}

#[test]
fn seed_env_var_makes_generation_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    for out in ["a.json", "b.json"] {
        let status = Command::new(env!("CARGO_BIN_EXE_htlrc"))
            .current_dir(dir)
            .env("HTLRC_SEED", "99")
            .args([
                "gen-code", "--n", "6", "--k", "4", "--alpha", "4", "--field", "gf256", "--out",
                out,
            ])
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(
        fs::read(dir.join("a.json")).unwrap(),
        fs::read(dir.join("b.json")).unwrap()
    );
}
