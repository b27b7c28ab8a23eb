//! End-to-end tests of the binary: exit codes, output formats and the
//! cache-driven flagging path.

use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quartic2"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Parse `key=value` lines.
fn kv(out: &Output) -> HashMap<String, String> {
    stdout(out)
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[test]
fn decompose_prime() {
    let out = run(&["decompose", "7"]);
    assert!(out.status.success());
    let m = kv(&out);
    assert_eq!(m["u"], "13");
    assert_eq!(m["v"], "9");
    assert_eq!(m["inv"], "1");
}

#[test]
fn decompose_invalid_inputs_exit_2() {
    let out = run(&["decompose", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8(out.stderr).unwrap().is_empty());
    assert_eq!(run(&["decompose", "5"]).status.code(), Some(2));
    assert_eq!(run(&["decompose", "2"]).status.code(), Some(2));
}

#[test]
fn unknown_flags_and_subcommands_exit_2() {
    assert_eq!(run(&["decompose", "7", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["census"]).status.code(), Some(2)); // missing --limit
}

#[test]
fn predict_31_with_conjecture() {
    let out = run(&["predict", "31", "--conjecture"]);
    assert!(out.status.success());
    let m = kv(&out);
    assert_eq!(m["h2p_pred"], "3");
    assert_eq!(m["h2p_exact"], "1");
    assert_eq!(m["h2p_branch"], "LW-15mod16");
    assert_eq!(m["hK_pred"], "2");
    assert_eq!(m["hK_exact"], "0");
    assert_eq!(m["hK_conj_pred"], "2");
    assert_eq!(m["hK_conj_exact"], "1");
}

#[test]
fn predict_7_relation_line() {
    let m = kv(&run(&["predict", "7"]));
    assert_eq!(m["h2p_branch"], "Hasse-7mod16");
    assert_eq!(m["relation"], "1");
}

#[test]
fn classnum_prime_and_disc() {
    let m = kv(&run(&["classnum", "7"]));
    assert_eq!(m["D"], "-56");
    assert_eq!(m["h"], "4");
    assert_eq!(m["ord2"], "2");
    assert_eq!(m["ambiguous"], "2");

    let m = kv(&run(&["classnum", "--disc", "-24"]));
    assert_eq!(m["h"], "2");

    // Mutually exclusive arguments are diagnosed.
    assert_eq!(run(&["classnum", "7", "--disc", "-24"]).status.code(), Some(2));
    assert_eq!(run(&["classnum"]).status.code(), Some(2));
    // Positive discriminant is invalid input.
    assert_eq!(run(&["classnum", "--disc", "8"]).status.code(), Some(2));
}

#[test]
fn symbols_for_both_split_classes() {
    let m = kv(&run(&["symbols", "31"]));
    assert_eq!(m["jacobi2"], "1");
    assert_eq!(m["inv"], "-1");
    assert!(m.contains_key("spin"));
    assert!(m.contains_key("twisted"));

    let m = kv(&run(&["symbols", "17"]));
    assert_eq!(m["quartic2"], "-1");
    assert!(!m.contains_key("inv"));

    // Inert prime: only the Jacobi symbol applies.
    let m = kv(&run(&["symbols", "5"]));
    assert_eq!(m["jacobi2"], "-1");
    assert!(!m.contains_key("spin"));
}

#[test]
fn scan_csv_matches_batch_schema() {
    let out = run(&[
        "scan", "--from", "3", "--to", "100", "--exact-limit", "100", "--format", "csv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("schema=1"));
    assert_eq!(
        lines.next(),
        Some("p,res32,u,v,inv,q2,h2p_pred,h2p_exactflag,h2p_actual,hK_pred,hK_exactflag,hK_conj")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 24);
    assert!(rows.iter().all(|r| r.split(',').count() == 12));
    // Spot-check p = 7.
    let row7 = rows.iter().find(|r| r.starts_with("7,")).unwrap();
    assert_eq!(*row7, "7,7,13,9,1,,2,1,2,1,1,");
}

#[test]
fn scan_json_uses_schema_field_names() {
    let out = run(&[
        "scan", "--from", "3", "--to", "40", "--exact-limit", "40", "--format", "json",
        "--conjecture",
    ]);
    assert!(out.status.success());
    let records: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let records = records.as_array().unwrap();
    assert_eq!(records.len(), 11);
    let r7 = records.iter().find(|r| r["p"] == 7).unwrap();
    assert_eq!(r7["res32"], 7);
    assert_eq!(r7["u"], 13);
    assert_eq!(r7["v"], 9);
    assert_eq!(r7["inv"], 1);
    assert_eq!(r7["h2p_pred"], 2);
    assert_eq!(r7["h2p_exactflag"], true);
    assert_eq!(r7["h2p_actual"], 2);
    assert_eq!(r7["hK_pred"], 1);
    assert_eq!(r7["hK_conj"], 1);
    // Absent fields are omitted, not null.
    assert!(r7.get("q2").is_none());
    let r3 = records.iter().find(|r| r["p"] == 3).unwrap();
    assert!(r3.get("u").is_none());
}

#[test]
fn scan_parallel_output_is_byte_identical() {
    let serial = run(&[
        "scan", "--from", "3", "--to", "2000", "--exact-limit", "2000", "--format", "csv",
        "--jobs", "1",
    ]);
    let parallel = run(&[
        "scan", "--from", "3", "--to", "2000", "--exact-limit", "2000", "--format", "csv",
        "--jobs", "4",
    ]);
    assert!(serial.status.success() && parallel.status.success());
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn scan_residue_filter_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.csv");
    let out = run(&[
        "scan", "--from", "3", "--to", "1000", "--mod", "32", "--class", "15", "--format",
        "csv", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty()); // data went to the file
    let text = std::fs::read_to_string(&path).unwrap();
    let ps: Vec<u64> = text
        .lines()
        .skip(2)
        .map(|r| r.split(',').next().unwrap().parse().unwrap())
        .collect();
    let expected: Vec<u64> = quartic2::modular::PrimeStream::with_residue(3, 1001, 32, 15)
        .unwrap()
        .collect();
    assert_eq!(ps, expected);
    assert!(ps.contains(&47) && ps.contains(&911));
}

#[test]
fn scan_flag_pairing_and_bad_exact_limit() {
    let out = run(&["scan", "--from", "3", "--to", "100", "--mod", "8", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "scan", "--from", "3", "--to", "100", "--exact-limit", "500", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn census_partition_property() {
    let out = run(&["census", "--limit", "20000"]);
    assert!(out.status.success());
    let m = kv(&out);
    let minus: u64 = m["count_inv_minus"].parse().unwrap();
    let plus: u64 = m["count_inv_plus"].parse().unwrap();
    let total: u64 = m["count_15mod32"].parse().unwrap();
    assert_eq!(minus + plus, total);
    assert!(m.contains_key("note"));
    // Below the minimum limit: invalid input.
    assert_eq!(run(&["census", "--limit", "50"]).status.code(), Some(2));
}

#[test]
fn density_table_shape() {
    let out = run(&["density", "--limit", "2000", "--checkpoints", "1000,2000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("x,n_primes"));
    assert!(lines[1].starts_with("1000,168,"));
    // Descending checkpoints are rejected.
    let out = run(&["density", "--limit", "2000", "--checkpoints", "2000,1000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_small_limit_passes() {
    let out = run(&["verify", "--limit", "2000"]);
    assert!(out.status.success());
    let m = kv(&out);
    assert_eq!(m["verify"], "PASS");
    assert_eq!(m["oracle_flagged"], "0");
    assert_eq!(m["lemma_failures"], "0");
}

#[test]
fn corrupted_cache_is_flagged_and_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.csv");
    // A cached oracle value that contradicts the exact prediction for p=7.
    std::fs::write(
        &path,
        "schema=1\np,res32,u,v,inv,q2,h2p_pred,h2p_exactflag,h2p_actual,hK_pred,hK_exactflag,hK_conj\n7,7,13,9,1,,2,1,5,1,1,\n",
    )
    .unwrap();
    let out = run(&[
        "scan", "--from", "3", "--to", "20", "--exact-limit", "20", "--format", "csv",
        "--cache",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("flagged: p=7"), "stderr: {err}");

    // The same scan with a fresh cache is clean and reusable.
    let clean = dir.path().join("clean.csv");
    let first = run(&[
        "scan", "--from", "3", "--to", "20", "--exact-limit", "20", "--format", "csv",
        "--cache",
        clean.to_str().unwrap(),
    ]);
    assert!(first.status.success());
    let second = run(&[
        "scan", "--from", "3", "--to", "20", "--exact-limit", "20", "--format", "csv",
        "--cache",
        clean.to_str().unwrap(),
    ]);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[cfg(unix)]
#[test]
fn closed_pipe_terminates_quietly() {
    use std::os::unix::process::ExitStatusExt;
    use std::process::Stdio;
    // Drop the read end immediately; the census keeps writing and must die
    // on SIGPIPE instead of panicking with a backtrace.
    let mut child = bin()
        .args(["census", "--limit", "1000000"])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    drop(child.stdout.take());
    let status = child.wait().unwrap();
    assert_eq!(status.signal(), Some(libc_sigpipe()));
    let mut err = String::new();
    use std::io::Read;
    child.stderr.take().unwrap().read_to_string(&mut err).unwrap();
    assert!(!err.contains("panicked"), "stderr: {err}");
}

#[cfg(unix)]
fn libc_sigpipe() -> i32 {
    13
}

#[test]
fn cache_resume_skips_oracle_work(){
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.csv");
    let args = [
        "scan", "--from", "3", "--to", "3000", "--exact-limit", "3000", "--format", "csv",
        "--cache",
        path.to_str().unwrap(),
    ];
    let first = run(&args);
    assert!(first.status.success());
    let cache_after_first = std::fs::read_to_string(&path).unwrap();
    let second = run(&args);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(cache_after_first, std::fs::read_to_string(&path).unwrap());
    assert!(Path::new(&path).exists());
}
