//! End-to-end runs of the `rscram` binary.

use std::io::Write;
use std::process::{Command, Output, Stdio};

const SALT_HEX: &str = "00112233445566778899aabbccddeeff";

// Reproduced by a separate Python implementation of the whole pipeline.
const REFERENCE_PHC: &str = "$rscram$v=1$g=4,l=2$ABEiM0RVZneImaq7zN3u/w$omM9KwBXlllZc6Ldq1jl2QxQqda7hDm7SzDYC6fcRw4";

fn rscram(args: &[&str], stdin: &[u8], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_rscram"));
    cmd.args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin).unwrap();
    child.wait_with_output().unwrap()
}

fn run(args: &[&str], stdin: &[u8]) -> Output {
    rscram(args, stdin, &[("RSCRAM_NO_COLOR", "1")])
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn reference_hash() {
    let o = run(&["hash", "--garlic", "4", "--lambda", "2", "--salt-hex", SALT_HEX], b"password");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), REFERENCE_PHC);
    // one trailing newline is not part of the password
    let o = run(&["hash", "--garlic", "4", "--lambda", "2", "--salt-hex", SALT_HEX], b"password\n");
    assert_eq!(stdout(&o).trim(), REFERENCE_PHC);
}

#[test]
fn verify_exit_codes() {
    assert_eq!(run(&["verify", REFERENCE_PHC], b"password").status.code(), Some(0));
    let o = run(&["verify", REFERENCE_PHC], b"Password");
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).trim(), r#"{"match":false}"#);
    assert_eq!(run(&["verify", "$rscram$v=1$g=4,l=2$bad"], b"password").status.code(), Some(2));
    assert_eq!(run(&["verify", "$argon2id$v=19$m=1,t=1,p=1$AAAA$AAAA"], b"x").status.code(), Some(2));
}

#[test]
fn random_salt_hashes_differ_and_verify() {
    let a = stdout(&run(&["hash", "--garlic", "3", "--lambda", "1", "--random-salt"], b"pw"));
    let b = stdout(&run(&["hash", "--garlic", "3", "--lambda", "1"], b"pw"));
    assert_ne!(a, b);
    for phc in [a.trim(), b.trim()] {
        assert_eq!(run(&["verify", phc], b"pw").status.code(), Some(0));
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["hash", "--salt-hex", SALT_HEX, "--random-salt"][..],
        &["hash", "--password", "x"],
        &["hash", "--garlic", "0", "--salt-hex", SALT_HEX],
        &["graph", "--garlic", "3", "--salt-hex", SALT_HEX, "--export", "svg"],
        &["pebble", "--garlic", "3", "--salt-hex", SALT_HEX, "--strategy", "lazy"],
        &["frobnicate"],
        &[],
    ] {
        let o = run(args, b"");
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(o.stdout.is_empty(), "{args:?} wrote to stdout");
        assert!(!o.stderr.is_empty(), "{args:?} gave no diagnostic");
    }
}

#[test]
fn no_color_env_strips_escapes() {
    let o = run(&["hash", "--bogus"], b"");
    assert!(!o.stderr.contains(&0x1b));
    let o = run(&["hash", "--garlic", "3", "--salt-hex", "00"], b"");
    assert!(!o.stderr.contains(&0x1b));
}

#[test]
fn graph_export_is_deterministic() {
    let args = ["graph", "--garlic", "4", "--salt-hex", SALT_HEX, "--export", "dot"];
    let a = run(&args, b"");
    let b = run(&args, b"");
    assert_eq!(a.status.code(), Some(0));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);

    let dir = std::env::temp_dir().join(format!("rscram-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g.json");
    let o = run(
        &["graph", "--garlic", "3", "--salt-hex", SALT_HEX, "--export", "json", "--out", path.to_str().unwrap()],
        b"",
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["g"], 3);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn analyze_reports_json() {
    let o = run(&["analyze", "--superconcentrator", "--exhaustive", "--garlic", "3", "--salt-hex", SALT_HEX], b"");
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["trials"], 12869);
}

#[test]
fn pebble_writes_csv() {
    let dir = std::env::temp_dir().join(format!("rscram-csv-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("trace.csv");
    let o = run(
        &["pebble", "--garlic", "3", "--salt-hex", SALT_HEX, "--strategy", "greedy", "--budget", "14", "--csv", path.to_str().unwrap()],
        b"",
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert!(v["metrics"]["space"].as_u64().unwrap() <= 14);
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("step,placements,pebbles"));
    assert_eq!(lines.count() as u64, v["metrics"]["time"].as_u64().unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn password_never_echoed() {
    let secret = "zq-UNIQUE-secret-7781";
    let hex_secret = hex::encode(secret);
    let mut outputs = Vec::new();
    let h = run(&["hash", "--garlic", "3", "--lambda", "1", "--salt-hex", SALT_HEX], secret.as_bytes());
    let phc = stdout(&h);
    outputs.push(h);
    outputs.push(run(&["verify", phc.trim()], secret.as_bytes()));
    outputs.push(run(&["verify", phc.trim()], b"wrong"));
    outputs.push(run(&["verify", "$rscram$broken"], secret.as_bytes()));
    outputs.push(run(&["hash", "--garlic", "99"], secret.as_bytes()));
    outputs.push(rscram(&["hash", "--bogus"], secret.as_bytes(), &[]));
    for o in &outputs {
        for stream in [&o.stdout, &o.stderr] {
            let text = String::from_utf8_lossy(stream);
            assert!(!text.contains(secret), "password leaked: {text}");
            assert!(!text.contains(&hex_secret), "hex password leaked: {text}");
        }
    }
}

#[test]
fn bench_reports_exact_counts() {
    let o = run(&["bench", "--garlic-range", "3..4", "--lambda-range", "1..2"], b"");
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let p = &r["predicted"];
        let total: u64 = ["shuffle", "seeding", "evaluation"].iter().map(|k| p[k].as_u64().unwrap()).sum();
        assert_eq!(r["hash_calls"].as_u64().unwrap(), total);
        assert!(r["wall_ms"].as_f64().unwrap() >= 0.0);
    }
}
