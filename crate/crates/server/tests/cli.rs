use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_provenance"));
    c.env("RUST_LOG", "error");
    c
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

#[test]
fn run_pipeline_prints_a_row_per_item() {
    let dir = tempfile::tempdir().unwrap();
    let demo = fixtures().join("demo");
    let out = bin()
        .args(["--data-dir", dir.path().to_str().unwrap(), "run-pipeline", "--json", "--fixture"])
        .arg(demo.join("feed.jsonl"))
        .arg("--corpus")
        .arg(demo.join("corpus"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["rows"].as_array().unwrap().len(), 20);

    let check = bin().args(["--data-dir", dir.path().to_str().unwrap(), "verify-chain"]).output().unwrap();
    assert!(check.status.success());
}

#[test]
fn empty_feed_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["--data-dir", dir.path().to_str().unwrap(), "run-pipeline", "--fixture"])
        .arg(fixtures().join("demo/empty.jsonl"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(bin().arg("frobnicate").output().unwrap().status.code(), Some(2));
    assert_eq!(bin().args(["--port", "http", "serve"]).output().unwrap().status.code(), Some(2));
    let missing = bin().args(["--data-dir", d, "run-pipeline", "--fixture", "/no/such/feed.jsonl"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
    assert!(!missing.stderr.is_empty());
}

#[test]
fn corrupt_ledger_refuses_to_serve() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let register = bin()
        .args(["--data-dir", d, "ingest", "--limit", "3", "--fixture"])
        .arg(fixtures().join("demo/feed.jsonl"))
        .output()
        .unwrap();
    assert!(register.status.success(), "{}", String::from_utf8_lossy(&register.stderr));
    assert_eq!(String::from_utf8_lossy(&register.stdout).lines().count(), 3);

    let chain = dir.path().join("ledger/chain.jsonl");
    let mut bytes = std::fs::read(&chain).unwrap();
    let second_line = bytes.iter().position(|b| *b == b'\n').unwrap() + 1;
    let at = second_line + 40;
    bytes[at] = if bytes[at] == b'0' { b'1' } else { b'0' };
    std::fs::write(&chain, &bytes).unwrap();

    let verify = bin().args(["--data-dir", d, "verify-chain"]).output().unwrap();
    assert_eq!(verify.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&verify.stdout).unwrap();
    assert_eq!(report["first_bad_index"], 1);

    let serve = bin().args(["--data-dir", d, "--port", "0", "serve"]).output().unwrap();
    assert_eq!(serve.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&serve.stderr).contains("corrupt at block 1"));
}

#[test]
fn port_in_use_is_a_startup_error() {
    let dir = tempfile::tempdir().unwrap();
    let taken = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = taken.local_addr().unwrap().port().to_string();
    let out = bin().args(["--data-dir", dir.path().to_str().unwrap(), "--port", &port, "serve"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot listen"));
}

#[test]
fn analyze_prints_the_verdict() {
    let text = fixtures().join("text");
    let out = bin()
        .arg("analyze")
        .arg("--text")
        .arg(text.join("spun_4.json"))
        .arg("--corpus")
        .arg(fixtures().join("demo/corpus"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((v["total_facts"].as_u64(), v["verified_facts"].as_u64()), (Some(6), Some(2)));
    assert_eq!(v["status"], "caution");
}

#[test]
fn register_reads_a_json_item() {
    let dir = tempfile::tempdir().unwrap();
    let item = dir.path().join("item.json");
    std::fs::write(
        &item,
        r#"{"url": "https://example-news.example/cli", "title": "Short note", "body": "A short note.", "publisher": "Example News", "published_at": "2026-09-02T10:00:00Z"}"#,
    )
    .unwrap();
    let data = dir.path().join("data");
    let out = bin().arg("--data-dir").arg(&data).arg("register").arg(&item).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["created"], true);
}
