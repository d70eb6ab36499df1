use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::thread;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn colstd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colstd"))
        .args(args)
        .env_remove("OPENAI_API_KEY")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn infer_admissions() {
    let out = colstd(&["infer", fixture("admissions.csv").to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "Admission Date: date\nAddress: address\n");
    let out = colstd(&["infer", fixture("admissions.csv").to_str().unwrap(), "--llm", "mock", "--json"]);
    assert_eq!(stdout(&out).trim(), r#"{"Admission Date":"date","Address":"address"}"#);
}

#[test]
fn candidates_restrict_the_answer() {
    let out = colstd(&["infer", fixture("admissions.csv").to_str().unwrap(), "--candidates", "date,phone_number"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "Admission Date: date\nAddress: unknown\n");
    let out = colstd(&["infer", fixture("admissions.csv").to_str().unwrap(), "--candidates", "date,bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unreadable_input_fails() {
    let out = colstd(&["infer", "/nonexistent/table.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cannot read"));
}

#[test]
fn ten_types_match_the_reviewed_truth() {
    let dir = tempfile::tempdir().unwrap();
    let cleaned = dir.path().join("out.csv");
    for llm in ["rules", "mock"] {
        let out = colstd(&[
            "standardize",
            fixture("ten_types.csv").to_str().unwrap(),
            "--llm",
            llm,
            "-o",
            cleaned.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        assert!(stderr(&out).contains("data standardization is completed"));
        let truth = std::fs::read_to_string(fixture("ten_types_truth.csv")).unwrap();
        assert_eq!(std::fs::read_to_string(&cleaned).unwrap(), truth, "{llm}");

        let out = colstd(&["evaluate", cleaned.to_str().unwrap(), fixture("ten_types_truth.csv").to_str().unwrap(), "--json"]);
        let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(report["rate"], 1.0);
    }
}

#[test]
fn set_and_requirements_change_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let cleaned = dir.path().join("out.csv");
    let out = colstd(&[
        "standardize",
        fixture("admissions.csv").to_str().unwrap(),
        "--set",
        "Address=unknown",
        "--requirements",
        "Dates should look like MM/DD/YYYY",
        "-o",
        cleaned.to_str().unwrap(),
        "-q",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).is_empty());
    let text = std::fs::read_to_string(&cleaned).unwrap();
    let first = text.lines().nth(1).unwrap();
    assert!(first.starts_with("09/25/2003,"), "{first}");
    let original = std::fs::read_to_string(fixture("admissions.csv")).unwrap();
    assert!(first.ends_with(original.lines().nth(1).unwrap().split_once(',').unwrap().1));

    let out = colstd(&["standardize", fixture("admissions.csv").to_str().unwrap(), "--set", "Nope=date"]);
    assert_eq!(out.status.code(), Some(2));
    let out = colstd(&["standardize", fixture("admissions.csv").to_str().unwrap(), "--set", "Address"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exhausted_retries_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cleaned = dir.path().join("out.csv");
    let args = |retries: &'static str| {
        vec![
            "standardize".to_owned(),
            fixture("admissions.csv").to_str().unwrap().to_owned(),
            "--llm".into(),
            "mock".into(),
            "--mock-fault".into(),
            "malformed-plan-once".into(),
            "--max-retries".into(),
            retries.into(),
            "-o".into(),
            cleaned.to_str().unwrap().into(),
        ]
    };
    let a0 = args("0");
    let out = colstd(&a0.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("failed after 1 attempt(s): malformed plan"));
    assert!(!cleaned.exists());

    let a1 = args("1");
    let out = colstd(&a1.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(out.status.success());
    assert!(stdout(&out).contains("after 2 attempt(s)"));
}

#[test]
fn evaluate_rates_and_shape_errors() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let c = dir.path().join("c.csv");
    std::fs::write(&a, "x,y\n1,2\n3,\n").unwrap();
    std::fs::write(&b, "y,x\n2,1\n4,3\n").unwrap();
    std::fs::write(&c, "x\n1\n3\n").unwrap();
    let p = |p: &PathBuf| p.to_str().unwrap().to_owned();
    let out = colstd(&["evaluate", &p(&a), &p(&a)]);
    assert!(stdout(&out).starts_with("rate: 100.0%"));
    let out = colstd(&["evaluate", &p(&a), &p(&b)]);
    assert!(stdout(&out).starts_with("rate: 75.0%"), "{}", stdout(&out));
    let out = colstd(&["evaluate", &p(&a), &p(&b), "--per-row", "--json"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["rate"], 1.5);
    let out = colstd(&["evaluate", &p(&a), &p(&c)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("shape mismatch"));
}

#[test]
fn mock_and_rules_never_touch_the_network() {
    let trap = TcpListener::bind("127.0.0.1:0").unwrap();
    trap.set_nonblocking(true).unwrap();
    let url = format!("http://{}", trap.local_addr().unwrap());
    let dir = tempfile::tempdir().unwrap();
    let cleaned = dir.path().join("out.csv");
    for llm in ["mock", "rules"] {
        let out = Command::new(env!("CARGO_BIN_EXE_colstd"))
            .args(["standardize", fixture("ten_types.csv").to_str().unwrap(), "-q", "--llm", llm])
            .args(["--base-url", &url, "-o", cleaned.to_str().unwrap()])
            .env("HTTP_PROXY", &url)
            .env("HTTPS_PROXY", &url)
            .env("ALL_PROXY", &url)
            .env("OPENAI_API_KEY", "sk-test")
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr(&out));
    }
    assert_eq!(trap.accept().unwrap_err().kind(), std::io::ErrorKind::WouldBlock);
}

/// Answers one chat completion request with `reply` and hands back the body.
fn fake_endpoint(reply: &'static str) -> (String, thread::JoinHandle<String>) {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/v1", listener.local_addr().unwrap());
    let handle = thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut reader = BufReader::new(stream.try_clone().unwrap());
        let mut length = 0;
        let mut line = String::new();
        loop {
            line.clear();
            reader.read_line(&mut line).unwrap();
            if line == "\r\n" {
                break;
            }
            if let Some((k, v)) = line.split_once(':') {
                if k.eq_ignore_ascii_case("content-length") {
                    length = v.trim().parse().unwrap();
                }
            }
        }
        let mut body = vec![0; length];
        reader.read_exact(&mut body).unwrap();
        let payload = serde_json::json!({ "choices": [{ "message": { "role": "assistant", "content": reply } }] }).to_string();
        let mut stream = stream;
        write!(
            stream,
            "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{payload}",
            payload.len()
        )
        .unwrap();
        String::from_utf8(body).unwrap()
    });
    (url, handle)
}

#[test]
fn openai_compatible_endpoint_is_used_for_inference() {
    let (url, server) = fake_endpoint("Sure.\n**Admission Date: date**\n**Address: I do not know**\n");
    let out = colstd(&["infer", fixture("admissions.csv").to_str().unwrap(), "--llm", "openai", "--base-url", &url]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "Admission Date: date\nAddress: unknown\n");
    let request: serde_json::Value = serde_json::from_str(&server.join().unwrap()).unwrap();
    assert_eq!(request["model"], "gpt-4o-2024-08-06");
    assert_eq!(request["temperature"], 0.0);
    assert_eq!(request["seed"], 42);
    assert_eq!(request["messages"][0]["role"], "system");
    assert!(request["messages"][0]["content"].as_str().unwrap().contains("Admission Date"));
}

#[test]
fn openai_without_key_or_url_is_rejected() {
    let out = colstd(&["infer", fixture("admissions.csv").to_str().unwrap(), "--llm", "openai"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("OPENAI_API_KEY"), "{}", stderr(&out));
}
