mod support;

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};
use support::Env;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
        .to_str()
        .unwrap()
        .to_string()
}

fn ontofm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ontofm"))
        .args(args)
        .env_remove("ONTOFM_ONTOLOGY")
        .env_remove("ONTOFM_ROOT")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn files(v: &Value) -> Vec<String> {
    v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["file"].as_str().unwrap().to_string())
        .collect()
}

#[test]
fn search_as_json() {
    let tiny = fixture("tiny.ontofm.json");
    let out = ontofm(&["search", "p1", "prj1", "--ontology", &tiny, "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(files(&v), ["f1", "f2", "f3"]);
    assert_eq!(v["results"][0]["score"], 2);
    assert_eq!(v["results"][0]["matched_terms"], json!(["p1", "prj1"]));
}

#[test]
fn scoped_constrained_search() {
    let tiny = fixture("tiny.ontofm.json");
    let out = ontofm(&[
        "search",
        "p1",
        "--ontology",
        &tiny,
        "--scope",
        "/home/u/docs/papers",
        "--constraint",
        "Date.value before 2011-05-01",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(files(&serde_json::from_str(&stdout(&out)).unwrap()), ["f1"]);
}

#[test]
fn search_table_output() {
    let tiny = fixture("tiny.ontofm.json");
    let out = ontofm(&["--ontology", &tiny, "search", "prj1", "p2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("SCORE"));
    assert!(
        lines[1].starts_with("2") && lines[1].contains("notes.txt"),
        "{text}"
    );
    assert_eq!(lines.len(), 4);
}

#[test]
fn validate_reports_the_dangling_id() {
    let out = ontofm(&["validate", &fixture("broken.ontofm.json")]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(
        err.contains("validation_error") && err.contains("ghost"),
        "{err}"
    );

    let out = ontofm(&["validate", &fixture("broken.ontofm.json"), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["error"]["code"], "validation_error");
    assert_eq!(v["error"]["detail"], "ghost");

    let out = ontofm(&["validate", &fixture("tiny.ontofm.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "ok: 5 concepts, 8 instances, 7 relations\n");
}

#[test]
fn domain_errors_exit_one() {
    let tiny = fixture("tiny.ontofm.json");
    let out = ontofm(&["search", "ghost", "--ontology", &tiny]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).starts_with("error: unknown_instance"),
        "{}",
        stderr(&out)
    );

    let out = ontofm(&[
        "search",
        "p1",
        "--ontology",
        &tiny,
        "--constraint",
        "Date.value ≈ x",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["error"]["code"], "invalid_constraint");

    let out = ontofm(&["suggest", "a", "--ontology", "/nonexistent/o.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let out = ontofm(&[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Usage"));
    let out = ontofm(&["search", "p1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--ontology"));
    let out = ontofm(&["search", "--ontology", &fixture("tiny.ontofm.json")]);
    assert_eq!(out.status.code(), Some(2));
    let out = ontofm(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = ontofm(&["ls", "--ontology", &fixture("tiny.ontofm.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--root"));

    let out = ontofm(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("suggest"));
}

#[test]
fn suggest_lists_prefix_matches_first() {
    let tiny = fixture("tiny.ontofm.json");
    let out = ontofm(&["suggest", "p", "--ontology", &tiny]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(
        rows[0].starts_with("paper-draft.pdf") && rows[0].ends_with("prefix"),
        "{text}"
    );
    assert!(
        rows[1].starts_with("SWPIM") && rows[1].ends_with("substring"),
        "{text}"
    );

    let out = ontofm(&[
        "suggest",
        "p",
        "--ontology",
        &tiny,
        "--limit",
        "1",
        "--json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["suggestions"].as_array().unwrap().len(), 1);
}

#[test]
fn graph_commands() {
    let tiny = fixture("tiny.ontofm.json");
    let out = ontofm(&[
        "graph",
        "prj1",
        "--expand",
        "f1",
        "--ontology",
        &tiny,
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let nodes: Vec<&str> = v["state"]["nodes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|n| n["id"].as_str().unwrap())
        .collect();
    assert_eq!(nodes, ["d1", "f1", "f2", "f3", "p1", "prj1"]);

    let out = ontofm(&[
        "graph",
        "prj1",
        "--tree",
        "f1",
        "--direction",
        "under",
        "--ontology",
        &tiny,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("f1 -authoredBy-> p1"), "{text}");
    assert!(!text.contains("f2"), "{text}");

    let out = ontofm(&["graph", "prj1", "--center", "p1", "--ontology", &tiny]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("not_found"));

    let out = ontofm(&[
        "graph",
        "--scope",
        "/home/u/docs/papers",
        "--ontology",
        &tiny,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "Date: d1 (2011-03-15)\nPerson: p1 (Alice), p2 (Bob)\nProject: prj1 (SWPIM)\n"
    );
}

#[test]
fn listing_and_sync_against_a_real_tree() {
    let env = Env::new();
    let onto = env.ontology_path.to_str().unwrap();
    let out = ontofm(&[
        "ls",
        "home/u/docs/papers",
        "--root",
        &env.root,
        "--ontology",
        onto,
        "--sort",
        "modified",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let names: Vec<&str> = v["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["notes.txt", "paper-draft.pdf"]);
    assert_eq!(v["files"][1]["instance"], "f1");

    let out = ontofm(&[
        "ls",
        "home/u/docs/papers",
        "home/u/docs/admin",
        "--root",
        &env.root,
        "--sort",
        "size",
        "--order",
        "desc",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4, "{text}");
    assert!(text.lines().nth(1).unwrap().ends_with("paper-draft.pdf"));

    let out = ontofm(&["ls", "../..", "--root", &env.root]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("outside_root"));

    std::fs::write(env.path("home/u/docs/stray.txt"), "x").unwrap();
    let out = ontofm(&["sync", "--root", &env.root, "--ontology", onto, "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["registered"], 3);
    let stray = env.path("home/u/docs/stray.txt");
    let onto_file = env.ontology_path.to_str().unwrap().to_string();
    assert_eq!(v["unregistered_paths"], json!([stray, onto_file]));
    assert_eq!(v["missing_paths"], json!([]));
}

#[test]
fn in_process_runner_matches_the_binary() {
    let tiny = fixture("tiny.ontofm.json");
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = ontofm::cli::run(
        [
            "ontofm",
            "search",
            "p1",
            "prj1",
            "--ontology",
            &tiny,
            "--json",
        ],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0);
    assert_eq!(
        out,
        ontofm(&["search", "p1", "prj1", "--ontology", &tiny, "--json"]).stdout
    );
}

#[test]
fn serve_starts_and_answers() {
    let env = Env::new();
    let port = std::net::TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_ontofm"))
        .args([
            "serve",
            "--ontology",
            env.ontology_path.to_str().unwrap(),
            "--root",
            &env.root,
        ])
        .args(["--port", &port.to_string()])
        .stderr(std::process::Stdio::null())
        .spawn()
        .unwrap();

    let mut response = String::new();
    for _ in 0..100 {
        if let Ok(mut stream) = std::net::TcpStream::connect(("127.0.0.1", port)) {
            use std::io::{Read, Write};
            stream
                .write_all(b"GET /api/ontology/stats HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n")
                .unwrap();
            stream.read_to_string(&mut response).unwrap();
            break;
        }
        std::thread::sleep(std::time::Duration::from_millis(50));
    }
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    assert!(
        response.ends_with(r#"{"concepts":5,"instances":8,"relations":7}"#),
        "{response}"
    );
}

#[test]
fn serve_refuses_a_broken_ontology() {
    let env = Env::new();
    let out = ontofm(&[
        "serve",
        "--ontology",
        &fixture("broken.ontofm.json"),
        "--root",
        &env.root,
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("ghost"));
}
