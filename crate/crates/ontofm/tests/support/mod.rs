#![allow(dead_code)]

pub mod gen;

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use filetime::FileTime;
use http_body_util::BodyExt;
use ontofm::api::{router, AppState};
use ontofm::config::Config;
use ontofm_core::fixture;
use serde_json::Value;
use tempfile::TempDir;
use tower::ServiceExt;

/// Fixed modification times (seconds since the epoch) for the fixture files.
pub const MTIMES: [(&str, i64); 3] = [
    ("home/u/docs/papers/paper-draft.pdf", 1_304_000_000),
    ("home/u/docs/papers/notes.txt", 1_301_000_000),
    ("home/u/docs/admin/budget.xls", 1_307_000_000),
];

/// The fixture ontology and folder tree under a scratch directory.
pub struct Env {
    pub dir: TempDir,
    /// Canonical scratch directory; also the mirror root.
    pub root: String,
    pub ontology_path: PathBuf,
    pub app: Arc<AppState>,
}

impl Env {
    pub fn new() -> Env {
        let dir = tempfile::tempdir().unwrap();
        let root = fs::canonicalize(dir.path())
            .unwrap()
            .to_str()
            .unwrap()
            .to_string();
        fixture::write_tree(Path::new(&root)).unwrap();
        for (rel, secs) in MTIMES {
            filetime::set_file_mtime(
                Path::new(&root).join(rel),
                FileTime::from_unix_time(secs, 0),
            )
            .unwrap();
        }
        let ontology_path = Path::new(&root).join("tiny.ontofm.json");
        fs::write(&ontology_path, fixture::tiny_json_under(&root)).unwrap();
        let app = Arc::new(AppState::open(Config::new(&ontology_path, &root)).unwrap());
        Env {
            dir,
            root,
            ontology_path,
            app,
        }
    }

    pub fn router(&self) -> Router {
        router(self.app.clone())
    }

    pub fn path(&self, rel: &str) -> String {
        format!("{}/{}", self.root, rel.trim_start_matches('/'))
    }

    pub async fn get(&self, uri: &str) -> (StatusCode, String) {
        send(
            self.router(),
            Request::get(uri).body(Body::empty()).unwrap(),
        )
        .await
    }

    pub async fn post(&self, uri: &str, body: &Value) -> (StatusCode, String) {
        self.post_raw(uri, body.to_string()).await
    }

    pub async fn post_raw(&self, uri: &str, body: impl Into<Body>) -> (StatusCode, String) {
        let req = Request::post(uri)
            .header("content-type", "application/json")
            .body(body.into())
            .unwrap();
        send(self.router(), req).await
    }

    /// Replaces the scratch directory with `<root>` and blanks file creation
    /// times, which depend on the platform and cannot be pinned by a test.
    pub fn redact(&self, body: &str) -> Value {
        let mut v: Value = serde_json::from_str(&body.replace(&self.root, "<root>")).unwrap();
        blank_creation_times(&mut v);
        v
    }
}

async fn send(app: Router, req: Request<Body>) -> (StatusCode, String) {
    let resp = app.oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

fn blank_creation_times(v: &mut Value) {
    match v {
        Value::Object(map) => {
            if map.contains_key("created_is_fallback") {
                map.insert("created".into(), Value::String("<platform>".into()));
                map.insert(
                    "created_is_fallback".into(),
                    Value::String("<platform>".into()),
                );
            }
            map.values_mut().for_each(blank_creation_times);
        }
        Value::Array(items) => items.iter_mut().for_each(blank_creation_times),
        _ => {}
    }
}

pub fn json(body: &str) -> Value {
    serde_json::from_str(body).unwrap_or_else(|e| panic!("not JSON ({e}): {body}"))
}

pub fn error_code(body: &str) -> String {
    json(body)["error"]["code"]
        .as_str()
        .unwrap_or_default()
        .to_string()
}

/// One scripted client session: every request and redacted response.
pub async fn golden_session(env: &Env) -> Value {
    let mut steps = Vec::new();
    let mut record = |name: &str, request: Value, status: StatusCode, body: &str| {
        steps.push(serde_json::json!({
            "step": name,
            "request": request,
            "status": status.as_u16(),
            "response": env.redact(body),
        }));
    };

    let (s, b) = env.get("/api/suggest?q=al").await;
    record("suggest", serde_json::json!("GET /api/suggest?q=al"), s, &b);

    let search = serde_json::json!({ "terms": ["p1", "prj1"], "scope": { "all": true } });
    let (s, b) = env.post("/api/search", &search).await;
    record("search", search, s, &b);
    let graph = json(&b)["graph"].clone();

    let toggle = serde_json::json!({ "state": graph, "node": "f1" });
    let (s, b) = env.post("/api/graph/toggle", &toggle).await;
    record("graph/toggle", serde_json::json!({ "node": "f1" }), s, &b);

    let constrained = serde_json::json!({
        "terms": ["p1", "prj1"],
        "scope": { "all": true },
        "constraints": [{ "concept": "Date", "property": "value", "op": "before", "value": "2011-05-01" }],
    });
    let (s, b) = env.post("/api/search", &constrained).await;
    record("search/constraint", constrained, s, &b);

    let uri = "/api/files?folders=home/u/docs/papers,home/u/docs/admin&sort=modified&order=desc";
    let (s, b) = env.get(uri).await;
    record("files", serde_json::json!(format!("GET {uri}")), s, &b);

    Value::Array(steps)
}

pub fn golden_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/session.json")
}

/// Compares `actual` with the stored golden file byte for byte. Set
/// `UPDATE_GOLDEN=1` to rewrite it.
pub fn check_golden(actual: &Value) -> Result<(), String> {
    let rendered = serde_json::to_string_pretty(actual).unwrap() + "\n";
    let path = golden_path();
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, &rendered).unwrap();
    }
    let stored =
        fs::read_to_string(&path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    if stored == rendered {
        Ok(())
    } else {
        let line = stored
            .lines()
            .zip(rendered.lines())
            .position(|(a, b)| a != b)
            .map_or(
                stored.lines().count().min(rendered.lines().count()) + 1,
                |i| i + 1,
            );
        Err(format!(
            "session differs from {} at line {line}",
            path.display()
        ))
    }
}
