//! Command line front end.
//!
//! Exit codes: 0 on success, 1 when the ontology or filesystem rejects the
//! request, 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::net::{Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use ontofm_core::graph::{GraphState, TreeDirection, DEFAULT_TREE_DEPTH};
use ontofm_core::search::DEFAULT_SUGGEST_LIMIT;
use ontofm_core::{initial_graph, FsMirror, InstanceId, Ontology, SortKey, SortOrder};
use serde::Serialize;

use crate::api::{self, AppState};
use crate::config::{Config, DEFAULT_PORT};
use crate::error::ApiError;
use crate::service::{self, ConstraintInput, ResultSort, ScopeRequest, SearchRequest, SortRequest};
use crate::snapshot::load_file;

#[derive(Debug, Parser)]
#[command(
    name = "ontofm",
    version,
    about = "Locate files through the concepts of a personal ontology"
)]
struct Cli {
    /// Ontology document (.ontofm.json)
    #[arg(long, global = true, env = "ONTOFM_ONTOLOGY")]
    ontology: Option<PathBuf>,
    /// Root of the mirrored folder tree
    #[arg(long, global = true, env = "ONTOFM_ROOT")]
    root: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = DEFAULT_PORT)]
    port: u16,
    /// Print machine-readable JSON instead of tables
    #[arg(long, global = true)]
    json: bool,
    /// Limit a search to files under this folder (repeatable)
    #[arg(long = "scope", global = true, value_name = "DIR")]
    scopes: Vec<String>,
    /// Constraint such as "Date.value before 2011-05-01" (repeatable)
    #[arg(long = "constraint", global = true, value_name = "EXPR")]
    constraints: Vec<String>,
    #[arg(long, global = true)]
    limit: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load and validate an ontology document
    Validate { file: Option<PathBuf> },
    /// Suggest instances whose label contains TEXT
    Suggest { text: String },
    /// Rank files by how many of the given instances they relate to
    Search {
        #[arg(required = true)]
        terms: Vec<String>,
        #[arg(long, value_enum, default_value_t = CliResultSort::Score)]
        sort: CliResultSort,
        #[arg(long, value_enum)]
        order: Option<CliOrder>,
    },
    /// List a folder's subfolders and files, or the files of several folders
    Ls {
        folders: Vec<String>,
        #[arg(long, value_enum, default_value_t = CliSortKey::Name)]
        sort: CliSortKey,
        #[arg(long, value_enum, default_value_t = CliOrder::Asc)]
        order: CliOrder,
    },
    /// Show the concept graph for some instances, or the concepts of the --scope folders
    Graph {
        terms: Vec<String>,
        /// Toggle a node's expansion (repeatable, applied in order)
        #[arg(long, value_name = "NODE")]
        expand: Vec<String>,
        /// Replace the view with a tree rooted at NODE
        #[arg(long, value_name = "NODE")]
        tree: Option<String>,
        #[arg(long, value_enum, default_value_t = CliDirection::Under)]
        direction: CliDirection,
        #[arg(long, default_value_t = DEFAULT_TREE_DEPTH)]
        depth: usize,
        #[arg(long, value_name = "NODE")]
        center: Option<String>,
    },
    /// Compare the files under --root with the ontology's File instances
    Sync,
    /// Serve the HTTP API
    Serve {
        /// Web client assets served at /
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliResultSort {
    Score,
    Name,
    Created,
    Modified,
    Size,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliSortKey {
    Name,
    Created,
    Modified,
    Size,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliOrder {
    Asc,
    Desc,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CliDirection {
    Under,
    Above,
}

impl From<CliOrder> for SortOrder {
    fn from(o: CliOrder) -> Self {
        match o {
            CliOrder::Asc => SortOrder::Asc,
            CliOrder::Desc => SortOrder::Desc,
        }
    }
}

impl From<CliSortKey> for SortKey {
    fn from(k: CliSortKey) -> Self {
        match k {
            CliSortKey::Name => SortKey::Name,
            CliSortKey::Created => SortKey::Created,
            CliSortKey::Modified => SortKey::Modified,
            CliSortKey::Size => SortKey::Size,
        }
    }
}

impl From<CliResultSort> for ResultSort {
    fn from(k: CliResultSort) -> Self {
        match k {
            CliResultSort::Score => ResultSort::Score,
            CliResultSort::Name => ResultSort::Name,
            CliResultSort::Created => ResultSort::Created,
            CliResultSort::Modified => ResultSort::Modified,
            CliResultSort::Size => ResultSort::Size,
        }
    }
}

impl From<CliDirection> for TreeDirection {
    fn from(d: CliDirection) -> Self {
        match d {
            CliDirection::Under => TreeDirection::Under,
            CliDirection::Above => TreeDirection::Above,
        }
    }
}

enum Failure {
    Usage(String),
    Domain(ApiError),
}

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        Failure::Domain(e)
    }
}

type CmdResult = Result<String, Failure>;

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are reported as "errors" by clap
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return 2;
            }
            let _ = write!(out, "{}", e.render());
            return 0;
        }
    };
    let json = cli.json;
    match execute(cli) {
        Ok(text) => {
            let _ = write!(out, "{text}");
            0
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nUsage: ontofm [OPTIONS] <COMMAND>\nFor more information, try '--help'.");
            2
        }
        Err(Failure::Domain(e)) => {
            if json {
                let _ = writeln!(out, "{}", e.body());
            } else {
                let _ = writeln!(err, "error: {e}");
            }
            1
        }
    }
}

impl Cli {
    fn ontology_path(&self) -> Result<&PathBuf, Failure> {
        self.ontology
            .as_ref()
            .ok_or_else(|| Failure::Usage("missing --ontology <PATH>".into()))
    }

    fn load(&self) -> Result<Ontology, Failure> {
        Ok(load_file(self.ontology_path()?)?.0)
    }

    fn mirror(&self) -> Result<FsMirror, Failure> {
        let root = self
            .root
            .as_ref()
            .ok_or_else(|| Failure::Usage("missing --root <DIR>".into()))?;
        Ok(FsMirror::new(root).map_err(ApiError::from)?)
    }

    fn optional_mirror(&self) -> Result<Option<FsMirror>, Failure> {
        match self.root {
            Some(_) => self.mirror().map(Some),
            None => Ok(None),
        }
    }
}

fn render<T: Serialize>(json: bool, value: &T, human: impl FnOnce(&T) -> String) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(value).expect("responses serialize");
        s.push('\n');
        s
    } else {
        human(value)
    }
}

fn execute(cli: Cli) -> CmdResult {
    match &cli.command {
        Command::Validate { file } => {
            let path = match file {
                Some(f) => f,
                None => cli.ontology_path()?,
            };
            let (o, report) = load_file(path)?;
            let stats = o.stats();
            let doc = serde_json::json!({
                "status": "ok",
                "concepts": stats.concepts,
                "instances": stats.instances,
                "relations": stats.relations,
                "warnings": report.warnings,
            });
            Ok(render(cli.json, &doc, |_| {
                let mut s = format!(
                    "ok: {} concepts, {} instances, {} relations\n",
                    stats.concepts, stats.instances, stats.relations
                );
                for w in &report.warnings {
                    s.push_str(&format!("warning: {w}\n"));
                }
                s
            }))
        }
        Command::Suggest { text } => {
            let o = cli.load()?;
            let resp = service::suggest(&o, text, cli.limit.unwrap_or(DEFAULT_SUGGEST_LIMIT))?;
            Ok(render(cli.json, &resp, |r| {
                table(
                    &["LABEL", "CONCEPT", "ID", "MATCH"],
                    r.suggestions
                        .iter()
                        .map(|s| {
                            vec![
                                s.label.clone(),
                                s.concept.to_string(),
                                s.instance.to_string(),
                                format!("{:?}", s.match_kind).to_lowercase(),
                            ]
                        })
                        .collect(),
                )
            }))
        }
        Command::Search { terms, sort, order } => {
            let o = cli.load()?;
            let mirror = cli.optional_mirror()?;
            let req = SearchRequest {
                terms: terms.clone(),
                scope: (!cli.scopes.is_empty()).then(|| ScopeRequest {
                    all: None,
                    folders: Some(cli.scopes.clone()),
                }),
                constraints: cli
                    .constraints
                    .iter()
                    .cloned()
                    .map(ConstraintInput::Text)
                    .collect(),
                sort: Some(SortRequest {
                    key: (*sort).into(),
                    order: order.map(Into::into),
                }),
            };
            let resp = service::search(&o, mirror.as_ref(), &req)?;
            let body = serde_json::json!({ "results": resp.results });
            Ok(render(cli.json, &body, |_| {
                table(
                    &["SCORE", "FILE", "LABEL", "PATH", "MATCHED"],
                    resp.results
                        .iter()
                        .map(|r| {
                            vec![
                                r.score.to_string(),
                                r.file.to_string(),
                                r.label.clone(),
                                r.path.clone().unwrap_or_default(),
                                join(&r.matched_terms),
                            ]
                        })
                        .collect(),
                )
            }))
        }
        Command::Ls {
            folders,
            sort,
            order,
        } => {
            let o = match &cli.ontology {
                Some(_) => cli.load()?,
                None => Ontology::empty(),
            };
            let mirror = cli.mirror()?;
            let (key, order) = ((*sort).into(), (*order).into());
            if folders.len() <= 1 {
                let mut listing =
                    service::folder(&o, &mirror, folders.first().map(String::as_str))?;
                ontofm_core::fs_mirror::sort_entries(&mut listing.files, key, order);
                Ok(render(cli.json, &listing, |l| {
                    let mut rows: Vec<Vec<String>> = l
                        .folders
                        .iter()
                        .map(|f| {
                            vec![
                                "dir".into(),
                                String::new(),
                                String::new(),
                                String::new(),
                                f.name.clone(),
                            ]
                        })
                        .collect();
                    rows.extend(l.files.iter().map(file_row));
                    table(&["KIND", "SIZE", "MODIFIED", "INSTANCE", "NAME"], rows)
                }))
            } else {
                let resp = service::files(&o, &mirror, folders, key, order)?;
                Ok(render(cli.json, &resp, |r| {
                    table(
                        &["KIND", "SIZE", "MODIFIED", "INSTANCE", "NAME"],
                        r.files.iter().map(file_row).collect(),
                    )
                }))
            }
        }
        Command::Graph {
            terms,
            expand,
            tree,
            direction,
            depth,
            center,
        } => {
            let o = cli.load()?;
            if terms.is_empty() && !cli.scopes.is_empty() {
                let resp = service::concepts_for_folders(&o, &cli.scopes)?;
                return Ok(render(cli.json, &resp, |r| {
                    let mut s = String::new();
                    for (concept, ids) in &r.concepts {
                        let labelled: Vec<String> = ids
                            .iter()
                            .map(|id| {
                                format!(
                                    "{} ({})",
                                    id,
                                    o.instance(id.as_str()).map_or("", |i| &i.label)
                                )
                            })
                            .collect();
                        s.push_str(&format!("{concept}: {}\n", labelled.join(", ")));
                    }
                    s
                }));
            }
            let roots: Vec<InstanceId> =
                terms.iter().map(|t| InstanceId::from(t.as_str())).collect();
            let mut state = initial_graph(&o, &roots).map_err(ApiError::from)?;
            for node in expand {
                state = state.toggle(&o, node).map_err(ApiError::from)?;
            }
            if let Some(node) = tree {
                state = state
                    .tree(&o, node, (*direction).into(), *depth)
                    .map_err(ApiError::from)?;
            }
            if let Some(node) = center {
                state = state.center(node).map_err(ApiError::from)?;
            }
            let doc = serde_json::json!({ "state": state.to_document(&o) });
            Ok(render(cli.json, &doc, |_| describe_graph(&o, &state)))
        }
        Command::Sync => {
            let o = cli.load()?;
            let report = cli.mirror()?.sync(&o).map_err(ApiError::from)?;
            Ok(render(cli.json, &report, |r| {
                let mut s = format!("registered: {}\n", r.registered);
                s.push_str(&format!("unregistered: {}\n", r.unregistered_paths.len()));
                for p in &r.unregistered_paths {
                    s.push_str(&format!("  {p}\n"));
                }
                s.push_str(&format!("missing: {}\n", r.missing_paths.len()));
                for p in &r.missing_paths {
                    s.push_str(&format!("  {p}\n"));
                }
                s
            }))
        }
        Command::Serve { static_dir } => {
            let root = cli
                .root
                .clone()
                .ok_or_else(|| Failure::Usage("missing --root <DIR>".into()))?;
            let mut config = Config::new(cli.ontology_path()?.clone(), root);
            config.port = cli.port;
            config.static_dir = static_dir.clone();
            if let Some(limit) = cli.limit {
                config.suggest_limit = limit;
            }
            serve(config)
        }
    }
}

fn serve(config: Config) -> CmdResult {
    let _ = tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .try_init();
    let addr = SocketAddr::from((Ipv4Addr::LOCALHOST, config.port));
    let state = Arc::new(AppState::open(config)?);
    let runtime = tokio::runtime::Runtime::new().map_err(|e| {
        ApiError::new(
            crate::error::ErrorCode::NotFound,
            format!("cannot start runtime: {e}"),
            "",
        )
    })?;
    runtime.block_on(api::serve(state, addr)).map_err(|e| {
        ApiError::new(
            crate::error::ErrorCode::NotFound,
            format!("server failed: {e}"),
            addr.to_string(),
        )
    })?;
    Ok(String::new())
}

fn join(ids: &[InstanceId]) -> String {
    ids.iter()
        .map(InstanceId::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

fn file_row(f: &ontofm_core::FileEntry) -> Vec<String> {
    let modified = serde_json::to_value(f.modified)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default();
    vec![
        "file".into(),
        f.size_bytes.to_string(),
        modified,
        f.instance
            .as_ref()
            .map(ToString::to_string)
            .unwrap_or_default(),
        f.name.clone(),
    ]
}

fn describe_graph(o: &Ontology, s: &GraphState) -> String {
    let mut rows = Vec::new();
    for id in &s.visible {
        let inst = o.instance(id.as_str());
        let mut marks = String::new();
        if s.focus.as_ref() == Some(id) {
            marks.push('*');
        }
        if s.is_root(id) {
            marks.push('R');
        }
        if s.expanded.contains(id) {
            marks.push('+');
        }
        rows.push(vec![
            marks,
            id.to_string(),
            inst.map(|i| i.label.clone()).unwrap_or_default(),
            inst.map(|i| i.concept.to_string()).unwrap_or_default(),
            s.provenance
                .get(id)
                .map(|p| join(&p.iter().cloned().collect::<Vec<_>>()))
                .unwrap_or_default(),
        ]);
    }
    let mut out = table(&["", "NODE", "LABEL", "CONCEPT", "VIA"], rows);
    for e in &s.edges {
        out.push_str(&format!("{} -{}-> {}\n", e.subject, e.predicate, e.object));
    }
    out
}

/// Left-aligned text table; the last column is not padded.
fn table(headers: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let last = cells.len().saturating_sub(1);
        let mut s = String::new();
        for (i, cell) in cells.into_iter().enumerate() {
            if i == last {
                s.push_str(cell);
            } else {
                s.push_str(&format!("{cell:<w$}  ", w = widths[i]));
            }
        }
        s.trim_end().to_string() + "\n"
    };
    let mut out = line(headers.to_vec());
    for row in &rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}
