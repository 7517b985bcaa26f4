//! Request and response documents plus the operations behind them.
//!
//! Everything here is synchronous and works on one ontology snapshot, so the
//! HTTP handlers and the CLI share the same code path.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use ontofm_core::graph::{GraphDocument, GraphState, TreeDirection};
use ontofm_core::ontology::Stats;
use ontofm_core::search::{self, ConstraintOp, MatchKind, RawValue};
use ontofm_core::{
    initial_graph, ConceptId, Constraint, ConstraintSpec, FileEntry, FolderNode, FolderSet,
    FsMirror, InstanceId, Ontology, Query, Scope, SortKey, SortOrder,
};
use serde::{Deserialize, Serialize};

use crate::error::{ApiError, ErrorCode};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchRequest {
    pub terms: Vec<String>,
    #[serde(default)]
    pub scope: Option<ScopeRequest>,
    #[serde(default)]
    pub constraints: Vec<ConstraintInput>,
    #[serde(default)]
    pub sort: Option<SortRequest>,
}

/// `{"all": true}` or `{"folders": [...]}`.
#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScopeRequest {
    #[serde(default)]
    pub all: Option<bool>,
    #[serde(default)]
    pub folders: Option<Vec<String>>,
}

impl ScopeRequest {
    pub fn to_scope(&self) -> Result<Scope, ApiError> {
        match (self.all, &self.folders) {
            (Some(true), None) | (None, None) => Ok(Scope::All),
            (None, Some(folders)) => Ok(Scope::Folders(FolderSet::new(folders)?)),
            _ => Err(ApiError::validation(
                "scope must be either {\"all\": true} or {\"folders\": [...]}",
                "scope",
            )),
        }
    }
}

/// A constraint either as text (`"Date.value before 2011-05-01"`) or as fields.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ConstraintInput {
    Text(String),
    Fields(ConstraintFields),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintFields {
    pub concept: String,
    pub property: String,
    pub op: String,
    #[serde(default)]
    pub value: Option<RawValue>,
    #[serde(default)]
    pub values: Option<Vec<RawValue>>,
}

impl ConstraintInput {
    pub fn to_spec(&self) -> Result<ConstraintSpec, ApiError> {
        let invalid = |m: String| ApiError::new(ErrorCode::InvalidConstraint, m, "");
        match self {
            ConstraintInput::Text(expr) => Ok(ConstraintSpec::parse(expr)?),
            ConstraintInput::Fields(f) => {
                let op = ConstraintOp::parse(&f.op).ok_or_else(|| {
                    invalid(format!("invalid constraint: unknown operator `{}`", f.op))
                })?;
                let values = match (&f.value, &f.values) {
                    (Some(v), None) => vec![v.clone()],
                    (None, Some(vs)) => vs.clone(),
                    _ => {
                        return Err(invalid(
                            "invalid constraint: give exactly one of `value` or `values`".into(),
                        ))
                    }
                };
                Ok(ConstraintSpec {
                    concept: f.concept.clone(),
                    property: f.property.clone(),
                    op,
                    values,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResultSort {
    #[default]
    Score,
    Name,
    Created,
    Modified,
    Size,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SortRequest {
    pub key: ResultSort,
    #[serde(default)]
    pub order: Option<SortOrder>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResultItem {
    pub file: InstanceId,
    pub label: String,
    pub path: Option<String>,
    pub score: usize,
    pub matched_terms: Vec<InstanceId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchResponse {
    pub results: Vec<ResultItem>,
    pub graph: GraphDocument,
}

pub fn resolve_constraints(
    o: &Ontology,
    inputs: &[ConstraintInput],
) -> Result<Vec<Constraint>, ApiError> {
    inputs
        .iter()
        .map(|c| Ok(c.to_spec()?.resolve(o)?))
        .collect()
}

/// Runs a search and builds the matching initial graph. `mirror` is needed
/// only for sorting on file metadata.
pub fn search(
    o: &Ontology,
    mirror: Option<&FsMirror>,
    req: &SearchRequest,
) -> Result<SearchResponse, ApiError> {
    let scope = req.scope.clone().unwrap_or_default().to_scope()?;
    let mut query = Query::new(req.terms.iter().map(String::as_str)).with_scope(scope);
    for c in resolve_constraints(o, &req.constraints)? {
        query = query.with_constraint(c);
    }
    let hits = search::search(o, &query)?;
    let mut results: Vec<ResultItem> = hits
        .into_iter()
        .map(|s| ResultItem {
            file: s.file.id.clone(),
            label: s.file.label.clone(),
            path: s.file.path().map(str::to_owned),
            score: s.score,
            matched_terms: s.matched_terms,
        })
        .collect();
    if let Some(sort) = req.sort {
        sort_results(o, mirror, &mut results, sort)?;
    }
    let graph = initial_graph(o, query.terms())?;
    Ok(SearchResponse {
        results,
        graph: graph.to_document(o),
    })
}

/// Re-sorts ranked results. Ties, and files with no metadata on disk (which
/// go last), keep their rank order.
fn sort_results(
    o: &Ontology,
    mirror: Option<&FsMirror>,
    results: &mut [ResultItem],
    sort: SortRequest,
) -> Result<(), ApiError> {
    let desc = sort.order == Some(SortOrder::Desc);
    let key = match sort.key {
        ResultSort::Score => {
            if sort.order == Some(SortOrder::Asc) {
                results.reverse();
            }
            return Ok(());
        }
        ResultSort::Name => {
            results.sort_by(|a, b| {
                let ord = a.label.to_lowercase().cmp(&b.label.to_lowercase());
                if desc {
                    ord.reverse()
                } else {
                    ord
                }
            });
            return Ok(());
        }
        ResultSort::Created => SortKey::Created,
        ResultSort::Modified => SortKey::Modified,
        ResultSort::Size => SortKey::Size,
    };
    let mirror = mirror.ok_or_else(|| {
        ApiError::validation("sorting by file metadata needs a root directory", "sort")
    })?;
    let metric = |e: &FileEntry| match key {
        SortKey::Created => e.created.0,
        SortKey::Modified => e.modified.0,
        _ => e.size_bytes as i64,
    };
    let mut keyed: Vec<(Option<i64>, ResultItem)> = results
        .iter()
        .cloned()
        .map(|r| {
            let k = r
                .path
                .as_deref()
                .and_then(|p| mirror.stat(o, p))
                .map(|e| metric(&e));
            (k, r)
        })
        .collect();
    keyed.sort_by(|(a, _), (b, _)| match (a, b) {
        (Some(a), Some(b)) if desc => b.cmp(a),
        (Some(a), Some(b)) => a.cmp(b),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    });
    for (slot, (_, r)) in results.iter_mut().zip(keyed) {
        *slot = r;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuggestItem {
    pub instance: InstanceId,
    pub label: String,
    pub concept: ConceptId,
    pub match_kind: MatchKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuggestResponse {
    pub suggestions: Vec<SuggestItem>,
}

pub fn suggest(o: &Ontology, typed: &str, limit: usize) -> Result<SuggestResponse, ApiError> {
    if limit == 0 {
        return Err(ApiError::validation("limit must be at least 1", "limit"));
    }
    let suggestions = search::suggest(o, typed, limit)
        .into_iter()
        .map(|s| SuggestItem {
            instance: s.instance,
            label: s.label,
            concept: s.concept,
            match_kind: s.match_kind,
        })
        .collect();
    Ok(SuggestResponse { suggestions })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphOp {
    Toggle,
    Center,
    Tree,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphRequest {
    pub state: GraphDocument,
    pub node: String,
    #[serde(default)]
    pub direction: Option<TreeDirection>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GraphResponse {
    pub state: GraphDocument,
}

pub fn graph_op(
    o: &Ontology,
    op: GraphOp,
    req: GraphRequest,
    depth: usize,
) -> Result<GraphResponse, ApiError> {
    let state = GraphState::from_document(req.state, o)?;
    let next = match op {
        GraphOp::Toggle => state.toggle(o, &req.node)?,
        GraphOp::Center => state.center(&req.node)?,
        GraphOp::Tree => {
            let direction = req.direction.ok_or_else(|| {
                ApiError::validation("tree needs a direction (under|above)", "direction")
            })?;
            state.tree(o, &req.node, direction, depth)?
        }
    };
    Ok(GraphResponse {
        state: next.to_document(o),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FolderConceptsResponse {
    pub concepts: BTreeMap<ConceptId, Vec<InstanceId>>,
}

pub fn concepts_for_folders(
    o: &Ontology,
    folders: &[String],
) -> Result<FolderConceptsResponse, ApiError> {
    let set = FolderSet::new(folders)?;
    let concepts = search::concepts_for_folders(o, &set)
        .into_iter()
        .map(|(c, ids)| (c, ids.into_iter().collect()))
        .collect();
    Ok(FolderConceptsResponse { concepts })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FolderResponse {
    pub folders: Vec<FolderNode>,
    pub files: Vec<FileEntry>,
}

pub fn folder(
    o: &Ontology,
    mirror: &FsMirror,
    path: Option<&str>,
) -> Result<FolderResponse, ApiError> {
    let listing = mirror.list_children(o, path.unwrap_or(""))?;
    Ok(FolderResponse {
        folders: listing.folders,
        files: listing.files,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FilesResponse {
    pub files: Vec<FileEntry>,
}

pub fn files(
    o: &Ontology,
    mirror: &FsMirror,
    folders: &[String],
    key: SortKey,
    order: SortOrder,
) -> Result<FilesResponse, ApiError> {
    if folders.is_empty() {
        return Err(ApiError::validation(
            "select at least one folder",
            "folders",
        ));
    }
    Ok(FilesResponse {
        files: mirror.list_files(o, folders, key, order)?,
    })
}

pub fn stats(o: &Ontology) -> Stats {
    o.stats()
}

/// Splits a comma-separated folder list, dropping empty entries.
pub fn split_folders(raw: &str) -> Vec<String> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_owned)
        .collect()
}
