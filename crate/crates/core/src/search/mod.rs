//! Semantic file retrieval over an ontology snapshot.
//!
//! A query names one or more entered terms (instances). A file is a result
//! when it is directly related to at least one term, and its score is the
//! number of distinct terms it relates to. Results can then be narrowed by
//! folder scope and by constraints on related instances.

mod constraint;
mod suggest;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::ontology::{
    normalize_path, path_within, ConceptId, Instance, InstanceId, Ontology, OntologyError,
};

pub use constraint::{
    apply_constraint, satisfies, Constraint, ConstraintOp, ConstraintSpec, RawValue,
};
pub use suggest::{suggest, MatchKind, Suggestion, DEFAULT_SUGGEST_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

impl From<OntologyError> for SearchError {
    fn from(e: OntologyError) -> Self {
        match e {
            OntologyError::UnknownInstance(id) => SearchError::UnknownInstance(id),
            OntologyError::UnknownConcept(id) => SearchError::UnknownConcept(id),
            other => SearchError::InvalidQuery(other.to_string()),
        }
    }
}

/// Non-empty set of normalized absolute folder paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FolderSet(BTreeSet<String>);

impl FolderSet {
    pub fn new<I, S>(paths: I) -> Result<Self, SearchError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let set = paths
            .into_iter()
            .map(|p| normalize_path(p.as_ref()).map_err(SearchError::InvalidQuery))
            .collect::<Result<BTreeSet<_>, _>>()?;
        if set.is_empty() {
            return Err(SearchError::InvalidQuery("folder scope is empty".into()));
        }
        Ok(FolderSet(set))
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    /// True when `path` lies strictly beneath one of the folders.
    pub fn contains(&self, path: &str) -> bool {
        self.0
            .iter()
            .any(|dir| dir != path && path_within(path, dir))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Scope {
    #[default]
    All,
    Folders(FolderSet),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Query {
    terms: Vec<InstanceId>,
    pub scope: Scope,
    pub constraints: Vec<Constraint>,
}

impl Query {
    /// Query over `terms`; repeated terms keep their first position.
    pub fn new<I, T>(terms: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: Into<InstanceId>,
    {
        let mut seen = BTreeSet::new();
        let terms = terms
            .into_iter()
            .map(Into::into)
            .filter(|t: &InstanceId| seen.insert(t.clone()))
            .collect();
        Query {
            terms,
            ..Query::default()
        }
    }

    pub fn with_scope(mut self, scope: Scope) -> Self {
        self.scope = scope;
        self
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn terms(&self) -> &[InstanceId] {
        &self.terms
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredFile<'a> {
    pub file: &'a Instance,
    pub score: usize,
    /// Terms the file relates to, in query order.
    pub matched_terms: Vec<InstanceId>,
}

pub fn in_scope(file: &Instance, scope: &Scope) -> bool {
    match scope {
        Scope::All => true,
        Scope::Folders(folders) => file.path().is_some_and(|p| folders.contains(p)),
    }
}

/// Ranked files for `query`: score descending, then label (case-insensitive),
/// then path, then id.
pub fn search<'a>(o: &'a Ontology, query: &Query) -> Result<Vec<ScoredFile<'a>>, SearchError> {
    for c in &query.constraints {
        c.check_against(o)?;
    }

    let mut hits: BTreeMap<&InstanceId, ScoredFile<'a>> = BTreeMap::new();
    for term in &query.terms {
        for file in o.related_files(term.as_str())? {
            hits.entry(&file.id)
                .or_insert_with(|| ScoredFile {
                    file,
                    score: 0,
                    matched_terms: Vec::new(),
                })
                .matched_terms
                .push(term.clone());
        }
    }

    let mut results: Vec<ScoredFile<'a>> = hits
        .into_values()
        .map(|mut s| {
            s.score = s.matched_terms.len();
            s
        })
        .filter(|s| in_scope(s.file, &query.scope))
        .filter(|s| {
            query
                .constraints
                .iter()
                .all(|c| constraint::file_satisfies(o, s.file, c))
        })
        .collect();

    results.sort_by_cached_key(|s| {
        (
            Reverse(s.score),
            s.file.label.to_lowercase(),
            s.file.path().map(str::to_owned),
            s.file.id.clone(),
        )
    });
    Ok(results)
}

/// Non-File instances directly related to any File under `folders`, grouped
/// by concept.
pub fn concepts_for_folders(
    o: &Ontology,
    folders: &FolderSet,
) -> BTreeMap<ConceptId, BTreeSet<InstanceId>> {
    let mut out: BTreeMap<ConceptId, BTreeSet<InstanceId>> = BTreeMap::new();
    let scope = Scope::Folders(folders.clone());
    for file in o.instances().filter(|i| i.is_file() && in_scope(i, &scope)) {
        let neighbors = o.adjacent(file.id.as_str()).expect("file ids resolve");
        for n in neighbors.into_iter().filter(|n| !n.is_file()) {
            out.entry(n.concept.clone())
                .or_default()
                .insert(n.id.clone());
        }
    }
    out
}
