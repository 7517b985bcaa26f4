//! The shared ontology snapshot and its reload cycle.
//!
//! Readers grab an `Arc` to the current snapshot once per request and keep
//! using it; a reload builds a fresh snapshot off to the side and swaps the
//! pointer only when loading succeeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use ontofm_core::ontology::{LoadReport, Stats};
use ontofm_core::{load, Ontology};
use serde::Serialize;

use crate::error::{ApiError, ErrorCode};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReloadReport {
    pub status: &'static str,
    #[serde(flatten)]
    pub stats: Stats,
    pub warnings: Vec<String>,
}

impl ReloadReport {
    fn ok(o: &Ontology, report: LoadReport) -> Self {
        ReloadReport {
            status: "ok",
            stats: o.stats(),
            warnings: report.warnings,
        }
    }
}

pub fn load_file(path: &Path) -> Result<(Ontology, LoadReport), ApiError> {
    let bytes = fs::read(path).map_err(|e| {
        ApiError::new(
            ErrorCode::NotFound,
            format!("cannot read ontology: {e}"),
            path.display().to_string(),
        )
    })?;
    Ok(load(&bytes)?)
}

#[derive(Debug)]
pub struct SnapshotStore {
    path: PathBuf,
    current: RwLock<Arc<Ontology>>,
}

impl SnapshotStore {
    pub fn open(path: impl Into<PathBuf>) -> Result<(Self, ReloadReport), ApiError> {
        let path = path.into();
        let (o, report) = load_file(&path)?;
        let report = ReloadReport::ok(&o, report);
        Ok((
            SnapshotStore {
                path,
                current: RwLock::new(Arc::new(o)),
            },
            report,
        ))
    }

    pub fn from_ontology(path: impl Into<PathBuf>, o: Ontology) -> Self {
        SnapshotStore {
            path: path.into(),
            current: RwLock::new(Arc::new(o)),
        }
    }

    pub fn current(&self) -> Arc<Ontology> {
        self.current
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .clone()
    }

    /// Reloads from disk; on failure the previous snapshot stays in place.
    pub fn reload(&self) -> Result<ReloadReport, ApiError> {
        let (o, report) = load_file(&self.path)?;
        let report = ReloadReport::ok(&o, report);
        *self.current.write().unwrap_or_else(|p| p.into_inner()) = Arc::new(o);
        Ok(report)
    }
}
