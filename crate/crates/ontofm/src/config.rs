use std::fs;
use std::path::PathBuf;

use ontofm_core::graph::DEFAULT_TREE_DEPTH;
use ontofm_core::search::DEFAULT_SUGGEST_LIMIT;

use crate::error::{ApiError, ErrorCode};

pub const DEFAULT_PORT: u16 = 7311;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    pub ontology_path: PathBuf,
    pub root_dir: PathBuf,
    pub port: u16,
    pub suggest_limit: usize,
    pub tree_depth_limit: usize,
    /// Directory of web client assets served at `/`.
    pub static_dir: Option<PathBuf>,
}

impl Config {
    pub fn new(ontology_path: impl Into<PathBuf>, root_dir: impl Into<PathBuf>) -> Self {
        Config {
            ontology_path: ontology_path.into(),
            root_dir: root_dir.into(),
            port: DEFAULT_PORT,
            suggest_limit: DEFAULT_SUGGEST_LIMIT,
            tree_depth_limit: DEFAULT_TREE_DEPTH,
            static_dir: None,
        }
    }

    pub fn validate(&self) -> Result<(), ApiError> {
        let shown = self.ontology_path.display().to_string();
        fs::File::open(&self.ontology_path).map_err(|e| {
            ApiError::new(
                ErrorCode::NotFound,
                format!("cannot read ontology: {e}"),
                &shown,
            )
        })?;
        if !self.root_dir.is_dir() {
            return Err(ApiError::new(
                ErrorCode::NotFound,
                "root directory does not exist",
                self.root_dir.display().to_string(),
            ));
        }
        if self.suggest_limit == 0 {
            return Err(ApiError::validation(
                "suggest limit must be at least 1",
                "suggest_limit",
            ));
        }
        Ok(())
    }
}
