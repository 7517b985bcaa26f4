//! Read-only view of the folder tree under a configured root.
//!
//! Paths are handled as normalized absolute strings and compared byte-wise.
//! Symbolic links are never followed; they are left out of listings.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fs::{self, Metadata};
use std::io;
use std::path::Path;
use std::time::SystemTime;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;
use walkdir::WalkDir;

use crate::ontology::{normalize_path, path_within, InstanceId, Ontology};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FsError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("path escapes the root: {0}")]
    OutsideRoot(String),
    #[error("i/o error at {path}: {message}")]
    Io { path: String, message: String },
}

impl FsError {
    fn io(path: &str, e: impl std::fmt::Display) -> Self {
        FsError::Io {
            path: path.to_string(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SortKey {
    #[default]
    Name,
    Created,
    Modified,
    Size,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SortOrder {
    #[default]
    Asc,
    Desc,
}

/// UTC timestamp with second precision, serialized as `YYYY-MM-DDTHH:MM:SSZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(pub i64);

impl Timestamp {
    fn from_system(t: SystemTime) -> Self {
        Timestamp(DateTime::<Utc>::from(t).timestamp())
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match DateTime::<Utc>::from_timestamp(self.0, 0) {
            Some(dt) => s.serialize_str(&dt.format("%Y-%m-%dT%H:%M:%SZ").to_string()),
            None => s.serialize_i64(self.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FolderNode {
    pub path: String,
    pub name: String,
    /// Whether the folder has at least one subfolder.
    pub has_children: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub path: String,
    pub name: String,
    pub size_bytes: u64,
    pub created: Timestamp,
    /// Set when the filesystem reports no birth time and `created` repeats `modified`.
    pub created_is_fallback: bool,
    pub modified: Timestamp,
    pub instance: Option<InstanceId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Listing {
    pub folders: Vec<FolderNode>,
    pub files: Vec<FileEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct SyncReport {
    pub registered: usize,
    pub unregistered_paths: Vec<String>,
    pub missing_paths: Vec<String>,
}

fn name_order(a: &str, b: &str) -> Ordering {
    a.to_lowercase()
        .cmp(&b.to_lowercase())
        .then_with(|| a.cmp(b))
}

fn last_segment(path: &str) -> &str {
    path.rsplit('/').next().unwrap_or(path)
}

/// Sorts by `key` in `order`, then by name ascending, then by path.
pub fn sort_entries(files: &mut [FileEntry], key: SortKey, order: SortOrder) {
    files.sort_by(|a, b| {
        let primary = match key {
            SortKey::Name => name_order(&a.name, &b.name),
            SortKey::Created => a.created.cmp(&b.created),
            SortKey::Modified => a.modified.cmp(&b.modified),
            SortKey::Size => a.size_bytes.cmp(&b.size_bytes),
        };
        let primary = match order {
            SortOrder::Asc => primary,
            SortOrder::Desc => primary.reverse(),
        };
        primary
            .then_with(|| name_order(&a.name, &b.name))
            .then_with(|| a.path.cmp(&b.path))
    });
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsMirror {
    root: String,
}

impl FsMirror {
    /// Mirror rooted at `root`, which must be an existing directory. The root
    /// is canonicalized once so later comparisons are purely lexical.
    pub fn new(root: impl AsRef<Path>) -> Result<Self, FsError> {
        let shown = root.as_ref().display().to_string();
        let canon =
            fs::canonicalize(root.as_ref()).map_err(|_| FsError::NotFound(shown.clone()))?;
        if !canon.is_dir() {
            return Err(FsError::NotFound(shown));
        }
        let root = canon
            .to_str()
            .ok_or_else(|| FsError::io(&shown, "root path is not valid UTF-8"))
            .and_then(|s| normalize_path(s).map_err(|e| FsError::io(&shown, e)))?;
        Ok(FsMirror { root })
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    /// Normalizes an absolute or root-relative path and checks it stays under
    /// the root.
    pub fn resolve(&self, folder: &str) -> Result<String, FsError> {
        let joined = if folder.starts_with('/') {
            folder.to_string()
        } else {
            format!("{}/{}", self.root, folder)
        };
        let path = normalize_path(&joined).map_err(|_| FsError::OutsideRoot(folder.to_string()))?;
        if !path_within(&path, &self.root) {
            return Err(FsError::OutsideRoot(folder.to_string()));
        }
        Ok(path)
    }

    fn directory(&self, folder: &str) -> Result<String, FsError> {
        let path = self.resolve(folder)?;
        match fs::symlink_metadata(&path) {
            Ok(m) if m.is_dir() => Ok(path),
            _ => Err(FsError::NotFound(folder.to_string())),
        }
    }

    fn read_dir(&self, dir: &str) -> Result<(Vec<FolderNode>, Vec<FileEntry>), FsError> {
        let mut folders = Vec::new();
        let mut files = Vec::new();
        let entries = fs::read_dir(dir).map_err(|e| FsError::io(dir, e))?;
        for entry in entries {
            let entry = entry.map_err(|e| FsError::io(dir, e))?;
            let name = entry.file_name().to_string_lossy().into_owned();
            let path = if dir == "/" {
                format!("/{name}")
            } else {
                format!("{dir}/{name}")
            };
            let meta = entry.metadata().map_err(|e| FsError::io(&path, e))?;
            let ty = meta.file_type();
            if ty.is_dir() {
                folders.push(FolderNode {
                    has_children: has_subfolder(&path),
                    path,
                    name,
                });
            } else if ty.is_file() {
                files.push(file_entry(path, name, &meta));
            }
        }
        Ok((folders, files))
    }

    /// First-level subfolders and direct files of `folder`, each sorted by
    /// name (case-insensitive).
    pub fn list_children(&self, o: &Ontology, folder: &str) -> Result<Listing, FsError> {
        let dir = self.directory(folder)?;
        let (mut folders, mut files) = self.read_dir(&dir)?;
        folders.sort_by(|a, b| name_order(&a.name, &b.name).then_with(|| a.path.cmp(&b.path)));
        attach_instances(o, &mut files);
        sort_entries(&mut files, SortKey::Name, SortOrder::Asc);
        Ok(Listing { folders, files })
    }

    /// Direct files of every selected folder (subfolders are not descended),
    /// deduplicated by path.
    pub fn list_files<S: AsRef<str>>(
        &self,
        o: &Ontology,
        selected: &[S],
        key: SortKey,
        order: SortOrder,
    ) -> Result<Vec<FileEntry>, FsError> {
        let dirs = selected
            .iter()
            .map(|s| self.directory(s.as_ref()))
            .collect::<Result<BTreeSet<_>, _>>()?;
        let mut seen = BTreeSet::new();
        let mut files = Vec::new();
        for dir in &dirs {
            let (_, found) = self.read_dir(dir)?;
            files.extend(found.into_iter().filter(|f| seen.insert(f.path.clone())));
        }
        attach_instances(o, &mut files);
        sort_entries(&mut files, key, order);
        Ok(files)
    }

    /// Metadata for one file path, when it exists as a regular file under the
    /// root.
    pub fn stat(&self, o: &Ontology, path: &str) -> Option<FileEntry> {
        let path = self.resolve(path).ok()?;
        let meta = fs::symlink_metadata(&path).ok().filter(Metadata::is_file)?;
        let mut entry = file_entry(path.clone(), last_segment(&path).to_string(), &meta);
        entry.instance = o.file_by_path(&path).map(|i| i.id.clone());
        Some(entry)
    }

    /// Compares the regular files under the root with the ontology's File
    /// instances. Nothing is written.
    pub fn sync(&self, o: &Ontology) -> Result<SyncReport, FsError> {
        let mut on_disk = BTreeSet::new();
        for entry in WalkDir::new(&self.root).follow_links(false) {
            let entry = entry.map_err(|e| {
                let path = e
                    .path()
                    .map(|p| p.display().to_string())
                    .unwrap_or_else(|| self.root.clone());
                FsError::io(&path, io::Error::from(e))
            })?;
            if entry.file_type().is_file() {
                let raw = entry.path().to_string_lossy();
                on_disk.insert(normalize_path(&raw).map_err(|e| FsError::io(&raw, e))?);
            }
        }

        let mut report = SyncReport::default();
        for path in &on_disk {
            if o.file_by_path(path).is_some() {
                report.registered += 1;
            } else {
                report.unregistered_paths.push(path.clone());
            }
        }
        let known: BTreeSet<&str> = o
            .instances()
            .filter(|i| i.is_file())
            .filter_map(|i| i.path())
            .collect();
        report.missing_paths = known
            .into_iter()
            .filter(|p| !on_disk.contains(*p))
            .map(str::to_owned)
            .collect();
        Ok(report)
    }
}

fn has_subfolder(dir: &str) -> bool {
    fs::read_dir(dir)
        .map(|mut it| {
            it.any(|e| {
                e.and_then(|e| e.file_type())
                    .map(|t| t.is_dir())
                    .unwrap_or(false)
            })
        })
        .unwrap_or(false)
}

fn file_entry(path: String, name: String, meta: &Metadata) -> FileEntry {
    let modified = meta
        .modified()
        .map(Timestamp::from_system)
        .unwrap_or(Timestamp(0));
    let (created, created_is_fallback) = match meta.created() {
        Ok(t) => (Timestamp::from_system(t), false),
        Err(_) => (modified, true),
    };
    FileEntry {
        path,
        name,
        size_bytes: meta.len(),
        created,
        created_is_fallback,
        modified,
        instance: None,
    }
}

fn attach_instances(o: &Ontology, files: &mut [FileEntry]) {
    for f in files {
        f.instance = o.file_by_path(&f.path).map(|i| i.id.clone());
    }
}
