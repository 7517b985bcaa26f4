//! The canonical tiny ontology and a matching on-disk folder tree.
//!
//! Three people-and-project files under `/home/u/docs`. Tests and demos can
//! rebase every path under a scratch directory so the ontology and a real
//! tree agree.

use std::fs;
use std::io;
use std::path::Path;

use crate::ontology::{load, Ontology};

pub const TINY_ONTOLOGY: &str = include_str!("../fixtures/tiny.ontofm.json");

/// Relation `p1 knows ghost` references an instance that does not exist.
pub const BROKEN_ONTOLOGY: &str = include_str!("../fixtures/broken.ontofm.json");

/// Fixture paths relative to the tree root.
pub const TREE_FILES: [&str; 3] = [
    "home/u/docs/papers/paper-draft.pdf",
    "home/u/docs/papers/notes.txt",
    "home/u/docs/admin/budget.xls",
];

pub fn tiny() -> Ontology {
    load(TINY_ONTOLOGY.as_bytes()).expect("fixture loads").0
}

/// Fixture document with every `/home/u` path moved under `prefix`.
pub fn tiny_json_under(prefix: &str) -> String {
    let prefix = prefix.trim_end_matches('/');
    TINY_ONTOLOGY.replace("\"/home/u/", &format!("\"{prefix}/home/u/"))
}

pub fn tiny_under(prefix: &str) -> Ontology {
    load(tiny_json_under(prefix).as_bytes())
        .expect("rebased fixture loads")
        .0
}

/// Creates the fixture tree (`home/u/docs/{papers,admin}` plus an empty
/// `home/u/empty`) under `base`.
pub fn write_tree(base: &Path) -> io::Result<()> {
    fs::create_dir_all(base.join("home/u/empty"))?;
    for rel in TREE_FILES {
        let path = base.join(rel);
        fs::create_dir_all(path.parent().expect("fixture files have parents"))?;
        fs::write(&path, format!("{rel}\n"))?;
    }
    Ok(())
}
