//! Core of an ontology-based file manager.
//!
//! Files are located through the concepts they relate to in a personal
//! ontology rather than by name or path:
//!
//! * [`ontology`] loads and indexes an immutable ontology snapshot,
//! * [`search`] suggests instances as the user types and ranks files by how
//!   many entered terms they relate to, with folder scope and constraints,
//! * [`graph`] is the view-model of the mind-map style visualization pane,
//! * [`fs_mirror`] lists the real folder tree and reconciles it with the
//!   ontology.

pub mod fixture;
pub mod fs_mirror;
pub mod graph;
pub mod ontology;
pub mod search;

pub use fs_mirror::{
    FileEntry, FolderNode, FsError, FsMirror, Listing, SortKey, SortOrder, SyncReport,
};
pub use graph::{initial_graph, GraphDocument, GraphError, GraphState, Layout, TreeDirection};
pub use ontology::{load, ConceptId, Direction, Instance, InstanceId, Ontology, OntologyError};
pub use search::{
    concepts_for_folders, search, suggest, Constraint, ConstraintSpec, FolderSet, Query, Scope,
    ScoredFile, SearchError, Suggestion,
};
