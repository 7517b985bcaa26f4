//! Immutable personal-ontology snapshot.
//!
//! An [`Ontology`] holds concepts, their instances and the directed labeled
//! relations between instances. It is built once (see [`load`]) and then only
//! read; every lookup the search and graph layers need is answered from
//! adjacency indexes computed at construction time.

mod document;
mod value;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use document::{ConceptDoc, InstanceDoc, OntologyDocument, PropertyDoc, RelationDoc};
pub use value::{normalize_path, parent_path, parse_date, path_within, TypedValue, ValueType};

pub const FILE: &str = "File";
pub const FOLDER: &str = "Folder";
pub const DATE: &str = "Date";
pub const RESERVED_CONCEPTS: [&str; 3] = [FILE, FOLDER, DATE];

/// Property every File instance carries.
pub const PATH_PROPERTY: &str = "path";
/// Property every Date instance carries.
pub const DATE_PROPERTY: &str = "value";

macro_rules! string_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                Self(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                Self(s)
            }
        }

        impl std::borrow::Borrow<str> for $name {
            fn borrow(&self) -> &str {
                &self.0
            }
        }
    };
}

string_id!(
    /// Identifier of a concept (class).
    ConceptId
);
string_id!(
    /// Identifier of an instance.
    InstanceId
);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Concept {
    pub id: ConceptId,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub id: InstanceId,
    pub label: String,
    pub concept: ConceptId,
    pub properties: BTreeMap<String, TypedValue>,
}

impl Instance {
    pub fn property(&self, name: &str) -> Option<&TypedValue> {
        self.properties.get(name)
    }

    pub fn is_file(&self) -> bool {
        self.concept.as_str() == FILE
    }

    /// The normalized `path` property of a File instance.
    pub fn path(&self) -> Option<&str> {
        self.property(PATH_PROPERTY).and_then(TypedValue::as_path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub subject: InstanceId,
    pub predicate: String,
    pub object: InstanceId,
}

impl Relation {
    pub fn new(
        subject: impl Into<InstanceId>,
        predicate: impl Into<String>,
        object: impl Into<InstanceId>,
    ) -> Self {
        Self {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Out,
    In,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OntologyError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("validation error on `{id}`: {message}")]
    Validation { id: String, message: String },
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
}

impl OntologyError {
    fn validation(id: impl Into<String>, message: impl Into<String>) -> Self {
        OntologyError::Validation {
            id: id.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub concepts: usize,
    pub instances: usize,
    pub relations: usize,
}

/// Outcome of a successful load.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    pub warnings: Vec<String>,
}

/// A neighbor of an instance reached over one stored relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor<'a> {
    pub predicate: &'a str,
    pub instance: &'a Instance,
}

/// Lowercased label paired with the instance it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) struct LabelEntry {
    pub lower: String,
    pub id: InstanceId,
}

type Adjacency = BTreeMap<InstanceId, BTreeSet<(String, InstanceId)>>;

#[derive(Debug, Clone, Default, PartialEq)]
struct Indexes {
    by_concept: BTreeMap<ConceptId, BTreeSet<InstanceId>>,
    outgoing: Adjacency,
    incoming: Adjacency,
    labels: Vec<LabelEntry>,
    file_paths: BTreeMap<String, InstanceId>,
}

impl Indexes {
    fn build(
        concepts: &BTreeMap<ConceptId, Concept>,
        instances: &BTreeMap<InstanceId, Instance>,
        relations: &BTreeSet<Relation>,
    ) -> Self {
        let mut idx = Indexes::default();
        for id in concepts.keys() {
            idx.by_concept.insert(id.clone(), BTreeSet::new());
        }
        for inst in instances.values() {
            idx.by_concept
                .entry(inst.concept.clone())
                .or_default()
                .insert(inst.id.clone());
            idx.labels.push(LabelEntry {
                lower: inst.label.to_lowercase(),
                id: inst.id.clone(),
            });
            if inst.is_file() {
                if let Some(path) = inst.path() {
                    // first id wins when two File instances share a path
                    idx.file_paths
                        .entry(path.to_string())
                        .or_insert_with(|| inst.id.clone());
                }
            }
        }
        idx.labels.sort();
        for rel in relations {
            idx.outgoing
                .entry(rel.subject.clone())
                .or_default()
                .insert((rel.predicate.clone(), rel.object.clone()));
            idx.incoming
                .entry(rel.object.clone())
                .or_default()
                .insert((rel.predicate.clone(), rel.subject.clone()));
        }
        idx
    }
}

/// Immutable ontology snapshot.
#[derive(Debug, Clone)]
pub struct Ontology {
    concepts: BTreeMap<ConceptId, Concept>,
    instances: BTreeMap<InstanceId, Instance>,
    relations: BTreeSet<Relation>,
    indexes: Indexes,
}

/// Equality over the base sets; indexes are derived.
impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        self.concepts == other.concepts
            && self.instances == other.instances
            && self.relations == other.relations
    }
}

/// Parses and validates an ontology document.
pub fn load(document: &[u8]) -> Result<(Ontology, LoadReport), OntologyError> {
    let doc: OntologyDocument =
        serde_json::from_slice(document).map_err(|e| OntologyError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    doc.into_ontology()
}

impl Ontology {
    /// Ontology containing only the reserved concepts.
    pub fn empty() -> Self {
        Self::from_parts(Vec::new(), Vec::new(), Vec::new())
            .expect("reserved concepts always validate")
            .0
    }

    /// Validates the parts and builds a snapshot. Missing reserved concepts are
    /// created and reported as warnings; duplicate relation triples collapse.
    pub fn from_parts(
        concepts: Vec<Concept>,
        instances: Vec<Instance>,
        relations: Vec<Relation>,
    ) -> Result<(Self, LoadReport), OntologyError> {
        let mut report = LoadReport::default();

        let mut concept_map = BTreeMap::new();
        for c in concepts {
            check_id(c.id.as_str(), "concept")?;
            if concept_map.contains_key(&c.id) {
                return Err(OntologyError::validation(
                    c.id.as_str(),
                    "duplicate concept id",
                ));
            }
            concept_map.insert(c.id.clone(), c);
        }
        for reserved in RESERVED_CONCEPTS {
            if !concept_map.contains_key(reserved) {
                report.warnings.push(format!(
                    "reserved concept `{reserved}` missing; created empty"
                ));
                concept_map.insert(
                    ConceptId::from(reserved),
                    Concept {
                        id: ConceptId::from(reserved),
                        label: reserved.to_string(),
                    },
                );
            }
        }

        let mut instance_map = BTreeMap::new();
        for inst in instances {
            check_id(inst.id.as_str(), "instance")?;
            if instance_map.contains_key(&inst.id) {
                return Err(OntologyError::validation(
                    inst.id.as_str(),
                    "duplicate instance id",
                ));
            }
            if !concept_map.contains_key(&inst.concept) {
                return Err(OntologyError::validation(
                    inst.concept.as_str(),
                    format!("instance `{}` refers to unknown concept", inst.id),
                ));
            }
            check_required_property(&inst)?;
            instance_map.insert(inst.id.clone(), inst);
        }

        let mut relation_set = BTreeSet::new();
        for rel in relations {
            if rel.predicate.trim().is_empty() {
                return Err(OntologyError::validation(
                    rel.subject.as_str(),
                    "relation has an empty predicate",
                ));
            }
            for end in [&rel.subject, &rel.object] {
                if !instance_map.contains_key(end) {
                    return Err(OntologyError::validation(
                        end.as_str(),
                        "relation refers to unknown instance",
                    ));
                }
            }
            relation_set.insert(rel);
        }

        let indexes = Indexes::build(&concept_map, &instance_map, &relation_set);
        Ok((
            Ontology {
                concepts: concept_map,
                instances: instance_map,
                relations: relation_set,
                indexes,
            },
            report,
        ))
    }

    pub fn stats(&self) -> Stats {
        Stats {
            concepts: self.concepts.len(),
            instances: self.instances.len(),
            relations: self.relations.len(),
        }
    }

    pub fn concepts(&self) -> impl Iterator<Item = &Concept> {
        self.concepts.values()
    }

    pub fn instances(&self) -> impl Iterator<Item = &Instance> {
        self.instances.values()
    }

    pub fn relations(&self) -> impl Iterator<Item = &Relation> {
        self.relations.iter()
    }

    pub fn concept(&self, id: &str) -> Option<&Concept> {
        self.concepts.get(id)
    }

    pub fn instance(&self, id: &str) -> Option<&Instance> {
        self.instances.get(id)
    }

    pub fn require_instance(&self, id: &str) -> Result<&Instance, OntologyError> {
        self.instance(id)
            .ok_or_else(|| OntologyError::UnknownInstance(id.to_string()))
    }

    /// All instances of concept `concept`, ordered by id.
    pub fn instances_of(&self, concept: &str) -> Result<Vec<&Instance>, OntologyError> {
        let ids = self
            .indexes
            .by_concept
            .get(concept)
            .ok_or_else(|| OntologyError::UnknownConcept(concept.to_string()))?;
        Ok(ids.iter().map(|id| &self.instances[id]).collect())
    }

    /// Instances one stored relation away from `id`, ordered by
    /// (predicate, instance id) with no duplicates.
    pub fn neighbors(
        &self,
        id: &str,
        direction: Direction,
    ) -> Result<Vec<Neighbor<'_>>, OntologyError> {
        self.require_instance(id)?;
        let mut seen: BTreeSet<(&str, &InstanceId)> = BTreeSet::new();
        let sources: &[&Adjacency] = match direction {
            Direction::Out => &[&self.indexes.outgoing],
            Direction::In => &[&self.indexes.incoming],
            Direction::Both => &[&self.indexes.outgoing, &self.indexes.incoming],
        };
        for adj in sources {
            if let Some(edges) = adj.get(id) {
                seen.extend(edges.iter().map(|(pred, other)| (pred.as_str(), other)));
            }
        }
        Ok(seen
            .into_iter()
            .map(|(predicate, other)| Neighbor {
                predicate,
                instance: &self.instances[other],
            })
            .collect())
    }

    /// Distinct instances adjacent to `id` in either direction, ordered by id.
    pub fn adjacent(&self, id: &str) -> Result<Vec<&Instance>, OntologyError> {
        self.require_instance(id)?;
        let mut ids: BTreeSet<&InstanceId> = BTreeSet::new();
        for adj in [&self.indexes.outgoing, &self.indexes.incoming] {
            if let Some(edges) = adj.get(id) {
                ids.extend(edges.iter().map(|(_, other)| other));
            }
        }
        Ok(ids.into_iter().map(|i| &self.instances[i]).collect())
    }

    /// Files associated with `id`: the instance itself when it is a File,
    /// otherwise every File instance adjacent to it.
    pub fn related_files(&self, id: &str) -> Result<Vec<&Instance>, OntologyError> {
        let inst = self.require_instance(id)?;
        if inst.is_file() {
            return Ok(vec![inst]);
        }
        Ok(self
            .adjacent(id)?
            .into_iter()
            .filter(|i| i.is_file())
            .collect())
    }

    /// The File instance registered at a normalized path.
    pub fn file_by_path(&self, path: &str) -> Option<&Instance> {
        self.indexes
            .file_paths
            .get(path)
            .map(|id| &self.instances[id])
    }

    /// Type of `property` as observed on instances of `concept` (first by id).
    /// The pseudo-property `label` is always text.
    pub fn property_type(&self, concept: &str, property: &str) -> Option<ValueType> {
        let ids = self.indexes.by_concept.get(concept)?;
        let observed = ids
            .iter()
            .find_map(|id| self.instances[id].property(property))
            .map(TypedValue::value_type);
        observed.or_else(|| (property == LABEL_PSEUDO_PROPERTY).then_some(ValueType::Text))
    }

    pub(crate) fn label_index(&self) -> &[LabelEntry] {
        &self.indexes.labels
    }

    /// Rebuilds every index from the base sets and compares.
    pub fn indexes_consistent(&self) -> bool {
        Indexes::build(&self.concepts, &self.instances, &self.relations) == self.indexes
    }

    pub fn to_document(&self) -> OntologyDocument {
        OntologyDocument::from_ontology(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document())
            .expect("ontology documents always serialize")
    }
}

/// Name under which an instance's label can be constrained.
pub const LABEL_PSEUDO_PROPERTY: &str = "label";

fn check_id(id: &str, kind: &str) -> Result<(), OntologyError> {
    if id.trim().is_empty() {
        return Err(OntologyError::validation(id, format!("{kind} id is empty")));
    }
    Ok(())
}

fn check_required_property(inst: &Instance) -> Result<(), OntologyError> {
    let (name, ty) = match inst.concept.as_str() {
        FILE => (PATH_PROPERTY, ValueType::Path),
        DATE => (DATE_PROPERTY, ValueType::Date),
        _ => return Ok(()),
    };
    match inst.property(name) {
        Some(v) if v.value_type() == ty => Ok(()),
        Some(v) => Err(OntologyError::validation(
            inst.id.as_str(),
            format!("property `{name}` must be {ty}, found {}", v.value_type()),
        )),
        None => Err(OntologyError::validation(
            inst.id.as_str(),
            format!(
                "{} instance is missing required property `{name}`",
                inst.concept
            ),
        )),
    }
}
