//! Random ontology generator plus brute-force helpers that answer questions by
//! scanning the generated data directly, never through the ontology indexes.

#![allow(dead_code)]

use std::collections::BTreeSet;

use chrono::{Days, NaiveDate};
use ontofm_core::{load, Ontology};
use proptest::prelude::*;
use serde_json::{json, Map, Value};

pub const CONCEPTS: [&str; 6] = ["Person", "Project", "Topic", "File", "Date", "Folder"];
pub const FOLDERS: [&str; 4] = ["/r", "/r/a", "/r/a/b", "/r/c"];
pub const PREDICATES: [&str; 3] = ["p", "q", "r"];

#[derive(Debug, Clone)]
pub struct Inst {
    /// Index into the first five entries of `CONCEPTS`.
    pub concept: usize,
    pub label: String,
    pub folder: usize,
    pub day: u64,
    pub age: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct Sample {
    pub instances: Vec<Inst>,
    /// (subject, object, predicate) indexes; may repeat and may be loops.
    pub relations: Vec<(usize, usize, usize)>,
}

pub fn base_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2010, 1, 1).unwrap()
}

pub fn date_of(day: u64) -> NaiveDate {
    base_date().checked_add_days(Days::new(day)).unwrap()
}

pub fn label_strategy() -> impl Strategy<Value = String> {
    "[abcABé ]{0,5}"
}

fn inst_strategy() -> impl Strategy<Value = Inst> {
    (
        0..5usize,
        label_strategy(),
        0..FOLDERS.len(),
        0..1000u64,
        proptest::option::of(0..100u32),
    )
        .prop_map(|(concept, label, folder, day, age)| Inst {
            concept,
            label,
            folder,
            day,
            age,
        })
}

pub fn sample_strategy(
    max_instances: usize,
    max_relations: usize,
) -> impl Strategy<Value = Sample> {
    proptest::collection::vec(inst_strategy(), 1..=max_instances).prop_flat_map(move |instances| {
        let n = instances.len();
        let rels = proptest::collection::vec((0..n, 0..n, 0..PREDICATES.len()), 0..=max_relations);
        (Just(instances), rels).prop_map(|(instances, relations)| Sample {
            instances,
            relations,
        })
    })
}

impl Sample {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn id(&self, i: usize) -> String {
        format!("i{i}")
    }

    pub fn index_of(&self, id: &str) -> usize {
        id[1..].parse().unwrap()
    }

    pub fn concept(&self, i: usize) -> &'static str {
        CONCEPTS[self.instances[i].concept]
    }

    pub fn is_file(&self, i: usize) -> bool {
        self.concept(i) == "File"
    }

    pub fn path(&self, i: usize) -> Option<String> {
        self.is_file(i)
            .then(|| format!("{}/f{i}.txt", FOLDERS[self.instances[i].folder]))
    }

    pub fn date(&self, i: usize) -> Option<NaiveDate> {
        (self.concept(i) == "Date").then(|| date_of(self.instances[i].day))
    }

    pub fn age(&self, i: usize) -> Option<u32> {
        if self.concept(i) == "Person" {
            self.instances[i].age
        } else {
            None
        }
    }

    pub fn document(&self) -> Value {
        let concepts: Vec<Value> = CONCEPTS.iter().map(|c| json!({ "id": c })).collect();
        let instances: Vec<Value> = (0..self.len())
            .map(|i| {
                let mut props = Map::new();
                if let Some(p) = self.path(i) {
                    props.insert("path".into(), json!({ "type": "path", "value": p }));
                }
                if let Some(d) = self.date(i) {
                    props.insert(
                        "value".into(),
                        json!({ "type": "date", "value": d.to_string() }),
                    );
                }
                if let Some(a) = self.age(i) {
                    props.insert("age".into(), json!({ "type": "number", "value": a }));
                }
                json!({
                    "id": self.id(i),
                    "label": self.instances[i].label,
                    "concept": self.concept(i),
                    "properties": props,
                })
            })
            .collect();
        let relations: Vec<Value> = self
            .relations
            .iter()
            .map(|&(s, o, p)| json!({ "subject": self.id(s), "predicate": PREDICATES[p], "object": self.id(o) }))
            .collect();
        json!({ "concepts": concepts, "instances": instances, "relations": relations })
    }

    pub fn json(&self) -> String {
        self.document().to_string()
    }

    pub fn ontology(&self) -> Ontology {
        let (o, report) = load(self.json().as_bytes()).expect("generated ontologies are valid");
        assert!(report.warnings.is_empty(), "{:?}", report.warnings);
        o
    }

    /// Distinct stored triples.
    pub fn triples(&self) -> BTreeSet<(usize, usize, usize)> {
        self.relations.iter().copied().collect()
    }

    /// True when some relation joins `a` and `b` in either direction.
    pub fn linked(&self, a: usize, b: usize) -> bool {
        self.relations
            .iter()
            .any(|&(s, o, _)| (s == a && o == b) || (s == b && o == a))
    }

    pub fn adjacent(&self, a: usize) -> BTreeSet<usize> {
        (0..self.len()).filter(|&b| self.linked(a, b)).collect()
    }
}
