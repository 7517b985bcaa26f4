//! Seeded random ontologies and brute-force oracles that read the generated
//! rows directly instead of going through the engine's indexes.

use std::cmp::Reverse;

use ontofm_core::ontology::TypedValue;
use ontofm_core::search::{Constraint, ConstraintOp};
use ontofm_core::{load, search, FolderSet, Ontology, Query, Scope};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Map, Value};

pub const CONCEPTS: [&str; 5] = ["Person", "Project", "Topic", "File", "Date"];
pub const FOLDERS: [&str; 4] = ["/r", "/r/a", "/r/a/b", "/r/c"];
const PREDICATES: [&str; 3] = ["p", "q", "r"];
const LABEL_CHARS: [char; 6] = ['a', 'b', 'A', 'B', 'é', ' '];

#[derive(Debug, Clone)]
pub struct Row {
    pub concept: &'static str,
    pub label: String,
    pub folder: usize,
    /// `YYYY-MM-DD`, so string order is date order.
    pub date: String,
    pub age: u32,
}

#[derive(Debug, Clone)]
pub struct World {
    pub rows: Vec<Row>,
    pub relations: Vec<(usize, usize, usize)>,
}

pub fn label(rng: &mut StdRng, max: usize) -> String {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| *LABEL_CHARS.choose(rng).unwrap()).collect()
}

pub fn date(rng: &mut StdRng) -> String {
    format!(
        "20{:02}-{:02}-{:02}",
        rng.gen_range(10..13),
        rng.gen_range(1..13),
        rng.gen_range(1..29)
    )
}

impl World {
    pub fn random(rng: &mut StdRng, max_instances: usize, max_relations: usize) -> World {
        let n = rng.gen_range(1..=max_instances);
        let rows = (0..n)
            .map(|_| Row {
                concept: CONCEPTS[rng.gen_range(0..CONCEPTS.len())],
                label: label(rng, 4),
                folder: rng.gen_range(0..FOLDERS.len()),
                date: date(rng),
                age: rng.gen_range(0..100),
            })
            .collect();
        let m = rng.gen_range(0..=max_relations);
        let relations = (0..m)
            .map(|_| {
                (
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..PREDICATES.len()),
                )
            })
            .collect();
        World { rows, relations }
    }

    pub fn id(&self, i: usize) -> String {
        format!("n{i}")
    }

    pub fn is_file(&self, i: usize) -> bool {
        self.rows[i].concept == "File"
    }

    pub fn path(&self, i: usize) -> String {
        format!("{}/n{i}.txt", FOLDERS[self.rows[i].folder])
    }

    pub fn ontology(&self) -> Ontology {
        let instances: Vec<Value> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut props = Map::new();
                match r.concept {
                    "File" => {
                        props.insert("path".into(), json!({ "type": "path", "value": self.path(i) }));
                    }
                    "Date" => {
                        props.insert("value".into(), json!({ "type": "date", "value": r.date }));
                    }
                    "Person" => {
                        props.insert("age".into(), json!({ "type": "number", "value": r.age }));
                    }
                    _ => {}
                }
                json!({ "id": self.id(i), "label": r.label, "concept": r.concept, "properties": props })
            })
            .collect();
        let relations: Vec<Value> = self
            .relations
            .iter()
            .map(|&(s, o, p)| json!({ "subject": self.id(s), "predicate": PREDICATES[p], "object": self.id(o) }))
            .collect();
        let concepts: Vec<Value> = CONCEPTS
            .iter()
            .chain(["Folder"].iter())
            .map(|c| json!({ "id": c }))
            .collect();
        let doc = json!({ "concepts": concepts, "instances": instances, "relations": relations });
        load(doc.to_string().as_bytes())
            .expect("generated ontology loads")
            .0
    }

    pub fn linked(&self, a: usize, b: usize) -> bool {
        self.relations
            .iter()
            .any(|&(s, o, _)| (s == a && o == b) || (s == b && o == a))
    }

    pub fn has(&self, concept: &str) -> bool {
        self.rows.iter().any(|r| r.concept == concept)
    }
}

#[derive(Debug, Clone)]
pub enum Cond {
    Before(String),
    After(String),
    AgeUnder(u32),
}

impl Cond {
    pub fn random(rng: &mut StdRng) -> Cond {
        match rng.gen_range(0..3) {
            0 => Cond::Before(date(rng)),
            1 => Cond::After(date(rng)),
            _ => Cond::AgeUnder(rng.gen_range(0..100)),
        }
    }

    pub fn applicable(&self, w: &World) -> bool {
        match self {
            Cond::Before(_) | Cond::After(_) => w.has("Date"),
            Cond::AgeUnder(_) => w.has("Person"),
        }
    }

    fn holds(&self, w: &World, i: usize) -> bool {
        let r = &w.rows[i];
        match self {
            Cond::Before(d) => r.concept == "Date" && r.date < *d,
            Cond::After(d) => r.concept == "Date" && r.date > *d,
            Cond::AgeUnder(a) => r.concept == "Person" && r.age < *a,
        }
    }

    pub fn constraint(&self) -> Constraint {
        let day =
            |d: &str| TypedValue::parse_as(ontofm_core::ontology::ValueType::Date, d).unwrap();
        match self {
            Cond::Before(d) => Constraint::new("Date", "value", ConstraintOp::Before, vec![day(d)]),
            Cond::After(d) => Constraint::new("Date", "value", ConstraintOp::After, vec![day(d)]),
            Cond::AgeUnder(a) => Constraint::new(
                "Person",
                "age",
                ConstraintOp::Lt,
                vec![TypedValue::Number(*a as f64)],
            ),
        }
        .unwrap()
    }
}

#[derive(Debug, Clone, Default)]
pub struct Ask {
    pub terms: Vec<usize>,
    pub folders: Option<Vec<usize>>,
    pub conds: Vec<Cond>,
}

impl Ask {
    pub fn random_terms(rng: &mut StdRng, w: &World, max: usize) -> Ask {
        let k = rng.gen_range(1..=max);
        Ask {
            terms: (0..k).map(|_| rng.gen_range(0..w.rows.len())).collect(),
            ..Ask::default()
        }
    }
}

/// (file id, score) in the engine's result order.
pub fn engine(w: &World, o: &Ontology, ask: &Ask) -> Vec<(String, usize)> {
    let mut q = Query::new(ask.terms.iter().map(|&t| w.id(t)));
    if let Some(f) = &ask.folders {
        q = q.with_scope(Scope::Folders(
            FolderSet::new(f.iter().map(|&i| FOLDERS[i])).unwrap(),
        ));
    }
    for c in &ask.conds {
        q = q.with_constraint(c.constraint());
    }
    search(o, &q)
        .unwrap()
        .into_iter()
        .map(|s| (s.file.id.to_string(), s.score))
        .collect()
}

/// Same answer computed by scanning every file against every term.
pub fn oracle(w: &World, ask: &Ask) -> Vec<(String, usize)> {
    let mut terms = ask.terms.clone();
    terms.sort();
    terms.dedup();
    let mut rows: Vec<(usize, usize)> = Vec::new();
    for f in (0..w.rows.len()).filter(|&f| w.is_file(f)) {
        let score = terms
            .iter()
            .filter(|&&t| if w.is_file(t) { t == f } else { w.linked(t, f) })
            .count();
        if score == 0 {
            continue;
        }
        if let Some(folders) = &ask.folders {
            let path = w.path(f);
            if !folders
                .iter()
                .any(|&i| path.starts_with(&format!("{}/", FOLDERS[i])))
            {
                continue;
            }
        }
        if !ask
            .conds
            .iter()
            .all(|c| (0..w.rows.len()).any(|x| w.linked(f, x) && c.holds(w, x)))
        {
            continue;
        }
        rows.push((f, score));
    }
    rows.sort_by_key(|&(f, score)| {
        (
            Reverse(score),
            w.rows[f].label.to_lowercase(),
            w.path(f),
            w.id(f),
        )
    });
    rows.into_iter().map(|(f, s)| (w.id(f), s)).collect()
}
