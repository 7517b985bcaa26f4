//! Type-ahead over instance labels.

use serde::Serialize;

use crate::ontology::{ConceptId, InstanceId, Ontology};

pub const DEFAULT_SUGGEST_LIMIT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchKind {
    Prefix,
    Substring,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Suggestion {
    pub instance: InstanceId,
    pub label: String,
    pub concept: ConceptId,
    pub match_kind: MatchKind,
}

/// Instances whose label contains `typed`, case-insensitively. Prefix matches
/// come first; each group is alphabetical by label, then concept, then id.
/// File instances are included, so filenames are suggested too.
pub fn suggest(o: &Ontology, typed: &str, limit: usize) -> Vec<Suggestion> {
    if typed.is_empty() || limit == 0 {
        return Vec::new();
    }
    let needle = typed.to_lowercase();
    let labels = o.label_index();

    // the index is sorted by lowercase label, so prefix hits are contiguous
    let start = labels.partition_point(|e| e.lower.as_str() < needle.as_str());
    let prefix_end = start
        + labels[start..]
            .iter()
            .take_while(|e| e.lower.starts_with(&needle))
            .count();

    let mut prefix: Vec<_> = labels[start..prefix_end].iter().collect();
    let mut substring: Vec<_> = labels[..start]
        .iter()
        .chain(&labels[prefix_end..])
        .filter(|e| e.lower.contains(&needle))
        .collect();

    let key = |e: &&crate::ontology::LabelEntry| {
        let inst = o.instance(e.id.as_str()).expect("label index ids resolve");
        (
            e.lower.clone(),
            inst.label.clone(),
            inst.concept.clone(),
            inst.id.clone(),
        )
    };
    prefix.sort_by_cached_key(key);
    substring.sort_by_cached_key(key);

    prefix
        .into_iter()
        .map(|e| (e, MatchKind::Prefix))
        .chain(substring.into_iter().map(|e| (e, MatchKind::Substring)))
        .take(limit)
        .map(|(e, match_kind)| {
            let inst = o.instance(e.id.as_str()).expect("label index ids resolve");
            Suggestion {
                instance: inst.id.clone(),
                label: inst.label.clone(),
                concept: inst.concept.clone(),
                match_kind,
            }
        })
        .collect()
}
