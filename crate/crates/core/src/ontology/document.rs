//! On-disk `.ontofm.json` representation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{
    normalize_path, parse_date, Concept, ConceptId, Instance, InstanceId, LoadReport, Ontology,
    OntologyError, Relation, TypedValue, ValueType,
};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OntologyDocument {
    #[serde(default)]
    pub concepts: Vec<ConceptDoc>,
    #[serde(default)]
    pub instances: Vec<InstanceDoc>,
    #[serde(default)]
    pub relations: Vec<RelationDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConceptDoc {
    pub id: String,
    /// Defaults to the id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub id: String,
    pub label: String,
    pub concept: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub properties: BTreeMap<String, PropertyDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertyDoc {
    #[serde(rename = "type")]
    pub ty: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationDoc {
    pub subject: String,
    pub predicate: String,
    pub object: String,
}

impl PropertyDoc {
    fn to_value(&self, owner: &str, name: &str) -> Result<TypedValue, OntologyError> {
        let invalid = |msg: String| OntologyError::Validation {
            id: owner.to_string(),
            message: format!("property `{name}`: {msg}"),
        };
        let ty = ValueType::parse(&self.ty)
            .ok_or_else(|| invalid(format!("unknown value type `{}`", self.ty)))?;
        match (ty, &self.value) {
            (ValueType::Number, Value::Number(n)) => n
                .as_f64()
                .filter(|f| f.is_finite())
                .map(TypedValue::Number)
                .ok_or_else(|| invalid(format!("`{n}` is not a finite number"))),
            (ValueType::Text, Value::String(s)) => Ok(TypedValue::Text(s.clone())),
            (ValueType::Date, Value::String(s)) => {
                parse_date(s).map(TypedValue::Date).map_err(invalid)
            }
            (ValueType::Path, Value::String(s)) => {
                normalize_path(s).map(TypedValue::Path).map_err(invalid)
            }
            (ty, v) => Err(invalid(format!("{v} is not a valid {ty} value"))),
        }
    }

    fn from_value(value: &TypedValue) -> Self {
        let v = match value {
            TypedValue::Text(s) | TypedValue::Path(s) => Value::String(s.clone()),
            TypedValue::Number(n) => serde_json::Number::from_f64(*n)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            TypedValue::Date(_) => Value::String(value.to_string()),
        };
        PropertyDoc {
            ty: value.value_type().as_str().to_string(),
            value: v,
        }
    }
}

impl OntologyDocument {
    pub fn into_ontology(self) -> Result<(Ontology, LoadReport), OntologyError> {
        let concepts = self
            .concepts
            .into_iter()
            .map(|c| Concept {
                label: c.label.unwrap_or_else(|| c.id.clone()),
                id: ConceptId::from(c.id),
            })
            .collect();
        let instances = self
            .instances
            .into_iter()
            .map(|i| {
                let properties = i
                    .properties
                    .iter()
                    .map(|(name, p)| Ok((name.clone(), p.to_value(&i.id, name)?)))
                    .collect::<Result<_, OntologyError>>()?;
                Ok(Instance {
                    id: InstanceId::from(i.id),
                    label: i.label,
                    concept: ConceptId::from(i.concept),
                    properties,
                })
            })
            .collect::<Result<Vec<_>, OntologyError>>()?;
        let relations = self
            .relations
            .into_iter()
            .map(|r| Relation::new(r.subject, r.predicate, r.object))
            .collect();
        Ontology::from_parts(concepts, instances, relations)
    }

    pub(super) fn from_ontology(o: &Ontology) -> Self {
        OntologyDocument {
            concepts: o
                .concepts()
                .map(|c| ConceptDoc {
                    id: c.id.to_string(),
                    label: Some(c.label.clone()),
                })
                .collect(),
            instances: o
                .instances()
                .map(|i| InstanceDoc {
                    id: i.id.to_string(),
                    label: i.label.clone(),
                    concept: i.concept.to_string(),
                    properties: i
                        .properties
                        .iter()
                        .map(|(k, v)| (k.clone(), PropertyDoc::from_value(v)))
                        .collect(),
                })
                .collect(),
            relations: o
                .relations()
                .map(|r| RelationDoc {
                    subject: r.subject.to_string(),
                    predicate: r.predicate.clone(),
                    object: r.object.to_string(),
                })
                .collect(),
        }
    }
}
