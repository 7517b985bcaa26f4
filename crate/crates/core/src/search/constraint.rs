//! Constraints on related instances.
//!
//! A constraint `Concept.property OP value` keeps a file only when the file
//! is directly related to some instance of `Concept` whose property satisfies
//! the predicate.

use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::SearchError;
use crate::ontology::{
    ConceptId, Instance, Ontology, TypedValue, ValueType, LABEL_PSEUDO_PROPERTY,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstraintOp {
    #[serde(alias = "=")]
    Eq,
    Contains,
    #[serde(alias = "<")]
    Lt,
    #[serde(alias = ">")]
    Gt,
    Between,
    Before,
    After,
    On,
}

impl ConstraintOp {
    fn arity(self) -> usize {
        match self {
            ConstraintOp::Between => 2,
            _ => 1,
        }
    }

    /// Value type the operator demands; `None` for `Eq`, which takes the
    /// property's own type.
    fn operand_type(self) -> Option<ValueType> {
        match self {
            ConstraintOp::Eq => None,
            ConstraintOp::Contains => Some(ValueType::Text),
            ConstraintOp::Lt | ConstraintOp::Gt => Some(ValueType::Number),
            ConstraintOp::Between
            | ConstraintOp::Before
            | ConstraintOp::After
            | ConstraintOp::On => Some(ValueType::Date),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ConstraintOp::Eq => "=",
            ConstraintOp::Contains => "contains",
            ConstraintOp::Lt => "<",
            ConstraintOp::Gt => ">",
            ConstraintOp::Between => "between",
            ConstraintOp::Before => "before",
            ConstraintOp::After => "after",
            ConstraintOp::On => "on",
        }
    }

    /// Accepts operator names (`eq`, `lt`, ...) and the symbols `=`, `<`, `>`.
    pub fn parse(tok: &str) -> Option<Self> {
        Some(match tok.to_ascii_lowercase().as_str() {
            "=" | "==" | "eq" => ConstraintOp::Eq,
            "contains" => ConstraintOp::Contains,
            "<" | "lt" => ConstraintOp::Lt,
            ">" | "gt" => ConstraintOp::Gt,
            "between" => ConstraintOp::Between,
            "before" => ConstraintOp::Before,
            "after" => ConstraintOp::After,
            "on" => ConstraintOp::On,
            _ => return None,
        })
    }
}

/// A typed, well-formed constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    concept: ConceptId,
    property: String,
    op: ConstraintOp,
    values: Vec<TypedValue>,
}

fn invalid(msg: impl Into<String>) -> SearchError {
    SearchError::InvalidConstraint(msg.into())
}

impl Constraint {
    /// Checks arity and operator/value type compatibility.
    pub fn new(
        concept: impl Into<ConceptId>,
        property: impl Into<String>,
        op: ConstraintOp,
        values: Vec<TypedValue>,
    ) -> Result<Self, SearchError> {
        let c = Constraint {
            concept: concept.into(),
            property: property.into(),
            op,
            values,
        };
        c.check_shape()?;
        Ok(c)
    }

    pub fn concept(&self) -> &ConceptId {
        &self.concept
    }

    pub fn property(&self) -> &str {
        &self.property
    }

    pub fn op(&self) -> ConstraintOp {
        self.op
    }

    pub fn values(&self) -> &[TypedValue] {
        &self.values
    }

    fn check_shape(&self) -> Result<(), SearchError> {
        if self.property.trim().is_empty() {
            return Err(invalid("empty property name"));
        }
        if self.values.len() != self.op.arity() {
            return Err(invalid(format!(
                "`{}` takes {} value(s), got {}",
                self.op.symbol(),
                self.op.arity(),
                self.values.len()
            )));
        }
        if let Some(ty) = self.op.operand_type() {
            if let Some(bad) = self.values.iter().find(|v| v.value_type() != ty) {
                return Err(invalid(format!(
                    "`{}` requires a {ty} value, got {} `{bad}`",
                    self.op.symbol(),
                    bad.value_type()
                )));
            }
        }
        if let [TypedValue::Date(lo), TypedValue::Date(hi)] = self.values.as_slice() {
            if lo > hi {
                return Err(invalid(format!("empty date range {lo}..{hi}")));
            }
        }
        Ok(())
    }

    /// Checks the constraint against a snapshot: the concept exists, the
    /// property is known for it, and its type matches the operand.
    pub fn check_against(&self, o: &Ontology) -> Result<(), SearchError> {
        if o.concept(self.concept.as_str()).is_none() {
            return Err(invalid(format!("unknown concept `{}`", self.concept)));
        }
        let ty = o
            .property_type(self.concept.as_str(), &self.property)
            .ok_or_else(|| {
                invalid(format!(
                    "concept `{}` has no property `{}`",
                    self.concept, self.property
                ))
            })?;
        let want = self.values[0].value_type();
        if ty != want {
            return Err(invalid(format!(
                "property `{}.{}` is {ty}, constraint value is {want}",
                self.concept, self.property
            )));
        }
        Ok(())
    }

    /// Evaluates against one instance. Absent or differently typed property
    /// values never satisfy.
    fn holds_for(&self, inst: &Instance) -> bool {
        let label;
        let value = match inst.property(&self.property) {
            Some(v) => v,
            None if self.property == LABEL_PSEUDO_PROPERTY => {
                label = TypedValue::Text(inst.label.clone());
                &label
            }
            None => return false,
        };
        let date = |v: &TypedValue| v.as_date();
        match (self.op, value, self.values.as_slice()) {
            (ConstraintOp::Eq, TypedValue::Text(a), [TypedValue::Text(b)]) => {
                a.to_lowercase() == b.to_lowercase()
            }
            (ConstraintOp::Eq, a, [b]) => a == b,
            (ConstraintOp::Contains, TypedValue::Text(a), [TypedValue::Text(b)]) => {
                a.to_lowercase().contains(&b.to_lowercase())
            }
            (ConstraintOp::Lt, TypedValue::Number(a), [TypedValue::Number(b)]) => a < b,
            (ConstraintOp::Gt, TypedValue::Number(a), [TypedValue::Number(b)]) => a > b,
            (ConstraintOp::Before, TypedValue::Date(a), [b]) => date(b).is_some_and(|b| *a < b),
            (ConstraintOp::After, TypedValue::Date(a), [b]) => date(b).is_some_and(|b| *a > b),
            (ConstraintOp::On, TypedValue::Date(a), [b]) => date(b) == Some(*a),
            (ConstraintOp::Between, TypedValue::Date(a), [lo, hi]) => {
                let within = |lo: NaiveDate, hi: NaiveDate| lo <= *a && *a <= hi;
                matches!((date(lo), date(hi)), (Some(lo), Some(hi)) if within(lo, hi))
            }
            _ => false,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{} {}", self.concept, self.property, self.op.symbol())?;
        match self.values.as_slice() {
            [lo, hi] => write!(f, "({lo},{hi})"),
            [v] => write!(f, " {v}"),
            _ => Ok(()),
        }
    }
}

/// Whether `inst` satisfies `c`. Instances of other concepts never do.
pub fn satisfies(inst: &Instance, c: &Constraint) -> Result<bool, SearchError> {
    c.check_shape()?;
    Ok(inst.concept == c.concept && c.holds_for(inst))
}

/// True when `file` relates directly to an instance satisfying `c`.
pub(crate) fn file_satisfies(o: &Ontology, file: &Instance, c: &Constraint) -> bool {
    o.adjacent(file.id.as_str())
        .map(|adj| {
            adj.into_iter()
                .any(|i| i.concept == c.concept && c.holds_for(i))
        })
        .unwrap_or(false)
}

/// Keeps the files related to at least one instance of the constraint's
/// concept that satisfies it. Order is preserved.
pub fn apply_constraint<'a>(
    o: &Ontology,
    files: &[&'a Instance],
    c: &Constraint,
) -> Result<Vec<&'a Instance>, SearchError> {
    c.check_against(o)?;
    Ok(files
        .iter()
        .copied()
        .filter(|f| file_satisfies(o, f, c))
        .collect())
}

/// Untyped constraint operand as it arrives from JSON or the command line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawValue {
    Number(f64),
    Text(String),
}

impl RawValue {
    fn coerce(&self, ty: ValueType) -> Result<TypedValue, SearchError> {
        match (self, ty) {
            (RawValue::Number(n), ValueType::Number) => Ok(TypedValue::Number(*n)),
            (RawValue::Number(n), ValueType::Text) => Ok(TypedValue::Text(n.to_string())),
            (RawValue::Number(n), ty) => Err(invalid(format!("{n} is not a {ty} value"))),
            (RawValue::Text(s), ty) => TypedValue::parse_as(ty, s).map_err(invalid),
        }
    }
}

/// A constraint before its operands are typed against an ontology.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSpec {
    pub concept: String,
    pub property: String,
    pub op: ConstraintOp,
    pub values: Vec<RawValue>,
}

impl ConstraintSpec {
    /// Parses `Concept.property OP value`, where OP is one of `=`,
    /// `contains`, `<`, `>`, `before`, `after`, `on`, or
    /// `between(a,b)`. Values may be single- or double-quoted.
    pub fn parse(expr: &str) -> Result<Self, SearchError> {
        let expr = expr.trim();
        let (lhs, rest) = expr.split_once(char::is_whitespace).ok_or_else(|| {
            invalid(format!(
                "expected `Concept.property OP value`, got `{expr}`"
            ))
        })?;
        let (concept, property) = lhs
            .split_once('.')
            .filter(|(c, p)| !c.is_empty() && !p.is_empty())
            .ok_or_else(|| invalid(format!("expected `Concept.property`, got `{lhs}`")))?;
        let rest = rest.trim_start();

        let (op, values) = if rest
            .get(..7)
            .is_some_and(|p| p.eq_ignore_ascii_case("between"))
        {
            let args = rest[7..].trim();
            let inner = args
                .strip_prefix('(')
                .and_then(|a| a.strip_suffix(')'))
                .ok_or_else(|| invalid(format!("expected `between(a,b)`, got `{rest}`")))?;
            let (a, b) = inner
                .split_once(',')
                .ok_or_else(|| invalid("`between` takes two comma-separated values"))?;
            (ConstraintOp::Between, vec![unquote(a)?, unquote(b)?])
        } else {
            let (tok, value) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
            let op = ConstraintOp::parse(tok)
                .ok_or_else(|| invalid(format!("unknown operator `{tok}`")))?;
            if op == ConstraintOp::Between {
                return Err(invalid("expected `between(a,b)`"));
            }
            (op, vec![unquote(value)?])
        };

        Ok(ConstraintSpec {
            concept: concept.to_string(),
            property: property.to_string(),
            op,
            values,
        })
    }

    /// Types the operands (by operator, or by the property's observed type for
    /// `=`) and validates the result against `o`.
    pub fn resolve(&self, o: &Ontology) -> Result<Constraint, SearchError> {
        if o.concept(&self.concept).is_none() {
            return Err(invalid(format!("unknown concept `{}`", self.concept)));
        }
        let ty = match self.op.operand_type() {
            Some(ty) => ty,
            None => o
                .property_type(&self.concept, &self.property)
                .ok_or_else(|| {
                    invalid(format!(
                        "concept `{}` has no property `{}`",
                        self.concept, self.property
                    ))
                })?,
        };
        let values = self
            .values
            .iter()
            .map(|v| v.coerce(ty))
            .collect::<Result<Vec<_>, _>>()?;
        let c = Constraint::new(
            self.concept.as_str(),
            self.property.as_str(),
            self.op,
            values,
        )?;
        c.check_against(o)?;
        Ok(c)
    }
}

fn unquote(raw: &str) -> Result<RawValue, SearchError> {
    let s = raw.trim();
    let s = ['"', '\'']
        .iter()
        .find_map(|q| s.strip_prefix(*q).and_then(|r| r.strip_suffix(*q)))
        .unwrap_or(s);
    if s.is_empty() {
        return Err(invalid("missing value"));
    }
    Ok(RawValue::Text(s.to_string()))
}
