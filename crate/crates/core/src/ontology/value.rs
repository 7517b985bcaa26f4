use std::fmt;

use chrono::NaiveDate;

/// A property value attached to an instance.
#[derive(Debug, Clone, PartialEq)]
pub enum TypedValue {
    Text(String),
    Number(f64),
    Date(NaiveDate),
    /// Absolute, lexically normalized path.
    Path(String),
}

/// Discriminant of [`TypedValue`], used for type checks on constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueType {
    Text,
    Number,
    Date,
    Path,
}

impl ValueType {
    pub fn as_str(self) -> &'static str {
        match self {
            ValueType::Text => "text",
            ValueType::Number => "number",
            ValueType::Date => "date",
            ValueType::Path => "path",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "text" => Some(ValueType::Text),
            "number" => Some(ValueType::Number),
            "date" => Some(ValueType::Date),
            "path" => Some(ValueType::Path),
            _ => None,
        }
    }
}

impl fmt::Display for ValueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl TypedValue {
    pub fn value_type(&self) -> ValueType {
        match self {
            TypedValue::Text(_) => ValueType::Text,
            TypedValue::Number(_) => ValueType::Number,
            TypedValue::Date(_) => ValueType::Date,
            TypedValue::Path(_) => ValueType::Path,
        }
    }

    pub fn as_date(&self) -> Option<NaiveDate> {
        match self {
            TypedValue::Date(d) => Some(*d),
            _ => None,
        }
    }

    pub fn as_path(&self) -> Option<&str> {
        match self {
            TypedValue::Path(p) => Some(p),
            _ => None,
        }
    }

    /// Builds a value of type `ty` from its textual form.
    pub fn parse_as(ty: ValueType, raw: &str) -> Result<Self, String> {
        match ty {
            ValueType::Text => Ok(TypedValue::Text(raw.to_string())),
            ValueType::Number => raw
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|n| n.is_finite())
                .map(TypedValue::Number)
                .ok_or_else(|| format!("`{raw}` is not a number")),
            ValueType::Date => parse_date(raw).map(TypedValue::Date),
            ValueType::Path => normalize_path(raw).map(TypedValue::Path),
        }
    }
}

impl fmt::Display for TypedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypedValue::Text(s) | TypedValue::Path(s) => f.write_str(s),
            TypedValue::Number(n) => write!(f, "{n}"),
            TypedValue::Date(d) => write!(f, "{}", d.format("%Y-%m-%d")),
        }
    }
}

/// Parses a day-precision ISO 8601 date (`YYYY-MM-DD`).
pub fn parse_date(raw: &str) -> Result<NaiveDate, String> {
    let raw = raw.trim();
    // chrono accepts a few lenient forms (e.g. missing zero padding); insist on the canonical shape.
    let shaped = raw.len() == 10
        && raw.bytes().enumerate().all(|(i, b)| {
            if i == 4 || i == 7 {
                b == b'-'
            } else {
                b.is_ascii_digit()
            }
        });
    if !shaped {
        return Err(format!("`{raw}` is not a YYYY-MM-DD date"));
    }
    NaiveDate::parse_from_str(raw, "%Y-%m-%d").map_err(|e| format!("`{raw}`: {e}"))
}

/// Lexically normalizes an absolute `/`-separated path: collapses repeated
/// separators, drops `.` segments, resolves `..` and strips any trailing
/// separator. The filesystem is never consulted.
pub fn normalize_path(raw: &str) -> Result<String, String> {
    if !raw.starts_with('/') {
        return Err(format!("`{raw}` is not an absolute path"));
    }
    let mut segments: Vec<&str> = Vec::new();
    for seg in raw.split('/') {
        match seg {
            "" | "." => {}
            ".." => {
                segments.pop();
            }
            s => segments.push(s),
        }
    }
    if segments.is_empty() {
        return Ok("/".to_string());
    }
    let mut out = String::with_capacity(raw.len());
    for seg in segments {
        out.push('/');
        out.push_str(seg);
    }
    Ok(out)
}

/// True when `path` equals `folder` or lies somewhere beneath it.
/// Both arguments must already be normalized.
pub fn path_within(path: &str, folder: &str) -> bool {
    if folder == "/" {
        return path.starts_with('/');
    }
    match path.strip_prefix(folder) {
        Some("") => true,
        Some(rest) => rest.starts_with('/'),
        None => false,
    }
}

/// Parent directory of a normalized path; `None` for `/`.
pub fn parent_path(path: &str) -> Option<&str> {
    if path == "/" {
        return None;
    }
    match path.rfind('/') {
        Some(0) => Some("/"),
        Some(i) => Some(&path[..i]),
        None => None,
    }
}
