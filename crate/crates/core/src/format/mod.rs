//! File formats: the JSON net document, guard s-expressions, JSON Lines
//! traces and DOT export helpers.
//!
//! Token values map onto JSON directly: unit is `null`, integers are
//! numbers, symbols are strings and tuples are arrays.

pub mod netfile;
pub mod sexpr;
pub mod trace;

use serde_json::Value;

use crate::color::ColorValue;

pub fn value_to_json(v: &ColorValue) -> Value {
    match v {
        ColorValue::Unit => Value::Null,
        ColorValue::Int(i) => Value::from(*i),
        ColorValue::Sym(s) => Value::String(s.name.to_string()),
        ColorValue::Tuple(es) => Value::Array(es.iter().map(value_to_json).collect()),
    }
}

/// Decode a token value. Symbols come back unresolved; the net they belong
/// to resolves them against the declared enums.
pub fn value_from_json(j: &Value) -> Result<ColorValue, String> {
    match j {
        Value::Null => Ok(ColorValue::Unit),
        Value::Number(n) => n
            .as_i64()
            .map(ColorValue::Int)
            .ok_or_else(|| format!("{n} is not an integer")),
        Value::String(s) => Ok(ColorValue::sym_unresolved(s)),
        Value::Array(items) => items
            .iter()
            .map(value_from_json)
            .collect::<Result<Vec<_>, _>>()
            .map(ColorValue::Tuple),
        Value::Bool(_) | Value::Object(_) => Err(format!("{j} is not a token value")),
    }
}
