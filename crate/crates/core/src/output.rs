//! Byte-stable number formatting for written reports.

use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::{Error, Result};

/// Significant digits kept in every written float.
pub const SIGNIFICANT_DIGITS: usize = 10;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// Shortest text that reads back as `round_sig(x)`.
pub fn format_float(x: f64) -> String {
    round_sig(x).to_string()
}

fn canonicalize(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(rounded) = n.as_f64().map(round_sig).and_then(Number::from_f64) {
                *n = rounded;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(canonicalize),
        Value::Object(map) => map.values_mut().for_each(canonicalize),
        _ => {}
    }
}

/// Pretty JSON with sorted keys and floats rounded to 10 significant digits.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut value = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
    canonicalize(&mut value);
    let mut text = serde_json::to_string_pretty(&value).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}
