//! Stable JSON emission: sorted keys, floats at 9 significant digits,
//! non-finite floats as `null`.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 9;

pub fn round_significant(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().expect("formatted float parses")
}

fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_significant(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(normalize).collect()),
        // `serde_json::Map` is ordered by key unless `preserve_order` is enabled.
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

/// Pretty-printed, normalized document with a trailing newline.
pub fn to_stable_json<T: Serialize>(value: &T) -> Result<String> {
    let v = normalize(serde_json::to_value(value)?);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Write `value` to `path`; returns the hash of the written bytes.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<String> {
    let text = to_stable_json(value)?;
    fs::write(path, &text).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(text.as_bytes()))
}

/// Parse `path`; returns the value and the hash of the file's bytes.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<(T, String)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let value = serde_json::from_slice(&bytes)
        .map_err(|e| Error::Artifact { path: path.to_path_buf(), message: e.to_string() })?;
    Ok((value, sha256_hex(&bytes)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn rounds_to_nine_digits() {
        assert_eq!(round_significant(1.0 / 3.0), 0.333333333);
        assert_eq!(round_significant(2.0 / 3.0), 0.666666667);
        assert_eq!(round_significant(123456789.87), 123456790.0);
        assert_eq!(round_significant(-0.000123456789123), -0.000123456789);
        assert_eq!(round_significant(0.5), 0.5);
    }

    #[test]
    fn keys_sorted_and_non_finite_null() {
        let mut m = HashMap::new();
        m.insert("zeta", f64::INFINITY);
        m.insert("alpha", 5.0 / 14.0);
        m.insert("mid", f64::NAN);
        let s = to_stable_json(&m).unwrap();
        assert_eq!(s, "{\n  \"alpha\": 0.357142857,\n  \"mid\": null,\n  \"zeta\": null\n}\n");
    }
}
