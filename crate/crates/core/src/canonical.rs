//! Byte-stable structured-text encoding.
//!
//! Values are encoded as compact JSON with every object's keys sorted by
//! code point, independent of how the value was built. Golden files, the
//! result store and request digests all go through here.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::model::content_digest;

#[derive(Debug, thiserror::Error)]
pub enum CanonicalError {
    #[error("value cannot be encoded: {0}")]
    Encode(#[source] serde_json::Error),
    #[error("malformed document: {0}")]
    Decode(#[source] serde_json::Error),
}

/// Encode `value` canonically.
pub fn to_bytes<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, CanonicalError> {
    let tree = serde_json::to_value(value).map_err(CanonicalError::Encode)?;
    let mut out = Vec::with_capacity(256);
    write_value(&tree, &mut out);
    Ok(out)
}

pub fn to_string<T: Serialize + ?Sized>(value: &T) -> Result<String, CanonicalError> {
    // write_value only ever emits UTF-8.
    Ok(String::from_utf8(to_bytes(value)?).expect("canonical output is utf-8"))
}

pub fn from_bytes<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, CanonicalError> {
    serde_json::from_slice(bytes).map_err(CanonicalError::Decode)
}

/// Hex SHA-256 of the canonical encoding.
pub fn digest<T: Serialize + ?Sized>(value: &T) -> Result<String, CanonicalError> {
    Ok(content_digest(&to_bytes(value)?))
}

/// Canonical re-encoding of an already parsed JSON tree.
pub fn value_to_bytes(value: &Value) -> Vec<u8> {
    let mut out = Vec::new();
    write_value(value, &mut out);
    out
}

fn write_value(value: &Value, out: &mut Vec<u8>) {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(&String, &Value)> = map.iter().collect();
            entries.sort_by(|a, b| a.0.cmp(b.0));
            out.push(b'{');
            for (i, (key, item)) in entries.into_iter().enumerate() {
                if i > 0 {
                    out.push(b',');
                }
                write_scalar(&Value::String(key.clone()), out);
                out.push(b':');
                write_value(item, out);
            }
            out.push(b'}');
        }
        Value::Array(items) => {
            out.push(b'[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(b',');
                }
                write_value(item, out);
            }
            out.push(b']');
        }
        scalar => write_scalar(scalar, out),
    }
}

fn write_scalar(value: &Value, out: &mut Vec<u8>) {
    // Scalars have a single serde_json rendering, so delegating is stable.
    serde_json::to_writer(&mut *out, value).expect("writing to a Vec cannot fail");
}
