use crate::{Error, Result};
use std::path::Path;

/// One `key = value` line with its 1-based line number.
#[derive(Debug, Clone, PartialEq)]
pub struct KeyValue {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Parses `key = value` text. `#` starts a comment; blank lines are skipped.
pub fn parse_key_values(path: &Path, text: &str) -> Result<Vec<KeyValue>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::parse(path, line, format!("expected 'key = value', got '{content}'")))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::parse(path, line, "empty key"));
        }
        out.push(KeyValue {
            line,
            key: key.to_string(),
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

pub(crate) fn parse_f64(path: &Path, kv: &KeyValue) -> Result<f64> {
    let v: f64 = kv
        .value
        .parse()
        .map_err(|_| Error::parse(path, kv.line, format!("{}: '{}' is not a number", kv.key, kv.value)))?;
    if !v.is_finite() {
        return Err(Error::parse(path, kv.line, format!("{}: non-finite value", kv.key)));
    }
    Ok(v)
}
