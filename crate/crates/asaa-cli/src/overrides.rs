//! Dotted-path configuration overrides applied to the scenario document
//! before it is deserialized, so `--set` can reach every tunable the file
//! itself could express.

use serde_json::Value;

use crate::error::CliError;

/// Splits a `KEY=VALUE` argument at the first `=`.
pub fn parse_assignment(arg: &str) -> Result<(&str, &str), CliError> {
    match arg.split_once('=') {
        Some((k, v)) if !k.is_empty() => Ok((k, v)),
        _ => Err(CliError::Validation(format!(
            "--set expects KEY=VALUE, got `{arg}`"
        ))),
    }
}

fn parse_literal(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

/// Writes `raw` at `path` inside the document. Path segments name object
/// keys or array indices; missing intermediate objects are created, so a
/// file relying on config defaults can still be overridden. A typo in a
/// leaf key survives to deserialization, where the strict schema rejects
/// it by name.
pub fn apply_override(root: &mut Value, path: &str, raw: &str) -> Result<(), CliError> {
    let segments: Vec<&str> = path.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(CliError::Validation(format!(
            "--set {path}: empty path segment"
        )));
    }
    let mut leaf = Some(parse_literal(raw));
    let mut cur = root;
    for (i, seg) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        match cur {
            Value::Object(map) => {
                if last {
                    map.insert((*seg).to_string(), leaf.take().unwrap());
                    return Ok(());
                }
                cur = map
                    .entry((*seg).to_string())
                    .or_insert_with(|| Value::Object(serde_json::Map::new()));
            }
            Value::Array(items) => {
                let idx: usize = seg.parse().map_err(|_| {
                    CliError::Validation(format!(
                        "--set {path}: `{seg}` is not an array index"
                    ))
                })?;
                let len = items.len();
                let slot = items.get_mut(idx).ok_or_else(|| {
                    CliError::Validation(format!(
                        "--set {path}: index {idx} out of bounds (length {len})"
                    ))
                })?;
                if last {
                    *slot = leaf.take().unwrap();
                    return Ok(());
                }
                cur = slot;
            }
            _ => {
                return Err(CliError::Validation(format!(
                    "--set {path}: `{seg}` addresses a non-container value"
                )))
            }
        }
    }
    unreachable!("loop returns on the last segment");
}
