//! Reading matrices, Γ and step lists from files or inline flags.

use std::fs;
use std::path::Path;

use niltri_core::eto::parse_steps;
use niltri_core::{EtoStep, FieldSpec, Matrix, Sltm};
use serde_json::Value;

use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path, e: niltri_core::Error) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

/// Exactly one of a path and an inline literal.
pub fn sltm(
    path: Option<&Path>,
    inline: Option<&str>,
    what: &str,
    field: Option<FieldSpec>,
) -> Result<Sltm, CliError> {
    let t = match (path, inline) {
        (Some(p), None) => Sltm::parse_any(&read(p)?).map_err(|e| in_file(p, e))?,
        (None, Some(lit)) => Sltm::parse_any(lit).map_err(|e| CliError::Usage(format!("{what}: {e}")))?,
        (Some(_), Some(_)) => {
            return Err(CliError::Usage(format!("{what}: give a file or an inline matrix, not both")))
        }
        (None, None) => return Err(CliError::Usage(format!("{what}: missing matrix"))),
    };
    if let Some(f) = field {
        if f != t.field() {
            return Err(CliError::Usage(format!(
                "{what}: matrix is over {} but --field says {f}",
                t.field()
            )));
        }
    }
    Ok(t)
}

/// Γ as text rows, a JSON matrix, or any JSON report carrying a `gamma`.
pub fn gamma(
    path: Option<&Path>,
    inline: Option<&str>,
    field: FieldSpec,
) -> Result<Matrix, CliError> {
    let (text, origin) = match (path, inline) {
        (Some(p), None) => (read(p)?, p.display().to_string()),
        (None, Some(lit)) => (lit.to_string(), "--gamma-matrix".to_string()),
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("Γ: give a file or an inline matrix, not both".into()))
        }
        (None, None) => return Err(CliError::Usage("Γ: missing matrix".into())),
    };
    let bad = |e: niltri_core::Error| CliError::Usage(format!("{origin}: {e}"));
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{origin}: {e}")))?;
        let v = find_key(&v, "gamma").unwrap_or(&v);
        Matrix::from_json_value(field, v).map_err(bad)
    } else {
        Matrix::parse_text(field, &text).map_err(bad)
    }
}

/// Steps as text or JSON (a list, or a report with `steps`).
pub fn steps(
    path: Option<&Path>,
    inline: Option<&str>,
    field: FieldSpec,
) -> Result<Vec<EtoStep>, CliError> {
    let (text, origin) = match (path, inline) {
        (Some(p), None) => (read(p)?, p.display().to_string()),
        (None, Some(lit)) => (lit.to_string(), "--steps".to_string()),
        (Some(_), Some(_)) => {
            return Err(CliError::Usage("steps: give a file or an inline list, not both".into()))
        }
        (None, None) => return Err(CliError::Usage("steps: missing".into())),
    };
    let bad = |e: niltri_core::Error| CliError::Usage(format!("{origin}: {e}"));
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{origin}: {e}")))?;
        let list = find_key(&v, "steps").unwrap_or(&v);
        list.as_array()
            .ok_or_else(|| CliError::Usage(format!("{origin}: expected an array of steps")))?
            .iter()
            .map(|s| EtoStep::from_json_value(field, s).map_err(bad))
            .collect()
    } else {
        parse_steps(field, &text).map_err(bad)
    }
}

/// Depth-first lookup of the first object member called `key`.
fn find_key<'a>(v: &'a Value, key: &str) -> Option<&'a Value> {
    match v {
        Value::Object(map) => map
            .get(key)
            .or_else(|| map.values().find_map(|x| find_key(x, key))),
        Value::Array(items) => items.iter().find_map(|x| find_key(x, key)),
        _ => None,
    }
}
