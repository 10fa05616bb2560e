//! Grounding facts and dataset ingestion.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::normalize_text;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundingFact {
    pub id: String,
    pub text: String,
    pub split: String,
}

impl GroundingFact {
    pub fn new(id: &str, text: &str, split: &str) -> Self {
        Self {
            id: id.to_string(),
            text: text.to_string(),
            split: split.to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("record {index}: {message}")]
    Parse { index: usize, message: String },
    #[error("record {index}: missing field `{field}`")]
    MissingField { index: usize, field: String },
}

/// Follows a dotted path through objects; numeric segments index arrays.
pub fn select_field<'a>(record: &'a Value, field_path: &str) -> Option<&'a Value> {
    field_path.split('.').try_fold(record, |v, seg| match v {
        Value::Object(m) => m.get(seg),
        Value::Array(a) => seg.parse::<usize>().ok().and_then(|i| a.get(i)),
        _ => None,
    })
}

/// Facts from JSON-lines text, deduplicated on normalized text with first
/// occurrence order kept. Record indices in errors count from 1.
pub fn parse_dataset(text: &str, field_path: &str, split: &str) -> Result<Vec<GroundingFact>, IngestError> {
    let mut seen = HashSet::new();
    let mut facts = Vec::new();
    let mut records = 0;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        records += 1;
        let index = i + 1;
        let v: Value = serde_json::from_str(line).map_err(|e| IngestError::Parse {
            index,
            message: e.to_string(),
        })?;
        let field = select_field(&v, field_path)
            .and_then(Value::as_str)
            .ok_or_else(|| IngestError::MissingField {
                index,
                field: field_path.to_string(),
            })?;
        let norm = normalize_text(field);
        if norm.is_empty() || !seen.insert(norm.clone()) {
            continue;
        }
        let id = format!("{split}-{:04}", facts.len() + 1);
        facts.push(GroundingFact {
            id,
            text: norm,
            split: split.to_string(),
        });
    }
    log::info!(
        "{split}: {records} records, {} distinct grounding facts",
        facts.len()
    );
    Ok(facts)
}

pub fn ingest_dataset(path: &Path, field_path: &str, split: &str) -> Result<Vec<GroundingFact>, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset(&text, field_path, split)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_collapse_after_normalization() {
        let text = r#"{"para": "More people need more resources."}
{"para": "  More people   need more resources. "}

{"para": "Fewer trees mean more erosion."}
"#;
        let facts = parse_dataset(text, "para", "train").unwrap();
        assert_eq!(facts.len(), 2);
        assert_eq!(facts[0].id, "train-0001");
        assert_eq!(facts[1].text, "Fewer trees mean more erosion.");
    }

    #[test]
    fn dotted_paths_and_errors() {
        let text = r#"{"q": {"facts": ["a fact"]}}"#;
        let facts = parse_dataset(text, "q.facts.0", "test").unwrap();
        assert_eq!(facts[0].text, "a fact");
        assert!(matches!(
            parse_dataset(text, "para", "test"),
            Err(IngestError::MissingField { index: 1, .. })
        ));
        assert!(matches!(
            parse_dataset("{\"para\": 1}\nnot json", "para", "test"),
            Err(IngestError::MissingField { index: 1, .. })
        ));
        assert!(matches!(
            parse_dataset("{\"para\": \"x\"}\nnot json", "para", "test"),
            Err(IngestError::Parse { index: 2, .. })
        ));
    }
}
