use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::{Informant, OracleError, OracleRequest, Role};

/// One row of a mock table. A row applies when its `key` equals the request
/// key, or when it has no key and every `match` field matches the payload.
/// `*` in a pattern matches any run of characters.
#[derive(Clone, Debug, Deserialize)]
pub struct MockRule {
    pub role: Role,
    #[serde(default)]
    pub key: Option<String>,
    #[serde(default, rename = "match")]
    pub fields: BTreeMap<String, String>,
    pub reply: String,
}

/// Deterministic table-driven informant. The first applicable row wins; no
/// row means an empty reply.
#[derive(Clone, Debug, Default)]
pub struct MockInformant {
    rules: Vec<MockRule>,
}

fn glob(pattern: &str, text: &str) -> bool {
    let parts: Vec<&str> = pattern.split('*').collect();
    if parts.len() == 1 {
        return pattern == text;
    }
    let (first, last) = (parts[0], parts[parts.len() - 1]);
    if !text.starts_with(first) || text.len() < first.len() + last.len() || !text.ends_with(last) {
        return false;
    }
    let mut rest = &text[first.len()..text.len() - last.len()];
    for mid in &parts[1..parts.len() - 1] {
        match rest.find(mid) {
            Some(i) => rest = &rest[i + mid.len()..],
            None => return false,
        }
    }
    true
}

impl MockRule {
    fn applies(&self, req: &OracleRequest, key: &str) -> bool {
        if self.role != req.role {
            return false;
        }
        if let Some(k) = &self.key {
            return k == key;
        }
        self.fields.iter().all(|(f, pat)| {
            req.payload
                .get(f)
                .map(|v| glob(pat, v))
                .unwrap_or(false)
        })
    }
}

impl MockInformant {
    pub fn new(rules: Vec<MockRule>) -> Self {
        Self { rules }
    }

    /// One JSON object per line; blank lines and `#` lines are skipped.
    pub fn from_jsonl(text: &str) -> Result<Self, String> {
        let mut rules = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let rule: MockRule =
                serde_json::from_str(line).map_err(|e| format!("line {}: {e}", i + 1))?;
            rules.push(rule);
        }
        Ok(Self { rules })
    }

    pub fn load(path: &Path) -> Result<Self, OracleError> {
        let text = std::fs::read_to_string(path).map_err(|e| OracleError::Store {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_jsonl(&text).map_err(|message| OracleError::Store {
            path: path.display().to_string(),
            message,
        })
    }

    pub fn rules(&self) -> &[MockRule] {
        &self.rules
    }
}

impl Informant for MockInformant {
    fn respond(&self, req: &OracleRequest) -> Result<String, OracleError> {
        let key = req.key();
        Ok(self
            .rules
            .iter()
            .find(|r| r.applies(req, &key))
            .map(|r| r.reply.clone())
            .unwrap_or_default())
    }
}
