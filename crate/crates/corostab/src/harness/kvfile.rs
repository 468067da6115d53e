//! The flat `key = value` document format with `[section]` headers used by
//! material definitions and scan configurations.
//!
//! Lines are independent; `#` starts a comment unless it appears inside a
//! value (values run to the end of line, so expressions with shell-hostile
//! characters need no quoting). Keys before the first section header land in
//! the section named "".

use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KvError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unterminated section header `{text}`")]
    BadSection { line: usize, text: String },
    #[error("line {line}: duplicate key `{key}` in section [{section}]")]
    DuplicateKey {
        line: usize,
        key: String,
        section: String,
    },
}

/// A parsed document: section name -> key -> (value, line number).
#[derive(Debug, Clone, Default)]
pub struct KvDocument {
    sections: BTreeMap<String, BTreeMap<String, (String, usize)>>,
}

impl KvDocument {
    pub fn parse(text: &str) -> Result<Self, KvError> {
        let mut doc = KvDocument::default();
        let mut current = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| KvError::BadSection {
                    line: line_no,
                    text: raw.trim().to_string(),
                })?;
                current = name.trim().to_string();
                doc.sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| KvError::Malformed {
                line: line_no,
                text: raw.trim().to_string(),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            let section = doc.sections.entry(current.clone()).or_default();
            if section.contains_key(&key) {
                return Err(KvError::DuplicateKey {
                    line: line_no,
                    key,
                    section: current.clone(),
                });
            }
            section.insert(key, (value, line_no));
        }
        Ok(doc)
    }

    pub fn section(&self, name: &str) -> Option<&BTreeMap<String, (String, usize)>> {
        self.sections.get(name)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .map(|(v, _)| v.as_str())
    }

    pub fn sections(&self) -> impl Iterator<Item = (&String, &BTreeMap<String, (String, usize)>)> {
        self.sections.iter()
    }
}

// A comment starts at '#' only when it opens the line or follows
// whitespace, so values like "a#b" survive.
fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'#' && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return &line[..i];
        }
    }
    line
}
