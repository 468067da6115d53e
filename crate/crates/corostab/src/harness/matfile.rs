//! Material definition files.
//!
//! ```text
//! kind = custom-energy        # hencky | exp-hencky | cauchy-nonhyper |
//!                             # custom-energy | custom-stress | custom-gamma
//! name = my-law               # optional display name
//!
//! [parameters]
//! mu = 1.0
//! lam = 1.0
//!
//! [expressions]               # custom-* kinds only
//! energy = mu*(x1^2+x2^2+x3^2) + lam/2*s^2
//! ```
//!
//! `custom-stress` expects `tau1`, `tau2`, `tau3`; `custom-gamma` expects
//! `gamma0`, `gamma1`, `gamma2` (whose `x1, x2, x3` are read as the
//! principal invariants of `C`). Building the law runs the permutation
//! equivariance validation for the custom kinds.

use super::kvfile::{KvDocument, KvError};
use crate::law::{LawError, MaterialConfig, MaterialLaw};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MatFileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("material file schema error: {0}")]
    Format(#[from] KvError),
    #[error("material file schema error: {msg}")]
    Schema { msg: String },
    #[error(transparent)]
    Law(#[from] LawError),
}

/// Parses the document into a [`MaterialConfig`] without building the law.
pub fn parse_material_config(text: &str) -> Result<MaterialConfig, MatFileError> {
    let doc = KvDocument::parse(text)?;
    let kind = doc
        .get("", "kind")
        .ok_or(MatFileError::Schema {
            msg: "missing top-level `kind`".into(),
        })?
        .to_string();
    let name = doc.get("", "name").map(str::to_string);
    for (section, _) in doc.sections() {
        if !matches!(section.as_str(), "" | "parameters" | "expressions") {
            return Err(MatFileError::Schema {
                msg: format!("unknown section [{section}]"),
            });
        }
    }
    let mut parameters = std::collections::BTreeMap::new();
    if let Some(params) = doc.section("parameters") {
        for (key, (value, line)) in params {
            let parsed = value.parse::<f64>().map_err(|_| MatFileError::Schema {
                msg: format!("line {line}: parameter `{key}` is not a number: `{value}`"),
            })?;
            parameters.insert(key.clone(), parsed);
        }
    }
    let mut expressions = std::collections::BTreeMap::new();
    if let Some(exprs) = doc.section("expressions") {
        for (key, (value, _)) in exprs {
            expressions.insert(key.clone(), value.clone());
        }
    }
    Ok(MaterialConfig {
        kind,
        name,
        parameters,
        expressions,
    })
}

/// Loads and builds a material from a file; warnings report out-of-range
/// parameters.
pub fn load_material(path: &Path) -> Result<(MaterialLaw, Vec<String>), MatFileError> {
    let text = std::fs::read_to_string(path).map_err(|source| MatFileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let config = parse_material_config(&text)?;
    Ok(config.build()?)
}
