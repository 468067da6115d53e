//! Scan configuration: which material, which states, which tolerances.
//!
//! Config files use the same `key = value` sections as material files:
//!
//! ```text
//! [material]
//! kind = hencky          # or: file = path/to/material.mat
//! mu = 1
//! lam = 1
//!
//! [states]
//! grid-min = -1          # log-stretch grid ...
//! grid-max = 1
//! grid-points = 9
//! # random-count = 200   # ... or random sampling in a box
//! # random-min = -0.7
//! # random-max = 0.7
//!
//! [audit]                # optional, defaults shown
//! marginal = 1e-6
//! definiteness = 1e-10
//! directions = 200       # sampled corotational directions, 0 = exact only
//! seed = 42
//!
//! [output]               # optional
//! format = json          # json | csv
//! ```
//!
//! The grid lives in log-stretch space; identical configs produce
//! byte-identical reports (fixed seeds, keyed deterministic merge).

use super::kvfile::KvDocument;
use super::matfile::{self, MatFileError};
use crate::law::MaterialConfig;
use crate::stability::AuditTolerances;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config schema error: {msg}")]
    Schema { msg: String },
    #[error(transparent)]
    Format(#[from] super::kvfile::KvError),
    #[error(transparent)]
    Material(#[from] MatFileError),
}

/// How scan states are generated, always in log-stretch space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateSpec {
    Grid { min: f64, max: f64, points: usize },
    Random { count: usize, min: f64, max: f64 },
}

impl StateSpec {
    /// Enumerates states with stable keys (`g-i-j-k` / `r-n`).
    pub fn states(&self, seed: u64) -> Vec<(String, [f64; 3])> {
        match *self {
            StateSpec::Grid { min, max, points } => {
                let coord = |idx: usize| {
                    if points == 1 {
                        0.5 * (min + max)
                    } else {
                        min + (max - min) * idx as f64 / (points - 1) as f64
                    }
                };
                let mut out = Vec::with_capacity(points.pow(3));
                for i in 0..points {
                    for j in 0..points {
                        for k in 0..points {
                            out.push((format!("g-{i}-{j}-{k}"), [coord(i), coord(j), coord(k)]));
                        }
                    }
                }
                out
            }
            StateSpec::Random { count, min, max } => {
                use rand::{Rng, SeedableRng};
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                (0..count)
                    .map(|n| {
                        let mut x = [0.0; 3];
                        for v in &mut x {
                            *v = min + (max - min) * rng.gen::<f64>();
                        }
                        (format!("r-{n}"), x)
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

/// A fully resolved scan configuration; echoed verbatim into the report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanConfig {
    pub material: MaterialConfig,
    pub states: StateSpec,
    pub tolerances: AuditTolerances,
    /// Sampled corotational directions per state (0 disables sampling and
    /// keeps only the exact block-form minimum).
    pub directions: usize,
    pub seed: u64,
    pub format: ReportFormat,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.states {
            StateSpec::Grid { min, max, points } => {
                if !(min < max) {
                    return Err(ConfigError::Schema {
                        msg: format!("grid-min {min} must be below grid-max {max}"),
                    });
                }
                if points < 2 {
                    return Err(ConfigError::Schema {
                        msg: "grid-points must be at least 2".into(),
                    });
                }
            }
            StateSpec::Random { count, min, max } => {
                if count == 0 {
                    return Err(ConfigError::Schema {
                        msg: "random-count must be positive".into(),
                    });
                }
                if !(min < max) {
                    return Err(ConfigError::Schema {
                        msg: format!("random-min {min} must be below random-max {max}"),
                    });
                }
            }
        }
        if self.directions != 0 && self.directions < 50 {
            return Err(ConfigError::Schema {
                msg: "directions must be 0 (exact only) or at least 50".into(),
            });
        }
        Ok(())
    }
}

fn parse_number<T: std::str::FromStr>(
    doc: &KvDocument,
    section: &str,
    key: &str,
) -> Result<Option<T>, ConfigError> {
    match doc.get(section, key) {
        None => Ok(None),
        Some(text) => text
            .parse::<T>()
            .map(Some)
            .map_err(|_| ConfigError::Schema {
                msg: format!("[{section}] {key}: cannot parse `{text}`"),
            }),
    }
}

/// Parses a scan configuration document. `base_dir` resolves relative
/// material file references.
pub fn parse_scan_config(text: &str, base_dir: &Path) -> Result<ScanConfig, ConfigError> {
    let doc = KvDocument::parse(text)?;
    for (section, _) in doc.sections() {
        if !matches!(section.as_str(), "material" | "states" | "audit" | "output") {
            return Err(ConfigError::Schema {
                msg: format!("unknown section [{section}]"),
            });
        }
    }

    let material = if let Some(file) = doc.get("material", "file") {
        let path = base_dir.join(file);
        let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        matfile::parse_material_config(&text)?
    } else {
        let kind = doc
            .get("material", "kind")
            .ok_or(ConfigError::Schema {
                msg: "[material] needs `kind` or `file`".into(),
            })?
            .to_string();
        let mut parameters = std::collections::BTreeMap::new();
        if let Some(section) = doc.section("material") {
            for (key, (value, line)) in section {
                if key == "kind" || key == "name" {
                    continue;
                }
                let parsed = value.parse::<f64>().map_err(|_| ConfigError::Schema {
                    msg: format!("line {line}: material parameter `{key}` is not a number"),
                })?;
                parameters.insert(key.clone(), parsed);
            }
        }
        MaterialConfig {
            kind,
            name: doc.get("material", "name").map(str::to_string),
            parameters,
            expressions: Default::default(),
        }
    };

    let states = if doc.get("states", "grid-points").is_some() {
        StateSpec::Grid {
            min: parse_number(&doc, "states", "grid-min")?.ok_or(ConfigError::Schema {
                msg: "[states] grid needs grid-min".into(),
            })?,
            max: parse_number(&doc, "states", "grid-max")?.ok_or(ConfigError::Schema {
                msg: "[states] grid needs grid-max".into(),
            })?,
            points: parse_number(&doc, "states", "grid-points")?.unwrap(),
        }
    } else if doc.get("states", "random-count").is_some() {
        StateSpec::Random {
            count: parse_number(&doc, "states", "random-count")?.unwrap(),
            min: parse_number(&doc, "states", "random-min")?.unwrap_or(-0.7),
            max: parse_number(&doc, "states", "random-max")?.unwrap_or(0.7),
        }
    } else {
        return Err(ConfigError::Schema {
            msg: "[states] needs grid-points or random-count".into(),
        });
    };

    let tolerances = AuditTolerances {
        definiteness: parse_number(&doc, "audit", "definiteness")?
            .unwrap_or(crate::stability::DEFINITENESS_TOLERANCE),
        marginal: parse_number(&doc, "audit", "marginal")?
            .unwrap_or(crate::stability::MARGINAL_BAND),
    };
    let directions = parse_number(&doc, "audit", "directions")?.unwrap_or(200);
    let seed = parse_number(&doc, "audit", "seed")?.unwrap_or(42);
    let format = match doc.get("output", "format") {
        None => ReportFormat::Json,
        Some("json") => ReportFormat::Json,
        Some("csv") => ReportFormat::Csv,
        Some(other) => {
            return Err(ConfigError::Schema {
                msg: format!("[output] format must be json or csv, got `{other}`"),
            })
        }
    };

    let config = ScanConfig {
        material,
        states,
        tolerances,
        directions,
        seed,
        format,
    };
    config.validate()?;
    Ok(config)
}

/// Reads and parses a scan configuration file.
pub fn load_scan_config(path: &Path) -> Result<ScanConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_scan_config(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grid_config() {
        let text = "[material]\nkind = hencky\nmu = 1\nlam = 1\n\n[states]\ngrid-min = -0.5\ngrid-max = 0.5\ngrid-points = 3\n";
        let config = parse_scan_config(text, Path::new(".")).unwrap();
        assert_eq!(config.material.kind, "hencky");
        assert_eq!(
            config.states,
            StateSpec::Grid {
                min: -0.5,
                max: 0.5,
                points: 3
            }
        );
        assert_eq!(config.states.states(0).len(), 27);
        assert_eq!(config.directions, 200);
    }

    #[test]
    fn grid_enumeration_is_deterministic_and_keyed() {
        let spec = StateSpec::Grid {
            min: -1.0,
            max: 1.0,
            points: 2,
        };
        let states = spec.states(7);
        assert_eq!(states[0], ("g-0-0-0".to_string(), [-1.0, -1.0, -1.0]));
        assert_eq!(states[7], ("g-1-1-1".to_string(), [1.0, 1.0, 1.0]));
    }

    #[test]
    fn random_states_reproducible() {
        let spec = StateSpec::Random {
            count: 5,
            min: -0.7,
            max: 0.7,
        };
        assert_eq!(spec.states(9), spec.states(9));
        assert_ne!(spec.states(9), spec.states(10));
    }

    #[test]
    fn rejects_inverted_grid() {
        let text = "[material]\nkind = hencky\nmu = 1\nlam = 1\n\n[states]\ngrid-min = 1\ngrid-max = -1\ngrid-points = 3\n";
        assert!(matches!(
            parse_scan_config(text, Path::new(".")),
            Err(ConfigError::Schema { .. })
        ));
    }

    #[test]
    fn rejects_single_point_grid() {
        let text = "[material]\nkind = hencky\nmu = 1\nlam = 1\n\n[states]\ngrid-min = -1\ngrid-max = 1\ngrid-points = 1\n";
        assert!(matches!(
            parse_scan_config(text, Path::new(".")),
            Err(ConfigError::Schema { .. })
        ));
    }
}
