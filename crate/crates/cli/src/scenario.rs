//! Scenario files: one TOML document holding the table (inline or by path)
//! and the parameters of every command.

use std::path::{Path, PathBuf};

use cylbill::hyperbolicity::SurveyMode;
use cylbill::io::TableSpec;
use cylbill::BilliardTable;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::failure::{backticked, Failure};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartSpec {
    pub q: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalSpec {
    pub z: Vec<f64>,
    pub w: Vec<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub table: Option<TableSpec>,
    /// Table file, relative to the scenario file.
    pub table_file: Option<PathBuf>,
    pub seed: Option<u64>,
    pub duration: Option<f64>,
    pub max_events: Option<usize>,
    /// Cut the segment after this many collisions (halfway to the next).
    pub collisions: Option<usize>,
    pub start: Option<StartSpec>,
    pub normal: Option<NormalSpec>,
    pub samples: Option<usize>,
    pub mode: Option<SurveyMode>,
    pub renorm_interval: Option<usize>,
}

/// A parsed scenario with its table and provenance hash.
pub struct Loaded {
    pub scenario: Scenario,
    pub spec: TableSpec,
    pub table: BilliardTable,
    /// SHA-256 over the scenario bytes followed by the table file bytes, if
    /// the table is external.
    pub sha256: String,
}

impl Loaded {
    pub fn seed(&self) -> Result<u64, Failure> {
        self.scenario.seed.ok_or_else(|| Failure::missing("seed"))
    }

    pub fn duration(&self) -> Result<f64, Failure> {
        let t = self
            .scenario
            .duration
            .ok_or_else(|| Failure::missing("duration"))?;
        if t.is_finite() && t > 0.0 {
            Ok(t)
        } else {
            Err(Failure::input(
                format!("duration must be positive and finite, got {t}"),
                Some("duration".into()),
            ))
        }
    }
}

pub fn load(path: &Path, seed_override: Option<u64>) -> Result<Loaded, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let mut scenario = parse(&text, path)?;
    if seed_override.is_some() {
        scenario.seed = seed_override;
    }
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let spec = match (&scenario.table, &scenario.table_file) {
        (Some(spec), None) => spec.clone(),
        (None, Some(file)) => {
            let full = path.parent().unwrap_or(Path::new(".")).join(file);
            let table_text =
                std::fs::read_to_string(&full).map_err(|e| Failure::io(&full, e))?;
            hasher.update(table_text.as_bytes());
            TableSpec::from_toml(&table_text)
                .map_err(|e| Failure::from_format(e, &full.display().to_string()))?
        }
        (Some(_), Some(_)) => {
            return Err(Failure::input(
                "give either `table` or `table_file`, not both",
                Some("table_file".into()),
            ))
        }
        (None, None) => return Err(Failure::missing("table")),
    };
    let table = spec
        .build::<f64>()
        .map_err(|e| Failure::from_format(e, "table"))?;
    Ok(Loaded {
        scenario,
        spec,
        table,
        sha256: hex::encode(hasher.finalize()),
    })
}

fn parse(text: &str, path: &Path) -> Result<Scenario, Failure> {
    toml::from_str(text).map_err(|e: toml::de::Error| {
        let field = backticked(e.message())
            .or_else(|| e.span().and_then(|s| key_at(text, s.start)));
        Failure::input(format!("{}: {}", path.display(), e.message()), field)
    })
}

/// Key of the `key = value` line containing byte offset `pos`.
fn key_at(text: &str, pos: usize) -> Option<String> {
    let line_start = text[..pos.min(text.len())].rfind('\n').map_or(0, |i| i + 1);
    let line = text[line_start..].lines().next()?;
    let (key, _) = line.split_once('=')?;
    let key = key.trim();
    (!key.is_empty()).then(|| key.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_errors_name_the_key() {
        let text = "seed = 1\n[table]\ndim = \"two\"\ncylinders = []\n";
        let err = parse(text, Path::new("s.toml")).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("dim"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse("seeed = 1\n", Path::new("s.toml")).unwrap_err();
        assert_eq!(err.field.as_deref(), Some("seeed"));
        assert_eq!(err.code, crate::failure::EXIT_INPUT);
    }
}
