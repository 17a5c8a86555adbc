use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::failure::Failure;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Destination directory plus the provenance stamped on every file.
pub struct Sink {
    dir: PathBuf,
    sha256: String,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, sha256: &str) -> Result<Self, Failure> {
        std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            sha256: sha256.to_string(),
            written: Vec::new(),
        })
    }

    /// `body` must be a JSON object; provenance keys are put first.
    pub fn stamp(&self, body: Value) -> Value {
        let mut m = Map::new();
        m.insert("tool_version".into(), TOOL_VERSION.into());
        m.insert("scenario_sha256".into(), self.sha256.clone().into());
        if let Value::Object(fields) = body {
            m.extend(fields);
        }
        Value::Object(m)
    }

    pub fn json(&mut self, name: &str, body: Value) -> Result<Value, Failure> {
        let doc = self.stamp(body);
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Failure::io(&path, e))?;
        self.written.push(path);
        Ok(doc)
    }

    /// CSV with `#`-prefixed provenance lines ahead of the header.
    pub fn csv(
        &mut self,
        name: &str,
        header: &[String],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<(), Failure> {
        let path = self.dir.join(name);
        let fail = |e: &dyn std::fmt::Display| Failure::io(&path, e);
        let mut file = File::create(&path).map_err(|e| fail(&e))?;
        writeln!(file, "# tool_version={TOOL_VERSION}").map_err(|e| fail(&e))?;
        writeln!(file, "# scenario_sha256={}", self.sha256).map_err(|e| fail(&e))?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(header).map_err(|e| fail(&e))?;
        for row in rows {
            w.write_record(&row).map_err(|e| fail(&e))?;
        }
        w.flush().map_err(|e| fail(&e))?;
        self.written.push(path);
        Ok(())
    }
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn columns(prefix: &str, d: usize) -> impl Iterator<Item = String> + '_ {
    (1..=d).map(move |i| format!("{prefix}_{i}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 12345.678901234567] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn provenance_goes_first() {
        let dir = tempfile::tempdir().unwrap();
        let sink = Sink::new(dir.path(), "abc").unwrap();
        let v = sink.stamp(serde_json::json!({"x": 1}));
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["tool_version", "scenario_sha256", "x"]);
    }
}
