//! Experiment manifest written to `<out>/manifest.json`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::failure::Failure;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: &'static str,
    pub limit: f64,
    pub passed: bool,
}

/// Everything needed to re-run a command and read its outcome. Timings are
/// kept apart so that two runs with the same seed differ only there.
#[derive(Debug, Serialize)]
pub struct ExperimentReport {
    pub command: String,
    pub config: Value,
    pub results: Map<String, Value>,
    pub files: Vec<String>,
    pub checks: Vec<Check>,
    pub timings: BTreeMap<String, f64>,
    #[serde(skip)]
    out: PathBuf,
}

impl ExperimentReport {
    pub fn new(command: &str, config: &impl Serialize, out: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(out)?;
        Ok(ExperimentReport {
            command: command.to_string(),
            config: serde_json::to_value(config).map_err(Failure::io)?,
            results: Map::new(),
            files: Vec::new(),
            checks: Vec::new(),
            timings: BTreeMap::new(),
            out: out.to_path_buf(),
        })
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.results.insert(key.to_string(), v);
    }

    pub fn time(&mut self, phase: &str, d: Duration) {
        *self.timings.entry(phase.to_string()).or_default() += d.as_secs_f64();
    }

    pub fn check_le(&mut self, name: &str, value: f64, limit: f64) {
        self.push_check(name, value, "<=", limit, value <= limit);
    }

    pub fn check_ge(&mut self, name: &str, value: f64, limit: f64) {
        self.push_check(name, value, ">=", limit, value >= limit);
    }

    pub fn check_true(&mut self, name: &str, ok: bool) {
        self.push_check(name, ok as u8 as f64, "==", 1.0, ok);
    }

    /// `value` within a factor `factor` of `reference` in either direction.
    pub fn check_factor(&mut self, name: &str, value: f64, reference: f64, factor: f64) {
        let ratio = value / reference;
        let ok = ratio <= factor && ratio >= 1.0 / factor;
        self.push_check(name, ratio, "within factor", factor, ok);
    }

    fn push_check(
        &mut self,
        name: &str,
        value: f64,
        relation: &'static str,
        limit: f64,
        passed: bool,
    ) {
        self.checks.push(Check {
            name: name.to_string(),
            value,
            relation,
            limit,
            passed,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Path of an output file; the name is recorded in the manifest.
    pub fn file(&mut self, name: &str) -> PathBuf {
        if !self.files.iter().any(|f| f == name) {
            self.files.push(name.to_string());
        }
        self.out.join(name)
    }

    pub fn write_csv(
        &mut self,
        name: &str,
        header: &[String],
        rows: &[Vec<f64>],
    ) -> Result<(), Failure> {
        let path = self.file(name);
        let mut w = std::io::BufWriter::new(fs::File::create(path)?);
        writeln!(w, "{}", header.join(","))?;
        for row in rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<(), Failure> {
        let path = self.file(name);
        let text = serde_json::to_string_pretty(value).map_err(Failure::io)?;
        fs::write(path, text + "\n")?;
        Ok(())
    }

    /// Writes `manifest.json` and returns its text.
    pub fn finish(mut self) -> Result<(String, bool), Failure> {
        self.file("manifest.json");
        let text = serde_json::to_string_pretty(&self).map_err(Failure::io)? + "\n";
        fs::write(self.out.join("manifest.json"), &text)?;
        Ok((text, self.all_passed()))
    }
}
