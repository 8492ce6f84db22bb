//! Report emission. Every run writes `<command>.json` (provenance, effective
//! config, report), one or more CSV tables whose first line is a `#` metadata
//! comment carrying the schema version, and two-column numeric plot files.

use std::fs;
use std::path::{Path, PathBuf};

use mixweak::numeric::fmt17;
use mixweak::Grid;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::config_hash;
use crate::error::CliError;

/// Bumped whenever a CSV column set changes.
pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_sha256: String,
    pub seed: u64,
    pub grid: Value,
}

pub fn grid_json(g: &Grid) -> Value {
    json!({
        "left": g.left(),
        "right": g.right(),
        "dx": g.dx(),
        "n_cells": g.n_cells(),
        "origin_gap": g.origin_gap(),
    })
}

pub struct Output {
    dir: PathBuf,
    command: &'static str,
    config_sha256: String,
    seed: u64,
    written: Vec<PathBuf>,
}

impl Output {
    pub fn new<T: Serialize>(dir: &Path, command: &'static str, cfg: &T, seed: u64) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::validation(format!("out {}: {e}", dir.display())))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            command,
            config_sha256: config_hash(cfg),
            seed,
            written: Vec::new(),
        })
    }

    pub fn provenance(&self, grid: Value) -> Provenance {
        Provenance {
            tool: "mixweak",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            config_sha256: self.config_sha256.clone(),
            seed: self.seed,
            grid,
        }
    }

    fn write(&mut self, name: String, text: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|e| CliError::validation(format!("out {}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    pub fn json<C: Serialize, R: Serialize>(&mut self, grid: Value, cfg: &C, report: &R) -> Result<(), CliError> {
        let doc = json!({
            "provenance": self.provenance(grid),
            "config": cfg,
            "report": report,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        self.write(format!("{}.json", self.command), &text)
    }

    /// `<command>[_<table>].csv`.
    pub fn csv<I: IntoIterator<Item = String>>(&mut self, table: Option<&str>, header: &str, rows: I) -> Result<(), CliError> {
        let schema = match table {
            Some(t) => format!("{}.{t}", self.command),
            None => self.command.to_string(),
        };
        let mut text = format!(
            "# schema={schema}/v{CSV_SCHEMA_VERSION},tool=mixweak,version={},config_sha256={},seed={}\n{header}\n",
            env!("CARGO_PKG_VERSION"),
            self.config_sha256,
            self.seed
        );
        for row in rows {
            text.push_str(&row);
            text.push('\n');
        }
        self.write(format!("{}.csv", schema.replace('.', "_")), &text)
    }

    /// `<command>_<name>.dat` with one `x y` pair per line; non-finite points are dropped.
    pub fn plot(&mut self, name: &str, points: &[(f64, f64)]) -> Result<String, CliError> {
        let mut text = String::new();
        for &(x, y) in points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
            text.push_str(&fmt17(x));
            text.push(' ');
            text.push_str(&fmt17(y));
            text.push('\n');
        }
        if text.lines().count() < points.len() {
            log::warn!("{name}: dropped {} non-finite points", points.len() - text.lines().count());
        }
        let file = format!("{}_{name}.dat", self.command);
        self.write(file.clone(), &text)?;
        Ok(file)
    }

    pub fn files(&self) -> String {
        self.written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(",")
    }
}
