// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;
use std::io::Write;
use std::path::PathBuf;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(CliError::Validation(format!("unknown format {other:?}, expected json or csv"))),
        }
    }
}

pub struct Sink {
    pub format: Format,
    pub path: Option<PathBuf>,
}

impl Sink {
    fn write_bytes(&self, bytes: &[u8]) -> Result<(), CliError> {
        match &self.path {
            Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
            None => std::io::stdout().write_all(bytes).map_err(|e| CliError::Io(e.to_string())),
        }
    }

    /// `json` is written as one pretty-printed document, `rows` as CSV with a
    /// header line.
    pub fn emit<J: Serialize, R: Serialize>(&self, json: &J, rows: &[R]) -> Result<(), CliError> {
        let bytes = match self.format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(json).map_err(|e| CliError::Io(e.to_string()))?;
                s.push('\n');
                s.into_bytes()
            }
            Format::Csv => to_csv(rows)?,
        };
        self.write_bytes(&bytes)
    }
}

pub fn to_csv<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}
