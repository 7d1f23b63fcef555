// SPDX-License-Identifier: Apache-2.0

//! Optional JSON configuration file. Keys are the long flag names; a flag
//! given on the command line always wins over the file.

use serde::Deserialize;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<String>,
    pub output: Option<String>,
    pub family: Option<String>,
    pub form: Option<String>,
    pub n: Option<usize>,
    pub nu: Option<u64>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub g: Option<f64>,
    #[serde(rename = "gT-sweet")]
    pub gt_sweet: Option<bool>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub mu: Option<f64>,
    #[serde(rename = "R")]
    pub r: Option<f64>,
    pub tau: Option<f64>,
    #[serde(rename = "nu-min")]
    pub nu_min: Option<u64>,
    pub which: Option<String>,
    #[serde(rename = "grid-min")]
    pub grid_min: Option<f64>,
    #[serde(rename = "grid-max")]
    pub grid_max: Option<f64>,
    pub points: Option<usize>,
    pub scales: Option<Vec<f64>>,
    pub experiments: Option<u64>,
    pub seed: Option<u64>,
    #[serde(rename = "n-max")]
    pub n_max: Option<usize>,
    pub tolerance: Option<f64>,
    pub draws: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("config {}: {e}", path.display())))
    }
}

/// `flag`, else `file`, else `default`.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

/// `flag`, else `file`, else an error naming the missing key.
pub fn require<T>(flag: Option<T>, file: Option<T>, key: &str) -> Result<T, CliError> {
    flag.or(file).ok_or_else(|| CliError::Validation(format!("missing required --{key}")))
}

pub fn parse<T: std::str::FromStr<Err = qmetro::Error>>(value: &str) -> Result<T, CliError> {
    value.parse().map_err(CliError::from)
}
