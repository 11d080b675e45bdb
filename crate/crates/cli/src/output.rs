use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::commands::{CliError, Command, CommandOutput};
use crate::config::RunConfig;

/// Record written beside every data file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Command,
    pub master_seed: u64,
    /// Resolved configuration, including defaults and overrides.
    pub config: RunConfig,
    /// The same configuration in the config file format.
    pub config_text: String,
    pub data_file: String,
    pub summary: serde_json::Value,
    pub wall_clock_seconds: f64,
}

impl RunManifest {
    pub fn new(command: Command, config: &RunConfig, data_file: &Path, summary: serde_json::Value, seconds: f64) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            master_seed: config.seed,
            config: config.clone(),
            config_text: config.to_text(),
            data_file: data_file.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
            summary,
            wall_clock_seconds: seconds,
        }
    }
}

/// `foo.csv` -> `foo.manifest.json`, in the same directory.
pub fn manifest_path(data_path: &Path) -> PathBuf {
    let stem = data_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    data_path.with_file_name(format!("{stem}.manifest.json"))
}

fn write(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(path, contents).map_err(io)
}

/// Writes the CSV to `data_path` and the manifest beside it.
pub fn write_outputs(data_path: &Path, output: &CommandOutput, manifest: &RunManifest) -> Result<PathBuf, CliError> {
    write(data_path, output.csv.as_bytes())?;
    let path = manifest_path(data_path);
    let mut json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    json.push('\n');
    write(&path, json.as_bytes())?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_sits_beside_data() {
        assert_eq!(manifest_path(Path::new("out/foo.csv")), PathBuf::from("out/foo.manifest.json"));
        assert_eq!(manifest_path(Path::new("foo")), PathBuf::from("foo.manifest.json"));
    }

    #[test]
    fn manifest_round_trips() {
        let mut config = RunConfig { jtilde: Some(3.5), j0_values: vec![0.1 + 0.2, 1e-300], ..Default::default() };
        config.out = Some(PathBuf::from("x.csv"));
        let manifest = RunManifest::new(
            Command::Meanfield,
            &config,
            Path::new("dir/x.csv"),
            serde_json::json!({ "value": 0.1 + 0.7 }),
            1.25,
        );
        let text = serde_json::to_string_pretty(&manifest).unwrap();
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert_eq!(back, manifest);
        assert_eq!(back.data_file, "x.csv");
    }
}
