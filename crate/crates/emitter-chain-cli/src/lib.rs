//! Config-driven experiment runner for the `emitter-chain` library. Each run
//! writes a set of CSV tables plus a JSON metadata sidecar.

pub mod config;
pub mod error;
pub mod experiments;
pub mod presets;
pub mod table;

pub use config::{parse_config, read_config, Experiment, ExperimentConfig, HSpec};
pub use error::{CliError, Result};
pub use experiments::{run_experiment, ResultBundle};
pub use table::{read_csv, write_csv, Table};

/// Reads a config from `source`, which is a file path or a preset name, and
/// applies `key=value` overrides. Returns the config and a name for its
/// default output directory.
pub fn load(source: &str, overrides: &[String]) -> Result<(ExperimentConfig, String)> {
    let path = std::path::Path::new(source);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run").to_string();
        return Ok((parse_config(&text, source, overrides)?, stem));
    }
    let preset = presets::find(source).ok_or_else(|| CliError::UnknownPreset(source.to_string()))?;
    Ok((parse_config(preset.source, preset.name, overrides)?, preset.name.to_string()))
}
