//! JSON emission and the shared meta block.

use std::path::Path;
use std::time::Instant;

use crate::exit::CliError;

#[derive(serde::Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// Fully resolved configuration (flags merged with any config file).
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
    #[serde(flatten)]
    extra: serde_json::Map<String, serde_json::Value>,
}

impl Meta {
    pub fn new(
        command: &'static str,
        config: serde_json::Value,
        started: Instant,
        timings: bool,
    ) -> Self {
        Meta {
            tool: "qdesign",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            timing_ms: timings.then(|| started.elapsed().as_secs_f64() * 1e3),
            extra: serde_json::Map::new(),
        }
    }

    pub fn extra(&mut self, key: &str, value: serde_json::Value) {
        self.extra.insert(key.to_string(), value);
    }
}

/// Pretty-prints to stdout and optionally writes the same bytes to a file.
pub fn emit<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    let body = serde_json::to_string_pretty(value)?;
    println!("{body}");
    if let Some(path) = out {
        std::fs::write(path, body.as_bytes()).map_err(CliError::io)?;
    }
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(CliError::io)?;
    Ok(serde_json::from_str(&text)?)
}
