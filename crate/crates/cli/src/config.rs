//! Run configuration.
//!
//! A TOML file whose top-level keys are the editing parameters plus
//! `workers` and `embeddings`, with adapter command lines under
//! `[adapter]`. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use abex_core::pipeline::{EditConfig, ExternalAdapters, LineAdapter};
use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdapterConfig {
    pub text_to_amr: Option<String>,
    pub amr_to_text: Option<String>,
    pub expander: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub edit: EditConfig,
    pub adapter: AdapterConfig,
    /// Record-parallel workers and adapter processes per stage.
    pub workers: usize,
    /// Sidecar embedding file for partner retrieval.
    pub embeddings: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            edit: EditConfig::default(),
            adapter: AdapterConfig::default(),
            workers: default_workers(),
            embeddings: None,
        }
    }
}

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl Config {
    /// Parses configuration text. Relative `embeddings` paths are resolved
    /// against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e| CliError::data(format!("config: {e}")))?;
        let mut config = Config::default();

        if let Some(v) = table.remove("workers") {
            let n = v
                .as_integer()
                .filter(|n| *n >= 1)
                .ok_or_else(|| CliError::data("config: `workers` must be a positive integer"))?;
            config.workers = n as usize;
        }
        if let Some(v) = table.remove("embeddings") {
            let p = v
                .as_str()
                .ok_or_else(|| CliError::data("config: `embeddings` must be a path string"))?;
            config.embeddings = Some(base_dir.join(p));
        }
        if let Some(v) = table.remove("adapter") {
            config.adapter = v
                .try_into()
                .map_err(|e| CliError::data(format!("config [adapter]: {e}")))?;
        }
        config.edit = toml::Value::Table(table)
            .try_into()
            .map_err(|e| CliError::data(format!("config: {e}")))?;
        config
            .edit
            .validate()
            .map_err(|e| CliError::data(format!("config: {e}")))?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn load_or_default(path: Option<&Path>) -> Result<Self> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Config::default()),
        }
    }

    pub fn adapters(&self) -> Result<ExternalAdapters> {
        let build = |name: &str, cmd: &Option<String>| -> Result<Option<LineAdapter>> {
            let Some(cmd) = cmd else {
                return Ok(None);
            };
            let argv = shlex::split(cmd)
                .ok_or_else(|| CliError::data(format!("adapter.{name}: unbalanced quoting in `{cmd}`")))?;
            LineAdapter::new(name, argv)
                .map(Some)
                .map_err(|e| CliError::data(e.to_string()))
        };
        Ok(ExternalAdapters {
            text_to_amr: build("text_to_amr", &self.adapter.text_to_amr)?,
            amr_to_text: build("amr_to_text", &self.adapter.amr_to_text)?,
            expander: build("expander", &self.adapter.expander)?,
            workers: self.workers,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default_edit() {
        let c = Config::parse("", Path::new(".")).unwrap();
        assert_eq!(c.edit, EditConfig::default());
        assert!(c.workers >= 1);
    }

    #[test]
    fn full_config() {
        let c = Config::parse(
            r#"
            mu = 0.4
            beta = 0.7
            rounds = 2
            attribute_roles = [":mod"]
            workers = 3
            embeddings = "vec.tsv"

            [adapter]
            expander = "python3 expand.py --model 'my model'"
            "#,
            Path::new("/data"),
        )
        .unwrap();
        assert_eq!(c.edit.mu, 0.4);
        assert_eq!(c.edit.rounds, 2);
        assert_eq!(c.edit.attribute_roles, vec![":mod"]);
        assert_eq!(c.workers, 3);
        assert_eq!(c.embeddings, Some(PathBuf::from("/data/vec.tsv")));
        let a = c.adapters().unwrap();
        assert_eq!(
            a.expander.unwrap().argv(),
            ["python3", "expand.py", "--model", "my model"]
        );
        assert!(a.text_to_amr.is_none());
    }

    #[test]
    fn typos_are_errors() {
        assert!(Config::parse("sigma = 0.1", Path::new(".")).is_err());
        assert!(Config::parse("[adapter]\nexpand = \"x\"", Path::new(".")).is_err());
        assert!(Config::parse("rounds = 0", Path::new(".")).is_err());
        assert!(Config::parse("workers = 0", Path::new(".")).is_err());
        assert!(Config::parse("alpha = \"high\"", Path::new(".")).is_err());
    }

    #[test]
    fn bad_quoting_in_adapter() {
        let c = Config::parse("[adapter]\nexpander = \"run 'x\"", Path::new(".")).unwrap();
        assert!(c.adapters().is_err());
    }
}
