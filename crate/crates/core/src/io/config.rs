//! `key = value` configuration files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

/// Environment variable naming the configuration file.
pub const CONFIG_ENV: &str = "TWEETIMENT_CONFIG";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("config key `{key}`: cannot parse `{value}`")]
    BadValue { key: String, value: String },
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    /// Blank lines and lines starting with `#` are ignored; later keys win.
    pub fn parse(text: &str) -> Result<Config, ConfigError> {
        let mut values = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or(ConfigError::Syntax { line: n + 1 })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::Syntax { line: n + 1 });
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Config { values })
    }

    pub fn load(path: &Path) -> Result<Config, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Config::parse(&text)
    }

    /// Loads the file named by `TWEETIMENT_CONFIG`, or an empty config.
    pub fn from_env() -> Result<Config, ConfigError> {
        match std::env::var_os(CONFIG_ENV) {
            Some(path) if !path.is_empty() => Config::load(Path::new(&path)),
            _ => Ok(Config::default()),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError> {
        self.raw(key)
            .map(|value| {
                value.parse().map_err(|_| ConfigError::BadValue {
                    key: key.to_string(),
                    value: value.to_string(),
                })
            })
            .transpose()
    }

    /// Resolves a setting: explicit value, then this config, then `default`.
    pub fn resolve<T: FromStr>(
        &self,
        explicit: Option<T>,
        key: &str,
        default: T,
    ) -> Result<T, ConfigError> {
        match explicit {
            Some(value) => Ok(value),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }
}
