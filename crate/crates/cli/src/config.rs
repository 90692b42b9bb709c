//! Flat key-value run configuration: a plain-text file with
//! `subcommand.key = value` lines, merged under CLI flags, with every
//! resolved setting recorded for the run manifest.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

/// Parsed configuration file. Keys are namespaced by subcommand
/// (`simulate.n = 100000`); `#` starts a comment line.
#[derive(Debug, Default)]
pub struct FileConfig {
    entries: BTreeMap<String, String>,
}

impl FileConfig {
    /// Load a config file, or an empty config when no path is given.
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("config file {}", path.display()))?;
        let mut entries = BTreeMap::new();
        for (index, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let number = index + 1;
            let Some((key, value)) = line.split_once('=') else {
                bail!(
                    "config file {} line {number}: expected `key = value`",
                    path.display()
                );
            };
            let key = key.trim().to_string();
            if key.is_empty() {
                bail!("config file {} line {number}: empty key", path.display());
            }
            if entries
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                bail!(
                    "config file {} line {number}: duplicate key {key}",
                    path.display()
                );
            }
        }
        Ok(FileConfig { entries })
    }

    fn get(&self, scope: &str, key: &str) -> Option<&str> {
        self.entries
            .get(&format!("{scope}.{key}"))
            .map(String::as_str)
    }

    fn keys_in_scope(&self, scope: &str) -> impl Iterator<Item = &str> {
        let prefix = format!("{scope}.");
        self.entries
            .keys()
            .filter_map(move |key| key.strip_prefix(&prefix).map(|_| key.as_str()))
    }
}

/// Resolves one subcommand's settings with flag-over-config precedence and
/// records every resolved value for the manifest.
pub struct Settings<'a> {
    scope: &'static str,
    config: &'a FileConfig,
    entries: Vec<(String, String)>,
    accessed: BTreeSet<String>,
}

impl<'a> Settings<'a> {
    pub fn new(scope: &'static str, config: &'a FileConfig) -> Settings<'a> {
        Settings {
            scope,
            config,
            entries: Vec::new(),
            accessed: BTreeSet::new(),
        }
    }

    fn lookup(&mut self, key: &str) -> Option<&'a str> {
        self.accessed.insert(format!("{}.{key}", self.scope));
        self.config.get(self.scope, key)
    }

    fn record(&mut self, key: &str, value: impl fmt::Display) {
        self.entries
            .push((format!("{}.{key}", self.scope), value.to_string()));
    }

    fn parse_config<T>(&self, key: &str, text: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        text.parse::<T>().map_err(|e| {
            anyhow!(
                "config key {}.{key}: {e} (value {text:?})",
                self.scope
            )
        })
    }

    /// A setting with a default: flag, else config, else the default.
    pub fn parsed<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T: FromStr + fmt::Display,
        T::Err: fmt::Display,
    {
        let config_text = self.lookup(key);
        let value = match (flag, config_text) {
            (Some(value), _) => value,
            (None, Some(text)) => self.parse_config(key, text)?,
            (None, None) => default,
        };
        self.record(key, &value);
        Ok(value)
    }

    /// A setting that may stay unset; recorded as `none` when absent.
    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T: FromStr + fmt::Display,
        T::Err: fmt::Display,
    {
        let config_text = self.lookup(key);
        let value = match (flag, config_text) {
            (Some(value), _) => Some(value),
            (None, Some(text)) => Some(self.parse_config(key, text)?),
            (None, None) => None,
        };
        match &value {
            Some(value) => self.record(key, value),
            None => self.record(key, "none"),
        }
        Ok(value)
    }

    /// A setting the command cannot run without.
    pub fn required<T>(&mut self, key: &str, flag: Option<T>) -> Result<T>
    where
        T: FromStr + fmt::Display,
        T::Err: fmt::Display,
    {
        let config_text = self.lookup(key);
        let value = match (flag, config_text) {
            (Some(value), _) => Some(value),
            (None, Some(text)) => Some(self.parse_config(key, text)?),
            (None, None) => None,
        };
        let Some(value) = value else {
            bail!(
                "missing required setting: pass --{key} or set {}.{key} in the config",
                self.scope
            );
        };
        self.record(key, &value);
        Ok(value)
    }

    /// A required input path.
    pub fn required_path(&mut self, key: &str, flag: Option<PathBuf>) -> Result<PathBuf> {
        let config_text = self.lookup(key);
        let value = flag.or_else(|| config_text.map(PathBuf::from));
        let Some(value) = value else {
            bail!(
                "missing required setting: pass --{key} or set {}.{key} in the config",
                self.scope
            );
        };
        self.record(key, value.display());
        Ok(value)
    }

    /// The output directory, defaulting to the working directory.
    pub fn out_dir(&mut self, flag: Option<PathBuf>) -> Result<PathBuf> {
        let config_text = self.lookup("out");
        let value = flag
            .or_else(|| config_text.map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        self.record("out", value.display());
        Ok(value)
    }

    /// A boolean switch: a set flag wins, otherwise config `true`/`false`.
    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool> {
        let config_text = self.lookup(key);
        let value = if flag {
            true
        } else {
            match config_text {
                Some("true") => true,
                Some("false") | None => false,
                Some(other) => bail!(
                    "config key {}.{key}: expected true or false (value {other:?})",
                    self.scope
                ),
            }
        };
        self.record(key, value);
        Ok(value)
    }

    /// A comma-separated list setting.
    pub fn list<T>(&mut self, key: &str, flag: &[T], default: &[T]) -> Result<Vec<T>>
    where
        T: FromStr + fmt::Display + Clone,
        T::Err: fmt::Display,
    {
        let config_text = self.lookup(key);
        let value: Vec<T> = if !flag.is_empty() {
            flag.to_vec()
        } else if let Some(text) = config_text {
            text.split(',')
                .map(str::trim)
                .filter(|token| !token.is_empty())
                .map(|token| self.parse_config(key, token))
                .collect::<Result<_>>()?
        } else {
            default.to_vec()
        };
        let rendered: Vec<String> = value.iter().map(T::to_string).collect();
        self.record(key, rendered.join(","));
        Ok(value)
    }

    /// Finish resolution: reject config keys in this scope that no setting
    /// consumed (they are almost certainly typos), then hand back the
    /// resolved entries for the manifest.
    pub fn finish(self) -> Result<Vec<(String, String)>> {
        for key in self.config.keys_in_scope(self.scope) {
            if !self.accessed.contains(key) {
                bail!("config key {key} is not recognized by this subcommand");
            }
        }
        Ok(self.entries)
    }
}
