//! Platform configuration: one TOML file plus `PROV_*` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::media::MediaConfig;
use crate::text_similarity::{Bm25Params, FactThresholds};
use crate::tone::ToneThresholds;
use crate::writing_quality::WqsConfig;

pub const DEFAULT_PORT: u16 = 8420;
pub const ENV_PREFIX: &str = "PROV_";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("config parse: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub data_dir: PathBuf,
    pub server: ServerConfig,
    pub ingestion: IngestionConfig,
    pub workflow: WorkflowConfig,
    pub text_similarity: TextSimilarityConfig,
    pub tone: ToneThresholds,
    pub writing_quality: WqsConfig,
    pub media: MediaConfig,
    pub resources: ResourcesConfig,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            data_dir: PathBuf::from("data"),
            server: ServerConfig::default(),
            ingestion: IngestionConfig::default(),
            workflow: WorkflowConfig::default(),
            text_similarity: TextSimilarityConfig::default(),
            tone: ToneThresholds::default(),
            writing_quality: WqsConfig::default(),
            media: MediaConfig::default(),
            resources: ResourcesConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ServerConfig {
    pub port: u16,
    pub bind: String,
    /// Allowed CORS origin; `*` allows any.
    pub cors_origin: String,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig { port: DEFAULT_PORT, bind: "127.0.0.1".into(), cors_origin: "*".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IngestionConfig {
    /// Feed file polled by the scheduler when serving.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixture: Option<PathBuf>,
    pub keywords: Vec<String>,
    pub poll_interval_secs: u64,
    pub limit: usize,
}

impl Default for IngestionConfig {
    fn default() -> Self {
        IngestionConfig { fixture: None, keywords: Vec::new(), poll_interval_secs: 60, limit: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DispatchMode {
    #[default]
    Inprocess,
    Http,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WorkflowConfig {
    pub analyzer_timeout_secs: u64,
    pub dispatch_mode: DispatchMode,
    /// Base URL of the analyzer host in http mode; defaults to this server.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analyzer_url: Option<String>,
}

impl Default for WorkflowConfig {
    fn default() -> Self {
        WorkflowConfig { analyzer_timeout_secs: 30, dispatch_mode: DispatchMode::Inprocess, analyzer_url: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TextSimilarityConfig {
    pub k1: f64,
    pub b: f64,
    pub top_k: usize,
    pub tau_subj: f64,
    pub tau_sim: f64,
    pub tau_ratio: f64,
    pub min_facts: usize,
    /// Trusted corpus loaded at startup.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corpus_dir: Option<PathBuf>,
}

impl Default for TextSimilarityConfig {
    fn default() -> Self {
        let (p, t) = (Bm25Params::default(), FactThresholds::default());
        TextSimilarityConfig {
            k1: p.k1,
            b: p.b,
            top_k: p.top_k,
            tau_subj: t.tau_subj,
            tau_sim: t.tau_sim,
            tau_ratio: t.tau_ratio,
            min_facts: t.min_facts,
            corpus_dir: None,
        }
    }
}

impl TextSimilarityConfig {
    pub fn bm25(&self) -> Bm25Params {
        Bm25Params { k1: self.k1, b: self.b, top_k: self.top_k }
    }

    pub fn thresholds(&self) -> FactThresholds {
        FactThresholds {
            tau_subj: self.tau_subj,
            tau_sim: self.tau_sim,
            tau_ratio: self.tau_ratio,
            min_facts: self.min_facts,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResourcesConfig {
    /// Directory overriding the built-in lexicons, term list and templates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

impl Config {
    /// Reads `path` (if any), applies `PROV_*` overrides from `env`, validates.
    pub fn load(path: Option<&Path>, env: impl IntoIterator<Item = (String, String)>) -> Result<Self, ConfigError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|source| ConfigError::Read { path: p.display().to_string(), source })?,
            None => String::new(),
        };
        Self::from_toml_with_env(&text, env)
    }

    pub fn from_toml_with_env(
        text: &str,
        env: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, ConfigError> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        let mut overrides: Vec<(String, String)> =
            env.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX) && k.len() > ENV_PREFIX.len()).collect();
        overrides.sort();
        for (key, raw) in overrides {
            let path: Vec<String> = key[ENV_PREFIX.len()..].split("__").map(str::to_lowercase).collect();
            set_path(&mut table, &path, env_value(&raw)).map_err(|e| ConfigError::Invalid(format!("{key}: {e}")))?;
        }
        let config: Config =
            toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = ConfigError::Invalid;
        self.text_similarity.bm25().validate().map_err(invalid)?;
        self.text_similarity.thresholds().validate().map_err(invalid)?;
        self.tone.validate().map_err(invalid)?;
        self.writing_quality.validate().map_err(invalid)?;
        self.media.validate().map_err(invalid)?;
        if self.workflow.analyzer_timeout_secs == 0 {
            return Err(invalid("workflow.analyzer_timeout_secs must be >= 1".into()));
        }
        if self.ingestion.poll_interval_secs == 0 {
            return Err(invalid("ingestion.poll_interval_secs must be >= 1".into()));
        }
        if self.ingestion.limit == 0 {
            return Err(invalid("ingestion.limit must be >= 1".into()));
        }
        if self.data_dir.as_os_str().is_empty() {
            return Err(invalid("data_dir is empty".into()));
        }
        Ok(())
    }
}

/// Environment values are read as TOML scalars or arrays when they parse as
/// such, and as plain strings otherwise.
fn env_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

fn set_path(table: &mut toml::Table, path: &[String], value: toml::Value) -> Result<(), String> {
    let (last, parents) = path.split_last().ok_or("empty key")?;
    let mut cur = table;
    for p in parents {
        let entry = cur.entry(p.clone()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry.as_table_mut().ok_or_else(|| format!("`{p}` is not a table"))?;
    }
    cur.insert(last.clone(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn no_env() -> Vec<(String, String)> {
        Vec::new()
    }

    #[test]
    fn defaults_and_round_trip() {
        let c = Config::load(None, no_env()).unwrap();
        assert_eq!(c, Config::default());
        assert_eq!(c.server.port, 8420);
        let again = Config::from_toml_with_env(&c.to_toml(), no_env()).unwrap();
        assert_eq!(again, c);

        let mut custom = Config::default();
        custom.text_similarity.corpus_dir = Some("corpus".into());
        custom.workflow.dispatch_mode = DispatchMode::Http;
        custom.tone.thresholds.fear = 2.25;
        assert_eq!(Config::from_toml_with_env(&custom.to_toml(), no_env()).unwrap(), custom);
    }

    #[test]
    fn unknown_keys_and_bad_ranges_are_rejected() {
        assert!(matches!(Config::from_toml_with_env("bogus = 1", no_env()), Err(ConfigError::Parse(_))));
        assert!(Config::from_toml_with_env("[tone]\nmin_tokenz = 3", no_env()).is_err());
        assert!(matches!(
            Config::from_toml_with_env("[text_similarity]\nb = 2.0", no_env()),
            Err(ConfigError::Invalid(_))
        ));
        assert!(Config::from_toml_with_env("[workflow]\ndispatch_mode = \"carrier-pigeon\"", no_env()).is_err());
    }

    #[test]
    fn env_overrides_nest_on_double_underscore() {
        let env = vec![
            ("PROV_SERVER__PORT".to_string(), "9000".to_string()),
            ("PROV_DATA_DIR".to_string(), "/tmp/prov".to_string()),
            ("PROV_TONE__THRESHOLDS__FEAR".to_string(), "2.5".to_string()),
            ("PROV_WORKFLOW__DISPATCH_MODE".to_string(), "http".to_string()),
            ("HOME".to_string(), "/root".to_string()),
        ];
        let c = Config::from_toml_with_env("[server]\nport = 1", env).unwrap();
        assert_eq!(c.server.port, 9000);
        assert_eq!(c.data_dir, PathBuf::from("/tmp/prov"));
        assert_eq!(c.tone.thresholds.fear, 2.5);
        assert_eq!(c.workflow.dispatch_mode, DispatchMode::Http);
        let bad = vec![("PROV_NOPE".to_string(), "1".to_string())];
        assert!(Config::from_toml_with_env("", bad).is_err());
    }
}
