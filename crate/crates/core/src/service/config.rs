use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use serde::Deserialize;

use crate::jargon::{
    HttpChatBackend, JargonError, JargonProvider, LiveConfig, LlmProvider, MockProvider,
    DEFAULT_API_URL, DEFAULT_MODEL,
};

#[derive(Debug, thiserror::Error)]
pub enum StartupError {
    #[error("config: {0}")]
    Config(String),
    #[error("store: {0}")]
    Store(#[from] crate::repository::RepoError),
    #[error("jargon provider: {0}")]
    Provider(#[from] JargonError),
    #[error("bind: {0}")]
    Bind(#[from] std::io::Error),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JargonSettings {
    pub api_url: Option<String>,
    pub api_key: Option<String>,
    pub model: Option<String>,
    pub timeout_s: u64,
    pub retries: u32,
    /// Upper bound on provider calls running at once.
    pub max_in_flight: usize,
    /// Lexicon for the offline provider; the bundled one when absent.
    pub mock_lexicon: Option<PathBuf>,
}

impl Default for JargonSettings {
    fn default() -> Self {
        Self {
            api_url: None,
            api_key: None,
            model: None,
            timeout_s: 30,
            retries: 1,
            max_in_flight: 4,
            mock_lexicon: None,
        }
    }
}

/// Service configuration. Loaded from TOML, then overridden by `BIND_ADDR`,
/// `STORE_DIR`, `JARGON_API_URL`, `JARGON_API_KEY` and `JARGON_MODEL`.
#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind_addr: String,
    /// Repository directory. `None` keeps everything in memory.
    pub store_dir: Option<PathBuf>,
    pub jargon: JargonSettings,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            bind_addr: "127.0.0.1:8080".into(),
            store_dir: None,
            jargon: JargonSettings::default(),
        }
    }
}

impl ServiceConfig {
    pub fn from_toml(text: &str) -> Result<Self, StartupError> {
        toml::from_str(text).map_err(|e| StartupError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, StartupError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| StartupError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Applies environment overrides through `lookup` (normally `std::env::var`).
    pub fn with_env(mut self, lookup: impl Fn(&str) -> Option<String>) -> Self {
        if let Some(v) = lookup("BIND_ADDR") {
            self.bind_addr = v;
        }
        if let Some(v) = lookup("STORE_DIR") {
            self.store_dir = Some(v.into());
        }
        if let Some(v) = lookup("JARGON_API_URL") {
            self.jargon.api_url = Some(v);
        }
        if let Some(v) = lookup("JARGON_API_KEY") {
            self.jargon.api_key = Some(v);
        }
        if let Some(v) = lookup("JARGON_MODEL") {
            self.jargon.model = Some(v);
        }
        self
    }

    pub fn with_process_env(self) -> Self {
        self.with_env(|k| std::env::var(k).ok().filter(|v| !v.is_empty()))
    }

    pub fn provider_timeout(&self) -> Duration {
        Duration::from_secs(self.jargon.timeout_s.max(1))
    }

    /// Live provider when an API key is configured, otherwise the offline one.
    pub fn build_provider(&self) -> Result<Arc<dyn JargonProvider>, StartupError> {
        let j = &self.jargon;
        match j.api_key.as_deref().filter(|k| !k.trim().is_empty()) {
            Some(key) => {
                let backend = HttpChatBackend::new(LiveConfig {
                    api_url: j.api_url.clone().unwrap_or_else(|| DEFAULT_API_URL.into()),
                    api_key: key.to_owned(),
                    model: j.model.clone().unwrap_or_else(|| DEFAULT_MODEL.into()),
                    timeout: self.provider_timeout(),
                    retries: j.retries,
                })?;
                Ok(Arc::new(LlmProvider::new(backend)))
            }
            None => {
                let mock = match &j.mock_lexicon {
                    Some(path) => {
                        let bytes = std::fs::read(path)
                            .map_err(|e| StartupError::Config(format!("{}: {e}", path.display())))?;
                        MockProvider::from_json(&bytes)?
                    }
                    None => MockProvider::bundled(),
                };
                Ok(Arc::new(mock))
            }
        }
    }
}
