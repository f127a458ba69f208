use std::time::Duration;

use async_trait::async_trait;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::prompts::{render_audience_prompt, render_jargon_prompt};
use super::{ExpandedAudienceContext, JargonError, JargonProvider, JargonTerm};
use crate::deck::AudienceProfile;

/// Sends one user message, returns the model's reply text.
#[async_trait]
pub trait ChatBackend: Send + Sync {
    async fn complete(&self, prompt: &str) -> Result<String, JargonError>;
}

pub const DEFAULT_API_URL: &str = "https://api.openai.com/v1/chat/completions";
pub const DEFAULT_MODEL: &str = "gpt-4o-mini";

#[derive(Clone, Debug)]
pub struct LiveConfig {
    pub api_url: String,
    pub api_key: String,
    pub model: String,
    pub timeout: Duration,
    /// Extra attempts after the first failure.
    pub retries: u32,
}

impl LiveConfig {
    /// Reads `JARGON_API_URL`, `JARGON_API_KEY` and `JARGON_MODEL`. Only the
    /// key is required.
    pub fn from_env() -> Result<Self, JargonError> {
        let api_key = std::env::var("JARGON_API_KEY")
            .ok()
            .filter(|k| !k.trim().is_empty())
            .ok_or_else(|| JargonError::Provider("JARGON_API_KEY is not set".into()))?;
        Ok(Self {
            api_url: std::env::var("JARGON_API_URL").unwrap_or_else(|_| DEFAULT_API_URL.into()),
            api_key,
            model: std::env::var("JARGON_MODEL").unwrap_or_else(|_| DEFAULT_MODEL.into()),
            timeout: Duration::from_secs(30),
            retries: 1,
        })
    }
}

/// Chat-completions client (`{"model", "messages": [...]}` in,
/// `choices[0].message.content` out).
pub struct HttpChatBackend {
    client: reqwest::Client,
    config: LiveConfig,
}

impl HttpChatBackend {
    pub fn new(config: LiveConfig) -> Result<Self, JargonError> {
        let client = reqwest::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| JargonError::Provider(e.to_string()))?;
        Ok(Self { client, config })
    }

    async fn attempt(&self, prompt: &str) -> Result<String, JargonError> {
        let body = serde_json::json!({
            "model": self.config.model,
            "messages": [{ "role": "user", "content": prompt }],
        });
        let resp = self
            .client
            .post(&self.config.api_url)
            .bearer_auth(&self.config.api_key)
            .json(&body)
            .send()
            .await
            .and_then(reqwest::Response::error_for_status)
            .map_err(|e| JargonError::Provider(e.to_string()))?;
        let value: serde_json::Value = resp
            .json()
            .await
            .map_err(|e| JargonError::Provider(e.to_string()))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_owned)
            .ok_or_else(|| JargonError::Provider("response has no message content".into()))
    }
}

#[async_trait]
impl ChatBackend for HttpChatBackend {
    async fn complete(&self, prompt: &str) -> Result<String, JargonError> {
        let mut last = None;
        for _ in 0..=self.config.retries {
            match self.attempt(prompt).await {
                Ok(text) => return Ok(text),
                Err(e) => {
                    tracing::warn!(error = %e, "jargon provider call failed");
                    last = Some(e);
                }
            }
        }
        Err(last.expect("at least one attempt"))
    }
}

fn strip_fences(raw: &str) -> Option<&str> {
    let s = raw.trim();
    let s = s.strip_prefix("```")?;
    let s = s.strip_suffix("```")?;
    // drop an info string such as `json`
    let s = match s.find('\n') {
        Some(nl) if !s[..nl].contains('{') => &s[nl + 1..],
        _ => s,
    };
    Some(s.trim())
}

/// Parses a model reply as JSON. A reply wrapped in a code fence is
/// unwrapped once; anything else that fails to parse is a provider error.
pub fn parse_model_json<T: DeserializeOwned>(raw: &str) -> Result<T, JargonError> {
    match serde_json::from_str(raw.trim()) {
        Ok(v) => Ok(v),
        Err(first) => {
            let inner = strip_fences(raw)
                .ok_or_else(|| JargonError::Provider(format!("malformed JSON reply: {first}")))?;
            serde_json::from_str(inner)
                .map_err(|e| JargonError::Provider(format!("malformed JSON reply: {e}")))
        }
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawExpansion {
    #[serde(default)]
    expanded_description: String,
    inferred_expertise_level: f64,
    #[serde(default)]
    known_concepts: Vec<String>,
    #[serde(default)]
    likely_jargon: Vec<String>,
    #[serde(default)]
    domain_background: String,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawDetection {
    #[serde(default)]
    jargon_terms: Vec<RawTerm>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct RawTerm {
    term: String,
    #[serde(default)]
    definition: String,
    #[serde(default)]
    alternatives: Vec<String>,
    #[serde(default)]
    start_index: f64,
    #[serde(default)]
    end_index: f64,
}

fn to_index(v: f64) -> usize {
    if v.is_finite() && v > 0.0 {
        v.round() as usize
    } else {
        0
    }
}

fn to_level(v: f64) -> u8 {
    if v.is_finite() {
        v.round().clamp(1.0, 5.0) as u8
    } else {
        1
    }
}

/// Provider that renders the two prompt templates and parses the model's
/// JSON replies.
pub struct LlmProvider<B> {
    backend: B,
}

impl<B: ChatBackend> LlmProvider<B> {
    pub fn new(backend: B) -> Self {
        Self { backend }
    }
}

impl LlmProvider<HttpChatBackend> {
    pub fn from_env() -> Result<Self, JargonError> {
        Ok(Self::new(HttpChatBackend::new(LiveConfig::from_env()?)?))
    }
}

#[async_trait]
impl<B: ChatBackend> JargonProvider for LlmProvider<B> {
    async fn expand(
        &self,
        audience: &AudienceProfile,
        _presentation_context: Option<&str>,
    ) -> Result<ExpandedAudienceContext, JargonError> {
        let reply = self.backend.complete(&render_audience_prompt(audience)).await?;
        let raw: RawExpansion = parse_model_json(&reply)?;
        Ok(ExpandedAudienceContext {
            original_description: audience.description.clone(),
            original_expertise_level: audience.expertise_level,
            expanded_description: raw.expanded_description,
            inferred_expertise_level: to_level(raw.inferred_expertise_level),
            known_concepts: raw.known_concepts,
            likely_jargon: raw.likely_jargon,
            domain_background: raw.domain_background,
        })
    }

    async fn detect(
        &self,
        slide_title: Option<&str>,
        slide_text: &str,
        context: &ExpandedAudienceContext,
        presentation_context: Option<&str>,
    ) -> Result<Vec<JargonTerm>, JargonError> {
        let prompt = render_jargon_prompt(context, presentation_context, slide_title, slide_text);
        let reply = self.backend.complete(&prompt).await?;
        let raw: RawDetection = parse_model_json(&reply)?;
        Ok(raw
            .jargon_terms
            .into_iter()
            .map(|t| JargonTerm {
                term: t.term,
                definition: t.definition,
                alternatives: t.alternatives,
                start_index: to_index(t.start_index),
                end_index: to_index(t.end_index),
                hidden: false,
            })
            .collect())
    }
}
