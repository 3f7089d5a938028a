//! Chat-completion transport for OpenAI-compatible endpoints.

use std::sync::Mutex;
use std::time::Duration;

use serde_json::{json, Value};

use mohollm::Usage;

use crate::error::{LlmError, Result};
use crate::pricing::PriceTable;

/// Environment variables searched for the API key, in order.
pub const API_KEY_VARS: [&str; 2] = ["MOHOLLM_API_KEY", "OPENAI_API_KEY"];

/// A text-in, text-out model call with usage accounting.
pub trait Completion: Send + Sync {
    fn complete(&self, prompt: &str) -> Result<(String, Usage)>;

    /// Usage accumulated since the previous call, failed attempts included.
    fn drain_usage(&self) -> Usage;
}

#[derive(Debug, Clone)]
pub struct ClientConfig {
    /// Base URL such as `https://api.openai.com/v1`, or a full
    /// `.../chat/completions` URL.
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub timeout: Duration,
    pub attempts: usize,
    /// Delay before the first retry; doubles on each further retry.
    pub backoff: Duration,
}

impl ClientConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            endpoint: endpoint.into(),
            model: model.into(),
            temperature: 1.0,
            timeout: Duration::from_secs(120),
            attempts: 3,
            backoff: Duration::from_millis(500),
        }
    }

    fn url(&self) -> String {
        let base = self.endpoint.trim_end_matches('/');
        if base.ends_with("/chat/completions") {
            base.to_string()
        } else {
            format!("{base}/chat/completions")
        }
    }
}

/// Blocking client; safe to share across threads. All usage flows into one
/// internal ledger.
pub struct ChatClient {
    config: ClientConfig,
    api_key: String,
    prices: PriceTable,
    http: reqwest::blocking::Client,
    ledger: Mutex<Usage>,
}

enum Attempt {
    Done(String, u64, u64),
    Transient(String),
}

impl ChatClient {
    /// Reads the key from the first set variable in [`API_KEY_VARS`].
    pub fn from_env(config: ClientConfig, prices: PriceTable) -> Result<Self> {
        let key = API_KEY_VARS
            .iter()
            .find_map(|v| std::env::var(v).ok().filter(|k| !k.is_empty()))
            .ok_or_else(|| LlmError::Credential(API_KEY_VARS.join(" or ")))?;
        Self::with_key(config, prices, key)
    }

    pub fn with_key(config: ClientConfig, prices: PriceTable, api_key: String) -> Result<Self> {
        let http = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| LlmError::Payload(format!("http client: {e}")))?;
        Ok(Self {
            config,
            api_key,
            prices,
            http,
            ledger: Mutex::new(Usage::default()),
        })
    }

    pub fn config(&self) -> &ClientConfig {
        &self.config
    }

    fn attempt(&self, body: &Value) -> Result<Attempt> {
        let response = match self
            .http
            .post(self.config.url())
            .bearer_auth(&self.api_key)
            .json(body)
            .send()
        {
            Ok(r) => r,
            Err(e) => return Ok(Attempt::Transient(e.to_string())),
        };
        let status = response.status().as_u16();
        let text = match response.text() {
            Ok(t) => t,
            Err(e) => return Ok(Attempt::Transient(e.to_string())),
        };
        match status {
            200..=299 => {
                let (content, prompt, completion) = parse_reply(&text)?;
                Ok(Attempt::Done(content, prompt, completion))
            }
            401 | 403 => Err(LlmError::Auth { status }),
            429 | 500..=599 => Ok(Attempt::Transient(format!("HTTP {status}"))),
            _ => Err(LlmError::Rejected { status, body: text }),
        }
    }

    fn charge(&self, usage: Usage) {
        *self.ledger.lock().expect("usage ledger poisoned") += usage;
    }
}

/// Message content and token counts from a chat-completion body.
fn parse_reply(text: &str) -> Result<(String, u64, u64)> {
    let value: Value = serde_json::from_str(text).map_err(|e| LlmError::Payload(e.to_string()))?;
    let content = value
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or_else(|| LlmError::Payload("missing choices[0].message.content".into()))?;
    let count = |key: &str| {
        value
            .pointer(&format!("/usage/{key}"))
            .and_then(Value::as_u64)
            .unwrap_or(0)
    };
    Ok((
        content.to_string(),
        count("prompt_tokens"),
        count("completion_tokens"),
    ))
}

impl Completion for ChatClient {
    fn complete(&self, prompt: &str) -> Result<(String, Usage)> {
        let body = json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
        });
        let attempts = self.config.attempts.max(1);
        let mut usage = Usage::default();
        let mut last = String::new();
        for attempt in 0..attempts {
            if attempt > 0 {
                std::thread::sleep(self.config.backoff * (1 << (attempt - 1)));
            }
            usage.requests += 1;
            match self.attempt(&body) {
                Ok(Attempt::Done(content, prompt_tokens, completion_tokens)) => {
                    usage.prompt_tokens = prompt_tokens;
                    usage.completion_tokens = completion_tokens;
                    usage.total_tokens = prompt_tokens + completion_tokens;
                    usage.cost =
                        self.prices
                            .cost(&self.config.model, prompt_tokens, completion_tokens);
                    self.charge(usage);
                    return Ok((content, usage));
                }
                Ok(Attempt::Transient(reason)) => last = reason,
                Err(e) => {
                    self.charge(usage);
                    return Err(e);
                }
            }
        }
        self.charge(usage);
        Err(LlmError::Exhausted { attempts, last })
    }

    fn drain_usage(&self) -> Usage {
        std::mem::take(&mut *self.ledger.lock().expect("usage ledger poisoned"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn url_suffix_added_once() {
        assert_eq!(
            ClientConfig::new("http://h/v1/", "m").url(),
            "http://h/v1/chat/completions"
        );
        assert_eq!(
            ClientConfig::new("http://h/v1/chat/completions", "m").url(),
            "http://h/v1/chat/completions"
        );
    }

    #[test]
    fn reply_parsing() {
        let body = r#"{"choices":[{"message":{"role":"assistant","content":"[1]"}}],"usage":{"prompt_tokens":7,"completion_tokens":3,"total_tokens":10}}"#;
        assert_eq!(parse_reply(body).unwrap(), ("[1]".to_string(), 7, 3));
        assert!(matches!(parse_reply("{}"), Err(LlmError::Payload(_))));
        assert!(matches!(parse_reply("<html>"), Err(LlmError::Payload(_))));
        let no_usage = r#"{"choices":[{"message":{"content":"x"}}]}"#;
        assert_eq!(parse_reply(no_usage).unwrap(), ("x".to_string(), 0, 0));
    }
}
