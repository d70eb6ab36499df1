use serde_json::Value;

use super::{ChatBackend, ChatMessage, LlmConfig, LlmError};

pub const API_KEY_ENV: &str = "OPENAI_API_KEY";
pub const DEFAULT_BASE_URL: &str = "https://api.openai.com/v1";

const BODY_EXCERPT: usize = 300;

/// POSTs to `{base_url}/chat/completions` with a bearer token.
pub struct OpenAiBackend {
    http: reqwest::blocking::Client,
    api_key: Option<String>,
}

impl OpenAiBackend {
    /// Reads the key from the environment. A key is only mandatory for the
    /// default endpoint; local servers behind `base_url` often need none.
    pub fn from_env(config: &LlmConfig) -> Result<Self, LlmError> {
        let api_key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        if api_key.is_none() && config.base_url.is_none() {
            return Err(LlmError::MissingApiKey);
        }
        Self::new(config, api_key)
    }

    pub fn new(config: &LlmConfig, api_key: Option<String>) -> Result<Self, LlmError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| LlmError::Transport(e.to_string()))?;
        Ok(Self { http, api_key })
    }
}

fn endpoint(config: &LlmConfig) -> String {
    let base = config.base_url.as_deref().unwrap_or(DEFAULT_BASE_URL);
    format!("{}/chat/completions", base.trim_end_matches('/'))
}

fn excerpt(body: &str) -> String {
    match body.char_indices().nth(BODY_EXCERPT) {
        Some((i, _)) => format!("{}…", &body[..i]),
        None => body.to_owned(),
    }
}

impl ChatBackend for OpenAiBackend {
    fn complete(&self, messages: &[ChatMessage], config: &LlmConfig) -> Result<String, LlmError> {
        let mut body = serde_json::json!({
            "model": config.model,
            "temperature": config.temperature,
            "messages": messages,
        });
        if let Some(seed) = config.seed {
            body["seed"] = seed.into();
        }
        let mut request = self.http.post(endpoint(config)).json(&body);
        if let Some(key) = &self.api_key {
            request = request.bearer_auth(key);
        }
        let map_err = |e: reqwest::Error| {
            if e.is_timeout() {
                LlmError::Timeout(config.timeout)
            } else {
                LlmError::Transport(e.to_string())
            }
        };
        let response = request.send().map_err(map_err)?;
        let status = response.status();
        let text = response.text().map_err(map_err)?;
        if !status.is_success() {
            return Err(LlmError::BadStatus { code: status.as_u16(), body: excerpt(&text) });
        }
        let json: Value = serde_json::from_str(&text).map_err(|e| LlmError::BadResponse(e.to_string()))?;
        json.pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_owned)
            .ok_or_else(|| LlmError::BadResponse(format!("no choices[0].message.content in {}", excerpt(&text))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoint_join() {
        let mut cfg = LlmConfig::default();
        assert_eq!(endpoint(&cfg), "https://api.openai.com/v1/chat/completions");
        cfg.base_url = Some("http://localhost:8080/v1/".into());
        assert_eq!(endpoint(&cfg), "http://localhost:8080/v1/chat/completions");
    }

    #[test]
    fn unreachable_server_is_transport_error() {
        // bind then drop to get a port nobody listens on
        let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
        let cfg = LlmConfig {
            base_url: Some(format!("http://127.0.0.1:{port}/v1")),
            timeout: std::time::Duration::from_secs(5),
            ..LlmConfig::default()
        };
        let backend = OpenAiBackend::new(&cfg, None).unwrap();
        let err = backend
            .complete(&[ChatMessage::system("s"), ChatMessage::user("u")], &cfg)
            .unwrap_err();
        assert!(matches!(err, LlmError::Transport(_)), "{err:?}");
    }

    #[test]
    fn excerpt_is_bounded() {
        assert_eq!(excerpt("short"), "short");
        assert_eq!(excerpt(&"é".repeat(1000)).chars().count(), BODY_EXCERPT + 1);
    }
}
