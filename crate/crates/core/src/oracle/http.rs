use std::time::Duration;

use serde_json::{json, Value};

use super::{Informant, OracleError, OracleRequest};

pub const ENV_ENDPOINT: &str = "QUANTSEM_LLM_ENDPOINT";
pub const ENV_MODEL: &str = "QUANTSEM_LLM_MODEL";
pub const ENV_KEY: &str = "QUANTSEM_LLM_KEY";

/// Chat-completions client. Temperature is pinned to zero.
pub struct HttpInformant {
    endpoint: String,
    model: String,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
}

impl HttpInformant {
    pub fn new(endpoint: &str, model: &str, api_key: Option<String>) -> Result<Self, OracleError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| OracleError::Unavailable(e.to_string()))?;
        Ok(Self {
            endpoint: endpoint.to_string(),
            model: model.to_string(),
            api_key,
            client,
        })
    }

    pub fn from_env() -> Result<Self, OracleError> {
        let get = |k: &str| {
            std::env::var(k).map_err(|_| OracleError::Unavailable(format!("{k} is not set")))
        };
        Self::new(&get(ENV_ENDPOINT)?, &get(ENV_MODEL)?, std::env::var(ENV_KEY).ok())
    }

    fn body(&self, req: &OracleRequest) -> Value {
        json!({
            "model": self.model,
            "temperature": 0,
            "messages": [{"role": "user", "content": req.prompt()}],
        })
    }
}

fn content(reply: &Value) -> Option<&str> {
    reply.get("choices")?.get(0)?.get("message")?.get("content")?.as_str()
}

impl Informant for HttpInformant {
    fn respond(&self, req: &OracleRequest) -> Result<String, OracleError> {
        let mut call = self.client.post(&self.endpoint).json(&self.body(req));
        if let Some(key) = &self.api_key {
            call = call.bearer_auth(key);
        }
        let resp = call
            .send()
            .map_err(|e| OracleError::Unavailable(e.to_string()))?;
        let status = resp.status();
        if !status.is_success() {
            return Err(OracleError::Unavailable(format!("HTTP {status}")));
        }
        let v: Value = resp
            .json()
            .map_err(|e| OracleError::Unavailable(e.to_string()))?;
        content(&v)
            .map(str::to_string)
            .ok_or_else(|| OracleError::Unavailable("reply without message content".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Role;

    #[test]
    fn request_body_shape() {
        let h = HttpInformant::new("http://127.0.0.1:9/v1/chat/completions", "m", None).unwrap();
        let b = h.body(&OracleRequest::new(Role::Antonym, &[("word", "closer")]));
        assert_eq!(b["temperature"], 0);
        assert_eq!(b["model"], "m");
        assert!(b["messages"][0]["content"].as_str().unwrap().contains("closer"));
    }

    #[test]
    fn reply_content_extraction() {
        let v = json!({"choices": [{"message": {"content": "yes"}}]});
        assert_eq!(content(&v), Some("yes"));
        assert_eq!(content(&json!({})), None);
    }

    #[test]
    fn unreachable_endpoint_is_unavailable() {
        let h = HttpInformant::new("http://127.0.0.1:9/", "m", None).unwrap();
        let r = h.respond(&OracleRequest::new(Role::Antonym, &[("word", "x")]));
        assert!(matches!(r, Err(OracleError::Unavailable(_))));
    }
}
