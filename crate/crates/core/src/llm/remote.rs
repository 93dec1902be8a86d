use std::env;
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use super::{ChatMessage, ChatProvider, Completion, LlmError, ModelConfig, Usage};

pub const DEFAULT_API_KEY_ENV: &str = "OPENAI_API_KEY";
pub const DEFAULT_API_BASE: &str = "https://api.openai.com/v1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransportError {
    /// Connection-level failure; always retryable.
    Network(String),
    Status { code: u16, body: String },
}

/// Minimal HTTP surface the remote provider needs. Swappable so tests can
/// assert on (or forbid) network use.
pub trait Transport: Send + Sync {
    fn post_json(&self, url: &str, bearer: &str, body: &Value) -> Result<Value, TransportError>;
}

pub struct HttpTransport {
    client: reqwest::blocking::Client,
}

impl HttpTransport {
    pub fn new(timeout: Duration) -> Result<Self, LlmError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .map_err(|e| LlmError::Config(format!("http client: {e}")))?;
        Ok(Self { client })
    }
}

impl Transport for HttpTransport {
    fn post_json(&self, url: &str, bearer: &str, body: &Value) -> Result<Value, TransportError> {
        let resp = self
            .client
            .post(url)
            .bearer_auth(bearer)
            .json(body)
            .send()
            .map_err(|e| TransportError::Network(e.to_string()))?;
        let code = resp.status().as_u16();
        let text = resp.text().map_err(|e| TransportError::Network(e.to_string()))?;
        if !(200..300).contains(&code) {
            return Err(TransportError::Status { code, body: text });
        }
        serde_json::from_str(&text).map_err(|e| TransportError::Network(format!("response is not JSON: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_retries: 4,
            base_delay: Duration::from_secs(1),
            max_delay: Duration::from_secs(30),
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `retry` (0-based): base * 2^retry, capped.
    pub fn delay(&self, retry: u32) -> Duration {
        let factor = 1u32.checked_shl(retry.min(31)).unwrap_or(u32::MAX);
        self.base_delay.saturating_mul(factor).min(self.max_delay)
    }
}

/// Token bucket shared by every worker that uses one provider.
pub struct RateLimiter {
    capacity: f64,
    per_second: f64,
    state: Mutex<(f64, Instant)>,
}

impl RateLimiter {
    pub fn new(capacity: u32, per_second: f64) -> Self {
        assert!(capacity > 0 && per_second > 0.0, "rate limiter needs positive capacity and rate");
        Self {
            capacity: capacity as f64,
            per_second,
            state: Mutex::new((capacity as f64, Instant::now())),
        }
    }

    pub fn acquire(&self) {
        loop {
            let wait = {
                let mut st = self.state.lock().unwrap();
                let now = Instant::now();
                st.0 = (st.0 + now.duration_since(st.1).as_secs_f64() * self.per_second).min(self.capacity);
                st.1 = now;
                if st.0 >= 1.0 {
                    st.0 -= 1.0;
                    return;
                }
                (1.0 - st.0) / self.per_second
            };
            thread::sleep(Duration::from_secs_f64(wait));
        }
    }
}

/// OpenAI-compatible chat-completions endpoint.
pub struct RemoteProvider {
    transport: Box<dyn Transport>,
    pub api_base: String,
    pub api_key_env: String,
    pub retry: RetryPolicy,
    limiter: Option<RateLimiter>,
}

impl RemoteProvider {
    pub fn new(transport: Box<dyn Transport>) -> Self {
        Self {
            transport,
            api_base: DEFAULT_API_BASE.into(),
            api_key_env: DEFAULT_API_KEY_ENV.into(),
            retry: RetryPolicy::default(),
            limiter: None,
        }
    }

    pub fn with_limiter(mut self, limiter: RateLimiter) -> Self {
        self.limiter = Some(limiter);
        self
    }

    /// Fails with [`LlmError::Auth`] when the credential variable is unset.
    pub fn credential(&self) -> Result<String, LlmError> {
        match env::var(&self.api_key_env) {
            Ok(v) if !v.trim().is_empty() => Ok(v),
            _ => Err(LlmError::Auth(format!("environment variable {} is not set", self.api_key_env))),
        }
    }
}

fn parse_completion(v: &Value) -> Result<Completion, String> {
    let text = v
        .pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .ok_or("response has no choices[0].message.content")?;
    let tokens = |field: &str| v.pointer(&format!("/usage/{field}")).and_then(Value::as_u64).unwrap_or(0);
    Ok(Completion {
        text: text.to_string(),
        usage: Usage {
            prompt_tokens: tokens("prompt_tokens"),
            completion_tokens: tokens("completion_tokens"),
        },
    })
}

impl ChatProvider for RemoteProvider {
    fn complete(&self, messages: &[ChatMessage], config: &ModelConfig) -> Result<Completion, LlmError> {
        config.validate()?;
        let key = self.credential()?;
        let url = format!("{}/chat/completions", self.api_base.trim_end_matches('/'));
        let body = json!({
            "model": config.model_name,
            "temperature": config.temperature,
            "max_tokens": config.max_tokens,
            "messages": messages,
        });
        let mut attempts = 0;
        loop {
            if let Some(l) = &self.limiter {
                l.acquire();
            }
            attempts += 1;
            let message = match self.transport.post_json(&url, &key, &body) {
                Ok(v) => {
                    return parse_completion(&v).map_err(|message| LlmError::Transport { attempts, message });
                }
                Err(TransportError::Status { code: 401 | 403, body }) => {
                    return Err(LlmError::Auth(format!("provider rejected the credential: {body}")));
                }
                Err(TransportError::Status { code, body }) if code != 429 && code < 500 => {
                    return Err(LlmError::Transport {
                        attempts,
                        message: format!("HTTP {code}: {body}"),
                    });
                }
                Err(TransportError::Status { code, body }) => format!("HTTP {code}: {body}"),
                Err(TransportError::Network(m)) => m,
            };
            if attempts > self.retry.max_retries {
                return Err(LlmError::Transport { attempts, message });
            }
            thread::sleep(self.retry.delay(attempts - 1));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::ProviderKind;
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    struct Panicking;

    impl Transport for Panicking {
        fn post_json(&self, _: &str, _: &str, _: &Value) -> Result<Value, TransportError> {
            panic!("network used");
        }
    }

    struct Flaky {
        failures: usize,
        calls: Arc<AtomicUsize>,
        code: u16,
    }

    impl Transport for Flaky {
        fn post_json(&self, _: &str, bearer: &str, body: &Value) -> Result<Value, TransportError> {
            assert_eq!(bearer, "secret");
            assert_eq!(body["model"], "m");
            let n = self.calls.fetch_add(1, Ordering::SeqCst);
            if n < self.failures {
                return Err(TransportError::Status {
                    code: self.code,
                    body: "busy".into(),
                });
            }
            Ok(json!({
                "choices": [{"message": {"role": "assistant", "content": "hi"}}],
                "usage": {"prompt_tokens": 7, "completion_tokens": 2}
            }))
        }
    }

    fn fast(p: RemoteProvider, var: &str) -> RemoteProvider {
        let mut p = p;
        p.api_key_env = var.into();
        p.retry = RetryPolicy {
            max_retries: 2,
            base_delay: Duration::ZERO,
            max_delay: Duration::ZERO,
        };
        p
    }

    #[test]
    fn missing_credential_fails_before_network() {
        let p = fast(RemoteProvider::new(Box::new(Panicking)), "ROUTEBENCH_TEST_UNSET_KEY");
        let c = ModelConfig::new("m", ProviderKind::RemoteApi);
        assert!(matches!(p.complete(&[ChatMessage::user("q")], &c), Err(LlmError::Auth(_))));
    }

    #[test]
    fn retries_then_succeeds_or_surfaces() {
        env::set_var("ROUTEBENCH_TEST_KEY_A", "secret");
        let c = ModelConfig::new("m", ProviderKind::RemoteApi);
        let calls = Arc::new(AtomicUsize::new(0));
        let p = fast(
            RemoteProvider::new(Box::new(Flaky {
                failures: 2,
                calls: calls.clone(),
                code: 503,
            })),
            "ROUTEBENCH_TEST_KEY_A",
        );
        let out = p.complete(&[ChatMessage::user("q")], &c).unwrap();
        assert_eq!(out.text, "hi");
        assert_eq!(out.usage.prompt_tokens, 7);
        assert_eq!(calls.load(Ordering::SeqCst), 3);

        let calls = Arc::new(AtomicUsize::new(0));
        let p = fast(
            RemoteProvider::new(Box::new(Flaky {
                failures: 10,
                calls: calls.clone(),
                code: 429,
            })),
            "ROUTEBENCH_TEST_KEY_A",
        );
        match p.complete(&[ChatMessage::user("q")], &c) {
            Err(LlmError::Transport { attempts, .. }) => assert_eq!(attempts, 3),
            other => panic!("unexpected {other:?}"),
        }

        let calls = Arc::new(AtomicUsize::new(0));
        let p = fast(
            RemoteProvider::new(Box::new(Flaky {
                failures: 10,
                calls: calls.clone(),
                code: 400,
            })),
            "ROUTEBENCH_TEST_KEY_A",
        );
        assert!(p.complete(&[ChatMessage::user("q")], &c).is_err());
        assert_eq!(calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn backoff_is_capped() {
        let r = RetryPolicy::default();
        assert_eq!(r.delay(0), Duration::from_secs(1));
        assert_eq!(r.delay(3), Duration::from_secs(8));
        assert_eq!(r.delay(10), Duration::from_secs(30));
        assert_eq!(r.delay(40), Duration::from_secs(30));
    }

    #[test]
    fn limiter_spaces_bursts() {
        let l = RateLimiter::new(2, 20.0);
        let t = Instant::now();
        for _ in 0..4 {
            l.acquire();
        }
        assert!(t.elapsed() >= Duration::from_millis(80));
    }
}
