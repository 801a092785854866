//! Remote chat-completion providers over a pluggable HTTP transport.

use std::time::Duration;

use serde_json::{json, Value};

use super::{
    token_label, Capabilities, CompletionRequest, LabelCompletion, Prompt, Provider, ProviderError,
    TokenLogprob,
};

#[derive(Debug, Clone, PartialEq)]
pub struct HttpResponse {
    pub status: u16,
    pub retry_after: Option<Duration>,
    pub body: String,
}

pub trait HttpTransport: Send + Sync {
    fn post_json(
        &self,
        url: &str,
        headers: &[(&str, String)],
        body: &Value,
    ) -> Result<HttpResponse, ProviderError>;
}

/// Blocking transport backed by `ureq`.
pub struct UreqTransport {
    agent: ureq::Agent,
}

impl UreqTransport {
    pub fn new(timeout: Duration) -> Self {
        let config = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build();
        UreqTransport {
            agent: config.into(),
        }
    }
}

impl Default for UreqTransport {
    fn default() -> Self {
        Self::new(Duration::from_secs(120))
    }
}

impl HttpTransport for UreqTransport {
    fn post_json(
        &self,
        url: &str,
        headers: &[(&str, String)],
        body: &Value,
    ) -> Result<HttpResponse, ProviderError> {
        let mut req = self.agent.post(url);
        for (k, v) in headers {
            req = req.header(*k, v.as_str());
        }
        let mut resp = req
            .send_json(body)
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        let retry_after = resp
            .headers()
            .get("retry-after")
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.trim().parse::<f64>().ok())
            .map(Duration::from_secs_f64);
        let body = resp
            .body_mut()
            .read_to_string()
            .map_err(|e| ProviderError::Transport(e.to_string()))?;
        Ok(HttpResponse {
            status,
            retry_after,
            body,
        })
    }
}

fn check_status(resp: HttpResponse) -> Result<Value, ProviderError> {
    match resp.status {
        200..=299 => serde_json::from_str(&resp.body)
            .map_err(|e| ProviderError::InvalidResponse(format!("body is not JSON: {e}"))),
        429 => Err(ProviderError::RateLimited {
            retry_after: resp.retry_after,
        }),
        401 | 403 => Err(ProviderError::Auth(snippet(&resp.body))),
        408 | 500..=599 => Err(ProviderError::Transport(format!(
            "HTTP {}: {}",
            resp.status,
            snippet(&resp.body)
        ))),
        s => Err(ProviderError::Rejected(format!(
            "HTTP {s}: {}",
            snippet(&resp.body)
        ))),
    }
}

fn snippet(body: &str) -> String {
    body.chars().take(300).collect()
}

fn missing(path: &str) -> ProviderError {
    ProviderError::InvalidResponse(format!("response lacks {path}"))
}

/// Any server speaking the OpenAI chat-completions protocol.
pub struct OpenAiProvider {
    base_url: String,
    model: String,
    api_key: Option<String>,
    top_logprobs: u32,
    capabilities: Capabilities,
    transport: Box<dyn HttpTransport>,
}

impl OpenAiProvider {
    pub fn new(
        base_url: impl Into<String>,
        model: impl Into<String>,
        api_key: Option<String>,
        transport: Box<dyn HttpTransport>,
    ) -> Self {
        OpenAiProvider {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            model: model.into(),
            api_key,
            top_logprobs: 20,
            capabilities: Capabilities {
                chat: true,
                label_probs: true,
                token_logprobs: false,
            },
            transport,
        }
    }

    /// Servers that support `echo` on the legacy completions endpoint can score text.
    pub fn with_token_logprobs(mut self, enabled: bool) -> Self {
        self.capabilities.token_logprobs = enabled;
        self
    }

    pub fn with_label_probs(mut self, enabled: bool) -> Self {
        self.capabilities.label_probs = enabled;
        self
    }

    fn headers(&self) -> Vec<(&'static str, String)> {
        let mut h = vec![("content-type", "application/json".to_string())];
        if let Some(key) = &self.api_key {
            h.push(("authorization", format!("Bearer {key}")));
        }
        h
    }

    fn chat_body(&self, request: &CompletionRequest) -> Value {
        let messages = match &request.prompt {
            Prompt::Single(p) => json!([{"role": "user", "content": p}]),
            Prompt::SystemUser { system, user } => json!([
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ]),
        };
        json!({
            "model": self.model,
            "messages": messages,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        })
    }

    fn post(&self, path: &str, body: &Value) -> Result<Value, ProviderError> {
        let url = format!("{}/{path}", self.base_url);
        check_status(self.transport.post_json(&url, &self.headers(), body)?)
    }
}

fn first_choice(v: &Value) -> Result<&Value, ProviderError> {
    v.pointer("/choices/0").ok_or_else(|| missing("choices[0]"))
}

/// Reads label probabilities from the first generated token that is itself a
/// label, summing variants such as `A` and ` A`.
pub(crate) fn label_probs_from_openai(choice: &Value) -> [Option<f64>; 4] {
    let Some(content) = choice
        .pointer("/logprobs/content")
        .and_then(Value::as_array)
    else {
        return [None; 4];
    };
    for tok in content {
        let chosen = tok.get("token").and_then(Value::as_str).unwrap_or_default();
        if token_label(chosen).is_none() {
            continue;
        }
        let mut probs = [None; 4];
        for alt in tok
            .get("top_logprobs")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            let (Some(t), Some(lp)) = (
                alt.get("token").and_then(Value::as_str),
                alt.get("logprob").and_then(Value::as_f64),
            ) else {
                continue;
            };
            if let Some(label) = token_label(t) {
                let slot: &mut Option<f64> = &mut probs[label.index()];
                *slot = Some(slot.unwrap_or(0.0) + lp.exp());
            }
        }
        return probs;
    }
    [None; 4]
}

impl Provider for OpenAiProvider {
    fn provider_name(&self) -> &str {
        "openai"
    }

    fn model_name(&self) -> &str {
        &self.model
    }

    fn capabilities(&self) -> Capabilities {
        self.capabilities
    }

    fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError> {
        let v = self.post("chat/completions", &self.chat_body(request))?;
        first_choice(&v)?
            .pointer("/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| missing("choices[0].message.content"))
    }

    fn complete_with_label_probs(
        &self,
        request: &CompletionRequest,
    ) -> Result<LabelCompletion, ProviderError> {
        let mut body = self.chat_body(request);
        body["logprobs"] = json!(true);
        body["top_logprobs"] = json!(self.top_logprobs);
        let v = self.post("chat/completions", &body)?;
        let choice = first_choice(&v)?;
        let text = choice
            .pointer("/message/content")
            .and_then(Value::as_str)
            .ok_or_else(|| missing("choices[0].message.content"))?
            .to_string();
        Ok(LabelCompletion {
            text,
            label_probs: label_probs_from_openai(choice),
        })
    }

    fn token_logprobs(&self, text: &str) -> Result<Vec<TokenLogprob>, ProviderError> {
        if !self.capabilities.token_logprobs {
            return Err(ProviderError::Unsupported("token logprobs"));
        }
        let body = json!({
            "model": self.model,
            "prompt": text,
            "max_tokens": 0,
            "echo": true,
            "logprobs": 0,
            "temperature": 0,
        });
        let v = self.post("completions", &body)?;
        let lp = first_choice(&v)?
            .get("logprobs")
            .ok_or_else(|| missing("choices[0].logprobs"))?;
        let tokens = lp
            .get("tokens")
            .and_then(Value::as_array)
            .ok_or_else(|| missing("logprobs.tokens"))?;
        let scores = lp
            .get("token_logprobs")
            .and_then(Value::as_array)
            .ok_or_else(|| missing("logprobs.token_logprobs"))?;
        merge_unscored(tokens, scores)
    }
}

/// The first echoed token has no conditional logprob; its text is folded into
/// the next token so the list still concatenates to the input.
fn merge_unscored(tokens: &[Value], scores: &[Value]) -> Result<Vec<TokenLogprob>, ProviderError> {
    let mut out: Vec<TokenLogprob> = Vec::with_capacity(tokens.len());
    let mut carry = String::new();
    for (t, s) in tokens.iter().zip(scores) {
        let t = t.as_str().ok_or_else(|| missing("string tokens"))?;
        match s.as_f64() {
            Some(logprob) => {
                out.push(TokenLogprob {
                    token: std::mem::take(&mut carry) + t,
                    logprob,
                });
            }
            None => carry.push_str(t),
        }
    }
    if !carry.is_empty() {
        match out.last_mut() {
            Some(last) => last.token.push_str(&carry),
            None => return Err(ProviderError::InvalidResponse("no scored tokens".into())),
        }
    }
    Ok(out)
}

/// Anthropic messages API. Black-box: text out only.
pub struct AnthropicProvider {
    base_url: String,
    model: String,
    api_key: String,
    transport: Box<dyn HttpTransport>,
}

impl AnthropicProvider {
    pub const API_VERSION: &'static str = "2023-06-01";

    pub fn new(
        base_url: impl Into<String>,
        model: impl Into<String>,
        api_key: String,
        transport: Box<dyn HttpTransport>,
    ) -> Self {
        AnthropicProvider {
            base_url: base_url.into().trim_end_matches('/').to_string(),
            model: model.into(),
            api_key,
            transport,
        }
    }
}

impl Provider for AnthropicProvider {
    fn provider_name(&self) -> &str {
        "anthropic"
    }

    fn model_name(&self) -> &str {
        &self.model
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            chat: true,
            label_probs: false,
            token_logprobs: false,
        }
    }

    fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError> {
        let mut body = json!({
            "model": self.model,
            "max_tokens": request.max_tokens,
            "temperature": request.temperature,
            "messages": [{"role": "user", "content": request.prompt.user_text()}],
        });
        if let Prompt::SystemUser { system, .. } = &request.prompt {
            body["system"] = json!(system);
        }
        let headers = [
            ("content-type", "application/json".to_string()),
            ("x-api-key", self.api_key.clone()),
            ("anthropic-version", Self::API_VERSION.to_string()),
        ];
        let url = format!("{}/v1/messages", self.base_url);
        let v = check_status(self.transport.post_json(&url, &headers, &body)?)?;
        let blocks = v
            .get("content")
            .and_then(Value::as_array)
            .ok_or_else(|| missing("content"))?;
        let text: String = blocks
            .iter()
            .filter(|b| b.get("type").and_then(Value::as_str) == Some("text"))
            .filter_map(|b| b.get("text").and_then(Value::as_str))
            .collect();
        Ok(text)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Mutex;

    use super::*;

    struct FakeTransport {
        responses: Mutex<Vec<HttpResponse>>,
        seen: Mutex<Vec<(String, Value)>>,
    }

    impl FakeTransport {
        fn new(mut responses: Vec<HttpResponse>) -> Self {
            responses.reverse();
            FakeTransport {
                responses: Mutex::new(responses),
                seen: Mutex::new(Vec::new()),
            }
        }
    }

    impl HttpTransport for &'static FakeTransport {
        fn post_json(
            &self,
            url: &str,
            _headers: &[(&str, String)],
            body: &Value,
        ) -> Result<HttpResponse, ProviderError> {
            self.seen
                .lock()
                .unwrap()
                .push((url.to_string(), body.clone()));
            Ok(self
                .responses
                .lock()
                .unwrap()
                .pop()
                .expect("scripted response"))
        }
    }

    fn ok(body: Value) -> HttpResponse {
        HttpResponse {
            status: 200,
            retry_after: None,
            body: body.to_string(),
        }
    }

    fn leak(t: FakeTransport) -> &'static FakeTransport {
        Box::leak(Box::new(t))
    }

    #[test]
    fn openai_chat_request_and_response() {
        let t = leak(FakeTransport::new(vec![ok(
            json!({"choices": [{"message": {"content": "B"}}]}),
        )]));
        let p = OpenAiProvider::new("http://x/v1/", "gpt", Some("k".into()), Box::new(t));
        let req = CompletionRequest::new(
            Prompt::SystemUser {
                system: "sys".into(),
                user: "usr".into(),
            },
            0.0,
            4,
        );
        assert_eq!(p.complete(&req).unwrap(), "B");
        let (url, body) = t.seen.lock().unwrap()[0].clone();
        assert_eq!(url, "http://x/v1/chat/completions");
        assert_eq!(body["messages"][0]["role"], "system");
        assert_eq!(body["messages"][1]["content"], "usr");
        assert_eq!(body["max_tokens"], 4);
    }

    #[test]
    fn openai_label_probs_from_top_logprobs() {
        let choice = json!({
            "message": {"content": "A"},
            "logprobs": {"content": [{
                "token": "A",
                "top_logprobs": [
                    {"token": "A", "logprob": -0.1},
                    {"token": " A", "logprob": -5.0},
                    {"token": "B", "logprob": -3.0},
                    {"token": "C", "logprob": -3.0},
                    {"token": "D", "logprob": -3.0},
                    {"token": "The", "logprob": -6.0}
                ]
            }]}
        });
        let probs = label_probs_from_openai(&choice);
        assert!((probs[0].unwrap() - ((-0.1f64).exp() + (-5.0f64).exp())).abs() < 1e-12);
        assert!((probs[1].unwrap() - (-3.0f64).exp()).abs() < 1e-12);

        let partial = json!({"logprobs": {"content": [{"token": "A", "top_logprobs": [{"token": "A", "logprob": -0.01}]}]}});
        let probs = label_probs_from_openai(&partial);
        assert!(probs[0].is_some() && probs[1].is_none());
    }

    #[test]
    fn status_mapping() {
        let resp = |status| HttpResponse {
            status,
            retry_after: Some(Duration::from_secs(3)),
            body: "{}".into(),
        };
        assert_eq!(
            check_status(resp(429)),
            Err(ProviderError::RateLimited {
                retry_after: Some(Duration::from_secs(3))
            })
        );
        assert!(matches!(
            check_status(resp(401)),
            Err(ProviderError::Auth(_))
        ));
        assert!(matches!(
            check_status(resp(503)),
            Err(ProviderError::Transport(_))
        ));
        assert!(matches!(
            check_status(resp(400)),
            Err(ProviderError::Rejected(_))
        ));
        assert!(check_status(resp(200)).is_ok());
    }

    #[test]
    fn echoed_tokens_fold_the_unscored_head() {
        let tokens = [json!("It"), json!(" was"), json!(" cold")];
        let scores = [Value::Null, json!(-1.5), json!(-0.5)];
        let out = merge_unscored(&tokens, &scores).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].token, "It was");
        assert_eq!(out[1].token, " cold");
        assert!(merge_unscored(&[json!("x")], &[Value::Null]).is_err());
    }

    #[test]
    fn anthropic_puts_system_at_top_level() {
        let t = leak(FakeTransport::new(vec![ok(
            json!({"content": [{"type": "text", "text": "Example B: x"}]}),
        )]));
        let p = AnthropicProvider::new("https://api.example", "claude", "k".into(), Box::new(t));
        let req = CompletionRequest::new(
            Prompt::SystemUser {
                system: "sys".into(),
                user: "usr".into(),
            },
            0.1,
            100,
        );
        assert_eq!(p.complete(&req).unwrap(), "Example B: x");
        let (url, body) = t.seen.lock().unwrap()[0].clone();
        assert_eq!(url, "https://api.example/v1/messages");
        assert_eq!(body["system"], "sys");
        assert_eq!(body["messages"][0]["content"], "usr");
    }
}
