use std::collections::VecDeque;
use std::sync::Mutex;

use super::{
    Capabilities, CompletionRequest, LabelCompletion, Provider, ProviderError, TokenLogprob,
};

#[derive(Debug, Clone, PartialEq)]
pub enum ScriptedReply {
    Text(String),
    Label(LabelCompletion),
    Error(ProviderError),
}

/// A provider that replays a fixed script, for tests and offline fixtures.
/// Replies are consumed in order; once the queue is empty the fallback reply,
/// if any, answers every further call.
#[derive(Debug)]
pub struct ScriptedProvider {
    model: String,
    capabilities: Capabilities,
    replies: Mutex<VecDeque<ScriptedReply>>,
    fallback: Option<ScriptedReply>,
    token_table: Option<Vec<TokenLogprob>>,
    calls: Mutex<Vec<CompletionRequest>>,
}

impl ScriptedProvider {
    pub fn new(model: impl Into<String>) -> Self {
        ScriptedProvider {
            model: model.into(),
            capabilities: Capabilities {
                chat: true,
                label_probs: false,
                token_logprobs: false,
            },
            replies: Mutex::new(VecDeque::new()),
            fallback: None,
            token_table: None,
            calls: Mutex::new(Vec::new()),
        }
    }

    pub fn then(self, reply: ScriptedReply) -> Self {
        self.replies.lock().unwrap().push_back(reply);
        self
    }

    pub fn then_text(self, text: impl Into<String>) -> Self {
        self.then(ScriptedReply::Text(text.into()))
    }

    pub fn then_error(self, err: ProviderError) -> Self {
        self.then(ScriptedReply::Error(err))
    }

    pub fn always(mut self, reply: ScriptedReply) -> Self {
        self.fallback = Some(reply);
        self
    }

    pub fn always_text(self, text: impl Into<String>) -> Self {
        self.always(ScriptedReply::Text(text.into()))
    }

    pub fn with_label_probs(mut self) -> Self {
        self.capabilities.label_probs = true;
        self
    }

    pub fn with_token_table(mut self, table: Vec<TokenLogprob>) -> Self {
        self.capabilities.token_logprobs = true;
        self.token_table = Some(table);
        self
    }

    /// Requests received so far, in order.
    pub fn calls(&self) -> Vec<CompletionRequest> {
        self.calls.lock().unwrap().clone()
    }

    fn next(&self, request: &CompletionRequest) -> Result<ScriptedReply, ProviderError> {
        self.calls.lock().unwrap().push(request.clone());
        let reply = self.replies.lock().unwrap().pop_front();
        reply
            .or_else(|| self.fallback.clone())
            .ok_or_else(|| ProviderError::InvalidResponse("script exhausted".into()))
    }
}

impl Provider for ScriptedProvider {
    fn provider_name(&self) -> &str {
        "scripted"
    }

    fn model_name(&self) -> &str {
        &self.model
    }

    fn capabilities(&self) -> Capabilities {
        self.capabilities
    }

    fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError> {
        match self.next(request)? {
            ScriptedReply::Text(t) => Ok(t),
            ScriptedReply::Label(l) => Ok(l.text),
            ScriptedReply::Error(e) => Err(e),
        }
    }

    fn complete_with_label_probs(
        &self,
        request: &CompletionRequest,
    ) -> Result<LabelCompletion, ProviderError> {
        match self.next(request)? {
            ScriptedReply::Text(text) => Ok(LabelCompletion {
                text,
                label_probs: [None; 4],
            }),
            ScriptedReply::Label(l) => Ok(l),
            ScriptedReply::Error(e) => Err(e),
        }
    }

    fn token_logprobs(&self, _text: &str) -> Result<Vec<TokenLogprob>, ProviderError> {
        self.token_table
            .clone()
            .ok_or(ProviderError::Unsupported("token logprobs"))
    }
}
