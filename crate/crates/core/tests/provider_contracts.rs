use std::sync::Arc;
use std::time::{Duration, Instant};

use decop::corpus::extract_passages;
use decop::paraphrase::{generate_paraphrases, ParaphraseError};
use decop::providers::{
    CompletionRequest, Prompt, ProviderError, RateLimiter, ResponseCache, RetryPolicy,
    ScriptedProvider,
};
use decop::synth::SyntheticDoc;
use decop::{Client, Group, LengthSetting, Passage};

fn passage() -> (decop::Document, Passage) {
    let doc = SyntheticDoc::new("contract", Group::Suspect)
        .document(1, 400)
        .unwrap();
    let p = extract_passages(&doc, LengthSetting::Short64, 1, 0)
        .unwrap()
        .remove(0);
    (doc, p)
}

fn good_response(text: &str) -> String {
    let words: Vec<&str> = text.split_whitespace().collect();
    let rot = |k: usize| {
        let mut w = words.clone();
        w.rotate_left(k);
        w.join(" ")
    };
    format!(
        "Example B: {}\n\nExample C: {}\n\nExample D: {}",
        rot(words.len() / 4),
        rot(words.len() / 2),
        rot(3 * words.len() / 4)
    )
}

#[test]
fn paraphrase_retries_until_the_gate_passes() {
    let (doc, p) = passage();
    let provider = Arc::new(
        ScriptedProvider::new("para")
            .then_text("Example B: only one")
            .then_text(format!(
                "Example B: {0}\n\nExample C: x\n\nExample D: {0}",
                p.text()
            ))
            .then_text(good_response(p.text())),
    );
    let client = Client::new(provider.clone());
    let item = generate_paraphrases(&client, &p, &doc, 3).unwrap();
    assert_eq!(item.original(), p.text());
    let calls = provider.calls();
    assert_eq!(calls.len(), 3);
    assert_eq!(
        calls.iter().map(|c| c.attempt).collect::<Vec<_>>(),
        [0, 1, 2]
    );
    assert!(calls.iter().all(|c| c.temperature == 0.1));
}

#[test]
fn paraphrase_gives_up_after_retries() {
    let (doc, p) = passage();
    let provider = Arc::new(ScriptedProvider::new("para").always_text("no markers at all"));
    let client = Client::new(provider.clone());
    match generate_paraphrases(&client, &p, &doc, 2) {
        Err(ParaphraseError::Failure {
            attempts,
            last_response,
            ..
        }) => {
            assert_eq!(attempts, 3);
            assert_eq!(last_response, "no markers at all");
        }
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(provider.calls().len(), 3);
}

#[test]
fn rate_limit_errors_back_off_and_retry() {
    let provider = ScriptedProvider::new("rl")
        .then_error(ProviderError::RateLimited {
            retry_after: Some(Duration::from_millis(30)),
        })
        .then_error(ProviderError::RateLimited { retry_after: None })
        .then_text("A");
    let retry = RetryPolicy {
        max_attempts: 4,
        base_delay: Duration::from_millis(10),
        max_delay: Duration::from_secs(1),
    };
    let client = Client::new(Arc::new(provider)).with_retry(retry);
    let start = Instant::now();
    let reply = client
        .complete(&CompletionRequest::new(Prompt::Single("q".into()), 0.0, 8))
        .unwrap();
    assert_eq!(reply, "A");
    // 30 ms honoured from Retry-After, then 20 ms of exponential backoff.
    assert!(start.elapsed() >= Duration::from_millis(50));
    let counts = client.counts();
    assert_eq!((counts.provider_calls, counts.retries), (3, 2));
}

#[test]
fn non_retryable_errors_surface_at_once() {
    let provider = ScriptedProvider::new("auth").then_error(ProviderError::Auth("bad key".into()));
    let client = Client::new(Arc::new(provider)).with_retry(RetryPolicy::immediate(5));
    let err = client
        .complete(&CompletionRequest::new(Prompt::Single("q".into()), 0.0, 8))
        .unwrap_err();
    assert_eq!(err, ProviderError::Auth("bad key".into()));
    assert_eq!(client.counts().provider_calls, 1);
}

#[test]
fn cache_hit_skips_the_provider() {
    let dir = tempfile::tempdir().unwrap();
    let request = CompletionRequest::new(Prompt::Single("question".into()), 0.0, 8);
    let first = Client::new(Arc::new(ScriptedProvider::new("m").then_text("B")))
        .with_cache(ResponseCache::open(dir.path()).unwrap());
    assert_eq!(first.complete(&request).unwrap(), "B");
    assert_eq!(first.counts().provider_calls, 1);

    let empty = Arc::new(ScriptedProvider::new("m"));
    let second = Client::new(empty.clone()).with_cache(ResponseCache::open(dir.path()).unwrap());
    assert_eq!(second.complete(&request).unwrap(), "B");
    assert_eq!(second.counts().provider_calls, 0);
    assert_eq!(second.counts().cache_hits, 1);
    assert!(empty.calls().is_empty());

    let mut retry = request.clone();
    retry.attempt = 1;
    assert!(
        second.complete(&retry).is_err(),
        "a new attempt is a new cache key"
    );
}

#[test]
fn rate_limiter_spaces_requests_after_the_burst() {
    let limiter = RateLimiter::new(600.0, 2);
    let start = Instant::now();
    for _ in 0..4 {
        limiter.acquire();
    }
    // Two immediate, then one every 100 ms.
    assert!(start.elapsed() >= Duration::from_millis(190));
}
