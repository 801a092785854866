use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

/// Token bucket shared by every worker using one provider.
#[derive(Debug)]
pub struct RateLimiter {
    capacity: f64,
    per_second: f64,
    state: Mutex<Bucket>,
}

#[derive(Debug)]
struct Bucket {
    tokens: f64,
    last: Instant,
}

impl RateLimiter {
    /// `requests_per_minute` sustained, with bursts of up to `burst` requests.
    pub fn new(requests_per_minute: f64, burst: u32) -> Self {
        assert!(requests_per_minute > 0.0, "rate must be positive");
        let capacity = f64::from(burst.max(1));
        RateLimiter {
            capacity,
            per_second: requests_per_minute / 60.0,
            state: Mutex::new(Bucket {
                tokens: capacity,
                last: Instant::now(),
            }),
        }
    }

    /// Time to wait before a token is available, taking it if one is.
    fn try_take(&self, now: Instant) -> Option<Duration> {
        let mut b = self.state.lock().expect("limiter lock");
        let elapsed = now.saturating_duration_since(b.last).as_secs_f64();
        b.tokens = (b.tokens + elapsed * self.per_second).min(self.capacity);
        b.last = now;
        if b.tokens >= 1.0 {
            b.tokens -= 1.0;
            None
        } else {
            Some(Duration::from_secs_f64((1.0 - b.tokens) / self.per_second))
        }
    }

    /// Blocks until a request may be issued.
    pub fn acquire(&self) {
        while let Some(wait) = self.try_take(Instant::now()) {
            thread::sleep(wait);
        }
    }
}
