//! Shared retry machinery for provider-bound calls.

use std::time::Duration;

use rand::RngExt;

/// Whether a failed attempt is worth retrying.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetryClass {
    /// Timeouts, connection failures, 408/429/5xx responses.
    Transient,
    /// Bad credentials, malformed requests, other 4xx responses.
    Permanent,
}

/// Exponential backoff starting at `initial_delay`, doubling per retry,
/// jittered by +/-20%. The retry count is bounded by `max_retries`, so an
/// operation runs at most `max_retries + 1` times.
#[derive(Debug, Clone)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub initial_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            initial_delay: Duration::from_secs(1),
        }
    }
}

impl RetryPolicy {
    /// Delay before retry number `retry` (0-based), jitter applied.
    pub fn backoff_delay(&self, retry: u32) -> Duration {
        let base = self.initial_delay.as_secs_f64() * 2f64.powi(retry as i32);
        let jitter = rand::rng().random_range(0.8..=1.2);
        Duration::from_secs_f64(base * jitter)
    }
}

/// Run `operation` under the retry policy. The operation receives the
/// 1-based attempt number; on success the total attempt count is returned
/// alongside the value, and on exhaustion alongside the final error.
pub fn retry_with_backoff<T, E>(
    policy: &RetryPolicy,
    mut operation: impl FnMut(u32) -> Result<T, (E, RetryClass)>,
) -> Result<(T, u32), (E, u32)> {
    let mut attempt = 1u32;
    loop {
        match operation(attempt) {
            Ok(value) => return Ok((value, attempt)),
            Err((error, class)) => {
                let retries_used = attempt - 1;
                if class == RetryClass::Permanent || retries_used >= policy.max_retries {
                    return Err((error, attempt));
                }
                std::thread::sleep(policy.backoff_delay(retries_used));
                attempt += 1;
            }
        }
    }
}
