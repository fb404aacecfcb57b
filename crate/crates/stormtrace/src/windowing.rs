//! Overlapping sliding time windows over a corpus.
//!
//! Windows span `gamma` days and advance by `delta` days. When the regular
//! grid would leave the newest posts uncovered, a tail window anchored at
//! the corpus end is appended, so every post lands in at least one window.

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Post};

#[derive(Debug, Error)]
pub enum WindowError {
    #[error("corpus contains no posts")]
    EmptyCorpus,
    #[error(
        "invalid window spec: gamma={gamma_days} delta={delta_days} (need 1 <= delta <= gamma)"
    )]
    InvalidSpec { gamma_days: u32, delta_days: u32 },
}

/// Window size and step, in whole days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub gamma_days: u32,
    pub delta_days: u32,
}

impl WindowSpec {
    /// `delta <= gamma` guarantees consecutive windows overlap, so no post
    /// can fall between them.
    pub fn new(gamma_days: u32, delta_days: u32) -> Result<Self, WindowError> {
        if gamma_days == 0 || delta_days == 0 || delta_days > gamma_days {
            return Err(WindowError::InvalidSpec {
                gamma_days,
                delta_days,
            });
        }
        Ok(Self {
            gamma_days,
            delta_days,
        })
    }
}

/// One indexed interval `[start, end]`, both bounds inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub index: usize,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl TimeWindow {
    pub fn contains(&self, at: DateTime<Utc>) -> bool {
        self.start <= at && at <= self.end
    }
}

/// Slice the corpus span into overlapping windows.
///
/// A span no longer than `gamma` yields a single window. Otherwise windows
/// start at `first_at + i * delta` for `i = 0..=floor((span - gamma) / delta)`,
/// plus a tail window `[last_at - gamma, last_at]` when the last regular
/// window ends before the newest post.
pub fn make_windows(corpus: &Corpus, spec: &WindowSpec) -> Result<Vec<TimeWindow>, WindowError> {
    if corpus.posts.is_empty() {
        return Err(WindowError::EmptyCorpus);
    }
    let gamma = Duration::days(i64::from(spec.gamma_days));
    let delta = Duration::days(i64::from(spec.delta_days));
    let span = corpus.last_at - corpus.first_at;

    let mut windows = Vec::new();
    if span <= gamma {
        windows.push(TimeWindow {
            index: 0,
            start: corpus.first_at,
            end: corpus.first_at + gamma,
        });
        return Ok(windows);
    }

    let regular = ((span - gamma).num_seconds() / delta.num_seconds()) as usize;
    for i in 0..=regular {
        let start = corpus.first_at + delta * i as i32;
        windows.push(TimeWindow {
            index: i,
            start,
            end: start + gamma,
        });
    }
    let last_end = windows.last().expect("at least one window").end;
    if last_end < corpus.last_at {
        windows.push(TimeWindow {
            index: windows.len(),
            start: corpus.last_at - gamma,
            end: corpus.last_at,
        });
    }
    Ok(windows)
}

/// Posts published inside the window, both bounds inclusive, in ascending
/// `(published_at, id)` order.
pub fn posts_in_window<'a>(corpus: &'a Corpus, window: &TimeWindow) -> Vec<&'a Post> {
    corpus
        .posts
        .iter()
        .filter(|p| window.contains(p.published_at))
        .collect()
}
