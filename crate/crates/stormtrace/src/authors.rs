//! Author-level influence metrics.
//!
//! Two signals: the aggregated score of an author's elected key posts, and
//! the boost score — an inverse-square time-weighted sum of the new distinct
//! adopters a post gains after the author references it. High boost marks
//! authors whose shares precede virality.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::affinity::KeyPost;
use crate::corpus::Corpus;
use crate::windowing::TimeWindow;

/// Sum of elected key-post scores per author.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorInfluence {
    pub author: String,
    pub aggregated: f64,
    pub key_post_urls: Vec<String>,
}

/// Per-window cumulative count of distinct authors referencing one URL.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccumSeries {
    pub post_url: String,
    /// `per_window[i]` = distinct referencing authors in windows `<= i`.
    pub per_window: Vec<u32>,
}

/// One post referencing one target URL, bucketed into the earliest window
/// containing the referencing post's publication time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceEvent {
    pub author: String,
    pub target_url: String,
    pub window_index: usize,
}

/// An author's total and average boost over their reference events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostResult {
    pub author: String,
    pub boost: f64,
    pub event_count: usize,
    pub average: f64,
}

/// Earliest window containing `at`; windows overlap, so the first match in
/// ascending start order is the earliest.
fn earliest_window(windows: &[TimeWindow], at: chrono::DateTime<chrono::Utc>) -> Option<usize> {
    windows.iter().find(|w| w.contains(at)).map(|w| w.index)
}

/// Every `(post, distinct target url)` pair in the corpus as an event.
pub fn reference_events(corpus: &Corpus, windows: &[TimeWindow]) -> Vec<ReferenceEvent> {
    let mut events = Vec::new();
    for post in &corpus.posts {
        let Some(window_index) = earliest_window(windows, post.published_at) else {
            continue;
        };
        for target in &post.refs {
            events.push(ReferenceEvent {
                author: post.author.clone(),
                target_url: target.clone(),
                window_index,
            });
        }
    }
    events
}

/// Group in-corpus key posts by author and sum their scores. Out-of-corpus
/// key posts have no known author and are excluded. Sorted by aggregated
/// score descending, then author.
pub fn aggregated_influence(key_posts: &[KeyPost], corpus: &Corpus) -> Vec<AuthorInfluence> {
    let by_id = corpus.by_id();
    let mut sums: BTreeMap<String, (f64, BTreeSet<String>)> = BTreeMap::new();
    for kp in key_posts {
        let Some(post) = by_id.get(kp.url.as_str()) else {
            continue;
        };
        let entry = sums
            .entry(post.author.clone())
            .or_insert_with(|| (0.0, BTreeSet::new()));
        entry.0 += kp.repr;
        entry.1.insert(kp.url.clone());
    }
    let mut out: Vec<AuthorInfluence> = sums
        .into_iter()
        .map(|(author, (aggregated, urls))| AuthorInfluence {
            author,
            aggregated,
            key_post_urls: urls.into_iter().collect(),
        })
        .collect();
    out.sort_by(|a, b| {
        b.aggregated
            .partial_cmp(&a.aggregated)
            .expect("scores are never NaN")
            .then_with(|| a.author.cmp(&b.author))
    });
    out
}

fn accum_from_events(events: &[ReferenceEvent], url: &str, n_windows: usize) -> AccumSeries {
    // earliest referencing window per distinct author
    let mut first_seen: HashMap<&str, usize> = HashMap::new();
    for ev in events.iter().filter(|e| e.target_url == url) {
        first_seen
            .entry(ev.author.as_str())
            .and_modify(|w| *w = (*w).min(ev.window_index))
            .or_insert(ev.window_index);
    }
    let per_window = (0..n_windows)
        .map(|i| first_seen.values().filter(|&&w| w <= i).count() as u32)
        .collect();
    AccumSeries {
        post_url: url.to_string(),
        per_window,
    }
}

/// Cumulative distinct-author reference counts for one URL.
pub fn build_accum(corpus: &Corpus, windows: &[TimeWindow], url: &str) -> AccumSeries {
    accum_from_events(&reference_events(corpus, windows), url, windows.len())
}

/// Inverse-square time-weighted sum of the adoption growth after the event:
/// `sum over i > slot of (accum[i] - accum[slot]) / (i - slot)^2`.
pub fn reference_score(event: &ReferenceEvent, series: &AccumSeries) -> f64 {
    let slot = event.window_index;
    let base = series.per_window[slot] as f64;
    series
        .per_window
        .iter()
        .enumerate()
        .skip(slot + 1)
        .map(|(i, &count)| (f64::from(count) - base) / ((i - slot) as f64).powi(2))
        .sum()
}

/// Total and average boost per author over all their reference events,
/// sorted by total descending, then author.
pub fn author_boost_scores(corpus: &Corpus, windows: &[TimeWindow]) -> Vec<BoostResult> {
    let events = reference_events(corpus, windows);
    let targets: BTreeSet<&str> = events.iter().map(|e| e.target_url.as_str()).collect();
    let series: HashMap<&str, AccumSeries> = targets
        .into_iter()
        .map(|url| (url, accum_from_events(&events, url, windows.len())))
        .collect();

    let mut totals: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for ev in &events {
        let score = reference_score(ev, &series[ev.target_url.as_str()]);
        let entry = totals.entry(ev.author.clone()).or_insert((0.0, 0));
        entry.0 += score;
        entry.1 += 1;
    }
    let mut out: Vec<BoostResult> = totals
        .into_iter()
        .map(|(author, (boost, event_count))| BoostResult {
            author,
            boost,
            event_count,
            average: boost / event_count as f64,
        })
        .collect();
    out.sort_by(|a, b| {
        b.boost
            .partial_cmp(&a.boost)
            .expect("scores are never NaN")
            .then_with(|| a.author.cmp(&b.author))
    });
    out
}

/// Keep authors whose average boost reaches `theta` times the maximum
/// average, theta in (0, 1].
pub fn elect_boost_authors(results: &[BoostResult], theta: f64) -> Vec<BoostResult> {
    let Some(max_avg) = results
        .iter()
        .map(|r| r.average)
        .fold(None, |acc: Option<f64>, x| {
            Some(acc.map_or(x, |a| a.max(x)))
        })
    else {
        return Vec::new();
    };
    results
        .iter()
        .filter(|r| r.average >= theta * max_avg)
        .cloned()
        .collect()
}
