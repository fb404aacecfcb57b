//! URL-to-topic affinity scoring and key-post election.
//!
//! A referenced URL is representative of a topic when it is cited often
//! inside that topic and rarely in the window's other topics:
//! `repr = tf * ln(k / topics_citing)`. Candidates include URLs that are not
//! corpus posts themselves. Election keeps the top-scoring candidates per
//! topic, except that a topic whose candidates all tie carries no signal and
//! elects nothing.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Post;
use crate::topics::TopicModel;

#[derive(Debug, Error)]
pub enum AffinityError {
    #[error("url {url:?} is not referenced in this window")]
    NotReferenced { url: String },
}

/// Affinity of one URL to one topic of one window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinityRecord {
    pub url: String,
    pub window_index: usize,
    pub topic: usize,
    /// Posts of the topic referencing the URL (set semantics: once per post).
    pub tf: u32,
    pub idf: f64,
    /// Exactly `tf * idf`.
    pub repr: f64,
    /// True when the URL is itself a post of the corpus.
    pub in_corpus: bool,
}

/// An elected key post.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyPost {
    pub url: String,
    pub window_index: usize,
    pub topic: usize,
    pub repr: f64,
    pub in_corpus: bool,
    /// Known only for in-corpus posts; filled by the pipeline.
    pub author: Option<String>,
}

/// How key posts are picked from a topic's candidates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElectionMode {
    /// The top `x` by score, plus every candidate tied with the x-th.
    TopX(usize),
    /// Every candidate scoring at least `theta * max_score`, theta in (0, 1].
    PercentThreshold(f64),
}

/// Count posts assigned to topic `t` whose refs contain `url`.
pub fn url_frequency(url: &str, t: usize, model: &TopicModel, window_posts: &[&Post]) -> u32 {
    window_posts
        .iter()
        .filter(|p| model.assignment.get(&p.id) == Some(&t) && p.refs.contains(url))
        .count() as u32
}

/// `ln(k / topics_citing_url)` over the window's topics.
pub fn inverse_topic_frequency(
    url: &str,
    model: &TopicModel,
    window_posts: &[&Post],
) -> Result<f64, AffinityError> {
    let mut topics_with: BTreeSet<usize> = BTreeSet::new();
    for p in window_posts {
        if let Some(&t) = model.assignment.get(&p.id) {
            if p.refs.contains(url) {
                topics_with.insert(t);
            }
        }
    }
    if topics_with.is_empty() {
        return Err(AffinityError::NotReferenced {
            url: url.to_string(),
        });
    }
    Ok((model.k as f64 / topics_with.len() as f64).ln())
}

/// One record per `(url, topic)` pair with `tf > 0`, sorted by
/// `(topic, url)`. URLs that are not corpus posts are candidates too.
pub fn compute_affinities(
    model: &TopicModel,
    window_posts: &[&Post],
    corpus_ids: &BTreeSet<String>,
) -> Vec<AffinityRecord> {
    // tf per (topic, url) and the set of topics citing each url, in one pass
    let mut tf: BTreeMap<(usize, &str), u32> = BTreeMap::new();
    let mut topics_citing: HashMap<&str, BTreeSet<usize>> = HashMap::new();
    for p in window_posts {
        let Some(&t) = model.assignment.get(&p.id) else {
            continue;
        };
        for url in &p.refs {
            *tf.entry((t, url.as_str())).or_insert(0) += 1;
            topics_citing.entry(url.as_str()).or_default().insert(t);
        }
    }
    tf.into_iter()
        .map(|((topic, url), count)| {
            let cited_in = topics_citing[url].len();
            let idf = (model.k as f64 / cited_in as f64).ln();
            AffinityRecord {
                url: url.to_string(),
                window_index: model.window_index,
                topic,
                tf: count,
                idf,
                repr: count as f64 * idf,
                in_corpus: corpus_ids.contains(url),
            }
        })
        .collect()
}

/// Elect the key posts of topic `t` from its affinity records.
///
/// Only records with `repr > 0` are candidates. When two or more candidates
/// exist and all carry the same score, none is more relevant than the
/// others and nothing is elected. The result is invariant to input order.
pub fn elect_key_posts(records: &[AffinityRecord], t: usize, mode: ElectionMode) -> Vec<KeyPost> {
    let mut candidates: Vec<&AffinityRecord> = records
        .iter()
        .filter(|r| r.topic == t && r.repr > 0.0)
        .collect();
    if candidates.is_empty() {
        return Vec::new();
    }
    if candidates.len() >= 2 && candidates.iter().all(|r| r.repr == candidates[0].repr) {
        return Vec::new();
    }
    candidates.sort_by(|a, b| {
        b.repr
            .partial_cmp(&a.repr)
            .expect("repr is never NaN")
            .then_with(|| a.url.cmp(&b.url))
    });
    let elected: Vec<&AffinityRecord> = match mode {
        ElectionMode::TopX(x) => {
            let x = x.max(1).min(candidates.len());
            let cutoff = candidates[x - 1].repr;
            candidates
                .into_iter()
                .filter(|r| r.repr >= cutoff)
                .collect()
        }
        ElectionMode::PercentThreshold(theta) => {
            let max = candidates[0].repr;
            candidates
                .into_iter()
                .filter(|r| r.repr >= theta * max)
                .collect()
        }
    };
    elected
        .into_iter()
        .map(|r| KeyPost {
            url: r.url.clone(),
            window_index: r.window_index,
            topic: r.topic,
            repr: r.repr,
            in_corpus: r.in_corpus,
            author: None,
        })
        .collect()
}
