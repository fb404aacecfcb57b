//! Corpus ingestion: load, validate, and canonicalize posts.
//!
//! Every URL that enters the system — post ids and outbound references —
//! goes through [`normalize_url`] and [`RedirectMap::resolve`] so that all
//! pointers to one page share one identifier. Records with the same
//! canonical id are merged (earliest publication wins, references union).

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Redirect chains longer than this stop being followed.
const MAX_REDIRECT_HOPS: usize = 10;

const SECONDS_PER_DAY: f64 = 86_400.0;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("malformed url {url:?}")]
    MalformedUrl { url: String },
    #[error("redirect cycle involving {url:?}")]
    RedirectCycle { url: String },
    #[error("record is not valid JSON: {0}")]
    BadRecord(#[from] serde_json::Error),
    #[error("missing field {0:?}")]
    MissingField(&'static str),
    #[error("bad timestamp {0:?}")]
    BadTimestamp(String),
    #[error("corpus contains no posts")]
    EmptyCorpus,
    #[error("line {line}: {source}")]
    Record {
        line: usize,
        source: Box<CorpusError>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One corpus record: a post identified by its canonical URL.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Post {
    /// Canonical URL; a fixed point of [`normalize_url`].
    pub id: String,
    pub content: String,
    pub author: String,
    pub published_at: DateTime<Utc>,
    /// Canonical outbound references. Never contains `id`.
    pub refs: BTreeSet<String>,
}

/// An ordered, validated collection of posts.
#[derive(Debug, Clone, Serialize)]
pub struct Corpus {
    /// Posts in ascending `(published_at, id)` order.
    pub posts: Vec<Post>,
    pub first_at: DateTime<Utc>,
    pub last_at: DateTime<Utc>,
    pub span_days: f64,
}

impl Corpus {
    /// Build a corpus from posts, sorting them and deriving the time span.
    pub fn from_posts(mut posts: Vec<Post>) -> Result<Self, CorpusError> {
        if posts.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        posts.sort_by(|a, b| {
            a.published_at
                .cmp(&b.published_at)
                .then_with(|| a.id.cmp(&b.id))
        });
        let first_at = posts.first().expect("non-empty").published_at;
        let last_at = posts.last().expect("non-empty").published_at;
        let span_days = (last_at - first_at).num_seconds() as f64 / SECONDS_PER_DAY;
        Ok(Self {
            posts,
            first_at,
            last_at,
            span_days,
        })
    }

    /// Set of all post ids, for `in_corpus` checks.
    pub fn ids(&self) -> BTreeSet<String> {
        self.posts.iter().map(|p| p.id.clone()).collect()
    }

    /// Index posts by id for repeated lookups.
    pub fn by_id(&self) -> HashMap<&str, &Post> {
        self.posts.iter().map(|p| (p.id.as_str(), p)).collect()
    }
}

/// Offline stand-in for following shortened/redirected links.
#[derive(Debug, Clone, Default)]
pub struct RedirectMap {
    entries: HashMap<String, String>,
}

impl RedirectMap {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Build from `(source, destination)` pairs; both sides are normalized.
    pub fn from_pairs<I, S, D>(pairs: I) -> Result<Self, CorpusError>
    where
        I: IntoIterator<Item = (S, D)>,
        S: AsRef<str>,
        D: AsRef<str>,
    {
        let mut entries = HashMap::new();
        for (src, dst) in pairs {
            entries.insert(normalize_url(src.as_ref())?, normalize_url(dst.as_ref())?);
        }
        Ok(Self { entries })
    }

    /// Load a `source<TAB>destination` file; `#` starts a comment line.
    pub fn load(path: &Path) -> Result<Self, CorpusError> {
        let text = fs::read_to_string(path)?;
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(2, '\t');
            let src = parts.next().unwrap_or_default().trim();
            let dst = parts.next().unwrap_or_default().trim();
            if src.is_empty() || dst.is_empty() {
                return Err(CorpusError::Record {
                    line: idx + 1,
                    source: Box::new(CorpusError::MissingField("source\\tdestination")),
                });
            }
            pairs.push((src.to_string(), dst.to_string()));
        }
        Self::from_pairs(pairs)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Follow redirect entries transitively (at most [`MAX_REDIRECT_HOPS`])
    /// and re-normalize the final URL. A URL repeating along the chain is a
    /// [`CorpusError::RedirectCycle`].
    pub fn resolve(&self, url: &str) -> Result<String, CorpusError> {
        let mut current = url.to_string();
        let mut seen: HashSet<String> = HashSet::new();
        seen.insert(current.clone());
        for _ in 0..MAX_REDIRECT_HOPS {
            let Some(next) = self.entries.get(&current) else {
                break;
            };
            if !seen.insert(next.clone()) {
                return Err(CorpusError::RedirectCycle { url: next.clone() });
            }
            current = next.clone();
        }
        normalize_url(&current)
    }
}

/// Canonicalize a URL string.
///
/// Lowercases scheme and host, strips the fragment and default ports, drops
/// `utm_*` tracking parameters while preserving every other query parameter
/// byte-for-byte, removes the trailing slash of an empty path, and
/// percent-encodes commas (keeps downstream CSV quoting-free). Idempotent.
pub fn normalize_url(raw: &str) -> Result<String, CorpusError> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(CorpusError::MalformedUrl {
            url: raw.to_string(),
        });
    }
    let mut parsed = url::Url::parse(trimmed).map_err(|_| CorpusError::MalformedUrl {
        url: raw.to_string(),
    })?;
    if parsed.host_str().is_none() {
        return Err(CorpusError::MalformedUrl {
            url: raw.to_string(),
        });
    }
    parsed.set_fragment(None);
    if let Some(query) = parsed.query() {
        let kept: Vec<&str> = query
            .split('&')
            .filter(|component| {
                let key = component.split('=').next().unwrap_or(component);
                !key.to_ascii_lowercase().starts_with("utm_")
            })
            .collect();
        let rebuilt = kept.join("&");
        if rebuilt.is_empty() {
            parsed.set_query(None);
        } else if rebuilt != query {
            parsed.set_query(Some(&rebuilt));
        }
    }
    let mut out = String::from(parsed.as_str());
    if parsed.path() == "/" {
        // scheme://authority/ or scheme://authority/?query
        if let Some(qpos) = out.find('?') {
            if out.as_bytes()[qpos - 1] == b'/' {
                out.remove(qpos - 1);
            }
        } else if out.ends_with('/') {
            out.pop();
        }
    }
    Ok(out.replace(',', "%2C"))
}

#[derive(Deserialize)]
struct RawRecord {
    id: Option<String>,
    content: Option<String>,
    author: Option<String>,
    date: Option<String>,
    refs: Option<Vec<String>>,
}

fn parse_record(line: &str, map: &RedirectMap) -> Result<Post, CorpusError> {
    let raw: RawRecord = serde_json::from_str(line)?;
    let id_raw = raw.id.ok_or(CorpusError::MissingField("id"))?;
    let content = raw.content.ok_or(CorpusError::MissingField("content"))?;
    let author = raw.author.ok_or(CorpusError::MissingField("author"))?;
    let date = raw.date.ok_or(CorpusError::MissingField("date"))?;
    let raw_refs = raw.refs.ok_or(CorpusError::MissingField("refs"))?;

    let published_at = DateTime::parse_from_rfc3339(&date)
        .map_err(|_| CorpusError::BadTimestamp(date.clone()))?
        .with_timezone(&Utc);
    let id = map.resolve(&normalize_url(&id_raw)?)?;
    let mut refs = BTreeSet::new();
    for r in &raw_refs {
        let canonical = map.resolve(&normalize_url(r)?)?;
        if canonical != id {
            refs.insert(canonical);
        }
    }
    Ok(Post {
        id,
        content,
        author,
        published_at,
        refs,
    })
}

/// Load a line-delimited corpus file, canonicalizing and redirect-resolving
/// every id and reference. Records whose ids collapse to the same canonical
/// URL are merged: earliest `published_at` wins, references are unioned.
pub fn load_corpus(path: &Path, map: &RedirectMap) -> Result<Corpus, CorpusError> {
    let text = fs::read_to_string(path)?;
    load_corpus_str(&text, map)
}

/// Same as [`load_corpus`] but over in-memory text.
pub fn load_corpus_str(text: &str, map: &RedirectMap) -> Result<Corpus, CorpusError> {
    let mut merged: HashMap<String, Post> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let post = parse_record(line, map).map_err(|e| CorpusError::Record {
            line: idx + 1,
            source: Box::new(e),
        })?;
        match merged.entry(post.id.clone()) {
            std::collections::hash_map::Entry::Occupied(mut slot) => {
                let existing = slot.get_mut();
                // Earliest publication is the influence event of interest;
                // on an exact tie the first record in file order wins.
                if post.published_at < existing.published_at {
                    existing.published_at = post.published_at;
                    existing.content = post.content;
                    existing.author = post.author;
                }
                existing.refs.extend(post.refs);
                let id = existing.id.clone();
                existing.refs.remove(&id);
            }
            std::collections::hash_map::Entry::Vacant(slot) => {
                slot.insert(post);
            }
        }
    }
    Corpus::from_posts(merged.into_values().collect())
}

/// Schema-check a corpus file without building a corpus. Returns the number
/// of valid records.
pub fn validate_file(path: &Path) -> Result<usize, CorpusError> {
    let text = fs::read_to_string(path)?;
    let map = RedirectMap::empty();
    let mut count = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        parse_record(line, &map).map_err(|e| CorpusError::Record {
            line: idx + 1,
            source: Box::new(e),
        })?;
        count += 1;
    }
    if count == 0 {
        return Err(CorpusError::EmptyCorpus);
    }
    Ok(count)
}
