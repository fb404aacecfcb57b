//! Content cleaning, stopword removal, and stemming.
//!
//! Turns raw post bodies into the token streams the topic model consumes:
//! embedded URLs are dropped (they live in `refs`, not in the text), control
//! characters, punctuation, and digits become separators, stopwords are
//! removed, and the survivors are Porter-stemmed.

use std::collections::HashSet;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Post;

mod porter;

pub use porter::stem;

/// The classic SMART English stopword list, bundled as the default.
const SMART_STOPWORDS: &str = include_str!("smart_stopwords.txt");

/// A post reduced to its stemmed token stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedPost {
    pub post_id: String,
    pub tokens: Vec<String>,
    pub token_count: usize,
}

/// Lowercase words excluded from the token stream.
#[derive(Debug, Clone)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    /// The bundled ~570-word SMART list.
    pub fn default_english() -> Self {
        Self::parse(SMART_STOPWORDS)
    }

    /// Load a one-word-per-line file; `#` starts a comment line.
    pub fn load(path: &Path) -> io::Result<Self> {
        Ok(Self::parse(&fs::read_to_string(path)?))
    }

    pub fn from_words<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        Self {
            words: words
                .into_iter()
                .map(|w| w.as_ref().to_lowercase())
                .collect(),
        }
    }

    fn parse(text: &str) -> Self {
        Self::from_words(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn is_embedded_url(chunk: &str) -> bool {
    let lower = chunk.to_ascii_lowercase();
    lower.starts_with("http://") || lower.starts_with("https://")
}

/// Clean raw content into lowercase words separated by single spaces.
///
/// Embedded URLs are removed whole; control characters, punctuation, and
/// digits act as separators. Total: any input (including empty) is fine.
pub fn clean(content: &str) -> String {
    let mut words: Vec<String> = Vec::new();
    for chunk in content.split_whitespace() {
        if is_embedded_url(chunk) {
            continue;
        }
        let mut current = String::new();
        for ch in chunk.chars() {
            if ch.is_alphabetic() {
                current.extend(ch.to_lowercase());
            } else if !current.is_empty() {
                words.push(std::mem::take(&mut current));
            }
        }
        if !current.is_empty() {
            words.push(current);
        }
    }
    words.join(" ")
}

/// Clean, stopword-filter, and stem a post's content.
///
/// Stopwords are removed before stemming; tokens whose stem collides with a
/// raw stopword are dropped too, so no output token ever matches the list.
pub fn tokenize_post(post: &Post, stops: &StopwordList) -> TokenizedPost {
    let tokens: Vec<String> = clean(&post.content)
        .split_whitespace()
        .filter(|word| !stops.contains(word))
        .map(stem)
        .filter(|stemmed| !stops.contains(stemmed))
        .collect();
    TokenizedPost {
        post_id: post.id.clone(),
        token_count: tokens.len(),
        tokens,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::Utc;
    use std::collections::BTreeSet;

    fn post(content: &str) -> Post {
        Post {
            id: "http://a.com/p".to_string(),
            content: content.to_string(),
            author: "ann".to_string(),
            published_at: Utc::now(),
            refs: BTreeSet::new(),
        }
    }

    #[test]
    fn clean_strips_punctuation_and_lowercases() {
        assert_eq!(clean("Hello,\tWorld!!"), "hello world");
    }

    #[test]
    fn clean_of_empty_is_empty() {
        assert_eq!(clean(""), "");
    }

    #[test]
    fn clean_removes_embedded_urls() {
        assert_eq!(clean("visit http://a.b/c now"), "visit now");
        assert_eq!(clean("see HTTPS://x.y/z?q=1 too"), "see too");
    }

    #[test]
    fn clean_drops_digits_and_control_chars() {
        assert_eq!(clean("a1b2c3 x\u{0007}y 42"), "a b c x y");
    }

    #[test]
    fn tokenize_removes_stopwords_then_stems() {
        let stops = StopwordList::from_words(["the", "of"]);
        let tp = tokenize_post(&post("the eating of apples"), &stops);
        assert_eq!(tp.tokens, ["eat", "appl"]);
        assert_eq!(tp.token_count, 2);
    }

    #[test]
    fn tokenize_all_stopwords_is_empty() {
        let stops = StopwordList::from_words(["the", "of", "and"]);
        let tp = tokenize_post(&post("The and OF the"), &stops);
        assert!(tp.tokens.is_empty());
        assert_eq!(tp.token_count, 0);
    }

    #[test]
    fn tokenize_conflates_word_forms() {
        let stops = StopwordList::from_words(["the"]);
        let tp = tokenize_post(&post("Eating eats"), &stops);
        assert_eq!(tp.tokens, ["eat", "eat"]);
    }

    #[test]
    fn tokenize_never_emits_stopwords_even_after_stemming() {
        // "thanked" is not a stopword but stems to "thank", which is
        let stops = StopwordList::from_words(["thank", "the"]);
        let tp = tokenize_post(&post("the thanked crowd"), &stops);
        assert_eq!(tp.tokens, ["crowd"]);
        for token in &tp.tokens {
            assert!(!stops.contains(token));
        }
    }

    #[test]
    fn tokenize_is_deterministic() {
        let stops = StopwordList::default_english();
        let p = post("Storms are gathering over the coastal regions tonight");
        assert_eq!(tokenize_post(&p, &stops), tokenize_post(&p, &stops));
    }

    #[test]
    fn default_list_has_the_classic_size() {
        let stops = StopwordList::default_english();
        assert!(stops.len() > 500, "got {}", stops.len());
        for w in ["the", "of", "and", "a", "to"] {
            assert!(stops.contains(w), "missing {w}");
        }
    }
}
