//! Per-window topic detection via collapsed Gibbs sampling.
//!
//! Each window gets its own model and vocabulary. Sampling is a single
//! sequential chain seeded from the configuration, so equal inputs always
//! produce bitwise-identical models. Document/topic estimates are averaged
//! over the post-burn-in sweeps with the usual Dirichlet smoothing.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textprep::TokenizedPost;

#[derive(Debug, Error)]
pub enum TopicsError {
    #[error("window has no documents with tokens")]
    EmptyWindow,
    #[error("topic {topic} out of range for k={k}")]
    TopicOutOfRange { topic: usize, k: usize },
    #[error("invalid LDA parameters: {0}")]
    InvalidParams(String),
}

/// Sampler configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaParams {
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl LdaParams {
    /// Folklore defaults: alpha = 50/k, beta = 0.01, 500 sweeps with a
    /// 100-sweep burn-in.
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            alpha: 50.0 / k.max(1) as f64,
            beta: 0.01,
            iterations: 500,
            burn_in: 100,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), TopicsError> {
        if self.k < 1 {
            return Err(TopicsError::InvalidParams("k must be >= 1".into()));
        }
        if self.alpha <= 0.0 || self.beta <= 0.0 {
            return Err(TopicsError::InvalidParams(
                "alpha and beta must be positive".into(),
            ));
        }
        if self.iterations < 1 {
            return Err(TopicsError::InvalidParams("iterations must be >= 1".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(TopicsError::InvalidParams(
                "burn_in must be < iterations".into(),
            ));
        }
        Ok(())
    }
}

/// A fitted per-window model with a crisp post-to-topic assignment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopicModel {
    pub window_index: usize,
    pub k: usize,
    /// Documents in window order; row `i` of `doc_topic` belongs to
    /// `doc_ids[i]`.
    pub doc_ids: Vec<String>,
    pub doc_topic: Vec<Vec<f64>>,
    pub topic_word: Vec<Vec<f64>>,
    pub vocab: Vec<String>,
    /// post id -> argmax topic (lowest index wins ties).
    pub assignment: BTreeMap<String, usize>,
}

/// Fit LDA over the window's tokenized documents.
///
/// Zero-token documents must already be excluded by the caller or they are
/// skipped here; if nothing remains the window is empty. `k` larger than the
/// document count is allowed but logged.
pub fn fit_lda(
    window_index: usize,
    docs: &[&TokenizedPost],
    params: &LdaParams,
) -> Result<TopicModel, TopicsError> {
    params.validate()?;
    let docs: Vec<&TokenizedPost> = docs.iter().copied().filter(|d| d.token_count > 0).collect();
    if docs.is_empty() {
        return Err(TopicsError::EmptyWindow);
    }
    if params.k > docs.len() {
        log::warn!(
            "window {window_index}: k={} exceeds document count {}",
            params.k,
            docs.len()
        );
    }

    let vocab: Vec<String> = docs
        .iter()
        .flat_map(|d| d.tokens.iter().cloned())
        .collect::<BTreeSet<String>>()
        .into_iter()
        .collect();
    let word_index: HashMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_str(), i))
        .collect();

    let k = params.k;
    let v = vocab.len();
    let n_docs = docs.len();
    let words: Vec<Vec<usize>> = docs
        .iter()
        .map(|d| d.tokens.iter().map(|t| word_index[t.as_str()]).collect())
        .collect();
    let total_tokens: usize = words.iter().map(Vec::len).sum();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut z: Vec<Vec<usize>> = Vec::with_capacity(n_docs);
    let mut n_dk = vec![vec![0usize; k]; n_docs];
    let mut n_kw = vec![vec![0usize; v]; k];
    let mut n_k = vec![0usize; k];
    let n_d: Vec<usize> = words.iter().map(Vec::len).collect();

    for (d, doc) in words.iter().enumerate() {
        let mut zs = Vec::with_capacity(doc.len());
        for &w in doc {
            let topic = rng.random_range(0..k);
            zs.push(topic);
            n_dk[d][topic] += 1;
            n_kw[topic][w] += 1;
            n_k[topic] += 1;
        }
        z.push(zs);
    }

    let alpha = params.alpha;
    let beta = params.beta;
    let v_beta = v as f64 * beta;
    let k_alpha = k as f64 * alpha;

    let mut theta_sum = vec![vec![0.0f64; k]; n_docs];
    let mut phi_sum = vec![vec![0.0f64; v]; k];
    let mut samples = 0usize;
    let mut weights = vec![0.0f64; k];

    for sweep in 0..params.iterations {
        for (d, doc) in words.iter().enumerate() {
            for (i, &w) in doc.iter().enumerate() {
                let old = z[d][i];
                n_dk[d][old] -= 1;
                n_kw[old][w] -= 1;
                n_k[old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    let p = (n_dk[d][t] as f64 + alpha) * (n_kw[t][w] as f64 + beta)
                        / (n_k[t] as f64 + v_beta);
                    weights[t] = p;
                    total += p;
                }
                let mut pick = rng.random::<f64>() * total;
                let mut new = k - 1;
                for (t, &wt) in weights.iter().enumerate() {
                    pick -= wt;
                    if pick <= 0.0 {
                        new = t;
                        break;
                    }
                }

                z[d][i] = new;
                n_dk[d][new] += 1;
                n_kw[new][w] += 1;
                n_k[new] += 1;
            }
        }
        debug_assert_eq!(
            n_k.iter().sum::<usize>(),
            total_tokens,
            "token count not conserved at sweep {sweep}"
        );

        if sweep >= params.burn_in {
            samples += 1;
            for d in 0..n_docs {
                for t in 0..k {
                    theta_sum[d][t] += (n_dk[d][t] as f64 + alpha) / (n_d[d] as f64 + k_alpha);
                }
            }
            for t in 0..k {
                for w in 0..v {
                    phi_sum[t][w] += (n_kw[t][w] as f64 + beta) / (n_k[t] as f64 + v_beta);
                }
            }
        }
    }

    let scale = 1.0 / samples as f64;
    let doc_topic: Vec<Vec<f64>> = theta_sum
        .into_iter()
        .map(|row| row.into_iter().map(|x| x * scale).collect())
        .collect();
    let topic_word: Vec<Vec<f64>> = phi_sum
        .into_iter()
        .map(|row| row.into_iter().map(|x| x * scale).collect())
        .collect();

    let mut assignment = BTreeMap::new();
    let doc_ids: Vec<String> = docs.iter().map(|d| d.post_id.clone()).collect();
    for (d, id) in doc_ids.iter().enumerate() {
        assignment.insert(id.clone(), argmax_lowest(&doc_topic[d]));
    }

    Ok(TopicModel {
        window_index,
        k,
        doc_ids,
        doc_topic,
        topic_word,
        vocab,
        assignment,
    })
}

/// Index of the maximum value; the lowest index wins ties.
fn argmax_lowest(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in row.iter().enumerate().skip(1) {
        if x > row[best] {
            best = i;
        }
    }
    best
}

/// Post ids assigned to topic `t`. The sets over all topics partition the
/// window's assigned posts.
pub fn topic_members(model: &TopicModel, t: usize) -> Result<BTreeSet<String>, TopicsError> {
    if t >= model.k {
        return Err(TopicsError::TopicOutOfRange {
            topic: t,
            k: model.k,
        });
    }
    Ok(model
        .assignment
        .iter()
        .filter(|(_, &topic)| topic == t)
        .map(|(id, _)| id.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, tokens: &[&str]) -> TokenizedPost {
        TokenizedPost {
            post_id: format!("http://p.com/{id}"),
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
            token_count: tokens.len(),
        }
    }

    /// Two planted topics over disjoint vocabularies, sampled with a seeded
    /// generator. Returns documents and their planted labels.
    pub(crate) fn planted_corpus(
        n_docs: usize,
        words_per_topic: usize,
        doc_len: usize,
        seed: u64,
    ) -> (Vec<TokenizedPost>, Vec<usize>) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let vocab_a: Vec<String> = (0..words_per_topic).map(|i| format!("storm{i}")).collect();
        let vocab_b: Vec<String> = (0..words_per_topic).map(|i| format!("ledger{i}")).collect();
        let mut docs = Vec::with_capacity(n_docs);
        let mut labels = Vec::with_capacity(n_docs);
        for d in 0..n_docs {
            let label = d % 2;
            let vocab = if label == 0 { &vocab_a } else { &vocab_b };
            let tokens: Vec<String> = (0..doc_len)
                .map(|_| vocab[rng.random_range(0..vocab.len())].clone())
                .collect();
            docs.push(TokenizedPost {
                post_id: format!("http://p.com/doc{d}"),
                token_count: tokens.len(),
                tokens,
            });
            labels.push(label);
        }
        (docs, labels)
    }

    /// Best-permutation agreement between crisp assignments and planted
    /// labels (labels are arbitrary under LDA).
    pub(crate) fn purity(model: &TopicModel, docs: &[TokenizedPost], labels: &[usize]) -> f64 {
        let direct = docs
            .iter()
            .zip(labels)
            .filter(|(d, &l)| model.assignment[&d.post_id] == l)
            .count();
        let flipped = docs
            .iter()
            .zip(labels)
            .filter(|(d, &l)| model.assignment[&d.post_id] == 1 - l)
            .count();
        direct.max(flipped) as f64 / docs.len() as f64
    }

    #[test]
    fn single_doc_single_topic() {
        let d = doc("only", &["alpha", "beta", "alpha"]);
        let model = fit_lda(0, &[&d], &LdaParams::new(1, 42)).unwrap();
        assert_eq!(model.doc_topic.len(), 1);
        assert!((model.doc_topic[0][0] - 1.0).abs() < 1e-12);
        assert_eq!(model.assignment[&d.post_id], 0);
    }

    #[test]
    fn empty_window_is_an_error() {
        let d = doc("empty", &[]);
        assert!(matches!(
            fit_lda(0, &[&d], &LdaParams::new(2, 42)),
            Err(TopicsError::EmptyWindow)
        ));
    }

    #[test]
    fn zero_token_docs_are_excluded_but_rest_fit() {
        let a = doc("a", &["x", "y"]);
        let b = doc("empty", &[]);
        let model = fit_lda(0, &[&a, &b], &LdaParams::new(1, 42)).unwrap();
        assert_eq!(model.doc_ids.len(), 1);
        assert!(!model.assignment.contains_key(&b.post_id));
    }

    #[test]
    fn seeded_runs_are_identical() {
        let (docs, _) = planted_corpus(40, 20, 15, 7);
        let refs: Vec<&TokenizedPost> = docs.iter().collect();
        let params = LdaParams {
            iterations: 60,
            burn_in: 20,
            ..LdaParams::new(2, 42)
        };
        let a = fit_lda(3, &refs, &params).unwrap();
        let b = fit_lda(3, &refs, &params).unwrap();
        assert_eq!(a.assignment, b.assignment);
        assert_eq!(a.doc_topic, b.doc_topic);
        assert_eq!(a.topic_word, b.topic_word);
    }

    #[test]
    fn rows_are_normalized() {
        let (docs, _) = planted_corpus(30, 10, 12, 11);
        let refs: Vec<&TokenizedPost> = docs.iter().collect();
        let params = LdaParams {
            iterations: 50,
            burn_in: 10,
            ..LdaParams::new(3, 1)
        };
        let model = fit_lda(0, &refs, &params).unwrap();
        for row in model.doc_topic.iter().chain(model.topic_word.iter()) {
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "row sums to {sum}");
        }
    }

    #[test]
    fn recovers_planted_topics() {
        let (docs, labels) = planted_corpus(200, 50, 20, 42);
        let refs: Vec<&TokenizedPost> = docs.iter().collect();
        let model = fit_lda(0, &refs, &LdaParams::new(2, 42)).unwrap();
        let p = purity(&model, &docs, &labels);
        assert!(p >= 0.95, "purity {p}");
    }

    #[test]
    fn members_partition_assigned_posts() {
        let (docs, _) = planted_corpus(20, 10, 10, 3);
        let refs: Vec<&TokenizedPost> = docs.iter().collect();
        let params = LdaParams {
            iterations: 30,
            burn_in: 5,
            ..LdaParams::new(2, 9)
        };
        let model = fit_lda(0, &refs, &params).unwrap();
        let m0 = topic_members(&model, 0).unwrap();
        let m1 = topic_members(&model, 1).unwrap();
        assert!(m0.is_disjoint(&m1));
        assert_eq!(m0.len() + m1.len(), model.assignment.len());
        assert!(topic_members(&model, 2).is_err());
    }

    #[test]
    fn explicit_assignment_example() {
        // k=2, assignments {a:0, b:1, c:0} -> members(0) = {a, c}
        let model = TopicModel {
            window_index: 0,
            k: 2,
            doc_ids: vec!["a".into(), "b".into(), "c".into()],
            doc_topic: vec![vec![0.9, 0.1], vec![0.2, 0.8], vec![0.7, 0.3]],
            topic_word: vec![],
            vocab: vec![],
            assignment: [("a", 0), ("b", 1), ("c", 0)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        };
        let m0 = topic_members(&model, 0).unwrap();
        assert_eq!(
            m0.into_iter().collect::<Vec<_>>(),
            vec!["a".to_string(), "c".to_string()]
        );
    }

    #[test]
    fn degenerate_k_proceeds() {
        let a = doc("a", &["x", "y", "z"]);
        let model = fit_lda(0, &[&a], &LdaParams::new(5, 42)).unwrap();
        assert_eq!(model.k, 5);
        assert_eq!(model.assignment.len(), 1);
    }

    #[test]
    fn params_are_validated() {
        let mut p = LdaParams::new(2, 1);
        p.burn_in = p.iterations;
        assert!(matches!(p.validate(), Err(TopicsError::InvalidParams(_))));
        let mut q = LdaParams::new(2, 1);
        q.k = 0;
        assert!(q.validate().is_err());
    }

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax_lowest(&[0.5, 0.5]), 0);
        assert_eq!(argmax_lowest(&[0.1, 0.6, 0.6]), 1);
    }
}
