//! End-to-end batch pipeline and its file outputs.
//!
//! ingest -> windows -> per-window topics -> affinity/election ->
//! citation graph -> author metrics. All outputs are byte-stable across
//! reruns with equal inputs and seed: keys are emitted in a fixed order and
//! reals are rounded to six decimals. Stage timings go to the log, never
//! into the output files.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affinity::{compute_affinities, elect_key_posts, AffinityRecord, ElectionMode, KeyPost};
use crate::authors::{
    aggregated_influence, author_boost_scores, elect_boost_authors, AuthorInfluence, BoostResult,
};
use crate::corpus::{load_corpus, CorpusError, RedirectMap};
use crate::graph::{build_graph, connected_components, to_dot, to_edge_json, KeyPostGraph};
use crate::textprep::{tokenize_post, StopwordList, TokenizedPost};
use crate::topics::{fit_lda, LdaParams, TopicsError};
use crate::windowing::{make_windows, posts_in_window, WindowError, WindowSpec};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("ingest: {0}")]
    Ingest(#[from] CorpusError),
    #[error("stopwords: {0}")]
    Stopwords(std::io::Error),
    #[error("windowing: {0}")]
    Windowing(#[from] WindowError),
    #[error("topics (window {window}): {source}")]
    Topics { window: usize, source: TopicsError },
    #[error("output ({path}): {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
}

/// Everything one run needs, aggregated across the module parameters.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub input_path: PathBuf,
    pub redirect_map_path: Option<PathBuf>,
    pub stopwords_path: Option<PathBuf>,
    pub gamma_days: u32,
    pub delta_days: u32,
    pub k: usize,
    pub seed: u64,
    pub lda_iters: usize,
    pub lda_burnin: usize,
    pub top_x: usize,
    pub elect_mode: ElectMode,
    pub percent_theta: f64,
    pub boost_theta: f64,
    pub out_dir: PathBuf,
}

/// Election mode selector, resolved against `top_x`/`percent_theta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElectMode {
    Top,
    Percent,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            input_path: PathBuf::new(),
            redirect_map_path: None,
            stopwords_path: None,
            gamma_days: 7,
            delta_days: 1,
            k: 10,
            seed: 42,
            lda_iters: 500,
            lda_burnin: 100,
            top_x: 1,
            elect_mode: ElectMode::Top,
            percent_theta: 0.8,
            boost_theta: 0.8,
            out_dir: PathBuf::new(),
        }
    }
}

impl PipelineConfig {
    fn election_mode(&self) -> ElectionMode {
        match self.elect_mode {
            ElectMode::Top => ElectionMode::TopX(self.top_x),
            ElectMode::Percent => ElectionMode::PercentThreshold(self.percent_theta),
        }
    }

    fn validate(&self) -> Result<(), PipelineError> {
        if self.top_x < 1 {
            return Err(PipelineError::Config("top_x must be >= 1".into()));
        }
        for (name, theta) in [
            ("percent_theta", self.percent_theta),
            ("boost_theta", self.boost_theta),
        ] {
            if !(theta > 0.0 && theta <= 1.0) {
                return Err(PipelineError::Config(format!(
                    "{name} must be in (0, 1], got {theta}"
                )));
            }
        }
        Ok(())
    }
}

/// Round a real to six decimals, the fixed precision of every emitted value.
pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KeyPostOut {
    /// Absent when the key post is not a corpus post.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author: Option<String>,
    pub in_corpus: bool,
    pub repr: f64,
    pub topic: usize,
    pub url: String,
    pub window_index: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindowSummary {
    pub index: usize,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    /// Posts published in the window.
    pub post_count: usize,
    /// Posts with at least one token (the LDA documents).
    pub doc_count: usize,
    pub topic_count: usize,
    pub key_posts: Vec<KeyPostOut>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphStats {
    pub components: usize,
    pub edges: usize,
    pub nodes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorpusStats {
    pub first_at: DateTime<Utc>,
    pub last_at: DateTime<Utc>,
    pub posts: usize,
    pub span_days: f64,
}

/// The run's summary; serialized to `report.json` (timings excluded, they
/// would break rerun byte-identity).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub boost_authors: Vec<BoostResult>,
    pub corpus: CorpusStats,
    pub graph: GraphStats,
    pub key_authors: Vec<AuthorInfluence>,
    pub windows: Vec<WindowSummary>,
    #[serde(skip)]
    pub timings: Vec<(String, std::time::Duration)>,
}

/// Execute the full pipeline and write all output files to `out_dir`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<RunReport, PipelineError> {
    cfg.validate()?;
    let mut timings: Vec<(String, std::time::Duration)> = Vec::new();
    let mut clock = Instant::now();
    fn lap(name: &str, timings: &mut Vec<(String, std::time::Duration)>, clock: &mut Instant) {
        let elapsed = clock.elapsed();
        log::info!("stage {name}: {elapsed:?}");
        timings.push((name.to_string(), elapsed));
        *clock = Instant::now();
    }

    // ingest
    let redirects = match &cfg.redirect_map_path {
        Some(path) => RedirectMap::load(path)?,
        None => RedirectMap::empty(),
    };
    let stops = match &cfg.stopwords_path {
        Some(path) => StopwordList::load(path).map_err(PipelineError::Stopwords)?,
        None => StopwordList::default_english(),
    };
    let corpus = load_corpus(&cfg.input_path, &redirects)?;
    lap("ingest", &mut timings, &mut clock);

    // windowing
    let spec = WindowSpec::new(cfg.gamma_days, cfg.delta_days)?;
    let windows = make_windows(&corpus, &spec)?;
    lap("windowing", &mut timings, &mut clock);

    // text preparation (tokens are window-independent; tokenize once)
    let tokenized: Vec<TokenizedPost> = corpus
        .posts
        .iter()
        .map(|p| tokenize_post(p, &stops))
        .collect();
    lap("textprep", &mut timings, &mut clock);

    // per-window topics, affinity, election
    let corpus_ids = corpus.ids();
    let by_id = corpus.by_id();
    let tokens_by_id: std::collections::HashMap<&str, &TokenizedPost> =
        tokenized.iter().map(|t| (t.post_id.as_str(), t)).collect();
    let mode = cfg.election_mode();
    let mut all_key_posts: Vec<KeyPost> = Vec::new();
    let mut all_records: Vec<AffinityRecord> = Vec::new();
    let mut window_summaries: Vec<WindowSummary> = Vec::new();
    for window in &windows {
        let posts = posts_in_window(&corpus, window);
        let docs: Vec<&TokenizedPost> = posts
            .iter()
            .map(|p| tokens_by_id[p.id.as_str()])
            .filter(|t| t.token_count > 0)
            .collect();

        let mut summary = WindowSummary {
            index: window.index,
            start: window.start,
            end: window.end,
            post_count: posts.len(),
            doc_count: docs.len(),
            topic_count: 0,
            key_posts: Vec::new(),
        };
        if docs.is_empty() {
            log::warn!(
                "window {}: no documents with tokens, skipping",
                window.index
            );
            window_summaries.push(summary);
            continue;
        }

        let params = LdaParams {
            k: cfg.k,
            alpha: 50.0 / cfg.k.max(1) as f64,
            beta: 0.01,
            iterations: cfg.lda_iters,
            burn_in: cfg.lda_burnin,
            seed: cfg.seed,
        };
        let model =
            fit_lda(window.index, &docs, &params).map_err(|source| PipelineError::Topics {
                window: window.index,
                source,
            })?;
        summary.topic_count = model.k;

        let records = compute_affinities(&model, &posts, &corpus_ids);
        for topic in 0..model.k {
            for mut kp in elect_key_posts(&records, topic, mode) {
                kp.author = by_id.get(kp.url.as_str()).map(|p| p.author.clone());
                summary.key_posts.push(KeyPostOut {
                    author: kp.author.clone(),
                    in_corpus: kp.in_corpus,
                    repr: round6(kp.repr),
                    topic: kp.topic,
                    url: kp.url.clone(),
                    window_index: kp.window_index,
                });
                all_key_posts.push(kp);
            }
        }
        all_records.extend(records);
        window_summaries.push(summary);
    }
    lap("topics+affinity", &mut timings, &mut clock);

    // citation graph
    let graph = build_graph(&all_key_posts, &corpus);
    let components = connected_components(&graph);
    lap("graph", &mut timings, &mut clock);

    // author metrics
    let key_authors = aggregated_influence(&all_key_posts, &corpus);
    let boost_all = author_boost_scores(&corpus, &windows);
    let boost_elected = elect_boost_authors(&boost_all, cfg.boost_theta);
    lap("authors", &mut timings, &mut clock);

    let report = RunReport {
        boost_authors: boost_elected
            .iter()
            .map(|b| BoostResult {
                author: b.author.clone(),
                boost: round6(b.boost),
                event_count: b.event_count,
                average: round6(b.average),
            })
            .collect(),
        corpus: CorpusStats {
            first_at: corpus.first_at,
            last_at: corpus.last_at,
            posts: corpus.posts.len(),
            span_days: round6(corpus.span_days),
        },
        graph: GraphStats {
            components: components.len(),
            edges: graph.edges.len(),
            nodes: graph.nodes.len(),
        },
        key_authors: key_authors
            .iter()
            .map(|a| AuthorInfluence {
                author: a.author.clone(),
                aggregated: round6(a.aggregated),
                key_post_urls: a.key_post_urls.clone(),
            })
            .collect(),
        windows: window_summaries,
        timings: Vec::new(),
    };

    write_outputs(cfg, &report, &graph, &all_records)?;
    let mut report = report;
    lap("output", &mut timings, &mut clock);
    report.timings = timings;
    Ok(report)
}

fn write_json<T: Serialize>(
    dir: &std::path::Path,
    name: &str,
    value: &T,
) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    write_text(dir, name, &text)
}

fn write_text(dir: &std::path::Path, name: &str, text: &str) -> Result<(), PipelineError> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|source| PipelineError::Output {
        path: path.display().to_string(),
        source,
    })
}

fn write_outputs(
    cfg: &PipelineConfig,
    report: &RunReport,
    graph: &KeyPostGraph,
    records: &[AffinityRecord],
) -> Result<(), PipelineError> {
    fs::create_dir_all(&cfg.out_dir).map_err(|source| PipelineError::Output {
        path: cfg.out_dir.display().to_string(),
        source,
    })?;

    let mut key_posts: Vec<&KeyPostOut> = report
        .windows
        .iter()
        .flat_map(|w| w.key_posts.iter())
        .collect();
    key_posts.sort_by(|a, b| {
        (a.window_index, a.topic)
            .cmp(&(b.window_index, b.topic))
            .then_with(|| b.repr.partial_cmp(&a.repr).expect("no NaN"))
            .then_with(|| a.url.cmp(&b.url))
    });
    write_json(&cfg.out_dir, "key_posts.json", &key_posts)?;
    write_json(&cfg.out_dir, "key_authors.json", &report.key_authors)?;
    write_json(&cfg.out_dir, "boost_authors.json", &report.boost_authors)?;
    write_text(&cfg.out_dir, "graph.dot", &to_dot(graph))?;
    write_text(&cfg.out_dir, "graph.json", &to_edge_json(graph))?;
    write_text(&cfg.out_dir, "timeline.csv", &emit_timeline(records))?;
    write_json(&cfg.out_dir, "report.json", report)?;
    Ok(())
}

/// Plot-ready per-window/topic candidate shares.
///
/// One row per scoring candidate; `share` is the candidate's percentage of
/// its `(window, topic)` group's total score, so each group's shares sum to
/// 100. Groups with an all-zero score emit nothing.
pub fn emit_timeline(records: &[AffinityRecord]) -> String {
    let groups: BTreeSet<(usize, usize)> =
        records.iter().map(|r| (r.window_index, r.topic)).collect();
    let mut out = String::from("window_index,topic,url,repr,share\n");
    for (window, topic) in groups {
        let group: Vec<&AffinityRecord> = records
            .iter()
            .filter(|r| r.window_index == window && r.topic == topic)
            .collect();
        let total: f64 = group.iter().map(|r| r.repr).sum();
        if total <= 0.0 {
            continue;
        }
        let mut scored: Vec<&AffinityRecord> = group.into_iter().filter(|r| r.repr > 0.0).collect();
        scored.sort_by(|a, b| {
            b.repr
                .partial_cmp(&a.repr)
                .expect("no NaN")
                .then_with(|| a.url.cmp(&b.url))
        });
        for r in scored {
            out.push_str(&format!(
                "{},{},{},{:.6},{:.6}\n",
                window,
                topic,
                r.url,
                r.repr,
                100.0 * r.repr / total
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(url: &str, window: usize, topic: usize, repr: f64) -> AffinityRecord {
        AffinityRecord {
            url: url.to_string(),
            window_index: window,
            topic,
            tf: 1,
            idf: repr,
            repr,
            in_corpus: false,
        }
    }

    #[test]
    fn timeline_single_candidate_gets_full_share() {
        let csv = emit_timeline(&[record("http://a", 0, 0, 2.5)]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "window_index,topic,url,repr,share");
        assert_eq!(lines[1], "0,0,http://a,2.500000,100.000000");
    }

    #[test]
    fn timeline_shares_are_proportional() {
        let csv = emit_timeline(&[record("http://a", 0, 0, 3.0), record("http://b", 0, 0, 1.0)]);
        assert!(csv.contains("0,0,http://a,3.000000,75.000000"));
        assert!(csv.contains("0,0,http://b,1.000000,25.000000"));
    }

    #[test]
    fn timeline_skips_all_zero_groups() {
        let csv = emit_timeline(&[
            record("http://a", 0, 0, 0.0),
            record("http://b", 0, 0, 0.0),
            record("http://c", 1, 0, 2.0),
        ]);
        assert_eq!(csv.lines().count(), 2); // header + one row
        assert!(csv.contains("1,0,http://c"));
    }

    #[test]
    fn timeline_group_shares_sum_to_100() {
        let csv = emit_timeline(&[
            record("http://a", 0, 0, 1.0),
            record("http://b", 0, 0, 2.0),
            record("http://c", 0, 0, 4.0),
        ]);
        let total: f64 = csv
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
            .sum();
        assert!((total - 100.0).abs() < 0.01);
    }

    #[test]
    fn round6_is_stable() {
        assert_eq!(round6(4.8283137373023015), 4.828314);
        assert_eq!(round6(0.0), 0.0);
        assert_eq!(round6(round6(1.23456789)), round6(1.23456789));
    }
}
