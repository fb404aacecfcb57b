//! Topic-storm tracing over time-stamped post corpora.
//!
//! The library ingests a corpus of social-media posts (URL id, content,
//! author, timestamp, outbound references), slices it into overlapping
//! sliding time windows, fits an LDA topic model per window, scores every
//! referenced URL's affinity to each topic with a TF-IDF-style measure over
//! hyperlink references, elects the key posts of each topic, links them into
//! a cross-window citation graph, and derives two author-level influence
//! metrics (aggregated key-post influence and the reference boost score).
//!
//! The `stormtrace` binary drives the whole pipeline; see [`pipeline`].

pub mod affinity;
pub mod authors;
pub mod corpus;
pub mod fixture;
pub mod graph;
pub mod pipeline;
pub mod textprep;
pub mod topics;
pub mod windowing;

pub use affinity::{AffinityRecord, ElectionMode, KeyPost};
pub use authors::{AccumSeries, AuthorInfluence, BoostResult, ReferenceEvent};
pub use corpus::{Corpus, CorpusError, Post, RedirectMap};
pub use graph::KeyPostGraph;
pub use pipeline::{PipelineConfig, RunReport};
pub use textprep::{StopwordList, TokenizedPost};
pub use topics::{LdaParams, TopicModel};
pub use windowing::{TimeWindow, WindowSpec};
