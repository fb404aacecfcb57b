//! The cross-window key-post citation graph.
//!
//! Nodes are elected key posts (deduplicated by URL, keeping the maximum
//! score and every window/topic membership); a directed edge runs from a
//! citing in-corpus key post to each key post it references. Out-of-corpus
//! key posts have no known content, so they never cite — they are sinks.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affinity::KeyPost;
use crate::corpus::Corpus;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A deduplicated key-post node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyPostNode {
    pub url: String,
    /// Maximum score over all elections of this URL.
    pub repr: f64,
    /// Every `(window, topic)` election of this URL.
    pub memberships: BTreeSet<(usize, usize)>,
    pub in_corpus: bool,
}

/// Directed citation graph over elected key posts.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyPostGraph {
    pub nodes: BTreeMap<String, KeyPostNode>,
    /// `(citing, cited)` pairs, deduplicated, no self-loops.
    pub edges: BTreeSet<(String, String)>,
}

/// File format for [`export_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    EdgeJson,
}

/// Build the graph from the union of elected key posts across all windows.
pub fn build_graph(key_posts: &[KeyPost], corpus: &Corpus) -> KeyPostGraph {
    let mut nodes: BTreeMap<String, KeyPostNode> = BTreeMap::new();
    for kp in key_posts {
        let node = nodes.entry(kp.url.clone()).or_insert_with(|| KeyPostNode {
            url: kp.url.clone(),
            repr: kp.repr,
            memberships: BTreeSet::new(),
            in_corpus: kp.in_corpus,
        });
        node.repr = node.repr.max(kp.repr);
        node.memberships.insert((kp.window_index, kp.topic));
    }

    let by_id = corpus.by_id();
    let mut edges = BTreeSet::new();
    for url in nodes.keys() {
        let Some(post) = by_id.get(url.as_str()) else {
            continue; // not in corpus: no outgoing citations
        };
        for target in &post.refs {
            if target != url && nodes.contains_key(target) {
                edges.insert((url.clone(), target.clone()));
            }
        }
    }
    KeyPostGraph { nodes, edges }
}

/// Weakly connected components (direction ignored), sorted by size
/// descending, then by smallest member URL.
pub fn connected_components(graph: &KeyPostGraph) -> Vec<BTreeSet<String>> {
    let mut adjacency: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for url in graph.nodes.keys() {
        adjacency.entry(url.as_str()).or_default();
    }
    for (from, to) in &graph.edges {
        adjacency
            .entry(from.as_str())
            .or_default()
            .push(to.as_str());
        adjacency
            .entry(to.as_str())
            .or_default()
            .push(from.as_str());
    }

    let mut visited: BTreeSet<&str> = BTreeSet::new();
    let mut components = Vec::new();
    for &start in adjacency.keys() {
        if visited.contains(start) {
            continue;
        }
        let mut component = BTreeSet::new();
        let mut queue = VecDeque::from([start]);
        visited.insert(start);
        while let Some(url) = queue.pop_front() {
            component.insert(url.to_string());
            for &next in &adjacency[url] {
                if visited.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        components.push(component);
    }
    components.sort_by(|a, b| {
        b.len()
            .cmp(&a.len())
            .then_with(|| a.iter().next().cmp(&b.iter().next()))
    });
    components
}

/// Graphviz rendering with node width proportional to score (the maximum
/// maps to 2.0) and the URL as label.
pub fn to_dot(graph: &KeyPostGraph) -> String {
    let max_repr = graph
        .nodes
        .values()
        .map(|n| n.repr)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out = String::from("digraph key_posts {\n");
    for node in graph.nodes.values() {
        let width = if max_repr > 0.0 {
            2.0 * node.repr / max_repr
        } else {
            2.0
        };
        out.push_str(&format!(
            "    \"{}\" [label=\"{}\", width={:.6}];\n",
            node.url, node.url, width
        ));
    }
    for (from, to) in &graph.edges {
        out.push_str(&format!("    \"{from}\" -> \"{to}\";\n"));
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EdgeJson {
    pub edges: Vec<EdgeJsonEdge>,
    pub nodes: Vec<EdgeJsonNode>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EdgeJsonEdge {
    pub from: String,
    pub to: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct EdgeJsonNode {
    pub in_corpus: bool,
    pub repr: f64,
    pub topics: Vec<usize>,
    pub url: String,
    pub windows: Vec<usize>,
}

/// Byte-stable JSON rendering: keys sorted, nodes by URL, edges by pair.
pub fn to_edge_json(graph: &KeyPostGraph) -> String {
    let doc = EdgeJson {
        edges: graph
            .edges
            .iter()
            .map(|(from, to)| EdgeJsonEdge {
                from: from.clone(),
                to: to.clone(),
            })
            .collect(),
        nodes: graph
            .nodes
            .values()
            .map(|n| EdgeJsonNode {
                in_corpus: n.in_corpus,
                repr: crate::pipeline::round6(n.repr),
                topics: n
                    .memberships
                    .iter()
                    .map(|&(_, t)| t)
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect(),
                url: n.url.clone(),
                windows: n
                    .memberships
                    .iter()
                    .map(|&(w, _)| w)
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("graph serializes");
    text.push('\n');
    text
}

/// Write the graph to a file in the requested format.
pub fn export_graph(
    graph: &KeyPostGraph,
    format: GraphFormat,
    path: &Path,
) -> Result<(), GraphError> {
    let text = match format {
        GraphFormat::Dot => to_dot(graph),
        GraphFormat::EdgeJson => to_edge_json(graph),
    };
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Post;
    use chrono::Utc;

    fn key_post(url: &str, window: usize, topic: usize, repr: f64, in_corpus: bool) -> KeyPost {
        KeyPost {
            url: url.to_string(),
            window_index: window,
            topic,
            repr,
            in_corpus,
            author: None,
        }
    }

    fn corpus_with(posts: &[(&str, &[&str])]) -> Corpus {
        Corpus::from_posts(
            posts
                .iter()
                .map(|(id, refs)| Post {
                    id: id.to_string(),
                    content: String::new(),
                    author: "a".to_string(),
                    published_at: Utc::now(),
                    refs: refs.iter().map(|s| s.to_string()).collect(),
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn citing_corpus_post_produces_edge() {
        let corpus = corpus_with(&[("http://b", &["http://a"]), ("http://a", &[])]);
        let kps = vec![
            key_post("http://a", 0, 0, 2.0, true),
            key_post("http://b", 0, 1, 1.0, true),
        ];
        let graph = build_graph(&kps, &corpus);
        assert_eq!(graph.nodes.len(), 2);
        assert_eq!(
            graph.edges.iter().collect::<Vec<_>>(),
            [&("http://b".to_string(), "http://a".to_string())]
        );
    }

    #[test]
    fn out_of_corpus_key_posts_are_sinks() {
        let corpus = corpus_with(&[("http://b", &["http://c"])]);
        let kps = vec![
            key_post("http://b", 0, 0, 1.0, true),
            key_post("http://c", 0, 1, 3.0, false),
        ];
        let graph = build_graph(&kps, &corpus);
        assert!(graph
            .edges
            .contains(&("http://b".into(), "http://c".into())));
        // c is not a corpus post: no outgoing edges from it
        assert!(!graph.edges.iter().any(|(from, _)| from == "http://c"));
    }

    #[test]
    fn duplicate_urls_keep_max_repr_and_all_memberships() {
        let corpus = corpus_with(&[("http://x", &[])]);
        let kps = vec![
            key_post("http://a", 0, 0, 2.0, false),
            key_post("http://a", 1, 1, 5.0, false),
            key_post("http://a", 2, 0, 1.0, false),
        ];
        let graph = build_graph(&kps, &corpus);
        let node = &graph.nodes["http://a"];
        assert_eq!(node.repr, 5.0);
        assert_eq!(node.memberships.len(), 3);
    }

    #[test]
    fn two_chains_make_two_components() {
        let corpus = corpus_with(&[
            ("http://b", &["http://a"]),
            ("http://d", &["http://c"]),
            ("http://a", &[]),
            ("http://c", &[]),
        ]);
        let kps = vec![
            key_post("http://a", 0, 0, 1.0, true),
            key_post("http://b", 0, 1, 2.0, true),
            key_post("http://c", 1, 0, 3.0, true),
            key_post("http://d", 1, 1, 4.0, true),
        ];
        let graph = build_graph(&kps, &corpus);
        let components = connected_components(&graph);
        assert_eq!(components.len(), 2);
        let mut flat: Vec<Vec<&str>> = components
            .iter()
            .map(|c| c.iter().map(String::as_str).collect())
            .collect();
        flat.sort();
        assert_eq!(
            flat,
            [vec!["http://a", "http://b"], vec!["http://c", "http://d"]]
        );
    }

    #[test]
    fn empty_graph_has_no_components() {
        assert!(connected_components(&KeyPostGraph::default()).is_empty());
    }

    #[test]
    fn isolated_nodes_are_singletons() {
        let corpus = corpus_with(&[("http://x", &[])]);
        let kps = vec![
            key_post("http://a", 0, 0, 1.0, false),
            key_post("http://b", 0, 1, 1.0, false),
            key_post("http://c", 1, 0, 1.0, false),
        ];
        let graph = build_graph(&kps, &corpus);
        let components = connected_components(&graph);
        assert_eq!(components.len(), 3);
        assert!(components.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn dot_output_is_stable_and_well_formed() {
        let corpus = corpus_with(&[("http://b", &["http://a"]), ("http://a", &[])]);
        let kps = vec![
            key_post("http://a", 0, 0, 2.0, true),
            key_post("http://b", 0, 1, 1.0, true),
        ];
        let graph = build_graph(&kps, &corpus);
        let dot = to_dot(&graph);
        assert_eq!(dot, to_dot(&graph));
        assert!(dot.starts_with("digraph key_posts {"));
        assert!(dot.contains("\"http://b\" -> \"http://a\";"));
        // max repr maps to width 2.0
        assert!(dot.contains("\"http://a\" [label=\"http://a\", width=2.000000];"));
        assert!(dot.contains("\"http://b\" [label=\"http://b\", width=1.000000];"));
    }

    #[test]
    fn single_node_dot_has_one_node_statement() {
        let corpus = corpus_with(&[("http://x", &[])]);
        let kps = vec![key_post("http://a", 0, 0, 1.5, false)];
        let dot = to_dot(&build_graph(&kps, &corpus));
        assert_eq!(dot.matches(" -> ").count(), 0);
        assert_eq!(dot.matches("[label=").count(), 1);
    }

    #[test]
    fn edge_json_round_trips() {
        let corpus = corpus_with(&[("http://b", &["http://a"]), ("http://a", &[])]);
        let kps = vec![
            key_post("http://a", 0, 0, 2.0, true),
            key_post("http://a", 1, 1, 1.0, true),
            key_post("http://b", 0, 1, 1.0, true),
        ];
        let graph = build_graph(&kps, &corpus);
        let text = to_edge_json(&graph);
        let parsed: EdgeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.nodes.len(), graph.nodes.len());
        let urls: BTreeSet<&str> = parsed.nodes.iter().map(|n| n.url.as_str()).collect();
        assert_eq!(urls, graph.nodes.keys().map(String::as_str).collect());
        let edges: BTreeSet<(String, String)> = parsed
            .edges
            .iter()
            .map(|e| (e.from.clone(), e.to.clone()))
            .collect();
        assert_eq!(edges, graph.edges);
        let a = parsed.nodes.iter().find(|n| n.url == "http://a").unwrap();
        assert_eq!(a.windows, vec![0, 1]);
        assert_eq!(a.topics, vec![0, 1]);
    }
}
