//! Graphviz export of the co-tweet graph and a reader for the same layout.
//!
//! Nodes carry `community` and `tweet_count` attributes and edges a `weight`
//! equal to their multiplicity. The reader accepts what the writer produces
//! (one statement per line), not general DOT.

use std::io::{self, Write};
use std::sync::LazyLock;

use polluter_core::graph::CoTweetMultigraph;
use polluter_core::louvain::Partition;
use regex::Regex;

fn quote(id: &str) -> String {
    let mut out = String::with_capacity(id.len() + 2);
    out.push('"');
    for c in id.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn unquote(quoted: &str) -> String {
    let mut out = String::with_capacity(quoted.len());
    let mut chars = quoted.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            if let Some(next) = chars.next() {
                out.push(next);
            }
        } else {
            out.push(c);
        }
    }
    out
}

pub fn write_dot<W: Write>(mut w: W, graph: &CoTweetMultigraph, partition: &Partition) -> io::Result<()> {
    writeln!(w, "graph cotweet {{")?;
    for (i, node) in graph.nodes().iter().enumerate() {
        writeln!(
            w,
            "  {} [community={}, tweet_count={}];",
            quote(&node.user_id),
            partition.community(i),
            node.tweet_count
        )?;
    }
    let nodes = graph.nodes();
    for e in graph.edges() {
        writeln!(
            w,
            "  {} -- {} [weight={}];",
            quote(&nodes[e.a as usize].user_id),
            quote(&nodes[e.b as usize].user_id),
            e.multiplicity
        )?;
    }
    writeln!(w, "}}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct DotGraph {
    pub graph: CoTweetMultigraph,
    /// Community attribute of each node, in graph node order.
    pub communities: Vec<u32>,
}

const ID: &str = r#""((?:[^"\\]|\\.)*)""#;

static NODE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(r"^{ID}\s*\[\s*community\s*=\s*(\d+)\s*,\s*tweet_count\s*=\s*(\d+)\s*\]\s*;?$"))
        .expect("valid regex")
});
static EDGE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(r"^{ID}\s*--\s*{ID}\s*\[\s*weight\s*=\s*(\d+)\s*\]\s*;?$")).expect("valid regex")
});

/// Parses a graph written by [`write_dot`]. Errors carry the 1-based line.
pub fn parse_dot(text: &str) -> Result<DotGraph, (usize, String)> {
    let mut nodes: Vec<(String, u64)> = Vec::new();
    let mut communities = Vec::new();
    let mut edges: Vec<(String, String, u32)> = Vec::new();
    let mut opened = false;
    let mut closed = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if closed {
            return Err((line_no, "content after closing brace".into()));
        }
        if !opened {
            if !(line.starts_with("graph") && line.ends_with('{')) {
                return Err((line_no, "expected `graph <name> {`".into()));
            }
            opened = true;
        } else if line == "}" {
            closed = true;
        } else if let Some(c) = EDGE.captures(line) {
            let weight = c[3].parse().map_err(|_| (line_no, "edge weight out of range".to_owned()))?;
            edges.push((unquote(&c[1]), unquote(&c[2]), weight));
        } else if let Some(c) = NODE.captures(line) {
            let community = c[2].parse().map_err(|_| (line_no, "community out of range".to_owned()))?;
            let tweets = c[3].parse().map_err(|_| (line_no, "tweet_count out of range".to_owned()))?;
            nodes.push((unquote(&c[1]), tweets));
            communities.push(community);
        } else {
            return Err((line_no, format!("unrecognized statement {line:?}")));
        }
    }
    if !closed {
        return Err((text.lines().count(), "missing closing brace".into()));
    }
    let by_id: std::collections::HashMap<String, u32> =
        nodes.iter().map(|(id, _)| id.clone()).zip(communities).collect();
    let graph = CoTweetMultigraph::from_parts(nodes, edges).map_err(|e| (0, e))?;
    let communities = graph.nodes().iter().map(|n| by_id[&n.user_id]).collect();
    Ok(DotGraph { graph, communities })
}
