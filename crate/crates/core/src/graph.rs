//! Simple undirected graphs and the edge-list text format.
//!
//! Vertices are dense ids `0..n`. Loading from text maps arbitrary string
//! labels to ids in first-seen order; self-loops are dropped and repeated
//! edges collapse into one.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::{Error, Result};

pub type VertexId = u32;

/// A finite simple graph stored as sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<VertexId>>,
    labels: Option<Vec<String>>,
}

/// Per-vertex degrees plus the maximum degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSummary {
    pub degrees: Vec<usize>,
    pub deg_max: usize,
}

impl Graph {
    pub fn empty(vertex_count: usize) -> Self {
        Graph {
            adjacency: vec![Vec::new(); vertex_count],
            labels: None,
        }
    }

    /// Builds a graph from an edge list over ids `0..vertex_count`.
    ///
    /// Self-loops and duplicate edges are discarded; an endpoint outside the
    /// id range is an error.
    pub fn from_edges(vertex_count: usize, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v) in edges {
            if u as usize >= vertex_count || v as usize >= vertex_count {
                return Err(Error::Argument(format!(
                    "edge ({u}, {v}) out of range for {vertex_count} vertices"
                )));
            }
            if u == v {
                continue;
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Graph {
            adjacency,
            labels: None,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adjacency[v as usize]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adjacency
            .get(u as usize)
            .is_some_and(|n| n.binary_search(&v).is_ok())
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            let u = u as VertexId;
            list.iter().filter(move |&&v| v > u).map(move |&v| (u, v))
        })
    }

    /// External labels indexed by internal id, when the graph was loaded from text.
    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// External label → internal id.
    pub fn label_map(&self) -> Option<HashMap<&str, VertexId>> {
        self.labels.as_ref().map(|labels| {
            labels
                .iter()
                .enumerate()
                .map(|(i, l)| (l.as_str(), i as VertexId))
                .collect()
        })
    }

    pub fn degree_summary(&self) -> DegreeSummary {
        let degrees: Vec<usize> = self.adjacency.iter().map(Vec::len).collect();
        let deg_max = degrees.iter().copied().max().unwrap_or(0);
        DegreeSummary { degrees, deg_max }
    }

    /// Component id for every vertex, numbered in order of first vertex.
    pub fn components(&self) -> (usize, Vec<usize>) {
        let n = self.vertex_count();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = count;
            stack.push(start as VertexId);
            while let Some(v) = stack.pop() {
                for &w in self.neighbors(v) {
                    if comp[w as usize] == usize::MAX {
                        comp[w as usize] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (count, comp)
    }

    /// Serializes to edge-list text: isolated vertices first as `v <id>`
    /// lines, then one `u v` line per edge with `u < v`, sorted.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (v, list) in self.adjacency.iter().enumerate() {
            if list.is_empty() {
                let _ = writeln!(out, "v {v}");
            }
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// Loads a graph from edge-list text.
///
/// Blank lines and lines starting with `#` or `%` are skipped. Before the
/// first edge, a line `v <label>` declares a vertex, which is how isolated
/// vertices are expressed.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut ids: HashMap<String, VertexId> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    let mut intern = |label: &str, labels: &mut Vec<String>| -> VertexId {
        if let Some(&id) = ids.get(label) {
            return id;
        }
        let id = labels.len() as VertexId;
        ids.insert(label.to_owned(), id);
        labels.push(label.to_owned());
        id
    };

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected two vertex labels, found {}", tokens.len()),
            });
        }
        if edges.is_empty() && tokens[0] == "v" {
            intern(tokens[1], &mut labels);
            continue;
        }
        let u = intern(tokens[0], &mut labels);
        let v = intern(tokens[1], &mut labels);
        edges.push((u, v));
    }

    let mut graph = Graph::from_edges(labels.len(), &edges)?;
    graph.labels = Some(labels);
    Ok(graph)
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    load_edge_list(text.as_bytes())
}
