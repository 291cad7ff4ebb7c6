//! Undirected simple graphs on labeled vertices, edge-list IO, and the
//! purely structural quantities the bound machinery relies on: Hamming
//! distance between edge sets and girth.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected simple graph on `num_vertices` labeled vertices.
///
/// Edges are stored canonically: `u < v`, sorted lexicographically, no
/// duplicates. Construction validates every invariant, so a `Graph` value
/// is always well-formed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl TryFrom<RawGraph> for Graph {
    type Error = Error;
    fn try_from(raw: RawGraph) -> Result<Self> {
        Graph::new(raw.num_vertices, raw.edges)
    }
}

impl From<Graph> for RawGraph {
    fn from(g: Graph) -> Self {
        RawGraph {
            num_vertices: g.num_vertices,
            edges: g.edges,
        }
    }
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges collapse, endpoint
    /// order is normalized. Self-loops and out-of-range endpoints are
    /// rejected.
    pub fn new(num_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if num_vertices == 0 {
            return Err(Error::InvalidArgument("graph needs at least one vertex".into()));
        }
        let mut canon = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
            }
            if u >= num_vertices || v >= num_vertices {
                return Err(Error::InvalidArgument(format!(
                    "edge ({u},{v}) has endpoint >= {num_vertices}"
                )));
            }
            canon.insert((u.min(v), u.max(v)));
        }
        Ok(Graph {
            num_vertices,
            edges: canon.into_iter().collect(),
        })
    }

    /// Empty graph on `p` vertices.
    pub fn empty(p: usize) -> Result<Self> {
        Graph::new(p, std::iter::empty())
    }

    /// Complete graph on `p` vertices.
    pub fn complete(p: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for u in 0..p {
            for v in (u + 1)..p {
                edges.push((u, v));
            }
        }
        Graph::new(p, edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonically ordered edge list (`u < v`, lexicographic).
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).is_ok()
    }

    /// Returns a copy with the given edge added.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self> {
        let mut edges = self.edges.clone();
        edges.push((u, v));
        Graph::new(self.num_vertices, edges)
    }

    /// Returns a copy with the given edge removed (error if absent).
    pub fn without_edge(&self, u: usize, v: usize) -> Result<Self> {
        let key = (u.min(v), u.max(v));
        let idx = self
            .edges
            .binary_search(&key)
            .map_err(|_| Error::InvalidArgument(format!("edge ({u},{v}) not present")))?;
        let mut edges = self.edges.clone();
        edges.remove(idx);
        Ok(Graph {
            num_vertices: self.num_vertices,
            edges,
        })
    }

    /// Adjacency lists, each sorted ascending.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        // edges are sorted, so adj[u] from the first push is sorted; the
        // second pushes arrive sorted too but interleave, so sort once.
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_vertices).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Parses the edge-list text format: line 1 is `p`, then one `u v` pair
    /// per line. `#` begins a comment line; blank lines are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut num_vertices: Option<usize> = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if num_vertices.is_none() {
                let p = line.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("expected vertex count, got {line:?}"),
                })?;
                if p == 0 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "vertex count must be positive".into(),
                    });
                }
                num_vertices = Some(p);
                continue;
            }
            let p = num_vertices.unwrap();
            let mut parts = line.split_whitespace();
            let parse_endpoint = |tok: Option<&str>| -> Result<usize> {
                tok.ok_or(Error::Parse {
                    line: line_no,
                    msg: "expected \"u v\"".into(),
                })?
                .parse::<usize>()
                .map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("malformed edge line {line:?}"),
                })
            };
            let u = parse_endpoint(parts.next())?;
            let v = parse_endpoint(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("trailing tokens on edge line {line:?}"),
                });
            }
            if u == v {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("self-loop at vertex {u}"),
                });
            }
            if u >= p || v >= p {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("vertex out of range in edge ({u},{v}), p = {p}"),
                });
            }
            edges.push((u, v));
        }
        let p = num_vertices.ok_or(Error::Parse {
            line: 0,
            msg: "empty input: missing vertex count".into(),
        })?;
        Graph::new(p, edges)
    }

    /// Canonical edge-list text: `p` on the first line, then `u v` per edge
    /// with `u < v`, sorted lexicographically. Deterministic for equal graphs.
    pub fn to_edgelist(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.num_vertices);
        for &(u, v) in &self.edges {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    /// Number of edges in the symmetric difference of the two edge sets.
    pub fn hamming_distance(&self, other: &Graph) -> Result<usize> {
        if self.num_vertices != other.num_vertices {
            return Err(Error::Dimension(format!(
                "hamming_distance: {} vs {} vertices",
                self.num_vertices, other.num_vertices
            )));
        }
        let a: BTreeSet<_> = self.edges.iter().collect();
        let b: BTreeSet<_> = other.edges.iter().collect();
        Ok(a.symmetric_difference(&b).count())
    }

    /// Length of the shortest cycle; `None` for forests.
    ///
    /// BFS from each vertex: the shortest cycle through the root is detected
    /// at the first non-tree edge between fringe vertices, and the minimum
    /// over roots is exact.
    pub fn girth(&self) -> Option<usize> {
        let adj = self.adjacency();
        let p = self.num_vertices;
        let mut best: Option<usize> = None;
        for root in 0..p {
            let mut dist = vec![usize::MAX; p];
            let mut parent = vec![usize::MAX; p];
            let mut queue = std::collections::VecDeque::new();
            dist[root] = 0;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        parent[v] = u;
                        queue.push_back(v);
                    } else if parent[u] != v {
                        let cycle = dist[u] + dist[v] + 1;
                        if best.map_or(true, |b| cycle < b) {
                            best = Some(cycle);
                        }
                    }
                }
            }
        }
        best
    }
}
