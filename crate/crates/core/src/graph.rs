//! Simple undirected unweighted graphs, exact BFS distance oracles, and
//! neighborhood queries.

use std::collections::{BTreeSet, VecDeque};

use num::BigRational;
use thiserror::Error;

use crate::rational::floor_to_u64;

pub type VertexId = u32;

/// Sentinel for vertices a BFS did not reach (either disconnected or past the
/// depth limit).
pub const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {0} out of range (n = {1})")]
    VertexOutOfRange(VertexId, u32),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(VertexId, VertexId),
    #[error("malformed edge list: {0}")]
    Parse(String),
}

/// Simple undirected unweighted graph over vertex ids `0..n`, adjacency lists
/// kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: u32,
    adj: Vec<Vec<VertexId>>,
}

impl Graph {
    pub fn new(n: u32) -> Self {
        Graph {
            n,
            adj: vec![Vec::new(); n as usize],
        }
    }

    /// Builds a graph from an undirected edge list. Rejects self-loops,
    /// duplicates and out-of-range endpoints.
    pub fn from_edges(n: u32, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        for list in &mut g.adj {
            list.sort_unstable();
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if u >= self.n {
            return Err(GraphError::VertexOutOfRange(u, self.n));
        }
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange(v, self.n));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if self.adj[u as usize].contains(&v) {
            return Err(GraphError::DuplicateEdge(u, v));
        }
        self.adj[u as usize].push(v);
        self.adj[v as usize].push(u);
        self.adj[u as usize].sort_unstable();
        self.adj[v as usize].sort_unstable();
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Normalized (min, max) edge list, sorted.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Subgraph of `self` on the same vertex set, keeping only `edges`.
    /// Edges absent from `self` are rejected.
    pub fn edge_subgraph(
        &self,
        edges: &BTreeSet<(VertexId, VertexId)>,
    ) -> Result<Graph, GraphError> {
        for &(u, v) in edges {
            if u >= self.n || v >= self.n || !self.has_edge(u, v) {
                return Err(GraphError::Parse(format!(
                    "edge ({u}, {v}) is not an edge of the host graph"
                )));
            }
        }
        let list: Vec<_> = edges.iter().copied().collect();
        Graph::from_edges(self.n, &list)
    }
}

/// Hop distances from one source, with `UNREACHABLE` for unreached vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceRow {
    pub source: VertexId,
    pub dist: Vec<u32>,
}

impl DistanceRow {
    pub fn get(&self, v: VertexId) -> Option<u32> {
        let d = self.dist[v as usize];
        (d != UNREACHABLE).then_some(d)
    }

    pub fn reachable(&self, v: VertexId) -> bool {
        self.dist[v as usize] != UNREACHABLE
    }
}

/// BFS from `source`, optionally truncated at `depth_limit` hops.
pub fn bfs(graph: &Graph, source: VertexId, depth_limit: Option<u32>) -> Result<DistanceRow, GraphError> {
    if source >= graph.n() {
        return Err(GraphError::VertexOutOfRange(source, graph.n()));
    }
    let mut dist = vec![UNREACHABLE; graph.n() as usize];
    dist[source as usize] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        if let Some(limit) = depth_limit {
            if du >= limit {
                continue;
            }
        }
        for &v in graph.neighbors(u) {
            if dist[v as usize] == UNREACHABLE {
                dist[v as usize] = du + 1;
                queue.push_back(v);
            }
        }
    }
    Ok(DistanceRow { source, dist })
}

/// Multi-source BFS: distance to the nearest of `sources`.
pub fn multi_source_bfs(graph: &Graph, sources: &[VertexId], depth_limit: Option<u32>) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; graph.n() as usize];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s as usize] == UNREACHABLE {
            dist[s as usize] = 0;
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        if let Some(limit) = depth_limit {
            if du >= limit {
                continue;
            }
        }
        for &v in graph.neighbors(u) {
            if dist[v as usize] == UNREACHABLE {
                dist[v as usize] = du + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Centers within rational distance `delta` of `v`. Distances are integral,
/// so the comparison is `d <= floor(delta)`.
pub fn ball_centers(
    graph: &Graph,
    centers: &BTreeSet<VertexId>,
    v: VertexId,
    delta: &BigRational,
) -> Result<BTreeSet<VertexId>, GraphError> {
    let depth = floor_to_u64(delta).min(u64::from(u32::MAX)) as u32;
    let row = bfs(graph, v, Some(depth))?;
    Ok(centers
        .iter()
        .copied()
        .filter(|&c| row.reachable(c))
        .collect())
}

/// Parses the edge-list text format: first line `n m`, then `m` lines `u v`.
pub fn parse_edge_list(text: &str) -> Result<Graph, GraphError> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| GraphError::Parse("empty input".into()))?;
    let mut parts = header.split_whitespace();
    let n: u32 = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| GraphError::Parse(format!("bad header line: {header:?}")))?;
    let m: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| GraphError::Parse(format!("bad header line: {header:?}")))?;
    let mut edges = Vec::with_capacity(m);
    for line in lines {
        let mut it = line.split_whitespace();
        let u: u32 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| GraphError::Parse(format!("bad edge line: {line:?}")))?;
        let v: u32 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| GraphError::Parse(format!("bad edge line: {line:?}")))?;
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(GraphError::Parse(format!(
            "header declares {m} edges, found {}",
            edges.len()
        )));
    }
    Graph::from_edges(n, &edges)
}

/// Serializes a graph in the same format `parse_edge_list` reads, edges
/// sorted, so repeated writes are byte-identical.
pub fn format_edge_list(graph: &Graph) -> String {
    let edges = graph.edges();
    let mut out = format!("{} {}\n", graph.n(), edges.len());
    for (u, v) in edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Serializes an explicit edge set over `n` vertices (used for spanner output).
pub fn format_edge_set(n: u32, edges: &BTreeSet<(VertexId, VertexId)>) -> String {
    let mut out = format!("{} {}\n", n, edges.len());
    for &(u, v) in edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}
