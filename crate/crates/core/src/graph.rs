//! Simple undirected graphs on the vertex set `{1, ..., m}`.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

/// Vertices are 1-based throughout the crate.
pub type Vertex = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: malformed input: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: Vertex },
    #[error("line {line}: duplicate edge {{{u},{v}}}")]
    DuplicateEdge { line: usize, u: Vertex, v: Vertex },
    #[error("line {line}: vertex {vertex} out of range 1..={max}")]
    OutOfRange { line: usize, vertex: Vertex, max: Vertex },
    #[error("header announces {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("vertex {vertex} not in graph with {max} vertices")]
    UnknownVertex { vertex: Vertex, max: Vertex },
}

/// Sorted, duplicate-free set of vertices.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexSet(Vec<Vertex>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(Vec::new())
    }

    pub fn singleton(v: Vertex) -> Self {
        VertexSet(vec![v])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Rank of `v` inside the set.
    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }

    pub fn insert(&mut self, v: Vertex) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(at) => {
                self.0.insert(at, v);
                true
            }
        }
    }

    pub fn remove(&mut self, v: Vertex) -> bool {
        match self.0.binary_search(&v) {
            Ok(at) => {
                self.0.remove(at);
                true
            }
            Err(_) => false,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        self.iter().filter(|&v| other.contains(v)).collect()
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        self.iter().chain(other.iter()).collect()
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(iter: I) -> Self {
        let mut v: Vec<Vertex> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VertexSet(v)
    }
}

impl From<Vec<Vertex>> for VertexSet {
    fn from(v: Vec<Vertex>) -> Self {
        v.into_iter().collect()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

/// An immutable simple undirected graph.
///
/// Adjacency is kept twice: as a sorted edge set (pairs `u < v`) and as
/// per-vertex sorted neighbor lists. Neighbor lists define the canonical
/// iteration order used by every downstream enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: u32,
    edges: BTreeSet<(Vertex, Vertex)>,
    adjacency: Vec<Vec<Vertex>>,
}

impl Graph {
    /// Builds a graph from an edge iterator, rejecting loops, duplicates and
    /// out-of-range endpoints. Errors report the 1-based edge index as `line`.
    pub fn from_edges<I>(vertex_count: u32, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        if vertex_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut set = BTreeSet::new();
        for (i, (a, b)) in edges.into_iter().enumerate() {
            let line = i + 1;
            for x in [a, b] {
                if x == 0 || x > vertex_count {
                    return Err(GraphError::OutOfRange { line, vertex: x, max: vertex_count });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop { line, vertex: a });
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !set.insert((u, v)) {
                return Err(GraphError::DuplicateEdge { line, u, v });
            }
        }
        let mut adjacency = vec![Vec::new(); vertex_count as usize];
        for &(u, v) in &set {
            adjacency[(u - 1) as usize].push(v);
            adjacency[(v - 1) as usize].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Graph { vertex_count, edges: set, adjacency })
    }

    /// Parses the edge-list format: a header `m k` followed by `k` lines `u v`.
    /// Blank trailing lines are ignored.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(GraphError::Malformed {
            line: 1,
            reason: "missing header".into(),
        })?;
        let (m, k) = parse_pair(header, hline + 1)?;
        if m == 0 {
            return Err(GraphError::Empty);
        }
        let mut edges = Vec::new();
        let mut set = BTreeSet::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let (a, b) = parse_pair(line, lineno)?;
            for x in [a, b] {
                if x == 0 || x > m {
                    return Err(GraphError::OutOfRange { line: lineno, vertex: x, max: m });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop { line: lineno, vertex: a });
            }
            let pair = (a.min(b), a.max(b));
            if !set.insert(pair) {
                return Err(GraphError::DuplicateEdge { line: lineno, u: pair.0, v: pair.1 });
            }
            edges.push(pair);
        }
        if edges.len() != k as usize {
            return Err(GraphError::EdgeCount { expected: k as usize, found: edges.len() });
        }
        Graph::from_edges(m, edges)
    }

    /// Normalized edge-list text (sorted pairs, `u < v`, trailing newline).
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.vertex_count, self.edges.len());
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn vertex_count(&self) -> u32 {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.vertex_count
    }

    pub fn vertex_set(&self) -> VertexSet {
        VertexSet(self.vertices().collect())
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.edges.iter().copied()
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        v >= 1 && v <= self.vertex_count
    }

    /// Sorted neighbors of `v`. Panics if `v` is not a vertex.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adjacency[(v - 1) as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).len()
    }

    pub fn is_adjacent(&self, u: Vertex, v: Vertex) -> bool {
        let key = if u < v { (u, v) } else { (v, u) };
        self.edges.contains(&key)
    }

    fn check_set(&self, s: &VertexSet) -> Result<(), GraphError> {
        match s.iter().find(|&v| !self.contains_vertex(v)) {
            Some(vertex) => Err(GraphError::UnknownVertex { vertex, max: self.vertex_count }),
            None => Ok(()),
        }
    }

    /// `N(s) ∪ s`.
    pub fn closed_neighborhood(&self, s: &VertexSet) -> Result<VertexSet, GraphError> {
        self.check_set(s)?;
        Ok(s
            .iter()
            .flat_map(|v| std::iter::once(v).chain(self.neighbors(v).iter().copied()))
            .collect())
    }

    /// Edges of the subgraph induced by `s`, with original labels.
    pub fn induced_subgraph(&self, s: &VertexSet) -> Result<Vec<(Vertex, Vertex)>, GraphError> {
        self.check_set(s)?;
        let mut out = Vec::new();
        for u in s.iter() {
            for &v in self.neighbors(u) {
                if u < v && s.contains(v) {
                    out.push((u, v));
                }
            }
        }
        Ok(out)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count as usize;
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([1u32]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &u in self.neighbors(v) {
                if !seen[(u - 1) as usize] {
                    seen[(u - 1) as usize] = true;
                    count += 1;
                    queue.push_back(u);
                }
            }
        }
        count == n
    }

    pub fn max_degree(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).max().unwrap_or(0)
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(u32, u32), GraphError> {
    let malformed = |reason: &str| GraphError::Malformed { line: lineno, reason: reason.into() };
    let mut it = line.split(' ');
    let a = it.next().ok_or_else(|| malformed("expected two integers"))?;
    let b = it.next().ok_or_else(|| malformed("expected two integers"))?;
    if it.next().is_some() {
        return Err(malformed("expected exactly two integers"));
    }
    let a = a.trim().parse::<u32>().map_err(|_| malformed("not a non-negative integer"))?;
    let b = b.trim().parse::<u32>().map_err(|_| malformed("not a non-negative integer"))?;
    Ok((a, b))
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_edge_list())
    }
}

/// Small built-in corpus used by tests, examples and the CLI.
pub mod named {
    use super::{Graph, Vertex};

    pub fn path(n: u32) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i, i + 1))).expect("path")
    }

    pub fn cycle(n: u32) -> Graph {
        assert!(n >= 3);
        Graph::from_edges(n, (1..=n).map(|i| (i, i % n + 1))).expect("cycle")
    }

    pub fn complete(n: u32) -> Graph {
        let edges = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v)));
        Graph::from_edges(n, edges).expect("complete")
    }

    /// Star with `leaves` leaves `1..=leaves` and center `leaves + 1`.
    pub fn star(leaves: u32) -> Graph {
        let c = leaves + 1;
        Graph::from_edges(c, (1..=leaves).map(|i| (i, c))).expect("star")
    }

    pub fn discrete(n: u32) -> Graph {
        Graph::from_edges(n, std::iter::empty()).expect("discrete")
    }

    /// The `d`-dimensional hypercube; vertex `i + 1` encodes bit pattern `i`.
    pub fn hypercube(d: u32) -> Graph {
        let n = 1u32 << d;
        let mut edges = Vec::new();
        for i in 0..n {
            for b in 0..d {
                let j = i ^ (1 << b);
                if i < j {
                    edges.push((i + 1, j + 1));
                }
            }
        }
        Graph::from_edges(n, edges).expect("hypercube")
    }

    /// Outer 5-cycle 1..5, inner pentagram 6..10, spokes i -- i+5.
    pub fn petersen() -> Graph {
        let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
        for i in 0..5 {
            edges.push((i + 1, (i + 1) % 5 + 1));
            edges.push((i + 6, (i + 2) % 5 + 6));
            edges.push((i + 1, i + 6));
        }
        Graph::from_edges(10, edges).expect("petersen")
    }

    /// Looks up a corpus graph by name, e.g. `P4`, `C5`, `K4`, `star4`, `Q3`,
    /// `petersen`.
    pub fn by_name(name: &str) -> Option<Graph> {
        let lower = name.to_ascii_lowercase();
        if lower == "petersen" {
            return Some(petersen());
        }
        let num = |prefix: &str| lower.strip_prefix(prefix).and_then(|r| r.parse::<u32>().ok());
        if let Some(n) = num("star") {
            return (n >= 1).then(|| star(n));
        }
        if let Some(n) = num("p") {
            return (n >= 1).then(|| path(n));
        }
        if let Some(n) = num("c") {
            return (n >= 3).then(|| cycle(n));
        }
        if let Some(n) = num("k") {
            return (n >= 1).then(|| complete(n));
        }
        if let Some(n) = num("q") {
            return (1..=4).contains(&n).then(|| hypercube(n));
        }
        if let Some(n) = num("d") {
            return (n >= 1).then(|| discrete(n));
        }
        None
    }
}
