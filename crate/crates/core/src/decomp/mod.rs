//! Tree decompositions stored as rooted ordered trees of bags.
//!
//! Positions follow the usual term convention: the root is the empty string
//! and the `j`-th child of position `p` is `p·j` (1-based), so children keep
//! their left-to-right order.

mod construct;
mod pace;
mod yielding;

use std::fmt;

use thiserror::Error;

use crate::graph::{Graph, Vertex, VertexSet};

pub use construct::{
    compute_path_decomposition, compute_tree_decomposition, decomposition_from_ordering,
    elimination_width, path_decomposition_from_ordering, Strategy, DEFAULT_EXACT_CAP,
};
pub use pace::{parse_pace, write_pace};
pub use yielding::{make_permutation_yielding, YieldOrder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error("graph not connected")]
    Disconnected,
    #[error("exact search refused: {vertices} vertices exceed cap {cap}")]
    TooLarge { vertices: u32, cap: u32 },
    #[error("invalid tree decomposition: {0}")]
    Invalid(String),
    #[error("decomposition is not permutation yielding: {0}")]
    NotYielding(String),
    #[error("decomposition is not path shaped")]
    NotPath,
    #[error("td file line {line}: {reason}")]
    Pace { line: usize, reason: String },
}

/// A position in a tree-like set: the sequence of 1-based child indices
/// leading from the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position(pub Vec<u32>);

impl fmt::Display for Position {
    /// Root renders as `r`, the second child of the first child as `r.1.2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("r")?;
        for c in &self.0 {
            write!(f, ".{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub bag: VertexSet,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// A rooted, ordered tree whose nodes carry bags.
///
/// Node ids are arena indices; they carry no meaning beyond identity. Every
/// canonical order (positions, leaves, preorder) is derived from the tree
/// shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    nodes: Vec<Node>,
    root: usize,
}

impl TreeDecomposition {
    pub fn with_root(bag: VertexSet) -> Self {
        TreeDecomposition { nodes: vec![Node { bag, parent: None, children: Vec::new() }], root: 0 }
    }

    /// Appends a new last child under `parent` and returns its id.
    pub fn add_child(&mut self, parent: usize, bag: VertexSet) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node { bag, parent: Some(parent), children: Vec::new() });
        self.nodes[parent].children.push(id);
        id
    }

    /// A path: `bags[0]` is the root, `bags[i + 1]` the only child of `bags[i]`.
    pub fn path(bags: Vec<VertexSet>) -> Self {
        let mut it = bags.into_iter();
        let mut td = TreeDecomposition::with_root(it.next().unwrap_or_default());
        let mut last = td.root;
        for bag in it {
            last = td.add_child(last, bag);
        }
        td
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id]
    }

    pub fn bag(&self, id: usize) -> &VertexSet {
        &self.nodes[id].bag
    }

    pub fn children(&self, id: usize) -> &[usize] {
        &self.nodes[id].children
    }

    pub fn parent(&self, id: usize) -> Option<usize> {
        self.nodes[id].parent
    }

    pub fn is_leaf(&self, id: usize) -> bool {
        self.nodes[id].children.is_empty()
    }

    /// Node ids in preorder (parent before children, children left to right).
    pub fn preorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            out.push(id);
            stack.extend(self.nodes[id].children.iter().rev());
        }
        out
    }

    /// Leaves from left to right.
    pub fn leaves(&self) -> Vec<usize> {
        self.preorder().into_iter().filter(|&id| self.is_leaf(id)).collect()
    }

    pub fn position(&self, mut id: usize) -> Position {
        let mut rev = Vec::new();
        while let Some(p) = self.nodes[id].parent {
            let idx = self.nodes[p].children.iter().position(|&c| c == id).unwrap();
            rev.push(idx as u32 + 1);
            id = p;
        }
        rev.reverse();
        Position(rev)
    }

    /// `max |bag| - 1`; an all-empty decomposition reports width 0.
    pub fn width(&self) -> usize {
        self.nodes.iter().map(|n| n.bag.len()).max().unwrap_or(1).saturating_sub(1)
    }

    /// Every node has at most one child.
    pub fn is_path_shaped(&self) -> bool {
        self.nodes.iter().all(|n| n.children.len() <= 1)
    }

    /// Rebuilds the arena so that node ids coincide with preorder indices.
    pub fn renumbered(&self) -> TreeDecomposition {
        let order = self.preorder();
        let mut new_id = vec![0; self.nodes.len()];
        for (i, &old) in order.iter().enumerate() {
            new_id[old] = i;
        }
        let nodes = order
            .iter()
            .map(|&old| {
                let n = &self.nodes[old];
                Node {
                    bag: n.bag.clone(),
                    parent: n.parent.map(|p| new_id[p]),
                    children: n.children.iter().map(|&c| new_id[c]).collect(),
                }
            })
            .collect();
        TreeDecomposition { nodes, root: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// A bag mentions a vertex the graph does not have.
    UnknownVertex { node: usize, vertex: Vertex },
    /// T1: vertex in no bag.
    UncoveredVertex(Vertex),
    /// T2: edge in no bag.
    UncoveredEdge(Vertex, Vertex),
    /// T3: the nodes containing the vertex do not form a connected subtree.
    DisconnectedOccurrence(Vertex),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownVertex { node, vertex } => {
                write!(f, "node {node} holds unknown vertex {vertex}")
            }
            Violation::UncoveredVertex(v) => write!(f, "T1: vertex {v} in no bag"),
            Violation::UncoveredEdge(u, v) => write!(f, "T2: edge {{{u},{v}}} in no bag"),
            Violation::DisconnectedOccurrence(v) => {
                write!(f, "T3: occurrences of vertex {v} are not a subterm")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub width: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the three tree-decomposition axioms. Violations are returned as
/// data, sorted.
pub fn validate_tree_decomposition(g: &Graph, td: &TreeDecomposition) -> ValidationReport {
    let n = g.vertex_count() as usize;
    let mut violations = Vec::new();
    // number of nodes containing v whose parent does not contain v
    let mut tops = vec![0usize; n + 1];
    let mut covered = vec![false; n + 1];
    for id in td.preorder() {
        let node = td.node(id);
        for v in node.bag.iter() {
            if !g.contains_vertex(v) {
                violations.push(Violation::UnknownVertex { node: id, vertex: v });
                continue;
            }
            covered[v as usize] = true;
            let parent_has = node.parent.is_some_and(|p| td.bag(p).contains(v));
            if !parent_has {
                tops[v as usize] += 1;
            }
        }
    }
    for v in g.vertices() {
        if !covered[v as usize] {
            violations.push(Violation::UncoveredVertex(v));
        } else if tops[v as usize] > 1 {
            violations.push(Violation::DisconnectedOccurrence(v));
        }
    }
    for (u, v) in g.edges() {
        if !td.nodes.iter().any(|node| node.bag.contains(u) && node.bag.contains(v)) {
            violations.push(Violation::UncoveredEdge(u, v));
        }
    }
    violations.sort();
    ValidationReport { width: td.width(), violations }
}

pub(crate) fn ensure_valid(g: &Graph, td: &TreeDecomposition) -> Result<(), DecompError> {
    let report = validate_tree_decomposition(g, td);
    if report.is_valid() {
        Ok(())
    } else {
        let msgs: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        Err(DecompError::Invalid(msgs.join("; ")))
    }
}
