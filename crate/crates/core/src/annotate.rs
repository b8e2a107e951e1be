//! Annotated bags: a bag together with a partial automorphism defined on its
//! closed neighborhood.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::decomp::TreeDecomposition;
use crate::graph::{Graph, GraphError, Vertex, VertexSet};
use crate::perm::Permutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnotateError {
    #[error("annotated bags need a nonempty bag")]
    EmptyBag,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("annotation domain {found} differs from the closed neighborhood {expected}")]
    DomainMismatch { expected: VertexSet, found: VertexSet },
    #[error("assignment has {found} bags for {expected} nodes")]
    LengthMismatch { expected: usize, found: usize },
    #[error("node {node}: annotated bag {found} does not erase to {expected}")]
    ErasureMismatch { node: usize, expected: VertexSet, found: VertexSet },
    #[error("node {node}: annotation is not a valid annotated bag")]
    InvalidBag { node: usize },
    #[error("nodes {parent} and {child} disagree on their common domain")]
    Inconsistent { parent: usize, child: usize },
    #[error("vertex {vertex} receives two different images")]
    IllDefined { vertex: Vertex },
    #[error("annotation morphism is not an automorphism: {0}")]
    NotAutomorphism(String),
}

/// A bag `s` with a map `phi` on `N̄(s)`, stored as images over the sorted
/// domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AnnotatedBag {
    pub s: VertexSet,
    domain: VertexSet,
    images: Vec<Vertex>,
}

impl AnnotatedBag {
    /// Pairs are `(vertex, image)`; the domain is taken from the pairs as given.
    pub fn from_pairs(s: VertexSet, pairs: &[(Vertex, Vertex)]) -> Self {
        let mut pairs = pairs.to_vec();
        pairs.sort_unstable();
        pairs.dedup_by_key(|p| p.0);
        let domain = pairs.iter().map(|p| p.0).collect();
        let images = pairs.iter().map(|p| p.1).collect();
        AnnotatedBag { s, domain, images }
    }

    /// `σ` restricted to `N̄(s)`.
    pub fn restrict(g: &Graph, s: VertexSet, sigma: &Permutation) -> Result<Self, AnnotateError> {
        let domain = g.closed_neighborhood(&s)?;
        let images = domain.iter().map(|v| sigma.apply(v)).collect();
        Ok(AnnotatedBag { s, domain, images })
    }

    pub fn domain(&self) -> &VertexSet {
        &self.domain
    }

    pub fn images(&self) -> &[Vertex] {
        &self.images
    }

    pub fn phi(&self, v: Vertex) -> Option<Vertex> {
        self.domain.index_of(v).map(|i| self.images[i])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.domain.iter().zip(self.images.iter().copied())
    }
}

impl fmt::Display for AnnotatedBag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[", self.s)?;
        for (i, (v, x)) in self.pairs().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}>{x}")?;
        }
        f.write_str("]")
    }
}

struct BagSearch<'a> {
    g: &'a Graph,
    order: Vec<Vertex>,
    s_len: usize,
    target_len: usize,
    assigned: Vec<Vertex>,
    used: Vec<bool>,
    allowed: Vec<bool>,
    out: Vec<Vec<(Vertex, Vertex)>>,
}

impl BagSearch<'_> {
    fn fits(&self, v: Vertex, x: Vertex) -> bool {
        self.order[..self.assigned.len()]
            .iter()
            .zip(&self.assigned)
            .all(|(&u, &y)| self.g.is_adjacent(u, v) == self.g.is_adjacent(y, x))
    }

    fn run(&mut self) {
        let k = self.assigned.len();
        if k == self.order.len() {
            self.out.push(self.order.iter().copied().zip(self.assigned.iter().copied()).collect());
            return;
        }
        if k == self.s_len {
            // image of S fixed: the rest must fill N̄(phi(S)) exactly
            let image_s: VertexSet = self.assigned.iter().copied().collect();
            let target = self.g.closed_neighborhood(&image_s).unwrap();
            if target.len() != self.target_len {
                return;
            }
            let saved = std::mem::replace(&mut self.allowed, vec![false; self.used.len()]);
            for x in target.iter() {
                self.allowed[x as usize] = true;
            }
            self.extend(k);
            self.allowed = saved;
            return;
        }
        self.extend(k);
    }

    fn extend(&mut self, k: usize) {
        let v = self.order[k];
        let in_s = k < self.s_len;
        for x in self.g.vertices() {
            if self.used[x as usize] || !self.allowed[x as usize] {
                continue;
            }
            if in_s && self.g.degree(x) != self.g.degree(v) {
                continue;
            }
            if !self.fits(v, x) {
                continue;
            }
            self.used[x as usize] = true;
            self.assigned.push(x);
            self.run();
            self.assigned.pop();
            self.used[x as usize] = false;
        }
    }
}

/// All annotated bags over `s`, ordered lexicographically by their image
/// lists over the sorted domain.
pub fn enumerate_annotated_bags(g: &Graph, s: &VertexSet) -> Result<Vec<AnnotatedBag>, AnnotateError> {
    if s.is_empty() {
        return Err(AnnotateError::EmptyBag);
    }
    let domain = g.closed_neighborhood(s)?;
    let order: Vec<Vertex> =
        s.iter().chain(domain.iter().filter(|&v| !s.contains(v))).collect();
    let mut search = BagSearch {
        g,
        s_len: s.len(),
        target_len: domain.len(),
        order,
        assigned: Vec::new(),
        used: vec![false; g.vertex_count() as usize + 1],
        allowed: vec![true; g.vertex_count() as usize + 1],
        out: Vec::new(),
    };
    search.run();
    let mut bags: Vec<AnnotatedBag> = search
        .out
        .into_iter()
        .map(|pairs| AnnotatedBag::from_pairs(s.clone(), &pairs))
        .collect();
    bags.sort_by(|a, b| a.images.cmp(&b.images));
    Ok(bags)
}

/// Both annotated-bag conditions: the image of `N̄(S)` is `N̄(phi(S))`, and
/// `phi` is an isomorphism between the induced subgraphs.
pub fn check_annotated_bag(g: &Graph, b: &AnnotatedBag) -> Result<bool, AnnotateError> {
    let expected = g.closed_neighborhood(&b.s)?;
    if expected != b.domain {
        return Err(AnnotateError::DomainMismatch { expected, found: b.domain.clone() });
    }
    if b.s.is_empty() {
        return Err(AnnotateError::EmptyBag);
    }
    if b.images.iter().any(|&x| !g.contains_vertex(x)) {
        return Ok(false);
    }
    let image_set: VertexSet = b.images.iter().copied().collect();
    if image_set.len() != b.images.len() {
        return Ok(false);
    }
    let image_s: VertexSet = b.s.iter().map(|v| b.phi(v).unwrap()).collect();
    if g.closed_neighborhood(&image_s)? != image_set {
        return Ok(false);
    }
    let pairs: Vec<(Vertex, Vertex)> = b.pairs().collect();
    for (i, &(u, x)) in pairs.iter().enumerate() {
        for &(v, y) in &pairs[i + 1..] {
            if g.is_adjacent(u, v) != g.is_adjacent(x, y) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Parent and child agree on every vertex of their common domain
/// `N̄(parent.s) ∩ N̄(child.s)`.
pub fn consistent_bags(parent: &AnnotatedBag, child: &AnnotatedBag) -> bool {
    // both domains sorted: merge walk
    let (a, b) = (parent.domain.as_slice(), child.domain.as_slice());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if parent.images[i] != child.images[j] {
                    return false;
                }
                i += 1;
                j += 1;
            }
        }
    }
    true
}

/// One annotated bag per node of a fixed tree decomposition, indexed by node
/// id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotationAssignment {
    pub bags: Vec<AnnotatedBag>,
}

impl AnnotationAssignment {
    /// Restricts an automorphism to every closed neighborhood of `td`.
    pub fn from_automorphism(
        g: &Graph,
        td: &TreeDecomposition,
        sigma: &Permutation,
    ) -> Result<Self, AnnotateError> {
        let bags = (0..td.len())
            .map(|id| AnnotatedBag::restrict(g, td.bag(id).clone(), sigma))
            .collect::<Result<_, _>>()?;
        Ok(AnnotationAssignment { bags })
    }
}

/// Erasure gives back `td`, every bag is valid, and every parent/child pair
/// is consistent.
pub fn check_assignment(
    g: &Graph,
    td: &TreeDecomposition,
    a: &AnnotationAssignment,
) -> Result<(), AnnotateError> {
    if a.bags.len() != td.len() {
        return Err(AnnotateError::LengthMismatch { expected: td.len(), found: a.bags.len() });
    }
    for (id, b) in a.bags.iter().enumerate() {
        if &b.s != td.bag(id) {
            return Err(AnnotateError::ErasureMismatch {
                node: id,
                expected: td.bag(id).clone(),
                found: b.s.clone(),
            });
        }
        if !check_annotated_bag(g, b)? {
            return Err(AnnotateError::InvalidBag { node: id });
        }
        if let Some(p) = td.parent(id) {
            if !consistent_bags(&a.bags[p], b) {
                return Err(AnnotateError::Inconsistent { parent: p, child: id });
            }
        }
    }
    Ok(())
}

/// The union of all bag annotations, verified to be an automorphism.
pub fn annotation_morphism(
    g: &Graph,
    td: &TreeDecomposition,
    a: &AnnotationAssignment,
) -> Result<Permutation, AnnotateError> {
    check_assignment(g, td, a)?;
    let m = g.vertex_count() as usize;
    let mut image = vec![0 as Vertex; m];
    for b in &a.bags {
        for (v, x) in b.pairs() {
            let slot = &mut image[(v - 1) as usize];
            if *slot != 0 && *slot != x {
                return Err(AnnotateError::IllDefined { vertex: v });
            }
            *slot = x;
        }
    }
    if let Some(i) = image.iter().position(|&x| x == 0) {
        return Err(AnnotateError::NotAutomorphism(format!("vertex {} unmapped", i + 1)));
    }
    let sigma = Permutation::from_images(image)
        .map_err(|e| AnnotateError::NotAutomorphism(e.to_string()))?;
    for u in g.vertices() {
        for v in g.vertices() {
            if u < v && g.is_adjacent(u, v) != g.is_adjacent(sigma.apply(u), sigma.apply(v)) {
                return Err(AnnotateError::NotAutomorphism(format!("pair {{{u},{v}}} not preserved")));
            }
        }
    }
    Ok(sigma)
}

/// Annotated bags of every node, indexed by node id.
pub fn annotated_bag_table(
    g: &Graph,
    td: &TreeDecomposition,
) -> Result<Vec<Vec<AnnotatedBag>>, AnnotateError> {
    (0..td.len())
        .into_par_iter()
        .map(|id| enumerate_annotated_bags(g, td.bag(id)))
        .collect()
}

/// For each node and each of its annotated bags, the indices of consistent
/// annotated bags at each child (children in order).
pub(crate) fn consistency_lists(
    td: &TreeDecomposition,
    table: &[Vec<AnnotatedBag>],
) -> Vec<Vec<Vec<Vec<usize>>>> {
    (0..td.len())
        .into_par_iter()
        .map(|id| {
            table[id]
                .iter()
                .map(|b| {
                    td.children(id)
                        .iter()
                        .map(|&c| {
                            table[c]
                                .iter()
                                .enumerate()
                                .filter(|(_, bc)| consistent_bags(b, bc))
                                .map(|(k, _)| k)
                                .collect()
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Number of valid annotations of `td`, by dynamic programming over the tree.
pub fn count_annotations(g: &Graph, td: &TreeDecomposition) -> Result<BigUint, AnnotateError> {
    let table = annotated_bag_table(g, td)?;
    let cons = consistency_lists(td, &table);
    let mut counts: Vec<Vec<BigUint>> = vec![Vec::new(); td.len()];
    for id in td.preorder().into_iter().rev() {
        counts[id] = cons[id]
            .iter()
            .map(|per_child| {
                td.children(id).iter().zip(per_child).fold(BigUint::one(), |acc, (&c, ks)| {
                    let s: BigUint = ks.iter().map(|&k| &counts[c][k]).sum();
                    acc * s
                })
            })
            .collect();
    }
    Ok(counts[td.root()].iter().fold(BigUint::zero(), |a, b| a + b))
}

/// Every valid annotation of `td`, in lexicographic order of per-node bag
/// indices taken in preorder.
pub fn enumerate_annotations(
    g: &Graph,
    td: &TreeDecomposition,
) -> Result<Vec<AnnotationAssignment>, AnnotateError> {
    let table = annotated_bag_table(g, td)?;
    let order = td.preorder();
    let mut choice = vec![usize::MAX; td.len()];
    let mut out = Vec::new();
    fn go(
        i: usize,
        order: &[usize],
        td: &TreeDecomposition,
        table: &[Vec<AnnotatedBag>],
        choice: &mut Vec<usize>,
        out: &mut Vec<AnnotationAssignment>,
    ) {
        if i == order.len() {
            out.push(AnnotationAssignment {
                bags: (0..td.len()).map(|id| table[id][choice[id]].clone()).collect(),
            });
            return;
        }
        let id = order[i];
        for k in 0..table[id].len() {
            let ok = td
                .parent(id)
                .is_none_or(|p| consistent_bags(&table[p][choice[p]], &table[id][k]));
            if ok {
                choice[id] = k;
                go(i + 1, order, td, table, choice, out);
            }
        }
    }
    go(0, &order, td, &table, &mut choice, &mut out);
    Ok(out)
}
