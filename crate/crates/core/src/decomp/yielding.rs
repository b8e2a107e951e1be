use super::{ensure_valid, DecompError, TreeDecomposition};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::perm::Permutation;

/// Leaf order of a permutation-yielding decomposition.
///
/// `alpha_t` has one-line form `v_1 v_2 ... v_n`, the vertices of the leaf
/// bags read left to right; `alpha` is its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YieldOrder {
    /// Leaf node ids, left to right.
    pub leaves: Vec<usize>,
    /// `vertex_of_leaf[i]` is the vertex in the bag of `leaves[i]`.
    pub vertex_of_leaf: Vec<Vertex>,
    pub alpha_t: Permutation,
    pub alpha: Permutation,
}

impl YieldOrder {
    /// Reads the yield of an already permutation-yielding decomposition.
    pub fn of(g: &Graph, td: &TreeDecomposition) -> Result<YieldOrder, DecompError> {
        let leaves = td.leaves();
        let n = g.vertex_count() as usize;
        if leaves.len() != n {
            return Err(DecompError::NotYielding(format!(
                "{} leaves for {n} vertices",
                leaves.len()
            )));
        }
        let mut seen = vec![false; n + 1];
        let mut vertex_of_leaf = Vec::with_capacity(n);
        for &leaf in &leaves {
            let bag = td.bag(leaf);
            if bag.len() != 1 {
                return Err(DecompError::NotYielding(format!("leaf bag {bag} is not a singleton")));
            }
            let v = bag.as_slice()[0];
            if !g.contains_vertex(v) || std::mem::replace(&mut seen[v as usize], true) {
                return Err(DecompError::NotYielding(format!("vertex {v} repeated among leaves")));
            }
            vertex_of_leaf.push(v);
        }
        let alpha_t = Permutation::from_images(vertex_of_leaf.clone())
            .map_err(|e| DecompError::NotYielding(e.to_string()))?;
        let alpha = alpha_t.inverse();
        Ok(YieldOrder { leaves, vertex_of_leaf, alpha_t, alpha })
    }

    /// `α = α_t⁻¹`.
    pub fn leaf_order_permutation(&self) -> &Permutation {
        &self.alpha
    }
}

/// Turns a valid decomposition into a permutation-yielding one of the same
/// width.
///
/// Every vertex gets a singleton leaf: the preorder-first existing one, or a
/// new last child under the preorder-first node whose bag contains the
/// vertex. The result is the subterm spanned by the closest ancestral closure
/// of those leaves, renumbered so that surviving children keep their order.
pub fn make_permutation_yielding(
    g: &Graph,
    td: &TreeDecomposition,
) -> Result<(TreeDecomposition, YieldOrder), DecompError> {
    ensure_valid(g, td)?;
    let mut work = td.clone();
    let preorder = td.preorder();
    let n = g.vertex_count() as usize;

    let mut chosen = vec![usize::MAX; n + 1];
    for &id in &preorder {
        let bag = td.bag(id);
        if td.is_leaf(id) && bag.len() == 1 {
            let v = bag.as_slice()[0] as usize;
            if chosen[v] == usize::MAX {
                chosen[v] = id;
            }
        }
    }
    for v in g.vertices() {
        if chosen[v as usize] != usize::MAX {
            continue;
        }
        let host = preorder
            .iter()
            .copied()
            .find(|&id| td.bag(id).contains(v))
            .expect("T1 holds");
        chosen[v as usize] = work.add_child(host, VertexSet::singleton(v));
    }

    // mark ancestors-or-self of chosen leaves
    let mut marked = vec![false; work.len()];
    for &leaf in &chosen[1..] {
        let mut cur = Some(leaf);
        while let Some(id) = cur {
            if marked[id] {
                break;
            }
            marked[id] = true;
            cur = work.parent(id);
        }
    }
    let is_chosen = {
        let mut flags = vec![false; work.len()];
        for &leaf in &chosen[1..] {
            flags[leaf] = true;
        }
        flags
    };
    // the top of the closure: descend while a single marked child carries
    // everything below
    let mut top = work.root();
    loop {
        if is_chosen[top] {
            break;
        }
        let marked_children: Vec<usize> =
            work.children(top).iter().copied().filter(|&c| marked[c]).collect();
        if marked_children.len() == 1 {
            top = marked_children[0];
        } else {
            break;
        }
    }

    let mut out = TreeDecomposition::with_root(work.bag(top).clone());
    let mut stack = vec![(top, out.root())];
    while let Some((old, new)) = stack.pop() {
        for &c in work.children(old) {
            if marked[c] {
                let id = out.add_child(new, work.bag(c).clone());
                stack.push((c, id));
            }
        }
    }
    let out = out.renumbered();
    ensure_valid(g, &out)?;
    debug_assert_eq!(out.width(), td.width());
    let order = YieldOrder::of(g, &out)?;
    Ok((out, order))
}
