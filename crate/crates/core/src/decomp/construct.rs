//! Elimination-ordering based construction of tree and path decompositions.

use std::collections::BTreeSet;

use super::{DecompError, TreeDecomposition};
use crate::graph::{Graph, Vertex, VertexSet};

pub const DEFAULT_EXACT_CAP: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[derive(Default)]
pub enum Strategy {
    /// Greedy min-fill elimination ordering.
    #[default]
    MinFill,
    /// Minimum-width elimination ordering by dynamic programming over vertex
    /// subsets; refused above `cap` vertices.
    ExactSmall { cap: u32 },
}


pub fn compute_tree_decomposition(
    g: &Graph,
    strategy: Strategy,
) -> Result<TreeDecomposition, DecompError> {
    if !g.is_connected() {
        return Err(DecompError::Disconnected);
    }
    let order = match strategy {
        Strategy::MinFill => min_fill_ordering(g),
        Strategy::ExactSmall { cap } => {
            // subset DP tables are 2^n entries
            let cap = cap.min(24);
            if g.vertex_count() > cap {
                return Err(DecompError::TooLarge { vertices: g.vertex_count(), cap });
            }
            exact_treewidth_ordering(g)
        }
    };
    Ok(decomposition_from_ordering(g, &order))
}

fn adjacency_sets(g: &Graph) -> Vec<BTreeSet<Vertex>> {
    let mut adj = vec![BTreeSet::new(); g.vertex_count() as usize + 1];
    for v in g.vertices() {
        adj[v as usize] = g.neighbors(v).iter().copied().collect();
    }
    adj
}

/// Simulates elimination and returns, per vertex, its higher neighbors in the
/// filled graph.
fn eliminate(g: &Graph, order: &[Vertex]) -> Vec<VertexSet> {
    let mut adj = adjacency_sets(g);
    let mut higher = vec![VertexSet::new(); g.vertex_count() as usize + 1];
    for &v in order {
        let nbrs: Vec<Vertex> = adj[v as usize].iter().copied().collect();
        for (i, &a) in nbrs.iter().enumerate() {
            adj[a as usize].remove(&v);
            for &b in &nbrs[i + 1..] {
                adj[a as usize].insert(b);
                adj[b as usize].insert(a);
            }
        }
        higher[v as usize] = nbrs.into_iter().collect();
    }
    higher
}

/// Width of the decomposition induced by an elimination ordering.
pub fn elimination_width(g: &Graph, order: &[Vertex]) -> usize {
    eliminate(g, order).iter().map(|h| h.len()).max().unwrap_or(0)
}

/// Standard construction: the bag of `v` is `v` plus its higher neighbors in
/// the filled graph, hung below the bag of the earliest-eliminated higher
/// neighbor. Bags contained in their parent are then contracted away.
pub fn decomposition_from_ordering(g: &Graph, order: &[Vertex]) -> TreeDecomposition {
    let n = g.vertex_count() as usize;
    let higher = eliminate(g, order);
    let mut rank = vec![0usize; n + 1];
    for (i, &v) in order.iter().enumerate() {
        rank[v as usize] = i;
    }
    // parent[i] refers to positions in `order`
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for (i, &v) in order.iter().enumerate() {
        parent[i] = higher[v as usize].iter().map(|u| rank[u as usize]).min();
    }
    let bags: Vec<VertexSet> = order
        .iter()
        .map(|&v| {
            let mut b = higher[v as usize].clone();
            b.insert(v);
            b
        })
        .collect();
    // contraction: a bag that is a subset of its parent merges into it
    let mut rep: Vec<usize> = (0..n).collect();
    for i in (0..n).rev() {
        if let Some(p) = parent[i] {
            let pr = rep[p];
            if bags[i].is_subset(&bags[pr]) {
                rep[i] = pr;
            }
        }
    }
    let root = n - 1;
    let mut td = TreeDecomposition::with_root(bags[rep[root]].clone());
    let mut node_of = vec![usize::MAX; n];
    node_of[rep[root]] = td.root();
    // processing in reverse elimination order guarantees parents come first;
    // children are therefore attached in decreasing elimination rank
    for i in (0..n).rev() {
        if rep[i] != i {
            continue;
        }
        if let Some(p) = parent[i] {
            let pn = node_of[rep[p]];
            node_of[i] = td.add_child(pn, bags[i].clone());
        }
    }
    td.renumbered()
}

fn min_fill_ordering(g: &Graph) -> Vec<Vertex> {
    let mut adj = adjacency_sets(g);
    let mut alive: BTreeSet<Vertex> = g.vertices().collect();
    let mut order = Vec::with_capacity(alive.len());
    while !alive.is_empty() {
        let best = alive
            .iter()
            .copied()
            .min_by_key(|&v| {
                let nbrs: Vec<Vertex> = adj[v as usize].iter().copied().collect();
                let mut fill = 0usize;
                for (i, &a) in nbrs.iter().enumerate() {
                    for &b in &nbrs[i + 1..] {
                        if !adj[a as usize].contains(&b) {
                            fill += 1;
                        }
                    }
                }
                (fill, nbrs.len(), v)
            })
            .unwrap();
        let nbrs: Vec<Vertex> = adj[best as usize].iter().copied().collect();
        for (i, &a) in nbrs.iter().enumerate() {
            adj[a as usize].remove(&best);
            for &b in &nbrs[i + 1..] {
                adj[a as usize].insert(b);
                adj[b as usize].insert(a);
            }
        }
        alive.remove(&best);
        order.push(best);
    }
    order
}

/// Size of `Q(S, v)`: vertices outside `S ∪ {v}` reachable from `v` through
/// `S`. Equals the number of higher neighbors of `v` when `S` is eliminated
/// first.
fn q_size(g: &Graph, s: u32, v: Vertex) -> usize {
    let in_s = |u: Vertex| s & (1 << (u - 1)) != 0;
    let mut seen: u32 = 1 << (v - 1);
    let mut stack = vec![v];
    let mut count = 0;
    while let Some(x) = stack.pop() {
        for &u in g.neighbors(x) {
            let bit = 1 << (u - 1);
            if seen & bit != 0 {
                continue;
            }
            seen |= bit;
            if in_s(u) {
                stack.push(u);
            } else {
                count += 1;
            }
        }
    }
    count
}

fn exact_treewidth_ordering(g: &Graph) -> Vec<Vertex> {
    let n = g.vertex_count();
    let full: u32 = (1 << n) - 1;
    let size = full as usize + 1;
    let mut best = vec![usize::MAX; size];
    let mut last = vec![0 as Vertex; size];
    best[0] = 0;
    for s in 1..=full {
        for v in 1..=n {
            let bit = 1 << (v - 1);
            if s & bit == 0 {
                continue;
            }
            let rest = s ^ bit;
            let cand = best[rest as usize].max(q_size(g, rest, v));
            if cand < best[s as usize] {
                best[s as usize] = cand;
                last[s as usize] = v;
            }
        }
    }
    let mut order = Vec::with_capacity(n as usize);
    let mut s = full;
    while s != 0 {
        let v = last[s as usize];
        order.push(v);
        s ^= 1 << (v - 1);
    }
    order.reverse();
    order
}

/// Path decomposition from a linear vertex ordering: node `i` holds `v_i` and
/// every earlier vertex that still has a neighbor at `v_i` or later. Each
/// node introduces exactly one vertex.
pub fn path_decomposition_from_ordering(g: &Graph, order: &[Vertex]) -> TreeDecomposition {
    let mut pos = vec![0usize; g.vertex_count() as usize + 1];
    for (i, &v) in order.iter().enumerate() {
        pos[v as usize] = i;
    }
    let last_nbr: Vec<usize> = (0..=g.vertex_count())
        .map(|v| {
            if v == 0 {
                0
            } else {
                g.neighbors(v).iter().map(|&u| pos[u as usize]).max().unwrap_or(0)
            }
        })
        .collect();
    let bags = (0..order.len())
        .map(|i| {
            let mut bag: VertexSet =
                order[..i].iter().copied().filter(|&u| last_nbr[u as usize] >= i).collect();
            bag.insert(order[i]);
            bag
        })
        .collect();
    TreeDecomposition::path(bags)
}

fn boundary(g: &Graph, s: u32) -> usize {
    (1..=g.vertex_count())
        .filter(|&u| s & (1 << (u - 1)) != 0)
        .filter(|&u| g.neighbors(u).iter().any(|&w| s & (1 << (w - 1)) == 0))
        .count()
}

fn exact_path_ordering(g: &Graph) -> Vec<Vertex> {
    let n = g.vertex_count();
    let full: u32 = (1 << n) - 1;
    let size = full as usize + 1;
    let bnd: Vec<usize> = (0..size as u32).map(|s| boundary(g, s)).collect();
    let mut best = vec![usize::MAX; size];
    let mut last = vec![0 as Vertex; size];
    best[0] = 0;
    for s in 1..=full {
        for v in 1..=n {
            let bit = 1 << (v - 1);
            if s & bit == 0 {
                continue;
            }
            let rest = s ^ bit;
            let cand = best[rest as usize].max(bnd[rest as usize]);
            if cand < best[s as usize] {
                best[s as usize] = cand;
                last[s as usize] = v;
            }
        }
    }
    let mut order = Vec::with_capacity(n as usize);
    let mut s = full;
    while s != 0 {
        let v = last[s as usize];
        order.push(v);
        s ^= 1 << (v - 1);
    }
    order.reverse();
    order
}

fn greedy_path_ordering(g: &Graph) -> Vec<Vertex> {
    let n = g.vertex_count() as usize;
    let mut placed = vec![false; n + 1];
    let mut order = Vec::with_capacity(n);
    let boundary_with = |placed: &[bool], v: Vertex| {
        (1..=n as u32)
            .filter(|&u| placed[u as usize] || u == v)
            .filter(|&u| g.neighbors(u).iter().any(|&w| !placed[w as usize] && w != v))
            .count()
    };
    for _ in 0..n {
        // connected graphs: grow along edges so the boundary stays small
        let frontier: Vec<Vertex> = (1..=n as u32)
            .filter(|&v| !placed[v as usize])
            .filter(|&v| order.is_empty() || g.neighbors(v).iter().any(|&u| placed[u as usize]))
            .collect();
        let v = frontier
            .into_iter()
            .min_by_key(|&v| (boundary_with(&placed, v), v))
            .expect("connected graph has a frontier");
        placed[v as usize] = true;
        order.push(v);
    }
    order
}

/// Path decomposition in which every node introduces exactly one vertex.
/// Minimum width up to `exact_cap` vertices, greedy above.
pub fn compute_path_decomposition(
    g: &Graph,
    exact_cap: u32,
) -> Result<TreeDecomposition, DecompError> {
    if !g.is_connected() {
        return Err(DecompError::Disconnected);
    }
    let order = if g.vertex_count() <= exact_cap.min(24) {
        exact_path_ordering(g)
    } else {
        greedy_path_ordering(g)
    };
    Ok(path_decomposition_from_ordering(g, &order))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::validate_tree_decomposition;
    use crate::graph::named;
    use crate::perm::all_permutations;

    /// Oracle: minimum elimination width over all orderings.
    fn brute_force_treewidth(g: &Graph) -> usize {
        all_permutations(g.vertex_count() as usize)
            .iter()
            .map(|p| elimination_width(g, p.images()))
            .min()
            .unwrap()
    }

    /// Oracle: minimum vertex separation over all orderings.
    fn brute_force_pathwidth(g: &Graph) -> usize {
        all_permutations(g.vertex_count() as usize)
            .iter()
            .map(|p| path_decomposition_from_ordering(g, p.images()).width())
            .min()
            .unwrap()
    }

    fn corpus() -> Vec<Graph> {
        vec![
            named::path(1),
            named::path(2),
            named::path(5),
            named::cycle(3),
            named::cycle(5),
            named::cycle(7),
            named::complete(4),
            named::star(4),
            named::hypercube(3),
            Graph::parse("6 7\n1 2\n2 3\n3 1\n3 4\n4 5\n5 6\n6 4").unwrap(),
            Graph::parse("7 9\n1 2\n1 3\n2 3\n2 4\n3 5\n4 5\n4 6\n5 7\n6 7").unwrap(),
        ]
    }

    #[test]
    fn known_widths() {
        let exact = Strategy::ExactSmall { cap: DEFAULT_EXACT_CAP };
        for n in 2..8 {
            assert_eq!(compute_tree_decomposition(&named::path(n), exact).unwrap().width(), 1);
            assert_eq!(compute_tree_decomposition(&named::path(n), Strategy::MinFill).unwrap().width(), 1);
        }
        for n in 3..9 {
            let td = compute_tree_decomposition(&named::cycle(n), exact).unwrap();
            assert_eq!(td.width(), 2, "C{n}");
        }
        assert_eq!(compute_tree_decomposition(&named::complete(4), exact).unwrap().width(), 3);
        assert_eq!(
            compute_tree_decomposition(&named::complete(4), Strategy::MinFill).unwrap().width(),
            3
        );
    }

    #[test]
    fn cycles_have_no_width_one_decomposition() {
        for n in 3..8 {
            assert_eq!(brute_force_treewidth(&named::cycle(n)), 2);
        }
    }

    #[test]
    fn exact_matches_brute_force() {
        for g in corpus() {
            let td =
                compute_tree_decomposition(&g, Strategy::ExactSmall { cap: DEFAULT_EXACT_CAP }).unwrap();
            assert!(validate_tree_decomposition(&g, &td).is_valid());
            assert_eq!(td.width(), brute_force_treewidth(&g), "{g}");
            let mf = compute_tree_decomposition(&g, Strategy::MinFill).unwrap();
            assert!(validate_tree_decomposition(&g, &mf).is_valid());
            assert!(mf.width() >= td.width());
        }
    }

    #[test]
    fn path_decompositions() {
        for g in corpus() {
            let pd = compute_path_decomposition(&g, DEFAULT_EXACT_CAP).unwrap();
            assert!(pd.is_path_shaped());
            assert!(validate_tree_decomposition(&g, &pd).is_valid());
            assert_eq!(pd.width(), brute_force_pathwidth(&g), "{g}");
            assert_eq!(pd.len(), g.vertex_count() as usize);
            let greedy = path_decomposition_from_ordering(&g, &greedy_path_ordering(&g));
            assert!(validate_tree_decomposition(&g, &greedy).is_valid());
        }
        let p4 = compute_path_decomposition(&named::path(4), DEFAULT_EXACT_CAP).unwrap();
        assert_eq!(p4.width(), 1);
        let c4 = compute_path_decomposition(&named::cycle(4), DEFAULT_EXACT_CAP).unwrap();
        assert_eq!(c4.width(), 2);
        let k3 = compute_path_decomposition(&named::complete(3), DEFAULT_EXACT_CAP).unwrap();
        assert_eq!(k3.width(), 2);
    }

    #[test]
    fn disconnected_and_cap() {
        let d = named::discrete(3);
        assert_eq!(compute_tree_decomposition(&d, Strategy::MinFill), Err(DecompError::Disconnected));
        assert_eq!(compute_path_decomposition(&d, 10), Err(DecompError::Disconnected));
        assert!(matches!(
            compute_tree_decomposition(&named::path(12), Strategy::ExactSmall { cap: 10 }),
            Err(DecompError::TooLarge { vertices: 12, cap: 10 })
        ));
    }

    #[test]
    fn greedy_path_on_larger_graph() {
        let g = named::cycle(30);
        let pd = compute_path_decomposition(&g, 10).unwrap();
        assert!(validate_tree_decomposition(&g, &pd).is_valid());
        assert_eq!(pd.width(), 2);
    }
}
