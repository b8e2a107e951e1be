//! PACE 2017 `.td` files.

use std::collections::BTreeMap;

use super::{DecompError, TreeDecomposition};
use crate::graph::VertexSet;

/// Parses a `.td` file and roots the tree at bag 1. Children of a bag are
/// ordered by bag id.
pub fn parse_pace(text: &str) -> Result<TreeDecomposition, DecompError> {
    let err = |line: usize, reason: &str| DecompError::Pace { line, reason: reason.into() };
    let mut header: Option<(usize, usize, usize)> = None;
    let mut bags: BTreeMap<usize, VertexSet> = BTreeMap::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let toks: Vec<&str> = raw.split_whitespace().collect();
        match toks.first() {
            None | Some(&"c") => continue,
            Some(&"s") => {
                if toks.len() != 5 || toks[1] != "td" {
                    return Err(err(line, "expected `s td <bags> <width+1> <vertices>`"));
                }
                let nums: Result<Vec<usize>, _> = toks[2..].iter().map(|t| t.parse()).collect();
                let nums = nums.map_err(|_| err(line, "non-numeric header field"))?;
                header = Some((nums[0], nums[1], nums[2]));
            }
            Some(&"b") => {
                if header.is_none() {
                    return Err(err(line, "bag before header"));
                }
                let id: usize = toks
                    .get(1)
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| err(line, "missing bag id"))?;
                let verts: Result<Vec<u32>, _> = toks[2..].iter().map(|t| t.parse()).collect();
                let verts = verts.map_err(|_| err(line, "non-numeric vertex"))?;
                if bags.insert(id, verts.into()).is_some() {
                    return Err(err(line, "duplicate bag id"));
                }
            }
            Some(_) => {
                if toks.len() != 2 {
                    return Err(err(line, "expected a tree edge `<id> <id>`"));
                }
                let a = toks[0].parse().map_err(|_| err(line, "non-numeric bag id"))?;
                let b = toks[1].parse().map_err(|_| err(line, "non-numeric bag id"))?;
                edges.push((a, b));
            }
        }
    }
    let (nbags, width_plus_one, _nverts) = header.ok_or_else(|| err(1, "missing header"))?;
    if bags.len() != nbags || bags.keys().copied().ne(1..=nbags) {
        return Err(err(0, "bag ids must be exactly 1..=<#bags>"));
    }
    if bags.values().any(|b| b.len() > width_plus_one) {
        return Err(err(0, "bag larger than announced width + 1"));
    }
    if edges.len() + 1 != nbags {
        return Err(err(0, "a tree on n bags has n - 1 edges"));
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nbags + 1];
    for &(a, b) in &edges {
        if a == 0 || b == 0 || a > nbags || b > nbags {
            return Err(err(0, "tree edge references unknown bag"));
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut td = TreeDecomposition::with_root(bags[&1].clone());
    let mut node_of = vec![usize::MAX; nbags + 1];
    node_of[1] = td.root();
    let mut stack = vec![1usize];
    let mut visited = 1;
    while let Some(b) = stack.pop() {
        for &c in &adj[b] {
            if node_of[c] == usize::MAX {
                node_of[c] = td.add_child(node_of[b], bags[&c].clone());
                visited += 1;
                stack.push(c);
            }
        }
    }
    if visited != nbags {
        return Err(err(0, "tree edges do not connect all bags"));
    }
    Ok(td.renumbered())
}

/// Writes a `.td` file; bag ids are preorder indices starting at 1.
pub fn write_pace(td: &TreeDecomposition, vertex_count: u32) -> String {
    let td = td.renumbered();
    let mut out = format!("s td {} {} {}\n", td.len(), td.width() + 1, vertex_count);
    for id in 0..td.len() {
        out.push_str(&format!("b {}", id + 1));
        for v in td.bag(id).iter() {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    for id in 0..td.len() {
        for &c in td.children(id) {
            out.push_str(&format!("{} {}\n", id + 1, c + 1));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{compute_tree_decomposition, validate_tree_decomposition, Strategy};
    use crate::graph::named;

    #[test]
    fn parses_small_file() {
        let text = "c example\ns td 3 2 4\nb 1 1 2\nb 2 2 3\nb 3 3 4\n1 2\n2 3\n";
        let td = parse_pace(text).unwrap();
        assert_eq!(td.len(), 3);
        assert!(td.is_path_shaped());
        assert!(validate_tree_decomposition(&named::path(4), &td).is_valid());
    }

    #[test]
    fn reroots_at_bag_one() {
        let text = "s td 3 2 4\nb 1 3 4\nb 2 2 3\nb 3 1 2\n3 2\n2 1\n";
        let td = parse_pace(text).unwrap();
        assert_eq!(td.bag(td.root()).as_slice(), &[3, 4]);
        assert!(validate_tree_decomposition(&named::path(4), &td).is_valid());
    }

    #[test]
    fn round_trip() {
        let g = named::hypercube(3);
        let td = compute_tree_decomposition(&g, Strategy::MinFill).unwrap();
        let text = write_pace(&td, g.vertex_count());
        let back = parse_pace(&text).unwrap();
        assert_eq!(back, td.renumbered());
        assert_eq!(write_pace(&back, 8), text);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(parse_pace("b 1 1\n").is_err());
        assert!(parse_pace("s td 2 2 3\nb 1 1 2\nb 2 2 3\n").is_err());
        assert!(parse_pace("s td 2 1 3\nb 1 1 2\nb 2 2 3\n1 2\n").is_err());
        assert!(parse_pace("s td 2 2 3\nb 1 1 2\nb 3 2 3\n1 3\n").is_err());
    }
}
