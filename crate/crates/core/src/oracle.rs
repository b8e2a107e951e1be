//! Brute-force ground truth for graphs small enough to enumerate.

use std::collections::BTreeSet;

use rayon::prelude::*;
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::perm::Permutation;

pub const DEFAULT_ORACLE_CAP: u32 = 10;

pub type PermSet = BTreeSet<Permutation>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("graph has {vertices} vertices, oracle cap is {cap}")]
    TooLarge { vertices: u32, cap: u32 },
    #[error("prefix size {n} exceeds vertex count {m}")]
    PrefixTooLarge { n: usize, m: u32 },
    #[error("not a subgroup: {0}")]
    NotSubgroup(String),
    #[error("|G| = {big} is not divisible by |H| = {small}")]
    NotDivisible { big: usize, small: usize },
}

/// Vertex invariant used to prune candidate images: degree and the sorted
/// degrees of the neighbors.
fn signature(g: &Graph, v: Vertex) -> (usize, Vec<usize>) {
    let mut nd: Vec<usize> = g.neighbors(v).iter().map(|&u| g.degree(u)).collect();
    nd.sort_unstable();
    (g.degree(v), nd)
}

struct Search<'a> {
    g: &'a Graph,
    candidates: Vec<Vec<Vertex>>,
    image: Vec<Vertex>,
    used: Vec<bool>,
    found: Vec<Permutation>,
}

impl Search<'_> {
    fn fits(&self, v: Vertex, x: Vertex) -> bool {
        // every earlier vertex u < v is assigned
        (1..v).all(|u| self.g.is_adjacent(u, v) == self.g.is_adjacent(self.image[u as usize], x))
    }

    fn run(&mut self, v: Vertex) {
        let m = self.g.vertex_count();
        if v > m {
            self.found.push(Permutation::from_images(self.image[1..].to_vec()).unwrap());
            return;
        }
        for i in 0..self.candidates[v as usize].len() {
            let x = self.candidates[v as usize][i];
            if self.used[x as usize] || !self.fits(v, x) {
                continue;
            }
            self.used[x as usize] = true;
            self.image[v as usize] = x;
            self.run(v + 1);
            self.used[x as usize] = false;
        }
    }
}

/// Every adjacency- and non-adjacency-preserving bijection of `V(g)`.
pub fn brute_force_automorphisms(g: &Graph, cap: u32) -> Result<PermSet, OracleError> {
    let m = g.vertex_count();
    if m > cap {
        return Err(OracleError::TooLarge { vertices: m, cap });
    }
    let sigs: Vec<_> = g.vertices().map(|v| signature(g, v)).collect();
    let mut candidates = vec![Vec::new(); m as usize + 1];
    for v in g.vertices() {
        candidates[v as usize] =
            g.vertices().filter(|&x| sigs[(x - 1) as usize] == sigs[(v - 1) as usize]).collect();
    }
    let first = candidates[1].clone();
    let found: Vec<Permutation> = first
        .into_par_iter()
        .flat_map_iter(|x| {
            let mut s = Search {
                g,
                candidates: candidates.clone(),
                image: vec![0; m as usize + 1],
                used: vec![false; m as usize + 1],
                found: Vec::new(),
            };
            s.image[1] = x;
            s.used[x as usize] = true;
            s.run(2);
            s.found
        })
        .collect();
    Ok(found.into_iter().collect())
}

/// Outcome of restricting `Aut(g)` to the prefix `[n]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Restriction {
    /// `[n]` is invariant; the restricted group `Aut(g, [n])`.
    Invariant(PermSet),
    /// An automorphism that moves some element of `[n]` outside it.
    Violated(Permutation),
}

pub fn restricted_action(g: &Graph, n: usize, cap: u32) -> Result<Restriction, OracleError> {
    if n > g.vertex_count() as usize {
        return Err(OracleError::PrefixTooLarge { n, m: g.vertex_count() });
    }
    let aut = brute_force_automorphisms(g, cap)?;
    let mut out = PermSet::new();
    for sigma in &aut {
        let head = &sigma.images()[..n];
        if head.iter().any(|&x| x as usize > n) {
            return Ok(Restriction::Violated(sigma.clone()));
        }
        out.insert(Permutation::from_images(head.to_vec()).unwrap());
    }
    Ok(Restriction::Invariant(out))
}

/// Contains the identity and is closed under composition and inversion.
pub fn is_group(perms: &PermSet) -> bool {
    let Some(first) = perms.iter().next() else {
        return false;
    };
    let n = first.len();
    if perms.iter().any(|p| p.len() != n) || !perms.contains(&Permutation::identity(n)) {
        return false;
    }
    perms.iter().all(|a| {
        perms.contains(&a.inverse())
            && perms.iter().all(|b| perms.contains(&a.compose(b).unwrap()))
    })
}

fn check_subgroup(big: &PermSet, small: &PermSet) -> Result<(), OracleError> {
    if !is_group(big) {
        return Err(OracleError::NotSubgroup("the larger set is not a group".into()));
    }
    if !is_group(small) {
        return Err(OracleError::NotSubgroup("the smaller set is not a group".into()));
    }
    if let Some(p) = small.iter().find(|p| !big.contains(p)) {
        return Err(OracleError::NotSubgroup(format!("{p} is not in the larger group")));
    }
    Ok(())
}

/// `|G| / |H|`.
pub fn group_index(big: &PermSet, small: &PermSet) -> Result<usize, OracleError> {
    check_subgroup(big, small)?;
    if !big.len().is_multiple_of(small.len()) {
        return Err(OracleError::NotDivisible { big: big.len(), small: small.len() });
    }
    Ok(big.len() / small.len())
}

/// One representative per left coset `β ∘ H`, each the lexicographically
/// smallest element of its coset; the identity comes first.
pub fn left_transversal(big: &PermSet, small: &PermSet) -> Result<Vec<Permutation>, OracleError> {
    let index = group_index(big, small)?;
    let mut covered = PermSet::new();
    let mut reps = Vec::with_capacity(index);
    for beta in big {
        if covered.contains(beta) {
            continue;
        }
        for h in small {
            covered.insert(beta.compose(h).unwrap());
        }
        reps.push(beta.clone());
    }
    debug_assert_eq!(reps.len(), index);
    Ok(reps)
}

/// The left coset `β ∘ H`.
pub fn left_coset(beta: &Permutation, h: &PermSet) -> PermSet {
    h.iter().map(|g| beta.compose(g).unwrap()).collect()
}

pub fn symmetric_group(n: usize) -> PermSet {
    crate::perm::all_permutations(n).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named;
    use crate::perm::all_permutations;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    /// Independent check: filter all of S_m.
    fn naive_automorphisms(g: &Graph) -> PermSet {
        all_permutations(g.vertex_count() as usize)
            .into_iter()
            .filter(|s| {
                g.vertices().all(|u| {
                    g.vertices().all(|v| g.is_adjacent(u, v) == g.is_adjacent(s.apply(u), s.apply(v)))
                })
            })
            .collect()
    }

    #[test]
    fn group_orders() {
        let cases = [
            (named::path(3), 2),
            (named::path(4), 2),
            (named::cycle(4), 8),
            (named::cycle(5), 10),
            (named::cycle(6), 12),
            (named::complete(4), 24),
            (named::star(4), 24),
            (named::hypercube(3), 48),
            (named::discrete(3), 6),
        ];
        for (g, order) in cases {
            let aut = brute_force_automorphisms(&g, DEFAULT_ORACLE_CAP).unwrap();
            assert_eq!(aut, naive_automorphisms(&g), "{g}");
            assert_eq!(aut.len(), order, "{g}");
            assert!(is_group(&aut));
        }
    }

    #[test]
    fn petersen_has_120() {
        let aut = brute_force_automorphisms(&named::petersen(), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(aut.len(), 120);
        assert!(is_group(&aut));
    }

    #[test]
    fn automorphisms_preserve_edges_and_non_edges() {
        for g in [named::hypercube(3), named::cycle(6), named::petersen()] {
            let aut = brute_force_automorphisms(&g, DEFAULT_ORACLE_CAP).unwrap();
            for s in &aut {
                for u in g.vertices() {
                    for v in g.vertices() {
                        assert_eq!(g.is_adjacent(u, v), g.is_adjacent(s.apply(u), s.apply(v)));
                    }
                }
            }
        }
    }

    #[test]
    fn cap_enforced() {
        assert_eq!(
            brute_force_automorphisms(&named::path(11), 10),
            Err(OracleError::TooLarge { vertices: 11, cap: 10 })
        );
    }

    #[test]
    fn restrictions() {
        match restricted_action(&named::star(4), 4, 10).unwrap() {
            Restriction::Invariant(h) => assert_eq!(h, symmetric_group(4)),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            restricted_action(&named::path(3), 2, 10).unwrap(),
            Restriction::Violated(p("3 2 1"))
        );
        let c5 = named::cycle(5);
        assert_eq!(
            restricted_action(&c5, 5, 10).unwrap(),
            Restriction::Invariant(brute_force_automorphisms(&c5, 10).unwrap())
        );
    }

    #[test]
    fn indices_and_transversals() {
        let s4 = symmetric_group(4);
        let d4 = brute_force_automorphisms(&named::cycle(4), 10).unwrap();
        assert_eq!(group_index(&s4, &d4).unwrap(), 3);
        assert_eq!(group_index(&d4, &d4).unwrap(), 1);
        let s3 = symmetric_group(3);
        let t: PermSet = [Permutation::identity(3), p("2 1 3")].into_iter().collect();
        assert_eq!(group_index(&s3, &t).unwrap(), 3);

        let reps = left_transversal(&s4, &d4).unwrap();
        assert_eq!(reps.len(), 3);
        assert!(reps[0].is_identity());
        let mut union = PermSet::new();
        for r in &reps {
            let coset = left_coset(r, &d4);
            assert!(union.is_disjoint(&coset));
            union.extend(coset);
        }
        assert_eq!(union, s4);

        assert_eq!(left_transversal(&d4, &d4).unwrap(), vec![Permutation::identity(4)]);
        let trivial: PermSet = [Permutation::identity(3)].into_iter().collect();
        assert_eq!(left_transversal(&s3, &trivial).unwrap().len(), 6);
    }

    #[test]
    fn group_checks() {
        let id: PermSet = [Permutation::identity(3)].into_iter().collect();
        assert!(is_group(&id));
        let swap: PermSet = [Permutation::identity(3), p("2 1 3")].into_iter().collect();
        assert!(is_group(&swap));
        let rot: PermSet = [Permutation::identity(3), p("2 3 1")].into_iter().collect();
        assert!(!is_group(&rot));
        assert!(matches!(group_index(&swap, &rot), Err(OracleError::NotSubgroup(_))));
        assert!(!is_group(&PermSet::new()));
    }
}
