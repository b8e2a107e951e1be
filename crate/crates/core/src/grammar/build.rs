//! Grammars whose language is the one-line strings of an automorphism group.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{eliminate_unit_rules, erase_terminals, rename_terminals};
use super::{Grammar, GrammarError, Provenance, Rule, Symbol};
use crate::annotate::{
    annotated_bag_table, consistency_lists, consistent_bags, enumerate_annotated_bags,
    AnnotatedBag,
};
use crate::decomp::{
    ensure_valid, make_permutation_yielding, DecompError, Position, TreeDecomposition, YieldOrder,
};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::oracle::{restricted_action, Restriction};
use crate::perm::Permutation;

/// A grammar `gr` together with the permutation `alpha` such that
/// `L(gr) = { Perm(str(σ), alpha) : σ in the group }`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutGrammar {
    pub alpha: Permutation,
    pub grammar: Grammar,
    /// Leaf order of the decomposition used, when it was a tree.
    pub yield_order: Option<YieldOrder>,
}

fn provenance_of(position: &str, b: &AnnotatedBag) -> Provenance {
    Provenance {
        position: position.to_string(),
        bag: b.s.as_slice().to_vec(),
        phi: b.pairs().collect(),
    }
}

fn var_name(position: &str, k: usize) -> String {
    format!("p:{position}|b:{k}")
}

/// Grammar over annotated bags of a permutation-yielding decomposition.
///
/// Variables are `B1` followed by `(position, annotated bag)` pairs in
/// preorder, bags in canonical order. The returned `alpha` is the leaf
/// order `α_t` (`v_1 ... v_n`), since the yield of the parse tree of `σ` is
/// `σ(v_1) ... σ(v_n)`.
pub fn build_aut_grammar(g: &Graph, td: &TreeDecomposition) -> Result<AutGrammar, GrammarError> {
    if !g.is_connected() {
        return Err(GrammarError::Disconnected);
    }
    ensure_valid(g, td)?;
    let order = YieldOrder::of(g, td)?;
    let table = annotated_bag_table(g, td)?;
    let cons = consistency_lists(td, &table);

    let preorder = td.preorder();
    let mut var_of: Vec<Vec<usize>> = vec![Vec::new(); td.len()];
    let mut variables = vec!["B1".to_string()];
    let mut provenance = BTreeMap::new();
    for &id in &preorder {
        let pos = td.position(id).to_string();
        for (k, b) in table[id].iter().enumerate() {
            var_of[id].push(variables.len());
            let name = var_name(&pos, k);
            provenance.insert(name.clone(), provenance_of(&pos, b));
            variables.push(name);
        }
    }

    let mut rules: Vec<Rule> = var_of[td.root()]
        .iter()
        .map(|&v| Rule::new(0, vec![Symbol::Var(v)]))
        .collect();
    let per_node: Vec<Vec<Rule>> = preorder
        .par_iter()
        .map(|&id| {
            let mut out = Vec::new();
            let children = td.children(id);
            for (k, b) in table[id].iter().enumerate() {
                let lhs = var_of[id][k];
                if children.is_empty() {
                    let v = td.bag(id).as_slice()[0];
                    out.push(Rule::new(lhs, vec![Symbol::Terminal(b.phi(v).expect("v in domain"))]));
                    continue;
                }
                let lists = &cons[id][k];
                if lists.iter().any(|l| l.is_empty()) {
                    continue;
                }
                let mut idx = vec![0usize; lists.len()];
                loop {
                    let rhs = children
                        .iter()
                        .zip(lists)
                        .zip(&idx)
                        .map(|((&c, l), &i)| Symbol::Var(var_of[c][l[i]]))
                        .collect();
                    out.push(Rule::new(lhs, rhs));
                    if !advance(&mut idx, lists.iter().map(|l| l.len())) {
                        break;
                    }
                }
            }
            out
        })
        .collect();
    rules.extend(per_node.into_iter().flatten());

    let grammar = Grammar::new(g.vertex_count(), variables, 0, rules)?
        .with_provenance(provenance)
        .trimmed();
    Ok(AutGrammar { alpha: order.alpha_t.clone(), grammar, yield_order: Some(order) })
}

/// Odometer step, last digit fastest. Returns false after the last tuple.
fn advance(idx: &mut [usize], radices: impl Iterator<Item = usize>) -> bool {
    let radices: Vec<usize> = radices.collect();
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < radices[k] {
            return true;
        }
        idx[k] = 0;
    }
    false
}

/// Regular grammar from a path decomposition.
///
/// The path is first refined so that node `i` introduces exactly one vertex
/// `v_i`. Variable `(i, b)` emits `φ_b(v_i)` and moves on to a consistent
/// annotated bag of node `i + 1`; the singleton leaves of the tree
/// construction are folded into these rules because their annotation is the
/// restriction of the parent's.
pub fn build_regular_aut_grammar(
    g: &Graph,
    pd: &TreeDecomposition,
) -> Result<AutGrammar, GrammarError> {
    if !g.is_connected() {
        return Err(GrammarError::Disconnected);
    }
    if !pd.is_path_shaped() {
        return Err(DecompError::NotPath.into());
    }
    ensure_valid(g, pd)?;
    let (bags, introduced) = one_vertex_per_node(pd);

    let table: Vec<Vec<AnnotatedBag>> = bags
        .par_iter()
        .map(|s| enumerate_annotated_bags(g, s))
        .collect::<Result<_, _>>()?;
    let n = bags.len();

    let mut var_of: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut variables = vec!["B1".to_string()];
    let mut provenance = BTreeMap::new();
    var_of[0] = vec![0; table[0].len()];
    for i in 1..n {
        let pos = Position(vec![1; i]).to_string();
        for (k, b) in table[i].iter().enumerate() {
            var_of[i].push(variables.len());
            let name = var_name(&pos, k);
            provenance.insert(name.clone(), provenance_of(&pos, b));
            variables.push(name);
        }
    }

    let per_node: Vec<Vec<Rule>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = Vec::new();
            let v = introduced[i];
            for (k, b) in table[i].iter().enumerate() {
                let a = Symbol::Terminal(b.phi(v).expect("v in domain"));
                let lhs = var_of[i][k];
                if i + 1 == n {
                    out.push(Rule::new(lhs, vec![a]));
                    continue;
                }
                for (k2, b2) in table[i + 1].iter().enumerate() {
                    if consistent_bags(b, b2) {
                        out.push(Rule::new(lhs, vec![a, Symbol::Var(var_of[i + 1][k2])]));
                    }
                }
            }
            out
        })
        .collect();
    let rules = per_node.into_iter().flatten().collect();
    let grammar = Grammar::new(g.vertex_count(), variables, 0, rules)?
        .with_provenance(provenance)
        .trimmed();
    let alpha = Permutation::from_images(introduced)
        .map_err(|e| GrammarError::Malformed(e.to_string()))?;
    Ok(AutGrammar { alpha, grammar, yield_order: None })
}

/// Bags of the refined path and the vertex each one introduces.
fn one_vertex_per_node(pd: &TreeDecomposition) -> (Vec<VertexSet>, Vec<Vertex>) {
    let mut bags = Vec::new();
    let mut introduced = Vec::new();
    let mut prev = VertexSet::new();
    let mut cur = Some(pd.root());
    while let Some(id) = cur {
        let bag = pd.bag(id);
        let mut acc = prev.intersection(bag);
        for v in bag.iter().filter(|&v| !prev.contains(v)) {
            acc.insert(v);
            bags.push(acc.clone());
            introduced.push(v);
        }
        prev = bag.clone();
        cur = pd.children(id).first().copied();
    }
    (bags, introduced)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvarianceCheck {
    /// Verify with the brute-force oracle, refusing graphs above `cap`.
    Oracle { cap: u32 },
    /// The caller asserts that `[n]` is invariant.
    Unchecked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbedOptions {
    pub check: InvarianceCheck,
    /// Use the regular construction; the decomposition must be a path.
    pub regular: bool,
}

/// Grammar for `Perm(str(β ∘ Aut(g, [n])), α)` where `α` is the leaf order
/// restricted to `[n]`: the subsequence of `α'`'s one-line form with entries
/// at most `n`.
pub fn build_embedded_group_grammar(
    g: &Graph,
    n: usize,
    beta: &Permutation,
    td: &TreeDecomposition,
    opts: EmbedOptions,
) -> Result<AutGrammar, GrammarError> {
    if !g.is_connected() {
        return Err(GrammarError::Disconnected);
    }
    let m = g.vertex_count() as usize;
    if n == 0 || n > m {
        return Err(GrammarError::Malformed(format!("prefix size {n} outside 1..={m}")));
    }
    if beta.len() != n {
        return Err(GrammarError::Malformed(format!(
            "beta has {} points, prefix has {n}",
            beta.len()
        )));
    }
    if let InvarianceCheck::Oracle { cap } = opts.check {
        if let Restriction::Violated(witness) = restricted_action(g, n, cap)? {
            return Err(GrammarError::NotInvariant { n, witness });
        }
    }
    let base = if opts.regular {
        build_regular_aut_grammar(g, td)?
    } else {
        let (yielding, _) = make_permutation_yielding(g, td)?;
        build_aut_grammar(g, &yielding)?
    };
    let mut erased = erase_terminals(&base.grammar, n as u32)?;
    if opts.regular {
        erased = eliminate_unit_rules(&erased)?;
    }
    let grammar = rename_terminals(&erased, beta)?;
    let alpha = base.alpha.images().iter().copied().filter(|&x| x as usize <= n).collect();
    let alpha = Permutation::from_images(alpha).map_err(|e| GrammarError::Malformed(e.to_string()))?;
    Ok(AutGrammar { alpha, grammar, yield_order: base.yield_order })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{compute_path_decomposition, compute_tree_decomposition, Strategy};
    use crate::graph::named;
    use crate::oracle::{brute_force_automorphisms, DEFAULT_ORACLE_CAP};
    use crate::perm::Word;
    use num_bigint::BigUint;

    fn yielding(g: &Graph) -> TreeDecomposition {
        let td = compute_tree_decomposition(g, Strategy::MinFill).unwrap();
        make_permutation_yielding(g, &td).unwrap().0
    }

    fn words(gr: &Grammar) -> Vec<Word> {
        gr.enumerate_language(None).unwrap().words
    }

    /// `{Perm(str(σ), α)}` over the brute-force group, sorted.
    fn expected(g: &Graph, alpha: &Permutation) -> Vec<Word> {
        let mut w: Vec<Word> = brute_force_automorphisms(g, DEFAULT_ORACLE_CAP)
            .unwrap()
            .iter()
            .map(|s| s.to_word().permute(alpha).unwrap())
            .collect();
        w.sort();
        w
    }

    #[test]
    fn corpus_languages_match_oracle() {
        let corpus = [
            (named::path(3), 2),
            (named::path(4), 2),
            (named::cycle(4), 8),
            (named::cycle(5), 10),
            (named::star(3), 6),
            (named::complete(4), 24),
        ];
        for (g, size) in corpus {
            let out = build_aut_grammar(&g, &yielding(&g)).unwrap();
            let l = words(&out.grammar);
            assert_eq!(l.len(), size, "{g}");
            assert_eq!(l, expected(&g, &out.alpha), "{g}");
            assert_eq!(out.grammar.count_parse_trees().unwrap(), BigUint::from(size));
            assert!(out.grammar.is_acyclic());
        }
    }

    #[test]
    fn membership_examples_c4() {
        let g = named::cycle(4);
        let out = build_aut_grammar(&g, &yielding(&g)).unwrap();
        let rot: Permutation = "2 3 4 1".parse().unwrap();
        let bad: Permutation = "2 1 3 4".parse().unwrap();
        let w = |p: &Permutation| p.to_word().permute(&out.alpha).unwrap();
        assert!(out.grammar.membership(&w(&rot)).unwrap());
        assert!(!out.grammar.membership(&w(&bad)).unwrap());
        assert!(!out.grammar.membership(&Word::new(vec![1, 2, 3])).unwrap());
        for x in words(&out.grammar) {
            assert!(out.grammar.membership(&x).unwrap());
        }
    }

    #[test]
    fn rejects_bad_input() {
        let g = named::discrete(3);
        let td = TreeDecomposition::with_root([1, 2, 3].into_iter().collect());
        assert_eq!(build_aut_grammar(&g, &td), Err(GrammarError::Disconnected));
        let p3 = named::path(3);
        let td = TreeDecomposition::path(vec![
            [1, 2].into_iter().collect(),
            [2, 3].into_iter().collect(),
        ]);
        assert!(matches!(
            build_aut_grammar(&p3, &td),
            Err(GrammarError::Decomp(DecompError::NotYielding(_)))
        ));
        assert!(matches!(
            build_regular_aut_grammar(&p3, &yielding(&p3)),
            Err(GrammarError::Decomp(DecompError::NotPath))
        ));
    }

    #[test]
    fn variable_names_and_provenance() {
        let g = named::path(3);
        let out = build_aut_grammar(&g, &yielding(&g)).unwrap();
        let gr = &out.grammar;
        assert_eq!(gr.variables()[0], "B1");
        assert!(gr.variables()[1..].iter().all(|v| v.starts_with("p:r")));
        assert_eq!(gr.provenance().len(), gr.variable_count() - 1);
        let back = Grammar::from_json(&gr.to_json()).unwrap();
        assert_eq!(&back, gr);
    }

    #[test]
    fn regular_construction() {
        for g in [named::path(4), named::cycle(4), named::cycle(5), named::star(3)] {
            let pd = compute_path_decomposition(&g, 10).unwrap();
            let reg = build_regular_aut_grammar(&g, &pd).unwrap();
            assert!(reg.grammar.is_regular());
            assert_eq!(words(&reg.grammar), expected(&g, &reg.alpha), "{g}");
            let tree = build_aut_grammar(&g, &yielding(&g)).unwrap();
            let pull = |a: &AutGrammar| {
                let inv = a.alpha.inverse();
                let mut v: Vec<Word> =
                    words(&a.grammar).iter().map(|w| w.permute(&inv).unwrap()).collect();
                v.sort();
                v
            };
            assert_eq!(pull(&reg), pull(&tree));
        }
    }

    #[test]
    fn refinement_introduces_one_vertex_per_node() {
        let pd = TreeDecomposition::path(vec![
            [1, 2, 3].into_iter().collect(),
            [3, 4].into_iter().collect(),
        ]);
        let (bags, intro) = one_vertex_per_node(&pd);
        assert_eq!(intro, vec![1, 2, 3, 4]);
        assert_eq!(bags[3].as_slice(), &[3, 4]);
        assert_eq!(bags[1].as_slice(), &[1, 2]);
    }

    #[test]
    fn embedding_in_star() {
        let g = named::star(4);
        let td = compute_tree_decomposition(&g, Strategy::MinFill).unwrap();
        let opts = EmbedOptions { check: InvarianceCheck::Oracle { cap: 10 }, regular: false };
        let out = build_embedded_group_grammar(&g, 4, &Permutation::identity(4), &td, opts).unwrap();
        let l = words(&out.grammar);
        assert_eq!(l.len(), 24);
        assert_eq!(out.grammar.count_parse_trees().unwrap(), BigUint::from(24u32));
        let beta: Permutation = "2 1 3 4".parse().unwrap();
        let moved = build_embedded_group_grammar(&g, 4, &beta, &td, opts).unwrap();
        assert_eq!(words(&moved.grammar), l);

        let pd = compute_path_decomposition(&g, 10).unwrap();
        let reg = build_embedded_group_grammar(
            &g,
            4,
            &Permutation::identity(4),
            &pd,
            EmbedOptions { regular: true, ..opts },
        )
        .unwrap();
        assert!(reg.grammar.is_regular());
        assert_eq!(words(&reg.grammar).len(), 24);
    }

    #[test]
    fn embedding_full_prefix_matches_plain_build() {
        let g = named::cycle(4);
        let td = yielding(&g);
        let opts = EmbedOptions { check: InvarianceCheck::Unchecked, regular: false };
        let e = build_embedded_group_grammar(&g, 4, &Permutation::identity(4), &td, opts).unwrap();
        let plain = build_aut_grammar(&g, &td).unwrap();
        assert_eq!(e.grammar, plain.grammar);
        assert_eq!(e.alpha, plain.alpha);
    }

    #[test]
    fn non_invariant_prefix_refused() {
        let g = named::path(3);
        let td = yielding(&g);
        let opts = EmbedOptions { check: InvarianceCheck::Oracle { cap: 10 }, regular: false };
        let err = build_embedded_group_grammar(&g, 2, &Permutation::identity(2), &td, opts);
        assert!(matches!(err, Err(GrammarError::NotInvariant { n: 2, .. })));
    }
}
