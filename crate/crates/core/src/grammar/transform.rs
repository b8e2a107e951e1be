//! Language-level operations: renaming, erasure, union and coset unions.

use std::collections::BTreeMap;

use super::{Grammar, GrammarError, Rule, Symbol};
use crate::perm::Permutation;

/// Applies `b` to every terminal. Rule shapes are untouched, so the size is
/// unchanged whenever `b` acts on exactly `{1, ..., sigma_max}`.
pub fn rename_terminals(gr: &Grammar, b: &Permutation) -> Result<Grammar, GrammarError> {
    let mut rules = Vec::with_capacity(gr.rules.len());
    for r in &gr.rules {
        let mut rhs = Vec::with_capacity(r.rhs.len());
        for s in &r.rhs {
            rhs.push(match *s {
                Symbol::Terminal(t) if t as usize > b.len() => {
                    return Err(GrammarError::UndefinedTerminal(t))
                }
                Symbol::Terminal(t) => Symbol::Terminal(b.apply(t)),
                v => v,
            });
        }
        rules.push(Rule { lhs: r.lhs, rhs });
    }
    Ok(Grammar {
        sigma_max: gr.sigma_max.max(b.len() as u32),
        variables: gr.variables.clone(),
        start: gr.start,
        rules,
        accepts_empty: gr.accepts_empty,
        provenance: gr.provenance.clone(),
    })
}

/// Erases every terminal above `keep` and removes the resulting ε-rules. If
/// the empty word survives it is recorded in `accepts_empty`.
pub fn erase_terminals(gr: &Grammar, keep: u32) -> Result<Grammar, GrammarError> {
    let order = gr.topological_order()?;
    if keep >= gr.sigma_max {
        return Ok(gr.clone());
    }
    let nv = gr.variable_count();
    let by_lhs = gr.rules_by_lhs();
    let kept = |s: &Symbol| !matches!(*s, Symbol::Terminal(t) if t > keep);

    let mut nullable = vec![false; nv];
    let mut nonempty = vec![false; nv];
    for &v in order.iter().rev() {
        for &ri in &by_lhs[v] {
            let rhs: Vec<Symbol> = gr.rules[ri].rhs.iter().copied().filter(kept).collect();
            let usable = rhs.iter().all(|s| match *s {
                Symbol::Var(u) => nullable[u] || nonempty[u],
                Symbol::Terminal(_) => true,
            });
            if !usable {
                continue;
            }
            if rhs.iter().all(|s| matches!(*s, Symbol::Var(u) if nullable[u])) {
                nullable[v] = true;
            }
            if rhs.iter().any(|s| match *s {
                Symbol::Var(u) => nonempty[u],
                Symbol::Terminal(_) => true,
            }) {
                nonempty[v] = true;
            }
        }
    }

    let mut rules = Vec::new();
    for r in &gr.rules {
        let rhs: Vec<Symbol> = r.rhs.iter().copied().filter(kept).collect();
        // per symbol: the variants it can take (Some = kept, None = dropped)
        let mut options: Vec<Vec<Option<Symbol>>> = Vec::with_capacity(rhs.len());
        for s in &rhs {
            let mut o = Vec::new();
            match *s {
                Symbol::Terminal(_) => o.push(Some(*s)),
                Symbol::Var(u) => {
                    if nonempty[u] {
                        o.push(Some(*s));
                    }
                    if nullable[u] {
                        o.push(None);
                    }
                }
            }
            options.push(o);
        }
        if options.iter().any(|o| o.is_empty()) {
            continue;
        }
        let mut idx = vec![0usize; options.len()];
        loop {
            let variant: Vec<Symbol> =
                idx.iter().zip(&options).filter_map(|(&i, o)| o[i]).collect();
            if !variant.is_empty() {
                rules.push(Rule { lhs: r.lhs, rhs: variant });
            }
            let mut k = options.len();
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < options[k].len() {
                    break;
                }
                idx[k] = 0;
            }
            if idx.iter().all(|&i| i == 0) {
                break;
            }
        }
    }
    let out = Grammar {
        sigma_max: keep,
        variables: gr.variables.clone(),
        start: gr.start,
        rules,
        accepts_empty: gr.accepts_empty || nullable[gr.start],
        provenance: gr.provenance.clone(),
    };
    Ok(out.trimmed())
}

/// Replaces unit rules `A → B` by copies of the rules of `B`. Parse trees
/// correspond one to one, so counts are preserved.
pub fn eliminate_unit_rules(gr: &Grammar) -> Result<Grammar, GrammarError> {
    let order = gr.topological_order()?;
    let by_lhs = gr.rules_by_lhs();
    let mut expanded: Vec<Vec<Vec<Symbol>>> = vec![Vec::new(); gr.variable_count()];
    for &v in order.iter().rev() {
        let mut list = Vec::new();
        for &ri in &by_lhs[v] {
            match gr.rules[ri].rhs.as_slice() {
                [Symbol::Var(u)] => list.extend(expanded[*u].iter().cloned()),
                rhs => list.push(rhs.to_vec()),
            }
        }
        expanded[v] = list;
    }
    let rules = expanded
        .into_iter()
        .enumerate()
        .flat_map(|(lhs, list)| list.into_iter().map(move |rhs| Rule { lhs, rhs }))
        .collect();
    let out = Grammar { rules, ..gr.clone() };
    Ok(out.trimmed())
}

/// A fresh start `B1` with one unit rule per operand; operand variables are
/// renamed apart with the prefix `<k>/`.
pub fn union_all(grammars: &[Grammar]) -> Result<Grammar, GrammarError> {
    let Some(first) = grammars.first() else {
        return Err(GrammarError::Malformed("union of no grammars".into()));
    };
    let mut variables = vec!["B1".to_string()];
    let mut rules = Vec::new();
    let mut provenance = BTreeMap::new();
    let mut accepts_empty = false;
    for (k, g) in grammars.iter().enumerate() {
        if g.sigma_max != first.sigma_max {
            return Err(GrammarError::AlphabetMismatch { left: first.sigma_max, right: g.sigma_max });
        }
        let offset = variables.len();
        let prefix = format!("{}/", k + 1);
        variables.extend(g.variables.iter().map(|n| format!("{prefix}{n}")));
        rules.push(Rule { lhs: 0, rhs: vec![Symbol::Var(offset + g.start)] });
        accepts_empty |= g.accepts_empty;
        for (name, p) in &g.provenance {
            provenance.insert(format!("{prefix}{name}"), p.clone());
        }
    }
    let mut offset = 1;
    for g in grammars {
        for r in &g.rules {
            rules.push(Rule {
                lhs: offset + r.lhs,
                rhs: r
                    .rhs
                    .iter()
                    .map(|s| match *s {
                        Symbol::Var(v) => Symbol::Var(offset + v),
                        t => t,
                    })
                    .collect(),
            });
        }
        offset += g.variable_count();
    }
    Ok(Grammar {
        sigma_max: first.sigma_max,
        variables,
        start: 0,
        rules,
        accepts_empty,
        provenance,
    })
}

pub fn union_grammar(g1: &Grammar, g2: &Grammar) -> Result<Grammar, GrammarError> {
    union_all(&[g1.clone(), g2.clone()])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CosetGrammar {
    pub grammar: Grammar,
    /// Pairs of representatives found to share a left coset.
    pub warnings: Vec<String>,
}

/// `⋃_{β ∈ T} β(L(grH))`: one renamed copy per representative joined under a
/// fresh start.
///
/// Two representatives `β_i, β_j` share a coset exactly when renaming a word
/// of `L(grH)` by `β_i⁻¹ β_j` lands back in `L(grH)`; such pairs are reported.
pub fn group_from_subgroup(
    gr_h: &Grammar,
    transversal: &[Permutation],
) -> Result<CosetGrammar, GrammarError> {
    let copies = transversal
        .iter()
        .map(|b| rename_terminals(gr_h, b))
        .collect::<Result<Vec<_>, _>>()?;
    let mut warnings = Vec::new();
    if let Some(w) = gr_h.some_word()?.filter(|w| !w.is_empty()) {
        for i in 0..transversal.len() {
            for j in i + 1..transversal.len() {
                let (bi, bj) = (&transversal[i], &transversal[j]);
                if bi.len() != bj.len() {
                    continue;
                }
                let gamma = bi.inverse().compose(bj).expect("equal lengths");
                if w.symbols().iter().any(|&x| x as usize > gamma.len()) {
                    continue;
                }
                if gr_h.membership(&w.map_symbols(|x| gamma.apply(x)))? {
                    warnings.push(format!(
                        "representatives {bi} and {bj} lie in the same left coset"
                    ));
                }
            }
        }
    }
    let grammar = match copies.len() {
        1 => copies.into_iter().next().unwrap(),
        _ => union_all(&copies)?,
    };
    Ok(CosetGrammar { grammar, warnings })
}

#[cfg(test)]
mod tests {
    use super::super::tests::toy;
    use super::*;
    use crate::perm::Word;
    use num_bigint::BigUint;
    use Symbol::{Terminal as T, Var as V};

    fn words(g: &Grammar) -> Vec<Vec<u32>> {
        g.enumerate_language(None)
            .unwrap()
            .words
            .into_iter()
            .map(|w| w.into_symbols())
            .collect()
    }

    #[test]
    fn rename_identity_and_size() {
        let g = toy(&[(0, &[T(1), V(1)]), (1, &[T(2)]), (1, &[T(3)])], 3, 2);
        assert_eq!(rename_terminals(&g, &Permutation::identity(3)).unwrap(), g);
        let b: Permutation = "3 1 2".parse().unwrap();
        let r = rename_terminals(&g, &b).unwrap();
        assert_eq!(r.size().to_bits(), g.size().to_bits());
        assert_eq!(words(&r), vec![vec![3, 1], vec![3, 2]]);
        assert_eq!(
            rename_terminals(&g, &Permutation::identity(2)),
            Err(GrammarError::UndefinedTerminal(3))
        );
    }

    #[test]
    fn erasure_to_empty_word() {
        let g = toy(&[(0, &[T(3), T(3)])], 3, 1);
        let e = erase_terminals(&g, 2).unwrap();
        assert!(e.accepts_empty());
        assert!(e.rules().is_empty());
        assert_eq!(words(&e), vec![Vec::<u32>::new()]);
        assert!(e.membership(&Word::empty()).unwrap());
    }

    #[test]
    fn erasure_with_mixed_variables() {
        // B1 -> V1 1 V1, V1 -> 2 | 3
        let g = toy(&[(0, &[V(1), T(1), V(1)]), (1, &[T(2)]), (1, &[T(3)])], 3, 2);
        let e = erase_terminals(&g, 2).unwrap();
        assert!(!e.accepts_empty());
        assert!(e.rules().iter().all(|r| !r.rhs.is_empty()));
        let mut expect: Vec<Vec<u32>> = words(&g)
            .into_iter()
            .map(|w| w.into_iter().filter(|&x| x <= 2).collect())
            .collect();
        expect.sort();
        expect.dedup();
        assert_eq!(words(&e), expect);
        assert_eq!(erase_terminals(&g, 3).unwrap(), g);
    }

    #[test]
    fn unit_rules_removed() {
        let g = toy(&[(0, &[V(1)]), (0, &[T(1), V(2)]), (1, &[T(2)]), (2, &[V(1)])], 2, 3);
        let u = eliminate_unit_rules(&g).unwrap();
        assert!(u.is_regular());
        assert_eq!(words(&u), words(&g));
        assert_eq!(u.count_parse_trees().unwrap(), g.count_parse_trees().unwrap());
    }

    #[test]
    fn unions() {
        let a = toy(&[(0, &[T(1), T(2)])], 2, 1);
        let b = toy(&[(0, &[T(2), T(1)])], 2, 1);
        let u = union_grammar(&a, &b).unwrap();
        assert_eq!(words(&u), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(u.count_parse_trees().unwrap(), BigUint::from(2u32));
        let s = union_grammar(&a, &a).unwrap();
        assert_eq!(words(&s), words(&a));
        assert_eq!(s.rules().len(), 2 * a.rules().len() + 2);
        let c = toy(&[(0, &[T(1)])], 1, 1);
        assert!(matches!(union_grammar(&a, &c), Err(GrammarError::AlphabetMismatch { .. })));
    }

    #[test]
    fn cosets_and_duplicate_warning() {
        // H = {id, (2 1 3)} on three symbols, alpha = id
        let h = toy(&[(0, &[T(1), T(2), T(3)]), (0, &[T(2), T(1), T(3)])], 3, 1);
        let t: Vec<Permutation> =
            ["1 2 3", "1 3 2", "3 2 1"].iter().map(|s| s.parse().unwrap()).collect();
        let out = group_from_subgroup(&h, &t).unwrap();
        assert!(out.warnings.is_empty());
        assert_eq!(words(&out.grammar).len(), 6);
        assert_eq!(out.grammar.count_parse_trees().unwrap(), BigUint::from(6u32));

        let dup: Vec<Permutation> = ["1 2 3", "2 1 3"].iter().map(|s| s.parse().unwrap()).collect();
        let out = group_from_subgroup(&h, &dup).unwrap();
        assert_eq!(out.warnings.len(), 1);
        assert_eq!(words(&out.grammar).len(), 2);

        let single = group_from_subgroup(&h, &[Permutation::identity(3)]).unwrap();
        assert_eq!(single.grammar, h);
    }
}
