use std::collections::BTreeSet;

use proptest::prelude::*;

use autgram::grammar::{
    eliminate_unit_rules, erase_terminals, rename_terminals, union_grammar, Grammar, Rule, Symbol,
};
use autgram::perm::{Permutation, Word};

const SIGMA: u32 = 3;

/// Acyclic grammars: variable `v` only refers to variables `u > v`.
fn grammar() -> impl Strategy<Value = Grammar> {
    (1usize..5).prop_flat_map(|nv| {
        let rule = (0..nv).prop_flat_map(move |lhs| {
            let sym = prop_oneof![
                (1..=SIGMA).prop_map(Symbol::Terminal),
                ((lhs + 1)..=nv).prop_map(move |u| {
                    if u < nv { Symbol::Var(u) } else { Symbol::Terminal(1) }
                }),
            ];
            proptest::collection::vec(sym, 1..4).prop_map(move |rhs| Rule::new(lhs, rhs))
        });
        proptest::collection::vec(rule, 1..9).prop_map(move |rules| {
            let names = (0..nv).map(|i| if i == 0 { "B1".into() } else { format!("V{i}") }).collect();
            Grammar::new(SIGMA, names, 0, rules).unwrap()
        })
    })
}

fn language(g: &Grammar) -> BTreeSet<Vec<u32>> {
    g.enumerate_language(None).unwrap().words.into_iter().map(Word::into_symbols).collect()
}

fn perm3() -> impl Strategy<Value = Permutation> {
    Just(vec![1u32, 2, 3]).prop_shuffle().prop_map(|v| Permutation::from_images(v).unwrap())
}

proptest! {
    #[test]
    fn membership_agrees_with_enumeration(g in grammar(), w in proptest::collection::vec(1..=SIGMA, 0..6)) {
        let lang = language(&g);
        prop_assert_eq!(g.membership(&Word::new(w.clone())).unwrap(), lang.contains(&w));
        for x in &lang {
            prop_assert!(g.membership(&Word::new(x.clone())).unwrap());
        }
    }

    #[test]
    fn trimming_keeps_language_and_trees(g in grammar()) {
        let t = g.trimmed();
        prop_assert_eq!(language(&t), language(&g));
        prop_assert_eq!(t.count_parse_trees().unwrap(), g.count_parse_trees().unwrap());
    }

    #[test]
    fn renaming_maps_words(g in grammar(), b in perm3()) {
        let r = rename_terminals(&g, &b).unwrap();
        let expect: BTreeSet<Vec<u32>> =
            language(&g).into_iter().map(|w| w.into_iter().map(|x| b.apply(x)).collect()).collect();
        prop_assert_eq!(language(&r), expect);
        prop_assert_eq!(r.size().to_bits(), g.size().to_bits());
    }

    #[test]
    fn erasure_is_the_homomorphic_image(g in grammar(), keep in 1..=SIGMA) {
        let e = erase_terminals(&g, keep).unwrap();
        let expect: BTreeSet<Vec<u32>> =
            language(&g).into_iter().map(|w| w.into_iter().filter(|&x| x <= keep).collect()).collect();
        prop_assert_eq!(language(&e), expect);
        prop_assert!(e.rules().iter().all(|r| !r.rhs.is_empty()));
    }

    #[test]
    fn unit_elimination_and_union(g in grammar(), h in grammar()) {
        let u = eliminate_unit_rules(&g).unwrap();
        prop_assert_eq!(language(&u), language(&g));
        prop_assert_eq!(u.count_parse_trees().unwrap(), g.count_parse_trees().unwrap());
        let both = union_grammar(&g, &h).unwrap();
        let expect: BTreeSet<Vec<u32>> = language(&g).union(&language(&h)).cloned().collect();
        prop_assert_eq!(language(&both), expect);
        prop_assert_eq!(
            both.count_parse_trees().unwrap(),
            g.count_parse_trees().unwrap() + h.count_parse_trees().unwrap()
        );
    }

    #[test]
    fn json_round_trip(g in grammar()) {
        prop_assert_eq!(Grammar::from_json(&g.to_json()).unwrap(), g);
    }
}

mod corpus {
    use super::*;
    use autgram::decomp::{compute_tree_decomposition, make_permutation_yielding, Strategy};
    use autgram::grammar::{build_aut_grammar, AutGrammar};
    use autgram::graph::named;
    use autgram::oracle::{is_group, PermSet};
    use autgram::polytope::{build_extended_formulation, RationalPoint};
    use num_rational::BigRational;

    fn c4() -> AutGrammar {
        let g = named::cycle(4);
        let td = compute_tree_decomposition(&g, Strategy::MinFill).unwrap();
        build_aut_grammar(&g, &make_permutation_yielding(&g, &td).unwrap().0).unwrap()
    }

    #[test]
    fn pulled_back_language_is_a_group() {
        for g in [named::path(4), named::cycle(5), named::star(4), named::hypercube(3)] {
            let td = compute_tree_decomposition(&g, Strategy::MinFill).unwrap();
            let built = build_aut_grammar(&g, &make_permutation_yielding(&g, &td).unwrap().0).unwrap();
            let inv = built.alpha.inverse();
            let group: PermSet = built
                .grammar
                .enumerate_language(None)
                .unwrap()
                .words
                .iter()
                .map(|w| w.permute(&inv).unwrap().to_permutation().unwrap())
                .collect();
            assert!(is_group(&group), "{g}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn convex_combinations_stay_feasible(weights in proptest::collection::vec(0u32..5, 8)) {
            prop_assume!(weights.iter().any(|&w| w > 0));
            let built = c4();
            let ef = build_extended_formulation(&built.grammar).unwrap();
            let trees = built.grammar.enumerate_parse_trees(usize::MAX).unwrap();
            let points: Vec<RationalPoint> =
                trees.iter().map(|t| ef.lift_parse_tree(t).unwrap()).collect();
            let total: u32 = weights.iter().sum();
            let lambdas: Vec<BigRational> = weights
                .iter()
                .map(|&w| BigRational::new(w.into(), total.into()))
                .collect();
            let p = RationalPoint::combination(&points, &lambdas);
            prop_assert!(ef.violations(&p).is_empty());
            prop_assert!(ef.check_projection_feasibility(&ef.project(&p)).unwrap());
        }
    }
}
