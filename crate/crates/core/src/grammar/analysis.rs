//! Finite-language analytics over acyclic grammars.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{Grammar, GrammarError, Symbol};
use crate::perm::Word;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageListing {
    /// Distinct words, lexicographically sorted.
    pub words: Vec<Word>,
    pub truncated: bool,
}

/// A derivation: the rule applied at the root and one subtree per variable
/// occurrence on its right-hand side, left to right.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParseTree {
    pub rule: usize,
    pub children: Vec<ParseTree>,
}

impl ParseTree {
    pub fn rule_multiset(&self, out: &mut Vec<usize>) {
        out.push(self.rule);
        for c in &self.children {
            c.rule_multiset(out);
        }
    }
}

impl Grammar {
    /// Every word of the language, sorted. With a cap, the listing stops at
    /// `cap` words and `truncated` tells whether more exist.
    pub fn enumerate_language(&self, cap: Option<usize>) -> Result<LanguageListing, GrammarError> {
        let order = self.topological_order()?;
        let by_lhs = self.rules_by_lhs();
        let mut langs: Vec<Option<BTreeSet<Vec<u32>>>> = vec![None; self.variable_count()];
        for &v in order.iter().rev() {
            let mut set = BTreeSet::new();
            for &ri in &by_lhs[v] {
                let mut partial: BTreeSet<Vec<u32>> = BTreeSet::from([Vec::new()]);
                for s in &self.rules[ri].rhs {
                    partial = match *s {
                        Symbol::Terminal(t) => partial
                            .into_iter()
                            .map(|mut w| {
                                w.push(t);
                                w
                            })
                            .collect(),
                        Symbol::Var(u) => {
                            let sub = langs[u].as_ref().expect("topological order");
                            let mut next = BTreeSet::new();
                            for w in &partial {
                                for x in sub {
                                    let mut y = w.clone();
                                    y.extend_from_slice(x);
                                    next.insert(y);
                                }
                            }
                            next
                        }
                    };
                    if partial.is_empty() {
                        break;
                    }
                }
                set.extend(partial);
            }
            langs[v] = Some(set);
        }
        let mut all = langs[self.start].take().unwrap_or_default();
        if self.accepts_empty {
            all.insert(Vec::new());
        }
        let total = all.len();
        let keep = cap.unwrap_or(total).min(total);
        let words = all.into_iter().take(keep).map(Word::new).collect();
        Ok(LanguageListing { words, truncated: keep < total })
    }

    /// Number of accepting parse trees. The empty word carried by the
    /// `accepts_empty` flag has no parse tree and is not counted.
    pub fn count_parse_trees(&self) -> Result<BigUint, GrammarError> {
        let counts = self.tree_counts()?;
        Ok(counts[self.start].clone())
    }

    fn tree_counts(&self) -> Result<Vec<BigUint>, GrammarError> {
        let order = self.topological_order()?;
        let by_lhs = self.rules_by_lhs();
        let mut counts = vec![BigUint::zero(); self.variable_count()];
        for &v in order.iter().rev() {
            let mut total = BigUint::zero();
            for &ri in &by_lhs[v] {
                let mut prod = BigUint::one();
                for u in self.rules[ri].vars() {
                    prod *= &counts[u];
                }
                total += prod;
            }
            counts[v] = total;
        }
        Ok(counts)
    }

    /// Whether `w` is in the language, by a span dynamic program.
    pub fn membership(&self, w: &Word) -> Result<bool, GrammarError> {
        self.topological_order()?;
        if w.is_empty() && self.accepts_empty {
            return Ok(true);
        }
        let by_lhs = self.rules_by_lhs();
        let mut memo: HashMap<(usize, usize), BTreeSet<usize>> = HashMap::new();
        let ends = self.ends(self.start, 0, w.symbols(), &by_lhs, &mut memo);
        Ok(ends.contains(&w.len()))
    }

    /// End offsets `j` such that `var` derives `w[i..j]`.
    fn ends(
        &self,
        var: usize,
        i: usize,
        w: &[u32],
        by_lhs: &[Vec<usize>],
        memo: &mut HashMap<(usize, usize), BTreeSet<usize>>,
    ) -> BTreeSet<usize> {
        if let Some(hit) = memo.get(&(var, i)) {
            return hit.clone();
        }
        let mut out = BTreeSet::new();
        for &ri in &by_lhs[var] {
            let mut frontier = BTreeSet::from([i]);
            for s in &self.rules[ri].rhs {
                let mut next = BTreeSet::new();
                for &p in &frontier {
                    match *s {
                        Symbol::Terminal(t) => {
                            if w.get(p) == Some(&t) {
                                next.insert(p + 1);
                            }
                        }
                        Symbol::Var(u) => next.extend(self.ends(u, p, w, by_lhs, memo)),
                    }
                }
                frontier = next;
                if frontier.is_empty() {
                    break;
                }
            }
            out.extend(frontier);
        }
        memo.insert((var, i), out.clone());
        out
    }

    /// All accepting parse trees, up to `cap` of them, in rule-index order.
    pub fn enumerate_parse_trees(&self, cap: usize) -> Result<Vec<ParseTree>, GrammarError> {
        self.topological_order()?;
        let by_lhs = self.rules_by_lhs();
        let mut out = Vec::new();
        self.trees_of(self.start, cap, &by_lhs, &mut out);
        Ok(out)
    }

    fn trees_of(&self, var: usize, cap: usize, by_lhs: &[Vec<usize>], out: &mut Vec<ParseTree>) {
        for &ri in &by_lhs[var] {
            if out.len() >= cap {
                return;
            }
            let vars: Vec<usize> = self.rules[ri].vars().collect();
            let mut partial: Vec<Vec<ParseTree>> = vec![Vec::new()];
            for u in vars {
                let mut subs = Vec::new();
                self.trees_of(u, cap, by_lhs, &mut subs);
                let mut next = Vec::new();
                'outer: for p in &partial {
                    for s in &subs {
                        let mut q = p.clone();
                        q.push(s.clone());
                        next.push(q);
                        if next.len() >= cap {
                            break 'outer;
                        }
                    }
                }
                partial = next;
            }
            for children in partial {
                if out.len() >= cap {
                    return;
                }
                out.push(ParseTree { rule: ri, children });
            }
        }
    }

    /// Whether `t` is an accepting parse tree of this grammar.
    pub fn is_parse_tree(&self, t: &ParseTree) -> bool {
        self.tree_fits(t, self.start)
    }

    fn tree_fits(&self, t: &ParseTree, var: usize) -> bool {
        let Some(rule) = self.rules.get(t.rule) else {
            return false;
        };
        let vars: Vec<usize> = rule.vars().collect();
        rule.lhs == var
            && vars.len() == t.children.len()
            && vars.iter().zip(&t.children).all(|(&u, c)| self.tree_fits(c, u))
    }

    /// Left-to-right concatenation of the terminals of `t`.
    pub fn tree_yield(&self, t: &ParseTree) -> Word {
        let mut out = Vec::new();
        self.push_yield(t, &mut out);
        Word::new(out)
    }

    fn push_yield(&self, t: &ParseTree, out: &mut Vec<u32>) {
        let mut kids = t.children.iter();
        for s in &self.rules[t.rule].rhs {
            match *s {
                Symbol::Terminal(x) => out.push(x),
                Symbol::Var(_) => self.push_yield(kids.next().expect("shape checked"), out),
            }
        }
    }

    /// Some word of the language, following the first productive rule of
    /// each variable.
    pub fn some_word(&self) -> Result<Option<Word>, GrammarError> {
        let counts = self.tree_counts()?;
        if counts[self.start].is_zero() {
            return Ok(if self.accepts_empty { Some(Word::empty()) } else { None });
        }
        let by_lhs = self.rules_by_lhs();
        let mut out = Vec::new();
        let mut stack = vec![Symbol::Var(self.start)];
        while let Some(s) = stack.pop() {
            match s {
                Symbol::Terminal(t) => out.push(t),
                Symbol::Var(v) => {
                    let ri = by_lhs[v]
                        .iter()
                        .copied()
                        .find(|&ri| self.rules[ri].vars().all(|u| !counts[u].is_zero()))
                        .expect("nonzero count");
                    stack.extend(self.rules[ri].rhs.iter().rev().copied());
                }
            }
        }
        Ok(Some(Word::new(out)))
    }
}
