//! Context-free grammars over the alphabet `{1, ..., sigma_max}`.
//!
//! Variables are referred to by index; index order is canonical and is the
//! order used for serialization. Grammars produced here are non-recursive, so
//! most analytics require (and check) an acyclic variable dependency relation.

mod analysis;
mod build;
mod transform;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotate::AnnotateError;
use crate::decomp::DecompError;
use crate::oracle::OracleError;
use crate::perm::Permutation;

pub use analysis::{LanguageListing, ParseTree};
pub use build::{
    build_aut_grammar, build_embedded_group_grammar, build_regular_aut_grammar, AutGrammar,
    EmbedOptions, InvarianceCheck,
};
pub use transform::{
    eliminate_unit_rules, erase_terminals, group_from_subgroup, rename_terminals, union_all,
    union_grammar, CosetGrammar,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("graph not connected")]
    Disconnected,
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Annotate(#[from] AnnotateError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("prefix [{n}] is not invariant: automorphism {witness} moves it")]
    NotInvariant { n: usize, witness: Permutation },
    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: u32, right: u32 },
    #[error("renaming undefined on terminal {0}")]
    UndefinedTerminal(u32),
    #[error("grammar is recursive")]
    Cyclic,
    #[error("malformed grammar: {0}")]
    Malformed(String),
    #[error("invalid grammar document: {0}")]
    Json(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Terminal(u32),
    Var(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub lhs: usize,
    pub rhs: Vec<Symbol>,
}

impl Rule {
    pub fn new(lhs: usize, rhs: Vec<Symbol>) -> Self {
        Rule { lhs, rhs }
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.rhs.iter().filter_map(|s| match s {
            Symbol::Var(v) => Some(*v),
            Symbol::Terminal(_) => None,
        })
    }
}

/// Where a constructed variable came from: a decomposition position and the
/// annotated bag chosen there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub position: String,
    pub bag: Vec<u32>,
    pub phi: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    sigma_max: u32,
    variables: Vec<String>,
    start: usize,
    rules: Vec<Rule>,
    /// The empty word belongs to the language. Set by erasure, which cannot
    /// express it as a rule once ε-rules are removed.
    accepts_empty: bool,
    provenance: BTreeMap<String, Provenance>,
}

impl Grammar {
    pub fn new(
        sigma_max: u32,
        variables: Vec<String>,
        start: usize,
        rules: Vec<Rule>,
    ) -> Result<Self, GrammarError> {
        let g = Grammar {
            sigma_max,
            variables,
            start,
            rules,
            accepts_empty: false,
            provenance: BTreeMap::new(),
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&self) -> Result<(), GrammarError> {
        let nv = self.variables.len();
        if self.start >= nv {
            return Err(GrammarError::Malformed("start variable out of range".into()));
        }
        let mut names = self.variables.clone();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(GrammarError::Malformed("duplicate variable name".into()));
        }
        for r in &self.rules {
            if r.lhs >= nv {
                return Err(GrammarError::Malformed(format!("rule lhs {} undeclared", r.lhs)));
            }
            for s in &r.rhs {
                match *s {
                    Symbol::Var(v) if v >= nv => {
                        return Err(GrammarError::Malformed(format!("variable {v} undeclared")))
                    }
                    Symbol::Terminal(t) if t == 0 || t > self.sigma_max => {
                        return Err(GrammarError::Malformed(format!(
                            "terminal {t} outside 1..={}",
                            self.sigma_max
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn sigma_max(&self) -> u32 {
        self.sigma_max
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn variable_count(&self) -> usize {
        self.variables.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn accepts_empty(&self) -> bool {
        self.accepts_empty
    }

    pub fn provenance(&self) -> &BTreeMap<String, Provenance> {
        &self.provenance
    }

    pub(crate) fn with_accepts_empty(mut self, flag: bool) -> Self {
        self.accepts_empty = flag;
        self
    }

    pub(crate) fn with_provenance(mut self, provenance: BTreeMap<String, Provenance>) -> Self {
        self.provenance = provenance;
        self
    }

    /// Rule indices grouped by left-hand side.
    pub fn rules_by_lhs(&self) -> Vec<Vec<usize>> {
        let mut by = vec![Vec::new(); self.variables.len()];
        for (i, r) in self.rules.iter().enumerate() {
            by[r.lhs].push(i);
        }
        by
    }

    /// Total number of symbols on right-hand sides plus one per rule.
    pub fn rule_symbol_count(&self) -> usize {
        self.rules.iter().map(|r| 1 + r.rhs.len()).sum()
    }

    /// `Σ_{(B,u) ∈ R} (1 + |u|) · log₂(|Σ| + |𝓑|)`.
    pub fn size(&self) -> f64 {
        let base = self.sigma_max as f64 + self.variables.len() as f64;
        if self.rules.is_empty() {
            return 0.0;
        }
        self.rule_symbol_count() as f64 * base.log2()
    }

    /// Every rule is `B → a` or `B → a B'`.
    pub fn is_regular(&self) -> bool {
        self.rules.iter().all(|r| match r.rhs.as_slice() {
            [Symbol::Terminal(_)] => true,
            [Symbol::Terminal(_), Symbol::Var(_)] => true,
            _ => false,
        })
    }

    /// Removes variables that derive no terminal string or are unreachable
    /// from the start variable, together with the rules mentioning them. The
    /// start variable is always kept; survivors keep their relative order.
    pub fn trimmed(&self) -> Grammar {
        let nv = self.variables.len();
        let mut productive = vec![false; nv];
        loop {
            let mut changed = false;
            for r in &self.rules {
                if !productive[r.lhs] && r.vars().all(|v| productive[v]) {
                    productive[r.lhs] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let by_lhs = self.rules_by_lhs();
        let mut reachable = vec![false; nv];
        reachable[self.start] = true;
        let mut stack = vec![self.start];
        while let Some(v) = stack.pop() {
            for &ri in &by_lhs[v] {
                let r = &self.rules[ri];
                if r.vars().all(|u| productive[u]) {
                    for u in r.vars() {
                        if !reachable[u] {
                            reachable[u] = true;
                            stack.push(u);
                        }
                    }
                }
            }
        }
        let keep: Vec<bool> = (0..nv)
            .map(|v| v == self.start || (reachable[v] && productive[v]))
            .collect();
        let mut new_index = vec![usize::MAX; nv];
        let mut variables = Vec::new();
        for v in 0..nv {
            if keep[v] {
                new_index[v] = variables.len();
                variables.push(self.variables[v].clone());
            }
        }
        let rules = self
            .rules
            .iter()
            .filter(|r| {
                reachable[r.lhs] && productive[r.lhs] && r.vars().all(|u| keep[u] && productive[u])
            })
            .map(|r| Rule {
                lhs: new_index[r.lhs],
                rhs: r
                    .rhs
                    .iter()
                    .map(|s| match *s {
                        Symbol::Var(v) => Symbol::Var(new_index[v]),
                        t => t,
                    })
                    .collect(),
            })
            .collect();
        let provenance = self
            .provenance
            .iter()
            .filter(|(name, _)| variables.contains(name))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Grammar {
            sigma_max: self.sigma_max,
            start: new_index[self.start],
            variables,
            rules,
            accepts_empty: self.accepts_empty,
            provenance,
        }
    }

    /// Variables in an order where every variable precedes the variables on
    /// the right-hand sides of its rules.
    pub fn topological_order(&self) -> Result<Vec<usize>, GrammarError> {
        let nv = self.variables.len();
        let by_lhs = self.rules_by_lhs();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; nv];
        let mut post = Vec::with_capacity(nv);
        for root in 0..nv {
            if state[root] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, Vec<usize>)> = vec![(root, successors(self, &by_lhs, root))];
            state[root] = 1;
            while let Some((v, succ)) = stack.last_mut() {
                if let Some(u) = succ.pop() {
                    match state[u] {
                        0 => {
                            state[u] = 1;
                            let s = successors(self, &by_lhs, u);
                            stack.push((u, s));
                        }
                        1 => return Err(GrammarError::Cyclic),
                        _ => {}
                    }
                } else {
                    state[*v] = 2;
                    post.push(*v);
                    stack.pop();
                }
            }
        }
        post.reverse();
        Ok(post)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_ok()
    }

    pub fn to_json(&self) -> String {
        let doc = GrammarDoc {
            sigma_max: self.sigma_max,
            start: self.variables[self.start].clone(),
            variables: self.variables.clone(),
            rules: self
                .rules
                .iter()
                .map(|r| {
                    let toks = r
                        .rhs
                        .iter()
                        .map(|s| match *s {
                            Symbol::Terminal(t) => Token::Terminal(t),
                            Symbol::Var(v) => Token::Var(self.variables[v].clone()),
                        })
                        .collect();
                    (self.variables[r.lhs].clone(), toks)
                })
                .collect(),
            accepts_empty: self.accepts_empty,
            provenance: if self.provenance.is_empty() { None } else { Some(self.provenance.clone()) },
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("grammar serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, GrammarError> {
        let doc: GrammarDoc =
            serde_json::from_str(text).map_err(|e| GrammarError::Json(e.to_string()))?;
        let index: BTreeMap<&str, usize> =
            doc.variables.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| GrammarError::Json(format!("unknown variable `{name}`")))
        };
        let start = lookup(&doc.start)?;
        let mut rules = Vec::with_capacity(doc.rules.len());
        for (lhs, toks) in &doc.rules {
            let rhs = toks
                .iter()
                .map(|t| match t {
                    Token::Terminal(x) => Ok(Symbol::Terminal(*x)),
                    Token::Var(n) => lookup(n).map(Symbol::Var),
                })
                .collect::<Result<_, _>>()?;
            rules.push(Rule { lhs: lookup(lhs)?, rhs });
        }
        let g = Grammar::new(doc.sigma_max, doc.variables.clone(), start, rules)?;
        Ok(g.with_accepts_empty(doc.accepts_empty)
            .with_provenance(doc.provenance.unwrap_or_default()))
    }
}

fn successors(g: &Grammar, by_lhs: &[Vec<usize>], v: usize) -> Vec<usize> {
    let mut s: Vec<usize> = by_lhs[v].iter().flat_map(|&ri| g.rules[ri].vars()).collect();
    s.sort_unstable();
    s.dedup();
    s
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            write!(f, "{} ->", self.variables[r.lhs])?;
            for s in &r.rhs {
                match *s {
                    Symbol::Terminal(t) => write!(f, " {t}")?,
                    Symbol::Var(v) => write!(f, " <{}>", self.variables[v])?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct GrammarDoc {
    sigma_max: u32,
    start: String,
    variables: Vec<String>,
    rules: Vec<(String, Vec<Token>)>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    accepts_empty: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<BTreeMap<String, Provenance>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum Token {
    Terminal(u32),
    Var(String),
}
