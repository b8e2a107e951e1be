//! Rule-flow extended formulations of `conv{ŵ : w ∈ L}` for positional
//! grammars, with exact feasibility checks.
//!
//! A grammar is positional when every variable derives words of one fixed
//! length starting at one fixed offset. Then a unit of flow from the start
//! variable, split over rules and conserved at every other variable, selects
//! parse trees, and the symbol written at position `i` is a linear function
//! of the flow.

mod lp;
mod simplex;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::grammar::{Grammar, GrammarError, ParseTree, Symbol};
use crate::perm::Word;

pub use lp::{Bound, Constraint, LpModel, Relation};
pub use simplex::is_feasible;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolytopeError {
    #[error("grammar is recursive")]
    Cyclic,
    #[error("grammar is not positional: {0}")]
    NotPositional(String),
    #[error("tree is not a parse tree of the grammar")]
    NotATree,
    #[error("point has {found} coordinates, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("lp line {line}: {reason}")]
    LpParse { line: usize, reason: String },
}

impl From<GrammarError> for PolytopeError {
    fn from(_: GrammarError) -> Self {
        PolytopeError::Cyclic
    }
}

/// A point with exact coordinates, keyed by LP variable name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RationalPoint {
    pub values: BTreeMap<String, BigRational>,
}

impl RationalPoint {
    pub fn get(&self, name: &str) -> BigRational {
        self.values.get(name).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `Σ λ_k p_k`.
    pub fn combination(points: &[RationalPoint], weights: &[BigRational]) -> RationalPoint {
        let mut values: BTreeMap<String, BigRational> = BTreeMap::new();
        for (p, w) in points.iter().zip(weights) {
            for (k, v) in &p.values {
                *values.entry(k.clone()).or_insert_with(BigRational::zero) += v * w;
            }
        }
        RationalPoint { values }
    }
}

pub fn flow_name(rule: usize) -> String {
    format!("y_{rule}")
}

fn x_name(i: usize) -> String {
    format!("x_{i}")
}

/// `ŵ`: the word as a vector of rationals.
pub fn word_vector(w: &Word) -> Vec<BigRational> {
    w.symbols().iter().map(|&s| BigRational::from_integer(s.into())).collect()
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedFormulation {
    grammar: Grammar,
    word_len: usize,
    /// Source and conservation rows over the flow variables.
    constraints: Vec<Constraint>,
    /// For position `i` (0-based), the rules writing a terminal there, with
    /// the terminal.
    writers: Vec<Vec<(usize, u32)>>,
    empty_language: bool,
}

/// Sizes of a formulation, for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormulationStats {
    pub flow_variables: usize,
    pub flow_rows: usize,
    pub bound_rows: usize,
    pub projection_rows: usize,
}

impl ExtendedFormulation {
    pub fn build(gr: &Grammar) -> Result<Self, PolytopeError> {
        let order = gr.topological_order().map_err(|_| PolytopeError::Cyclic)?;
        let nv = gr.variable_count();
        let rules = gr.rules();
        let by_lhs = gr.rules_by_lhs();

        let mut len: Vec<Option<usize>> = vec![None; nv];
        for &v in order.iter().rev() {
            for &ri in &by_lhs[v] {
                let mut l = Some(0usize);
                for s in &rules[ri].rhs {
                    l = match (*s, l) {
                        (Symbol::Terminal(_), Some(x)) => Some(x + 1),
                        (Symbol::Var(u), Some(x)) => len[u].map(|y| x + y),
                        (_, None) => None,
                    };
                }
                let Some(l) = l else { continue };
                match len[v] {
                    None => len[v] = Some(l),
                    Some(prev) if prev != l => {
                        return Err(PolytopeError::NotPositional(format!(
                            "{} derives words of lengths {prev} and {l}",
                            gr.variables()[v]
                        )))
                    }
                    _ => {}
                }
            }
        }
        let start = gr.start();
        if gr.accepts_empty() && len[start].is_some_and(|l| l > 0) {
            return Err(PolytopeError::NotPositional(
                "the empty word sits beside non-empty words".into(),
            ));
        }

        let mut offset: Vec<Option<usize>> = vec![None; nv];
        offset[start] = Some(0);
        let mut writers: Vec<Vec<(usize, u32)>> = vec![Vec::new(); len[start].unwrap_or(0)];
        for &v in &order {
            let Some(base) = offset[v] else { continue };
            for &ri in &by_lhs[v] {
                let mut at = base;
                for s in &rules[ri].rhs {
                    match *s {
                        Symbol::Terminal(t) => {
                            if let Some(w) = writers.get_mut(at) {
                                w.push((ri, t));
                            }
                            at += 1;
                        }
                        Symbol::Var(u) => {
                            match offset[u] {
                                None => offset[u] = Some(at),
                                Some(o) if o != at => {
                                    return Err(PolytopeError::NotPositional(format!(
                                        "{} occurs at offsets {o} and {at}",
                                        gr.variables()[u]
                                    )))
                                }
                                _ => {}
                            }
                            at += len[u].unwrap_or(0);
                        }
                    }
                }
            }
        }

        let mut constraints = Vec::new();
        let empty_language = by_lhs[start].is_empty() && !gr.accepts_empty();
        if empty_language {
            constraints.push(Constraint {
                name: "src".into(),
                terms: vec![("y_empty".into(), int(1))],
                relation: Relation::Eq,
                rhs: int(1),
            });
        } else if !by_lhs[start].is_empty() {
            constraints.push(Constraint {
                name: "src".into(),
                terms: by_lhs[start].iter().map(|&r| (flow_name(r), int(1))).collect(),
                relation: Relation::Eq,
                rhs: int(1),
            });
        }
        let mut occurrences: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); nv];
        for (ri, r) in rules.iter().enumerate() {
            for u in r.vars() {
                *occurrences[u].entry(ri).or_insert(0) += 1;
            }
        }
        for v in 0..nv {
            if v == start || offset[v].is_none() {
                continue;
            }
            let mut coef: BTreeMap<usize, i64> = BTreeMap::new();
            for &ri in &by_lhs[v] {
                *coef.entry(ri).or_insert(0) += 1;
            }
            for (&ri, &m) in &occurrences[v] {
                *coef.entry(ri).or_insert(0) -= m;
            }
            coef.retain(|_, c| *c != 0);
            if coef.is_empty() {
                continue;
            }
            constraints.push(Constraint {
                name: format!("c_{v}"),
                terms: coef.into_iter().map(|(r, c)| (flow_name(r), int(c))).collect(),
                relation: Relation::Eq,
                rhs: BigRational::zero(),
            });
        }
        Ok(ExtendedFormulation {
            grammar: gr.clone(),
            word_len: writers.len(),
            constraints,
            writers,
            empty_language,
        })
    }

    pub fn word_len(&self) -> usize {
        self.word_len
    }

    pub fn flow_count(&self) -> usize {
        self.grammar.rules().len()
    }

    pub fn is_empty_language(&self) -> bool {
        self.empty_language
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn stats(&self) -> FormulationStats {
        FormulationStats {
            flow_variables: self.flow_count(),
            flow_rows: self.constraints.len(),
            bound_rows: 2 * self.flow_count(),
            projection_rows: self.word_len,
        }
    }

    /// `x_i - Σ j·y_R = 0` for every position.
    fn projection_rows(&self) -> Vec<Constraint> {
        (0..self.word_len)
            .map(|i| {
                let mut coef: BTreeMap<usize, i64> = BTreeMap::new();
                for &(r, t) in &self.writers[i] {
                    *coef.entry(r).or_insert(0) += t as i64;
                }
                let mut terms = vec![(x_name(i + 1), int(1))];
                terms.extend(coef.into_iter().map(|(r, c)| (flow_name(r), int(-c))));
                Constraint { name: format!("px{}", i + 1), terms, relation: Relation::Eq, rhs: BigRational::zero() }
            })
            .collect()
    }

    /// `z_i_j - Σ y_R = 0` over the rules writing `j` at position `i`.
    fn assignment_rows(&self) -> Vec<Constraint> {
        let mut out = Vec::new();
        for i in 0..self.word_len {
            for j in 1..=self.grammar.sigma_max() {
                let mut coef: BTreeMap<usize, i64> = BTreeMap::new();
                for &(r, t) in &self.writers[i] {
                    if t == j {
                        *coef.entry(r).or_insert(0) += 1;
                    }
                }
                let mut terms = vec![(format!("z_{}_{j}", i + 1), int(1))];
                terms.extend(coef.into_iter().map(|(r, c)| (flow_name(r), int(-c))));
                out.push(Constraint {
                    name: format!("pz{}_{j}", i + 1),
                    terms,
                    relation: Relation::Eq,
                    rhs: BigRational::zero(),
                });
            }
        }
        out
    }

    /// The formulation as an LP: flow rows, projection rows (and the
    /// assignment-matrix rows with `matrix`), and `0 <= y <= 1`.
    pub fn to_lp_model(&self, matrix: bool) -> LpModel {
        let mut constraints = self.constraints.clone();
        constraints.extend(self.projection_rows());
        if matrix {
            constraints.extend(self.assignment_rows());
        }
        let mut bounds = BTreeMap::new();
        for r in 0..self.flow_count() {
            bounds.insert(flow_name(r), Bound { lower: Some(int(0)), upper: Some(int(1)) });
        }
        if self.empty_language {
            bounds.insert("y_empty".into(), Bound { lower: Some(int(0)), upper: Some(int(0)) });
        }
        LpModel { constraints, bounds }
    }

    /// LP text plus warnings about the model.
    pub fn emit_lp(&self, matrix: bool) -> (String, Vec<String>) {
        let mut warnings = Vec::new();
        if self.empty_language {
            warnings.push("grammar has an empty language; the source row is infeasible".into());
        }
        (self.to_lp_model(matrix).to_lp_string(), warnings)
    }

    /// The 0/1 point with `y_R` the multiplicity of `R` in `t`, and `x`
    /// the projected word vector.
    pub fn lift_parse_tree(&self, t: &ParseTree) -> Result<RationalPoint, PolytopeError> {
        if !self.grammar.is_parse_tree(t) {
            return Err(PolytopeError::NotATree);
        }
        let mut used = Vec::new();
        t.rule_multiset(&mut used);
        let mut values: BTreeMap<String, BigRational> =
            (0..self.flow_count()).map(|r| (flow_name(r), BigRational::zero())).collect();
        for r in used {
            *values.get_mut(&flow_name(r)).expect("rule index") += BigRational::one();
        }
        let mut point = RationalPoint { values };
        for (i, x) in self.project(&point).into_iter().enumerate() {
            point.values.insert(x_name(i + 1), x);
        }
        Ok(point)
    }

    /// `x_i = Σ j·y_R` evaluated at `p`.
    pub fn project(&self, p: &RationalPoint) -> Vec<BigRational> {
        self.writers
            .iter()
            .map(|w| {
                w.iter().fold(BigRational::zero(), |acc, &(r, t)| {
                    acc + p.get(&flow_name(r)) * int(t as i64)
                })
            })
            .collect()
    }

    /// Names of the flow rows and bounds that `p` violates.
    pub fn violations(&self, p: &RationalPoint) -> Vec<String> {
        let mut out: Vec<String> = self
            .constraints
            .iter()
            .filter(|c| !c.holds(|v| p.get(v)))
            .map(|c| c.name.clone())
            .collect();
        for r in 0..self.flow_count() {
            let y = p.get(&flow_name(r));
            if y < BigRational::zero() || y > BigRational::one() {
                out.push(format!("bound {}", flow_name(r)));
            }
        }
        out
    }

    /// Whether `x` lies in the projection of the formulation.
    pub fn check_projection_feasibility(&self, x: &[BigRational]) -> Result<bool, PolytopeError> {
        check_lp_point(&self.to_lp_model(false), x)
    }
}

pub fn build_extended_formulation(gr: &Grammar) -> Result<ExtendedFormulation, PolytopeError> {
    ExtendedFormulation::build(gr)
}

/// Number of projection coordinates `x_1, x_2, ...` in a model.
pub fn projection_dimension(model: &LpModel) -> usize {
    let vars = model.variables();
    (1..).take_while(|i| vars.contains(&x_name(*i))).count()
}

/// Fixes `x_1 .. x_n` of `model` to `x` and decides feasibility exactly.
pub fn check_lp_point(model: &LpModel, x: &[BigRational]) -> Result<bool, PolytopeError> {
    let n = projection_dimension(model);
    if n != x.len() {
        return Err(PolytopeError::Dimension { expected: n, found: x.len() });
    }
    let mut fixed = model.clone();
    for (i, v) in x.iter().enumerate() {
        fixed.fix(&x_name(i + 1), v.clone());
    }
    Ok(is_feasible(&fixed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::{compute_tree_decomposition, make_permutation_yielding, Strategy};
    use crate::grammar::{build_aut_grammar, union_grammar, Rule};
    use crate::graph::named;
    use crate::oracle::brute_force_automorphisms;
    use crate::perm::{all_permutations, Permutation};

    fn one_rule() -> Grammar {
        Grammar::new(
            2,
            vec!["B1".into()],
            0,
            vec![Rule::new(0, vec![Symbol::Terminal(1), Symbol::Terminal(2)])],
        )
        .unwrap()
    }

    fn c4() -> (Permutation, Grammar) {
        let g = named::cycle(4);
        let td = compute_tree_decomposition(&g, Strategy::MinFill).unwrap();
        let (td, _) = make_permutation_yielding(&g, &td).unwrap();
        let out = build_aut_grammar(&g, &td).unwrap();
        (out.alpha, out.grammar)
    }

    #[test]
    fn one_rule_lp_text() {
        let ef = build_extended_formulation(&one_rule()).unwrap();
        assert_eq!(ef.word_len(), 2);
        let (text, warnings) = ef.emit_lp(false);
        assert!(warnings.is_empty());
        assert!(text.contains(" src: y_0 = 1\n"));
        assert!(text.contains(" px1: x_1 - 1 y_0 = 0\n"));
        assert!(text.contains(" px2: x_2 - 2 y_0 = 0\n"));
        assert!(text.contains(" 0 <= y_0 <= 1\n"));
        assert!(text.starts_with("Minimize\n obj: 0\nSubject To\n"));
        assert!(text.ends_with("End\n"));
        assert!(ef.check_projection_feasibility(&[int(1), int(2)]).unwrap());
        assert!(!ef.check_projection_feasibility(&[int(2), int(1)]).unwrap());
        assert_eq!(
            ef.check_projection_feasibility(&[int(1)]),
            Err(PolytopeError::Dimension { expected: 2, found: 1 })
        );
    }

    #[test]
    fn c4_lifts_and_round_trip() {
        let (alpha, gr) = c4();
        let ef = build_extended_formulation(&gr).unwrap();
        let trees = gr.enumerate_parse_trees(usize::MAX).unwrap();
        assert_eq!(trees.len(), 8);
        for t in &trees {
            let p = ef.lift_parse_tree(t).unwrap();
            assert!(ef.violations(&p).is_empty());
            assert_eq!(ef.project(&p), word_vector(&gr.tree_yield(t)));
        }
        let id_word = Permutation::identity(4).to_word().permute(&alpha).unwrap();
        assert!(trees.iter().any(|t| gr.tree_yield(t) == id_word));

        let (text, _) = ef.emit_lp(false);
        let parsed = LpModel::parse(&text).unwrap();
        assert_eq!(parsed, ef.to_lp_model(false));
        assert_eq!(parsed.to_lp_string(), text);
        let (mtext, _) = ef.emit_lp(true);
        assert_eq!(LpModel::parse(&mtext).unwrap(), ef.to_lp_model(true));
        assert!(mtext.contains("pz4_4:"));
    }

    #[test]
    fn c4_feasibility_matches_group_membership() {
        let (alpha, gr) = c4();
        let ef = build_extended_formulation(&gr).unwrap();
        let aut = brute_force_automorphisms(&named::cycle(4), 10).unwrap();
        let mut feasible = 0;
        for s in all_permutations(4) {
            let x = word_vector(&s.to_word().permute(&alpha).unwrap());
            let verdict = ef.check_projection_feasibility(&x).unwrap();
            assert_eq!(verdict, aut.contains(&s), "{s}");
            feasible += verdict as usize;
        }
        assert_eq!(feasible, 8);
    }

    #[test]
    fn midpoint_of_union() {
        let a = one_rule();
        let b = Grammar::new(
            2,
            vec!["B1".into()],
            0,
            vec![Rule::new(0, vec![Symbol::Terminal(2), Symbol::Terminal(1)])],
        )
        .unwrap();
        let u = union_grammar(&a, &b).unwrap();
        let ef = build_extended_formulation(&u).unwrap();
        let trees = u.enumerate_parse_trees(10).unwrap();
        let pts: Vec<RationalPoint> = trees.iter().map(|t| ef.lift_parse_tree(t).unwrap()).collect();
        let half = BigRational::new(1.into(), 2.into());
        let mid = RationalPoint::combination(&pts, &[half.clone(), half.clone()]);
        assert!(ef.violations(&mid).is_empty());
        let x = ef.project(&mid);
        assert_eq!(x, vec![BigRational::new(3.into(), 2.into()); 2]);
        assert!(ef.check_projection_feasibility(&x).unwrap());
        assert!(!ef.check_projection_feasibility(&[int(1), int(1)]).unwrap());
    }

    #[test]
    fn empty_language_warns() {
        let gr = Grammar::new(2, vec!["B1".into()], 0, vec![]).unwrap();
        let ef = build_extended_formulation(&gr).unwrap();
        let (text, warnings) = ef.emit_lp(false);
        assert_eq!(warnings.len(), 1);
        assert!(text.contains("src: y_empty = 1"));
        assert!(!is_feasible(&LpModel::parse(&text).unwrap()));
    }

    #[test]
    fn non_positional_rejected() {
        let gr = Grammar::new(
            2,
            vec!["B1".into()],
            0,
            vec![Rule::new(0, vec![Symbol::Terminal(1)]), Rule::new(0, vec![Symbol::Terminal(1), Symbol::Terminal(2)])],
        )
        .unwrap();
        assert!(matches!(build_extended_formulation(&gr), Err(PolytopeError::NotPositional(_))));
        let foreign = ef_tree_mismatch();
        assert_eq!(foreign, Err(PolytopeError::NotATree));
    }

    fn ef_tree_mismatch() -> Result<RationalPoint, PolytopeError> {
        let ef = build_extended_formulation(&one_rule()).unwrap();
        ef.lift_parse_tree(&ParseTree { rule: 0, children: vec![ParseTree { rule: 0, children: vec![] }] })
    }
}
