//! Linear programs in CPLEX LP text form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::PolytopeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

impl Relation {
    fn as_str(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(String, BigRational)>,
    pub relation: Relation,
    pub rhs: BigRational,
}

impl Constraint {
    pub fn holds(&self, value: impl Fn(&str) -> BigRational) -> bool {
        let lhs = self
            .terms
            .iter()
            .fold(BigRational::zero(), |acc, (v, c)| acc + c * value(v));
        match self.relation {
            Relation::Eq => lhs == self.rhs,
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

/// Bounds of one variable; `None` is unbounded on that side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bound {
    pub lower: Option<BigRational>,
    pub upper: Option<BigRational>,
}

impl Default for Bound {
    /// The LP-format default `0 <= v < +inf`.
    fn default() -> Self {
        Bound { lower: Some(BigRational::zero()), upper: None }
    }
}

/// A feasibility problem: the objective is always the constant 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LpModel {
    pub constraints: Vec<Constraint>,
    /// Explicit bounds only; other variables take [`Bound::default`].
    pub bounds: BTreeMap<String, Bound>,
}

impl LpModel {
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.bounds.keys().cloned().collect();
        for c in &self.constraints {
            out.extend(c.terms.iter().map(|(v, _)| v.clone()));
        }
        out
    }

    pub fn bound(&self, var: &str) -> Bound {
        self.bounds.get(var).cloned().unwrap_or_default()
    }

    pub fn fix(&mut self, var: &str, value: BigRational) {
        self.bounds
            .insert(var.to_string(), Bound { lower: Some(value.clone()), upper: Some(value) });
    }

    pub fn to_lp_string(&self) -> String {
        let mut out = String::from("Minimize\n obj: 0\nSubject To\n");
        for c in &self.constraints {
            let _ = writeln!(
                out,
                " {}: {} {} {}",
                c.name,
                render_terms(&c.terms),
                c.relation.as_str(),
                render_number(&c.rhs)
            );
        }
        if !self.bounds.is_empty() {
            out.push_str("Bounds\n");
            let mut names: Vec<&String> = self.bounds.keys().collect();
            names.sort_by_key(|a| natural_key(a));
            for name in names {
                let b = &self.bounds[name];
                let line = match (&b.lower, &b.upper) {
                    (Some(l), Some(u)) if l == u => format!("{name} = {}", render_number(l)),
                    (Some(l), Some(u)) => {
                        format!("{} <= {name} <= {}", render_number(l), render_number(u))
                    }
                    (Some(l), None) => format!("{name} >= {}", render_number(l)),
                    (None, Some(u)) => format!("-inf <= {name} <= {}", render_number(u)),
                    (None, None) => format!("{name} free"),
                };
                let _ = writeln!(out, " {line}");
            }
        }
        out.push_str("End\n");
        out
    }

    pub fn parse(text: &str) -> Result<LpModel, PolytopeError> {
        #[derive(PartialEq)]
        enum Section {
            Preamble,
            Objective,
            Constraints,
            Bounds,
            Done,
        }
        let err = |line: usize, reason: &str| PolytopeError::LpParse { line, reason: reason.into() };
        let mut model = LpModel::default();
        let mut section = Section::Preamble;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('\\').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lower = line.to_ascii_lowercase();
            match lower.as_str() {
                "minimize" | "maximize" | "minimum" | "maximum" | "min" | "max" => {
                    section = Section::Objective;
                    continue;
                }
                "subject to" | "such that" | "st" | "s.t." => {
                    section = Section::Constraints;
                    continue;
                }
                "bounds" => {
                    section = Section::Bounds;
                    continue;
                }
                "end" => {
                    section = Section::Done;
                    continue;
                }
                _ => {}
            }
            match section {
                Section::Preamble => return Err(err(line_no, "expected `Minimize`")),
                Section::Done => return Err(err(line_no, "content after `End`")),
                Section::Objective => {}
                Section::Constraints => {
                    let (name, body) = match line.split_once(':') {
                        Some((n, b)) => (n.trim().to_string(), b),
                        None => (format!("r{}", model.constraints.len() + 1), line),
                    };
                    let (lhs, rel, rhs) =
                        split_relation(body).ok_or_else(|| err(line_no, "missing relation"))?;
                    let terms = parse_terms(lhs).map_err(|r| err(line_no, &r))?;
                    let rhs = parse_number(rhs.trim())
                        .ok_or_else(|| err(line_no, "right-hand side is not a number"))?;
                    model.constraints.push(Constraint { name, terms, relation: rel, rhs });
                }
                Section::Bounds => {
                    let (name, bound) = parse_bound(line).map_err(|r| err(line_no, &r))?;
                    model.bounds.insert(name, bound);
                }
            }
        }
        if section != Section::Done {
            return Err(err(text.lines().count(), "missing `End`"));
        }
        Ok(model)
    }
}

/// Sort key putting `y_10` after `y_9`.
fn natural_key(name: &str) -> (String, Vec<u64>) {
    let mut prefix = String::new();
    let mut nums = Vec::new();
    for part in name.split('_') {
        match part.parse::<u64>() {
            Ok(n) => nums.push(n),
            Err(_) => prefix.push_str(part),
        }
    }
    (prefix, nums)
}

fn render_number(x: &BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// First term bare when its coefficient is 1; later terms always carry an
/// explicit signed coefficient.
fn render_terms(terms: &[(String, BigRational)]) -> String {
    let mut out = String::new();
    for (i, (v, c)) in terms.iter().enumerate() {
        if i == 0 {
            if c.is_one() {
                out.push_str(v);
            } else {
                let _ = write!(out, "{} {v}", render_number(c));
            }
        } else {
            let sign = if c.is_negative() { '-' } else { '+' };
            let _ = write!(out, " {sign} {} {v}", render_number(&c.abs()));
        }
    }
    if terms.is_empty() {
        out.push('0');
    }
    out
}

fn parse_number(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Ok(n) = s.parse::<BigInt>() {
        return Some(BigRational::from_integer(n));
    }
    let neg = s.starts_with('-');
    let body = s.trim_start_matches(['+', '-']);
    let (int, frac) = body.split_once('.')?;
    if !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) || int.len() + frac.len() == 0 {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    let v = BigRational::new(digits, scale);
    Some(if neg { -v } else { v })
}

fn split_relation(body: &str) -> Option<(&str, Relation, &str)> {
    for (tok, rel) in [("<=", Relation::Le), (">=", Relation::Ge), ("=<", Relation::Le), ("=>", Relation::Ge)] {
        if let Some((l, r)) = body.split_once(tok) {
            return Some((l, rel, r));
        }
    }
    if let Some((l, r)) = body.split_once('=') {
        return Some((l, Relation::Eq, r));
    }
    if let Some((l, r)) = body.split_once('<') {
        return Some((l, Relation::Le, r));
    }
    body.split_once('>').map(|(l, r)| (l, Relation::Ge, r))
}

fn is_name(tok: &str) -> bool {
    tok.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
}

fn parse_terms(expr: &str) -> Result<Vec<(String, BigRational)>, String> {
    let spaced = expr.replace('+', " + ").replace('-', " - ");
    let mut terms: Vec<(String, BigRational)> = Vec::new();
    let mut sign = BigRational::one();
    let mut coef: Option<BigRational> = None;
    for tok in spaced.split_whitespace() {
        match tok {
            "+" => {}
            "-" => sign = -sign,
            t if is_name(t) => {
                let c = coef.take().unwrap_or_else(BigRational::one) * &sign;
                terms.push((t.to_string(), c));
                sign = BigRational::one();
            }
            t => {
                if coef.is_some() {
                    return Err(format!("two coefficients in a row at `{t}`"));
                }
                coef = Some(parse_number(t).ok_or_else(|| format!("bad coefficient `{t}`"))?);
            }
        }
    }
    if let Some(c) = coef {
        // a lone constant such as the objective `0`
        if !c.is_zero() || !terms.is_empty() {
            return Err("dangling constant".into());
        }
    }
    Ok(terms)
}

fn parse_bound(line: &str) -> Result<(String, Bound), String> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let num = |s: &str| -> Result<Option<BigRational>, String> {
        match s.to_ascii_lowercase().as_str() {
            "-inf" | "-infinity" | "inf" | "+inf" | "infinity" | "+infinity" => Ok(None),
            _ => parse_number(s).map(Some).ok_or_else(|| format!("bad bound `{s}`")),
        }
    };
    match toks.as_slice() {
        [name, free] if free.eq_ignore_ascii_case("free") => {
            Ok((name.to_string(), Bound { lower: None, upper: None }))
        }
        [lo, "<=", name, "<=", hi] => Ok((name.to_string(), Bound { lower: num(lo)?, upper: num(hi)? })),
        [name, "=", v] => {
            let v = num(v)?;
            Ok((name.to_string(), Bound { lower: v.clone(), upper: v }))
        }
        [name, ">=", v] => Ok((name.to_string(), Bound { lower: num(v)?, upper: None })),
        [name, "<=", v] => Ok((
            name.to_string(),
            Bound { lower: Some(BigRational::zero()), upper: num(v)? },
        )),
        _ => Err(format!("unsupported bound `{line}`")),
    }
}
