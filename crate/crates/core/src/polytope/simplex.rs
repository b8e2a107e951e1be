//! Exact phase-1 simplex with Bland's rule.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::lp::{LpModel, Relation};

enum Column {
    Fixed(BigRational),
    Shifted { col: usize, lower: BigRational },
    Split { pos: usize, neg: usize },
}

struct Row {
    coefs: BTreeMap<usize, BigRational>,
    relation: Relation,
    rhs: BigRational,
}

/// Whether the constraints and bounds of `model` admit a point. Every
/// quantity is an exact rational.
pub fn is_feasible(model: &LpModel) -> bool {
    let vars: Vec<String> = model.variables().into_iter().collect();
    let mut ncols = 0;
    let mut columns = BTreeMap::new();
    let mut rows: Vec<Row> = Vec::new();
    for v in &vars {
        let b = model.bound(v);
        let column = match (b.lower, b.upper) {
            (Some(l), Some(u)) if l > u => return false,
            (Some(l), Some(u)) if l == u => Column::Fixed(l),
            (Some(l), u) => {
                let col = ncols;
                ncols += 1;
                if let Some(u) = u {
                    rows.push(Row {
                        coefs: BTreeMap::from([(col, BigRational::from_integer(1.into()))]),
                        relation: Relation::Le,
                        rhs: u - &l,
                    });
                }
                Column::Shifted { col, lower: l }
            }
            (None, u) => {
                let (pos, neg) = (ncols, ncols + 1);
                ncols += 2;
                if let Some(u) = u {
                    rows.push(Row {
                        coefs: BTreeMap::from([
                            (pos, BigRational::from_integer(1.into())),
                            (neg, BigRational::from_integer((-1).into())),
                        ]),
                        relation: Relation::Le,
                        rhs: u,
                    });
                }
                Column::Split { pos, neg }
            }
        };
        columns.insert(v.as_str(), column);
    }
    for c in &model.constraints {
        let mut coefs: BTreeMap<usize, BigRational> = BTreeMap::new();
        let mut rhs = c.rhs.clone();
        for (v, a) in &c.terms {
            match &columns[v.as_str()] {
                Column::Fixed(x) => rhs -= a * x,
                Column::Shifted { col, lower } => {
                    rhs -= a * lower;
                    *coefs.entry(*col).or_insert_with(BigRational::zero) += a;
                }
                Column::Split { pos, neg } => {
                    *coefs.entry(*pos).or_insert_with(BigRational::zero) += a;
                    *coefs.entry(*neg).or_insert_with(BigRational::zero) -= a;
                }
            }
        }
        coefs.retain(|_, a| !a.is_zero());
        if coefs.is_empty() {
            let zero = BigRational::zero();
            let ok = match c.relation {
                Relation::Eq => zero == rhs,
                Relation::Le => zero <= rhs,
                Relation::Ge => zero >= rhs,
            };
            if !ok {
                return false;
            }
            continue;
        }
        rows.push(Row { coefs, relation: c.relation, rhs });
    }
    Tableau::phase_one(ncols, rows)
}

struct Tableau {
    /// Constraint rows followed by the objective row; the last entry of each
    /// row is the right-hand side.
    a: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
    /// Columns allowed to enter: artificials never come back.
    enterable: Vec<bool>,
}

impl Tableau {
    fn phase_one(ncols: usize, rows: Vec<Row>) -> bool {
        let m = rows.len();
        if m == 0 {
            return true;
        }
        let nslack = rows.iter().filter(|r| r.relation != Relation::Eq).count();
        // rows needing an artificial: every row whose slack cannot start basic
        let mut needs_art = Vec::with_capacity(m);
        for r in &rows {
            let slack_sign_pos = match r.relation {
                Relation::Le => true,
                Relation::Ge => false,
                Relation::Eq => {
                    needs_art.push(true);
                    continue;
                }
            };
            // after making the rhs non-negative the slack keeps its sign iff rhs >= 0
            needs_art.push(slack_sign_pos == r.rhs.is_negative());
        }
        let nart = needs_art.iter().filter(|&&b| b).count();
        let width = ncols + nslack + nart;
        let mut a = vec![vec![BigRational::zero(); width + 1]; m + 1];
        let mut basis = vec![0; m];
        let mut enterable = vec![true; width];
        let (mut s, mut t) = (ncols, ncols + nslack);
        for (i, r) in rows.into_iter().enumerate() {
            let flip = r.rhs.is_negative();
            let sgn = |x: BigRational| if flip { -x } else { x };
            for (j, c) in r.coefs {
                a[i][j] = sgn(c);
            }
            a[i][width] = sgn(r.rhs);
            match r.relation {
                Relation::Le | Relation::Ge => {
                    let unit = BigRational::from_integer(if r.relation == Relation::Le { 1 } else { -1 }.into());
                    a[i][s] = sgn(unit);
                    if !needs_art[i] {
                        basis[i] = s;
                    }
                    s += 1;
                }
                Relation::Eq => {}
            }
            if needs_art[i] {
                a[i][t] = BigRational::from_integer(1.into());
                basis[i] = t;
                enterable[t] = false;
                t += 1;
            }
        }
        // objective: minimize the sum of artificials, priced out
        for i in 0..m {
            if needs_art[i] {
                for j in 0..=width {
                    if j < ncols + nslack || j == width {
                        let v = a[i][j].clone();
                        if !v.is_zero() {
                            a[m][j] -= v;
                        }
                    }
                }
            }
        }
        let mut tab = Tableau { a, basis, enterable };
        tab.run(m, width);
        tab.a[m][width].is_zero()
    }

    fn run(&mut self, m: usize, width: usize) {
        loop {
            let Some(enter) = (0..width).find(|&j| self.enterable[j] && self.a[m][j].is_negative())
            else {
                return;
            };
            let mut leave: Option<(usize, BigRational)> = None;
            for i in 0..m {
                let aij = &self.a[i][enter];
                if !aij.is_positive() {
                    continue;
                }
                let ratio = &self.a[i][width] / aij;
                let better = match &leave {
                    None => true,
                    Some((k, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            // phase-1 objective is bounded below by zero
            let (row, _) = leave.expect("bounded phase-one objective");
            self.pivot(row, enter, width);
        }
    }

    fn pivot(&mut self, row: usize, col: usize, width: usize) {
        let p = self.a[row][col].clone();
        for x in self.a[row].iter_mut() {
            if !x.is_zero() {
                *x /= &p;
            }
        }
        let nz: Vec<(usize, BigRational)> = (0..=width)
            .filter(|&j| !self.a[row][j].is_zero())
            .map(|j| (j, self.a[row][j].clone()))
            .collect();
        for i in 0..self.a.len() {
            if i == row || self.a[i][col].is_zero() {
                continue;
            }
            let f = self.a[i][col].clone();
            for (j, v) in &nz {
                self.a[i][*j] -= &f * v;
            }
        }
        self.basis[row] = col;
    }
}
