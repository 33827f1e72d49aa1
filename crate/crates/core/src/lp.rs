//! Fractional transversal number via a dense two-phase simplex.
//!
//! The simplex works over any [`Scalar`]; with an exact rational type no
//! rounding ever happens. Pivoting uses Bland's rule, so it cannot cycle.

use serde::{Deserialize, Serialize};

use crate::hypergraph::{CoverFunction, Hypergraph};
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint<T> {
    pub coeffs: Vec<T>,
    pub relation: Relation,
    pub rhs: T,
}

/// `minimize objective·x` subject to the constraints and `x ≥ 0`.
#[derive(Debug, Clone)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub constraints: Vec<Constraint<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpStatus<T> {
    Optimal { value: T, x: Vec<T> },
    Infeasible,
    Unbounded,
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    /// Reduced costs; the last entry is minus the objective value.
    cost: Vec<T>,
    basis: Vec<usize>,
    cols: usize,
}

impl<T: Scalar> Tableau<T> {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for x in self.rows[row].iter_mut() {
            *x = x.clone() / p.clone();
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col].clone();
            if !f.is_zero() {
                for (x, y) in r.iter_mut().zip(&pivot_row) {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        let f = self.cost[col].clone();
        if !f.is_zero() {
            for (x, y) in self.cost.iter_mut().zip(&pivot_row) {
                *x = x.clone() - f.clone() * y.clone();
            }
        }
        self.basis[row] = col;
    }

    fn set_cost(&mut self, costs: &[T]) {
        let mut row = costs.to_vec();
        row.push(T::zero());
        for (i, &b) in self.basis.iter().enumerate() {
            let c = row[b].clone();
            if !c.is_zero() {
                for (x, y) in row.iter_mut().zip(&self.rows[i]) {
                    *x = x.clone() - c.clone() * y.clone();
                }
            }
        }
        self.cost = row;
    }

    /// Runs Bland-rule pivots over `allowed` columns. `false` if unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| self.cost[j].definitely_lt(&T::zero()));
            let Some(col) = entering else { return true };
            let rhs = self.cols;
            let mut leave: Option<(usize, T)> = None;
            for (i, r) in self.rows.iter().enumerate() {
                if r[col].definitely_gt(&T::zero()) {
                    let ratio = r[rhs].clone() / r[col].clone();
                    let better = match &leave {
                        None => true,
                        Some((li, best)) => {
                            ratio.definitely_lt(best) || (ratio.approx_eq(best) && self.basis[i] < self.basis[*li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            match leave {
                None => return false,
                Some((row, _)) => self.pivot(row, col),
            }
        }
    }
}

/// Solves a linear program exactly (for exact scalars).
pub fn minimize<T: Scalar>(lp: &LinearProgram<T>) -> LpStatus<T> {
    let n = lp.objective.len();
    let m = lp.constraints.len();
    // Normalize so every right-hand side is nonnegative.
    let normalized: Vec<(Vec<T>, Relation, T)> = lp
        .constraints
        .iter()
        .map(|c| {
            assert_eq!(c.coeffs.len(), n, "constraint width must match the objective");
            if c.rhs.definitely_lt(&T::zero()) {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|x| -x.clone()).collect(), flipped, -c.rhs.clone())
            } else {
                (c.coeffs.clone(), c.relation, c.rhs.clone())
            }
        })
        .collect();
    let n_slack = normalized.iter().filter(|c| c.1 != Relation::Eq).count();
    let n_art = normalized.iter().filter(|c| c.1 != Relation::Le).count();
    let cols = n + n_slack + n_art;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut s, mut a) = (n, n + n_slack);
    for (coeffs, rel, rhs) in &normalized {
        let mut row = coeffs.clone();
        row.resize(cols + 1, T::zero());
        row[cols] = rhs.clone();
        match rel {
            Relation::Le => {
                row[s] = T::one();
                basis.push(s);
                s += 1;
            }
            Relation::Ge => {
                row[s] = -T::one();
                s += 1;
                row[a] = T::one();
                basis.push(a);
                a += 1;
            }
            Relation::Eq => {
                row[a] = T::one();
                basis.push(a);
                a += 1;
            }
        }
        rows.push(row);
    }
    let mut tab = Tableau { rows, cost: Vec::new(), basis, cols };

    if n_art > 0 {
        let mut phase1 = vec![T::zero(); cols];
        for c in phase1.iter_mut().skip(n + n_slack) {
            *c = T::one();
        }
        tab.set_cost(&phase1);
        tab.optimize(cols);
        let infeasibility = -tab.cost[cols].clone();
        if infeasibility.definitely_gt(&T::zero()) {
            return LpStatus::Infeasible;
        }
        // Drive zero-level artificials out of the basis; drop redundant rows.
        let mut i = 0;
        while i < tab.rows.len() {
            if tab.basis[i] >= n + n_slack {
                match (0..n + n_slack).find(|&j| !tab.rows[i][j].approx_zero()) {
                    Some(j) => {
                        tab.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        tab.rows.remove(i);
                        tab.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    let mut phase2 = lp.objective.clone();
    phase2.resize(cols, T::zero());
    tab.set_cost(&phase2);
    if !tab.optimize(n + n_slack) {
        return LpStatus::Unbounded;
    }
    let mut x = vec![T::zero(); n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rows[i][cols].clone();
        }
    }
    let value = lp
        .objective
        .iter()
        .zip(&x)
        .fold(T::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
    LpStatus::Optimal { value, x }
}

/// `τ*` together with an optimal fractional transversal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpResult<T = Rational> {
    pub value: T,
    pub certificate: CoverFunction<T>,
}

fn cover_constraints<T: Scalar>(h: &Hypergraph) -> Vec<Constraint<T>> {
    let n = h.n();
    let mut cons: Vec<Constraint<T>> = h
        .edges()
        .iter()
        .map(|e| {
            let mut coeffs = vec![T::zero(); n];
            for &v in e {
                coeffs[v] = T::one();
            }
            Constraint { coeffs, relation: Relation::Ge, rhs: T::one() }
        })
        .collect();
    for v in 0..n {
        let mut coeffs = vec![T::zero(); n];
        coeffs[v] = T::one();
        cons.push(Constraint { coeffs, relation: Relation::Le, rhs: T::one() });
    }
    cons
}

fn unit<T: Scalar>(n: usize, i: usize) -> Vec<T> {
    (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()
}

/// Fractional transversal number over the scalar type `T`.
///
/// The certificate is the lexicographically smallest optimal solution: after
/// the optimum is known, each coordinate in turn is minimized over the
/// optimal face.
pub fn tau_star_in<T: Scalar>(h: &Hypergraph) -> LpResult<T> {
    let n = h.n();
    let base = cover_constraints::<T>(h);
    let ones = vec![T::one(); n];
    let value = match minimize(&LinearProgram { objective: ones.clone(), constraints: base.clone() }) {
        LpStatus::Optimal { value, .. } => value,
        other => unreachable!("covering LP with f = 1 feasible cannot be {other:?}"),
    };
    let mut constraints = base;
    constraints.push(Constraint { coeffs: ones, relation: Relation::Eq, rhs: value.clone() });
    let mut fixed: Vec<T> = Vec::with_capacity(n);
    for i in 0..n {
        let objective = unit::<T>(n, i);
        let xi = match minimize(&LinearProgram { objective, constraints: constraints.clone() }) {
            LpStatus::Optimal { value, .. } => value,
            other => unreachable!("optimal face is nonempty, got {other:?}"),
        };
        constraints.push(Constraint { coeffs: unit::<T>(n, i), relation: Relation::Eq, rhs: xi.clone() });
        fixed.push(xi);
    }
    let certificate = CoverFunction::new(fixed).expect("LP solution respects 0 <= f <= 1");
    LpResult { value, certificate }
}

/// Exact fractional transversal number `τ*`.
pub fn tau_star(h: &Hypergraph) -> LpResult {
    tau_star_in::<Rational>(h)
}
