//! Exact two-phase simplex over an ordered field.
//!
//! Dense tableau, Bland's rule for both the entering and the leaving
//! variable, so the method terminates on degenerate programs. All arithmetic
//! is exact; a reported optimum satisfies every constraint with zero
//! residual.

use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::Scalar;

/// `maximize objective . v` subject to equalities, `<=` inequalities and
/// per-variable bounds.
#[derive(Clone, Debug)]
pub struct LinearProgram<F> {
    pub num_vars: usize,
    pub objective: Vec<F>,
    pub eq_constraints: Vec<(Vec<F>, F)>,
    pub ineq_constraints: Vec<(Vec<F>, F)>,
    /// `(lower, upper)`; `None` means unbounded on that side.
    pub var_bounds: Vec<(Option<F>, Option<F>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome<F> {
    Optimal {
        value: F,
        point: Vec<F>,
        /// Basic columns of the internal standard form at termination.
        basis: Vec<usize>,
    },
    /// Phase one stopped with a positive total infeasibility.
    Infeasible { phase_one_value: F },
    /// A feasible point plus an improving direction along which every
    /// constraint stays satisfied.
    Unbounded { point: Vec<F>, ray: Vec<F> },
}

impl<F: Scalar> LpOutcome<F> {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Infeasible { .. } => LpStatus::Infeasible,
            LpOutcome::Unbounded { .. } => LpStatus::Unbounded,
        }
    }

    pub fn value(&self) -> Option<&F> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }

    pub fn point(&self) -> Option<&[F]> {
        match self {
            LpOutcome::Optimal { point, .. } | LpOutcome::Unbounded { point, .. } => Some(point),
            LpOutcome::Infeasible { .. } => None,
        }
    }
}

impl<F: Scalar> LinearProgram<F> {
    /// A program over `num_vars` nonnegative variables with zero objective.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![F::zero(); num_vars],
            eq_constraints: Vec::new(),
            ineq_constraints: Vec::new(),
            var_bounds: vec![(Some(F::zero()), None); num_vars],
        }
    }

    pub fn maximize(mut self, objective: Vec<F>) -> Self {
        self.objective = objective;
        self
    }

    pub fn add_eq(&mut self, coeffs: Vec<F>, rhs: F) {
        self.eq_constraints.push((coeffs, rhs));
    }

    pub fn add_le(&mut self, coeffs: Vec<F>, rhs: F) {
        self.ineq_constraints.push((coeffs, rhs));
    }

    pub fn add_ge(&mut self, coeffs: Vec<F>, rhs: F) {
        self.ineq_constraints
            .push((coeffs.into_iter().map(|c| -c).collect(), -rhs));
    }

    pub fn set_bounds(&mut self, var: usize, lower: Option<F>, upper: Option<F>) {
        self.var_bounds[var] = (lower, upper);
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars;
        if self.objective.len() != n || self.var_bounds.len() != n {
            return Err(Error::Dimension(format!(
                "objective/bounds must have {n} entries"
            )));
        }
        for (i, (row, _)) in self
            .eq_constraints
            .iter()
            .chain(&self.ineq_constraints)
            .enumerate()
        {
            if row.len() != n {
                return Err(Error::Dimension(format!(
                    "constraint {i} has {} coefficients, expected {n}",
                    row.len()
                )));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, point: &[F]) -> F {
        crate::linalg::dot(&self.objective, point)
    }

    /// Exact feasibility of `point`.
    pub fn is_feasible(&self, point: &[F]) -> bool {
        if point.len() != self.num_vars {
            return false;
        }
        let bounds_ok = point.iter().zip(&self.var_bounds).all(|(v, (lo, hi))| {
            lo.as_ref().is_none_or(|l| v >= l) && hi.as_ref().is_none_or(|h| v <= h)
        });
        bounds_ok
            && self
                .eq_constraints
                .iter()
                .all(|(row, rhs)| crate::linalg::dot(row, point) == *rhs)
            && self
                .ineq_constraints
                .iter()
                .all(|(row, rhs)| crate::linalg::dot(row, point) <= *rhs)
    }

    pub fn solve(&self) -> Result<LpOutcome<F>> {
        self.validate()?;
        Ok(StandardForm::build(self).solve())
    }
}

/// Finds any point satisfying the constraints of `lp` (its objective is
/// ignored).
pub fn feasible_point<F: Scalar>(lp: &LinearProgram<F>) -> Result<LpOutcome<F>> {
    let mut lp = lp.clone();
    lp.objective = vec![F::zero(); lp.num_vars];
    lp.solve()
}

/// Original variable `j` as `offset + sum(sign * y_k)` over standard columns.
struct VarMap<F> {
    offset: F,
    terms: Vec<(usize, bool)>,
}

struct StandardForm<F> {
    /// Rows `[coeffs | rhs]`, rhs >= 0.
    rows: Vec<Vec<F>>,
    num_struct: usize,
    map: Vec<VarMap<F>>,
    cost: Vec<F>,
    cost_offset: F,
    num_orig: usize,
}

impl<F: Scalar> StandardForm<F> {
    fn build(lp: &LinearProgram<F>) -> Self {
        let mut map = Vec::with_capacity(lp.num_vars);
        let mut ncols = 0;
        let mut upper_rows: Vec<(usize, F)> = Vec::new();
        for (lo, hi) in &lp.var_bounds {
            let m = match (lo, hi) {
                (Some(l), hi) => {
                    if let Some(h) = hi {
                        upper_rows.push((ncols, h.clone() - l.clone()));
                    }
                    VarMap {
                        offset: l.clone(),
                        terms: vec![(ncols, true)],
                    }
                }
                (None, Some(h)) => VarMap {
                    offset: h.clone(),
                    terms: vec![(ncols, false)],
                },
                (None, None) => {
                    ncols += 1;
                    VarMap {
                        offset: F::zero(),
                        terms: vec![(ncols - 1, true), (ncols, false)],
                    }
                }
            };
            ncols += 1;
            map.push(m);
        }

        let num_slack = lp.ineq_constraints.len() + upper_rows.len();
        let num_struct = ncols + num_slack;
        let substitute = |coeffs: &[F], rhs: &F| -> Vec<F> {
            let mut row = vec![F::zero(); num_struct + 1];
            let mut b = rhs.clone();
            for (a, m) in coeffs.iter().zip(&map) {
                if a.is_zero() {
                    continue;
                }
                b.sub_mul(a, &m.offset);
                for &(k, positive) in &m.terms {
                    if positive {
                        row[k].add_ref(a);
                    } else {
                        row[k].sub_mul(a, &F::one());
                    }
                }
            }
            row[num_struct] = b;
            row
        };

        let mut rows = Vec::new();
        for (coeffs, rhs) in &lp.eq_constraints {
            rows.push(substitute(coeffs, rhs));
        }
        let mut slack = ncols;
        for (coeffs, rhs) in &lp.ineq_constraints {
            let mut row = substitute(coeffs, rhs);
            row[slack] = F::one();
            slack += 1;
            rows.push(row);
        }
        for (col, cap) in upper_rows {
            let mut row = vec![F::zero(); num_struct + 1];
            row[col] = F::one();
            row[slack] = F::one();
            row[num_struct] = cap;
            slack += 1;
            rows.push(row);
        }
        for row in rows.iter_mut() {
            if row[num_struct].is_negative() {
                for v in row.iter_mut() {
                    *v = -v.clone();
                }
            }
        }

        let mut cost = vec![F::zero(); num_struct];
        let mut cost_offset = F::zero();
        for (c, m) in lp.objective.iter().zip(&map) {
            if c.is_zero() {
                continue;
            }
            cost_offset.add_ref(&c.mul_ref(&m.offset));
            for &(k, positive) in &m.terms {
                if positive {
                    cost[k].add_ref(c);
                } else {
                    cost[k].sub_mul(c, &F::one());
                }
            }
        }

        StandardForm {
            rows,
            num_struct,
            map,
            cost,
            cost_offset,
            num_orig: lp.num_vars,
        }
    }

    fn to_original(&self, y: &[F], with_offset: bool) -> Vec<F> {
        (0..self.num_orig)
            .map(|j| {
                let m = &self.map[j];
                let mut v = if with_offset {
                    m.offset.clone()
                } else {
                    F::zero()
                };
                for &(k, positive) in &m.terms {
                    if positive {
                        v.add_ref(&y[k]);
                    } else {
                        v.sub_mul(&y[k], &F::one());
                    }
                }
                v
            })
            .collect()
    }

    fn solve(self) -> LpOutcome<F> {
        let m = self.rows.len();
        let n = self.num_struct;
        // Tableau columns: structural, then one artificial per row, then rhs.
        let width = n + m + 1;
        let rhs = n + m;
        let mut t = Tableau {
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let mut row = Vec::with_capacity(width);
                    row.extend_from_slice(&r[..n]);
                    row.extend((0..m).map(|k| if k == i { F::one() } else { F::zero() }));
                    row.push(r[n].clone());
                    row
                })
                .collect(),
            basis: (n..n + m).collect(),
            z: vec![F::zero(); width],
            allowed: n + m,
        };

        // Phase one: maximize -(sum of artificials).
        let mut phase1_cost = vec![F::zero(); n + m];
        for c in phase1_cost[n..].iter_mut() {
            *c = -F::one();
        }
        t.price(&phase1_cost);
        let unbounded = t.run();
        debug_assert!(unbounded.is_none(), "phase one is bounded");
        let infeasibility = t.z[rhs].clone();
        if infeasibility.is_positive() {
            return LpOutcome::Infeasible {
                phase_one_value: infeasibility,
            };
        }

        // Drive zero-level artificials out of the basis or drop their rows.
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] < n {
                r += 1;
                continue;
            }
            match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => {
                    t.pivot(r, j);
                    r += 1;
                }
                None => {
                    t.rows.remove(r);
                    t.basis.remove(r);
                }
            }
        }
        t.allowed = n;

        let mut cost = self.cost.clone();
        cost.extend((0..m).map(|_| F::zero()));
        t.price(&cost);
        if let Some(col) = t.run() {
            let y = t.basic_solution(n);
            let mut dir = vec![F::zero(); n];
            dir[col] = F::one();
            for (i, &bv) in t.basis.iter().enumerate() {
                dir[bv] = -t.rows[i][col].clone();
            }
            return LpOutcome::Unbounded {
                point: self.to_original(&y, true),
                ray: self.to_original(&dir, false),
            };
        }
        let y = t.basic_solution(n);
        let point = self.to_original(&y, true);
        let mut value = -t.z[rhs].clone();
        value.add_ref(&self.cost_offset);
        let mut basis = t.basis.clone();
        basis.sort_unstable();
        LpOutcome::Optimal {
            value,
            point,
            basis,
        }
    }
}

struct Tableau<F> {
    rows: Vec<Vec<F>>,
    basis: Vec<usize>,
    /// Reduced costs; the last entry holds minus the objective value.
    z: Vec<F>,
    /// Columns `>= allowed` never enter the basis.
    allowed: usize,
}

impl<F: Scalar> Tableau<F> {
    fn rhs(&self) -> usize {
        self.z.len() - 1
    }

    fn price(&mut self, cost: &[F]) {
        let width = self.z.len();
        let mut z: Vec<F> = cost
            .iter()
            .cloned()
            .chain(std::iter::once(F::zero()))
            .collect();
        debug_assert_eq!(z.len(), width);
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            let cb = &cost[bv];
            if cb.is_zero() {
                continue;
            }
            for (zj, rj) in z.iter_mut().zip(row) {
                zj.sub_mul(cb, rj);
            }
        }
        self.z = z;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = F::one().div_ref(&self.rows[r][c]);
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v = v.mul_ref(&inv);
            }
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                v.sub_mul(&f, pv);
            }
        }
        if !self.z[c].is_zero() {
            let f = self.z[c].clone();
            for (v, pv) in self.z.iter_mut().zip(&pivot_row) {
                v.sub_mul(&f, pv);
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = c;
    }

    /// Iterates to optimality. Returns the entering column if an unbounded
    /// direction is found.
    fn run(&mut self) -> Option<usize> {
        let rhs = self.rhs();
        loop {
            let c =
                (0..self.allowed).find(|&j| self.z[j].is_positive() && !self.basis.contains(&j))?;
            let mut best: Option<(usize, F)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if !row[c].is_positive() {
                    continue;
                }
                let ratio = row[rhs].div_ref(&row[c]);
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return Some(c),
            }
        }
    }

    fn basic_solution(&self, n: usize) -> Vec<F> {
        let rhs = self.rhs();
        let mut y = vec![F::zero(); n];
        for (row, &bv) in self.rows.iter().zip(&self.basis) {
            if bv < n {
                y[bv] = row[rhs].clone();
            }
        }
        y
    }
}
