//! Exact linear programming over the rationals.
//!
//! Dense two-phase simplex with Bland's smallest-index rule, which cannot
//! cycle. Free variables are split as `x = x⁺ − x⁻`. Meant for desk-scale
//! systems; there is no floating point anywhere.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub const MAX_VARIABLES: usize = 64;
pub const MAX_CONSTRAINTS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { point: Vec<Rational>, value: Rational },
    Infeasible,
    Unbounded,
}

/// Optimizes `cᵀx` subject to `Ax ≤ b` with `x` free.
pub fn solve_lp(
    objective: &[Rational],
    sense: Sense,
    a: &[Vec<Rational>],
    b: &[Rational],
) -> Result<LpOutcome> {
    let n = objective.len();
    let m = a.len();
    if b.len() != m {
        return Err(Error::DimensionMismatch { expected: m, got: b.len() });
    }
    if let Some(row) = a.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: row.len() });
    }
    if n > MAX_VARIABLES || m > MAX_CONSTRAINTS {
        return Err(Error::Capacity(format!(
            "LP with {n} variables and {m} constraints exceeds {MAX_VARIABLES} × {MAX_CONSTRAINTS}"
        )));
    }

    // Columns: x⁺ (n), x⁻ (n), slacks (m), artificials (one per negative rhs).
    let negative: Vec<usize> = (0..m).filter(|&i| b[i].is_negative()).collect();
    let structural = 2 * n + m;
    let cols = structural + negative.len();
    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        basis: Vec::with_capacity(m),
    };
    let mut next_artificial = structural;
    for i in 0..m {
        let flip = b[i].is_negative();
        let sign = |v: &Rational| if flip { -v.clone() } else { v.clone() };
        let mut row = vec![Rational::zero(); cols];
        for j in 0..n {
            row[j] = sign(&a[i][j]);
            row[n + j] = -sign(&a[i][j]);
        }
        row[2 * n + i] = if flip { -Rational::one() } else { Rational::one() };
        let basic = if flip {
            row[next_artificial] = Rational::one();
            next_artificial += 1;
            next_artificial - 1
        } else {
            2 * n + i
        };
        t.rows.push(row);
        t.rhs.push(sign(&b[i]));
        t.basis.push(basic);
    }

    if !negative.is_empty() {
        let mut phase1 = vec![Rational::zero(); cols];
        for c in phase1.iter_mut().skip(structural) {
            *c = -Rational::one();
        }
        t.optimize(&phase1, cols);
        let infeasibility: Rational = t
            .basis
            .iter()
            .zip(&t.rhs)
            .filter(|(&j, _)| j >= structural)
            .map(|(_, v)| v.clone())
            .sum();
        if infeasibility.is_positive() {
            return Ok(LpOutcome::Infeasible);
        }
        t.expel_artificials(structural);
    }

    let mut cost = vec![Rational::zero(); cols];
    for j in 0..n {
        let c = match sense {
            Sense::Maximize => objective[j].clone(),
            Sense::Minimize => -objective[j].clone(),
        };
        cost[n + j] = -c.clone();
        cost[j] = c;
    }
    if !t.optimize(&cost, structural) {
        return Ok(LpOutcome::Unbounded);
    }
    let mut z = vec![Rational::zero(); structural];
    for (r, &j) in t.basis.iter().enumerate() {
        z[j] = t.rhs[r].clone();
    }
    let point: Vec<Rational> = (0..n).map(|j| &z[j] - &z[n + j]).collect();
    let value = point
        .iter()
        .zip(objective)
        .map(|(x, c)| x * c)
        .sum();
    Ok(LpOutcome::Optimal { point, value })
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        self.rhs[r] /= &p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let factor = self.rows[i][c].clone();
            for (v, pv) in self.rows[i].iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
            self.rhs[i] -= &factor * &pivot_rhs;
        }
        self.basis[r] = c;
    }

    /// Maximizes `costᵀz` over columns `< allowed`; false if unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut reduced = cost[j].clone();
                for (r, &bj) in self.basis.iter().enumerate() {
                    if !self.rows[r][j].is_zero() {
                        reduced -= &cost[bj] * &self.rows[r][j];
                    }
                }
                reduced.is_positive()
            });
            let Some(c) = entering else { return true };
            let mut leaving: Option<(usize, Rational)> = None;
            for r in 0..self.rows.len() {
                let coef = &self.rows[r][c];
                if !coef.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[r] / coef;
                let better = match &leaving {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leaving = Some((r, ratio));
                }
            }
            let Some((r, _)) = leaving else { return false };
            self.pivot(r, c);
        }
    }

    /// Pivots zero-valued artificials out of the basis, dropping rows that
    /// turn out to be redundant.
    fn expel_artificials(&mut self, structural: usize) {
        let mut r = 0;
        while r < self.rows.len() {
            if self.basis[r] >= structural {
                match (0..structural).find(|&j| !self.rows[r][j].is_zero()) {
                    Some(c) => self.pivot(r, c),
                    None => {
                        self.rows.remove(r);
                        self.rhs.remove(r);
                        self.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for row in &mut self.rows {
            row.truncate(structural);
        }
    }
}
