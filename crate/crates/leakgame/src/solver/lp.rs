//! Dense two-phase tableau simplex for small linear programs.
//!
//! Minimizes `c . x` over `x >= 0` subject to a list of `<=`, `>=`, or `=`
//! constraints. Bland's rule everywhere, so the pivot sequence is
//! deterministic and cannot cycle. Problem sizes here are tiny (tens of
//! variables, around a hundred constraints), so no factorization or
//! sparsity tricks.

use crate::error::{Error, Result};

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

struct Tableau {
    /// `rows[i]` holds the constraint coefficients followed by the rhs.
    rows: Vec<Vec<f64>>,
    /// Basic variable of each row.
    basis: Vec<usize>,
    num_structural: usize,
    /// Column indices of artificial variables (never allowed to re-enter).
    artificial_from: usize,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        *self.rows[i].last().unwrap()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let width = self.rows[row].len();
        let p = self.rows[row][col];
        for v in &mut self.rows[row] {
            *v /= p;
        }
        for i in 0..self.rows.len() {
            if i == row {
                continue;
            }
            let factor = self.rows[i][col];
            if factor != 0.0 {
                for j in 0..width {
                    let delta = factor * self.rows[row][j];
                    self.rows[i][j] -= delta;
                }
                self.rows[i][col] = 0.0;
            }
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    /// Runs the simplex loop for the cost vector `cost` (length = number of
    /// columns, rhs excluded). Returns the attained objective value.
    fn optimize(&mut self, cost: &[f64], allow_artificial: bool) -> Result<f64> {
        let m = self.rows.len();
        let ncols = cost.len();
        // Reduced-cost row, priced out against the current basis.
        let mut reduced = cost.to_vec();
        let mut obj = 0.0;
        for i in 0..m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for j in 0..ncols {
                    reduced[j] -= cb * self.rows[i][j];
                }
                obj -= cb * self.rhs(i);
            }
        }
        // obj currently holds -(c_B . rhs); the true objective is its negation.
        let pivot_limit = 200 * (m + ncols + 10);
        loop {
            // Entering column: Bland - the lowest index with negative
            // reduced cost.
            let mut entering = None;
            for (j, &r) in reduced.iter().enumerate() {
                if !allow_artificial && j >= self.artificial_from {
                    break;
                }
                if r < -TOL {
                    entering = Some(j);
                    break;
                }
            }
            let Some(col) = entering else {
                return Ok(-obj);
            };
            // Leaving row: minimum ratio, ties to the lowest basis index.
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..m {
                let a = self.rows[i][col];
                if a > TOL {
                    let ratio = self.rhs(i) / a;
                    let better = match leaving {
                        None => true,
                        Some((best_i, best_ratio)) => {
                            ratio < best_ratio - TOL
                                || (ratio < best_ratio + TOL
                                    && self.basis[i] < self.basis[best_i])
                        }
                    };
                    if better {
                        leaving = Some((i, ratio));
                    }
                }
            }
            let Some((row, _)) = leaving else {
                return Err(Error::LinearProgram("objective is unbounded".into()));
            };
            // Update the reduced-cost row like any other row.
            let factor = reduced[col];
            self.pivot(row, col);
            if factor != 0.0 {
                for j in 0..ncols {
                    reduced[j] -= factor * self.rows[row][j];
                }
                reduced[col] = 0.0;
                obj -= factor * self.rhs(row);
            }
            if self.pivots > pivot_limit {
                return Err(Error::LinearProgram("pivot limit exceeded".into()));
            }
        }
    }
}

/// Minimizes `objective . x` subject to `constraints` and `x >= 0`.
pub fn minimize(objective: &[f64], constraints: &[Constraint]) -> Result<LpSolution> {
    let n = objective.len();
    for (i, c) in constraints.iter().enumerate() {
        if c.coeffs.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "constraint {i} has {} coefficients, expected {n}",
                c.coeffs.len()
            )));
        }
        if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("constraint {i}")));
        }
    }
    let m = constraints.len();

    // Count auxiliary columns. Rows are normalized to rhs >= 0 first.
    let mut slacks = 0;
    let mut artificials = 0;
    let mut rels = Vec::with_capacity(m);
    for c in constraints {
        let rel = if c.rhs < 0.0 {
            match c.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            }
        } else {
            c.relation
        };
        match rel {
            Relation::Le => slacks += 1,
            Relation::Ge => {
                slacks += 1;
                artificials += 1;
            }
            Relation::Eq => artificials += 1,
        }
        rels.push(rel);
    }
    let artificial_from = n + slacks;
    let ncols = artificial_from + artificials;

    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut next_slack = n;
    let mut next_artificial = artificial_from;
    for (c, &rel) in constraints.iter().zip(&rels) {
        let flip = if c.rhs < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; ncols + 1];
        for (j, &v) in c.coeffs.iter().enumerate() {
            row[j] = flip * v;
        }
        row[ncols] = flip * c.rhs;
        match rel {
            Relation::Le => {
                row[next_slack] = 1.0;
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                row[next_artificial] = 1.0;
                basis.push(next_artificial);
                next_artificial += 1;
            }
            Relation::Eq => {
                row[next_artificial] = 1.0;
                basis.push(next_artificial);
                next_artificial += 1;
            }
        }
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        basis,
        num_structural: n,
        artificial_from,
        pivots: 0,
    };

    if artificials > 0 {
        let mut phase1 = vec![0.0; ncols];
        for c in phase1.iter_mut().skip(artificial_from) {
            *c = 1.0;
        }
        let infeasibility = tab.optimize(&phase1, true)?;
        if infeasibility > 1e-7 {
            return Err(Error::LinearProgram(format!(
                "infeasible (residual {infeasibility:.3e})"
            )));
        }
        // Drive any artificial still in the basis out of it; if its row has
        // no usable structural column the constraint is redundant and the
        // artificial stays basic at zero (it is barred from re-entering).
        for i in 0..tab.rows.len() {
            if tab.basis[i] >= artificial_from {
                if let Some(col) =
                    (0..artificial_from).find(|&j| tab.rows[i][j].abs() > TOL)
                {
                    tab.pivot(i, col);
                }
            }
        }
    }

    let mut phase2 = vec![0.0; ncols];
    phase2[..n].copy_from_slice(objective);
    let value = tab.optimize(&phase2, false)?;

    let mut x = vec![0.0; n];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < tab.num_structural {
            x[b] = tab.rhs(i);
        }
    }
    Ok(LpSolution {
        x,
        objective: value,
        pivots: tab.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn le(coeffs: Vec<f64>, rhs: f64) -> Constraint {
        Constraint {
            coeffs,
            relation: Relation::Le,
            rhs,
        }
    }

    fn ge(coeffs: Vec<f64>, rhs: f64) -> Constraint {
        Constraint {
            coeffs,
            relation: Relation::Ge,
            rhs,
        }
    }

    fn eq(coeffs: Vec<f64>, rhs: f64) -> Constraint {
        Constraint {
            coeffs,
            relation: Relation::Eq,
            rhs,
        }
    }

    #[test]
    fn simple_box_maximum() {
        // max x + y over the triangle x + y <= 1.
        let sol = minimize(&[-1.0, -1.0], &[le(vec![1.0, 1.0], 1.0)]).unwrap();
        assert!((sol.objective + 1.0).abs() < 1e-9);
        assert!((sol.x[0] + sol.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_phase_with_lower_bound() {
        let sol = minimize(
            &[1.0, 0.0],
            &[ge(vec![1.0, 0.0], 3.0), le(vec![1.0, 1.0], 5.0)],
        )
        .unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-9);
        assert!((sol.x[0] - 3.0).abs() < 1e-9);
    }

    #[test]
    fn equality_constraint() {
        let sol = minimize(
            &[2.0, 1.0],
            &[eq(vec![1.0, 1.0], 2.0), le(vec![0.0, 1.0], 1.5)],
        )
        .unwrap();
        // The cheaper variable is capped at 1.5; the equality forces the
        // remaining 0.5 onto the expensive one.
        assert!((sol.objective - 2.5).abs() < 1e-9);
        assert!((sol.x[0] - 0.5).abs() < 1e-9);
        assert!((sol.x[1] - 1.5).abs() < 1e-9);
    }

    #[test]
    fn negative_rhs_is_normalized() {
        // x0 - x1 >= -1 with rhs negated internally.
        let sol = minimize(
            &[0.0, 1.0],
            &[ge(vec![1.0, -1.0], -1.0), ge(vec![0.0, 1.0], 0.5)],
        )
        .unwrap();
        assert!((sol.objective - 0.5).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible() {
        let err = minimize(
            &[1.0],
            &[le(vec![1.0], 1.0), ge(vec![1.0], 2.0)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::LinearProgram(_)));
    }

    #[test]
    fn detects_unbounded() {
        let err = minimize(&[-1.0, 0.0], &[le(vec![0.0, 1.0], 1.0)]).unwrap_err();
        assert!(matches!(err, Error::LinearProgram(_)));
    }

    #[test]
    fn degenerate_rows_do_not_cycle() {
        // Several redundant zero-rhs rows around a tiny optimum.
        let sol = minimize(
            &[-1.0, -2.0],
            &[
                le(vec![1.0, 0.0], 0.0),
                le(vec![1.0, 0.0], 0.0),
                le(vec![1.0, 1.0], 1.0),
                eq(vec![1.0, 0.0], 0.0),
            ],
        )
        .unwrap();
        assert!((sol.objective + 2.0).abs() < 1e-9);
        assert!(sol.x[0].abs() < 1e-9 && (sol.x[1] - 1.0).abs() < 1e-9);
    }
}
