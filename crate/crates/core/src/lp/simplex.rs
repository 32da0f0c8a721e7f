//! Dense two-phase tableau simplex.
//!
//! Pricing is Dantzig's rule, switching to Bland's rule after a run of
//! degenerate pivots and back after the first non-degenerate one. The final
//! basis is refactored with an LU decomposition to recompute the primal values
//! and the row duals from the original data.

use super::{Row, Sense};
use crate::error::{Error, Result};

/// Largest tableau the solver will allocate, in cells.
pub const MAX_CELLS: usize = 25_000_000;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const DEGENERATE_RUN: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Optimal {
        x: Vec<f64>,
        /// One multiplier per row: the objective's sensitivity to its right-hand side.
        duals: Vec<f64>,
        objective: f64,
    },
    Infeasible,
    Unbounded,
}

struct Tableau {
    m: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    artificial: Vec<bool>,
    reduced: Vec<f64>,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.data[i * self.width + self.width - 1]
    }

    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.width + j]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let piv = self.data[r * w + c];
        {
            let row = &mut self.data[r * w..(r + 1) * w];
            for v in row.iter_mut() {
                *v /= piv;
            }
            row[c] = 1.0;
        }
        let nz: Vec<usize> = (0..w).filter(|&j| self.data[r * w + j] != 0.0).collect();
        let (before, rest) = self.data.split_at_mut(r * w);
        let (pivot_row, after) = rest.split_at_mut(w);
        let apply = |row: &mut [f64]| {
            let f = row[c];
            if f != 0.0 {
                for &j in &nz {
                    row[j] -= f * pivot_row[j];
                }
                row[c] = 0.0;
            }
        };
        before.chunks_exact_mut(w).for_each(apply);
        after.chunks_exact_mut(w).for_each(apply);
        let f = self.reduced[c];
        if f != 0.0 {
            for &j in &nz {
                self.reduced[j] -= f * pivot_row[j];
            }
            self.reduced[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Resets the objective row for `cost` given the current basis.
    fn price(&mut self, cost: &[f64]) {
        let w = self.width;
        self.reduced = cost.to_vec();
        self.reduced.push(0.0);
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.data[i * w..(i + 1) * w];
                for (d, a) in self.reduced.iter_mut().zip(row) {
                    *d -= cb * a;
                }
            }
        }
        for &b in &self.basis {
            self.reduced[b] = 0.0;
        }
    }

    /// Runs pivots until optimal. Returns false when unbounded.
    fn optimize(&mut self, max_iter: usize) -> Result<bool> {
        let w = self.width;
        let mut degenerate = 0;
        for _ in 0..max_iter {
            let bland = degenerate >= DEGENERATE_RUN;
            let candidates =
                (0..w - 1).filter(|&j| !self.artificial[j] && self.reduced[j] < -COST_TOL);
            let entering = if bland {
                candidates.into_iter().next()
            } else {
                candidates.min_by(|&a, &b| self.reduced[a].total_cmp(&self.reduced[b]))
            };
            let Some(c) = entering else {
                return Ok(true);
            };

            let mut leave: Option<(usize, f64, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                let better = match leave {
                    None => true,
                    Some((r, best, best_a)) => {
                        let slack = 1e-12 * (1.0 + best.abs());
                        if ratio < best - slack {
                            true
                        } else if ratio <= best + slack {
                            if bland {
                                self.basis[i] < self.basis[r]
                            } else {
                                a > best_a
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio, a));
                }
            }
            let Some((r, ratio, _)) = leave else {
                return Ok(false);
            };
            if ratio == 0.0 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(r, c);
        }
        Err(Error::Solver(format!(
            "no convergence within {max_iter} pivots"
        )))
    }
}

/// Transformed column data used to refactor the final basis.
struct Columns {
    entries: Vec<Vec<(usize, f64)>>,
}

/// Solves `min c.x` subject to `rows`, `x >= 0`.
pub fn solve(objective: &[f64], rows: &[Row]) -> Result<Outcome> {
    let n = objective.len();
    let m = rows.len();
    if m == 0 {
        if objective.iter().any(|&c| c < 0.0) {
            return Ok(Outcome::Unbounded);
        }
        return Ok(Outcome::Optimal {
            x: vec![0.0; n],
            duals: Vec::new(),
            objective: 0.0,
        });
    }

    // Normalize each row to a non-negative right-hand side; a `>=` row with a
    // zero right-hand side becomes a `<=` row and needs no artificial.
    let mut signs = Vec::with_capacity(m);
    let mut senses = Vec::with_capacity(m);
    for row in rows {
        let (sign, sense) = match (
            row.sense,
            row.rhs < 0.0 || (row.rhs == 0.0 && row.sense == Sense::Ge),
        ) {
            (s, false) => (1.0, s),
            (Sense::Le, true) => (-1.0, Sense::Ge),
            (Sense::Ge, true) => (-1.0, Sense::Le),
            (Sense::Eq, true) => (-1.0, Sense::Eq),
        };
        signs.push(sign);
        senses.push(sense);
    }
    let slack_count = senses.iter().filter(|s| **s != Sense::Eq).count();
    let art_count = senses.iter().filter(|s| **s != Sense::Le).count();
    let cols = n + slack_count + art_count;
    let width = cols + 1;
    if m.saturating_mul(width) > MAX_CELLS {
        return Err(Error::Resource(format!(
            "tableau of {m} x {width} cells exceeds the solver limit of {MAX_CELLS}"
        )));
    }

    let mut data = vec![0.0; m * width];
    let mut entries: Vec<Vec<(usize, f64)>> = vec![Vec::new(); cols];
    let mut basis = vec![0; m];
    let mut artificial = vec![false; cols];
    let mut aux = vec![0; m];
    let (mut next_slack, mut next_art) = (n, n + slack_count);
    for (i, row) in rows.iter().enumerate() {
        let sign = signs[i];
        for &(j, a) in &row.coeffs {
            data[i * width + j] += sign * a;
        }
        data[i * width + cols] = sign * row.rhs;
        match senses[i] {
            Sense::Le => {
                data[i * width + next_slack] = 1.0;
                basis[i] = next_slack;
                aux[i] = next_slack;
                next_slack += 1;
            }
            Sense::Ge => {
                data[i * width + next_slack] = -1.0;
                next_slack += 1;
                data[i * width + next_art] = 1.0;
                artificial[next_art] = true;
                basis[i] = next_art;
                aux[i] = next_art;
                next_art += 1;
            }
            Sense::Eq => {
                data[i * width + next_art] = 1.0;
                artificial[next_art] = true;
                basis[i] = next_art;
                aux[i] = next_art;
                next_art += 1;
            }
        }
        for (j, col) in entries.iter_mut().enumerate() {
            let a = data[i * width + j];
            if a != 0.0 {
                col.push((i, a));
            }
        }
    }
    let columns = Columns { entries };
    let rhs: Vec<f64> = (0..m).map(|i| data[i * width + cols]).collect();

    let mut t = Tableau {
        m,
        width,
        data,
        basis,
        artificial,
        reduced: Vec::new(),
    };
    let max_iter = 50 * (m + cols) + 1000;

    if art_count > 0 {
        let phase_one: Vec<f64> = (0..cols)
            .map(|j| if t.artificial[j] { 1.0 } else { 0.0 })
            .collect();
        t.price(&phase_one);
        let artificial = t.artificial.clone();
        if !t.optimize(max_iter)? {
            return Err(Error::Solver("phase one reported unbounded".into()));
        }
        let infeasibility: f64 = (0..m)
            .filter(|&i| artificial[t.basis[i]])
            .map(|i| t.rhs(i))
            .sum();
        let scale: f64 = rhs.iter().map(|b| b.abs()).sum::<f64>().max(1.0);
        if infeasibility > 1e-9 * scale {
            return Ok(Outcome::Infeasible);
        }
        for i in 0..m {
            if !artificial[t.basis[i]] {
                continue;
            }
            let best = (0..cols)
                .filter(|&j| !artificial[j])
                .map(|j| (j, t.at(i, j).abs()))
                .filter(|&(_, a)| a > PIVOT_TOL)
                .max_by(|a, b| a.1.total_cmp(&b.1));
            if let Some((j, _)) = best {
                t.pivot(i, j);
            }
        }
    }

    let scale = objective.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let mut cost: Vec<f64> = objective.iter().map(|c| c / scale).collect();
    cost.resize(cols, 0.0);
    t.price(&cost);
    if !t.optimize(max_iter)? {
        return Ok(Outcome::Unbounded);
    }

    let mut x_tab = vec![0.0; cols];
    for i in 0..m {
        x_tab[t.basis[i]] = t.rhs(i);
    }
    let duals_tab: Vec<f64> = (0..m)
        .map(|i| -t.reduced[aux[i]] * signs[i] * scale)
        .collect();

    let (x, duals) = match refactor(&columns, &t.basis, &rhs, &cost) {
        Some((x_b, y)) => {
            let mut x = vec![0.0; cols];
            for (i, &b) in t.basis.iter().enumerate() {
                x[b] = x_b[i];
            }
            let duals: Vec<f64> = y.iter().zip(&signs).map(|(y, s)| y * s * scale).collect();
            if violation(&x[..n], rows) <= violation(&x_tab[..n], rows) {
                (x, duals)
            } else {
                (x_tab, duals_tab)
            }
        }
        None => (x_tab, duals_tab),
    };
    let x: Vec<f64> = x[..n].iter().map(|v| v.max(0.0)).collect();
    let objective_value = x.iter().zip(objective).map(|(x, c)| x * c).sum();
    Ok(Outcome::Optimal {
        x,
        duals,
        objective: objective_value,
    })
}

/// Largest constraint violation of `x`, scaled by the row magnitude.
pub fn violation(x: &[f64], rows: &[Row]) -> f64 {
    let mut worst = x.iter().fold(0.0_f64, |a, v| a.max(-v));
    for row in rows {
        let lhs: f64 = row.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
        let scale = 1.0_f64.max(row.rhs.abs());
        let v = match row.sense {
            Sense::Le => lhs - row.rhs,
            Sense::Ge => row.rhs - lhs,
            Sense::Eq => (lhs - row.rhs).abs(),
        };
        worst = worst.max(v / scale);
    }
    worst
}

/// Solves `B x_B = b` and `B^T y = c_B` for the final basis.
fn refactor(
    columns: &Columns,
    basis: &[usize],
    rhs: &[f64],
    cost: &[f64],
) -> Option<(Vec<f64>, Vec<f64>)> {
    let m = basis.len();
    let mut b = vec![0.0; m * m];
    for (k, &j) in basis.iter().enumerate() {
        for &(i, a) in &columns.entries[j] {
            b[i * m + k] = a;
        }
    }
    let lu = Lu::factor(b, m)?;
    let x_b = lu.solve(rhs);
    let c_b: Vec<f64> = basis.iter().map(|&j| cost[j]).collect();
    let y = lu.solve_transpose(&c_b);
    Some((x_b, y))
}

/// Dense LU decomposition with partial pivoting, `P A = L U`.
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(mut a: Vec<f64>, n: usize) -> Option<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))?;
            if a[p * n + k].abs() < 1e-14 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let piv = a[k * n + k];
            let (top, bottom) = a.split_at_mut((k + 1) * n);
            let pivot_row = &top[k * n..];
            for row in bottom.chunks_exact_mut(n) {
                let f = row[k] / piv;
                if f != 0.0 {
                    row[k] = f;
                    for j in k + 1..n {
                        row[j] -= f * pivot_row[j];
                    }
                }
            }
        }
        Some(Self { n, lu: a, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A^T y = c`.
    pub fn solve_transpose(&self, c: &[f64]) -> Vec<f64> {
        let n = self.n;
        // A^T = U^T L^T P, so solve U^T z = c, L^T w = z, y = P^T w.
        let mut z = c.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lu[j * n + i] * z[j]).sum();
            z[i] = (z[i] - s) / self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lu[j * n + i] * z[j]).sum();
            z[i] -= s;
        }
        let mut y = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            y[p] = z[k];
        }
        y
    }
}
