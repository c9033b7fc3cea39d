//! Dense two-phase simplex with Bland's rule.
//!
//! Problems here are tiny (a few rows, at most a few thousand columns), so a
//! full tableau is rebuilt for every solve. Bland's smallest-index rule makes
//! the pivot sequence, and therefore the returned vertex, deterministic.

use std::cell::Cell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_ROWS: usize = 64;
pub const MAX_VARS: usize = 4096;

const PIVOT_TOL: f64 = 1e-12;
const COST_TOL: f64 = 1e-11;
const MAX_PIVOTS: usize = 50_000;

thread_local! {
    static LP_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Number of `solve_lp` calls made on the current thread.
pub fn lp_calls() -> u64 {
    LP_CALLS.with(|c| c.get())
}

/// `min <objective, v>` subject to `a_eq v = b_eq`, `v >= lower` (default 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    #[serde(default)]
    pub lower: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Optimal value; `+∞` when infeasible, `-∞` when unbounded.
    pub value: f64,
    pub solution: Vec<f64>,
    /// `‖a_eq v - b_eq‖∞` of the returned point.
    pub residual: f64,
    pub pivots: usize,
}

impl LpProblem {
    fn validate(&self) -> Result<()> {
        let n = self.objective.len();
        let m = self.a_eq.len();
        if n == 0 {
            return Err(Error::input("LP without variables"));
        }
        if m > MAX_ROWS || n > MAX_VARS {
            return Err(Error::input(format!(
                "LP of size {m}x{n} exceeds the {MAX_ROWS}x{MAX_VARS} limit"
            )));
        }
        Error::check_dim(m, self.b_eq.len())?;
        for row in &self.a_eq {
            Error::check_dim(n, row.len())?;
        }
        if let Some(lb) = &self.lower {
            Error::check_dim(n, lb.len())?;
        }
        let finite = self.objective.iter().chain(&self.b_eq).all(|v| v.is_finite())
            && self.a_eq.iter().flatten().all(|v| v.is_finite())
            && self.lower.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(Error::input("LP data must be finite"));
        }
        Ok(())
    }
}

struct Tableau {
    rows: Vec<Vec<f64>>,
    /// Reduced costs; the last entry is minus the objective value.
    cost_row: Vec<f64>,
    basis: Vec<usize>,
    width: usize,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        let f = self.cost_row[c];
        if f != 0.0 {
            for (v, pv) in self.cost_row.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.cost_row[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    fn price(&mut self, cost: &[f64]) {
        let mut row = cost.to_vec();
        row.push(0.0);
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (v, t) in row.iter_mut().zip(&self.rows[i]) {
                    *v -= cb * t;
                }
            }
        }
        self.cost_row = row;
    }

    /// Runs Bland's rule over columns `< allowed`; `Ok(false)` means unbounded.
    fn optimize(&mut self, allowed: usize) -> Result<bool> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(Error::Solver("simplex pivot limit exceeded".into()));
            }
            let Some(enter) = (0..allowed).find(|&j| self.cost_row[j] < -COST_TOL) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((k, best)) => {
                            if ratio < best || (ratio == best && self.basis[i] < self.basis[k]) {
                                Some((i, ratio))
                            } else {
                                Some((k, best))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(false),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }
}

pub fn solve_lp(p: &LpProblem) -> Result<LpSolution> {
    p.validate()?;
    LP_CALLS.with(|c| c.set(c.get() + 1));

    let n = p.objective.len();
    let zeros = vec![0.0; n];
    let lb = p.lower.as_deref().unwrap_or(&zeros);

    // Shift to v = lb + y, y >= 0, and make every right-hand side nonnegative.
    let mut rows = Vec::with_capacity(p.a_eq.len());
    for (a, &b) in p.a_eq.iter().zip(&p.b_eq) {
        let shifted = b - a.iter().zip(lb).map(|(u, l)| u * l).sum::<f64>();
        let sign = if shifted < 0.0 { -1.0 } else { 1.0 };
        rows.push((a.iter().map(|v| sign * v).collect::<Vec<_>>(), sign * shifted));
    }
    let m = rows.len();
    let width = n + m;
    let mut tab = Tableau {
        rows: rows
            .into_iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let mut r = a;
                r.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
                r.push(b);
                r
            })
            .collect(),
        cost_row: Vec::new(),
        basis: (n..n + m).collect(),
        width,
        pivots: 0,
    };

    let scale = 1.0 + p.b_eq.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let feas_tol = 1e-9 * scale;

    // Phase 1.
    let mut phase1 = vec![0.0; width];
    phase1[n..].iter_mut().for_each(|c| *c = 1.0);
    tab.price(&phase1);
    tab.optimize(width)?;
    let infeasibility = -tab.cost_row[width];
    if infeasibility > feas_tol {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            value: f64::INFINITY,
            solution: Vec::new(),
            residual: f64::INFINITY,
            pivots: tab.pivots,
        });
    }

    // Drive artificial variables out of the basis; drop redundant rows.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] >= n {
            let col = (0..n).find(|&j| tab.rows[i][j].abs() > 1e-9);
            match col {
                Some(j) => tab.pivot(i, j),
                None => {
                    tab.rows.remove(i);
                    tab.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase 2.
    let mut phase2 = p.objective.clone();
    phase2.extend(std::iter::repeat_n(0.0, m));
    tab.price(&phase2);
    if !tab.optimize(n)? {
        return Ok(LpSolution {
            status: LpStatus::Unbounded,
            value: f64::NEG_INFINITY,
            solution: Vec::new(),
            residual: f64::NAN,
            pivots: tab.pivots,
        });
    }

    let mut solution = lb.to_vec();
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < n {
            solution[b] += tab.rhs(i).max(0.0);
        }
    }
    let value = p.objective.iter().zip(&solution).map(|(c, v)| c * v).sum();
    let residual = p
        .a_eq
        .iter()
        .zip(&p.b_eq)
        .map(|(a, b)| (a.iter().zip(&solution).map(|(u, v)| u * v).sum::<f64>() - b).abs())
        .fold(0.0, f64::max);
    Ok(LpSolution { status: LpStatus::Optimal, value, solution, residual, pivots: tab.pivots })
}

/// Minimum of `Σ λ_i costs_i` over the simplex subject to `Σ λ_i points_i = target`.
///
/// This is the LP behind convex-hull function values; `None` when `target`
/// lies outside the hull of `points`.
pub(crate) fn simplex_combination(
    points: &[Vec<f64>],
    costs: &[f64],
    target: &[f64],
) -> Result<Option<(f64, Vec<f64>)>> {
    let d = target.len();
    let mut a_eq: Vec<Vec<f64>> = (0..d).map(|k| points.iter().map(|p| p[k]).collect()).collect();
    a_eq.push(vec![1.0; points.len()]);
    let mut b_eq = target.to_vec();
    b_eq.push(1.0);
    let sol = solve_lp(&LpProblem { objective: costs.to_vec(), a_eq, b_eq, lower: None })?;
    match sol.status {
        LpStatus::Optimal => Ok(Some((sol.value, sol.solution))),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(Error::Solver("bounded simplex LP reported unbounded".into())),
    }
}
