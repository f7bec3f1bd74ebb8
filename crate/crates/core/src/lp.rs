//! Dense two-phase simplex method for small linear programs.
//!
//! Problems here have at most a few hundred variables and constraints, so a
//! full tableau with Bland's anti-cycling rule is adequate. Feasibility is
//! judged at [`FEASIBILITY_TOL`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FEASIBILITY_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-12;
const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    sense: Sense,
    objective: Vec<f64>,
    free: Vec<bool>,
    constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    /// `residual` is the optimal phase-one infeasibility.
    Infeasible { residual: f64 },
    Unbounded,
}

impl LinearProgram {
    /// All variables nonnegative unless marked with [`LinearProgram::set_free`].
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            sense,
            objective,
            free: vec![false; n],
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn set_free(&mut self, var: usize) {
        self.free[var] = true;
    }

    pub fn constrain(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        assert_eq!(coeffs.len(), self.num_vars(), "constraint width");
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        let n = self.num_vars();
        // Column layout: one column per nonnegative variable, two per free
        // variable, then one slack per inequality.
        let mut col_of = Vec::with_capacity(n);
        let mut cols = 0;
        for &f in &self.free {
            col_of.push(cols);
            cols += if f { 2 } else { 1 };
        }
        let structural = cols;
        let slacks = self
            .constraints
            .iter()
            .filter(|c| c.relation != Relation::Eq)
            .count();
        let total = structural + slacks;
        let rows = self.constraints.len();

        let mut a = vec![vec![0.0; total]; rows];
        let mut b = vec![0.0; rows];
        let mut slack = structural;
        for (r, c) in self.constraints.iter().enumerate() {
            for (j, &v) in c.coeffs.iter().enumerate() {
                a[r][col_of[j]] = v;
                if self.free[j] {
                    a[r][col_of[j] + 1] = -v;
                }
            }
            match c.relation {
                Relation::Le => {
                    a[r][slack] = 1.0;
                    slack += 1;
                }
                Relation::Ge => {
                    a[r][slack] = -1.0;
                    slack += 1;
                }
                Relation::Eq => {}
            }
            b[r] = c.rhs;
            if b[r] < 0.0 {
                a[r].iter_mut().for_each(|v| *v = -*v);
                b[r] = -b[r];
            }
        }
        let sign = match self.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut cost = vec![0.0; total];
        for j in 0..n {
            cost[col_of[j]] = sign * self.objective[j];
            if self.free[j] {
                cost[col_of[j] + 1] = -sign * self.objective[j];
            }
        }

        let mut t = Tableau::new(a, b, total);
        let residual = t.phase_one()?;
        let scale = t.rhs_scale();
        if residual > FEASIBILITY_TOL * scale {
            return Ok(LpOutcome::Infeasible { residual });
        }
        t.drive_out_artificials();
        if !t.phase_two(&cost)? {
            return Ok(LpOutcome::Unbounded);
        }
        let std_x = t.solution();
        let x: Vec<f64> = (0..n)
            .map(|j| {
                let v = std_x[col_of[j]];
                if self.free[j] {
                    v - std_x[col_of[j] + 1]
                } else {
                    v
                }
            })
            .collect();
        let objective = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        Ok(LpOutcome::Optimal { x, objective })
    }
}

/// Tableau for `min cᵀx, Ax = b, x ≥ 0` with `b ≥ 0` and one artificial
/// column per row.
struct Tableau {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    structural: usize,
    active: Vec<bool>,
}

impl Tableau {
    fn new(a: Vec<Vec<f64>>, b: Vec<f64>, structural: usize) -> Self {
        let m = a.len();
        let rows = a
            .into_iter()
            .enumerate()
            .map(|(r, mut row)| {
                row.extend((0..m).map(|k| if k == r { 1.0 } else { 0.0 }));
                row
            })
            .collect();
        Self {
            rows,
            rhs: b,
            basis: (structural..structural + m).collect(),
            structural,
            active: vec![true; m],
        }
    }

    fn width(&self) -> usize {
        self.rows.first().map_or(self.structural, Vec::len)
    }

    fn rhs_scale(&self) -> f64 {
        self.rhs.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()))
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c];
        self.rows[r].iter_mut().for_each(|v| *v /= p);
        self.rhs[r] /= p;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for k in 0..self.rows.len() {
            if k == r || !self.active[k] {
                continue;
            }
            let f = self.rows[k][c];
            if f != 0.0 {
                for (v, pv) in self.rows[k].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                self.rhs[k] -= f * pivot_rhs;
                if self.rhs[k].abs() < 1e-14 {
                    self.rhs[k] = 0.0;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Runs the simplex method for `cost` over columns `< allowed`. Returns
    /// `false` when unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<bool> {
        for _ in 0..MAX_PIVOTS {
            // Reduced costs d_j = c_j − c_Bᵀ B⁻¹A_j.
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut d = cost[j];
                for (r, &bv) in self.basis.iter().enumerate() {
                    if self.active[r] {
                        d -= cost[bv] * self.rows[r][j];
                    }
                }
                d < -FEASIBILITY_TOL
            });
            let Some(c) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows.len() {
                if !self.active[r] || self.rows[r][c] <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs[r] / self.rows[r][c];
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        if ratio < lratio - 1e-15
                            || (ratio <= lratio + 1e-15 && self.basis[r] < self.basis[lr])
                        {
                            Some((r, ratio))
                        } else {
                            Some((lr, lratio))
                        }
                    }
                };
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, c);
        }
        Err(Error::Lp("pivot limit reached".into()))
    }

    fn phase_one(&mut self) -> Result<f64> {
        let width = self.width();
        let mut cost = vec![0.0; width];
        cost[self.structural..].iter_mut().for_each(|v| *v = 1.0);
        self.optimize(&cost, width)?;
        Ok(self
            .basis
            .iter()
            .zip(&self.rhs)
            .filter(|(&bv, _)| bv >= self.structural)
            .map(|(_, v)| v.max(0.0))
            .sum())
    }

    fn drive_out_artificials(&mut self) {
        for r in 0..self.rows.len() {
            if self.basis[r] < self.structural {
                continue;
            }
            let col = (0..self.structural)
                .filter(|j| !self.basis.contains(j))
                .find(|&j| self.rows[r][j].abs() > 1e-9);
            match col {
                Some(c) => self.pivot(r, c),
                None => self.active[r] = false,
            }
        }
    }

    fn phase_two(&mut self, cost: &[f64]) -> Result<bool> {
        let mut full = cost.to_vec();
        full.resize(self.width(), 0.0);
        self.optimize(&full, self.structural)
    }

    fn solution(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.structural];
        for (r, &bv) in self.basis.iter().enumerate() {
            if self.active[r] && bv < self.structural {
                x[bv] = self.rhs[r].max(0.0);
            }
        }
        x
    }
}
