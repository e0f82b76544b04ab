//! Dense revised simplex for `max c.x  s.t.  A x <= b, x >= 0`.
//!
//! The basis inverse is kept explicitly and updated by one elementary row
//! operation per pivot. Pricing is Dantzig's largest reduced cost, switching
//! to Bland's smallest-index rule after a run of degenerate pivots so cycling
//! cannot stall the solver. Rows with negative right-hand side get an
//! artificial variable and a phase-one objective. At termination the basic
//! solution is recomputed from scratch, the basis is reinverted if the
//! residual is off, and the optimal basis is certified by dual feasibility
//! and a zero duality gap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `max c.x  s.t.  A x <= b, x >= 0`, stored densely by rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpInstance {
    pub c: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl LpInstance {
    pub fn new(c: Vec<f64>, a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        let lp = Self { c, a, b };
        lp.validate()?;
        Ok(lp)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.c.len();
        if k == 0 || self.a.is_empty() {
            return Err(Error::InvalidArgument(
                "LP needs at least one variable and one row".into(),
            ));
        }
        if self.a.len() != self.b.len() {
            return Err(Error::InvalidArgument(format!(
                "{} rows but {} right-hand sides",
                self.a.len(),
                self.b.len()
            )));
        }
        for (r, row) in self.a.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidArgument(format!(
                    "row {r} has {} entries, expected {k}",
                    row.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "row {r} has a non-finite coefficient"
                )));
            }
        }
        if self.c.iter().chain(&self.b).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "objective and right-hand side must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn cols(&self) -> usize {
        self.c.len()
    }

    /// Largest violation of `A x <= b` and `x >= 0`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let rows = self.a.iter().zip(&self.b).map(|(row, b)| dot(row, x) - b);
        rows.chain(x.iter().map(|v| -v)).fold(0.0, f64::max)
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        dot(&self.c, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// Checks performed on an optimal basis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Certificate {
    /// Largest violation of primal feasibility.
    pub primal_violation: f64,
    /// Largest violation of `y >= 0` and `y A >= c`.
    pub dual_violation: f64,
    /// `|c.x - b.y|`.
    pub duality_gap: f64,
    /// Largest `|y_i * slack_i|` over rows.
    pub complementarity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub objective: f64,
    pub primal: Vec<f64>,
    /// One multiplier per row.
    pub duals: Vec<f64>,
    pub iterations: usize,
    pub certificate: Option<Certificate>,
}

/// Solver knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Smallest reduced cost that lets a column enter.
    pub optimality_tol: f64,
    /// Smallest pivot magnitude accepted in the ratio test.
    pub pivot_tol: f64,
    /// Tolerance for certifying feasibility and the duality gap.
    pub certify_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100_000,
            optimality_tol: 1e-11,
            pivot_tol: 1e-11,
            certify_tol: 1e-9,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Column kinds in the working tableau.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Var {
    Structural(usize),
    /// Slack of row `r` with coefficient `sign`.
    Slack(usize),
    Artificial(usize),
}

struct Tableau<'a> {
    lp: &'a LpInstance,
    m: usize,
    k: usize,
    /// Row signs: rows with negative rhs are negated.
    sign: Vec<f64>,
    b: Vec<f64>,
    /// Column-major copy of the (signed) structural block.
    cols: Vec<Vec<f64>>,
    basis: Vec<Var>,
    binv: Vec<Vec<f64>>,
    x_b: Vec<f64>,
    has_artificial: Vec<bool>,
}

impl<'a> Tableau<'a> {
    fn new(lp: &'a LpInstance) -> Self {
        let m = lp.rows();
        let k = lp.cols();
        let sign: Vec<f64> =
            lp.b.iter()
                .map(|&b| if b < 0.0 { -1.0 } else { 1.0 })
                .collect();
        let b: Vec<f64> = lp.b.iter().zip(&sign).map(|(b, s)| b * s).collect();
        let cols = (0..k)
            .map(|j| (0..m).map(|r| lp.a[r][j] * sign[r]).collect())
            .collect();
        let has_artificial: Vec<bool> = sign.iter().map(|&s| s < 0.0).collect();
        let basis = (0..m)
            .map(|r| {
                if has_artificial[r] {
                    Var::Artificial(r)
                } else {
                    Var::Slack(r)
                }
            })
            .collect();
        let binv = (0..m)
            .map(|r| {
                let mut row = vec![0.0; m];
                row[r] = 1.0;
                row
            })
            .collect();
        let x_b = b.clone();
        Self {
            lp,
            m,
            k,
            sign,
            b,
            cols,
            basis,
            binv,
            x_b,
            has_artificial,
        }
    }

    /// Dense column of a variable in the signed system.
    fn column(&self, v: Var) -> Vec<f64> {
        match v {
            Var::Structural(j) => self.cols[j].clone(),
            Var::Slack(r) => {
                let mut c = vec![0.0; self.m];
                c[r] = self.sign[r];
                c
            }
            Var::Artificial(r) => {
                let mut c = vec![0.0; self.m];
                c[r] = 1.0;
                c
            }
        }
    }

    fn cost(&self, v: Var, phase_one: bool) -> f64 {
        match (v, phase_one) {
            (Var::Artificial(_), true) => -1.0,
            (Var::Structural(j), false) => self.lp.c[j],
            _ => 0.0,
        }
    }

    fn duals(&self, phase_one: bool) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        for (r, &v) in self.basis.iter().enumerate() {
            let cb = self.cost(v, phase_one);
            if cb != 0.0 {
                for (yj, bij) in y.iter_mut().zip(&self.binv[r]) {
                    *yj += cb * bij;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, v: Var, y: &[f64], phase_one: bool) -> f64 {
        let ya = match v {
            Var::Structural(j) => dot(&self.cols[j], y),
            Var::Slack(r) => self.sign[r] * y[r],
            Var::Artificial(r) => y[r],
        };
        self.cost(v, phase_one) - ya
    }

    fn ftran(&self, col: &[f64]) -> Vec<f64> {
        self.binv.iter().map(|row| dot(row, col)).collect()
    }

    fn pivot(&mut self, r: usize, alpha: &[f64], entering: Var) {
        let piv = alpha[r];
        let theta = self.x_b[r] / piv;
        let pivot_row: Vec<f64> = self.binv[r].iter().map(|x| x / piv).collect();
        for (i, row) in self.binv.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = alpha[i];
            if f != 0.0 {
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= f * p;
                }
            }
        }
        self.binv[r] = pivot_row;
        for (i, x) in self.x_b.iter_mut().enumerate() {
            if i != r {
                *x -= theta * alpha[i];
            }
        }
        self.x_b[r] = theta;
        self.basis[r] = entering;
    }

    /// Rebuilds the basis inverse by Gauss-Jordan elimination with partial
    /// pivoting.
    fn reinvert(&mut self) -> Result<()> {
        let m = self.m;
        let mut mat: Vec<Vec<f64>> = vec![vec![0.0; 2 * m]; m];
        for (c, &v) in self.basis.iter().enumerate() {
            for (r, x) in self.column(v).into_iter().enumerate() {
                mat[r][c] = x;
            }
        }
        for (r, row) in mat.iter_mut().enumerate() {
            row[m + r] = 1.0;
        }
        for c in 0..m {
            let p = (c..m)
                .max_by(|&a, &b| mat[a][c].abs().total_cmp(&mat[b][c].abs()))
                .expect("non-empty range");
            if mat[p][c].abs() < 1e-14 {
                return Err(Error::Invariant("basis matrix is singular".into()));
            }
            mat.swap(p, c);
            let piv = mat[c][c];
            mat[c].iter_mut().for_each(|x| *x /= piv);
            let pivot_row = mat[c].clone();
            for (r, row) in mat.iter_mut().enumerate() {
                if r != c && row[c] != 0.0 {
                    let f = row[c];
                    row.iter_mut()
                        .zip(&pivot_row)
                        .for_each(|(x, p)| *x -= f * p);
                }
            }
        }
        // mat = [I | B^-1]
        self.binv = mat.into_iter().map(|row| row[m..].to_vec()).collect();
        self.x_b = self.ftran(&self.b);
        Ok(())
    }

    fn candidates(&self, phase_one: bool) -> impl Iterator<Item = Var> + '_ {
        let structural = (0..self.k).map(Var::Structural);
        let slacks = (0..self.m).map(Var::Slack);
        let artificial = (0..self.m)
            .filter(move |&r| phase_one && self.has_artificial[r])
            .map(Var::Artificial);
        structural.chain(slacks).chain(artificial)
    }

    /// Runs simplex iterations for one phase. Returns the terminal status.
    fn run(&mut self, phase_one: bool, opts: &SimplexOptions, iterations: &mut usize) -> LpStatus {
        let mut in_basis = vec![false; self.k + 2 * self.m];
        let slot = |v: Var, k: usize, m: usize| match v {
            Var::Structural(j) => j,
            Var::Slack(r) => k + r,
            Var::Artificial(r) => k + m + r,
        };
        for &v in &self.basis {
            in_basis[slot(v, self.k, self.m)] = true;
        }
        let degenerate_limit = 10 * self.k.max(1);
        let mut degenerate_run = 0usize;
        let mut y = self.duals(phase_one);
        let mut since_refresh = 0usize;
        loop {
            if *iterations >= opts.max_iterations {
                return LpStatus::IterationLimit;
            }
            if since_refresh >= 64 {
                y = self.duals(phase_one);
                since_refresh = 0;
            }
            let bland = degenerate_run >= degenerate_limit;
            let mut entering: Option<(Var, f64)> = None;
            for v in self.candidates(phase_one) {
                if in_basis[slot(v, self.k, self.m)] {
                    continue;
                }
                let d = self.reduced_cost(v, &y, phase_one);
                if d > opts.optimality_tol {
                    if bland {
                        entering = Some((v, d));
                        break;
                    }
                    if entering.is_none_or(|(_, best)| d > best) {
                        entering = Some((v, d));
                    }
                }
            }
            let Some((q, dq)) = entering else {
                // Confirm with freshly computed duals before declaring optimality.
                if since_refresh > 0 {
                    y = self.duals(phase_one);
                    since_refresh = 0;
                    continue;
                }
                return LpStatus::Optimal;
            };
            let alpha = self.ftran(&self.column(q));
            // Ratio test. In phase two an artificial still basic (at zero)
            // must leave as soon as the entering column touches its row.
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                let a = alpha[r];
                let blocking_artificial = !phase_one
                    && matches!(self.basis[r], Var::Artificial(_))
                    && a.abs() > opts.pivot_tol;
                if blocking_artificial {
                    leave = Some((r, 0.0));
                    break;
                }
                if a > opts.pivot_tol {
                    let ratio = self.x_b[r].max(0.0) / a;
                    let better = match leave {
                        None => true,
                        Some((lr, best)) => {
                            ratio < best - 1e-15
                                || (ratio <= best + 1e-15
                                    && if bland {
                                        slot(self.basis[r], self.k, self.m)
                                            < slot(self.basis[lr], self.k, self.m)
                                    } else {
                                        a > alpha[lr]
                                    })
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((r, theta)) = leave else {
                return LpStatus::Unbounded;
            };
            degenerate_run = if theta <= 1e-13 {
                degenerate_run + 1
            } else {
                0
            };
            let old_row = self.binv[r].clone();
            let leaving = self.basis[r];
            let piv = alpha[r];
            self.pivot(r, &alpha, q);
            in_basis[slot(leaving, self.k, self.m)] = false;
            in_basis[slot(q, self.k, self.m)] = true;
            // y' = y + (d_q / alpha_r) * (row r of the old inverse)
            let f = dq / piv;
            y.iter_mut().zip(&old_row).for_each(|(yi, b)| *yi += f * b);
            since_refresh += 1;
            *iterations += 1;
        }
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.k];
        for (r, &v) in self.basis.iter().enumerate() {
            if let Var::Structural(j) = v {
                x[j] = self.x_b[r].max(0.0);
            }
        }
        x
    }
}

/// Solves with default options.
pub fn solve_lp(lp: &LpInstance) -> Result<LpSolution> {
    solve_lp_with(lp, &SimplexOptions::default())
}

pub fn solve_lp_with(lp: &LpInstance, opts: &SimplexOptions) -> Result<LpSolution> {
    lp.validate()?;
    let mut t = Tableau::new(lp);
    let mut iterations = 0;
    let fail = |status, iterations, m| LpSolution {
        status,
        objective: f64::NAN,
        primal: Vec::new(),
        duals: vec![0.0; m],
        iterations,
        certificate: None,
    };
    if t.has_artificial.iter().any(|&a| a) {
        match t.run(true, opts, &mut iterations) {
            LpStatus::Optimal => {}
            status => return Ok(fail(status, iterations, t.m)),
        }
        let infeasibility: f64 = t
            .basis
            .iter()
            .zip(&t.x_b)
            .filter(|(v, _)| matches!(v, Var::Artificial(_)))
            .map(|(_, x)| x.abs())
            .sum();
        if infeasibility > opts.certify_tol {
            return Ok(fail(LpStatus::Infeasible, iterations, t.m));
        }
    }
    match t.run(false, opts, &mut iterations) {
        LpStatus::Optimal => {}
        status => return Ok(fail(status, iterations, t.m)),
    }

    // Recompute the vertex from the current inverse and reinvert if drifted.
    t.x_b = t.ftran(&t.b);
    let mut x = t.primal();
    if lp.max_violation(&x) > opts.certify_tol {
        t.reinvert()?;
        x = t.primal();
    }
    let y_signed = t.duals(false);
    let duals: Vec<f64> = y_signed.iter().zip(&t.sign).map(|(y, s)| y * s).collect();
    let objective = lp.objective(&x);
    let dual_obj = dot(&duals, &lp.b);
    let mut dual_violation = duals.iter().map(|y| -y).fold(0.0, f64::max);
    for j in 0..lp.cols() {
        let ya: f64 = (0..lp.rows()).map(|r| duals[r] * lp.a[r][j]).sum();
        dual_violation = dual_violation.max(lp.c[j] - ya);
    }
    let complementarity =
        lp.a.iter()
            .zip(&lp.b)
            .zip(&duals)
            .map(|((row, b), y)| (y * (b - dot(row, &x))).abs())
            .fold(0.0, f64::max);
    let certificate = Certificate {
        primal_violation: lp.max_violation(&x),
        dual_violation,
        duality_gap: (objective - dual_obj).abs(),
        complementarity,
    };
    let scale = 1.0 + objective.abs();
    if certificate.primal_violation > opts.certify_tol * scale
        || certificate.dual_violation > opts.certify_tol * scale
        || certificate.duality_gap > 1e-7 * scale
    {
        return Err(Error::Invariant(format!(
            "simplex terminated without a valid optimality certificate: {certificate:?}"
        )));
    }
    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective,
        primal: x,
        duals,
        iterations,
        certificate: Some(certificate),
    })
}
