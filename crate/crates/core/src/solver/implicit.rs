//! Backward-Euler steps for the two signal equations.
//!
//! Each signal solves `(1 + dt*decay) s_new - dt*d*Lap_h s_new = s_old + dt*prod*u_new`
//! with the Neumann ghost rule folded into the boundary rows. The operator is
//! a symmetric M-matrix, so positive data stay positive. 1D systems go through
//! the Thomas algorithm; 2D systems through Jacobi-preconditioned CG.

use crate::error::{Error, Result};
use crate::grid::{Grid, SimState};
use crate::params::ModelParams;

/// Default relative residual target for CG.
pub const DEFAULT_LINEAR_TOL: f64 = 1e-10;

/// Solves a tridiagonal system. `lower[0]` and `upper[n-1]` are ignored.
/// Requires a diagonally dominant matrix (no pivoting).
pub fn thomas_solve(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if lower.len() != n || upper.len() != n || rhs.len() != n || n == 0 {
        return Err(Error::Precondition("tridiagonal bands must share a nonzero length".into()));
    }
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    thomas_into(lower, diag, upper, rhs, &mut c, &mut x);
    Ok(x)
}

fn thomas_into(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64], c: &mut [f64], x: &mut [f64]) {
    let n = diag.len();
    c[0] = upper[0] / diag[0];
    x[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = 1.0 / (diag[i] - lower[i] * c[i - 1]);
        c[i] = upper[i] * m;
        x[i] = (rhs[i] - lower[i] * x[i - 1]) * m;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
}

/// `(1 + dt*decay) I - dt*d*Lap_h` on a Neumann grid.
#[derive(Clone, Copy, Debug)]
pub struct HelmholtzOp<'g> {
    grid: &'g Grid,
    center: f64,
    cx: f64,
    cy: f64,
}

impl<'g> HelmholtzOp<'g> {
    pub fn new(grid: &'g Grid, dt: f64, diffusion: f64, decay: f64) -> Self {
        let [hx, hy] = grid.h();
        let cy = if grid.dim() == 2 { dt * diffusion / (hy * hy) } else { 0.0 };
        Self {
            grid,
            center: 1.0 + dt * decay,
            cx: dt * diffusion / (hx * hx),
            cy,
        }
    }

    fn diag_at(&self, i: usize, j: usize) -> f64 {
        let [nx, ny] = self.grid.cells();
        let mut d = self.center;
        d += self.cx * (usize::from(i > 0) + usize::from(i + 1 < nx)) as f64;
        if self.grid.dim() == 2 {
            d += self.cy * (usize::from(j > 0) + usize::from(j + 1 < ny)) as f64;
        }
        d
    }

    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let [nx, ny] = self.grid.cells();
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                let xk = x[k];
                let mut acc = self.center * xk;
                if i > 0 {
                    acc += self.cx * (xk - x[k - 1]);
                }
                if i + 1 < nx {
                    acc += self.cx * (xk - x[k + 1]);
                }
                if self.grid.dim() == 2 {
                    if j > 0 {
                        acc += self.cy * (xk - x[k - nx]);
                    }
                    if j + 1 < ny {
                        acc += self.cy * (xk - x[k + nx]);
                    }
                }
                out[k] = acc;
            }
        }
    }
}

/// Iterations and relative residual of one solve.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveInfo {
    pub iters: usize,
    pub residual: f64,
}

/// Scratch space for repeated solves on one grid.
#[derive(Clone, Debug, Default)]
pub struct LinearWorkspace {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    rhs: Vec<f64>,
    c: Vec<f64>,
    r: Vec<f64>,
    z: Vec<f64>,
    p: Vec<f64>,
    ap: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    // fixed-order pairwise blocks keep the result independent of any scheduling
    a.chunks(256)
        .zip(b.chunks(256))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .sum()
}

impl LinearWorkspace {
    fn resize(&mut self, n: usize) {
        for b in [
            &mut self.lower,
            &mut self.diag,
            &mut self.upper,
            &mut self.rhs,
            &mut self.c,
            &mut self.r,
            &mut self.z,
            &mut self.p,
            &mut self.ap,
        ] {
            b.resize(n, 0.0);
        }
    }

    /// Solves `op x = rhs` in place (`x` holds the initial guess on entry).
    fn solve(&mut self, op: &HelmholtzOp<'_>, x: &mut [f64], field: &'static str, tol: f64) -> Result<SolveInfo> {
        let n = x.len();
        self.resize(n);
        if op.grid.dim() == 1 {
            let nx = n;
            for i in 0..nx {
                self.lower[i] = if i > 0 { -op.cx } else { 0.0 };
                self.upper[i] = if i + 1 < nx { -op.cx } else { 0.0 };
                self.diag[i] = op.diag_at(i, 0);
            }
            thomas_into(&self.lower, &self.diag, &self.upper, &self.rhs, &mut self.c, x);
            let mut num = 0.0;
            let mut den = 0.0;
            for i in 0..nx {
                let mut ax = self.diag[i] * x[i];
                if i > 0 {
                    ax += self.lower[i] * x[i - 1];
                }
                if i + 1 < nx {
                    ax += self.upper[i] * x[i + 1];
                }
                let b = self.rhs[i];
                num += (b - ax) * (b - ax);
                den += b * b;
            }
            let den = f64::max(den, f64::MIN_POSITIVE);
            let residual = (num / den).sqrt();
            if !residual.is_finite() || residual > tol {
                return Err(Error::LinearSolver { field, iters: 1, residual });
            }
            return Ok(SolveInfo { iters: 1, residual });
        }
        self.cg(op, x, field, tol)
    }

    fn cg(&mut self, op: &HelmholtzOp<'_>, x: &mut [f64], field: &'static str, tol: f64) -> Result<SolveInfo> {
        let n = x.len();
        let [nx, _] = op.grid.cells();
        for k in 0..n {
            self.diag[k] = 1.0 / op.diag_at(k % nx, k / nx);
        }
        op.apply(x, &mut self.ap);
        for k in 0..n {
            self.r[k] = self.rhs[k] - self.ap[k];
            self.z[k] = self.diag[k] * self.r[k];
            self.p[k] = self.z[k];
        }
        let bnorm = dot(&self.rhs, &self.rhs).sqrt().max(f64::MIN_POSITIVE);
        let mut rz = dot(&self.r, &self.z);
        let mut residual = dot(&self.r, &self.r).sqrt() / bnorm;
        let max_iters = 10 * n;
        let mut iters = 0;
        while residual > tol {
            if iters >= max_iters {
                return Err(Error::LinearSolver { field, iters, residual });
            }
            op.apply(&self.p, &mut self.ap);
            let alpha = rz / dot(&self.p, &self.ap);
            for k in 0..n {
                x[k] += alpha * self.p[k];
                self.r[k] -= alpha * self.ap[k];
                self.z[k] = self.diag[k] * self.r[k];
            }
            let rz_new = dot(&self.r, &self.z);
            let beta = rz_new / rz;
            rz = rz_new;
            for k in 0..n {
                self.p[k] = self.z[k] + beta * self.p[k];
            }
            residual = dot(&self.r, &self.r).sqrt() / bnorm;
            iters += 1;
            if !residual.is_finite() {
                return Err(Error::LinearSolver { field, iters, residual });
            }
        }
        Ok(SolveInfo { iters, residual })
    }
}

/// Solver statistics of one implicit signal step.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SignalReport {
    pub v: SolveInfo,
    pub w: SolveInfo,
}

/// Advances `v` and `w` by one backward-Euler step using the current `u`.
pub fn step_vw(state: &mut SimState, dt: f64, params: &ModelParams, grid: &Grid) -> Result<SignalReport> {
    step_vw_with(state, dt, params, grid, DEFAULT_LINEAR_TOL, &mut LinearWorkspace::default())
}

pub fn step_vw_with(
    state: &mut SimState,
    dt: f64,
    params: &ModelParams,
    grid: &Grid,
    tol: f64,
    ws: &mut LinearWorkspace,
) -> Result<SignalReport> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Precondition(format!("dt must be positive, got {dt}")));
    }
    let n = grid.len();
    ws.resize(n);

    let op = HelmholtzOp::new(grid, dt, params.d1, params.beta);
    for k in 0..n {
        ws.rhs[k] = state.v[k] + dt * params.alpha * state.u[k];
    }
    let v = ws.solve(&op, &mut state.v, "v", tol)?;

    let op = HelmholtzOp::new(grid, dt, params.d2, params.delta);
    for k in 0..n {
        ws.rhs[k] = state.w[k] + dt * params.gamma * state.u[k];
    }
    let w = ws.solve(&op, &mut state.w, "w", tol)?;
    Ok(SignalReport { v, w })
}
