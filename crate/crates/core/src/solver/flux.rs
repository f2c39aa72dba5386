//! Conservative face fluxes for the cell density and the explicit update.
//!
//! With `Delta` the across-face difference (right minus left) the flux is
//!
//! ```text
//! F = D(ū) Δu/h - G(ū) chi(v̄) Δv/h + H(ū) xi(w̄) Δw/h
//! ```
//!
//! and `u_i += dt/h (F_{i+1/2} - F_{i-1/2})`, summed over axes in 2D. Face
//! coefficients use the mean of the two adjacent cell values. In upwind mode
//! the density factor of each taxis term is taken from the cell the drift
//! comes from instead.

use crate::error::{Error, Result};
use crate::grid::{Grid, SimState};
use crate::kernels::{CompiledKernels, KernelSet};

/// Guards divisions in the advective time-step bound.
const SPEED_EPS: f64 = 1e-30;
const DENSITY_EPS: f64 = 1e-12;
/// Negative `u` below `-NEG_TOL * max(u)` is an instability, above it roundoff.
pub const NEG_TOL: f64 = 1e-13;

/// Face fluxes along x (`(nx+1) * ny`) and y (`nx * (ny+1)`, empty in 1D).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Fluxes {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Fluxes {
    pub fn zeros(grid: &Grid) -> Self {
        let [nx, ny] = grid.face_counts();
        Self {
            x: vec![0.0; nx],
            y: vec![0.0; ny],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.x.iter().chain(&self.y).fold(0.0f64, |a, f| a.max(f.abs()))
    }
}

/// Per-step quantities gathered during flux assembly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FaceStats {
    pub max_diffusivity: f64,
    /// Smallest `h / speed` over faces; infinite without drift.
    pub advective_dt: f64,
    pub max_flux: f64,
}

impl FaceStats {
    fn new() -> Self {
        Self {
            max_diffusivity: 0.0,
            advective_dt: f64::INFINITY,
            max_flux: 0.0,
        }
    }
}

struct FaceInput {
    ul: f64,
    ur: f64,
    vl: f64,
    vr: f64,
    wl: f64,
    wr: f64,
}

#[inline]
fn face_flux(k: &CompiledKernels, f: FaceInput, h: f64, upwind: bool, stats: &mut FaceStats) -> f64 {
    let du = f.ur - f.ul;
    let dv = f.vr - f.vl;
    let dw = f.wr - f.wl;
    let ubar = 0.5 * (f.ul + f.ur);
    let d = k.d.eval(ubar);
    stats.max_diffusivity = stats.max_diffusivity.max(d);
    let mut flux = d * du / h;

    // Each taxis term carries its own density factor; with upwinding the
    // transport velocity is measured against that upwind density.
    let (att, att_u) = if k.g.is_zero() || dv == 0.0 {
        (0.0, ubar)
    } else {
        let uu = if upwind { if dv > 0.0 { f.ul } else { f.ur } } else { ubar };
        (k.g.eval(uu) * k.chi.eval_unchecked(0.5 * (f.vl + f.vr)) * dv / h, uu)
    };
    let (rep, rep_u) = if k.h.is_zero() || dw == 0.0 {
        (0.0, ubar)
    } else {
        let uu = if upwind { if dw < 0.0 { f.ul } else { f.ur } } else { ubar };
        (k.h.eval(uu) * k.xi.eval_unchecked(0.5 * (f.wl + f.wr)) * dw / h, uu)
    };
    flux += rep - att;

    let speed = if upwind {
        att.abs() / att_u.max(DENSITY_EPS) + rep.abs() / rep_u.max(DENSITY_EPS)
    } else {
        (att - rep).abs() / ubar.max(DENSITY_EPS)
    };
    if speed > 0.0 {
        stats.advective_dt = stats.advective_dt.min(h / (speed + SPEED_EPS));
    }
    stats.max_flux = stats.max_flux.max(flux.abs());
    flux
}

fn non_finite_flux(axis: &'static str, face: usize, value: f64) -> Error {
    Error::NonFinite {
        what: if axis == "x" { "x-face flux" } else { "y-face flux" },
        cell: face,
        value,
    }
}

/// Reusable ghost buffers.
#[derive(Clone, Debug, Default)]
pub(crate) struct Ghosts {
    u: Vec<f64>,
    v: Vec<f64>,
    w: Vec<f64>,
}

fn fill_ghost(field: &[f64], grid: &Grid, out: &mut Vec<f64>) {
    let [nx, ny] = grid.cells();
    let stride = nx + 2;
    if grid.dim() == 1 {
        out.clear();
        out.push(field[0]);
        out.extend_from_slice(field);
        out.push(field[nx - 1]);
        return;
    }
    out.resize(stride * (ny + 2), 0.0);
    for jj in 0..ny + 2 {
        let j = jj.saturating_sub(1).min(ny - 1);
        let row = &field[j * nx..(j + 1) * nx];
        let dst = &mut out[jj * stride..(jj + 1) * stride];
        dst[0] = row[0];
        dst[1..=nx].copy_from_slice(row);
        dst[nx + 1] = row[nx - 1];
    }
}

pub(crate) fn assemble_into(
    state: &SimState,
    kernels: &CompiledKernels,
    grid: &Grid,
    upwind: bool,
    ghosts: &mut Ghosts,
    out: &mut Fluxes,
) -> Result<FaceStats> {
    fill_ghost(&state.u, grid, &mut ghosts.u);
    fill_ghost(&state.v, grid, &mut ghosts.v);
    fill_ghost(&state.w, grid, &mut ghosts.w);
    let (gu, gv, gw) = (&ghosts.u, &ghosts.v, &ghosts.w);
    let [nx, ny] = grid.cells();
    let [hx, hy] = grid.h();
    let stride = nx + 2;
    let [nfx, nfy] = grid.face_counts();
    out.x.resize(nfx, 0.0);
    out.y.resize(nfy, 0.0);
    let mut stats = FaceStats::new();
    let row0 = if grid.dim() == 1 { 0 } else { 1 };

    for j in 0..ny {
        let base = (j + row0) * stride;
        for i in 0..=nx {
            // ghost-extended indices of the cells left and right of face i
            let (l, r) = (base + i, base + i + 1);
            let f = face_flux(
                kernels,
                FaceInput {
                    ul: gu[l],
                    ur: gu[r],
                    vl: gv[l],
                    vr: gv[r],
                    wl: gw[l],
                    wr: gw[r],
                },
                hx,
                upwind,
                &mut stats,
            );
            let face = grid.xface(i, j);
            if !f.is_finite() {
                return Err(non_finite_flux("x", face, f));
            }
            out.x[face] = f;
        }
    }
    if grid.dim() == 2 {
        for j in 0..=ny {
            for i in 0..nx {
                let (l, r) = (j * stride + i + 1, (j + 1) * stride + i + 1);
                let f = face_flux(
                    kernels,
                    FaceInput {
                        ul: gu[l],
                        ur: gu[r],
                        vl: gv[l],
                        vr: gv[r],
                        wl: gw[l],
                        wr: gw[r],
                    },
                    hy,
                    upwind,
                    &mut stats,
                );
                let face = grid.yface(i, j);
                if !f.is_finite() {
                    return Err(non_finite_flux("y", face, f));
                }
                out.y[face] = f;
            }
        }
    }
    Ok(stats)
}

/// Face fluxes of the cell equation; boundary faces carry exactly zero flux.
pub fn assemble_u_fluxes(state: &SimState, kernels: &KernelSet, grid: &Grid, upwind: bool) -> Result<Fluxes> {
    state.check_invariants(grid)?;
    let mut out = Fluxes::zeros(grid);
    assemble_into(state, &kernels.compiled(), grid, upwind, &mut Ghosts::default(), &mut out)?;
    Ok(out)
}

/// Explicit diffusion limit `1 / (2 D sum_a h_a^-2)`, i.e. `h^2 / (2 dim D)` on square cells.
pub(crate) fn diffusion_dt(grid: &Grid, max_diffusivity: f64) -> f64 {
    let inv_h2: f64 = grid.h()[..grid.dim()].iter().map(|h| 1.0 / (h * h)).sum();
    if max_diffusivity > 0.0 {
        1.0 / (2.0 * max_diffusivity * inv_h2)
    } else {
        f64::INFINITY
    }
}

pub(crate) fn combine_dt(grid: &Grid, stats: &FaceStats, safety: f64, dt_max: f64) -> f64 {
    // A cell loses mass through at most 2*dim faces, each at a rate bounded by
    // the diffusive plus the advective limit, so the rates add.
    let rate = 1.0 / diffusion_dt(grid, stats.max_diffusivity) + 2.0 * grid.dim() as f64 / stats.advective_dt;
    (safety / rate).min(dt_max)
}

/// Largest stable explicit step: `safety / (diffusive rate + advective rate)`,
/// capped at `dt_max`.
pub fn stable_dt(
    state: &SimState,
    kernels: &KernelSet,
    grid: &Grid,
    safety: f64,
    dt_max: f64,
    upwind: bool,
) -> Result<f64> {
    if !(safety > 0.0 && safety <= 1.0) {
        return Err(Error::Precondition(format!("safety factor must lie in (0, 1], got {safety}")));
    }
    if !(dt_max > 0.0) {
        return Err(Error::Precondition(format!("dt_max must be positive, got {dt_max}")));
    }
    state.check_invariants(grid)?;
    let mut out = Fluxes::zeros(grid);
    let stats = assemble_into(state, &kernels.compiled(), grid, upwind, &mut Ghosts::default(), &mut out)?;
    Ok(combine_dt(grid, &stats, safety, dt_max))
}

/// Applies the flux divergence to `u`. Returns the number of cells whose
/// roundoff-scale negative value was reset to zero.
pub fn step_u(state: &mut SimState, fluxes: &Fluxes, grid: &Grid, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Precondition(format!("dt must be positive, got {dt}")));
    }
    let [nx, ny] = grid.cells();
    let [hx, hy] = grid.h();
    let (cx, cy) = (dt / hx, dt / hy);
    let u = &mut state.u;
    for j in 0..ny {
        for i in 0..nx {
            let k = grid.idx(i, j);
            let mut du = cx * (fluxes.x[grid.xface(i + 1, j)] - fluxes.x[grid.xface(i, j)]);
            if grid.dim() == 2 {
                du += cy * (fluxes.y[grid.yface(i, j + 1)] - fluxes.y[grid.yface(i, j)]);
            }
            u[k] += du;
        }
    }
    let umax = u.iter().fold(0.0f64, |a, &x| a.max(x));
    let floor = -NEG_TOL * umax;
    let mut clamped = 0;
    for (cell, x) in u.iter_mut().enumerate() {
        if *x < 0.0 {
            if *x < floor {
                return Err(Error::Negativity { cell, value: *x });
            }
            *x = 0.0;
            clamped += 1;
        }
    }
    state.clamp_events += clamped as u64;
    Ok(clamped)
}
