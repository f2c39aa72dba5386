//! Uniform cell-centred grids, field storage and reductions.
//!
//! Fields are flat row-major buffers with `x` varying fastest; a 1D grid is a
//! 2D grid with a single row. Homogeneous Neumann boundaries are realised by
//! mirroring the adjacent interior cell into a ghost layer, which makes every
//! boundary face difference exactly zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Minimum number of cells per axis.
pub const MIN_CELLS: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    cells: [usize; 2],
    lengths: [f64; 2],
    h: [f64; 2],
}

impl Grid {
    pub fn new_1d(nx: usize, lx: f64) -> Result<Self> {
        Self::new(1, [nx, 1], [lx, 1.0])
    }

    pub fn new_2d(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        Self::new(2, [nx, ny], [lx, ly])
    }

    /// `cells[1]` and `lengths[1]` are ignored for `dim == 1`.
    pub fn new(dim: usize, cells: [usize; 2], lengths: [f64; 2]) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::Validation(format!("grid dimension must be 1 or 2, got {dim}")));
        }
        let (cells, lengths) = if dim == 1 {
            ([cells[0], 1], [lengths[0], 1.0])
        } else {
            (cells, lengths)
        };
        for a in 0..dim {
            if cells[a] < MIN_CELLS {
                return Err(Error::Validation(format!(
                    "at least {MIN_CELLS} cells per axis required, got {}",
                    cells[a]
                )));
            }
            if !(lengths[a].is_finite() && lengths[a] > 0.0) {
                return Err(Error::Validation(format!(
                    "domain length must be positive, got {}",
                    lengths[a]
                )));
            }
        }
        let h = [lengths[0] / cells[0] as f64, lengths[1] / cells[1] as f64];
        Ok(Self { dim, cells, lengths, h })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nx(&self) -> usize {
        self.cells[0]
    }

    /// 1 for one-dimensional grids.
    pub fn ny(&self) -> usize {
        self.cells[1]
    }

    pub fn cells(&self) -> [usize; 2] {
        self.cells
    }

    pub fn lengths(&self) -> [f64; 2] {
        self.lengths
    }

    pub fn h(&self) -> [f64; 2] {
        self.h
    }

    pub fn len(&self) -> usize {
        self.cells[0] * self.cells[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        if self.dim == 1 {
            self.h[0]
        } else {
            self.h[0] * self.h[1]
        }
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.cells[0] + i
    }

    /// Centre of cell `(i, j)`; the `y` coordinate is 0 in 1D.
    pub fn center(&self, i: usize, j: usize) -> [f64; 2] {
        let x = (i as f64 + 0.5) * self.h[0];
        let y = if self.dim == 1 { 0.0 } else { (j as f64 + 0.5) * self.h[1] };
        [x, y]
    }

    /// Number of x-faces (`(nx+1) * ny`) and y-faces (`nx * (ny+1)`, 0 in 1D).
    pub fn face_counts(&self) -> [usize; 2] {
        let [nx, ny] = self.cells;
        [(nx + 1) * ny, if self.dim == 2 { nx * (ny + 1) } else { 0 }]
    }

    /// Index of the x-face left of cell `(i, j)`; `i` ranges over `0..=nx`.
    pub fn xface(&self, i: usize, j: usize) -> usize {
        j * (self.cells[0] + 1) + i
    }

    /// Index of the y-face below cell `(i, j)`; `j` ranges over `0..=ny`.
    pub fn yface(&self, i: usize, j: usize) -> usize {
        j * self.cells[0] + i
    }

    pub fn check_aligned(&self, field: &[f64]) -> Result<()> {
        if field.len() != self.len() {
            return Err(Error::Precondition(format!(
                "field has {} values, grid has {} cells",
                field.len(),
                self.len()
            )));
        }
        Ok(())
    }
}

/// Field with one mirrored ghost layer on every boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct GhostField {
    /// Extended row-major buffer of size `(nx+2) * (ny+2)` (2D) or `nx+2` (1D).
    pub data: Vec<f64>,
    pub stride: usize,
    dim: usize,
}

impl GhostField {
    /// Value at interior-relative index; `-1` and `n` address the ghosts.
    pub fn at(&self, i: isize, j: isize) -> f64 {
        let jj = if self.dim == 1 { 0 } else { (j + 1) as usize };
        self.data[jj * self.stride + (i + 1) as usize]
    }
}

/// Builds the zero-flux ghost extension of `field`.
pub fn neumann_ghost(field: &[f64], grid: &Grid) -> Result<GhostField> {
    grid.check_aligned(field)?;
    let [nx, ny] = grid.cells();
    let stride = nx + 2;
    if grid.dim() == 1 {
        let mut data = Vec::with_capacity(stride);
        data.push(field[0]);
        data.extend_from_slice(field);
        data.push(field[nx - 1]);
        return Ok(GhostField { data, stride, dim: 1 });
    }
    let mut data = vec![0.0; stride * (ny + 2)];
    for jj in 0..ny + 2 {
        let j = jj.saturating_sub(1).min(ny - 1);
        let row = &field[j * nx..(j + 1) * nx];
        let out = &mut data[jj * stride..(jj + 1) * stride];
        out[0] = row[0];
        out[1..=nx].copy_from_slice(row);
        out[nx + 1] = row[nx - 1];
    }
    Ok(GhostField { data, stride, dim: 2 })
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Midpoint-rule integral `sum(value) * cell volume`.
pub fn integrate(field: &[f64], grid: &Grid) -> f64 {
    compensated_sum(field.iter().copied()) * grid.cell_volume()
}

pub fn reduce_min(field: &[f64]) -> f64 {
    field.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn reduce_max(field: &[f64]) -> f64 {
    field.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Discrete `L^p` norm `(sum |value|^p * vol)^(1/p)`.
pub fn lp_norm(field: &[f64], grid: &Grid, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Precondition(format!("L^p norm needs finite p >= 1, got {p}")));
    }
    if p == 1.0 {
        return Ok(compensated_sum(field.iter().map(|x| x.abs())) * grid.cell_volume());
    }
    // Scale by the max to keep large p from overflowing.
    let scale = field.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let s = compensated_sum(field.iter().map(|x| (x.abs() / scale).powf(p)));
    Ok(scale * (s * grid.cell_volume()).powf(1.0 / p))
}

/// Cell-centred `u`, `v`, `w` at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    pub t: f64,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub step_count: u64,
    /// Number of roundoff-scale negative `u` values reset to zero so far.
    pub clamp_events: u64,
}

impl SimState {
    pub fn new(u: Vec<f64>, v: Vec<f64>, w: Vec<f64>) -> Self {
        Self {
            t: 0.0,
            u,
            v,
            w,
            step_count: 0,
            clamp_events: 0,
        }
    }

    /// Checks alignment, finiteness, `u >= 0`, `v > 0` and `w > 0`.
    pub fn check_invariants(&self, grid: &Grid) -> Result<()> {
        for f in [&self.u, &self.v, &self.w] {
            grid.check_aligned(f)?;
        }
        // Branch-free scan first; the detailed search only runs on failure.
        let ok_u = self.u.iter().fold(true, |ok, &x| ok & (x >= 0.0) & (x < f64::INFINITY));
        let ok_vw = self.v.iter().chain(&self.w).fold(true, |ok, &x| ok & (x > 0.0) & (x < f64::INFINITY));
        if ok_u && ok_vw {
            return Ok(());
        }
        for (name, field) in [("u", &self.u), ("v", &self.v), ("w", &self.w)] {
            if let Some((cell, &value)) = field.iter().enumerate().find(|(_, x)| !x.is_finite()) {
                return Err(Error::NonFinite { what: name, cell, value });
            }
        }
        if let Some((cell, &value)) = self.u.iter().enumerate().find(|(_, &x)| x < 0.0) {
            return Err(Error::Negativity { cell, value });
        }
        for (name, field) in [("v", &self.v), ("w", &self.w)] {
            if let Some((cell, &value)) = field.iter().enumerate().find(|(_, &x)| x <= 0.0) {
                return Err(Error::Positivity { field: name, cell, value });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    Uniform,
    Gaussian,
    Cosine,
}

impl ProfileKind {
    pub fn name(self) -> &'static str {
        match self {
            ProfileKind::Uniform => "uniform",
            ProfileKind::Gaussian => "gaussian",
            ProfileKind::Cosine => "cosine",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "uniform" => Some(ProfileKind::Uniform),
            "gaussian" => Some(ProfileKind::Gaussian),
            "cosine" => Some(ProfileKind::Cosine),
            _ => None,
        }
    }
}

/// Initial data for one field.
///
/// * uniform: `base`
/// * gaussian: `base + amplitude * exp(-|x - center|^2 / (2 width^2))`
/// * cosine: `base + amplitude * cos(mode_x pi x / Lx) * cos(mode_y pi y / Ly)`
///
/// With `mass` set, the amplitude is rescaled so that the discrete integral
/// equals `mass`. With `noise > 0`, every cell is multiplied by
/// `1 + noise * U(-1, 1)` drawn from a seeded generator.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub kind: ProfileKind,
    pub base: f64,
    pub amplitude: f64,
    pub mass: Option<f64>,
    /// Centre as a fraction of the domain extents.
    pub center: [f64; 2],
    /// Width as a fraction of the x extent.
    pub width: f64,
    pub mode: [u32; 2],
    pub noise: f64,
}

impl Profile {
    pub fn uniform(value: f64) -> Self {
        Self {
            kind: ProfileKind::Uniform,
            base: value,
            amplitude: 0.0,
            mass: None,
            center: [0.5, 0.5],
            width: 0.1,
            mode: [1, 0],
            noise: 0.0,
        }
    }

    pub fn gaussian(floor: f64, amplitude: f64, width: f64) -> Self {
        Self {
            kind: ProfileKind::Gaussian,
            base: floor,
            amplitude,
            width,
            ..Self::uniform(floor)
        }
    }

    pub fn cosine(mean: f64, amplitude: f64, mode_x: u32) -> Self {
        Self {
            kind: ProfileKind::Cosine,
            base: mean,
            amplitude,
            mode: [mode_x, 0],
            ..Self::uniform(mean)
        }
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = Some(mass);
        self
    }

    fn shape(&self, grid: &Grid, x: [f64; 2]) -> f64 {
        let [lx, ly] = grid.lengths();
        match self.kind {
            ProfileKind::Uniform => 0.0,
            ProfileKind::Gaussian => {
                let sigma = self.width * lx;
                let dx = x[0] - self.center[0] * lx;
                let dy = if grid.dim() == 2 { x[1] - self.center[1] * ly } else { 0.0 };
                (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp()
            }
            ProfileKind::Cosine => {
                let cx = (f64::from(self.mode[0]) * std::f64::consts::PI * x[0] / lx).cos();
                let cy = if grid.dim() == 2 {
                    (f64::from(self.mode[1]) * std::f64::consts::PI * x[1] / ly).cos()
                } else {
                    1.0
                };
                cx * cy
            }
        }
    }

    /// Samples the profile at cell centres.
    pub fn sample(&self, grid: &Grid, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        let finite = [self.base, self.amplitude, self.width, self.noise, self.center[0], self.center[1]];
        if finite.iter().any(|x| !x.is_finite()) || self.mass.is_some_and(|m| !m.is_finite()) {
            return Err(Error::Validation("profile parameters must be finite".into()));
        }
        if self.kind == ProfileKind::Gaussian && self.width <= 0.0 {
            return Err(Error::Validation("gaussian width must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.noise) {
            return Err(Error::Validation(format!("noise must lie in [0, 1), got {}", self.noise)));
        }
        let [nx, ny] = grid.cells();
        let mut shape = Vec::with_capacity(grid.len());
        for j in 0..ny {
            for i in 0..nx {
                shape.push(self.shape(grid, grid.center(i, j)));
            }
        }
        let amplitude = match self.mass {
            None => self.amplitude,
            Some(mass) => {
                let s = integrate(&shape, grid);
                let base_mass = self.base * grid.lengths()[..grid.dim()].iter().product::<f64>();
                if s.abs() < f64::MIN_POSITIVE {
                    if (mass - base_mass).abs() > 1e-12 * mass.abs().max(1.0) {
                        return Err(Error::Validation(
                            "profile mass cannot be matched by a constant profile".into(),
                        ));
                    }
                    0.0
                } else {
                    (mass - base_mass) / s
                }
            }
        };
        let mut out: Vec<f64> = shape.into_iter().map(|s| self.base + amplitude * s).collect();
        if self.noise > 0.0 {
            for x in &mut out {
                *x *= 1.0 + self.noise * rng.gen_range(-1.0..1.0);
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitialProfile {
    pub u: Profile,
    pub v: Profile,
    pub w: Profile,
    pub seed: u64,
}

impl Default for InitialProfile {
    fn default() -> Self {
        Self {
            u: Profile::uniform(1.0),
            v: Profile::uniform(1.0),
            w: Profile::uniform(1.0),
            seed: 0,
        }
    }
}

/// Samples the initial state and enforces `u >= 0`, `u != 0`, `v > 0`, `w > 0`.
pub fn make_initial_state(grid: &Grid, profile: &InitialProfile) -> Result<SimState> {
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let u = profile.u.sample(grid, &mut rng)?;
    let v = profile.v.sample(grid, &mut rng)?;
    let w = profile.w.sample(grid, &mut rng)?;
    if let Some(x) = u.iter().find(|&&x| x < 0.0) {
        return Err(Error::Validation(format!("initial u must be nonnegative, found {x}")));
    }
    if u.iter().all(|&x| x == 0.0) {
        return Err(Error::Validation("initial u must not vanish identically".into()));
    }
    for (name, f) in [("v", &v), ("w", &w)] {
        let min = reduce_min(f);
        if min <= 0.0 {
            return Err(Error::Validation(format!(
                "initial {name} must be strictly positive, minimum is {min}"
            )));
        }
    }
    Ok(SimState::new(u, v, w))
}
