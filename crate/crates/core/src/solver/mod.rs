//! Time integration of the coupled system.
//!
//! One step is an operator split: an explicit conservative update of `u`
//! with a stable time step, then backward-Euler solves for `v` and `w` using
//! the freshly updated `u` as source. After every step the state invariants
//! are re-checked and the blow-up monitor is consulted.

mod flux;
mod implicit;

pub use flux::{assemble_u_fluxes, stable_dt, step_u, FaceStats, Fluxes, NEG_TOL};
pub use implicit::{
    step_vw, step_vw_with, thomas_solve, HelmholtzOp, LinearWorkspace, SignalReport, SolveInfo,
    DEFAULT_LINEAR_TOL,
};

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{reduce_max, reduce_min, Grid, SimState};
use crate::kernels::{CompiledKernels, KernelSet};
use crate::params::ModelParams;

#[derive(Clone, Debug, PartialEq)]
pub struct StepOptions {
    /// CFL safety factor in `(0, 1]`.
    pub safety: f64,
    pub dt_max: f64,
    /// Steps below this size abort the run.
    pub dt_min: f64,
    /// Upwind density factors in the taxis fluxes.
    pub upwind: bool,
    pub linear_tol: f64,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self {
            safety: 0.9,
            dt_max: 1e-2,
            dt_min: 1e-14,
            upwind: false,
            linear_tol: DEFAULT_LINEAR_TOL,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepReport {
    pub dt_used: f64,
    pub u_flux_max: f64,
    pub clamped_cells: usize,
    pub linear_solver_iters_v: usize,
    pub linear_solver_iters_w: usize,
    pub residual_v: f64,
    pub residual_w: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trigger {
    None,
    UBlowup,
    VVanishing,
}

impl Trigger {
    pub fn name(self) -> &'static str {
        match self {
            Trigger::None => "none",
            Trigger::UBlowup => "u_blowup",
            Trigger::VVanishing => "v_vanishing",
        }
    }
}

/// Numerical stand-in for the extensibility criterion: a run is halted when
/// `max u` exceeds `linf_u_threshold` or `min v` drops below `inf_v_floor`.
/// A trigger is an indication of blow-up, not a proof.
#[derive(Clone, Debug, PartialEq)]
pub struct BlowupMonitor {
    pub linf_u_threshold: f64,
    pub inf_v_floor: f64,
    pub triggered: Trigger,
}

pub const DEFAULT_LINF_FACTOR: f64 = 1e6;
pub const DEFAULT_V_FLOOR_FACTOR: f64 = 1e-10;

impl BlowupMonitor {
    /// Thresholds relative to the initial data.
    pub fn relative_to(initial: &SimState, linf_factor: f64, v_floor_factor: f64) -> Self {
        Self {
            linf_u_threshold: linf_factor * reduce_max(&initial.u),
            inf_v_floor: v_floor_factor * reduce_min(&initial.v),
            triggered: Trigger::None,
        }
    }

    pub fn with_defaults(initial: &SimState) -> Self {
        Self::relative_to(initial, DEFAULT_LINF_FACTOR, DEFAULT_V_FLOOR_FACTOR)
    }

    pub fn check(&mut self, state: &SimState) -> Trigger {
        if reduce_max(&state.u) > self.linf_u_threshold {
            self.triggered = Trigger::UBlowup;
        } else if reduce_min(&state.v) < self.inf_v_floor {
            self.triggered = Trigger::VVanishing;
        }
        self.triggered
    }
}

/// Why `advance` stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Halt {
    Horizon,
    Monitor(Trigger),
}

impl fmt::Display for Halt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Halt::Horizon => f.write_str("ok"),
            Halt::Monitor(t) => f.write_str(t.name()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSummary {
    pub halt: Halt,
    pub t_final: f64,
    pub steps: u64,
}

/// Owns the scratch buffers for repeated steps on one grid.
#[derive(Clone, Debug)]
pub struct Stepper {
    grid: Grid,
    params: ModelParams,
    kernels: KernelSet,
    compiled: CompiledKernels,
    opts: StepOptions,
    fluxes: Fluxes,
    ghosts: flux::Ghosts,
    linear: LinearWorkspace,
}

impl Stepper {
    pub fn new(grid: Grid, params: ModelParams, kernels: KernelSet, opts: StepOptions) -> Result<Self> {
        if !(opts.safety > 0.0 && opts.safety <= 1.0) {
            return Err(Error::Validation(format!("safety must lie in (0, 1], got {}", opts.safety)));
        }
        if !(opts.dt_max > 0.0 && opts.dt_min >= 0.0 && opts.linear_tol > 0.0) {
            return Err(Error::Validation("dt_max and linear_tol must be positive".into()));
        }
        let report = crate::params::validate_params(&params);
        if report.has_hard_failure() {
            let failed: Vec<_> = report.failures().filter(|c| c.hard).map(|c| c.detail.clone()).collect();
            return Err(Error::Validation(failed.join(", ")));
        }
        let compiled = kernels.compiled();
        Ok(Self {
            fluxes: Fluxes::zeros(&grid),
            grid,
            params,
            kernels,
            compiled,
            opts,
            ghosts: Default::default(),
            linear: Default::default(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn kernels(&self) -> &KernelSet {
        &self.kernels
    }

    pub fn options(&self) -> &StepOptions {
        &self.opts
    }

    /// One split step of size at most `dt_cap` (and at most the stable step).
    pub fn step(&mut self, state: &mut SimState, dt_cap: f64) -> Result<StepReport> {
        let stats = flux::assemble_into(
            state,
            &self.compiled,
            &self.grid,
            self.opts.upwind,
            &mut self.ghosts,
            &mut self.fluxes,
        )?;
        let stable = flux::combine_dt(&self.grid, &stats, self.opts.safety, self.opts.dt_max);
        if !(stable.is_finite() && stable >= self.opts.dt_min && stable > 0.0) {
            return Err(Error::TimeStepCollapse(stable));
        }
        // A short final step to the horizon is not a collapse.
        let dt = stable.min(dt_cap);
        if !(dt > 0.0) {
            return Err(Error::Precondition(format!("step cap must be positive, got {dt_cap}")));
        }
        let clamped = step_u(state, &self.fluxes, &self.grid, dt)?;
        let sig = step_vw_with(state, dt, &self.params, &self.grid, self.opts.linear_tol, &mut self.linear)?;
        state.t += dt;
        state.step_count += 1;
        state.check_invariants(&self.grid)?;
        Ok(StepReport {
            dt_used: dt,
            u_flux_max: stats.max_flux,
            clamped_cells: clamped,
            linear_solver_iters_v: sig.v.iters,
            linear_solver_iters_w: sig.w.iters,
            residual_v: sig.v.residual,
            residual_w: sig.w.residual,
        })
    }
}

/// Integrates until `horizon` or until the monitor triggers. The observer
/// sees the state after every accepted step.
pub fn advance<F>(
    stepper: &mut Stepper,
    state: &mut SimState,
    horizon: f64,
    monitor: &mut BlowupMonitor,
    mut observer: F,
) -> Result<RunSummary>
where
    F: FnMut(&SimState, &StepReport) -> Result<()>,
{
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Precondition(format!("horizon must be positive, got {horizon}")));
    }
    state.check_invariants(stepper.grid())?;
    let start_steps = state.step_count;
    let mut halt = Halt::Horizon;
    while state.t < horizon {
        let remaining = horizon - state.t;
        let report = stepper.step(state, remaining)?;
        if report.dt_used >= remaining {
            state.t = horizon;
        }
        observer(state, &report)?;
        let trig = monitor.check(state);
        if trig != Trigger::None {
            halt = Halt::Monitor(trig);
            break;
        }
    }
    Ok(RunSummary {
        halt,
        t_final: state.t,
        steps: state.step_count - start_steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{integrate, make_initial_state, InitialProfile, Profile};
    use crate::kernels::DensityKernel;

    fn stepper(grid: Grid, params: ModelParams) -> Stepper {
        let k = KernelSet::from_params(&params);
        Stepper::new(grid, params, k, StepOptions::default()).unwrap()
    }

    #[test]
    fn tiny_final_step_is_not_a_collapse() {
        let g = Grid::new_1d(8, 1.0).unwrap();
        let mut st = stepper(g, ModelParams::default());
        let mut s = SimState::new(vec![1.0; 8], vec![1.0; 8], vec![1.0; 8]);
        let r = st.step(&mut s, 1e-17).unwrap();
        assert_eq!(r.dt_used, 1e-17);
    }

    #[test]
    fn equilibrium_is_fixed() {
        let g = Grid::new_1d(32, 1.0).unwrap();
        let mut st = stepper(g.clone(), ModelParams::default());
        let mut s = SimState::new(vec![1.0; 32], vec![1.0; 32], vec![1.0; 32]);
        for _ in 0..100 {
            st.step(&mut s, f64::INFINITY).unwrap();
        }
        assert!(s.u.iter().chain(&s.v).chain(&s.w).all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn advance_stops_exactly_at_horizon() {
        let g = Grid::new_1d(16, 1.0).unwrap();
        let mut st = stepper(g.clone(), ModelParams::default());
        let profile = InitialProfile {
            u: Profile::gaussian(0.5, 2.0, 0.1),
            ..Default::default()
        };
        let mut s = make_initial_state(&g, &profile).unwrap();
        let mut mon = BlowupMonitor::with_defaults(&s);
        let mass0 = integrate(&s.u, &g);
        let mut seen = 0;
        let summary = advance(&mut st, &mut s, 0.05, &mut mon, |_, r| {
            assert!(r.residual_v <= DEFAULT_LINEAR_TOL);
            seen += 1;
            Ok(())
        })
        .unwrap();
        assert_eq!(summary.halt, Halt::Horizon);
        assert_eq!(s.t, 0.05);
        assert_eq!(summary.steps, seen);
        assert!((integrate(&s.u, &g) - mass0).abs() / mass0 < 1e-12);
    }

    #[test]
    fn monitor_halts_run() {
        let g = Grid::new_1d(16, 1.0).unwrap();
        let mut st = stepper(g.clone(), ModelParams::default());
        let profile = InitialProfile {
            u: Profile::gaussian(0.5, 2.0, 0.1),
            ..Default::default()
        };
        let mut s = make_initial_state(&g, &profile).unwrap();
        // a threshold below the current max triggers on the first step
        let mut mon = BlowupMonitor::relative_to(&s, 0.5, 1e-10);
        let summary = advance(&mut st, &mut s, 1.0, &mut mon, |_, _| Ok(())).unwrap();
        assert_eq!(summary.halt, Halt::Monitor(Trigger::UBlowup));
        assert_eq!(summary.steps, 1);
        assert_eq!(mon.triggered, Trigger::UBlowup);

        let mut s = make_initial_state(&g, &profile).unwrap();
        let mut mon = BlowupMonitor::relative_to(&s, 1e6, 10.0);
        let summary = advance(&mut st, &mut s, 1.0, &mut mon, |_, _| Ok(())).unwrap();
        assert_eq!(summary.halt, Halt::Monitor(Trigger::VVanishing));
    }

    #[test]
    fn rejects_hard_invalid_params() {
        let g = Grid::new_1d(8, 1.0).unwrap();
        let p = ModelParams {
            d1: -1.0,
            ..Default::default()
        };
        let k = KernelSet::from_params(&p);
        assert!(Stepper::new(g, p, k, StepOptions::default()).is_err());
    }

    #[test]
    fn mirror_symmetry_is_preserved() {
        let g = Grid::new_1d(64, 1.0).unwrap();
        let params = ModelParams {
            m: 1.5,
            chi0: 3.0,
            xi0: 1.0,
            ..Default::default()
        };
        let mut st = stepper(g.clone(), params);
        let profile = InitialProfile {
            u: Profile::gaussian(0.2, 5.0, 0.1),
            v: Profile::gaussian(1.0, 0.5, 0.2),
            ..Default::default()
        };
        let mut s = make_initial_state(&g, &profile).unwrap();
        for _ in 0..1000 {
            st.step(&mut s, f64::INFINITY).unwrap();
        }
        for i in 0..32 {
            for f in [&s.u, &s.v, &s.w] {
                assert!((f[i] - f[63 - i]).abs() <= 1e-12 * f[i].abs().max(1.0));
            }
        }
    }

    #[test]
    fn pure_diffusion_variance_grows() {
        let g = Grid::new_1d(64, 1.0).unwrap();
        let params = ModelParams::default();
        let mut k = KernelSet::from_params(&params);
        k.g = DensityKernel::Zero;
        k.h = DensityKernel::Zero;
        let mut st = Stepper::new(g.clone(), params, k, StepOptions::default()).unwrap();
        let profile = InitialProfile {
            u: Profile::gaussian(0.0, 1.0, 0.05),
            ..Default::default()
        };
        let mut s = make_initial_state(&g, &profile).unwrap();
        let variance = |u: &[f64]| {
            let mass: f64 = u.iter().sum();
            u.iter()
                .enumerate()
                .map(|(i, x)| x * (g.center(i, 0)[0] - 0.5).powi(2))
                .sum::<f64>()
                / mass
        };
        let mut prev = variance(&s.u);
        for _ in 0..200 {
            st.step(&mut s, f64::INFINITY).unwrap();
            let var = variance(&s.u);
            assert!(var > prev);
            prev = var;
        }
    }
}
