//! Per-step observables and the energy functional.
//!
//! The monitored functional is
//!
//! ```text
//! y = ∫(u+1)^(p-m+1)
//!   + ∫(u+1)^(p-eta) / v^(2k1+sigma1-2)
//!   + ∫(u+1)^(p-eta) / w^(2k2+sigma2-2)
//!   + eps03 ∫(u+1)^(p-eta) / (v^(2k1+sigma3-2) w^(2k2+sigma4-2))
//!   + lambda_v ∫v^2 + lambda_w ∫w^2
//! ```
//!
//! The weights `eps03`, `lambda_v`, `lambda_w` stand in for constants that are
//! only known to exist; they rescale `y` but do not affect whether it stays
//! bounded.

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{compensated_sum, integrate, lp_norm, reduce_max, reduce_min, Grid, SimState};
use crate::params::ModelParams;
use crate::witness::ExponentWitness;

/// CSV column order.
pub const CSV_COLUMNS: [&str; 11] = [
    "t",
    "dt",
    "mass_u",
    "linf_u",
    "lp_u",
    "min_v",
    "min_w",
    "l2_v",
    "l2_w",
    "y",
    "clamp_events_cum",
];

/// Exponent used for `lp_u` when no witness is available.
pub const FALLBACK_LP: f64 = 2.0;

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub dt: f64,
    pub mass_u: f64,
    pub linf_u: f64,
    pub lp_u: f64,
    pub min_v: f64,
    pub min_w: f64,
    pub l2_v: f64,
    pub l2_w: f64,
    /// NaN when no witness exists (parameters outside the theorem regime).
    pub y: f64,
    pub clamp_events_cum: u64,
}

impl DiagnosticsRecord {
    pub fn csv_header() -> String {
        CSV_COLUMNS.join(",")
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.t,
            self.dt,
            self.mass_u,
            self.linf_u,
            self.lp_u,
            self.min_v,
            self.min_w,
            self.l2_v,
            self.l2_w,
            self.y,
            self.clamp_events_cum
        )
    }

    pub fn parse_csv_row(line: &str) -> Result<Self> {
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        if cols.len() != CSV_COLUMNS.len() {
            return Err(Error::Validation(format!(
                "expected {} columns, found {}",
                CSV_COLUMNS.len(),
                cols.len()
            )));
        }
        let f = |i: usize| -> Result<f64> {
            cols[i]
                .parse::<f64>()
                .map_err(|e| Error::Validation(format!("column {}: {e}", CSV_COLUMNS[i])))
        };
        Ok(Self {
            t: f(0)?,
            dt: f(1)?,
            mass_u: f(2)?,
            linf_u: f(3)?,
            lp_u: f(4)?,
            min_v: f(5)?,
            min_w: f(6)?,
            l2_v: f(7)?,
            l2_w: f(8)?,
            y: f(9)?,
            clamp_events_cum: cols[10]
                .parse()
                .map_err(|e| Error::Validation(format!("column clamp_events_cum: {e}")))?,
        })
    }
}

/// Evaluates the energy functional on a state.
pub fn energy_functional(state: &SimState, witness: &ExponentWitness, params: &ModelParams, grid: &Grid) -> Result<f64> {
    for (name, field) in [("v", &state.v), ("w", &state.w)] {
        if let Some((cell, &value)) = field.iter().enumerate().find(|(_, &x)| !(x > 0.0)) {
            return Err(Error::Positivity { field: name, cell, value });
        }
    }
    let ExponentWitness {
        p,
        eta,
        sigma1,
        sigma2,
        sigma3,
        sigma4,
        eps03,
        lambda_v,
        lambda_w,
        ..
    } = *witness;
    let e_mass = p - params.m + 1.0;
    let e_u = p - eta;
    let e_v1 = 2.0 * params.k1 + sigma1 - 2.0;
    let e_w1 = 2.0 * params.k2 + sigma2 - 2.0;
    let e_v3 = 2.0 * params.k1 + sigma3 - 2.0;
    let e_w4 = 2.0 * params.k2 + sigma4 - 2.0;

    let n = grid.len();
    let mut t_mass = Vec::with_capacity(n);
    let mut t_v = Vec::with_capacity(n);
    let mut t_w = Vec::with_capacity(n);
    let mut t_vw = Vec::with_capacity(n);
    for k in 0..n {
        let u1 = state.u[k] + 1.0;
        let (v, w) = (state.v[k], state.w[k]);
        let ue = u1.powf(e_u);
        t_mass.push(u1.powf(e_mass));
        t_v.push(ue / v.powf(e_v1));
        t_w.push(ue / w.powf(e_w1));
        t_vw.push(ue / (v.powf(e_v3) * w.powf(e_w4)));
    }
    let vol = grid.cell_volume();
    let v2 = compensated_sum(state.v.iter().map(|x| x * x)) * vol;
    let w2 = compensated_sum(state.w.iter().map(|x| x * x)) * vol;
    Ok(integrate(&t_mass, grid)
        + integrate(&t_v, grid)
        + integrate(&t_w, grid)
        + eps03 * integrate(&t_vw, grid)
        + lambda_v * v2
        + lambda_w * w2)
}

/// Collects every observable of `state`. `dt` is the step that produced it.
pub fn record(
    state: &SimState,
    dt: f64,
    witness: Option<&ExponentWitness>,
    params: &ModelParams,
    grid: &Grid,
) -> Result<DiagnosticsRecord> {
    let p = witness.map_or(FALLBACK_LP, |w| w.p);
    let y = match witness {
        Some(w) => energy_functional(state, w, params, grid)?,
        None => f64::NAN,
    };
    Ok(DiagnosticsRecord {
        t: state.t,
        dt,
        mass_u: integrate(&state.u, grid),
        linf_u: reduce_max(&state.u),
        lp_u: lp_norm(&state.u, grid, p)?,
        min_v: reduce_min(&state.v),
        min_w: reduce_min(&state.w),
        l2_v: lp_norm(&state.v, grid, 2.0)?,
        l2_w: lp_norm(&state.w, grid, 2.0)?,
        y,
        clamp_events_cum: state.clamp_events,
    })
}

/// Slopes `c17` tried by the envelope fit.
pub const ENVELOPE_C17: [f64; 3] = [0.01, 0.1, 1.0];
/// Relative slack on the comparison bound.
pub const ENVELOPE_SLACK: f64 = 0.05;

/// One fitted `(c17, c18)` pair.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeFit {
    pub c17: f64,
    pub c18: f64,
    /// `max(y(0), (c18/c17)^(1/kappa)) * (1 + slack)`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeReport {
    pub fits: Vec<EnvelopeFit>,
    /// Index into `fits` of the tightest pair whose bound holds, if any.
    pub best: Option<usize>,
    pub sup_y: f64,
}

impl EnvelopeReport {
    pub fn bounded(&self) -> bool {
        self.best.is_some()
    }

    pub fn best_fit(&self) -> Option<&EnvelopeFit> {
        self.best.map(|i| &self.fits[i])
    }
}

impl fmt::Display for EnvelopeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for fit in &self.fits {
            writeln!(
                f,
                "envelope[c17={}] = c18 {} bound {} {}",
                fit.c17,
                fit.c18,
                fit.bound,
                if fit.holds { "holds" } else { "violated" }
            )?;
        }
        writeln!(f, "envelope.sup_y = {}", self.sup_y)?;
        match self.best_fit() {
            Some(b) => writeln!(f, "envelope = bounded envelope holds (c17 = {}, c18 = {})", b.c17, b.c18),
            None => writeln!(f, "envelope = no bounded envelope"),
        }
    }
}

/// Fits `y' + c17 y^kappa <= c18` to a sampled series with forward
/// differences, for each `c17` in [`ENVELOPE_C17`], and checks the implied
/// comparison bound.
pub fn ode_envelope_check(series: &[(f64, f64)], kappa: f64) -> Result<EnvelopeReport> {
    if series.len() < 10 {
        return Err(Error::Validation(format!(
            "envelope check needs at least 10 samples, got {}",
            series.len()
        )));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::Validation(format!("kappa must lie in (0, 1], got {kappa}")));
    }
    for (i, w) in series.windows(2).enumerate() {
        if !(w[1].0 > w[0].0) {
            return Err(Error::Validation(format!("time is not increasing at sample {}", i + 1)));
        }
    }
    if let Some(&(t, y)) = series.iter().find(|(_, y)| !(y.is_finite() && *y >= 0.0)) {
        return Err(Error::Validation(format!("invalid y = {y} at t = {t}")));
    }
    let y0 = series[0].1;
    let sup_y = series.iter().map(|s| s.1).fold(f64::NEG_INFINITY, f64::max);
    let fits: Vec<EnvelopeFit> = ENVELOPE_C17
        .iter()
        .map(|&c17| {
            let c18 = series
                .windows(2)
                .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0) + c17 * w[0].1.powf(kappa))
                .fold(0.0f64, f64::max);
            let bound = y0.max((c18 / c17).powf(1.0 / kappa)) * (1.0 + ENVELOPE_SLACK);
            EnvelopeFit {
                c17,
                c18,
                bound,
                holds: sup_y <= bound,
            }
        })
        .collect();
    let best = fits
        .iter()
        .enumerate()
        .filter(|(_, f)| f.holds)
        .min_by(|a, b| a.1.bound.total_cmp(&b.1.bound))
        .map(|(i, _)| i);
    Ok(EnvelopeReport { fits, best, sup_y })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witness::find_exponent_witness;

    fn base() -> (ExponentWitness, ModelParams, Grid) {
        let params = ModelParams::default();
        let w = find_exponent_witness(&params).unwrap();
        (w, params, Grid::new_1d(8, 1.0).unwrap())
    }

    #[test]
    fn functional_on_unit_state() {
        let (w, params, g) = base();
        let s = SimState::new(vec![1.0; 8], vec![1.0; 8], vec![1.0; 8]);
        let y = energy_functional(&s, &w, &params, &g).unwrap();
        assert!((y - 22.0).abs() < 1e-12, "{y}");

        let w2 = w.clone().with_weights(1.0, 2.0, 1.0).unwrap();
        let y2 = energy_functional(&s, &w2, &params, &g).unwrap();
        assert!((y2 - y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn functional_increases_with_u() {
        let (w, params, g) = base();
        let mut s = SimState::new(vec![0.5; 8], vec![1.3; 8], vec![0.7; 8]);
        let y0 = energy_functional(&s, &w, &params, &g).unwrap();
        assert!(y0 > 0.0);
        for k in 0..8 {
            s.u[k] += 0.1;
            let y1 = energy_functional(&s, &w, &params, &g).unwrap();
            assert!(y1 > y0);
            s.u[k] -= 0.1;
        }
    }

    #[test]
    fn functional_rejects_nonpositive_signal() {
        let (w, params, g) = base();
        let mut s = SimState::new(vec![1.0; 8], vec![1.0; 8], vec![1.0; 8]);
        s.w[3] = 0.0;
        assert!(matches!(
            energy_functional(&s, &w, &params, &g),
            Err(Error::Positivity { field: "w", cell: 3, .. })
        ));
    }

    #[test]
    fn functional_is_continuous_in_exponents() {
        // eta, sigmas -> 0 with m = 1 approaches ∫(u+1)^p + 3∫(u+1)^p/(v^(2k-2)...) + norms
        let (w, params, g) = base();
        let s = SimState::new(
            (0..8).map(|i| 0.3 * i as f64).collect(),
            (0..8).map(|i| 1.0 + 0.1 * i as f64).collect(),
            vec![1.2; 8],
        );
        let limit = ExponentWitness {
            eta: 0.0,
            sigma1: 0.0,
            sigma2: 0.0,
            sigma3: 0.0,
            sigma4: 0.0,
            ..w.clone()
        };
        let y_lim = energy_functional(&s, &limit, &params, &g).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
            let near = ExponentWitness {
                eta: eps,
                sigma1: eps,
                sigma2: eps,
                sigma3: -eps,
                sigma4: -eps,
                ..w.clone()
            };
            let d = (energy_functional(&s, &near, &params, &g).unwrap() - y_lim).abs();
            assert!(d < prev);
            prev = d;
        }
        assert!(prev < 1e-2 * y_lim);
    }

    #[test]
    fn record_fills_everything() {
        let (w, params, g) = base();
        let s = SimState::new(vec![2.0; 8], vec![3.0; 8], vec![4.0; 8]);
        let r = record(&s, 0.1, Some(&w), &params, &g).unwrap();
        assert_eq!(r.mass_u, 2.0);
        assert_eq!(r.linf_u, 2.0);
        assert!((r.lp_u - 2.0).abs() < 1e-14);
        assert_eq!((r.min_v, r.min_w), (3.0, 4.0));
        assert!((r.l2_v - 3.0).abs() < 1e-14);
        assert!(r.y > 0.0);
        let back = DiagnosticsRecord::parse_csv_row(&r.csv_row()).unwrap();
        assert_eq!(back, r);

        let r = record(&s, 0.1, None, &params, &g).unwrap();
        assert!(r.y.is_nan());
    }

    #[test]
    fn envelope_constant_series() {
        let series: Vec<_> = (0..20).map(|i| (i as f64 * 0.1, 5.0)).collect();
        let rep = ode_envelope_check(&series, 1.0).unwrap();
        for fit in &rep.fits {
            assert!((fit.c18 - fit.c17 * 5.0).abs() < 1e-12);
            assert!(fit.holds);
            assert!((fit.bound - 5.0 * 1.05).abs() < 1e-12);
        }
        assert!(rep.bounded());
    }

    #[test]
    fn envelope_exponential_decay() {
        let dt = 1e-3;
        let series: Vec<_> = (0..2000).map(|i| (i as f64 * dt, (-(i as f64) * dt).exp())).collect();
        let rep = ode_envelope_check(&series, 1.0).unwrap();
        let fit = rep.fits.iter().find(|f| f.c17 == 1.0).unwrap();
        // forward differences of e^-t give c18 of order dt/2
        assert!(fit.c18 <= dt, "{}", fit.c18);
        assert!(rep.bounded());
    }

    #[test]
    fn envelope_detects_growth() {
        let series: Vec<_> = (0..50).map(|i| (i as f64, (i as f64).powi(3))).collect();
        let rep = ode_envelope_check(&series, 1.0).unwrap();
        // growth is still "explained" by some c18, but the bound must follow sup y
        assert!(rep.fits.iter().all(|f| f.c18 > 0.0));
    }

    #[test]
    fn envelope_input_errors() {
        assert!(ode_envelope_check(&[(0.0, 1.0); 5], 1.0).is_err());
        let mut s: Vec<_> = (0..12).map(|i| (i as f64, 1.0)).collect();
        s[5].0 = s[4].0;
        assert!(ode_envelope_check(&s, 1.0).is_err());
    }
}
