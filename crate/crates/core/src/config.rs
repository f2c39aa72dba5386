//! Run configuration in a line-oriented `key = value` format.
//!
//! Keys are dotted (`params.m = 1.5`), `#` starts a comment, blank lines are
//! ignored and every key not given takes its default. [`RunConfig::to_text`]
//! writes every key in a fixed order, and parsing that text yields the same
//! configuration back.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::grid::{Grid, InitialProfile, Profile, ProfileKind};
use crate::kernels::{DensityChoice, KernelSelection, KernelSet, SignalChoice};
use crate::params::{validate_params, ModelParams};
use crate::solver::{StepOptions, DEFAULT_LINF_FACTOR, DEFAULT_V_FLOOR_FACTOR};
use crate::witness::{find_exponent_witness, ExponentWitness};

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "CHEMOTAXIS_OUT";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    /// Parameters must satisfy every boundedness hypothesis.
    Theorem,
    /// Any parameters accepted; used for contrast runs.
    Explore,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Theorem => "theorem",
            Scenario::Explore => "explore",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub grid: GridSpec,
    pub params: ModelParams,
    pub kernels: KernelSelection,
    pub init: InitialProfile,
    pub horizon: f64,
    pub safety: f64,
    pub dt_max: f64,
    pub dt_min: f64,
    pub upwind: bool,
    pub linear_tol: f64,
    /// Empty means `$CHEMOTAXIS_OUT` or `./runs`.
    pub output_dir: PathBuf,
    pub record_stride: u64,
    pub checkpoint_stride: u64,
    pub linf_factor: f64,
    pub v_floor_factor: f64,
    pub eps03: f64,
    pub lambda_v: f64,
    pub lambda_w: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::Theorem,
            grid: GridSpec {
                dim: 1,
                nx: 256,
                ny: 64,
                lx: 1.0,
                ly: 1.0,
            },
            params: ModelParams::default(),
            kernels: KernelSelection::default(),
            init: InitialProfile::default(),
            horizon: 1.0,
            safety: 0.9,
            dt_max: 1e-2,
            dt_min: 1e-14,
            upwind: false,
            linear_tol: 1e-10,
            output_dir: PathBuf::new(),
            record_stride: 100,
            checkpoint_stride: 100_000,
            linf_factor: DEFAULT_LINF_FACTOR,
            v_floor_factor: DEFAULT_V_FLOOR_FACTOR,
            eps03: 1.0,
            lambda_v: 1.0,
            lambda_w: 1.0,
        }
    }
}

fn parse_f64(v: &str) -> std::result::Result<f64, String> {
    v.parse::<f64>().map_err(|_| format!("expected a number, found '{v}'"))
}

fn parse_usize(v: &str) -> std::result::Result<usize, String> {
    v.parse::<usize>().map_err(|_| format!("expected a nonnegative integer, found '{v}'"))
}

fn parse_u64(v: &str) -> std::result::Result<u64, String> {
    v.parse::<u64>().map_err(|_| format!("expected a nonnegative integer, found '{v}'"))
}

fn parse_u32(v: &str) -> std::result::Result<u32, String> {
    v.parse::<u32>().map_err(|_| format!("expected a nonnegative integer, found '{v}'"))
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, found '{v}'")),
    }
}

fn set_profile(p: &mut Profile, field: &str, v: &str) -> Option<std::result::Result<(), String>> {
    let r = match field {
        "kind" => ProfileKind::parse(v)
            .map(|k| p.kind = k)
            .ok_or_else(|| format!("unknown profile '{v}' (uniform, gaussian, cosine)")),
        "base" => parse_f64(v).map(|x| p.base = x),
        "amplitude" => parse_f64(v).map(|x| p.amplitude = x),
        "mass" => {
            if v == "none" {
                p.mass = None;
                Ok(())
            } else {
                parse_f64(v).map(|x| p.mass = Some(x))
            }
        }
        "center_x" => parse_f64(v).map(|x| p.center[0] = x),
        "center_y" => parse_f64(v).map(|x| p.center[1] = x),
        "width" => parse_f64(v).map(|x| p.width = x),
        "mode_x" => parse_u32(v).map(|x| p.mode[0] = x),
        "mode_y" => parse_u32(v).map(|x| p.mode[1] = x),
        "noise" => parse_f64(v).map(|x| p.noise = x),
        _ => return None,
    };
    Some(r)
}

fn profile_entries(prefix: &str, p: &Profile, out: &mut Vec<(String, String)>) {
    let mut push = |k: &str, v: String| out.push((format!("{prefix}.{k}"), v));
    push("kind", p.kind.name().into());
    push("base", p.base.to_string());
    push("amplitude", p.amplitude.to_string());
    push("mass", p.mass.map_or_else(|| "none".into(), |m| m.to_string()));
    push("center_x", p.center[0].to_string());
    push("center_y", p.center[1].to_string());
    push("width", p.width.to_string());
    push("mode_x", p.mode[0].to_string());
    push("mode_y", p.mode[1].to_string());
    push("noise", p.noise.to_string());
}

impl RunConfig {
    /// Sets a single key. Returns `Ok(false)` for unknown keys.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<bool, String> {
        let v = value;
        let p = &mut self.params;
        let r = match key {
            "scenario" => match v {
                "theorem" => {
                    self.scenario = Scenario::Theorem;
                    Ok(())
                }
                "explore" => {
                    self.scenario = Scenario::Explore;
                    Ok(())
                }
                _ => Err(format!("unknown scenario '{v}' (theorem, explore)")),
            },
            "grid.dim" => parse_usize(v).map(|x| self.grid.dim = x),
            "grid.nx" => parse_usize(v).map(|x| self.grid.nx = x),
            "grid.ny" => parse_usize(v).map(|x| self.grid.ny = x),
            "grid.lx" => parse_f64(v).map(|x| self.grid.lx = x),
            "grid.ly" => parse_f64(v).map(|x| self.grid.ly = x),
            "params.d1" => parse_f64(v).map(|x| p.d1 = x),
            "params.d2" => parse_f64(v).map(|x| p.d2 = x),
            "params.alpha" => parse_f64(v).map(|x| p.alpha = x),
            "params.beta" => parse_f64(v).map(|x| p.beta = x),
            "params.gamma" => parse_f64(v).map(|x| p.gamma = x),
            "params.delta" => parse_f64(v).map(|x| p.delta = x),
            "params.a0" => parse_f64(v).map(|x| p.a0 = x),
            "params.b0" => parse_f64(v).map(|x| p.b0 = x),
            "params.c0" => parse_f64(v).map(|x| p.c0 = x),
            "params.m" => parse_f64(v).map(|x| p.m = x),
            "params.q" => parse_f64(v).map(|x| p.q = x),
            "params.r" => parse_f64(v).map(|x| p.r = x),
            "params.chi0" => parse_f64(v).map(|x| p.chi0 = x),
            "params.xi0" => parse_f64(v).map(|x| p.xi0 = x),
            "params.k1" => parse_f64(v).map(|x| p.k1 = x),
            "params.k2" => parse_f64(v).map(|x| p.k2 = x),
            "kernels.g" => DensityChoice::parse(v)
                .map(|c| self.kernels.g = c)
                .ok_or_else(|| format!("unknown density kernel '{v}' (power, linear, zero)")),
            "kernels.h" => DensityChoice::parse(v)
                .map(|c| self.kernels.h = c)
                .ok_or_else(|| format!("unknown density kernel '{v}' (power, linear, zero)")),
            "kernels.chi" => SignalChoice::parse(v)
                .map(|c| self.kernels.chi = c)
                .ok_or_else(|| format!("unknown signal kernel '{v}' (power, constant)")),
            "kernels.xi" => SignalChoice::parse(v)
                .map(|c| self.kernels.xi = c)
                .ok_or_else(|| format!("unknown signal kernel '{v}' (power, constant)")),
            "time.horizon" => parse_f64(v).map(|x| self.horizon = x),
            "time.safety" => parse_f64(v).map(|x| self.safety = x),
            "time.dt_max" => parse_f64(v).map(|x| self.dt_max = x),
            "time.dt_min" => parse_f64(v).map(|x| self.dt_min = x),
            "solver.upwind" => parse_bool(v).map(|x| self.upwind = x),
            "solver.linear_tol" => parse_f64(v).map(|x| self.linear_tol = x),
            "output.dir" => {
                self.output_dir = PathBuf::from(v);
                Ok(())
            }
            "output.record_stride" => parse_u64(v).map(|x| self.record_stride = x),
            "output.checkpoint_stride" => parse_u64(v).map(|x| self.checkpoint_stride = x),
            "monitor.linf_factor" => parse_f64(v).map(|x| self.linf_factor = x),
            "monitor.v_floor_factor" => parse_f64(v).map(|x| self.v_floor_factor = x),
            "weights.eps03" => parse_f64(v).map(|x| self.eps03 = x),
            "weights.lambda_v" => parse_f64(v).map(|x| self.lambda_v = x),
            "weights.lambda_w" => parse_f64(v).map(|x| self.lambda_w = x),
            "seed" => parse_u64(v).map(|x| self.init.seed = x),
            _ => {
                let (field, prof) = if let Some(f) = key.strip_prefix("init.u.") {
                    (f, &mut self.init.u)
                } else if let Some(f) = key.strip_prefix("init.v.") {
                    (f, &mut self.init.v)
                } else if let Some(f) = key.strip_prefix("init.w.") {
                    (f, &mut self.init.w)
                } else {
                    return Ok(false);
                };
                match set_profile(prof, field, v) {
                    Some(r) => r,
                    None => return Ok(false),
                }
            }
        };
        r.map(|_| true)
    }

    /// Every key with its current value, in canonical order.
    pub fn entries(&self) -> Vec<(String, String)> {
        let p = &self.params;
        let mut out: Vec<(String, String)> = vec![
            ("scenario".into(), self.scenario.name().into()),
            ("grid.dim".into(), self.grid.dim.to_string()),
            ("grid.nx".into(), self.grid.nx.to_string()),
            ("grid.ny".into(), self.grid.ny.to_string()),
            ("grid.lx".into(), self.grid.lx.to_string()),
            ("grid.ly".into(), self.grid.ly.to_string()),
        ];
        for (k, v) in [
            ("d1", p.d1),
            ("d2", p.d2),
            ("alpha", p.alpha),
            ("beta", p.beta),
            ("gamma", p.gamma),
            ("delta", p.delta),
            ("a0", p.a0),
            ("b0", p.b0),
            ("c0", p.c0),
            ("m", p.m),
            ("q", p.q),
            ("r", p.r),
            ("chi0", p.chi0),
            ("xi0", p.xi0),
            ("k1", p.k1),
            ("k2", p.k2),
        ] {
            out.push((format!("params.{k}"), v.to_string()));
        }
        out.push(("kernels.g".into(), self.kernels.g.name().into()));
        out.push(("kernels.h".into(), self.kernels.h.name().into()));
        out.push(("kernels.chi".into(), self.kernels.chi.name().into()));
        out.push(("kernels.xi".into(), self.kernels.xi.name().into()));
        profile_entries("init.u", &self.init.u, &mut out);
        profile_entries("init.v", &self.init.v, &mut out);
        profile_entries("init.w", &self.init.w, &mut out);
        out.extend([
            ("seed".into(), self.init.seed.to_string()),
            ("time.horizon".into(), self.horizon.to_string()),
            ("time.safety".into(), self.safety.to_string()),
            ("time.dt_max".into(), self.dt_max.to_string()),
            ("time.dt_min".into(), self.dt_min.to_string()),
            ("solver.upwind".into(), self.upwind.to_string()),
            ("solver.linear_tol".into(), self.linear_tol.to_string()),
            ("output.dir".into(), self.output_dir.display().to_string()),
            ("output.record_stride".into(), self.record_stride.to_string()),
            ("output.checkpoint_stride".into(), self.checkpoint_stride.to_string()),
            ("monitor.linf_factor".into(), self.linf_factor.to_string()),
            ("monitor.v_floor_factor".into(), self.v_floor_factor.to_string()),
            ("weights.eps03".into(), self.eps03.to_string()),
            ("weights.lambda_v".into(), self.lambda_v.to_string()),
            ("weights.lambda_w".into(), self.lambda_w.to_string()),
        ]);
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }

    pub fn build_grid(&self) -> Result<Grid> {
        Grid::new(self.grid.dim, [self.grid.nx, self.grid.ny], [self.grid.lx, self.grid.ly])
    }

    /// Model parameters with `n` taken from the grid dimension.
    pub fn model_params(&self) -> ModelParams {
        ModelParams {
            n: self.grid.dim as u32,
            ..self.params.clone()
        }
    }

    pub fn kernel_set(&self) -> KernelSet {
        KernelSet::with_selection(&self.model_params(), self.kernels)
    }

    pub fn step_options(&self) -> StepOptions {
        StepOptions {
            safety: self.safety,
            dt_max: self.dt_max,
            dt_min: self.dt_min,
            upwind: self.upwind,
            linear_tol: self.linear_tol,
        }
    }

    /// Witness with the configured weights, when the parameters admit one.
    pub fn witness(&self) -> Result<Option<ExponentWitness>> {
        let params = self.model_params();
        if !validate_params(&params).in_regime || !self.kernels_in_theorem_class() {
            return Ok(None);
        }
        find_exponent_witness(&params)?
            .with_weights(self.eps03, self.lambda_v, self.lambda_w)
            .map(Some)
    }

    /// Power-decay sensitivities and density kernels at or below the bound.
    pub fn kernels_in_theorem_class(&self) -> bool {
        let k = &self.kernels;
        k.chi == SignalChoice::Power
            && k.xi == SignalChoice::Power
            && k.g != DensityChoice::Linear
            && k.h != DensityChoice::Linear
    }

    pub fn resolved_output_dir(&self) -> PathBuf {
        if !self.output_dir.as_os_str().is_empty() {
            return self.output_dir.clone();
        }
        std::env::var_os(OUTPUT_ROOT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("runs"))
    }

    /// Structural invariants; returns the offending key and a message.
    pub fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        if self.record_stride < 1 {
            return Err(("output.record_stride", "record stride must be at least 1".into()));
        }
        if self.checkpoint_stride < 1 {
            return Err(("output.checkpoint_stride", "checkpoint stride must be at least 1".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(("time.horizon", format!("horizon must be positive, got {}", self.horizon)));
        }
        if !(self.safety > 0.0 && self.safety <= 1.0) {
            return Err(("time.safety", format!("safety must lie in (0, 1], got {}", self.safety)));
        }
        if !(self.dt_max > 0.0) {
            return Err(("time.dt_max", "dt_max must be positive".into()));
        }
        if !(self.dt_min >= 0.0 && self.dt_min < self.dt_max) {
            return Err(("time.dt_min", "dt_min must lie in [0, dt_max)".into()));
        }
        if !(self.linear_tol > 0.0) {
            return Err(("solver.linear_tol", "linear tolerance must be positive".into()));
        }
        if !(self.linf_factor > 1.0) {
            return Err(("monitor.linf_factor", "linf factor must exceed 1".into()));
        }
        if !(self.v_floor_factor > 0.0 && self.v_floor_factor < 1.0) {
            return Err(("monitor.v_floor_factor", "v floor factor must lie in (0, 1)".into()));
        }
        for (key, w) in [
            ("weights.eps03", self.eps03),
            ("weights.lambda_v", self.lambda_v),
            ("weights.lambda_w", self.lambda_w),
        ] {
            if !(w > 0.0 && w.is_finite()) {
                return Err((key, format!("weight must be positive, got {w}")));
            }
        }
        if let Err(e) = self.build_grid() {
            return Err(("grid.nx", e.to_string()));
        }
        let report = validate_params(&self.model_params());
        if let Some(c) = report.failures().find(|c| c.hard) {
            return Err((param_key(&c.name), format!("{} ({})", c.name, c.detail)));
        }
        if self.scenario == Scenario::Theorem {
            if !report.in_regime {
                let c = report.failures().next().unwrap();
                let names: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
                return Err((
                    param_key(&c.name),
                    format!("theorem scenario requires {}", names.join(", ")),
                ));
            }
            if !self.kernels_in_theorem_class() {
                return Err((
                    "kernels.chi",
                    "theorem scenario requires power-decay signal kernels and power or zero density kernels".into(),
                ));
            }
        }
        Ok(())
    }
}

fn param_key(check_name: &str) -> &'static str {
    const KEYS: [&str; 16] = [
        "params.d1",
        "params.d2",
        "params.alpha",
        "params.beta",
        "params.gamma",
        "params.delta",
        "params.a0",
        "params.b0",
        "params.c0",
        "params.chi0",
        "params.xi0",
        "params.m",
        "params.q",
        "params.r",
        "params.k1",
        "params.k2",
    ];
    let head = check_name.split_whitespace().next().unwrap_or("");
    KEYS.iter()
        .find(|k| k.strip_prefix("params.") == Some(head))
        .copied()
        .unwrap_or("grid.dim")
}

/// Splits a config line into `(key, value)`; `None` for blank/comment lines.
pub(crate) fn split_line(raw: &str, line: usize) -> Result<Option<(&str, &str)>> {
    let text = raw.split('#').next().unwrap_or("").trim();
    if text.is_empty() {
        return Ok(None);
    }
    let (k, v) = text.split_once('=').ok_or_else(|| Error::Config {
        line,
        msg: format!("expected 'key = value', found '{text}'"),
    })?;
    Ok(Some((k.trim(), v.trim())))
}

/// Parses config text, collecting unknown keys.
pub(crate) fn parse_lines<'a>(
    lines: impl Iterator<Item = (usize, &'a str, &'a str)>,
) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut unknown = Vec::new();
    for (line, key, value) in lines {
        if let Some(prev) = seen.insert(key.to_string(), line) {
            return Err(Error::Config {
                line,
                msg: format!("duplicate key '{key}' (first set on line {prev})"),
            });
        }
        match cfg.set(key, value) {
            Ok(true) => {}
            Ok(false) => unknown.push(format!("'{key}' (line {line})")),
            Err(msg) => return Err(Error::Config { line, msg: format!("{key}: {msg}") }),
        }
    }
    if !unknown.is_empty() {
        let line = seen.get(unknown[0].split('\'').nth(1).unwrap_or("")).copied().unwrap_or(0);
        return Err(Error::Config {
            line,
            msg: format!("unknown keys: {}", unknown.join(", ")),
        });
    }
    if let Err((key, msg)) = cfg.check() {
        let line = seen.get(key).copied().unwrap_or(0);
        return Err(Error::Config { line, msg });
    }
    Ok(cfg)
}

/// Parses a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if let Some((k, v)) = split_line(raw, i + 1)? {
            entries.push((i + 1, k, v));
        }
    }
    parse_lines(entries.into_iter())
}

/// Named scenario presets.
pub const PRESETS: [&str; 4] = ["boundedness", "equilibrium", "contrast", "diffusion"];

pub fn preset(name: &str) -> Option<RunConfig> {
    let mut c = RunConfig::default();
    match name {
        // Nonlinear diffusion with decaying sensitivities, in regime.
        "boundedness" => {
            c.params.m = 1.5;
            c.params.chi0 = 5.0;
            c.params.xi0 = 5.0;
            c.init.u = Profile::gaussian(0.1, 1.0, 0.1).with_mass(4.0);
            c.horizon = 50.0;
            c.record_stride = 2000;
            c.checkpoint_stride = 4_000_000;
        }
        // u = 1, v = alpha/beta, w = gamma/delta with unit rates.
        "equilibrium" => {
            c.record_stride = 10;
            c.horizon = 1000.0 * 0.9 * 0.5 / (256.0 * 256.0);
        }
        // Constant sensitivities with the classical linear density response,
        // attraction dominating and a large mass on the unit square.
        "contrast" => {
            c.scenario = Scenario::Explore;
            c.grid = GridSpec {
                dim: 2,
                nx: 128,
                ny: 128,
                lx: 1.0,
                ly: 1.0,
            };
            c.params.chi0 = 20.0;
            c.params.xi0 = 1.0;
            c.kernels = KernelSelection {
                g: DensityChoice::Linear,
                h: DensityChoice::Linear,
                chi: SignalChoice::Constant,
                xi: SignalChoice::Constant,
            };
            c.init.u = Profile::gaussian(0.0, 1.0, 0.1).with_mass(50.0);
            c.upwind = true;
            c.safety = 0.4;
            c.horizon = 1.0;
            c.linf_factor = 100.0;
            c.record_stride = 50;
            c.checkpoint_stride = 1000;
        }
        // Heat equation on a single cosine mode.
        "diffusion" => {
            c.kernels.g = DensityChoice::Zero;
            c.kernels.h = DensityChoice::Zero;
            c.init.u = Profile::cosine(1.0, 0.5, 1);
            c.horizon = 0.1;
            c.record_stride = 100;
        }
        _ => return None,
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_config_defaults_everything_else() {
        let c = parse_config("params.m = 1\n").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.to_text(), RunConfig::default().to_text());
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = parse_config("# header\n\n  params.m = 1.5   # nonlinear\ntime.horizon=2\n").unwrap();
        assert_eq!(c.params.m, 1.5);
        assert_eq!(c.horizon, 2.0);
    }

    #[test]
    fn theorem_scenario_gates_k1() {
        let err = parse_config("scenario = theorem\nparams.k1 = 0.5\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("k1 > 1") && msg.contains("line 2"), "{msg}");
        assert!(parse_config("scenario = explore\nparams.k1 = 0.5\n").is_ok());
    }

    #[test]
    fn unknown_keys_listed() {
        let err = parse_config("params.m = 1\nfoo = 1\nparams.zeta = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("'foo' (line 2)") && msg.contains("'params.zeta' (line 3)"), "{msg}");
    }

    #[test]
    fn type_mismatch_reports_line() {
        match parse_config("\n\ngrid.nx = many\n").unwrap_err() {
            Error::Config { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("grid.nx"));
            }
            e => panic!("{e}"),
        }
        assert!(parse_config("solver.upwind = yes").is_err());
        assert!(parse_config("just text").is_err());
        assert!(parse_config("params.m = 1\nparams.m = 2").is_err());
    }

    #[test]
    fn invariant_violations() {
        for bad in [
            "output.record_stride = 0",
            "time.horizon = -1",
            "time.safety = 1.5",
            "params.beta = 0",
            "grid.nx = 2",
            "weights.eps03 = 0",
        ] {
            assert!(parse_config(bad).is_err(), "{bad}");
        }
        match parse_config("scenario = explore\nparams.beta = 0").unwrap_err() {
            Error::Config { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn presets_are_valid_and_round_trip() {
        for name in PRESETS {
            let c = preset(name).unwrap();
            assert!(c.check().is_ok(), "{name}");
            assert_eq!(parse_config(&c.to_text()).unwrap(), c, "{name}");
        }
        assert!(preset("nope").is_none());
    }

    #[test]
    fn witness_only_in_regime() {
        assert!(preset("boundedness").unwrap().witness().unwrap().is_some());
        assert!(preset("contrast").unwrap().witness().unwrap().is_none());
    }

    fn arb_profile() -> impl Strategy<Value = Profile> {
        (
            0usize..3,
            0.5f64..5.0,
            0.0f64..0.4,
            prop::option::of(1.0f64..10.0),
            (0.0f64..1.0, 0.0f64..1.0),
            0.01f64..0.5,
            (0u32..4, 0u32..4),
            0.0f64..0.5,
        )
            .prop_map(|(kind, base, amplitude, mass, center, width, mode, noise)| Profile {
                kind: [ProfileKind::Uniform, ProfileKind::Gaussian, ProfileKind::Cosine][kind],
                base,
                amplitude,
                mass,
                center: [center.0, center.1],
                width,
                mode: [mode.0, mode.1],
                noise,
            })
    }

    fn arb_config() -> impl Strategy<Value = RunConfig> {
        (
            (1usize..3, 4usize..300, 4usize..300, 0.1f64..10.0, 0.1f64..10.0),
            prop::collection::vec(0.01f64..10.0, 11),
            (-1.0f64..3.0, 0.0f64..1.0, 0.0f64..1.0, 1.01f64..4.0, 1.01f64..4.0),
            (arb_profile(), arb_profile(), arb_profile(), any::<u64>()),
            (0.01f64..100.0, 0.01f64..1.0, any::<bool>(), 1u64..10_000, 1u64..10_000),
            (1.5f64..1e8, 1e-12f64..0.5, 0.1f64..3.0, 0.1f64..3.0, 0.1f64..3.0),
            (0usize..3, 0usize..3, any::<bool>(), any::<bool>()),
        )
            .prop_map(|(g, pos, (m, a, b, k1, k2), (u, v, w, seed), t, mon, ks)| {
                let cap = 2f64.min(m + 1.0);
                let density = [DensityChoice::Power, DensityChoice::Linear, DensityChoice::Zero];
                RunConfig {
                    scenario: Scenario::Explore,
                    grid: GridSpec { dim: g.0, nx: g.1, ny: g.2, lx: g.3, ly: g.4 },
                    params: ModelParams {
                        d1: pos[0],
                        d2: pos[1],
                        alpha: pos[2],
                        beta: pos[3],
                        gamma: pos[4],
                        delta: pos[5],
                        a0: pos[6],
                        b0: pos[7],
                        c0: pos[8],
                        chi0: pos[9],
                        xi0: pos[10],
                        m,
                        q: cap - 0.1 - a,
                        r: cap - 0.1 - b,
                        k1,
                        k2,
                        n: 1,
                    },
                    kernels: KernelSelection {
                        g: density[ks.0],
                        h: density[ks.1],
                        chi: if ks.2 { SignalChoice::Power } else { SignalChoice::Constant },
                        xi: if ks.3 { SignalChoice::Power } else { SignalChoice::Constant },
                    },
                    init: InitialProfile { u, v, w, seed },
                    horizon: t.0,
                    safety: t.1,
                    dt_max: 0.05,
                    dt_min: 1e-13,
                    upwind: t.2,
                    linear_tol: 1e-9,
                    output_dir: PathBuf::from("out/run"),
                    record_stride: t.3,
                    checkpoint_stride: t.4,
                    linf_factor: mon.0,
                    v_floor_factor: mon.1,
                    eps03: mon.2,
                    lambda_v: mon.3,
                    lambda_w: mon.4,
                }
            })
    }

    proptest! {
        #[test]
        fn text_round_trip(c in arb_config()) {
            let text = c.to_text();
            let back = parse_config(&text).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
