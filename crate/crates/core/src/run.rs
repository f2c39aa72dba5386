//! Single-run driver: integrates a [`RunConfig`] and writes its artifacts.
//!
//! A run directory contains
//!
//! * `config.txt`: the full configuration echo,
//! * `diagnostics.csv`: a `# witness ...` comment line, the header, then one
//!   row for the initial state, one every `record_stride` steps and one for
//!   the final state,
//! * `checkpoint_<step>.snap` every `checkpoint_stride` steps and
//!   `final.snap`,
//! * `status.txt`: `status=<ok|u_blowup|v_vanishing|error> t_final=<real>`,
//! * `envelope.txt` when the parameters admit a witness.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::diagnostics::{ode_envelope_check, record, DiagnosticsRecord, EnvelopeReport};
use crate::error::{Error, Result};
use crate::grid::{make_initial_state, SimState};
use crate::snapshot;
use crate::solver::{advance, BlowupMonitor, Halt, Stepper, Trigger};
use crate::witness::ExponentWitness;

pub const CSV_FILE: &str = "diagnostics.csv";
pub const STATUS_FILE: &str = "status.txt";
pub const CONFIG_FILE: &str = "config.txt";
pub const ENVELOPE_FILE: &str = "envelope.txt";
pub const FINAL_SNAPSHOT: &str = "final.snap";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Ok,
    UBlowup,
    VVanishing,
    Error,
}

impl RunStatus {
    pub fn name(self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::UBlowup => "u_blowup",
            RunStatus::VVanishing => "v_vanishing",
            RunStatus::Error => "error",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ok" => Some(RunStatus::Ok),
            "u_blowup" => Some(RunStatus::UBlowup),
            "v_vanishing" => Some(RunStatus::VVanishing),
            "error" => Some(RunStatus::Error),
            _ => None,
        }
    }
}

impl From<Halt> for RunStatus {
    fn from(h: Halt) -> Self {
        match h {
            Halt::Horizon | Halt::Monitor(Trigger::None) => RunStatus::Ok,
            Halt::Monitor(Trigger::UBlowup) => RunStatus::UBlowup,
            Halt::Monitor(Trigger::VVanishing) => RunStatus::VVanishing,
        }
    }
}

pub fn status_line(status: RunStatus, t_final: f64) -> String {
    format!("status={} t_final={}", status.name(), t_final)
}

/// Parses a status file line back into its parts.
pub fn parse_status_line(line: &str) -> Option<(RunStatus, f64)> {
    let mut parts = line.trim().split(' ');
    let status = RunStatus::parse(parts.next()?.strip_prefix("status=")?)?;
    let t = parts.next()?.strip_prefix("t_final=")?.parse().ok()?;
    parts.next().is_none().then_some((status, t))
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub t_final: f64,
    pub steps: u64,
    pub witness: Option<ExponentWitness>,
    pub records: Vec<DiagnosticsRecord>,
    /// Present when a witness exists and enough rows were recorded.
    pub envelope: Option<EnvelopeReport>,
    pub final_state: SimState,
}

impl RunOutcome {
    pub fn sup_linf_u(&self) -> f64 {
        self.records.iter().map(|r| r.linf_u).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sup_y(&self) -> f64 {
        self.records.iter().map(|r| r.y).fold(f64::NEG_INFINITY, f64::max)
    }
}

impl fmt::Display for RunOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", status_line(self.status, self.t_final))?;
        writeln!(f, "steps = {}", self.steps)?;
        writeln!(f, "records = {}", self.records.len())?;
        writeln!(f, "sup_linf_u = {}", self.sup_linf_u())?;
        if let Some(env) = &self.envelope {
            write!(f, "{env}")?;
        }
        Ok(())
    }
}

pub fn witness_comment(witness: Option<&ExponentWitness>) -> String {
    match witness {
        Some(w) => {
            let parts: Vec<String> = w.fields().iter().map(|(k, v)| format!("{k}={v}")).collect();
            format!("# witness {}", parts.join(" "))
        }
        None => "# witness none".into(),
    }
}

struct Sink {
    dir: PathBuf,
    csv: BufWriter<File>,
}

impl Sink {
    fn create(dir: &Path, cfg: &RunConfig, witness: Option<&ExponentWitness>) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let cpath = dir.join(CONFIG_FILE);
        std::fs::write(&cpath, cfg.to_text()).map_err(|e| Error::io(&cpath, e))?;
        let path = dir.join(CSV_FILE);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut sink = Self {
            dir: dir.to_path_buf(),
            csv: BufWriter::new(file),
        };
        sink.line(&witness_comment(witness))?;
        sink.line(&DiagnosticsRecord::csv_header())?;
        Ok(sink)
    }

    fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.csv, "{s}").map_err(|e| Error::io(self.dir.join(CSV_FILE), e))
    }

    fn finish(&mut self, status: RunStatus, t: f64) -> Result<()> {
        self.csv.flush().map_err(|e| Error::io(self.dir.join(CSV_FILE), e))?;
        let path = self.dir.join(STATUS_FILE);
        std::fs::write(&path, status_line(status, t) + "\n").map_err(|e| Error::io(&path, e))
    }
}

/// Runs `cfg`, writing artifacts into `out` when given.
pub fn execute(cfg: &RunConfig, out: Option<&Path>) -> Result<RunOutcome> {
    if let Err((key, msg)) = cfg.check() {
        return Err(Error::Validation(format!("{key}: {msg}")));
    }
    let grid = cfg.build_grid()?;
    let params = cfg.model_params();
    let witness = cfg.witness()?;
    let mut state = make_initial_state(&grid, &cfg.init)?;
    let mut stepper = Stepper::new(grid.clone(), params.clone(), cfg.kernel_set(), cfg.step_options())?;
    let mut monitor = BlowupMonitor::relative_to(&state, cfg.linf_factor, cfg.v_floor_factor);
    let mut sink = match out {
        Some(dir) => Some(Sink::create(dir, cfg, witness.as_ref())?),
        None => None,
    };

    let mut records = vec![record(&state, 0.0, witness.as_ref(), &params, &grid)?];
    if let Some(s) = sink.as_mut() {
        s.line(&records[0].csv_row())?;
    }
    let mut last_recorded = state.step_count;
    let mut last_dt = 0.0;
    let result = advance(&mut stepper, &mut state, cfg.horizon, &mut monitor, |st, rep| {
        last_dt = rep.dt_used;
        if st.step_count % cfg.record_stride == 0 {
            let r = record(st, rep.dt_used, witness.as_ref(), &params, &grid)?;
            if let Some(s) = sink.as_mut() {
                s.line(&r.csv_row())?;
            }
            records.push(r);
            last_recorded = st.step_count;
        }
        if st.step_count % cfg.checkpoint_stride == 0 {
            if let Some(s) = sink.as_ref() {
                snapshot::write(&s.dir.join(format!("checkpoint_{}.snap", st.step_count)), &grid, st)?;
            }
        }
        Ok(())
    });
    let summary = match result {
        Ok(s) => s,
        Err(e) => {
            if let Some(s) = sink.as_mut() {
                // The numerical error is the one worth reporting.
                let _ = s.finish(RunStatus::Error, state.t);
            }
            return Err(e);
        }
    };
    if last_recorded != state.step_count {
        let r = record(&state, last_dt, witness.as_ref(), &params, &grid)?;
        if let Some(s) = sink.as_mut() {
            s.line(&r.csv_row())?;
        }
        records.push(r);
    }
    let status = RunStatus::from(summary.halt);
    let envelope = match &witness {
        Some(w) if records.len() >= 10 => {
            let series: Vec<(f64, f64)> = records.iter().map(|r| (r.t, r.y)).collect();
            Some(ode_envelope_check(&series, w.kappa)?)
        }
        _ => None,
    };
    if let Some(s) = sink.as_mut() {
        snapshot::write(&s.dir.join(FINAL_SNAPSHOT), &grid, &state)?;
        if let Some(env) = &envelope {
            let path = s.dir.join(ENVELOPE_FILE);
            std::fs::write(&path, env.to_string()).map_err(|e| Error::io(&path, e))?;
        }
        s.finish(status, state.t)?;
    }
    Ok(RunOutcome {
        status,
        t_final: state.t,
        steps: summary.steps,
        witness,
        records,
        envelope,
        final_state: state,
    })
}

/// Reads the rows of a diagnostics CSV, skipping comment lines.
pub fn read_csv(path: &Path) -> Result<Vec<DiagnosticsRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    let mut header_seen = false;
    for line in text.lines() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !header_seen {
            if line != DiagnosticsRecord::csv_header() {
                return Err(Error::Validation(format!("{}: unexpected CSV header", path.display())));
            }
            header_seen = true;
            continue;
        }
        rows.push(DiagnosticsRecord::parse_csv_row(line)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::preset;

    #[test]
    fn status_line_round_trip() {
        for s in [RunStatus::Ok, RunStatus::UBlowup, RunStatus::VVanishing, RunStatus::Error] {
            let line = status_line(s, 0.25);
            assert_eq!(parse_status_line(&line), Some((s, 0.25)));
        }
        assert_eq!(status_line(RunStatus::UBlowup, 0.5), "status=u_blowup t_final=0.5");
        assert!(parse_status_line("status=fine t_final=1").is_none());
    }

    #[test]
    fn equilibrium_run_writes_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = preset("equilibrium").unwrap();
        cfg.grid.nx = 32;
        cfg.horizon = 0.01;
        cfg.checkpoint_stride = 20;
        cfg.record_stride = 1;
        let out = execute(&cfg, Some(dir.path())).unwrap();
        assert_eq!(out.status, RunStatus::Ok);
        assert_eq!(out.t_final, 0.01);
        let rows = read_csv(&dir.path().join(CSV_FILE)).unwrap();
        assert_eq!(rows, out.records);
        assert_eq!(rows.last().unwrap().t, 0.01);
        let status = std::fs::read_to_string(dir.path().join(STATUS_FILE)).unwrap();
        assert_eq!(parse_status_line(&status), Some((RunStatus::Ok, 0.01)));
        let csv = std::fs::read_to_string(dir.path().join(CSV_FILE)).unwrap();
        assert!(csv.starts_with("# witness p=3 eta=1"), "{csv}");
        let (_, snap) = snapshot::read(&dir.path().join(FINAL_SNAPSHOT)).unwrap();
        assert_eq!(snap, out.final_state);
        assert!(dir.path().join("checkpoint_20.snap").exists());
        assert!(dir.path().join(ENVELOPE_FILE).exists());
        let cfg_back = crate::config::parse_config(&std::fs::read_to_string(dir.path().join(CONFIG_FILE)).unwrap());
        assert_eq!(cfg_back.unwrap(), cfg);
    }

    #[test]
    fn in_memory_run_matches_file_run() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = preset("boundedness").unwrap();
        cfg.grid.nx = 32;
        cfg.horizon = 0.05;
        cfg.record_stride = 7;
        let a = execute(&cfg, None).unwrap();
        let b = execute(&cfg, Some(dir.path())).unwrap();
        assert_eq!(a.records, b.records);
    }
}
