//! Parameter sweeps over the cartesian product of value lists.
//!
//! A sweep file is an ordinary config plus
//!
//! ```text
//! sweep.axis.params.m = 1.0, 1.5, 2.0
//! sweep.axis.params.chi0 = 1, 5
//! sweep.parallelism = 4
//! sweep.cap = 10000
//! ```
//!
//! Points are numbered in row-major order (the last axis varies fastest) and
//! run in `point_NNNNN` subdirectories. The summary is written in point order
//! regardless of which worker finished first.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Mutex;

use rayon::prelude::*;

use crate::config::{parse_lines, split_line, RunConfig};
use crate::error::{Error, Result};
use crate::run::{execute, RunStatus};

pub const DEFAULT_CAP: usize = 10_000;
pub const SUMMARY_FILE: &str = "summary.csv";

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub base: RunConfig,
    /// `(config key, values)` in declaration order.
    pub axes: Vec<(String, Vec<String>)>,
    pub parallelism: usize,
    pub cap: usize,
}

impl SweepSpec {
    pub fn size(&self) -> usize {
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    /// Axis values for point `index`.
    pub fn point(&self, mut index: usize) -> Vec<(&str, &str)> {
        let mut out = vec![("", ""); self.axes.len()];
        for (slot, (key, values)) in out.iter_mut().zip(&self.axes).rev() {
            *slot = (key.as_str(), values[index % values.len()].as_str());
            index /= values.len();
        }
        out
    }

    pub fn point_config(&self, index: usize) -> std::result::Result<RunConfig, String> {
        let mut cfg = self.base.clone();
        for (k, v) in self.point(index) {
            cfg.set(k, v)?;
        }
        cfg.check().map_err(|(k, m)| format!("{k}: {m}"))?;
        Ok(cfg)
    }
}

pub fn parse_sweep(text: &str) -> Result<SweepSpec> {
    let mut entries = Vec::new();
    let mut raw_axes: Vec<(usize, String, Vec<String>)> = Vec::new();
    let mut parallelism = 1;
    let mut cap = DEFAULT_CAP;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let Some((k, v)) = split_line(raw, line)? else {
            continue;
        };
        let int = |v: &str| {
            v.parse::<usize>()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::Config { line, msg: format!("{k}: expected a positive integer, found '{v}'") })
        };
        if let Some(key) = k.strip_prefix("sweep.axis.") {
            let values: Vec<String> = v.split(',').map(|s| s.trim().to_string()).collect();
            if values.iter().any(String::is_empty) {
                return Err(Error::Config { line, msg: format!("{k}: empty value in list") });
            }
            if raw_axes.iter().any(|(_, a, _)| a == key) {
                return Err(Error::Config { line, msg: format!("duplicate axis '{key}'") });
            }
            raw_axes.push((line, key.to_string(), values));
        } else if k == "sweep.parallelism" {
            parallelism = int(v)?;
        } else if k == "sweep.cap" {
            cap = int(v)?;
        } else {
            entries.push((line, k, v));
        }
    }
    let base = parse_lines(entries.into_iter())?;
    let mut axes = Vec::new();
    for (line, key, values) in raw_axes {
        let mut probe = base.clone();
        for v in &values {
            match probe.set(&key, v) {
                Ok(true) => {}
                Ok(false) => return Err(Error::Config { line, msg: format!("unknown sweep key '{key}'") }),
                Err(msg) => return Err(Error::Config { line, msg: format!("{key}: {msg}") }),
            }
        }
        axes.push((key, values));
    }
    let spec = SweepSpec { base, axes, parallelism, cap };
    let size = spec.axes.iter().try_fold(1usize, |acc, (_, v)| acc.checked_mul(v.len()));
    match size {
        Some(n) if n <= cap => Ok(spec),
        _ => Err(Error::Validation(format!("sweep has more than {cap} points"))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointSummary {
    pub index: usize,
    pub values: Vec<String>,
    pub status: RunStatus,
    pub t_final: f64,
    pub final_linf_u: f64,
    pub sup_y: f64,
    /// Error message for failed points.
    pub error: Option<String>,
}

pub fn point_dir_name(index: usize) -> String {
    format!("point_{index:05}")
}

fn run_point(spec: &SweepSpec, index: usize, root: &Path) -> PointSummary {
    let values = spec.point(index).iter().map(|(_, v)| v.to_string()).collect();
    let failed = |msg: String| PointSummary {
        index,
        values: Vec::new(),
        status: RunStatus::Error,
        t_final: f64::NAN,
        final_linf_u: f64::NAN,
        sup_y: f64::NAN,
        error: Some(msg),
    };
    let mut cfg = match spec.point_config(index) {
        Ok(c) => c,
        Err(msg) => return PointSummary { values, ..failed(msg) },
    };
    let dir = root.join(point_dir_name(index));
    cfg.output_dir = dir.clone();
    match execute(&cfg, Some(&dir)) {
        Ok(out) => PointSummary {
            index,
            values,
            status: out.status,
            t_final: out.t_final,
            final_linf_u: out.records.last().map_or(f64::NAN, |r| r.linf_u),
            sup_y: out.sup_y(),
            error: None,
        },
        Err(e) => PointSummary { values, ..failed(e.to_string()) },
    }
}

pub fn summary_csv(spec: &SweepSpec, points: &[PointSummary]) -> String {
    let mut s = String::from("point");
    for (k, _) in &spec.axes {
        let _ = write!(s, ",{k}");
    }
    s.push_str(",status,t_final,final_linf_u,sup_y\n");
    for p in points {
        let _ = write!(s, "{}", p.index);
        for v in &p.values {
            let _ = write!(s, ",{v}");
        }
        let _ = writeln!(s, ",{},{},{},{}", p.status.name(), p.t_final, p.final_linf_u, p.sup_y);
    }
    s
}

/// Runs every point under `root` and writes `summary.csv`.
pub fn run_sweep(spec: &SweepSpec, root: &Path) -> Result<Vec<PointSummary>> {
    std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.parallelism)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let collected = Mutex::new(Vec::with_capacity(spec.size()));
    pool.install(|| {
        (0..spec.size()).into_par_iter().for_each(|i| {
            let s = run_point(spec, i, root);
            collected.lock().unwrap().push(s);
        })
    });
    let mut points = collected.into_inner().unwrap();
    points.sort_by_key(|p| p.index);
    let path = root.join(SUMMARY_FILE);
    std::fs::write(&path, summary_csv(spec, &points)).map_err(|e| Error::io(&path, e))?;
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "grid.nx = 16\ntime.horizon = 0.002\noutput.record_stride = 5\n";

    #[test]
    fn point_order_is_row_major() {
        let spec = parse_sweep(&format!("{SMALL}sweep.axis.params.m = 1, 2\nsweep.axis.params.chi0 = 1, 2, 3\n")).unwrap();
        assert_eq!(spec.size(), 6);
        assert_eq!(spec.point(0), vec![("params.m", "1"), ("params.chi0", "1")]);
        assert_eq!(spec.point(4), vec![("params.m", "2"), ("params.chi0", "2")]);
        assert_eq!(spec.point_config(5).unwrap().params.chi0, 3.0);
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(parse_sweep("sweep.axis.params.zeta = 1").is_err());
        assert!(parse_sweep("sweep.axis.params.m = 1, x").is_err());
        assert!(parse_sweep("sweep.parallelism = 0").is_err());
        let big = "sweep.cap = 5\nsweep.axis.params.m = 1, 2, 3\nsweep.axis.params.chi0 = 1, 2\n";
        assert!(parse_sweep(big).unwrap_err().to_string().contains("more than 5"));
        match parse_sweep("\nsweep.axis.grid.nx = 8, eight").unwrap_err() {
            Error::Config { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn parallelism_does_not_change_outputs() {
        let text = format!("{SMALL}sweep.axis.params.m = 1, 1.5\nsweep.axis.params.chi0 = 0.5, 2\n");
        let a_dir = tempfile::tempdir().unwrap();
        let b_dir = tempfile::tempdir().unwrap();
        let mut spec = parse_sweep(&text).unwrap();
        let a = run_sweep(&spec, a_dir.path()).unwrap();
        spec.parallelism = 4;
        let b = run_sweep(&spec, b_dir.path()).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.status == RunStatus::Ok));
        for i in 0..4 {
            let name = format!("{}/diagnostics.csv", point_dir_name(i));
            let x = std::fs::read(a_dir.path().join(&name)).unwrap();
            let y = std::fs::read(b_dir.path().join(&name)).unwrap();
            assert_eq!(x, y, "{name}");
        }
        assert_eq!(
            std::fs::read(a_dir.path().join(SUMMARY_FILE)).unwrap(),
            std::fs::read(b_dir.path().join(SUMMARY_FILE)).unwrap()
        );
    }

    #[test]
    fn invalid_point_is_reported_not_fatal() {
        let text = format!("{SMALL}sweep.axis.params.k1 = 2, 0.5\n");
        let dir = tempfile::tempdir().unwrap();
        let pts = run_sweep(&parse_sweep(&text).unwrap(), dir.path()).unwrap();
        assert_eq!(pts[0].status, RunStatus::Ok);
        assert_eq!(pts[1].status, RunStatus::Error);
        assert!(pts[1].error.as_deref().unwrap().contains("k1 > 1"));
    }
}
