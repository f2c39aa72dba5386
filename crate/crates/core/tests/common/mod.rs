//! Helpers shared by the integration tests.
#![allow(dead_code)]

use chemotaxis_core::{ExponentWitness, ModelParams};

/// Re-evaluates every inequality a witness must satisfy, from the raw
/// parameters, without calling into the crate. Returns the violated
/// conditions.
pub fn witness_violations(p: &ModelParams, w: &ExponentWitness) -> Vec<String> {
    let mut bad = Vec::new();
    let mut need = |ok: bool, what: String| {
        if !ok {
            bad.push(what);
        }
    };
    let (m, q, r, k1, k2) = (p.m, p.q, p.r, p.k1, p.k2);
    let n = f64::from(p.n);
    let pp = w.p;

    let lower_eta = if 2.0 * (m - 1.0) > 0.0 { 2.0 * (m - 1.0) } else { 0.0 };
    let upper_eta = if m - q < m - r { 2.0 * (m - q + 1.0) } else { 2.0 * (m - r + 1.0) };
    need(lower_eta < w.eta && w.eta < upper_eta, format!("eta {} outside ({lower_eta}, {upper_eta})", w.eta));

    for (label, bound) in [
        ("1", 1.0),
        ("m", m),
        ("2(m-q+1)", 2.0 * (m - q + 1.0)),
        ("2(m-r+1)", 2.0 * (m - r + 1.0)),
    ] {
        need(pp > bound, format!("p = {pp} not above {label} = {bound}"));
    }

    let s1 = 2.0 * k1 * (2.0 * m - 2.0 * q - w.eta + 2.0) / (pp - 2.0 * (m - q + 1.0));
    let s2 = 2.0 * k2 * (2.0 * m - 2.0 * r - w.eta + 2.0) / (pp - 2.0 * (m - r + 1.0));
    need(s1 > 0.0 && s2 > 0.0, format!("sigma1 = {s1}, sigma2 = {s2} not positive"));
    need((w.sigma1 - s1).abs() <= 1e-12 * s1.abs(), format!("sigma1 {} != {s1}", w.sigma1));
    need((w.sigma2 - s2).abs() <= 1e-12 * s2.abs(), format!("sigma2 {} != {s2}", w.sigma2));

    need(2.0 * (1.0 - k1) < w.sigma3 && w.sigma3 < 0.0, format!("sigma3 = {} out of range", w.sigma3));
    need(2.0 * (1.0 - k2) < w.sigma4 && w.sigma4 < 0.0, format!("sigma4 = {} out of range", w.sigma4));

    for (label, k, s) in [("sigma1", k1, w.sigma1), ("sigma3", k1, w.sigma3), ("sigma2", k2, w.sigma2), ("sigma4", k2, w.sigma4)] {
        let den = 2.0 * k + s - 2.0;
        need(den > 0.0, format!("2k + {label} - 2 = {den} not positive"));
        let term = 2.0 * ((m - 1.0) * (2.0 * k + s - 1.0) + (m - w.eta - 1.0)) / den;
        need(pp > term, format!("p = {pp} not above the {label} term {term}"));
    }

    let t1 = (pp * n - n) / (pp * n + 2.0 - n);
    let t2 = (pp - m) * pp * n / ((pp - m + 1.0) * (pp * n + 2.0 - n));
    let t3 = (pp * n + 2.0 - n) / ((pp - m) * n);
    need(0.0 < t1 && t1 < 1.0, format!("theta1 = {t1} not in (0, 1)"));
    need(0.0 < t2 && t2 < 1.0, format!("theta2 = {t2} not in (0, 1)"));
    need(t3 > 0.0, format!("theta3 = {t3} not positive"));
    for (name, got, want) in [("theta1", w.theta1, t1), ("theta2", w.theta2, t2), ("theta3", w.theta3, t3)] {
        need((got - want).abs() <= 1e-12 * want.abs(), format!("{name} {got} != {want}"));
    }
    let kappa = if t3 < 1.0 { t3 } else { 1.0 };
    need(w.kappa == kappa, format!("kappa {} != {kappa}", w.kappa));
    need(
        w.eps03 > 0.0 && w.lambda_v > 0.0 && w.lambda_w > 0.0,
        "weights not positive".to_string(),
    );
    bad
}

/// Theorem-regime tuple drawn from `m in [-1, 3]`, `q, r < min(2, m+1)`,
/// `k1, k2 in (1, 4]`, `n in {1, 2}`.
pub fn sample_regime_params<R: rand::Rng>(rng: &mut R) -> ModelParams {
    let m = rng.gen_range(-1.0..=3.0);
    let cap = f64::min(2.0, m + 1.0);
    ModelParams {
        m,
        q: cap - rng.gen_range(1e-3..3.0),
        r: cap - rng.gen_range(1e-3..3.0),
        k1: 4.0 - rng.gen_range(0.0..3.0),
        k2: 4.0 - rng.gen_range(0.0..3.0),
        n: rng.gen_range(1..=2),
        ..ModelParams::default()
    }
}
