//! Model constants and hypothesis checks.
//!
//! The boundedness result covers power-law diffusion `D(s) = a0 (s+1)^(m-1)`,
//! density sensitivities bounded by `b0 (s+1)^(q-1)` and `c0 (s+1)^(r-1)`, and
//! signal sensitivities decaying like `chi0 / s^k1`, `xi0 / s^k2`. The checks
//! here decide whether a parameter set falls inside that regime. Parameter
//! sets outside it are still simulable (see the contrast preset).

use std::fmt;

/// All physical and structural constants of the model.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub d1: f64,
    pub d2: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
    pub m: f64,
    pub q: f64,
    pub r: f64,
    pub chi0: f64,
    pub xi0: f64,
    pub k1: f64,
    pub k2: f64,
    /// Spatial dimension.
    pub n: u32,
}

impl Default for ModelParams {
    /// Linear diffusion, unit rates, `k1 = k2 = 2`, one dimension.
    fn default() -> Self {
        Self {
            d1: 1.0,
            d2: 1.0,
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            delta: 1.0,
            a0: 1.0,
            b0: 1.0,
            c0: 1.0,
            m: 1.0,
            q: 1.0,
            r: 1.0,
            chi0: 1.0,
            xi0: 1.0,
            k1: 2.0,
            k2: 2.0,
            n: 1,
        }
    }
}

impl ModelParams {
    /// Named fields that must be finite and strictly positive.
    pub fn positive_fields(&self) -> [(&'static str, f64); 11] {
        [
            ("d1", self.d1),
            ("d2", self.d2),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("delta", self.delta),
            ("a0", self.a0),
            ("b0", self.b0),
            ("c0", self.c0),
            ("chi0", self.chi0),
            ("xi0", self.xi0),
        ]
    }

    pub fn in_theorem_regime(&self) -> bool {
        validate_params(self).in_regime
    }
}

/// Outcome of a single hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Offending (or witnessing) values.
    pub detail: String,
    /// Hard failures make the parameter set meaningless, not merely out of regime.
    pub hard: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub in_regime: bool,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn has_hard_failure(&self) -> bool {
        self.checks.iter().any(|c| c.hard && !c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidationReport {
    /// `key = value` lines in a fixed order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "check[{}] = {} ({})",
                c.name,
                if c.passed { "pass" } else { "fail" },
                c.detail
            )?;
        }
        writeln!(f, "theorem_regime = {}", self.in_regime)
    }
}

/// Evaluates every hypothesis of the boundedness theorem. Never fails; the
/// solver may legitimately run outside the regime.
pub fn validate_params(p: &ModelParams) -> ValidationReport {
    let mut checks = Vec::with_capacity(18);
    for (name, value) in p.positive_fields() {
        checks.push(Check {
            name: format!("{name} > 0"),
            passed: value.is_finite() && value > 0.0,
            detail: format!("{name} = {value}"),
            hard: true,
        });
    }
    for (name, value) in [("m", p.m), ("q", p.q), ("r", p.r), ("k1", p.k1), ("k2", p.k2)] {
        if !value.is_finite() {
            checks.push(Check {
                name: format!("{name} finite"),
                passed: false,
                detail: format!("{name} = {value}"),
                hard: true,
            });
        }
    }
    checks.push(Check {
        name: "n >= 1".into(),
        passed: p.n >= 1,
        detail: format!("n = {}", p.n),
        hard: true,
    });

    let cap = 2f64.min(p.m + 1.0);
    checks.push(Check {
        name: "q < min(2, m+1)".into(),
        passed: p.q < cap,
        detail: format!("q = {}, min(2, m+1) = {}", p.q, cap),
        hard: false,
    });
    checks.push(Check {
        name: "r < min(2, m+1)".into(),
        passed: p.r < cap,
        detail: format!("r = {}, min(2, m+1) = {}", p.r, cap),
        hard: false,
    });
    checks.push(Check {
        name: "k1 > 1".into(),
        passed: p.k1 > 1.0,
        detail: format!("k1 = {}", p.k1),
        hard: false,
    });
    checks.push(Check {
        name: "k2 > 1".into(),
        passed: p.k2 > 1.0,
        detail: format!("k2 = {}", p.k2),
        hard: false,
    });

    let in_regime = checks.iter().all(|c| c.passed);
    ValidationReport { checks, in_regime }
}
