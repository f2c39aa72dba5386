//! Coefficient functions of the cell equation.
//!
//! Density kernels `D`, `G`, `H` act on `u >= 0`, signal kernels `chi`, `xi`
//! act on `v, w > 0`. The defaults saturate the admissible upper bounds:
//! `G(s) = b0 (s+1)^(q-1)` rather than anything smaller.

use crate::error::{Error, Result};
use crate::params::ModelParams;

/// `x^e` with cheap paths for the exponents that show up in practice.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Pow {
    Zero,
    One,
    Half,
    NegHalf,
    Int(i32),
    General(f64),
}

impl Pow {
    fn new(e: f64) -> Self {
        if e == 0.0 {
            Pow::Zero
        } else if e == 1.0 {
            Pow::One
        } else if e == 0.5 {
            Pow::Half
        } else if e == -0.5 {
            Pow::NegHalf
        } else if e.fract() == 0.0 && e.abs() <= 16.0 {
            Pow::Int(e as i32)
        } else {
            Pow::General(e)
        }
    }

    #[inline]
    fn eval(self, x: f64) -> f64 {
        match self {
            Pow::Zero => 1.0,
            Pow::One => x,
            Pow::Half => x.sqrt(),
            Pow::NegHalf => 1.0 / x.sqrt(),
            Pow::Int(k) => {
                let mut acc = 1.0;
                let mut base = x;
                let mut e = k.unsigned_abs();
                while e > 0 {
                    if e & 1 == 1 {
                        acc *= base;
                    }
                    base *= base;
                    e >>= 1;
                }
                if k < 0 {
                    1.0 / acc
                } else {
                    acc
                }
            }
            Pow::General(e) => x.powf(e),
        }
    }
}

/// Kernel for `u`-dependent coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DensityKernel {
    /// `amp * (s+1)^(exponent-1)`.
    PowerLaw { amp: f64, exponent: f64 },
    /// `amp * s`, the classical Keller-Segel density dependence.
    Linear { amp: f64 },
    /// Identically zero (switches the corresponding taxis term off).
    Zero,
}

/// Kernel for signal-dependent sensitivities.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SignalKernel {
    /// `amp / s^k`.
    PowerDecay { amp: f64, k: f64 },
    Constant { amp: f64 },
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct DensityEval {
    amp: f64,
    kind: u8,
    pow: Pow,
}

impl DensityEval {
    fn new(k: DensityKernel) -> Self {
        match k {
            DensityKernel::PowerLaw { amp, exponent } => Self {
                amp,
                kind: 0,
                pow: Pow::new(exponent - 1.0),
            },
            DensityKernel::Linear { amp } => Self { amp, kind: 1, pow: Pow::One },
            DensityKernel::Zero => Self { amp: 0.0, kind: 2, pow: Pow::Zero },
        }
    }

    #[inline]
    pub(crate) fn eval(&self, s: f64) -> f64 {
        match self.kind {
            0 => self.amp * self.pow.eval(s + 1.0),
            1 => self.amp * s,
            _ => 0.0,
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.kind == 2
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct SignalEval {
    amp: f64,
    pow: Pow,
}

impl SignalEval {
    fn new(k: SignalKernel) -> Self {
        match k {
            SignalKernel::PowerDecay { amp, k } => Self { amp, pow: Pow::new(-k) },
            SignalKernel::Constant { amp } => Self { amp, pow: Pow::Zero },
        }
    }

    /// Caller guarantees `s > 0`.
    #[inline]
    pub(crate) fn eval_unchecked(&self, s: f64) -> f64 {
        self.amp * self.pow.eval(s)
    }
}

impl DensityKernel {
    pub fn eval(&self, s: f64) -> f64 {
        DensityEval::new(*self).eval(s)
    }

    pub fn name(&self) -> &'static str {
        match self {
            DensityKernel::PowerLaw { .. } => "power",
            DensityKernel::Linear { .. } => "linear",
            DensityKernel::Zero => "zero",
        }
    }
}

impl SignalKernel {
    pub fn eval(&self, s: f64) -> Result<f64> {
        if !(s > 0.0) {
            return Err(Error::KernelDomain(s));
        }
        Ok(SignalEval::new(*self).eval_unchecked(s))
    }

    pub fn name(&self) -> &'static str {
        match self {
            SignalKernel::PowerDecay { .. } => "power",
            SignalKernel::Constant { .. } => "constant",
        }
    }
}

/// Kernel choice, the way a run configuration names it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityChoice {
    Power,
    Linear,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignalChoice {
    Power,
    Constant,
}

impl DensityChoice {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "power" => Some(Self::Power),
            "linear" => Some(Self::Linear),
            "zero" => Some(Self::Zero),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Power => "power",
            Self::Linear => "linear",
            Self::Zero => "zero",
        }
    }

    fn build(self, amp: f64, exponent: f64) -> DensityKernel {
        match self {
            Self::Power => DensityKernel::PowerLaw { amp, exponent },
            Self::Linear => DensityKernel::Linear { amp },
            Self::Zero => DensityKernel::Zero,
        }
    }
}

impl SignalChoice {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "power" => Some(Self::Power),
            "constant" => Some(Self::Constant),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Power => "power",
            Self::Constant => "constant",
        }
    }

    fn build(self, amp: f64, k: f64) -> SignalKernel {
        match self {
            Self::Power => SignalKernel::PowerDecay { amp, k },
            Self::Constant => SignalKernel::Constant { amp },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KernelSelection {
    pub g: DensityChoice,
    pub h: DensityChoice,
    pub chi: SignalChoice,
    pub xi: SignalChoice,
}

impl Default for KernelSelection {
    fn default() -> Self {
        Self {
            g: DensityChoice::Power,
            h: DensityChoice::Power,
            chi: SignalChoice::Power,
            xi: SignalChoice::Power,
        }
    }
}

/// The five coefficient functions.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSet {
    pub diffusion: DensityKernel,
    pub g: DensityKernel,
    pub h: DensityKernel,
    pub chi: SignalKernel,
    pub xi: SignalKernel,
}

impl KernelSet {
    /// Power-law kernels saturating the admissible bounds.
    pub fn from_params(p: &ModelParams) -> Self {
        Self::with_selection(p, KernelSelection::default())
    }

    pub fn with_selection(p: &ModelParams, sel: KernelSelection) -> Self {
        Self {
            diffusion: DensityKernel::PowerLaw { amp: p.a0, exponent: p.m },
            g: sel.g.build(p.b0, p.q),
            h: sel.h.build(p.c0, p.r),
            chi: sel.chi.build(p.chi0, p.k1),
            xi: sel.xi.build(p.xi0, p.k2),
        }
    }

    pub fn eval_d(&self, s: f64) -> f64 {
        self.diffusion.eval(s)
    }

    pub fn eval_g(&self, s: f64) -> f64 {
        self.g.eval(s)
    }

    pub fn eval_h(&self, s: f64) -> f64 {
        self.h.eval(s)
    }

    pub fn eval_chi(&self, s: f64) -> Result<f64> {
        self.chi.eval(s)
    }

    pub fn eval_xi(&self, s: f64) -> Result<f64> {
        self.xi.eval(s)
    }

    pub(crate) fn compiled(&self) -> CompiledKernels {
        CompiledKernels {
            d: DensityEval::new(self.diffusion),
            g: DensityEval::new(self.g),
            h: DensityEval::new(self.h),
            chi: SignalEval::new(self.chi),
            xi: SignalEval::new(self.xi),
        }
    }
}

/// Dispatch-resolved kernels for the inner loops.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CompiledKernels {
    pub d: DensityEval,
    pub g: DensityEval,
    pub h: DensityEval,
    pub chi: SignalEval,
    pub xi: SignalEval,
}

/// Kernel evaluated at the mean of two adjacent cell values.
pub fn face_coefficient<F>(left: f64, right: f64, kernel: F) -> f64
where
    F: Fn(f64) -> f64,
{
    kernel(0.5 * (left + right))
}
