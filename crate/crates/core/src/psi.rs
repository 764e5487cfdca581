//! The monotone rescaling function ψ.

use crate::error::{Error, Result};
use crate::math;

/// A user-supplied ψ. All three maps must be given explicitly.
#[derive(Clone, Copy, Debug)]
pub struct CustomPsi {
    pub value: fn(f64) -> f64,
    pub derivative: fn(f64) -> f64,
    pub inverse: fn(f64) -> f64,
}

#[derive(Clone, Copy, Debug)]
pub enum PsiKind {
    /// ψ(t) = t (classical Caputo).
    Identity,
    /// ψ(t) = ln t (Caputo-Hadamard).
    Logarithm,
    Custom(CustomPsi),
}

/// ψ together with the closed interval it is defined on.
#[derive(Clone, Copy, Debug)]
pub struct PsiSpec {
    kind: PsiKind,
    lo: f64,
    hi: f64,
}

const CUSTOM_SAMPLES: usize = 64;

impl PsiSpec {
    pub fn identity() -> Self {
        Self {
            kind: PsiKind::Identity,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn logarithm() -> Self {
        Self {
            kind: PsiKind::Logarithm,
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }

    /// Builds a custom ψ on `[lo, hi]` after checking monotonicity, positivity
    /// of the derivative and inverse consistency on a uniform sample.
    pub fn custom(psi: CustomPsi, lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidPsi("domain must be a finite interval [a, b] with a < b"));
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=CUSTOM_SAMPLES {
            let t = lo + (hi - lo) * i as f64 / CUSTOM_SAMPLES as f64;
            let v = (psi.value)(t);
            let d = (psi.derivative)(t);
            if !v.is_finite() || !d.is_finite() {
                return Err(Error::InvalidPsi("non-finite value or derivative"));
            }
            if v <= prev {
                return Err(Error::InvalidPsi("not strictly increasing"));
            }
            if d <= 0.0 {
                return Err(Error::InvalidPsi("derivative not positive"));
            }
            let back = (psi.inverse)(v);
            if (back - t).abs() > 1e-10 * t.abs().max(1.0) {
                return Err(Error::InvalidPsi("inverse is inconsistent with value map"));
            }
            prev = v;
        }
        Ok(Self {
            kind: PsiKind::Custom(psi),
            lo,
            hi,
        })
    }

    /// Restricts a built-in ψ to `[lo, hi]`.
    pub fn with_domain(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || lo < self.lo || hi > self.hi {
            return Err(Error::Domain("domain must be a sub-interval of the natural domain"));
        }
        if matches!(self.kind, PsiKind::Logarithm) && lo <= 0.0 {
            return Err(Error::Domain("logarithmic psi requires a > 0"));
        }
        self.lo = lo;
        self.hi = hi;
        Ok(self)
    }

    pub fn kind(&self) -> &PsiKind {
        &self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn is_logarithm(&self) -> bool {
        matches!(self.kind, PsiKind::Logarithm)
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            PsiKind::Identity => "identity",
            PsiKind::Logarithm => "log",
            PsiKind::Custom(_) => "custom",
        }
    }

    fn check(&self, t: f64) -> Result<()> {
        if t.is_nan() {
            return Err(Error::Domain("t is NaN"));
        }
        if matches!(self.kind, PsiKind::Logarithm) && t <= 0.0 {
            return Err(Error::Domain("logarithmic psi requires t > 0"));
        }
        if t < self.lo || t > self.hi {
            return Err(Error::Domain("t outside the psi domain"));
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.value_unchecked(t))
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(match self.kind {
            PsiKind::Identity => 1.0,
            PsiKind::Logarithm => 1.0 / t,
            PsiKind::Custom(c) => (c.derivative)(t),
        })
    }

    /// ψ⁻¹(s). No domain check; callers pass values produced by [`Self::value`].
    pub fn inverse(&self, s: f64) -> f64 {
        match self.kind {
            PsiKind::Identity => s,
            PsiKind::Logarithm => math::exp(s),
            PsiKind::Custom(c) => (c.inverse)(s),
        }
    }

    /// ψ(t) − ψ(a), the only combination the power-basis formulas depend on.
    pub fn elapsed(&self, a: f64, t: f64) -> Result<f64> {
        if t < a {
            return Err(Error::Domain("t must not precede a"));
        }
        match self.kind {
            PsiKind::Identity => {
                self.check(a)?;
                self.check(t)?;
                Ok(t - a)
            }
            PsiKind::Logarithm => {
                self.check(a)?;
                self.check(t)?;
                Ok(math::ln(t / a))
            }
            PsiKind::Custom(_) => Ok(self.value(t)? - self.value(a)?),
        }
    }

    pub(crate) fn value_unchecked(&self, t: f64) -> f64 {
        match self.kind {
            PsiKind::Identity => t,
            PsiKind::Logarithm => math::ln(t),
            PsiKind::Custom(c) => (c.value)(t),
        }
    }
}

/// Returns `(ψ(t), ψ'(t))`.
pub fn psi_eval(psi: &PsiSpec, t: f64) -> Result<(f64, f64)> {
    Ok((psi.value(t)?, psi.derivative(t)?))
}
