//! ψ-fractional integral and ψ-Caputo derivative.
//!
//! Closed forms act on powers of `ψ(t) − ψ(a)`. The numeric routines work in
//! the variable `s = ψ(τ)`, where the kernel becomes `(ψ(t) − s)^(α−1)`.

use crate::error::{Error, Result};
use crate::math;
use crate::psi::{PsiKind, PsiSpec};
use crate::special::{gamma_eval, ln_gamma};
use core::f64::consts::FRAC_PI_2;

/// Order α of a fractional operator.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    /// Order zero: the fractional integral of order 0 is the identity.
    pub const ZERO: FracOrder = FracOrder(0.0);
    pub const ONE: FracOrder = FracOrder(1.0);

    /// Any finite α > 0.
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain("fractional order must be a finite alpha > 0"))
        }
    }

    /// α in (0, 1], the range the series solvers accept.
    pub fn solver(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain("solver order must satisfy 0 < alpha <= 1"))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// n = ⌊α⌋ + 1 for non-integer α, n = α for integer α.
    pub fn n(self) -> u32 {
        let fl = math::floor(self.0);
        if fl == self.0 {
            fl as u32
        } else {
            fl as u32 + 1
        }
    }

    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for FracOrder {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        if v == 0.0 {
            Ok(Self::ZERO)
        } else {
            Self::new(v)
        }
    }
}

impl From<FracOrder> for f64 {
    fn from(o: FracOrder) -> f64 {
        o.0
    }
}

/// Γ(x)/Γ(y), switching to log-gamma when either would overflow.
pub(crate) fn gamma_ratio(x: f64, y: f64) -> Result<f64> {
    if x < 160.0 && y < 160.0 {
        Ok(gamma_eval(x)? / gamma_eval(y)?)
    } else {
        Ok(math::exp(ln_gamma(x)? - ln_gamma(y)?))
    }
}

/// I^{α,ψ} applied to `(ψ(t) − ψ(a))^(δ−1)`:
/// `Γ(δ)/Γ(α+δ) · (ψ(t) − ψ(a))^(α+δ−1)`.
pub fn frac_integral_power(alpha: FracOrder, delta: f64, psi: &PsiSpec, a: f64, t: f64) -> Result<f64> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Domain("power exponent delta must be positive"));
    }
    let s = psi.elapsed(a, t)?;
    let al = alpha.value();
    Ok(gamma_ratio(delta, al + delta)? * math::powf(s, al + delta - 1.0))
}

impl PsiSpec {
    /// ψ⁻¹(ψ(a) + d), computed without forming ψ(a) where the closed form allows.
    pub(crate) fn advance(&self, a: f64, d: f64) -> f64 {
        match self.kind() {
            PsiKind::Identity => a + d,
            PsiKind::Logarithm => a * math::exp(d),
            PsiKind::Custom(_) => self.inverse(self.value_unchecked(a) + d),
        }
    }
}

fn checked(f: &impl Fn(f64) -> f64, tau: f64) -> Result<f64> {
    let v = f(tau);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(tau))
    }
}

fn check_interval(psi: &PsiSpec, a: f64, t: f64) -> Result<f64> {
    if !(t > a) {
        return Err(Error::Domain("need t > a"));
    }
    let len = psi.elapsed(a, t)?;
    if !(len > 0.0 && len.is_finite()) {
        return Err(Error::Domain("psi(t) - psi(a) must be positive and finite"));
    }
    Ok(len)
}

/// Second difference `(k+1)^p − 2k^p + (k−1)^p` for k ≥ 1, free of the
/// cancellation the naive form suffers for large k.
fn second_difference(k: f64, p: f64) -> f64 {
    math::powf(k, p) * (math::pow1pm1(1.0 / k, p) + math::pow1pm1(-1.0 / k, p))
}

/// `(k+1)^q − k^q` for k ≥ 0.
fn first_difference(k: f64, q: f64) -> f64 {
    if k == 0.0 {
        1.0
    } else {
        math::powf(k, q) * math::pow1pm1(1.0 / k, q)
    }
}

// Half-width of the tanh-sinh abscissa range; the left-end weights beyond it are
// far below double precision.
const TANH_SINH_SPAN: f64 = 4.0;

/// Numerical ψ-fractional integral
/// `(1/Γ(α)) ∫ₐᵗ ψ'(τ)(ψ(t) − ψ(τ))^(α−1) f(τ) dτ`.
///
/// After `s = ψ(τ)` the interval `[ψ(a), ψ(t)]` is split at its midpoint.
/// The right half, which carries the kernel singularity, uses product
/// integration: the kernel moments against a piecewise-linear interpolant of
/// `f∘ψ⁻¹` on a uniform grid are exact. The left half has a smooth kernel but
/// `f` may blow up at `a` (e.g. `(ψ−ψ(a))^(δ−1)` with δ < 1), so it is done by
/// tanh-sinh quadrature, which never samples the endpoint.
///
/// `nodes` is split evenly between the two halves. Order zero returns `f(t)`.
pub fn frac_integral_numeric(
    alpha: FracOrder,
    f: impl Fn(f64) -> f64,
    psi: &PsiSpec,
    a: f64,
    t: f64,
    nodes: usize,
) -> Result<f64> {
    let len = check_interval(psi, a, t)?;
    if nodes < 2 {
        return Err(Error::Domain("need at least 2 quadrature nodes"));
    }
    let al = alpha.value();
    if al == 0.0 {
        return checked(&f, t);
    }
    let inv_gamma = 1.0 / gamma_eval(al)?;
    let half_len = 0.5 * len;

    // right half: product trapezoid on [mid, ψ(t)]
    let n = (nodes / 2).max(1);
    let h = half_len / n as f64;
    let p = al + 1.0;
    let nf = n as f64;
    let mut right = 0.0;
    for j in 0..=n {
        let w = if j == 0 {
            math::powf(nf, al) * ((nf - 1.0) * math::pow1pm1(-1.0 / nf, al) + al)
        } else if j == n {
            1.0
        } else {
            second_difference((n - j) as f64, p)
        };
        let tau = if j == n {
            t
        } else {
            psi.advance(a, half_len + j as f64 * h)
        };
        right += w * checked(&f, tau)?;
    }
    right *= math::powf(h, al) / (al * (al + 1.0));

    // left half: tanh-sinh on [ψ(a), mid]
    let m = nodes - n;
    let quarter = 0.5 * half_len;
    let mut left = 0.0;
    if m == 1 {
        let tau = psi.advance(a, quarter);
        left = half_len * math::powf(len - quarter, al - 1.0) * checked(&f, tau)?;
    } else {
        let step = 2.0 * TANH_SINH_SPAN / (m - 1) as f64;
        for k in 0..m {
            let u = -TANH_SINH_SPAN + k as f64 * step;
            let v = FRAC_PI_2 * math::sinh(u);
            let ch = math::cosh(v);
            let weight = step * FRAC_PI_2 * math::cosh(u) / (ch * ch);
            // 1 + tanh(v), accurate as v → −∞
            let one_plus_x = 2.0 / (1.0 + math::exp(-2.0 * v));
            let offset = quarter * one_plus_x;
            if weight == 0.0 || offset == 0.0 {
                continue;
            }
            let tau = psi.advance(a, offset);
            if tau <= a {
                continue;
            }
            left += weight * math::powf(len - offset, al - 1.0) * checked(&f, tau)?;
        }
        left *= quarter;
    }
    Ok((right + left) * inv_gamma)
}

/// Default difference step `1e-4 · max(1, t − a)`.
pub fn default_grid_step(a: f64, t: f64) -> f64 {
    1e-4 * (t - a).max(1.0)
}

/// L1 product-integration estimate of the ψ-Caputo derivative of order
/// 0 < α ≤ 1 on `panels` uniform panels in `s = ψ(τ)`.
///
/// On each panel the derivative `f^{[1],ψ} = df/ds` is replaced by the
/// difference quotient of the nodal values, and the kernel `(ψ(t) − s)^(−α)`
/// is integrated exactly against it. Only values of `f` on `[a, t]` are used,
/// so integrands whose derivative is singular at `a` are fine.
pub fn caputo_derivative_l1(
    alpha: FracOrder,
    f: impl Fn(f64) -> f64,
    psi: &PsiSpec,
    a: f64,
    t: f64,
    panels: usize,
) -> Result<f64> {
    let al = alpha.value();
    if !(al > 0.0 && al <= 1.0) {
        return Err(Error::Domain("Caputo derivative needs 0 < alpha <= 1"));
    }
    let len = check_interval(psi, a, t)?;
    if panels < 2 {
        return Err(Error::Domain("need at least 2 panels"));
    }
    let h = len / panels as f64;
    let q = 1.0 - al;
    let mut prev = checked(&f, a)?;
    let mut acc = 0.0;
    for j in 1..=panels {
        let tau = if j == panels { t } else { psi.advance(a, j as f64 * h) };
        let cur = checked(&f, tau)?;
        let diff = cur - prev;
        if diff != 0.0 {
            acc += diff * first_difference((panels - j) as f64, q);
        }
        prev = cur;
    }
    Ok(acc * math::powf(h, -al) / gamma_eval(2.0 - al)?)
}

/// ψ-Caputo derivative `I^{1−α,ψ} f^{[1],ψ}` for 0 < α ≤ 1.
///
/// For α = 1 this is the classical `f'(t)/ψ'(t)` by a central difference of
/// step `grid_step`. For 0 < α < 1 the L1 scheme of [`caputo_derivative_l1`]
/// runs with `⌈(t − a)/grid_step⌉` panels.
pub fn caputo_derivative_numeric(
    alpha: FracOrder,
    f: impl Fn(f64) -> f64,
    psi: &PsiSpec,
    a: f64,
    t: f64,
    grid_step: f64,
) -> Result<f64> {
    let al = alpha.value();
    if !(al > 0.0 && al <= 1.0) {
        return Err(Error::Domain("Caputo derivative needs 0 < alpha <= 1"));
    }
    if !(t > a) {
        return Err(Error::Domain("need t > a"));
    }
    let half = 0.5 * (t - a);
    if !(grid_step > 0.0) || grid_step >= half {
        return Err(Error::Step { step: grid_step, half });
    }
    if alpha.is_classical() {
        let dpsi = psi.derivative(t)?;
        let up = checked(&f, t + grid_step)?;
        let down = checked(&f, t - grid_step)?;
        return Ok((up - down) / (2.0 * grid_step) / dpsi);
    }
    let panels = math::ceil((t - a) / grid_step) as usize;
    caputo_derivative_l1(alpha, f, psi, a, t, panels)
}
