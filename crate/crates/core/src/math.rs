//! Thin wrappers so the rest of the crate reads like `std` float code.

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}
#[inline]
pub(crate) fn expm1(x: f64) -> f64 {
    libm::expm1(x)
}
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}
#[inline]
pub(crate) fn ln1p(x: f64) -> f64 {
    libm::log1p(x)
}
#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}
#[inline]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}
#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}
#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}
#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}
#[inline]
pub(crate) fn sinh(x: f64) -> f64 {
    libm::sinh(x)
}
#[inline]
pub(crate) fn cosh(x: f64) -> f64 {
    libm::cosh(x)
}
#[inline]
pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}
#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

/// `(1 + x)^p - 1` without cancellation for small `x`.
#[inline]
pub(crate) fn pow1pm1(x: f64, p: f64) -> f64 {
    expm1(p * ln1p(x))
}
