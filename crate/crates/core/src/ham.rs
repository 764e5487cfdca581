//! The m-th order deformation recursion and geometric resummation.
//!
//! With the linear operator chosen as the ψ-Caputo derivative and `H = 1`,
//! integrating the m-th order deformation equation gives
//!
//! ```text
//! u_m = (χ_m + ħ) u_{m−1} − (χ_m + ħ) u_{m−1}|_{t=a} + ħ I^{α,ψ}[R_m]
//! ```
//!
//! where `R_m` is the nonlinear residual with the time derivative removed.
//! Forcing constants enter `R_m` through the factor `1 − χ_m`, so only the
//! first order sees them.

use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{cylindrical_operator, planar_laplacian, HamSeries, SpatialExpr, TermSum, TimeExponent};
use crate::error::{Error, Result};
use crate::math;
use crate::problem::{Application, ProblemSpec};

/// χ_m: 0 for m ≤ 1, 1 otherwise.
pub fn chi(m: usize) -> u32 {
    if m <= 1 {
        0
    } else {
        1
    }
}

/// Auxiliary parameters. The tube problems only read `u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hbar {
    pub u: f64,
    pub v: f64,
}

impl Hbar {
    pub fn uniform(h: f64) -> Self {
        Self { u: h, v: h }
    }

    pub fn pair(hu: f64, hv: f64) -> Self {
        Self { u: hu, v: hv }
    }

    fn validate(&self) -> Result<()> {
        for h in [self.u, self.v] {
            if !h.is_finite() || h == 0.0 {
                return Err(Error::Parameter("hbar must be finite and nonzero"));
            }
        }
        Ok(())
    }

    fn check_region(&self, pair: bool) -> Result<()> {
        let hs: &[f64] = if pair { &[self.u, self.v] } else { &[self.u] };
        for &h in hs {
            let q = (1.0 + h).abs();
            if !(q < 1.0) {
                return Err(Error::ConvergenceRegion(q));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamConfig {
    pub hbar: Hbar,
    /// Highest order M.
    pub orders: usize,
    /// Collapse the (1 + ħ) families into the ħ-free closed series.
    pub resum: bool,
    /// Number of time powers kept by the resummed series.
    pub terms: usize,
}

impl HamConfig {
    pub const DEFAULT_TERMS: usize = 4;

    pub fn new(hbar: f64, orders: usize) -> Self {
        Self {
            hbar: Hbar::uniform(hbar),
            orders,
            resum: false,
            terms: Self::DEFAULT_TERMS,
        }
    }

    pub fn validate(&self, pair: bool) -> Result<()> {
        self.hbar.validate()?;
        if self.resum {
            self.hbar.check_region(pair)?;
            if self.terms == 0 {
                return Err(Error::Order("resummation needs at least one term"));
            }
        }
        Ok(())
    }
}

/// Output of one recursion step.
#[derive(Clone, Debug, PartialEq)]
pub struct NextOrder {
    pub u: TermSum,
    pub v: Option<TermSum>,
}

fn constant_sum(g: crate::algebra::Geometry, c: f64) -> TermSum {
    if c == 0.0 {
        return TermSum::zero(g);
    }
    TermSum::from_spatial(SpatialExpr::constant(g, c), TimeExponent::ZERO)
}

/// `(χ + ħ)(w − w|_{t=a})`.
fn carried(prev: &TermSum, chi: f64, h: f64) -> Result<TermSum> {
    let mut out = prev.scaled(chi + h);
    out.add_scaled(&prev.at_initial_time(), -(chi + h))?;
    Ok(out)
}

/// Exact check for `a + b = 0` without building the sum.
fn cancels(a: &TermSum, b: &TermSum) -> bool {
    a.terms().count() == b.terms().count()
        && a.terms()
            .zip(b.terms())
            .all(|((ea, sa), (eb, sb))| ea == eb && sa.scaled(-1.0) == *sb)
}

/// `Σ_{i<m} (u_i + v_i) · ∂_θ w_{m−1−i}` over full space-time sums.
fn convection(us: &[TermSum], vs: &[TermSum], ws: &[TermSum], m: usize, alpha: f64) -> Result<TermSum> {
    let mut out = TermSum::zero(crate::algebra::Geometry::Planar);
    for i in 0..m {
        if cancels(&us[i], &vs[i]) {
            continue;
        }
        let mut carrier = us[i].clone();
        carrier.add_scaled(&vs[i], 1.0)?;
        if carrier.is_zero() {
            continue;
        }
        out.add_scaled(&carrier.planar_product(&ws[m - 1 - i], alpha, true)?, 1.0)?;
    }
    Ok(out)
}

/// Order m from orders 0 … m−1 of `previous`.
pub fn ham_next_order(problem: &ProblemSpec, previous: &HamSeries, m: usize, hbar: Hbar) -> Result<NextOrder> {
    if m == 0 {
        return Err(Error::Order("recursion starts at m = 1"));
    }
    if previous.u().len() < m {
        return Err(Error::Order("previous series lacks orders below m"));
    }
    if previous.geometry() != problem.geometry() || previous.is_pair() != problem.is_pair() {
        return Err(Error::Variant {
            expected: "series of the same problem type",
        });
    }
    hbar.validate()?;
    next_order(problem, &previous.u()[..m], previous.v().map(|v| &v[..m]), m, hbar)
}

/// Recursion step on unchecked slices holding orders 0 … m−1.
fn next_order(
    problem: &ProblemSpec,
    us: &[TermSum],
    vs: Option<&[TermSum]>,
    m: usize,
    hbar: Hbar,
) -> Result<NextOrder> {
    let chi = chi(m) as f64;
    let gate = 1.0 - chi;
    let alpha = problem.alpha().value();
    let geometry = problem.geometry();
    match problem.app() {
        Application::TubePressure { nu, .. } | Application::Tube { nu } => {
            let forcing = match problem.app() {
                Application::TubePressure { pressure, .. } => pressure,
                _ => 0.0,
            };
            let prev = &us[m - 1];
            let mut bracket = prev.map_spatial(cylindrical_operator)?.scaled(nu);
            bracket.add_scaled(&constant_sum(geometry, forcing * gate), 1.0)?;
            let mut u = carried(prev, chi, hbar.u)?;
            u.add_scaled(&bracket.frac_integral(), -hbar.u)?;
            Ok(NextOrder { u, v: None })
        }
        Application::PlanarSystem { rho0, g } => {
            let vs = vs.ok_or(Error::Variant {
                expected: "paired series",
            })?;
            let step = |ws: &[TermSum], h: f64, sign: f64| -> Result<TermSum> {
                let prev = &ws[m - 1];
                let mut bracket = convection(us, vs, ws, m, alpha)?;
                bracket.add_scaled(&prev.map_spatial(planar_laplacian)?, -rho0)?;
                bracket.add_scaled(&constant_sum(geometry, g * gate), sign)?;
                let mut out = carried(prev, chi, h)?;
                out.add_scaled(&bracket.frac_integral(), h)?;
                Ok(out)
            };
            let u = step(us, hbar.u, -1.0)?;
            let v = step(vs, hbar.v, 1.0)?;
            Ok(NextOrder { u, v: Some(v) })
        }
    }
}

/// Orders 0 … M of the deformation series.
pub fn ham_series(problem: &ProblemSpec, config: &HamConfig) -> Result<HamSeries> {
    config.validate(problem.is_pair())?;
    let (u0, v0) = problem.initial_data();
    let mut us = vec![u0];
    let mut vs = v0.map(|v| vec![v]);
    for m in 1..=config.orders {
        let next = next_order(problem, &us, vs.as_deref(), m, config.hbar)?;
        us.push(next.u);
        if let (Some(vs), Some(v)) = (vs.as_mut(), next.v) {
            vs.push(v);
        }
    }
    HamSeries::new(problem.alpha(), us, vs)
}

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn largest_coefficient(s: &TermSum) -> f64 {
    let zero = TermSum::zero(s.geometry());
    s.max_deviation(&zero).unwrap_or(0.0)
}

/// Reads the seeds `S_k` (the power-kα part of order k) and checks that
/// every order m has the family form
/// `Σ_k C(m−1, k−1) (1+ħ)^(m−k) S_k T_{kα}`.
fn family_seeds(orders: &[TermSum], h: f64) -> Result<Vec<SpatialExpr>> {
    let geometry = orders[0].geometry();
    let top = orders.len() - 1;
    let mut seeds = Vec::with_capacity(top);
    for (k, order) in orders.iter().enumerate().skip(1) {
        let e = TimeExponent::alpha_multiple(k as u32);
        seeds.push(order.term(e).cloned().unwrap_or_else(|| SpatialExpr::zero(geometry)));
    }
    let q = 1.0 + h;
    for (m, order) in orders.iter().enumerate().skip(1) {
        let mut expected = TermSum::zero(geometry);
        for k in 1..=m {
            let w = binomial(m - 1, k - 1) * math::powi(q, (m - k) as i32);
            expected.add_term(TimeExponent::alpha_multiple(k as u32), &seeds[k - 1], w)?;
        }
        let scale = largest_coefficient(&expected).max(1.0);
        if order.max_deviation(&expected)? > 1e-9 * scale {
            return Err(Error::Structure("iterates do not follow the geometric family pattern"));
        }
    }
    Ok(seeds)
}

/// The recursion with a single ħ, run far enough to read `terms` families.
fn single_hbar_run(problem: &ProblemSpec, h: f64, terms: usize) -> Result<HamSeries> {
    let config = HamConfig {
        hbar: Hbar::uniform(h),
        orders: terms + 2,
        resum: false,
        terms,
    };
    ham_series(problem, &config)
}

/// Collapsed families `A_k = S_k · (−ħ)^(−k)` of one component's orders.
fn collapsed_families(orders: &[TermSum], h: f64, terms: usize) -> Result<Vec<TermSum>> {
    let seeds = family_seeds(orders, h)?;
    let mut out = Vec::with_capacity(terms + 1);
    out.push(orders[0].clone());
    for (k, seed) in seeds.into_iter().enumerate().take(terms) {
        let k = k + 1;
        let factor = math::powi(-h, -(k as i32));
        let mut sum = TermSum::zero(orders[0].geometry());
        sum.add_term(TimeExponent::alpha_multiple(k as u32), &seed, factor)?;
        out.push(sum);
    }
    Ok(out)
}

/// Sums every `(1+ħ)` family in closed form (valid for `|1 + ħ| < 1`) and
/// returns the ħ-free series truncated after `terms` time powers. Entry k of
/// the result holds the `T_{kα}` part of the solution.
///
/// For the planar system with distinct `ħ₁`, `ħ₂` each component is read
/// from a run with that component's ħ on both equations; the limit of every
/// convergent run is the same solution, and the single-ħ runs keep
/// `u_m + v_m` free of the wave part so the families stay geometric.
pub fn resum_geometric(problem: &ProblemSpec, hbar: Hbar, terms: usize) -> Result<HamSeries> {
    hbar.validate()?;
    hbar.check_region(problem.is_pair())?;
    if terms == 0 {
        return Err(Error::Order("resummation needs at least one term"));
    }
    let run_u = single_hbar_run(problem, hbar.u, terms)?;
    let u = collapsed_families(run_u.u(), hbar.u, terms)?;
    let v = if problem.is_pair() {
        let run_v = if hbar.v == hbar.u {
            run_u
        } else {
            single_hbar_run(problem, hbar.v, terms)?
        };
        Some(collapsed_families(run_v.v().expect("pair problem"), hbar.v, terms)?)
    } else {
        None
    };
    HamSeries::new(problem.alpha(), u, v)
}
