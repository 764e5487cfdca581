//! The three flow problems and their closed-form solutions.

use crate::algebra::{FieldValue, Geometry, Laurent, SpatialExpr, SpatialPoint, TermSum, TimeExponent, Trig};
use crate::error::{Error, Result};
use crate::kernel::FracOrder;
use crate::math;
use crate::psi::PsiSpec;
use crate::special::{gamma_eval, ml_eval, MlQuery};

/// Which problem, with its physical constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Application {
    /// Axial flow in a tube driven by a constant pressure term:
    /// `D u = P + ν (u_rr + u_r / r)`, `u(r, a) = 1 − r²`.
    TubePressure { nu: f64, pressure: f64 },
    /// Unforced tube flow: `D u = ν (u_rr + u_r / r)`, `u(r, a) = r`.
    Tube { nu: f64 },
    /// Coupled planar system with viscosity `ρ₀` and pressure-gradient
    /// constant `g`, `u(x, y, a) = −sin(x + y)`, `v(x, y, a) = sin(x + y)`.
    PlanarSystem { rho0: f64, g: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AppKind {
    TubePressure,
    Tube,
    PlanarSystem,
}

impl AppKind {
    pub fn name(self) -> &'static str {
        match self {
            AppKind::TubePressure => "tube-pressure",
            AppKind::Tube => "tube",
            AppKind::PlanarSystem => "planar",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tube-pressure" => Some(AppKind::TubePressure),
            "tube" => Some(AppKind::Tube),
            "planar" => Some(AppKind::PlanarSystem),
            _ => None,
        }
    }
}

impl Application {
    pub fn kind(&self) -> AppKind {
        match self {
            Application::TubePressure { .. } => AppKind::TubePressure,
            Application::Tube { .. } => AppKind::Tube,
            Application::PlanarSystem { .. } => AppKind::PlanarSystem,
        }
    }

    pub fn geometry(&self) -> Geometry {
        match self {
            Application::PlanarSystem { .. } => Geometry::Planar,
            _ => Geometry::Cylindrical,
        }
    }
}

/// Loose parameter bag, validated against the chosen application.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ProblemParams {
    pub nu: Option<f64>,
    pub pressure: Option<f64>,
    pub rho0: Option<f64>,
    pub g: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct ProblemSpec {
    app: Application,
    alpha: FracOrder,
    psi: PsiSpec,
    a: f64,
}

fn positive(v: Option<f64>, missing: &'static str, bad: &'static str) -> Result<f64> {
    let v = v.ok_or(Error::Parameter(missing))?;
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::Parameter(bad));
    }
    Ok(v)
}

fn finite(v: Option<f64>, missing: &'static str) -> Result<f64> {
    let v = v.ok_or(Error::Parameter(missing))?;
    if !v.is_finite() {
        return Err(Error::Parameter("parameters must be finite"));
    }
    Ok(v)
}

/// Builds a validated problem. `alpha` must lie in (0, 1].
pub fn make_problem(kind: AppKind, alpha: f64, psi: PsiSpec, a: f64, params: ProblemParams) -> Result<ProblemSpec> {
    let alpha = FracOrder::solver(alpha)?;
    if !a.is_finite() {
        return Err(Error::Domain("a must be finite"));
    }
    if psi.is_logarithm() && a <= 0.0 {
        return Err(Error::Domain("logarithmic psi requires a > 0"));
    }
    psi.value(a)?;
    let app = match kind {
        AppKind::TubePressure => {
            if params.rho0.is_some() || params.g.is_some() {
                return Err(Error::Parameter("tube-pressure takes only nu and P"));
            }
            Application::TubePressure {
                nu: positive(params.nu, "tube-pressure needs nu", "nu must be positive")?,
                pressure: finite(params.pressure, "tube-pressure needs P")?,
            }
        }
        AppKind::Tube => {
            if params.pressure.is_some() || params.rho0.is_some() || params.g.is_some() {
                return Err(Error::Parameter("tube takes only nu"));
            }
            Application::Tube {
                nu: positive(params.nu, "tube needs nu", "nu must be positive")?,
            }
        }
        AppKind::PlanarSystem => {
            if params.nu.is_some() || params.pressure.is_some() {
                return Err(Error::Parameter("planar takes only rho0 and g"));
            }
            Application::PlanarSystem {
                rho0: positive(params.rho0, "planar needs rho0", "rho0 must be positive")?,
                g: finite(params.g, "planar needs g")?,
            }
        }
    };
    Ok(ProblemSpec { app, alpha, psi, a })
}

impl ProblemSpec {
    pub fn app(&self) -> Application {
        self.app
    }

    pub fn kind(&self) -> AppKind {
        self.app.kind()
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    pub fn psi(&self) -> &PsiSpec {
        &self.psi
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn geometry(&self) -> Geometry {
        self.app.geometry()
    }

    pub fn is_pair(&self) -> bool {
        matches!(self.app, Application::PlanarSystem { .. })
    }

    /// Same problem with another order, for α sweeps.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Ok(Self {
            alpha: FracOrder::solver(alpha)?,
            ..*self
        })
    }

    /// Initial data of u (and of v for the planar system) as order-0 sums.
    pub fn initial_data(&self) -> (TermSum, Option<TermSum>) {
        let at_zero = |e: SpatialExpr| TermSum::from_spatial(e, TimeExponent::ZERO);
        match self.app {
            Application::TubePressure { .. } => (
                at_zero(SpatialExpr::Cylindrical(Laurent::from_terms([(0, 1.0), (2, -1.0)]))),
                None,
            ),
            Application::Tube { .. } => (at_zero(SpatialExpr::Cylindrical(Laurent::monomial(1, 1.0))), None),
            Application::PlanarSystem { .. } => (
                at_zero(SpatialExpr::Planar(Trig::sin(1, -1.0))),
                Some(at_zero(SpatialExpr::Planar(Trig::sin(1, 1.0)))),
            ),
        }
    }
}

/// `(2k − 3)!!` with `(−1)!! = 1!! = 1`.
pub fn odd_double_factorial(k: u32) -> f64 {
    let mut acc = 1.0;
    let mut n = 2 * k as i64 - 3;
    while n > 1 {
        acc *= n as f64;
        n -= 2;
    }
    acc
}

/// Coefficient of `r^(1−2k) T_{kα}` in the tube solution.
pub fn tube_coefficient(k: u32, nu: f64) -> f64 {
    let d = odd_double_factorial(k);
    d * d * math::powi(nu, k as i32)
}

fn normalized_power(beta: f64, s: f64) -> Result<f64> {
    Ok(math::powf(s, beta) / gamma_eval(beta + 1.0)?)
}

/// `E_α(−2ρ₀ s^α)`, the planar decay envelope. α = 1 uses the exponential.
pub fn planar_envelope(alpha: FracOrder, rho0: f64, s: f64) -> Result<f64> {
    let al = alpha.value();
    let z = -2.0 * rho0 * math::powf(s, al);
    if alpha.is_classical() {
        return Ok(math::exp(z));
    }
    Ok(ml_eval(&MlQuery::new(al, z))?.value)
}

/// Closed-form solution at `point` and time `t`.
///
/// `terms` truncates the tube series (k = 1..=terms) and is ignored by the
/// other two problems.
pub fn exact_solution(problem: &ProblemSpec, point: SpatialPoint, t: f64, terms: usize) -> Result<FieldValue> {
    if t < problem.a {
        return Err(Error::Domain("t must not precede a"));
    }
    let s = problem.psi.elapsed(problem.a, t)?;
    let al = problem.alpha.value();
    match (problem.app, point) {
        (Application::TubePressure { nu, pressure }, SpatialPoint::Radial(r)) => {
            let base = 1.0 - r * r;
            Ok(FieldValue::scalar(
                base + (pressure - 4.0 * nu) * normalized_power(al, s)?,
            ))
        }
        (Application::Tube { nu }, SpatialPoint::Radial(r)) => {
            if r == 0.0 {
                return Err(Error::SingularPoint("tube solution is singular at r = 0"));
            }
            if terms == 0 {
                return Err(Error::Order("tube series needs at least one term"));
            }
            let mut acc = r;
            for k in 1..=terms as u32 {
                let spatial = math::powi(r, 1 - 2 * k as i32);
                acc += tube_coefficient(k, nu) * spatial * normalized_power(k as f64 * al, s)?;
            }
            Ok(FieldValue::scalar(acc))
        }
        (Application::PlanarSystem { rho0, g }, SpatialPoint::Planar { x, y }) => {
            let env = planar_envelope(problem.alpha, rho0, s)?;
            let wave = math::sin(x + y) * env;
            let drift = g * normalized_power(al, s)?;
            Ok(FieldValue::pair(-wave + drift, wave - drift))
        }
        (Application::PlanarSystem { .. }, _) => Err(Error::Variant {
            expected: "planar point",
        }),
        _ => Err(Error::Variant {
            expected: "radial point",
        }),
    }
}
