//! Independent numerical checks of candidate solutions.
//!
//! Candidates are kept in separated form `Σᵢ Sᵢ(x) τᵢ(t)`. Spatial operators
//! act on the `Sᵢ` analytically through the term algebra; the ψ-Caputo
//! derivative of each `τᵢ` is computed numerically, so the residual measures
//! only the temporal quadrature error (plus any genuine defect).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::algebra::{
    cylindrical_operator, planar_laplacian, FieldValue, Geometry, HamSeries, Laurent, SpatialExpr, SpatialPoint,
    TermSum, TimeExponent, Trig,
};
use crate::error::{Error, Result};
use crate::kernel::{caputo_derivative_l1, FracOrder};
use crate::math;
use crate::problem::{planar_envelope, tube_coefficient, Application, ProblemSpec};
use crate::psi::PsiSpec;

/// Time dependence of one separated part.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeFactor {
    /// `(ψ(t) − ψ(a))^β / Γ(β + 1)`.
    Power(TimeExponent),
    /// `E_α(−rate · (ψ(t) − ψ(a))^α)`.
    Envelope { rate: f64 },
}

impl TimeFactor {
    pub fn eval(&self, alpha: FracOrder, s: f64) -> Result<f64> {
        match *self {
            TimeFactor::Power(e) => e.eval(alpha.value(), s),
            TimeFactor::Envelope { rate } => planar_envelope(alpha, 0.5 * rate, s),
        }
    }
}

/// `Σᵢ Sᵢ τᵢ` for one field component.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparatedField {
    parts: Vec<(SpatialExpr, TimeFactor)>,
}

impl SeparatedField {
    pub fn new(parts: Vec<(SpatialExpr, TimeFactor)>) -> Self {
        Self { parts }
    }

    pub fn parts(&self) -> &[(SpatialExpr, TimeFactor)] {
        &self.parts
    }

    fn from_sum(sum: &TermSum) -> Self {
        Self {
            parts: sum.terms().map(|(e, s)| (s.clone(), TimeFactor::Power(e))).collect(),
        }
    }

    fn eval(&self, alpha: FracOrder, point: SpatialPoint, s: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (sp, tf) in &self.parts {
            acc += sp.eval(point)? * tf.eval(alpha, s)?;
        }
        Ok(acc)
    }
}

/// A solution candidate, scalar or paired.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub u: SeparatedField,
    pub v: Option<SeparatedField>,
}

impl Candidate {
    /// The truncated sum of orders `0 ..= orders_used`.
    pub fn from_series(series: &HamSeries, orders_used: usize) -> Result<Self> {
        if orders_used > series.max_order() {
            return Err(Error::Order("orders_used exceeds the series length"));
        }
        let (u, v) = series.collapsed(orders_used);
        Ok(Self {
            u: SeparatedField::from_sum(&u),
            v: v.as_ref().map(SeparatedField::from_sum),
        })
    }

    /// The closed-form solution; `terms` truncates the tube series.
    pub fn exact(problem: &ProblemSpec, terms: usize) -> Self {
        let power = |k: u32| TimeFactor::Power(TimeExponent::alpha_multiple(k));
        let at_zero = TimeFactor::Power(TimeExponent::ZERO);
        match problem.app() {
            Application::TubePressure { nu, pressure } => Self {
                u: SeparatedField::new(alloc::vec![
                    (
                        SpatialExpr::Cylindrical(Laurent::from_terms([(0, 1.0), (2, -1.0)])),
                        at_zero
                    ),
                    (
                        SpatialExpr::Cylindrical(Laurent::monomial(0, pressure - 4.0 * nu)),
                        power(1)
                    ),
                ]),
                v: None,
            },
            Application::Tube { nu } => {
                let mut parts = alloc::vec![(SpatialExpr::Cylindrical(Laurent::monomial(1, 1.0)), at_zero)];
                for k in 1..=terms as u32 {
                    let l = Laurent::monomial(1 - 2 * k as i32, tube_coefficient(k, nu));
                    parts.push((SpatialExpr::Cylindrical(l), power(k)));
                }
                Self {
                    u: SeparatedField::new(parts),
                    v: None,
                }
            }
            Application::PlanarSystem { rho0, g } => {
                let env = TimeFactor::Envelope { rate: 2.0 * rho0 };
                let field = |sign: f64| {
                    SeparatedField::new(alloc::vec![
                        (SpatialExpr::Planar(Trig::sin(1, sign)), env),
                        (SpatialExpr::Planar(Trig::constant(-sign * g)), power(1)),
                    ])
                };
                Self {
                    u: field(-1.0),
                    v: Some(field(1.0)),
                }
            }
        }
    }

    /// The identically zero field.
    pub fn zero(problem: &ProblemSpec) -> Self {
        let empty = SeparatedField::new(Vec::new());
        Self {
            u: empty.clone(),
            v: problem.is_pair().then_some(empty),
        }
    }

    pub fn eval(&self, problem: &ProblemSpec, point: SpatialPoint, t: f64) -> Result<FieldValue> {
        let s = problem.psi().elapsed(problem.a(), t)?;
        let alpha = problem.alpha();
        let u = self.u.eval(alpha, point, s)?;
        Ok(match &self.v {
            Some(v) => FieldValue::pair(u, v.eval(alpha, point, s)?),
            None => FieldValue::scalar(u),
        })
    }
}

/// Spatial sampling of a residual grid. Counts include both endpoints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpatialGrid {
    Radial {
        r_min: f64,
        r_max: f64,
        n_r: usize,
    },
    Planar {
        x: (f64, f64),
        n_x: usize,
        y: (f64, f64),
        n_y: usize,
    },
}

/// Space-time grid: the spatial sample crossed with `n_t` times in
/// `[a + eps, t_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub spatial: SpatialGrid,
    pub eps: f64,
    pub t_max: f64,
    pub n_t: usize,
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + i as f64 * step })
}

impl SpatialGrid {
    fn validate(&self, geometry: Geometry) -> Result<()> {
        match (*self, geometry) {
            (SpatialGrid::Radial { r_min, r_max, n_r }, Geometry::Cylindrical) => {
                if !(r_min > 0.0 && r_max >= r_min && r_max.is_finite()) {
                    return Err(Error::Domain("radial grid needs 0 < r_min <= r_max"));
                }
                if n_r < 2 {
                    return Err(Error::Domain("grid counts must be at least 2"));
                }
                Ok(())
            }
            (SpatialGrid::Planar { x, n_x, y, n_y }, Geometry::Planar) => {
                if !(x.0 <= x.1 && y.0 <= y.1) || !(x.1 - x.0).is_finite() || !(y.1 - y.0).is_finite() {
                    return Err(Error::Domain("planar grid ranges must be finite and ordered"));
                }
                if n_x < 2 || n_y < 2 {
                    return Err(Error::Domain("grid counts must be at least 2"));
                }
                Ok(())
            }
            (SpatialGrid::Radial { .. }, _) => Err(Error::Variant {
                expected: "planar grid",
            }),
            (SpatialGrid::Planar { .. }, _) => Err(Error::Variant {
                expected: "radial grid",
            }),
        }
    }

    /// Points in lexicographic index order.
    pub fn points(&self) -> Vec<SpatialPoint> {
        match *self {
            SpatialGrid::Radial { r_min, r_max, n_r } => {
                linspace(r_min, r_max, n_r).map(SpatialPoint::Radial).collect()
            }
            SpatialGrid::Planar { x, n_x, y, n_y } => {
                let mut out = Vec::with_capacity(n_x * n_y);
                for xi in linspace(x.0, x.1, n_x) {
                    for yi in linspace(y.0, y.1, n_y) {
                        out.push(SpatialPoint::Planar { x: xi, y: yi });
                    }
                }
                out
            }
        }
    }
}

impl GridSpec {
    pub fn validate(&self, problem: &ProblemSpec) -> Result<()> {
        self.spatial.validate(problem.geometry())?;
        if !(self.eps > 0.0) {
            return Err(Error::Domain("eps must be positive"));
        }
        if !(self.t_max > problem.a() + self.eps) || !self.t_max.is_finite() {
            return Err(Error::Domain("t_max must exceed a + eps"));
        }
        if self.n_t < 2 {
            return Err(Error::Domain("grid counts must be at least 2"));
        }
        Ok(())
    }

    pub fn times(&self, a: f64) -> Vec<f64> {
        linspace(a + self.eps, self.t_max, self.n_t).collect()
    }
}

/// Quadrature controls for the time derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadParams {
    /// L1 panels on `[ψ(a), ψ(t)]`; for α = 1 the central-difference step
    /// is `(t − a)/nodes`.
    pub nodes: usize,
}

/// Norms of one equation's residual.
#[derive(Clone, Debug, PartialEq)]
pub struct EquationNorms {
    pub name: &'static str,
    pub sup: f64,
    pub rms: f64,
    /// Location `(point, t)` of the largest residual.
    pub worst: Option<(SpatialPoint, f64)>,
}

/// A grid point whose evaluation failed.
#[derive(Clone, Debug, PartialEq)]
pub struct PointFailure {
    pub point: SpatialPoint,
    pub t: f64,
    pub error: Error,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub equations: Vec<EquationNorms>,
    pub quad: QuadParams,
    pub points_evaluated: usize,
    pub failures: Vec<PointFailure>,
    /// Largest deviation from the initial data at t = a over the spatial grid.
    pub ic_max_deviation: f64,
}

impl ResidualReport {
    pub fn sup(&self) -> f64 {
        self.equations.iter().map(|e| e.sup).fold(0.0, f64::max)
    }
}

/// Numerical ψ-Caputo derivative of one time factor.
fn time_derivative(problem: &ProblemSpec, tf: TimeFactor, t: f64, nodes: usize) -> Result<f64> {
    let psi: &PsiSpec = problem.psi();
    let a = problem.a();
    let alpha = problem.alpha();
    if let TimeFactor::Power(e) = tf {
        if e.is_zero() {
            return Ok(0.0);
        }
    }
    let f = |tau: f64| -> f64 {
        match psi.elapsed(a, tau) {
            Ok(s) => tf.eval(alpha, s).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    };
    if alpha.is_classical() {
        let h = (t - a) / nodes as f64;
        let d = (f(t + h) - f(t - h)) / (2.0 * h);
        if !d.is_finite() {
            return Err(Error::NonFinite(t));
        }
        return Ok(d / psi.derivative(t)?);
    }
    caputo_derivative_l1(alpha, f, psi, a, t, nodes)
}

struct Prepared {
    spatial: Vec<SpatialExpr>,
    diffusion: Vec<SpatialExpr>,
    slope: Vec<Option<Trig>>,
    factors: Vec<TimeFactor>,
}

fn prepare(field: &SeparatedField, geometry: Geometry) -> Result<Prepared> {
    let mut p = Prepared {
        spatial: Vec::new(),
        diffusion: Vec::new(),
        slope: Vec::new(),
        factors: Vec::new(),
    };
    for (sp, tf) in field.parts() {
        if sp.geometry() != geometry {
            return Err(Error::Variant {
                expected: "candidate geometry matching the problem",
            });
        }
        p.spatial.push(sp.clone());
        match geometry {
            Geometry::Cylindrical => {
                p.diffusion.push(cylindrical_operator(sp)?);
                p.slope.push(None);
            }
            Geometry::Planar => {
                p.diffusion.push(planar_laplacian(sp)?);
                p.slope.push(Some(sp.as_trig()?.d_theta()));
            }
        }
        p.factors.push(*tf);
    }
    Ok(p)
}

#[derive(Default)]
struct Accumulator {
    sup: f64,
    sum_sq: f64,
    count: usize,
    worst: Option<(SpatialPoint, f64)>,
}

impl Accumulator {
    fn push(&mut self, r: f64, point: SpatialPoint, t: f64) {
        let m = r.abs();
        if m > self.sup || self.worst.is_none() {
            self.sup = self.sup.max(m);
            self.worst = Some((point, t));
        }
        self.sum_sq += r * r;
        self.count += 1;
    }

    fn finish(self, name: &'static str) -> EquationNorms {
        let rms = if self.count > 0 {
            math::sqrt(self.sum_sq / self.count as f64)
        } else {
            0.0
        };
        EquationNorms {
            name,
            sup: self.sup,
            rms,
            worst: self.worst,
        }
    }
}

/// Values of one component at a point: field, `D^{α,ψ}` field, diffusion
/// term and θ-slope.
fn component_values(p: &Prepared, derivs: &[f64], values: &[f64], point: SpatialPoint) -> Result<(f64, f64, f64, f64)> {
    let (mut w, mut dw, mut diff, mut slope) = (0.0, 0.0, 0.0, 0.0);
    let theta = match point {
        SpatialPoint::Planar { x, y } => x + y,
        SpatialPoint::Radial(_) => 0.0,
    };
    for i in 0..p.spatial.len() {
        let s = p.spatial[i].eval(point)?;
        w += s * values[i];
        dw += s * derivs[i];
        diff += p.diffusion[i].eval(point)? * values[i];
        if let Some(tr) = &p.slope[i] {
            slope += tr.eval(theta) * values[i];
        }
    }
    Ok((w, dw, diff, slope))
}

fn ic_deviation(problem: &ProblemSpec, candidate: &Candidate, points: &[SpatialPoint]) -> Result<f64> {
    let (u0, v0) = problem.initial_data();
    let alpha = problem.alpha().value();
    let mut worst: f64 = 0.0;
    for &pt in points {
        let got = candidate.eval(problem, pt, problem.a())?;
        worst = worst.max((got.u - u0.eval(pt, alpha, 0.0)?).abs());
        if let (Some(v), Some(v0)) = (got.v, v0.as_ref()) {
            worst = worst.max((v - v0.eval(pt, alpha, 0.0)?).abs());
        }
    }
    Ok(worst)
}

/// Residual of `candidate` in the problem's governing equations.
///
/// Tube problems: `D u − ν (u_rr + u_r/r) − P`. Planar system:
/// `D u + (u + v) u_θ − ρ₀ Δu − g` and `D v + (u + v) v_θ − ρ₀ Δv + g`
/// (for functions of θ = x + y, `u ∂ₓ + v ∂_y = (u + v) d/dθ`).
///
/// Per-point evaluation errors are collected in the report, not raised.
pub fn residual_norm(
    problem: &ProblemSpec,
    candidate: &Candidate,
    grid: &GridSpec,
    quad: QuadParams,
) -> Result<ResidualReport> {
    grid.validate(problem)?;
    if quad.nodes < 2 {
        return Err(Error::Domain("quadrature needs at least 2 nodes"));
    }
    if candidate.v.is_some() != problem.is_pair() {
        return Err(Error::Variant {
            expected: "candidate with the problem's component count",
        });
    }
    let geometry = problem.geometry();
    let pu = prepare(&candidate.u, geometry)?;
    let pv = match &candidate.v {
        Some(v) => Some(prepare(v, geometry)?),
        None => None,
    };
    let points = grid.spatial.points();
    let times = grid.times(problem.a());
    let alpha = problem.alpha();

    let mut acc_u = Accumulator::default();
    let mut acc_v = Accumulator::default();
    let mut failures = Vec::new();
    let mut evaluated = 0;

    for &t in &times {
        let s = match problem.psi().elapsed(problem.a(), t) {
            Ok(s) => s,
            Err(error) => {
                for &point in &points {
                    failures.push(PointFailure {
                        point,
                        t,
                        error: error.clone(),
                    });
                }
                continue;
            }
        };
        let time_data = |p: &Prepared| -> Result<(Vec<f64>, Vec<f64>)> {
            let mut d = Vec::with_capacity(p.factors.len());
            let mut v = Vec::with_capacity(p.factors.len());
            for &tf in &p.factors {
                d.push(time_derivative(problem, tf, t, quad.nodes)?);
                v.push(tf.eval(alpha, s)?);
            }
            Ok((d, v))
        };
        let tu = time_data(&pu);
        let tv = pv.as_ref().map(time_data);
        let (du, vu) = match tu {
            Ok(x) => x,
            Err(error) => {
                for &point in &points {
                    failures.push(PointFailure {
                        point,
                        t,
                        error: error.clone(),
                    });
                }
                continue;
            }
        };
        let tv = match tv {
            Some(Ok(x)) => Some(x),
            Some(Err(error)) => {
                for &point in &points {
                    failures.push(PointFailure {
                        point,
                        t,
                        error: error.clone(),
                    });
                }
                continue;
            }
            None => None,
        };
        for &point in &points {
            let result = (|| -> Result<(f64, Option<f64>)> {
                let (u, dut, diff_u, slope_u) = component_values(&pu, &du, &vu, point)?;
                match problem.app() {
                    Application::TubePressure { nu, pressure } => Ok((dut - nu * diff_u - pressure, None)),
                    Application::Tube { nu } => Ok((dut - nu * diff_u, None)),
                    Application::PlanarSystem { rho0, g } => {
                        let (pv, (dv, vv)) = (pv.as_ref().expect("pair"), tv.as_ref().expect("pair"));
                        let (v, dvt, diff_v, slope_v) = component_values(pv, dv, vv, point)?;
                        let carrier = u + v;
                        let ru = dut + carrier * slope_u - rho0 * diff_u - g;
                        let rv = dvt + carrier * slope_v - rho0 * diff_v + g;
                        Ok((ru, Some(rv)))
                    }
                }
            })();
            match result {
                Ok((ru, rv)) => {
                    evaluated += 1;
                    acc_u.push(ru, point, t);
                    if let Some(rv) = rv {
                        acc_v.push(rv, point, t);
                    }
                }
                Err(error) => failures.push(PointFailure { point, t, error }),
            }
        }
    }

    let mut equations = alloc::vec![acc_u.finish("u")];
    if problem.is_pair() {
        equations.push(acc_v.finish("v"));
    }
    let ic_max_deviation = ic_deviation(problem, candidate, &points).unwrap_or(f64::INFINITY);
    Ok(ResidualReport {
        equations,
        quad,
        points_evaluated: evaluated,
        failures,
        ic_max_deviation,
    })
}

/// Result of comparing engine iterates against the reference listings.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub max_deviation: f64,
    pub orders_compared: usize,
    pub coefficients_compared: usize,
}

/// Coefficient key: (k, j, slot, index) where slot 0 is `rⁿ`, 1 the trig
/// constant, 2 `sin kθ`, 3 `cos kθ`.
type Slot = (u32, u32, u8, i32);

fn flatten(s: &TermSum) -> BTreeMap<Slot, f64> {
    let mut out = BTreeMap::new();
    for (e, sp) in s.terms() {
        match sp {
            SpatialExpr::Cylindrical(l) => {
                for (n, c) in l.terms() {
                    out.insert((e.k, e.j, 0, n), c);
                }
            }
            SpatialExpr::Planar(t) => {
                if t.constant_term() != 0.0 {
                    out.insert((e.k, e.j, 1, 0), t.constant_term());
                }
                for (k, a, b) in t.harmonics() {
                    if a != 0.0 {
                        out.insert((e.k, e.j, 2, k as i32), a);
                    }
                    if b != 0.0 {
                        out.insert((e.k, e.j, 3, k as i32), b);
                    }
                }
            }
        }
    }
    out
}

fn powers(h: f64) -> impl Fn(i32) -> f64 {
    move |n| math::powi(h, n)
}

/// Reference iterates as listed for each problem, with ħ substituted.
/// Returns `(u table, v table)`; orders beyond the listing are absent.
pub fn reference_iterates(problem: &ProblemSpec, hbar: f64) -> (Vec<TermSum>, Option<Vec<TermSum>>) {
    let h = hbar;
    let q = powers(1.0 + h);
    let cyl = |entries: &[(u32, i32, f64)]| {
        let mut s = TermSum::zero(Geometry::Cylindrical);
        for &(k, n, c) in entries {
            let e = SpatialExpr::Cylindrical(Laurent::monomial(n, c));
            s.add_term(TimeExponent::alpha_multiple(k), &e, 1.0)
                .expect("cylindrical");
        }
        s
    };
    match problem.app() {
        Application::TubePressure { nu, pressure } => {
            let c = pressure - 4.0 * nu;
            let u = (1..=3).map(|m| cyl(&[(1, 0, -q(m - 1) * h * c)])).collect();
            (u, None)
        }
        Application::Tube { nu } => {
            let n = powers(nu);
            let hp = powers(h);
            let u = alloc::vec![
                cyl(&[(1, -1, -h * nu)]),
                cyl(&[(1, -1, -q(1) * h * nu), (2, -3, hp(2) * n(2))]),
                cyl(&[
                    (1, -1, -q(2) * h * nu),
                    (2, -3, 2.0 * q(1) * hp(2) * n(2)),
                    (3, -5, -9.0 * hp(3) * n(3))
                ]),
                cyl(&[
                    (1, -1, -q(3) * h * nu),
                    (2, -3, 3.0 * q(2) * hp(2) * n(2)),
                    (3, -5, -27.0 * q(1) * hp(3) * n(3)),
                    (4, -7, 225.0 * hp(4) * n(4)),
                ]),
            ];
            (u, None)
        }
        Application::PlanarSystem { rho0, g } => {
            let hr = h * rho0;
            let order = |entries: &[(u32, f64, f64)], sign: f64| {
                let mut s = TermSum::zero(Geometry::Planar);
                for &(k, sin_c, const_c) in entries {
                    let mut t = Trig::sin(1, sign * sin_c);
                    t.add_constant(sign * const_c);
                    s.add_term(TimeExponent::alpha_multiple(k), &SpatialExpr::Planar(t), 1.0)
                        .expect("planar");
                }
                s
            };
            let table = [
                alloc::vec![(1, -2.0 * hr, -h * g)],
                alloc::vec![(1, -2.0 * q(1) * hr, -q(1) * h * g), (2, -4.0 * hr * hr, 0.0)],
                alloc::vec![
                    (1, -2.0 * q(2) * hr, -q(2) * h * g),
                    (2, -8.0 * q(1) * hr * hr, 0.0),
                    (3, -8.0 * hr * hr * hr, 0.0),
                ],
            ];
            let u = table.iter().map(|e| order(e, 1.0)).collect();
            let v = table.iter().map(|e| order(e, -1.0)).collect();
            (u, Some(v))
        }
    }
}

fn compare_orders(actual: &[TermSum], table: &[TermSum], report: &mut OracleReport) -> Result<()> {
    for (idx, want) in table.iter().enumerate() {
        let m = idx + 1;
        let Some(got) = actual.get(m) else { break };
        let (a, w) = (flatten(got), flatten(want));
        let mut keys: Vec<&Slot> = a.keys().chain(w.keys()).collect();
        keys.sort();
        keys.dedup();
        for key in keys {
            let x = a.get(key).copied().unwrap_or(0.0);
            let y = w.get(key).copied().unwrap_or(0.0);
            let dev = (x - y).abs();
            report.coefficients_compared += 1;
            report.max_deviation = report.max_deviation.max(dev);
            if dev > 1e-12 * y.abs().max(1.0) {
                return Err(Error::Mismatch {
                    order: m,
                    power: key.0,
                    expected: y,
                    actual: x,
                });
            }
        }
        report.orders_compared = report.orders_compared.max(m);
    }
    Ok(())
}

/// Runs the recursion to order `orders` and compares every listed order
/// against [`reference_iterates`]. The planar system uses `ħ₁ = ħ₂ = hbar`.
pub fn series_oracle_compare(problem: &ProblemSpec, orders: usize, hbar: f64) -> Result<OracleReport> {
    if orders > 8 {
        return Err(Error::Order("oracle comparison is limited to M <= 8"));
    }
    let series = crate::ham::ham_series(problem, &crate::ham::HamConfig::new(hbar, orders))?;
    let (tu, tv) = reference_iterates(problem, hbar);
    let mut report = OracleReport {
        max_deviation: 0.0,
        orders_compared: 0,
        coefficients_compared: 0,
    };
    compare_orders(series.u(), &tu, &mut report)?;
    if let (Some(v), Some(tv)) = (series.v(), tv) {
        compare_orders(v, &tv, &mut report)?;
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IcReport {
    pub max_deviation: f64,
    pub points: usize,
    pub passed: bool,
}

/// Tolerance of [`initial_condition_check`].
pub const IC_TOLERANCE: f64 = 1e-14;

/// Compares the candidate at t = a with the initial data on the grid.
pub fn initial_condition_check(problem: &ProblemSpec, candidate: &Candidate, grid: &SpatialGrid) -> Result<IcReport> {
    grid.validate(problem.geometry())?;
    let points = grid.points();
    let dev = ic_deviation(problem, candidate, &points)?;
    Ok(IcReport {
        max_deviation: dev,
        points: points.len(),
        passed: dev <= IC_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ham::{ham_series, HamConfig};
    use crate::problem::{make_problem, AppKind, ProblemParams};

    fn tube_pressure(alpha: f64) -> ProblemSpec {
        let p = ProblemParams {
            nu: Some(1.0),
            pressure: Some(1.0),
            ..Default::default()
        };
        make_problem(AppKind::TubePressure, alpha, PsiSpec::logarithm(), 1.0, p).unwrap()
    }

    fn tube() -> ProblemSpec {
        let p = ProblemParams {
            nu: Some(1.0),
            ..Default::default()
        };
        make_problem(AppKind::Tube, 0.5, PsiSpec::identity(), 0.0, p).unwrap()
    }

    fn planar(alpha: f64, g: f64) -> ProblemSpec {
        let p = ProblemParams {
            rho0: Some(1.0),
            g: Some(g),
            ..Default::default()
        };
        make_problem(AppKind::PlanarSystem, alpha, PsiSpec::identity(), 0.0, p).unwrap()
    }

    fn radial() -> SpatialGrid {
        SpatialGrid::Radial {
            r_min: 0.1,
            r_max: 1.0,
            n_r: 5,
        }
    }

    #[test]
    fn oracle_tables_match_engine() {
        for h in [-1.0, -0.7, -0.5] {
            assert!(series_oracle_compare(&tube_pressure(0.5), 3, h).unwrap().max_deviation <= 1e-12);
            assert!(series_oracle_compare(&tube(), 4, h).unwrap().max_deviation <= 1e-12);
            assert!(series_oracle_compare(&planar(0.7, 0.4), 3, h).unwrap().max_deviation <= 1e-12);
        }
    }

    #[test]
    fn oracle_rejects_large_m() {
        assert!(series_oracle_compare(&tube(), 9, -1.0).is_err());
    }

    #[test]
    fn initial_conditions_hold() {
        let prob = tube_pressure(0.5);
        let s = ham_series(&prob, &HamConfig::new(-0.7, 3)).unwrap();
        let c = Candidate::from_series(&s, 3).unwrap();
        assert!(initial_condition_check(&prob, &c, &radial()).unwrap().passed);
        let c = Candidate::exact(&prob, 0);
        assert!(initial_condition_check(&prob, &c, &radial()).unwrap().passed);
        let pl = planar(0.6, 0.0);
        let grid = SpatialGrid::Planar {
            x: (0.0, 3.0),
            n_x: 4,
            y: (0.0, 1.0),
            n_y: 3,
        };
        assert!(
            initial_condition_check(&pl, &Candidate::exact(&pl, 0), &grid)
                .unwrap()
                .passed
        );
        let bad = initial_condition_check(&pl, &Candidate::zero(&pl), &grid).unwrap();
        assert!(!bad.passed);
    }

    #[test]
    fn zero_candidate_has_zero_residual_and_flags_ic() {
        let prob = tube();
        let grid = GridSpec {
            spatial: radial(),
            eps: 0.05,
            t_max: 1.0,
            n_t: 3,
        };
        let rep = residual_norm(&prob, &Candidate::zero(&prob), &grid, QuadParams { nodes: 64 }).unwrap();
        assert_eq!(rep.sup(), 0.0);
        assert!(rep.ic_max_deviation > 0.5);
    }

    #[test]
    fn classical_planar_residual_is_tiny() {
        let prob = planar(1.0, 0.0);
        let grid = GridSpec {
            spatial: SpatialGrid::Planar {
                x: (0.0, 3.0),
                n_x: 5,
                y: (0.0, 3.0),
                n_y: 5,
            },
            eps: 0.05,
            t_max: 1.0,
            n_t: 5,
        };
        let rep = residual_norm(&prob, &Candidate::exact(&prob, 0), &grid, QuadParams { nodes: 2048 }).unwrap();
        assert!(rep.sup() < 1e-6, "{}", rep.sup());
        assert!(rep.failures.is_empty());
    }

    #[test]
    fn failing_points_are_reported() {
        let p = ProblemParams {
            nu: Some(1.0),
            ..Default::default()
        };
        let psi = PsiSpec::identity().with_domain(0.0, 0.5).unwrap();
        let prob = make_problem(AppKind::Tube, 0.5, psi, 0.0, p).unwrap();
        let grid = GridSpec {
            spatial: radial(),
            eps: 0.1,
            t_max: 1.0,
            n_t: 2,
        };
        let rep = residual_norm(&prob, &Candidate::exact(&prob, 4), &grid, QuadParams { nodes: 16 }).unwrap();
        assert_eq!(rep.points_evaluated, 5);
        assert_eq!(rep.failures.len(), 5);
        assert!(matches!(rep.failures[0].error, Error::Domain(_)));
    }
}
