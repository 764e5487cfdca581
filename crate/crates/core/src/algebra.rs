//! Closed term algebra for the series iterates.
//!
//! A term is `c · S(x) · (ψ(t) − ψ(a))^β / Γ(β + 1)`: a spatial expression
//! times a normalized temporal power. With that normalization the power rule
//! of the ψ-fractional integral is a pure exponent shift `β → β + α`, so no
//! Gamma ratios appear in the bookkeeping.
//!
//! Spatial expressions are either Laurent polynomials in `r` (the tube
//! problems) or trigonometric polynomials in `θ = x + y` (the planar system).
//! Both families are closed under the operators the recursions apply.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::kernel::{gamma_ratio, FracOrder};
use crate::math;
use crate::psi::PsiSpec;
use crate::special::gamma_eval;

/// Exponent β = k·α + j, stored as the exact integer pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TimeExponent {
    pub k: u32,
    pub j: u32,
}

impl TimeExponent {
    pub const ZERO: TimeExponent = TimeExponent { k: 0, j: 0 };

    pub const fn alpha_multiple(k: u32) -> Self {
        Self { k, j: 0 }
    }

    pub fn beta(self, alpha: f64) -> f64 {
        self.k as f64 * alpha + self.j as f64
    }

    pub fn is_zero(self) -> bool {
        self.k == 0 && self.j == 0
    }

    /// Exponent after one application of I^{α,ψ}.
    pub fn integrated(self) -> Self {
        Self {
            k: self.k + 1,
            j: self.j,
        }
    }

    pub fn plus(self, other: Self) -> Self {
        Self {
            k: self.k + other.k,
            j: self.j + other.j,
        }
    }

    /// `s^β / Γ(β + 1)` for `s = ψ(t) − ψ(a) ≥ 0`.
    pub fn eval(self, alpha: f64, s: f64) -> Result<f64> {
        if self.is_zero() {
            return Ok(1.0);
        }
        let beta = self.beta(alpha);
        Ok(math::powf(s, beta) / gamma_eval(beta + 1.0)?)
    }
}

/// Laurent polynomial `Σ cₙ rⁿ`, n ∈ ℤ.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Laurent {
    terms: BTreeMap<i32, f64>,
}

impl Laurent {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn monomial(power: i32, coefficient: f64) -> Self {
        let mut l = Self::new();
        l.add(power, coefficient);
        l
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i32, f64)>) -> Self {
        let mut l = Self::new();
        for (n, c) in terms {
            l.add(n, c);
        }
        l
    }

    pub fn add(&mut self, power: i32, coefficient: f64) {
        let e = self.terms.entry(power).or_insert(0.0);
        *e += coefficient;
        if *e == 0.0 {
            self.terms.remove(&power);
        }
    }

    pub fn coefficient(&self, power: i32) -> f64 {
        self.terms.get(&power).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.terms.iter().map(|(&n, &c)| (n, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (n, c) in self.terms() {
            if r == 0.0 && n < 0 {
                return Err(Error::SingularPoint("negative power of r at r = 0"));
            }
            acc += c * math::powi(r, n);
        }
        Ok(acc)
    }

    /// `d²/dr² + (1/r) d/dr`: `c rⁿ ↦ c n² rⁿ⁻²`.
    pub fn radial_operator(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|&(n, _)| n != 0)
                .map(|(n, c)| (n - 2, c * (n as f64) * (n as f64))),
        )
    }

    pub fn derivative(&self) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|&(n, _)| n != 0)
                .map(|(n, c)| (n - 1, c * n as f64)),
        )
    }
}

/// Trigonometric polynomial `c₀ + Σₖ (aₖ sin kθ + bₖ cos kθ)`, θ = x + y.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Trig {
    constant: f64,
    harmonics: BTreeMap<u32, (f64, f64)>,
}

impl Trig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self {
            constant: c,
            harmonics: BTreeMap::new(),
        }
    }

    pub fn sin(k: u32, c: f64) -> Self {
        let mut t = Self::new();
        t.add_sin(k as i64, c);
        t
    }

    pub fn cos(k: u32, c: f64) -> Self {
        let mut t = Self::new();
        t.add_cos(k as i64, c);
        t
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    /// `(sin coefficient, cos coefficient)` of harmonic k ≥ 1.
    pub fn harmonic(&self, k: u32) -> (f64, f64) {
        self.harmonics.get(&k).copied().unwrap_or((0.0, 0.0))
    }

    pub fn harmonics(&self) -> impl Iterator<Item = (u32, f64, f64)> + '_ {
        self.harmonics.iter().map(|(&k, &(s, c))| (k, s, c))
    }

    pub fn is_zero(&self) -> bool {
        self.constant == 0.0 && self.harmonics.is_empty()
    }

    pub fn add_constant(&mut self, c: f64) {
        self.constant += c;
    }

    fn bump(&mut self, k: u32, ds: f64, dc: f64) {
        let e = self.harmonics.entry(k).or_insert((0.0, 0.0));
        e.0 += ds;
        e.1 += dc;
        if e.0 == 0.0 && e.1 == 0.0 {
            self.harmonics.remove(&k);
        }
    }

    /// Adds `c sin(nθ)` for any integer n.
    pub fn add_sin(&mut self, n: i64, c: f64) {
        if n == 0 || c == 0.0 {
            return;
        }
        let (k, c) = if n < 0 { (-n, -c) } else { (n, c) };
        self.bump(k as u32, c, 0.0);
    }

    /// Adds `c cos(nθ)` for any integer n.
    pub fn add_cos(&mut self, n: i64, c: f64) {
        if c == 0.0 {
            return;
        }
        if n == 0 {
            self.constant += c;
            return;
        }
        self.bump(n.unsigned_abs() as u32, 0.0, c);
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut acc = self.constant;
        for (k, s, c) in self.harmonics() {
            let kt = k as f64 * theta;
            acc += s * math::sin(kt) + c * math::cos(kt);
        }
        acc
    }

    /// d/dθ, which equals both ∂/∂x and ∂/∂y.
    pub fn d_theta(&self) -> Self {
        let mut out = Self::new();
        for (k, s, c) in self.harmonics() {
            let kf = k as f64;
            out.bump(k, -kf * c, kf * s);
        }
        out
    }

    /// `∂²/∂x² + ∂²/∂y² = 2 d²/dθ²`.
    pub fn laplacian(&self) -> Self {
        let mut out = Self::new();
        for (k, s, c) in self.harmonics() {
            let f = -2.0 * (k as f64) * (k as f64);
            out.bump(k, f * s, f * c);
        }
        out
    }

    /// Product expanded back onto the basis by product-to-sum identities.
    pub fn mul(&self, other: &Trig) -> Trig {
        let mut out = Trig::constant(self.constant * other.constant);
        for (k, s, c) in other.harmonics() {
            out.add_sin(k as i64, self.constant * s);
            out.add_cos(k as i64, self.constant * c);
        }
        for (k, s, c) in self.harmonics() {
            out.add_sin(k as i64, other.constant * s);
            out.add_cos(k as i64, other.constant * c);
        }
        for (k, s1, c1) in self.harmonics() {
            for (l, s2, c2) in other.harmonics() {
                let (k, l) = (k as i64, l as i64);
                // sin a sin b = ½[cos(a−b) − cos(a+b)]
                out.add_cos(k - l, 0.5 * s1 * s2);
                out.add_cos(k + l, -0.5 * s1 * s2);
                // cos a cos b = ½[cos(a−b) + cos(a+b)]
                out.add_cos(k - l, 0.5 * c1 * c2);
                out.add_cos(k + l, 0.5 * c1 * c2);
                // sin a cos b = ½[sin(a+b) + sin(a−b)]
                out.add_sin(k + l, 0.5 * s1 * c2);
                out.add_sin(k - l, 0.5 * s1 * c2);
                // cos a sin b = ½[sin(a+b) − sin(a−b)]
                out.add_sin(k + l, 0.5 * c1 * s2);
                out.add_sin(k - l, -0.5 * c1 * s2);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    Cylindrical,
    Planar,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpatialExpr {
    Cylindrical(Laurent),
    Planar(Trig),
}

/// A point of the spatial domain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpatialPoint {
    Radial(f64),
    Planar { x: f64, y: f64 },
}

impl SpatialExpr {
    pub fn zero(geometry: Geometry) -> Self {
        match geometry {
            Geometry::Cylindrical => SpatialExpr::Cylindrical(Laurent::new()),
            Geometry::Planar => SpatialExpr::Planar(Trig::new()),
        }
    }

    pub fn constant(geometry: Geometry, c: f64) -> Self {
        match geometry {
            Geometry::Cylindrical => SpatialExpr::Cylindrical(Laurent::monomial(0, c)),
            Geometry::Planar => SpatialExpr::Planar(Trig::constant(c)),
        }
    }

    pub fn geometry(&self) -> Geometry {
        match self {
            SpatialExpr::Cylindrical(_) => Geometry::Cylindrical,
            SpatialExpr::Planar(_) => Geometry::Planar,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SpatialExpr::Cylindrical(l) => l.is_zero(),
            SpatialExpr::Planar(t) => t.is_zero(),
        }
    }

    pub fn as_laurent(&self) -> Result<&Laurent> {
        match self {
            SpatialExpr::Cylindrical(l) => Ok(l),
            _ => Err(Error::Variant {
                expected: "cylindrical",
            }),
        }
    }

    pub fn as_trig(&self) -> Result<&Trig> {
        match self {
            SpatialExpr::Planar(t) => Ok(t),
            _ => Err(Error::Variant { expected: "planar" }),
        }
    }

    /// `self + factor · other`.
    pub fn add_scaled(&mut self, other: &SpatialExpr, factor: f64) -> Result<()> {
        if factor == 0.0 {
            return Ok(());
        }
        match (self, other) {
            (SpatialExpr::Cylindrical(a), SpatialExpr::Cylindrical(b)) => {
                for (n, c) in b.terms() {
                    a.add(n, factor * c);
                }
                Ok(())
            }
            (SpatialExpr::Planar(a), SpatialExpr::Planar(b)) => {
                a.add_constant(factor * b.constant);
                for (k, s, c) in b.harmonics() {
                    a.bump(k, factor * s, factor * c);
                }
                Ok(())
            }
            (SpatialExpr::Cylindrical(_), _) => Err(Error::Variant {
                expected: "cylindrical",
            }),
            (SpatialExpr::Planar(_), _) => Err(Error::Variant { expected: "planar" }),
        }
    }

    pub fn scaled(&self, factor: f64) -> SpatialExpr {
        let mut out = SpatialExpr::zero(self.geometry());
        out.add_scaled(self, factor).expect("same geometry");
        out
    }

    pub fn eval(&self, point: SpatialPoint) -> Result<f64> {
        match (self, point) {
            (SpatialExpr::Cylindrical(l), SpatialPoint::Radial(r)) => l.eval(r),
            (SpatialExpr::Planar(t), SpatialPoint::Planar { x, y }) => Ok(t.eval(x + y)),
            (SpatialExpr::Cylindrical(_), _) => Err(Error::Variant {
                expected: "radial point",
            }),
            (SpatialExpr::Planar(_), _) => Err(Error::Variant {
                expected: "planar point",
            }),
        }
    }
}

impl fmt::Display for SpatialExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            if first {
                first = false;
                Ok(())
            } else {
                f.write_str(" + ")
            }
        };
        match self {
            SpatialExpr::Cylindrical(l) => {
                for (n, c) in l.terms() {
                    sep(f)?;
                    write!(f, "{c}*r^{n}")?;
                }
            }
            SpatialExpr::Planar(t) => {
                if t.constant != 0.0 {
                    sep(f)?;
                    write!(f, "{}", t.constant)?;
                }
                for (k, s, c) in t.harmonics() {
                    if s != 0.0 {
                        sep(f)?;
                        write!(f, "{s}*sin({k}θ)")?;
                    }
                    if c != 0.0 {
                        sep(f)?;
                        write!(f, "{c}*cos({k}θ)")?;
                    }
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Applies `d²/dr² + (1/r) d/dr`.
pub fn cylindrical_operator(e: &SpatialExpr) -> Result<SpatialExpr> {
    Ok(SpatialExpr::Cylindrical(e.as_laurent()?.radial_operator()))
}

/// Applies `∂²/∂x² + ∂²/∂y²` to an expression in θ = x + y.
pub fn planar_laplacian(e: &SpatialExpr) -> Result<SpatialExpr> {
    Ok(SpatialExpr::Planar(e.as_trig()?.laplacian()))
}

/// `Σ_{i<m} uᵢ ∂ₓ w_{m−1−i} + vᵢ ∂_y w_{m−1−i}`; since ∂ₓ = ∂_y = d/dθ this
/// is `Σ (uᵢ + vᵢ) · d/dθ w_{m−1−i}`.
pub fn planar_convection(us: &[SpatialExpr], vs: &[SpatialExpr], ws: &[SpatialExpr], m: usize) -> Result<SpatialExpr> {
    if us.len() != m || vs.len() != m || ws.len() != m {
        return Err(Error::Length("convection needs exactly m entries in each list"));
    }
    let mut out = Trig::new();
    for i in 0..m {
        let mut carrier = us[i].as_trig()?.clone();
        let vi = vs[i].as_trig()?;
        carrier.add_constant(vi.constant);
        for (k, s, c) in vi.harmonics() {
            carrier.bump(k, s, c);
        }
        if carrier.is_zero() {
            continue;
        }
        let dw = ws[m - 1 - i].as_trig()?.d_theta();
        let prod = carrier.mul(&dw);
        SpatialExprMut(&mut out).add(&prod);
    }
    Ok(SpatialExpr::Planar(out))
}

struct SpatialExprMut<'a>(&'a mut Trig);

impl SpatialExprMut<'_> {
    fn add(&mut self, other: &Trig) {
        self.0.add_constant(other.constant);
        for (k, s, c) in other.harmonics() {
            self.0.bump(k, s, c);
        }
    }
}

/// One term: spatial part (carrying the coefficient) times a normalized power.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTerm {
    pub spatial: SpatialExpr,
    pub temporal: TimeExponent,
}

/// I^{α,ψ} on a normalized term: the exponent moves by one multiple of α and
/// the spatial part is untouched.
pub fn temporal_fractional_integral(term: &SeriesTerm) -> SeriesTerm {
    SeriesTerm {
        spatial: term.spatial.clone(),
        temporal: term.temporal.integrated(),
    }
}

/// A finite sum of terms, keyed by temporal exponent. This is one order uₘ.
#[derive(Clone, Debug, PartialEq)]
pub struct TermSum {
    geometry: Geometry,
    terms: BTreeMap<TimeExponent, SpatialExpr>,
}

impl TermSum {
    pub fn zero(geometry: Geometry) -> Self {
        Self {
            geometry,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_spatial(spatial: SpatialExpr, exponent: TimeExponent) -> Self {
        let mut s = Self::zero(spatial.geometry());
        s.add_term(exponent, &spatial, 1.0).expect("geometry matches");
        s
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (TimeExponent, &SpatialExpr)> + '_ {
        self.terms.iter().map(|(&e, s)| (e, s))
    }

    pub fn term(&self, exponent: TimeExponent) -> Option<&SpatialExpr> {
        self.terms.get(&exponent)
    }

    pub fn add_term(&mut self, exponent: TimeExponent, spatial: &SpatialExpr, factor: f64) -> Result<()> {
        if spatial.geometry() != self.geometry {
            return Err(Error::Variant {
                expected: match self.geometry {
                    Geometry::Cylindrical => "cylindrical",
                    Geometry::Planar => "planar",
                },
            });
        }
        let slot = self
            .terms
            .entry(exponent)
            .or_insert_with(|| SpatialExpr::zero(spatial.geometry()));
        slot.add_scaled(spatial, factor)?;
        if slot.is_zero() {
            self.terms.remove(&exponent);
        }
        Ok(())
    }

    pub fn add_scaled(&mut self, other: &TermSum, factor: f64) -> Result<()> {
        for (e, s) in other.terms() {
            self.add_term(e, s, factor)?;
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> TermSum {
        let mut out = TermSum::zero(self.geometry);
        out.add_scaled(self, factor).expect("same geometry");
        out
    }

    /// Value at t = a: terms with β > 0 vanish, β = 0 terms survive.
    pub fn at_initial_time(&self) -> TermSum {
        let mut out = TermSum::zero(self.geometry);
        if let Some(s) = self.terms.get(&TimeExponent::ZERO) {
            out.add_term(TimeExponent::ZERO, s, 1.0).expect("same geometry");
        }
        out
    }

    /// I^{α,ψ} applied termwise.
    pub fn frac_integral(&self) -> TermSum {
        TermSum {
            geometry: self.geometry,
            terms: self.terms.iter().map(|(e, s)| (e.integrated(), s.clone())).collect(),
        }
    }

    /// Applies a spatial operator to every term.
    pub fn map_spatial(&self, op: impl Fn(&SpatialExpr) -> Result<SpatialExpr>) -> Result<TermSum> {
        let mut out = TermSum::zero(self.geometry);
        for (e, s) in self.terms() {
            let image = op(s)?;
            out.add_term(e, &image, 1.0)?;
        }
        Ok(out)
    }

    /// Product of two planar sums, `self · d/dθ other` when `differentiate` is set.
    /// Normalized powers multiply as
    /// `T_β₁ · T_β₂ = Γ(β₁+β₂+1)/(Γ(β₁+1)Γ(β₂+1)) · T_{β₁+β₂}`.
    pub fn planar_product(&self, other: &TermSum, alpha: f64, differentiate: bool) -> Result<TermSum> {
        let mut out = TermSum::zero(Geometry::Planar);
        for (e1, s1) in self.terms() {
            let a = s1.as_trig()?;
            for (e2, s2) in other.terms() {
                let b = s2.as_trig()?;
                let b = if differentiate { b.d_theta() } else { b.clone() };
                let prod = a.mul(&b);
                if prod.is_zero() {
                    continue;
                }
                let (b1, b2) = (e1.beta(alpha), e2.beta(alpha));
                let weight = if e1.is_zero() || e2.is_zero() {
                    1.0
                } else {
                    gamma_ratio(b1 + b2 + 1.0, b1 + 1.0)? / gamma_eval(b2 + 1.0)?
                };
                out.add_term(e1.plus(e2), &SpatialExpr::Planar(prod), weight)?;
            }
        }
        Ok(out)
    }

    pub fn eval(&self, point: SpatialPoint, alpha: f64, s: f64) -> Result<f64> {
        let mut acc = 0.0;
        for (e, sp) in self.terms() {
            let tf = e.eval(alpha, s)?;
            if tf == 0.0 {
                continue;
            }
            acc += sp.eval(point)? * tf;
        }
        Ok(acc)
    }

    /// Largest absolute coefficient difference against `other`.
    pub fn max_deviation(&self, other: &TermSum) -> Result<f64> {
        let mut diff = self.clone();
        diff.add_scaled(other, -1.0)?;
        let mut worst: f64 = 0.0;
        for (_, s) in diff.terms() {
            match s {
                SpatialExpr::Cylindrical(l) => {
                    for (_, c) in l.terms() {
                        worst = worst.max(c.abs());
                    }
                }
                SpatialExpr::Planar(t) => {
                    worst = worst.max(t.constant.abs());
                    for (_, a, b) in t.harmonics() {
                        worst = worst.max(a.abs()).max(b.abs());
                    }
                }
            }
        }
        Ok(worst)
    }
}

/// Scalar or paired field value at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldValue {
    pub u: f64,
    pub v: Option<f64>,
}

impl FieldValue {
    pub fn scalar(u: f64) -> Self {
        Self { u, v: None }
    }

    pub fn pair(u: f64, v: f64) -> Self {
        Self { u, v: Some(v) }
    }
}

/// Per-order sums u₀ … u_M, plus v₀ … v_M for the coupled system.
#[derive(Clone, Debug, PartialEq)]
pub struct HamSeries {
    alpha: FracOrder,
    u: Vec<TermSum>,
    v: Option<Vec<TermSum>>,
}

impl HamSeries {
    /// Checks that order 0 is time-independent and every higher order
    /// vanishes at t = a.
    pub fn new(alpha: FracOrder, u: Vec<TermSum>, v: Option<Vec<TermSum>>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::Order("series needs at least order 0"));
        }
        let check = |orders: &[TermSum]| -> Result<()> {
            let g = orders[0].geometry();
            for (m, o) in orders.iter().enumerate() {
                if o.geometry() != g {
                    return Err(Error::Variant {
                        expected: "one geometry across orders",
                    });
                }
                for (e, _) in o.terms() {
                    if m == 0 && !e.is_zero() {
                        return Err(Error::Structure("order 0 must be time-independent"));
                    }
                    if m > 0 && e.k == 0 {
                        return Err(Error::Structure("orders m >= 1 must vanish at t = a"));
                    }
                }
            }
            Ok(())
        };
        check(&u)?;
        if let Some(v) = &v {
            if v.len() != u.len() {
                return Err(Error::Length("u and v order counts differ"));
            }
            check(v)?;
        }
        Ok(Self { alpha, u, v })
    }

    pub fn alpha(&self) -> FracOrder {
        self.alpha
    }

    /// Highest order M.
    pub fn max_order(&self) -> usize {
        self.u.len() - 1
    }

    pub fn u(&self) -> &[TermSum] {
        &self.u
    }

    pub fn v(&self) -> Option<&[TermSum]> {
        self.v.as_deref()
    }

    pub fn is_pair(&self) -> bool {
        self.v.is_some()
    }

    pub fn geometry(&self) -> Geometry {
        self.u[0].geometry()
    }

    /// Σ_{m ≤ orders_used} uₘ collapsed into one sum.
    pub fn collapsed(&self, orders_used: usize) -> (TermSum, Option<TermSum>) {
        let fold = |orders: &[TermSum]| {
            let mut acc = TermSum::zero(orders[0].geometry());
            for o in orders.iter().take(orders_used + 1) {
                acc.add_scaled(o, 1.0).expect("same geometry");
            }
            acc
        };
        (fold(&self.u), self.v.as_deref().map(fold))
    }
}

/// Numeric value of the truncated sum `Σ_{m ≤ orders_used} uₘ(point, t)`.
pub fn series_eval(
    s: &HamSeries,
    psi: &PsiSpec,
    a: f64,
    point: SpatialPoint,
    t: f64,
    orders_used: usize,
) -> Result<FieldValue> {
    if orders_used > s.max_order() {
        return Err(Error::Order("orders_used exceeds the series length"));
    }
    if t < a {
        return Err(Error::Domain("t must not precede a"));
    }
    let elapsed = psi.elapsed(a, t)?;
    let alpha = s.alpha().value();
    let sum = |orders: &[TermSum]| -> Result<f64> {
        let mut acc = 0.0;
        for o in orders.iter().take(orders_used + 1) {
            acc += o.eval(point, alpha, elapsed)?;
        }
        Ok(acc)
    };
    let u = sum(s.u())?;
    Ok(match s.v() {
        Some(v) => FieldValue::pair(u, sum(v)?),
        None => FieldValue::scalar(u),
    })
}
