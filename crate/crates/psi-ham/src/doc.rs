//! JSON documents: problems, series and residual reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use psi_ham_core::verify::{PointFailure, ResidualReport};
use psi_ham_core::{
    make_problem, AppKind, Application, Geometry, HamSeries, Hbar, ProblemParams, ProblemSpec, PsiKind, PsiSpec,
    SpatialExpr, SpatialPoint, TermSum, TimeExponent,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SERIES_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDoc {
    pub app: String,
    pub alpha: f64,
    pub psi: String,
    pub a: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub pressure: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
}

pub fn parse_psi(name: &str) -> CliResult<PsiSpec> {
    match name {
        "identity" | "t" => Ok(PsiSpec::identity()),
        "log" | "ln" => Ok(PsiSpec::logarithm()),
        other => Err(CliError::usage(format!(
            "unknown psi '{other}' (expected identity or log)"
        ))),
    }
}

pub fn parse_app(name: &str) -> CliResult<AppKind> {
    AppKind::parse(name)
        .ok_or_else(|| CliError::usage(format!("unknown app '{name}' (expected tube-pressure, tube or planar)")))
}

impl ProblemDoc {
    pub fn from_spec(p: &ProblemSpec) -> CliResult<Self> {
        if matches!(p.psi().kind(), PsiKind::Custom(_)) {
            return Err(CliError::usage("custom psi functions cannot be serialized"));
        }
        let mut doc = ProblemDoc {
            app: p.kind().name().to_string(),
            alpha: p.alpha().value(),
            psi: p.psi().name().to_string(),
            a: p.a(),
            nu: None,
            pressure: None,
            rho0: None,
            g: None,
        };
        match p.app() {
            Application::TubePressure { nu, pressure } => {
                doc.nu = Some(nu);
                doc.pressure = Some(pressure);
            }
            Application::Tube { nu } => doc.nu = Some(nu),
            Application::PlanarSystem { rho0, g } => {
                doc.rho0 = Some(rho0);
                doc.g = Some(g);
            }
        }
        Ok(doc)
    }

    pub fn to_spec(&self) -> CliResult<ProblemSpec> {
        let params = ProblemParams {
            nu: self.nu,
            pressure: self.pressure,
            rho0: self.rho0,
            g: self.g,
        };
        Ok(make_problem(
            parse_app(&self.app)?,
            self.alpha,
            parse_psi(&self.psi)?,
            self.a,
            params,
        )?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// `rⁿ`
    Power,
    Const,
    /// `sin(nθ)`, θ = x + y
    Sin,
    Cos,
}

/// One term `coefficient · basis · (ψ(t) − ψ(a))^β / Γ(β + 1)`, β = kα + j.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub k: u32,
    pub j: u32,
    pub basis: Basis,
    pub n: i32,
    pub coefficient: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HbarDoc {
    pub u: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDoc {
    pub version: u32,
    pub problem: ProblemDoc,
    pub hbar: HbarDoc,
    pub resummed: bool,
    /// `u[m]` lists the terms of order m.
    pub u: Vec<Vec<TermDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<Vec<TermDoc>>>,
}

fn terms_of(sum: &TermSum) -> Vec<TermDoc> {
    let mut out = Vec::new();
    for (e, sp) in sum.terms() {
        let mut push = |basis, n, coefficient: f64| {
            if coefficient != 0.0 {
                out.push(TermDoc {
                    k: e.k,
                    j: e.j,
                    basis,
                    n,
                    coefficient,
                });
            }
        };
        match sp {
            SpatialExpr::Cylindrical(l) => {
                for (n, c) in l.terms() {
                    push(Basis::Power, n, c);
                }
            }
            SpatialExpr::Planar(t) => {
                push(Basis::Const, 0, t.constant_term());
                for (k, s, c) in t.harmonics() {
                    push(Basis::Sin, k as i32, s);
                    push(Basis::Cos, k as i32, c);
                }
            }
        }
    }
    out
}

fn sum_of(terms: &[TermDoc], geometry: Geometry) -> CliResult<TermSum> {
    let mut groups: BTreeMap<TimeExponent, SpatialExpr> = BTreeMap::new();
    for t in terms {
        let e = TimeExponent { k: t.k, j: t.j };
        let slot = groups.entry(e).or_insert_with(|| SpatialExpr::zero(geometry));
        match (slot, t.basis) {
            (SpatialExpr::Cylindrical(l), Basis::Power) => l.add(t.n, t.coefficient),
            (SpatialExpr::Planar(tr), Basis::Const) if t.n == 0 => tr.add_constant(t.coefficient),
            (SpatialExpr::Planar(tr), Basis::Sin) if t.n > 0 => tr.add_sin(t.n as i64, t.coefficient),
            (SpatialExpr::Planar(tr), Basis::Cos) if t.n > 0 => tr.add_cos(t.n as i64, t.coefficient),
            _ => {
                return Err(CliError::usage(format!(
                    "term with basis {:?} and n = {} does not fit a {:?} problem",
                    t.basis, t.n, geometry
                )))
            }
        }
    }
    let mut sum = TermSum::zero(geometry);
    for (e, sp) in &groups {
        sum.add_term(*e, sp, 1.0)?;
    }
    Ok(sum)
}

impl SeriesDoc {
    pub fn from_series(problem: &ProblemSpec, hbar: Hbar, resummed: bool, s: &HamSeries) -> CliResult<Self> {
        Ok(SeriesDoc {
            version: SERIES_FORMAT_VERSION,
            problem: ProblemDoc::from_spec(problem)?,
            hbar: HbarDoc {
                u: hbar.u,
                v: problem.is_pair().then_some(hbar.v),
            },
            resummed,
            u: s.u().iter().map(terms_of).collect(),
            v: s.v().map(|v| v.iter().map(terms_of).collect()),
        })
    }

    /// Problem and series described by the document.
    pub fn to_series(&self) -> CliResult<(ProblemSpec, HamSeries)> {
        if self.version != SERIES_FORMAT_VERSION {
            return Err(CliError::usage(format!(
                "series format version {} is not supported (expected {SERIES_FORMAT_VERSION})",
                self.version
            )));
        }
        let problem = self.problem.to_spec()?;
        let geometry = problem.geometry();
        let u = self
            .u
            .iter()
            .map(|t| sum_of(t, geometry))
            .collect::<CliResult<Vec<_>>>()?;
        let v = match &self.v {
            Some(v) => Some(v.iter().map(|t| sum_of(t, geometry)).collect::<CliResult<Vec<_>>>()?),
            None => None,
        };
        let series = HamSeries::new(problem.alpha(), u, v)?;
        Ok((problem, series))
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointDoc {
    Radial { r: f64 },
    Planar { x: f64, y: f64 },
}

impl From<SpatialPoint> for PointDoc {
    fn from(p: SpatialPoint) -> Self {
        match p {
            SpatialPoint::Radial(r) => PointDoc::Radial { r },
            SpatialPoint::Planar { x, y } => PointDoc::Planar { x, y },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstDoc {
    pub point: PointDoc,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquationDoc {
    pub name: String,
    pub sup: f64,
    pub rms: f64,
    pub worst: Option<WorstDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureDoc {
    pub point: PointDoc,
    pub t: f64,
    pub error: String,
}

impl From<&PointFailure> for FailureDoc {
    fn from(f: &PointFailure) -> Self {
        FailureDoc {
            point: f.point.into(),
            t: f.t,
            error: f.error.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub problem: ProblemDoc,
    pub candidate: String,
    pub nodes: usize,
    pub points_evaluated: usize,
    pub equations: Vec<EquationDoc>,
    pub sup: f64,
    pub budget: f64,
    pub within_budget: bool,
    pub ic_max_deviation: f64,
    pub failures: Vec<FailureDoc>,
    pub tolerances_version: u32,
}

impl ReportDoc {
    pub fn new(
        problem: &ProblemSpec,
        candidate: &str,
        report: &ResidualReport,
        budget: f64,
        tolerances_version: u32,
    ) -> CliResult<Self> {
        let sup = report.sup();
        Ok(ReportDoc {
            problem: ProblemDoc::from_spec(problem)?,
            candidate: candidate.to_string(),
            nodes: report.quad.nodes,
            points_evaluated: report.points_evaluated,
            equations: report
                .equations
                .iter()
                .map(|e| EquationDoc {
                    name: e.name.to_string(),
                    sup: e.sup,
                    rms: e.rms,
                    worst: e.worst.map(|(p, t)| WorstDoc { point: p.into(), t }),
                })
                .collect(),
            sup,
            budget,
            within_budget: sup <= budget && report.failures.is_empty(),
            ic_max_deviation: report.ic_max_deviation,
            failures: report.failures.iter().map(FailureDoc::from).collect(),
            tolerances_version,
        })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let p = &self.problem;
        let _ = writeln!(s, "problem    {} alpha={} psi={} a={}", p.app, p.alpha, p.psi, p.a);
        let _ = writeln!(s, "candidate  {}", self.candidate);
        let _ = writeln!(s, "nodes      {}  points {}", self.nodes, self.points_evaluated);
        for e in &self.equations {
            let _ = write!(s, "{:<10} sup {:.3e}  rms {:.3e}", e.name, e.sup, e.rms);
            if let Some(w) = &e.worst {
                match w.point {
                    PointDoc::Radial { r } => {
                        let _ = write!(s, "  worst at r={r} t={}", w.t);
                    }
                    PointDoc::Planar { x, y } => {
                        let _ = write!(s, "  worst at x={x} y={y} t={}", w.t);
                    }
                }
            }
            s.push('\n');
        }
        let _ = writeln!(s, "ic         max deviation {:.3e}", self.ic_max_deviation);
        for f in &self.failures {
            let _ = writeln!(s, "failed     {:?} t={}: {}", f.point, f.t, f.error);
        }
        let verdict = if self.within_budget { "within" } else { "over" };
        let _ = writeln!(s, "sup-norm   {:.3e} ({verdict} budget {:.1e})", self.sup, self.budget);
        s
    }
}
