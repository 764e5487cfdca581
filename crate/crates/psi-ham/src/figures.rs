//! Presets reproducing the data behind the six published figures.
//!
//! All use ψ = ln t and a = 1. Figures 3 and 4 plot the four-term tube
//! series; the caption of Figure 4 names the first problem's closed form, but
//! the plotted data are the tube series, which is what is exported here.

use psi_ham_core::{make_problem, AppKind, ProblemParams, PsiSpec};

use crate::error::{CliError, CliResult};
use crate::table::{Axis, EvalRequest, Source};

pub const FIGURE_IDS: [u8; 6] = [1, 2, 3, 4, 5, 6];
// the figures stop at 6.283, not at 2π
#[allow(clippy::approx_constant)]
const TWO_PI: f64 = 6.283;

pub fn figure_request(id: u8) -> CliResult<EvalRequest> {
    let log = PsiSpec::logarithm();
    let tube_pressure = ProblemParams {
        nu: Some(1.0),
        pressure: Some(1.0),
        ..Default::default()
    };
    let tube = ProblemParams {
        nu: Some(1.0),
        ..Default::default()
    };
    let planar = ProblemParams {
        rho0: Some(1.0),
        g: Some(0.0),
        ..Default::default()
    };
    let (kind, params, alphas, axes, terms) = match id {
        1 => (
            AppKind::TubePressure,
            tube_pressure,
            vec![1.0, 0.8, 0.5],
            vec![Axis::range("r", 0.0, 1.0, 41)?, Axis::range("t", 1.0, 5.0, 41)?],
            1,
        ),
        2 => (
            AppKind::TubePressure,
            tube_pressure,
            vec![1.0, 0.8, 0.5],
            vec![Axis::fixed("r", 0.1), Axis::range("t", 1.0, 5.0, 100)?],
            1,
        ),
        3 => (
            AppKind::Tube,
            tube,
            vec![1.0, 0.75, 0.5],
            vec![Axis::range("r", 0.5, 2.0, 31)?, Axis::range("t", 1.0, 2.0, 31)?],
            4,
        ),
        4 => (
            AppKind::Tube,
            tube,
            vec![1.0, 0.75, 0.5],
            vec![Axis::fixed("r", 0.1), Axis::range("t", 1.0, 5.0, 100)?],
            4,
        ),
        5 => (
            AppKind::PlanarSystem,
            planar,
            vec![1.0, 0.7, 0.4],
            vec![
                Axis::range("x", 0.0, TWO_PI, 41)?,
                Axis::range("y", 0.0, TWO_PI, 41)?,
                Axis::fixed("t", 2.0),
            ],
            1,
        ),
        6 => (
            AppKind::PlanarSystem,
            planar,
            vec![1.0, 0.7, 0.4],
            vec![
                Axis::range("x", 0.0, TWO_PI, 100)?,
                Axis::fixed("y", 0.2),
                Axis::fixed("t", 2.0),
            ],
            1,
        ),
        other => return Err(CliError::usage(format!("figure {other} does not exist (1-6)"))),
    };
    Ok(EvalRequest {
        problem: make_problem(kind, alphas[0], log, 1.0, params)?,
        axes,
        alphas,
        source: Source::Exact { terms },
    })
}

pub fn figure_file_name(id: u8) -> String {
    format!("figure{id}.csv")
}
