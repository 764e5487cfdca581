use proptest::prelude::*;
use psi_ham_core::verify::{residual_norm, Candidate, GridSpec, QuadParams, SpatialGrid};
use psi_ham_core::{
    exact_solution, gamma_eval, ham_series, make_problem, resum_geometric, series_eval, AppKind, HamConfig, Hbar,
    ProblemParams, ProblemSpec, PsiSpec, SpatialPoint, TermSum, TimeExponent,
};

fn tube_pressure(alpha: f64, nu: f64, pressure: f64, psi: PsiSpec, a: f64) -> ProblemSpec {
    let p = ProblemParams {
        nu: Some(nu),
        pressure: Some(pressure),
        ..Default::default()
    };
    make_problem(AppKind::TubePressure, alpha, psi, a, p).unwrap()
}

fn tube(alpha: f64, nu: f64, psi: PsiSpec, a: f64) -> ProblemSpec {
    let p = ProblemParams {
        nu: Some(nu),
        ..Default::default()
    };
    make_problem(AppKind::Tube, alpha, psi, a, p).unwrap()
}

fn planar(alpha: f64, rho0: f64, g: f64, psi: PsiSpec, a: f64) -> ProblemSpec {
    let p = ProblemParams {
        rho0: Some(rho0),
        g: Some(g),
        ..Default::default()
    };
    make_problem(AppKind::PlanarSystem, alpha, psi, a, p).unwrap()
}

fn max_gap(x: &[TermSum], y: &[TermSum]) -> f64 {
    assert_eq!(x.len(), y.len());
    x.iter()
        .zip(y)
        .map(|(a, b)| a.max_deviation(b).unwrap())
        .fold(0.0, f64::max)
}

fn problems(alpha: f64, nu: f64, pressure: f64, rho0: f64, g: f64) -> [ProblemSpec; 3] {
    [
        tube_pressure(alpha, nu, pressure, PsiSpec::logarithm(), 1.0),
        tube(alpha, nu, PsiSpec::identity(), 0.0),
        planar(alpha, rho0, g, PsiSpec::logarithm(), 1.0),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn resummation_is_hbar_independent(alpha in 0.1f64..=1.0, nu in 0.1f64..3.0, pressure in -3.0f64..3.0,
                                       rho0 in 0.1f64..2.0, g in -1.0f64..1.0) {
        for prob in problems(alpha, nu, pressure, rho0, g) {
            let base = resum_geometric(&prob, Hbar::uniform(-1.0), 5).unwrap();
            for h in [-0.5, -1.5] {
                let other = resum_geometric(&prob, Hbar::uniform(h), 5).unwrap();
                let scale = base.u().iter().map(|s| s.max_deviation(&TermSum::zero(s.geometry())).unwrap()).fold(1.0, f64::max);
                prop_assert!(max_gap(base.u(), other.u()) <= 1e-12 * scale);
                if let (Some(a), Some(b)) = (base.v(), other.v()) {
                    prop_assert!(max_gap(a, b) <= 1e-12 * scale);
                }
            }
        }
    }

    #[test]
    fn adm_series_equals_resummed_series(alpha in 0.1f64..=1.0, nu in 0.1f64..3.0, pressure in -3.0f64..3.0,
                                         rho0 in 0.1f64..2.0, g in -1.0f64..1.0, m in 1usize..7) {
        for prob in problems(alpha, nu, pressure, rho0, g) {
            let adm = ham_series(&prob, &HamConfig::new(-1.0, m)).unwrap();
            let closed = resum_geometric(&prob, Hbar::uniform(-0.5), m).unwrap();
            prop_assert!(max_gap(adm.u(), closed.u()) <= 1e-9);
            if let (Some(a), Some(b)) = (adm.v(), closed.v()) {
                prop_assert!(max_gap(a, b) <= 1e-9);
            }
        }
    }

    #[test]
    fn truncated_series_keeps_initial_data(alpha in 0.1f64..=1.0, h in -1.9f64..-0.1, m in 0usize..6,
                                           r in 0.1f64..2.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        for prob in problems(alpha, 1.3, 0.7, 0.8, 0.4) {
            let s = ham_series(&prob, &HamConfig::new(h, m)).unwrap();
            let pt = if prob.is_pair() { SpatialPoint::Planar { x, y } } else { SpatialPoint::Radial(r) };
            let (u0, v0) = prob.initial_data();
            for used in 0..=m {
                let got = series_eval(&s, prob.psi(), prob.a(), pt, prob.a(), used).unwrap();
                prop_assert_eq!(got.u, u0.eval(pt, alpha, 0.0).unwrap());
                if let Some(v0) = &v0 {
                    prop_assert_eq!(got.v.unwrap(), v0.eval(pt, alpha, 0.0).unwrap());
                }
            }
        }
    }

    #[test]
    fn equal_hbar_makes_planar_components_opposite(alpha in 0.1f64..=1.0, h in -1.9f64..-0.1,
                                                   rho0 in 0.1f64..2.0, g in -1.0f64..1.0) {
        let prob = planar(alpha, rho0, g, PsiSpec::identity(), 0.0);
        let s = ham_series(&prob, &HamConfig::new(h, 5)).unwrap();
        for (u, v) in s.u().iter().zip(s.v().unwrap()) {
            prop_assert_eq!(u.scaled(-1.0), v.clone());
        }
    }

    #[test]
    fn forcing_enters_only_at_first_order(alpha in 0.1f64..=1.0, h in -1.9f64..-0.1, pressure in -3.0f64..3.0, g in -1.0f64..1.0) {
        // the difference made by the forcing is exactly the first-order forcing carried by (1 + ħ)
        let with = ham_series(&tube_pressure(alpha, 1.0, pressure, PsiSpec::identity(), 0.0), &HamConfig::new(h, 5)).unwrap();
        let without = ham_series(&tube_pressure(alpha, 1.0, 0.0, PsiSpec::identity(), 0.0), &HamConfig::new(h, 5)).unwrap();
        for m in 1..=5 {
            let mut diff = with.u()[m].clone();
            diff.add_scaled(&without.u()[m], -1.0).unwrap();
            let want = -(1.0 + h).powi(m as i32 - 1) * h * pressure;
            let c = diff.term(TimeExponent::alpha_multiple(1)).map(|e| e.as_laurent().unwrap().coefficient(0)).unwrap_or(0.0);
            prop_assert!((c - want).abs() <= 1e-12 * (1.0 + want.abs()));
            prop_assert_eq!(diff.terms().count(), usize::from(want != 0.0));
        }
        let pl = |g| ham_series(&planar(alpha, 1.0, g, PsiSpec::identity(), 0.0), &HamConfig::new(-1.0, 5)).unwrap();
        let s = pl(g);
        for m in 2..=5 {
            for (_, e) in s.u()[m].terms() {
                prop_assert_eq!(e.as_trig().unwrap().constant_term(), 0.0);
            }
        }
    }

    #[test]
    fn planar_components_cancel_without_gradient(alpha in 0.25f64..=1.0, x in -5.0f64..5.0, y in -5.0f64..5.0, t in 1.0f64..3.0) {
        let prob = planar(alpha, 1.0, 0.0, PsiSpec::logarithm(), 1.0);
        let v = exact_solution(&prob, SpatialPoint::Planar { x, y }, t, 0).unwrap();
        prop_assert!((v.u + v.v.unwrap()).abs() <= 1e-15);
    }
}

#[test]
fn general_evaluator_reduces_to_special_cases() {
    let g = |x: f64| gamma_eval(x).unwrap();
    for alpha in [0.3, 0.5, 0.8, 1.0] {
        for pressure in [1.0, -2.0] {
            let id = tube_pressure(alpha, 1.0, pressure, PsiSpec::identity(), 0.0);
            let lg = tube_pressure(alpha, 1.0, pressure, PsiSpec::logarithm(), 1.0);
            for r in [0.1, 0.5, 0.9] {
                for t in [0.0f64, 0.3, 1.0, 2.5] {
                    let want = 1.0 - r * r + (pressure - 4.0) * t.powf(alpha) / g(alpha + 1.0);
                    let got = exact_solution(&id, SpatialPoint::Radial(r), t, 0).unwrap().u;
                    assert!((got - want).abs() <= 1e-12);
                    let tl = 1.0 + t;
                    let want = 1.0 - r * r + (pressure - 4.0) * tl.ln().powf(alpha) / g(alpha + 1.0);
                    let got = exact_solution(&lg, SpatialPoint::Radial(r), tl, 0).unwrap().u;
                    assert!((got - want).abs() <= 1e-12);
                }
            }
        }
        let id = tube(alpha, 1.0, PsiSpec::identity(), 0.0);
        let lg = tube(alpha, 1.0, PsiSpec::logarithm(), 1.0);
        for r in [0.5f64, 1.0, 2.0] {
            for t in [0.1f64, 0.4] {
                let a = alpha;
                let want = r
                    + t.powf(a) / (r * g(a + 1.0))
                    + t.powf(2.0 * a) / (r.powi(3) * g(2.0 * a + 1.0))
                    + 9.0 * t.powf(3.0 * a) / (r.powi(5) * g(3.0 * a + 1.0))
                    + 225.0 * t.powf(4.0 * a) / (r.powi(7) * g(4.0 * a + 1.0));
                let got = exact_solution(&id, SpatialPoint::Radial(r), t, 4).unwrap().u;
                assert!((got - want).abs() <= 1e-12 * want.abs());
                let got = exact_solution(&lg, SpatialPoint::Radial(r), t.exp(), 4).unwrap().u;
                assert!((got - want).abs() <= 1e-12 * want.abs());
            }
        }
    }
}

#[test]
fn resummed_tube_pressure_in_classical_limit() {
    let prob = tube_pressure(1.0, 1.0, 1.0, PsiSpec::identity(), 0.0);
    let s = resum_geometric(&prob, Hbar::uniform(-0.5), 4).unwrap();
    let v = series_eval(&s, prob.psi(), 0.0, SpatialPoint::Radial(0.1), 1.0, 4).unwrap();
    assert!((v.u - (-2.01)).abs() < 1e-13);
}

fn tube_residual(alpha: f64, r: (f64, f64), s_max: f64, k: usize) -> f64 {
    let prob = tube(alpha, 1.0, PsiSpec::identity(), 0.0);
    let grid = GridSpec {
        spatial: SpatialGrid::Radial {
            r_min: r.0,
            r_max: r.1,
            n_r: 8,
        },
        eps: 0.01,
        t_max: s_max,
        n_t: 6,
    };
    let rep = residual_norm(&prob, &Candidate::exact(&prob, k), &grid, QuadParams { nodes: 1024 }).unwrap();
    rep.sup()
}

#[test]
fn tube_residual_does_not_grow_with_more_terms() {
    // the coefficients grow like ((2k-3)!!)^2, so the series is asymptotic and
    // the terms only shrink over K = 2..6 once r is large against s
    let mut prev = f64::INFINITY;
    for k in 2..=6 {
        let sup = tube_residual(1.0, (3.0, 5.0), 0.2, k);
        assert!(sup <= prev, "K = {k}: {sup} > {prev}");
        prev = sup;
    }
}

#[test]
fn tube_series_is_asymptotic_near_the_axis() {
    // at r = 0.5 the truncation residual grows with K even for s <= 0.2
    let small = tube_residual(0.5, (0.5, 2.0), 0.2, 2);
    let large = tube_residual(0.5, (0.5, 2.0), 0.2, 6);
    assert!(large > 1e3 * small);
}

#[test]
fn residual_shrinks_under_node_doubling() {
    for alpha in [0.3, 0.5, 0.9] {
        let prob = tube_pressure(alpha, 1.0, 1.0, PsiSpec::logarithm(), 1.0);
        let grid = GridSpec {
            spatial: SpatialGrid::Radial {
                r_min: 0.1,
                r_max: 1.0,
                n_r: 5,
            },
            eps: 0.05,
            t_max: 3.0,
            n_t: 8,
        };
        let c = Candidate::exact(&prob, 0);
        let sup = |n| residual_norm(&prob, &c, &grid, QuadParams { nodes: n }).unwrap().sup();
        let ratio = sup(512) / sup(1024);
        assert!(ratio >= 2f64.powf(1.0 - alpha) * 0.8, "alpha {alpha}: ratio {ratio}");
    }
}
