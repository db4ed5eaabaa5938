mod support;

use proptest::prelude::*;
use support::{rel, rigidity_matched_thickness, scan_min_thickness, NM, UM};
use vacpack::designer::{
    equivalent_thickness, equivalent_thickness_with, min_cap_thickness, min_cap_thickness_with, CapEvaluator,
    DesignConstraints, MatchMode, THICKNESS_STEP,
};
use vacpack::material::Material;
use vacpack::Error;

const MPA: f64 = 1e6;
const GPA: f64 = 1e9;

fn small_grid(max_deflection: f64, pressure: f64) -> DesignConstraints {
    DesignConstraints { max_deflection, pressure, grid_n: 16, ..DesignConstraints::molding_default() }
}

fn custom(e: f64, nu: f64, failure: f64) -> Material {
    Material { youngs_modulus: e * GPA, poisson_ratio: nu, failure_stress: failure * MPA, ..Material::lto() }
}

#[test]
fn lto_cap_for_25nm_matches_grid_scan() {
    let c = DesignConstraints::molding_default();
    let lto = Material::lto();
    let eval = CapEvaluator::new(&c).unwrap();
    let t = min_cap_thickness_with(&eval, &lto).unwrap();
    assert!(rel(t, 4.5 * UM) < 0.5, "{t}");
    let scanned = scan_min_thickness(c.t_min, c.t_max, 10.0 * NM, |t| eval.feasible(&lto, t).unwrap()).unwrap();
    assert_eq!(t, scanned);
    assert!(eval.violations(&lto, t).unwrap().is_empty());
    assert!(!eval.violations(&lto, t - 50.0 * NM).unwrap().is_empty());
}

#[test]
fn unconstrained_design_returns_the_lower_bound() {
    let c = DesignConstraints { max_deflection: f64::INFINITY, ..small_grid(1.0, 10.0 * MPA) };
    let strong = custom(70.0, 0.17, 1e12);
    assert_eq!(min_cap_thickness(&strong, &c).unwrap(), c.t_min);
}

#[test]
fn infeasible_design_reports_both_limits() {
    let c = DesignConstraints { t_max: 1.0 * UM, safety_factor: 1.0, ..small_grid(1.0 * NM, 10.0 * MPA) };
    let weak = custom(70.0, 0.17, 1.0);
    match min_cap_thickness(&weak, &c) {
        Err(Error::Infeasible { violations, .. }) => assert_eq!(violations.len(), 2, "{violations:?}"),
        other => panic!("expected infeasible, got {other:?}"),
    }
}

#[test]
fn lto_cap_maps_to_thinner_nitride() {
    let c = DesignConstraints::molding_default();
    let t = equivalent_thickness(&Material::lto(), 4.5 * UM, &Material::pecvd_nitride(), &c, MatchMode::Deflection)
        .unwrap();
    assert!(rel(t, 2.5 * UM) < 0.4, "{t}");
    let by_margin =
        equivalent_thickness(&Material::lto(), 4.5 * UM, &Material::pecvd_nitride(), &c, MatchMode::FailureMargin)
            .unwrap();
    assert!(by_margin < t);
}

#[test]
fn equivalence_with_itself_is_identity() {
    let c = small_grid(25.0 * NM, 10.0 * MPA);
    let lto = Material::lto();
    for mode in [MatchMode::Deflection, MatchMode::FailureMargin] {
        assert_eq!(equivalent_thickness(&lto, 3.7 * UM, &lto, &c, mode).unwrap(), 3.7 * UM);
    }
}

#[test]
fn equivalence_matches_rigidity_closed_form() {
    let c = DesignConstraints::molding_default();
    let a = custom(70.0, 0.2, 2000.0);
    let b = custom(250.0, 0.2, 9000.0);
    let t = equivalent_thickness(&a, 4.5 * UM, &b, &c, MatchMode::Deflection).unwrap();
    let closed = 4.5 * UM * (70.0f64 / 250.0).cbrt();
    assert!(rel(t, closed) < 0.005, "{t} vs {closed}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn design_is_monotone_in_load_and_budget(w in 5.0..200.0f64, dw in 0.0..100.0f64, q in 1.0..20.0f64, dq in 0.0..10.0f64) {
        let lto = Material::lto();
        let base = min_cap_thickness(&lto, &small_grid(w * NM, q * MPA));
        let looser = min_cap_thickness(&lto, &small_grid((w + dw) * NM, q * MPA));
        let heavier = min_cap_thickness(&lto, &small_grid(w * NM, (q + dq) * MPA));
        match (base, looser, heavier) {
            (Ok(t), Ok(tl), Ok(th)) => {
                prop_assert!(tl <= t);
                prop_assert!(th >= t);
            }
            (Ok(_), Ok(_), Err(Error::Infeasible { .. })) => {}
            (Err(Error::Infeasible { .. }), _, Err(Error::Infeasible { .. })) => {}
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }

    #[test]
    fn design_is_minimal(w in 5.0..200.0f64, q in 1.0..20.0f64, e in 50.0..300.0f64, nu in 0.0..0.4f64) {
        let m = custom(e, nu, 2000.0);
        let eval = CapEvaluator::new(&small_grid(w * NM, q * MPA)).unwrap();
        if let Ok(t) = min_cap_thickness_with(&eval, &m) {
            prop_assert!(eval.feasible(&m, t).unwrap());
            if t - THICKNESS_STEP >= eval.lattice()[0] {
                prop_assert!(!eval.feasible(&m, t - THICKNESS_STEP).unwrap());
            }
            if t - 50.0 * NM >= 0.5 * UM {
                prop_assert!(!eval.feasible(&m, t - 50.0 * NM).unwrap());
            }
        }
    }

    #[test]
    fn equivalence_is_an_involution(t_a in 1.0..8.0f64, e_a in 50.0..300.0f64, e_b in 50.0..300.0f64, nu_a in 0.0..0.4f64, nu_b in 0.0..0.4f64, fa in 500.0..9000.0f64, fb in 500.0..9000.0f64) {
        let a = custom(e_a, nu_a, fa);
        let b = custom(e_b, nu_b, fb);
        let c = DesignConstraints { t_min: 0.1 * UM, t_max: 50.0 * UM, ..small_grid(25.0 * NM, 10.0 * MPA) };
        let eval = CapEvaluator::new(&c).unwrap();
        for mode in [MatchMode::Deflection, MatchMode::FailureMargin] {
            let t_b = equivalent_thickness_with(&eval, &a, t_a * UM, &b, mode).unwrap();
            let back = equivalent_thickness_with(&eval, &b, t_b, &a, mode).unwrap();
            prop_assert!(rel(back, t_a * UM) < 0.01);
        }
        let t_b = equivalent_thickness_with(&eval, &a, t_a * UM, &b, MatchMode::Deflection).unwrap();
        let closed = rigidity_matched_thickness(e_a, nu_a, t_a * UM, e_b, nu_b);
        prop_assert!(rel(t_b, closed) < 0.005);
    }
}
