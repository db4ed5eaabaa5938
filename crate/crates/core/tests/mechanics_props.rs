mod support;

use proptest::prelude::*;
use support::{rel, RitzPlate, NM, UM};
use vacpack::material::Material;
use vacpack::mechanics::{
    compare_materials, flexural_rigidity, max_bending_stress, solve_plate, PlateSolver, PlateSpec,
};

const MPA: f64 = 1e6;
const GPA: f64 = 1e9;

fn plate(a: f64, b: f64, t: f64, material: Material, q: f64) -> PlateSpec {
    PlateSpec { side_a: a * UM, side_b: b * UM, thickness: t * UM, material, pressure: q }
}

fn custom(e: f64, nu: f64) -> Material {
    Material { youngs_modulus: e * GPA, poisson_ratio: nu, ..Material::lto() }
}

#[test]
fn rigidity_examples() {
    let m = custom(70.0, 0.17);
    let d = flexural_rigidity(&m, 4.5 * UM);
    let by_hand = 70e9 * (4.5e-6f64).powi(3) / (12.0 * (1.0 - 0.17 * 0.17));
    assert!(rel(d, by_hand) < 1e-12);
    assert!(rel(d, 5.47e-7) < 0.005, "{d}");
    assert!(rel(flexural_rigidity(&m, 9.0 * UM), 8.0 * d) < 1e-12);
    let m0 = custom(70.0, 0.0);
    assert_eq!(flexural_rigidity(&m0, 4.5 * UM), 70e9 * (4.5e-6f64).powi(3) / 12.0);
}

#[test]
fn unloaded_plate_stays_flat() {
    let spec = plate(30.0, 30.0, 4.5, Material::lto(), 0.0);
    let sol = solve_plate(&spec, 32).unwrap();
    assert!(sol.deflection.iter().all(|&w| w == 0.0));
    assert_eq!(max_bending_stress(&spec, &sol), 0.0);
}

#[test]
fn square_plate_matches_ritz_and_classical_coefficients() {
    let spec = plate(30.0, 30.0, 4.5, Material::lto(), 10.0 * MPA);
    let sol = solve_plate(&spec, 128).unwrap();
    let d = spec.rigidity();
    let a = spec.side_a;
    let q = spec.pressure;
    let classical = 0.00126 * q * a.powi(4) / d;
    assert!(rel(sol.w_max, classical) < 0.01, "{} vs {}", sol.w_max, classical);
    let ritz = RitzPlate::solve(a, a, 6);
    let w_ritz = ritz.w(0.0, 0.0) * q / d;
    assert!(rel(sol.w_max, w_ritz) < 0.01, "{} vs ritz {}", sol.w_max, w_ritz);
    let sigma = 0.308 * q * (a / spec.thickness).powi(2);
    assert!(rel(sol.sigma_max, sigma) < 0.02, "{} vs {}", sol.sigma_max, sigma);
    // the peak stress sits at an edge midpoint
    let (x, y) = sol.sigma_max_at;
    let on_edge_mid = |u: f64, v: f64| (u.abs() < 1e-12 || (u - a).abs() < 1e-12) && (v - a / 2.0).abs() < 1e-12;
    assert!(on_edge_mid(x, y) || on_edge_mid(y, x), "{:?}", sol.sigma_max_at);
}

#[test]
fn rectangular_plate_matches_ritz() {
    for (a, b) in [(30.0, 20.0), (40.0, 20.0)] {
        let spec = plate(a, b, 2.0, Material::lto(), 1.0 * MPA);
        let sol = solve_plate(&spec, 128).unwrap();
        let scale = spec.pressure / spec.rigidity();
        let ritz = RitzPlate::solve(a * UM, b * UM, 6);
        let w = ritz.w(0.0, 0.0) * scale;
        assert!(rel(sol.w_max, w) < 0.01, "{a}x{b}: {} vs {}", sol.w_max, w);
        // long-edge midpoint stress, M = D w_yy there
        let w_yy = RitzPlate::solve(b * UM, a * UM, 8).w_xx(-b * UM / 2.0, 0.0) * scale;
        let sigma = 6.0 * spec.rigidity() * w_yy.abs() / (spec.thickness * spec.thickness);
        assert!(rel(sol.sigma_max, sigma) < 0.03, "{a}x{b}: {} vs {}", sol.sigma_max, sigma);
    }
}

#[test]
fn grid_halving_converges() {
    let spec = plate(30.0, 30.0, 4.5, Material::lto(), 10.0 * MPA);
    let w64 = solve_plate(&spec, 64).unwrap().w_max;
    let w128 = solve_plate(&spec, 128).unwrap().w_max;
    assert!(rel(w64, w128) < 0.01);
}

#[test]
fn clamped_edges_hold() {
    let spec = plate(30.0, 24.0, 3.0, Material::lto(), 10.0 * MPA);
    let sol = solve_plate(&spec, 48).unwrap();
    let m = sol.nodes_per_side();
    for k in 0..m {
        for (i, j) in [(k, 0), (k, m - 1), (0, k), (m - 1, k)] {
            assert_eq!(sol.at(i, j), 0.0);
        }
    }
    // zero slope: the first interior row is second order small
    let centre = sol.at(m / 2, m / 2);
    assert!(sol.at(1, m / 2) < 0.02 * centre);
    let (x, y) = sol.w_max_at;
    assert!((x - 15.0 * UM).abs() < 1.0 * UM && (y - 12.0 * UM).abs() < 1.0 * UM);
}

#[test]
fn lto_and_nitride_caps_deflect_as_expected() {
    let lto = plate(30.0, 30.0, 4.5, Material::lto(), 10.0 * MPA);
    let nitride = plate(30.0, 30.0, 2.5, Material::pecvd_nitride(), 10.0 * MPA);
    let rows = compare_materials(&[lto.clone(), nitride], 128).unwrap();
    assert!(rel(rows[0].w_max, 25.0 * NM) < 0.5, "{}", rows[0].w_max);
    assert!(rel(rows[1].w_max, 36.0 * NM) < 0.5, "{}", rows[1].w_max);
    let single = compare_materials(std::slice::from_ref(&lto), 128).unwrap();
    let direct = solve_plate(&lto, 128).unwrap();
    assert_eq!(single[0].w_max, direct.w_max);
    assert_eq!(single[0].sigma_max, direct.sigma_max);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn deflection_and_stress_are_linear_in_load(q in 0.01..50.0f64, alpha in 0.01..100.0f64, t in 0.5..6.0f64, aspect in 0.5..2.0f64) {
        let solver = PlateSolver::shared(30.0 * UM, 30.0 * aspect * UM, 24).unwrap();
        let base = plate(30.0, 30.0 * aspect, t, Material::lto(), q * MPA);
        let scaled = PlateSpec { pressure: alpha * q * MPA, ..base.clone() };
        let s1 = solver.solve(&base).unwrap();
        let s2 = solver.solve(&scaled).unwrap();
        prop_assert!(rel(s2.w_max, alpha * s1.w_max) < 1e-12);
        prop_assert!(rel(s2.sigma_max, alpha * s1.sigma_max) < 1e-12);
        for (a, b) in s1.deflection.iter().zip(&s2.deflection) {
            prop_assert!((b - alpha * a).abs() <= 1e-12 * b.abs().max(1e-30));
        }
    }

    #[test]
    fn doubling_thickness_divides_deflection_by_eight(t in 0.2..5.0f64, e in 50.0..300.0f64, nu in 0.0..0.45f64) {
        let solver = PlateSolver::shared(30.0 * UM, 30.0 * UM, 24).unwrap();
        let m = custom(e, nu);
        let thin = solver.solve(&plate(30.0, 30.0, t, m.clone(), 10.0 * MPA)).unwrap();
        let thick = solver.solve(&plate(30.0, 30.0, 2.0 * t, m, 10.0 * MPA)).unwrap();
        prop_assert!(rel(thick.w_max / thin.w_max, 0.125) < 1e-3);
    }

    #[test]
    fn square_plate_field_has_full_symmetry(a in 5.0..100.0f64, n in 16usize..40, q in 0.1..20.0f64) {
        let sol = solve_plate(&plate(a, a, a / 10.0, Material::lto(), q * MPA), n).unwrap();
        let m = sol.nodes_per_side();
        let scale = sol.w_max;
        for j in 0..m {
            for i in 0..m {
                let w = sol.at(i, j);
                let images = [
                    sol.at(m - 1 - i, j),
                    sol.at(i, m - 1 - j),
                    sol.at(m - 1 - i, m - 1 - j),
                    sol.at(j, i),
                    sol.at(m - 1 - j, i),
                    sol.at(j, m - 1 - i),
                    sol.at(m - 1 - j, m - 1 - i),
                ];
                for v in images {
                    prop_assert!((w - v).abs() <= 1e-6 * scale);
                }
            }
        }
    }
}
