//! Cross-module properties that need the real scattering pipeline: the
//! sector extension R11, its d-bar diagnostics, and datum-level checks.

use num_complex::Complex64;
use std::sync::OnceLock;

use hnls::delta::{nu_profile, DeltaSolver};
use hnls::grid::Grid;
use hnls::phase::{dbar_bound_check, extension_r11, p11, require_two_points};
use hnls::scattering::{reflection_coefficient, uniform_z_grid, InitialDatum, ScatteringData};

fn fixture() -> &'static (ScatteringData, DeltaSolver) {
    static FIX: OnceLock<(ScatteringData, DeltaSolver)> = OnceLock::new();
    FIX.get_or_init(|| {
        let grid = Grid::new(2048, 60.0).unwrap();
        let datum = InitialDatum::sech(grid, 0.5, 1.0, 0.0, 0.0).unwrap();
        let data = reflection_coefficient(&datum, &uniform_z_grid(-8.0, 8.0, 401)).unwrap();
        let ctx = require_two_points(1.2, 0.0).unwrap();
        let solver = DeltaSolver::new(nu_profile(&data, &ctx).unwrap());
        (data, solver)
    })
}

#[test]
fn r11_boundary_values() {
    let (data, solver) = fixture();
    let ctx = solver.context();

    // on the real axis right of z1 the extension equals -conj(r)/(1-|r|^2)
    for i in 1..=6 {
        let x = ctx.z1 + 0.3 * i as f64;
        let v = extension_r11(Complex64::new(x, 0.0), data, solver).unwrap();
        assert!((v - p11(data, x)).norm() < 1e-12);
    }

    // on the ray arg(z - z1) = pi/4 the real-boundary weight vanishes and
    // the value is the analytic continuation built from delta
    let rel = Complex64::from_polar(0.4, std::f64::consts::FRAC_PI_4);
    let z = Complex64::new(ctx.z1, 0.0) + rel;
    let v = extension_r11(z, data, solver).unwrap();
    let nu1 = solver.profile().nu_z1;
    let lam = solver.lambda_at_stationary(1);
    let d = solver.delta(z).unwrap().value;
    let f11 = p11(data, ctx.z1)
        * (Complex64::new(0.0, 2.0 * lam)).exp()
        * (Complex64::new(0.0, 2.0 * nu1) * rel.ln()).exp()
        / (d * d);
    assert!((v - f11).norm() < 1e-12);

    // outside the closed sector the extension is rejected
    assert!(extension_r11(Complex64::new(ctx.z1 + 0.2, -0.1), data, solver).is_err());
    assert!(extension_r11(Complex64::new(ctx.z1 - 0.3, 0.4), data, solver).is_err());
}

#[test]
fn r11_radial_boundary_continuity() {
    let (data, solver) = fixture();
    let ctx = solver.context();
    // approach the real boundary radially: R11 -> p11(Re z)
    let x = ctx.z1 + 0.8;
    let mut prev = f64::INFINITY;
    for &h in &[1e-2, 1e-4, 1e-6] {
        let v = extension_r11(Complex64::new(x, h * 0.8), data, solver).unwrap();
        let dev = (v - p11(data, x)).norm();
        assert!(dev < prev + 1e-12);
        prev = dev;
    }
    assert!(prev < 1e-8, "radial boundary mismatch {prev:.2e}");
}

#[test]
fn r11_vanishes_for_zero_reflection() {
    let ctx = require_two_points(1.2, 0.0).unwrap();
    let nodes = uniform_z_grid(-8.0, 8.0, 201);
    let zero = ScatteringData {
        z_grid: nodes.clone(),
        s11: vec![Complex64::new(1.0, 0.0); nodes.len()],
        s21: vec![Complex64::new(0.0, 0.0); nodes.len()],
        r: vec![Complex64::new(0.0, 0.0); nodes.len()],
        sup_norm_r: 0.0,
        unimodularity_defect: 0.0,
        max_step_variation: 0.0,
    };
    let solver = DeltaSolver::new(nu_profile(&zero, &ctx).unwrap());
    for &(rho, phi) in &[(0.3, 0.2), (1.0, 0.7)] {
        let z = Complex64::new(ctx.z1, 0.0) + Complex64::from_polar(rho, phi);
        assert_eq!(extension_r11(z, &zero, &solver).unwrap().norm(), 0.0);
    }
    let rep = dbar_bound_check(&zero, &solver, 64, 1).unwrap();
    assert_eq!(rep.max_dbar_ratio, 0.0);
    assert_eq!(rep.max_amplitude_ratio, 0.0);
}

#[test]
fn dbar_bounds_hold_empirically() {
    let (data, solver) = fixture();
    let rep = dbar_bound_check(data, solver, 400, 7).unwrap();
    // the paper-shaped envelopes bound the numerics up to a uniform constant
    assert!(rep.max_dbar_ratio.is_finite() && rep.max_dbar_ratio < 10.0, "{rep:?}");
    assert!(rep.max_amplitude_ratio < 10.0, "{rep:?}");
    assert!(rep.boundary_derivative_dev < 1e-4, "{rep:?}");
}

#[test]
fn delta_boundary_is_the_off_axis_limit() {
    // delta just off the contour converges linearly (in the distance) to the
    // Plemelj boundary value, tying the PV quadrature to the Cauchy one
    let (_, solver) = fixture();
    let ctx = solver.context();
    for &s in &[ctx.z1 + 0.7, ctx.z2 - 0.9] {
        let plus = solver.delta_boundary(s, hnls::delta::Side::Plus).unwrap().value;
        let dev = |y: f64| (solver.delta(Complex64::new(s, y)).unwrap().value - plus).norm();
        let d1 = dev(1e-2);
        let d2 = dev(1e-3);
        assert!(d2 < 0.4 * d1 + 1e-12, "no convergence at {s}: {d1:.2e} -> {d2:.2e}");
        assert!(d2 < 5e-3, "far from boundary value at {s}: {d2:.2e}");
    }
}

#[test]
fn datum_norm_surrogates_finite_and_sane() {
    let grid = Grid::new(2048, 60.0).unwrap();
    let datum = InitialDatum::sech(grid, 0.5, 1.0, 0.0, 0.0).unwrap();
    let [l2, dl2, xl2] = datum.sobolev_norms();
    // closed forms: ||a sech||_2^2 = 2 a^2, ||a sech'||_2^2 = 2 a^2 / 3
    assert!((l2 * l2 - 2.0 * 0.25).abs() < 1e-10);
    assert!((dl2 * dl2 - 2.0 * 0.25 / 3.0).abs() < 1e-10);
    assert!(xl2.is_finite() && xl2 > 0.0);
}
