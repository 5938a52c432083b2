//! Acceptance suite: one numbered check per gate criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them as they complete).
//! Criterion 8 (byte-identical reruns of the compare command) lives in the
//! CLI crate's integration tests next to the binary.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hnls::akns::{plane_wave_omega, residual_system3, AknsParams, FieldPair, Reduction};
use hnls::asymptotics::{beta12, AsymOptions, Convention, RayAsymptotics};
use hnls::delta::{nu_profile, DeltaSolver, Side};
use hnls::gamma::gamma;
use hnls::grid::{Grid, C64};
use hnls::harness::{build_ray_report, compare_along_ray, log_spaced_times, trust_window};
use hnls::pde::{evolve, EvolutionConfig};
use hnls::phase::{require_two_points, stationary_points, StationaryPoints};
use hnls::scattering::{born_s21, jost_scattering, reflection_coefficient, uniform_z_grid, InitialDatum};

fn report(criterion: u32, name: &str, outcome: Result<String, String>) -> bool {
    match outcome {
        Ok(detail) => {
            println!("criterion {criterion} [{name}]: PASS ({detail})");
            true
        }
        Err(detail) => {
            println!("criterion {criterion} [{name}]: FAIL ({detail})");
            false
        }
    }
}

// 1. Reduction fidelity: KdV, mKdV, NLS exact solitons under the system
//    presets, residual < 1e-6 in max norm at N = 2048, L = 60.
#[test]
fn criterion_1_reduction_fidelity() {
    let grid = Grid::new(2048, 60.0).unwrap();
    let dt = 1e-3;
    let run = |red: Reduction, profile: &dyn Fn(f64, f64) -> C64| -> f64 {
        let snaps: Vec<FieldPair> = [-dt, 0.0, dt]
            .iter()
            .map(|&t| {
                let q: Vec<C64> = grid.xs().iter().map(|&x| profile(x, t)).collect();
                FieldPair::from_q(grid, q, red).unwrap()
            })
            .collect();
        let (rq, rr) =
            residual_system3(&snaps[0], &snaps[1], &snaps[2], dt, &red.params()).unwrap();
        rq.iter().chain(&rr).map(|v| v.norm()).fold(0.0, f64::max)
    };

    let c: f64 = 1.0;
    let kdv = run(Reduction::Kdv, &|x, t| {
        C64::new(c / 2.0 / (c.sqrt() * (x - c * t) / 2.0).cosh().powi(2), 0.0)
    });
    let mkdv = run(Reduction::Mkdv, &|x, t| {
        C64::new(c.sqrt() / (c.sqrt() * (x - c * t)).cosh(), 0.0)
    });
    let nls = run(Reduction::Nls, &|x, t| {
        Complex64::from_polar(1.0 / x.cosh(), t)
    });

    let worst = kdv.max(mkdv).max(nls);
    let ok = report(
        1,
        "reduction fidelity",
        if worst < 1e-6 {
            Ok(format!("KdV {kdv:.2e}, mKdV {mkdv:.2e}, NLS {nls:.2e}"))
        } else {
            Err(format!("max residual {worst:.2e} >= 1e-6"))
        },
    );
    assert!(ok);
}

// 2. Plane-wave dispersion through the evolver: A e^{i(kx - w t)} with the
//    hand-derived w(k, A) reproduced to 1e-8 at T = 1.
#[test]
fn criterion_2_plane_wave_dispersion() {
    let grid = Grid::new(256, 16.0 * std::f64::consts::PI).unwrap();
    let (a, k) = (0.5, 2.0);
    let omega = plane_wave_omega(k, a);
    let q0: Vec<C64> = grid.xs().iter().map(|&x| Complex64::from_polar(a, k * x)).collect();
    let mut cfg = EvolutionConfig::new(grid, 1e-3, 1.0, Reduction::Hnls);
    cfg.edge_tolerance = None;
    cfg.mass_tolerance = 1e-9;
    let out = evolve(&q0, &cfg).unwrap();
    let got = &out.snapshot_at(1.0).unwrap().q;
    let mut worst = 0.0f64;
    for (&x, g) in grid.xs().iter().zip(got) {
        worst = worst.max((g - Complex64::from_polar(a, k * x - omega)).norm());
    }
    let ok = report(
        2,
        "plane-wave dispersion",
        if worst < 1e-8 {
            Ok(format!("max deviation {worst:.2e}, omega = {omega}"))
        } else {
            Err(format!("max deviation {worst:.2e} >= 1e-8"))
        },
    );
    assert!(ok);
}

// 3. Scattering unimodularity on a 201-node z-grid for sech and Gaussian
//    data (1e-8), plus first-order Born linearity at eps <= 1e-3 to 1e-4.
#[test]
fn criterion_3_scattering() {
    let zs = uniform_z_grid(-8.0, 8.0, 201);

    let sech_grid = Grid::new(4096, 60.0).unwrap();
    let sech = InitialDatum::sech(sech_grid, 1.0, 1.0, 0.0, 0.0).unwrap();
    let d1 = reflection_coefficient(&sech, &zs).unwrap();

    let gauss_grid = Grid::new(4096, 40.0).unwrap();
    let gauss = InitialDatum::gaussian(gauss_grid, 0.5, 1.0, 0.0, 0.0).unwrap();
    let d2 = reflection_coefficient(&gauss, &zs).unwrap();

    let defect = d1.unimodularity_defect.max(d2.unimodularity_defect);

    // Born: the ODE amplitude at eps = 1e-3 matches the independent
    // quadrature of the first Born integral, and doubling eps doubles r
    let eps = 1e-3;
    let small = InitialDatum::sech(sech_grid, eps, 1.0, 0.0, 0.0).unwrap();
    let z = 0.5;
    let (_, s21) = jost_scattering(&small, z).unwrap();
    let born = born_s21(&small, z);
    let born_rel = (s21.norm() / born.norm() - 1.0).abs();

    let small2 = InitialDatum::sech(sech_grid, 2.0 * eps, 1.0, 0.0, 0.0).unwrap();
    let r1 = {
        let (a, b) = jost_scattering(&small, z).unwrap();
        (b / a).norm()
    };
    let r2 = {
        let (a, b) = jost_scattering(&small2, z).unwrap();
        (b / a).norm()
    };
    let lin_rel = (r2 / (2.0 * r1) - 1.0).abs();

    let ok = report(
        3,
        "scattering unimodularity + Born",
        if defect < 1e-8 && born_rel < 1e-4 && lin_rel < 1e-4 {
            Ok(format!(
                "defect {defect:.2e}, Born dev {born_rel:.2e}, linearity dev {lin_rel:.2e}"
            ))
        } else {
            Err(format!(
                "defect {defect:.2e}, Born dev {born_rel:.2e}, linearity dev {lin_rel:.2e}"
            ))
        },
    );
    assert!(ok);
}

// 4. delta suite: jump ratio on Upsilon (1e-6), Schwarz identity (1e-8),
//    modulus bounds, and the factored reconstruction at 50 points (1e-6).
#[test]
fn criterion_4_delta_suite() {
    let grid = Grid::new(2048, 60.0).unwrap();
    let datum = InitialDatum::sech(grid, 0.5, 1.0, 0.0, 0.0).unwrap();
    let zs = uniform_z_grid(-8.0, 8.0, 401);
    let data = reflection_coefficient(&datum, &zs).unwrap();
    let ctx = require_two_points(1.2, 0.0).unwrap();
    let solver = DeltaSolver::new(nu_profile(&data, &ctx).unwrap());

    let mut jump_dev = 0.0f64;
    for &s in data
        .z_grid
        .iter()
        .filter(|&&s| (s > -7.0 && s < ctx.z2 - 0.05) || (s > ctx.z1 + 0.05 && s < 7.0))
        .step_by(17)
    {
        let plus = solver.delta_boundary(s, Side::Plus).unwrap().value;
        let minus = solver.delta_boundary(s, Side::Minus).unwrap().value;
        jump_dev = jump_dev.max((plus / minus - (1.0 - data.abs_r_sq_at(s))).norm());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut schwarz_dev = 0.0f64;
    let mut bounds_ok = true;
    let mut recon_dev = 0.0f64;
    let (lo, hi) = solver.modulus_bounds();
    for _ in 0..50 {
        let z = Complex64::new(
            rng.gen_range(-2.5..2.5),
            rng.gen_range(0.05..1.5) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
        );
        let direct = solver.delta(z).unwrap().value;
        schwarz_dev = schwarz_dev
            .max((direct * solver.delta(z.conj()).unwrap().value.conj() - 1.0).norm());
        let m = direct.norm();
        bounds_ok &= m >= lo * (1.0 - 1e-6) && m <= hi * (1.0 + 1e-6);
        for j in [1, 2] {
            recon_dev = recon_dev.max((direct - solver.delta_from_lambda(z, j).unwrap()).norm());
        }
    }

    let ok = report(
        4,
        "delta function suite",
        if jump_dev < 1e-6 && schwarz_dev < 1e-8 && bounds_ok && recon_dev < 1e-6 {
            Ok(format!(
                "jump {jump_dev:.2e}, schwarz {schwarz_dev:.2e}, reconstruction {recon_dev:.2e}"
            ))
        } else {
            Err(format!(
                "jump {jump_dev:.2e}, schwarz {schwarz_dev:.2e}, bounds ok {bounds_ok}, reconstruction {recon_dev:.2e}"
            ))
        },
    );
    assert!(ok);
}

// 5. Parabolic-cylinder constants: |beta12|^2 = nu to 1e-10 and the
//    displayed arg relation for the first closed form, randomized over
//    nu in (0, 0.5].
#[test]
fn criterion_5_parabolic_cylinder_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut mod_dev = 0.0f64;
    let mut arg_dev = 0.0f64;
    let wrap = |x: f64| {
        let mut v = x % (2.0 * std::f64::consts::PI);
        if v > std::f64::consts::PI {
            v -= 2.0 * std::f64::consts::PI;
        }
        if v < -std::f64::consts::PI {
            v += 2.0 * std::f64::consts::PI;
        }
        v
    };
    for _ in 0..200 {
        let nu = rng.gen_range(1e-4..0.5f64);
        let r_abs = (1.0 - (-2.0 * std::f64::consts::PI * nu).exp()).sqrt();
        let r = Complex64::from_polar(r_abs, rng.gen_range(-3.1..3.1));
        for j in [1usize, 2] {
            mod_dev = mod_dev.max((beta12(j, r, nu).norm_sqr() - nu).abs());
        }
        let b1 = beta12(1, r, nu);
        let expect = std::f64::consts::FRAC_PI_4 - r.arg() - gamma(Complex64::new(0.0, -nu)).arg();
        arg_dev = arg_dev.max(wrap(b1.arg() - expect).abs());
    }
    let ok = report(
        5,
        "parabolic-cylinder constants",
        if mod_dev < 1e-10 && arg_dev < 1e-10 {
            Ok(format!("|b|^2-nu dev {mod_dev:.2e}, arg dev {arg_dev:.2e}"))
        } else {
            Err(format!("|b|^2-nu dev {mod_dev:.2e}, arg dev {arg_dev:.2e}"))
        },
    );
    assert!(ok);
}

// 6. End-to-end asymptotics (smoke variant): eps = 0.3 sech, xi = 1.2,
//    t in [20, 60]. |q_num| decays with slope -0.5 +- 0.1 and the error
//    envelope of exactly one branch convention fits slope <= -0.65; the
//    passing convention is recorded in the output line.
#[test]
fn criterion_6_end_to_end_asymptotics_smoke() {
    let eps = 0.3;
    let xi = 1.2;

    let sgrid = Grid::new(4096, 60.0).unwrap();
    let datum = InitialDatum::sech(sgrid, eps, 1.0, 0.0, 0.0).unwrap();
    let data = reflection_coefficient(&datum, &uniform_z_grid(-8.0, 8.0, 801)).unwrap();

    let egrid = Grid::new(8192, 960.0).unwrap();
    let edatum = InitialDatum::sech(egrid, eps, 1.0, 0.0, 0.0).unwrap();
    let dt = 1e-3;
    let t_list = log_spaced_times(20.0, 60.0, 25, dt);
    let mut cfg = EvolutionConfig::new(egrid, dt, 60.0, Reduction::Hnls);
    cfg.snapshot_times = t_list.clone();
    cfg.frame_velocity = xi;
    cfg.edge_tolerance = None;
    let evo = evolve(&edatum.samples, &cfg).unwrap();
    let t_trust = trust_window(&edatum.samples, egrid, xi, xi, 1e-4);

    let mut slopes = Vec::new();
    let mut q_slope = 0.0;
    for conv in [Convention::A, Convention::B] {
        let opts = AsymOptions { convention: conv, t_min: 10.0, xi_margin: 0.05 };
        let ray = RayAsymptotics::prepare(&data, xi, &opts).unwrap();
        let rows = compare_along_ray(&evo, &ray, &t_list, t_trust).unwrap();
        let rep = build_ray_report(xi, conv, t_trust, &rows, 1.3).unwrap();
        q_slope = rep.fit_abs_q.slope;
        slopes.push((conv, rep.fit_error_envelope.slope));
    }

    let passing: Vec<&(Convention, f64)> = slopes.iter().filter(|(_, s)| *s <= -0.65).collect();
    let slope_ok = (q_slope + 0.5).abs() <= 0.1;
    let ok = report(
        6,
        "end-to-end asymptotics (smoke)",
        if slope_ok && passing.len() == 1 {
            Ok(format!(
                "|q_num| slope {q_slope:.3}; envelope slopes {:?}; passing convention: {}",
                slopes
                    .iter()
                    .map(|(c, s)| format!("{c}: {s:.3}"))
                    .collect::<Vec<_>>(),
                passing[0].0
            ))
        } else {
            Err(format!(
                "|q_num| slope {q_slope:.3} (need -0.5 +- 0.1); envelope slopes {:?} (need exactly one <= -0.65)",
                slopes.iter().map(|(c, s)| format!("{c}: {s:.3}")).collect::<Vec<_>>()
            ))
        },
    );
    assert!(ok);
}

// 7. Phase geometry: the closed-form stationary points agree with an
//    independent root-finder to 1e-12 for 100 random xi > 2/3, and the
//    trichotomy produces the typed degenerate/none outcomes.
#[test]
fn criterion_7_phase_geometry() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let xi = rng.gen_range(2.0 / 3.0 + 1e-3..10.0);
        let ctx = require_two_points(xi, 0.0).unwrap();
        for (j, guess) in [(1usize, 2.0), (2usize, -2.0)] {
            let mut z = guess;
            for _ in 0..100 {
                let f = xi - 3.0 * z * z + 2.0 * z - 1.0;
                z -= f / (-6.0 * z + 2.0);
            }
            worst = worst.max((z - ctx.stationary(j)).abs());
        }
    }
    let degenerate = matches!(stationary_points(2.0 / 3.0), StationaryPoints::Degenerate { .. });
    let none = matches!(stationary_points(0.5), StationaryPoints::None);
    let typed_err = matches!(
        require_two_points(0.5, 0.0),
        Err(hnls::Error::InvalidRay { .. })
    ) && matches!(require_two_points(2.0 / 3.0, 0.0), Err(hnls::Error::DegenerateRay));

    let ok = report(
        7,
        "phase geometry",
        if worst < 1e-12 && degenerate && none && typed_err {
            Ok(format!("root dev {worst:.2e}; trichotomy outcomes typed"))
        } else {
            Err(format!(
                "root dev {worst:.2e}, degenerate {degenerate}, none {none}, typed {typed_err}"
            ))
        },
    );
    assert!(ok);
}

// Reference note: criterion 8 (byte-identical compare reruns) is implemented
// in crates/hnls-cli/tests/determinism.rs against the actual binary.
#[test]
fn criterion_8_pointer() {
    println!("criterion 8 [determinism]: see hnls-cli/tests/determinism.rs (runs the binary twice)");
}

// End-to-end phase covariance of the whole pipeline (module property):
// rotating the datum by a constant phase rotates q_asym identically.
#[test]
fn pipeline_phase_covariance() {
    let grid = Grid::new(2048, 60.0).unwrap();
    let zs = uniform_z_grid(-8.0, 8.0, 401);
    let base = InitialDatum::sech(grid, 0.4, 1.0, 0.0, 0.0).unwrap();
    let phi = 0.9;
    let rotated = base.rotated(phi).unwrap();

    let d0 = reflection_coefficient(&base, &zs).unwrap();
    let d1 = reflection_coefficient(&rotated, &zs).unwrap();
    let opts = AsymOptions::default();
    let t = 40.0;
    let q0 = RayAsymptotics::prepare(&d0, 1.2, &opts).unwrap().eval(t).unwrap().q;
    let q1 = RayAsymptotics::prepare(&d1, 1.2, &opts).unwrap().eval(t).unwrap().q;
    let dev = (q1 - Complex64::from_polar(1.0, phi) * q0).norm();
    assert!(dev < 1e-8, "phase covariance dev {dev:.2e}");
}
