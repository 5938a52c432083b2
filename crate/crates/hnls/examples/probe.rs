//! Development probe: smoke-scale ray comparison printing the decay fits
//! for both branch conventions.

use hnls::akns::Reduction;
use hnls::asymptotics::{AsymOptions, Convention, RayAsymptotics};
use hnls::grid::Grid;
use hnls::harness::{build_ray_report, compare_along_ray, log_spaced_times, trust_window};
use hnls::pde::{evolve, EvolutionConfig};
use hnls::scattering::{reflection_coefficient, uniform_z_grid, InitialDatum};

fn main() {
    let t0 = std::time::Instant::now();
    let eps = 0.3;
    let xi = 1.2;

    // scattering
    let sgrid = Grid::new(4096, 60.0).unwrap();
    let datum = InitialDatum::sech(sgrid, eps, 1.0, 0.0, 0.0).unwrap();
    let zs = uniform_z_grid(-8.0, 8.0, 801);
    let data = reflection_coefficient(&datum, &zs).unwrap();
    println!(
        "scattering: sup|r| = {:.4}, defect = {:.2e}  [{:?}]",
        data.sup_norm_r,
        data.unimodularity_defect,
        t0.elapsed()
    );

    // evolution in the comoving frame
    let egrid = Grid::new(8192, 960.0).unwrap();
    let edatum = InitialDatum::sech(egrid, eps, 1.0, 0.0, 0.0).unwrap();
    let dt = 1e-3;
    let t_list = log_spaced_times(20.0, 60.0, 25, dt);
    let mut cfg = EvolutionConfig::new(egrid, dt, 60.0, Reduction::Hnls);
    cfg.snapshot_times = t_list.clone();
    cfg.frame_velocity = xi;
    cfg.edge_tolerance = None;
    cfg.mass_tolerance = 1e-6;
    let evo = evolve(&edatum.samples, &cfg).unwrap();
    println!(
        "evolution done, mass drift max = {:.2e}  [{:?}]",
        evo.mass_trace.iter().map(|&(_, d)| d).fold(0.0, f64::max),
        t0.elapsed()
    );

    let t_trust = trust_window(&edatum.samples, egrid, xi, xi, 1e-4);
    println!("trust window: t <= {t_trust:.1}");

    for conv in [Convention::A, Convention::B] {
        let opts = AsymOptions { convention: conv, t_min: 10.0, xi_margin: 0.05 };
        let ray = RayAsymptotics::prepare(&data, xi, &opts).unwrap();
        let rows = compare_along_ray(&evo, &ray, &t_list, t_trust).unwrap();
        let report = build_ray_report(xi, conv, t_trust, &rows, 1.3).unwrap();
        println!(
            "convention {conv}: slope |q_num| = {:.4} (+-{:.4}), slope err envelope = {:.4} (+-{:.4})",
            report.fit_abs_q.slope,
            report.fit_abs_q.ci95,
            report.fit_error_envelope.slope,
            report.fit_error_envelope.ci95
        );
        for r in rows.iter().step_by(6) {
            println!(
                "  t = {:7.2}  |q_num| = {:.5e}  |q_asym| = {:.5e}  err = {:.3e}  rel = {:.3}",
                r.t,
                r.q_num.norm(),
                r.q_asym.norm(),
                r.abs_err,
                r.abs_err / r.q_num.norm()
            );
        }
    }
    println!("total {:?}", t0.elapsed());
}
