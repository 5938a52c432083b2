//! End-to-end experiment orchestration: direct evolution vs the asymptotic
//! formula along rays, decay-exponent fitting, and report/plot emission.

use num_complex::Complex64;
use serde::Serialize;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::akns::Reduction;
use crate::asymptotics::{Convention, RayAsymptotics};
use crate::error::{Error, Result};
use crate::grid::{Grid, Spectral, C64};
use crate::interp::interp_uniform;
use crate::pde::{linear_symbol, EvolutionResult};
use crate::phase::SignMap;
use crate::plot::{sign_heatmap, LinePlot, Series};
use crate::scattering::{ScatteringData, SymmetryReport};

/// One ray comparison request.
#[derive(Debug, Clone)]
pub struct RayExperiment {
    pub xi: f64,
    pub t_list: Vec<f64>,
    pub convention: Convention,
}

#[derive(Debug, Clone, Copy)]
pub struct CompareRow {
    pub t: f64,
    pub x: f64,
    pub q_num: C64,
    pub q_asym: C64,
    pub abs_err: f64,
    pub bound: f64,
}

/// Group velocity of the linearized flow, d omega / dk = (3/4) k^2 + k + 1.
fn group_velocity(k: f64) -> f64 {
    0.75 * k * k + k + 1.0
}

/// Largest time up to which the periodic wrap-around cannot have reached the
/// sampled ray with spectral amplitude above `ghost_tol`.
///
/// A component at wavenumber k separates from the ray at rate
/// |omega'(k) - xi| and re-influences it only after covering a full period L;
/// its amplitude at arrival is bounded by the stationary-phase envelope
/// |q0_hat(k)| / sqrt(2 pi |omega''(k)| t).
pub fn trust_window(q0: &[C64], grid: Grid, frame_velocity: f64, xi: f64, ghost_tol: f64) -> f64 {
    let sp = Spectral::new(grid);
    let hat = sp.forward(q0);
    let h = grid.spacing();
    let mut t_trust = f64::INFINITY;

    for (&k, v) in sp.wavenumbers().iter().zip(&hat) {
        if k == 0.0 {
            continue;
        }
        let amp0 = v.norm() * h; // continuum Fourier amplitude
        let rel = (group_velocity(k) - xi).abs();
        if rel < 1e-6 {
            continue;
        }
        let t_arrive = grid.length / rel;
        let curvature = (1.5 * k + 1.0).abs().max(1e-3);
        let amp = amp0 / (2.0 * std::f64::consts::PI * curvature * t_arrive).sqrt();
        if amp >= ghost_tol && t_arrive < t_trust {
            t_trust = t_arrive;
        }
    }

    // the sampled point itself must stay well inside the box
    let drift = (xi - frame_velocity).abs();
    if drift > 1e-12 {
        t_trust = t_trust.min((0.5 * grid.length - 2.0) / drift);
    }
    t_trust
}

/// Cubic-interpolated field value at the lab position x = xi t.
pub fn ray_sample(evolution: &EvolutionResult, xi: f64, t: f64) -> Result<C64> {
    let snap = evolution
        .snapshot_at(t)
        .ok_or_else(|| Error::Config(format!("no evolution snapshot at t = {t}")))?;
    let y = (xi - evolution.frame_velocity) * t;
    let half = 0.5 * evolution.grid.length;
    if y.abs() > half - 2.0 * evolution.grid.spacing() {
        return Err(Error::OutsideTrustWindow { t, t_max: (half - 2.0) / (xi - evolution.frame_velocity).abs() });
    }
    Ok(interp_uniform(-half, evolution.grid.spacing(), &snap.q, y))
}

/// Rows of (t, q_num, q_asym, |diff|) along one ray.
pub fn compare_along_ray(
    evolution: &EvolutionResult,
    ray: &RayAsymptotics,
    t_list: &[f64],
    trust_t_max: f64,
) -> Result<Vec<CompareRow>> {
    let mut rows = Vec::with_capacity(t_list.len());
    for &t in t_list {
        if t > trust_t_max {
            return Err(Error::OutsideTrustWindow { t, t_max: trust_t_max });
        }
        let q_num = ray_sample(evolution, ray.ctx.xi, t)?;
        let asym = ray.eval(t)?;
        rows.push(CompareRow {
            t,
            x: ray.ctx.xi * t,
            q_num,
            q_asym: asym.q,
            abs_err: (q_num - asym.q).norm(),
            bound: asym.leading_magnitude,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// 95% studentized half-width on the slope
    pub ci95: f64,
    pub points: usize,
}

/// Least squares on log-log with a studentized confidence interval.
pub fn fit_decay(ts: &[f64], values: &[f64]) -> Result<DecayFit> {
    if ts.len() != values.len() || ts.len() < 5 {
        return Err(Error::BadFitInput);
    }
    if values.iter().any(|&v| !(v > 0.0)) || ts.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::BadFitInput);
    }
    let n = ts.len() as f64;
    let xs: Vec<f64> = ts.iter().map(|&t| t.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|&v| v.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|&x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(&x, &y)| (x - xbar) * (y - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let ssr: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let df = n - 2.0;
    let se = (ssr / df / sxx).sqrt();
    // Cornish-Fisher expansion of the two-sided 95% Student quantile
    let z = 1.959963984540054_f64;
    let tq = z + (z * z * z + z) / (4.0 * df) + (5.0 * z.powi(5) + 16.0 * z.powi(3) + 3.0 * z) / (96.0 * df * df);
    Ok(DecayFit { slope, intercept, ci95: tq * se, points: ts.len() })
}

/// Sliding-window maximum in log-t: env(t_i) = max { v_j : t_j in [t_i/w, t_i w] }.
/// Smooths oscillatory phase beating before fitting the error exponent.
pub fn envelope_max(ts: &[f64], values: &[f64], window_factor: f64) -> Vec<f64> {
    ts.iter()
        .map(|&ti| {
            ts.iter()
                .zip(values)
                .filter(|(&tj, _)| tj >= ti / window_factor && tj <= ti * window_factor)
                .map(|(_, &v)| v)
                .fold(0.0f64, f64::max)
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct RowOut {
    pub t: f64,
    pub x: f64,
    pub re_q_num: f64,
    pub im_q_num: f64,
    pub re_q_asym: f64,
    pub im_q_asym: f64,
    pub abs_err: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RayOut {
    pub xi: f64,
    pub convention: String,
    pub trust_t_max: f64,
    pub fit_abs_q: DecayFit,
    pub fit_error_envelope: DecayFit,
    pub rows: Vec<RowOut>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScatterOut {
    pub sup_norm_r: f64,
    pub unimodularity_defect: f64,
    pub max_step_variation: f64,
    pub symmetry: Option<SymmetryReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnvironmentOut {
    pub package_version: String,
    pub threads: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub config_hash: String,
    pub convention: String,
    /// branch/regularization choices baked into the numbers
    pub interpretation_notes: Vec<String>,
    pub timestamp: String,
    pub scattering: ScatterOut,
    pub rays: Vec<RayOut>,
    pub environment: EnvironmentOut,
}

/// The fixed wording recorded in every report.
pub fn interpretation_notes(convention: Convention) -> Vec<String> {
    vec![
        format!(
            "convention {convention}: z1 branch phase {} applied to the negative-curvature term",
            match convention {
                Convention::A => "1",
                Convention::B => "i",
            }
        ),
        "modified reflection carries exp(sign(theta'') i nu ln(2t|theta''|)); |r_mod| = |r|".into(),
        "lambda at z1 is regularized on (z1, z1+1) and delta factors as (z-z1)^{-i nu1} e^{i lambda} there; at z2 the interval is (z2-1, z2) with exponent +i nu2".into(),
    ]
}

pub fn build_ray_report(
    xi: f64,
    convention: Convention,
    trust_t_max: f64,
    rows: &[CompareRow],
    envelope_window: f64,
) -> Result<RayOut> {
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    // clamp away exact zeros so the trivial zero-datum run still reports
    let qn: Vec<f64> = rows.iter().map(|r| r.q_num.norm().max(1e-300)).collect();
    let errs: Vec<f64> = rows.iter().map(|r| r.abs_err.max(1e-300)).collect();
    let env = envelope_max(&ts, &errs, envelope_window);
    let fit_abs_q = fit_decay(&ts, &qn)?;
    let fit_err = fit_decay(&ts, &env)?;
    Ok(RayOut {
        xi,
        convention: convention.to_string(),
        trust_t_max,
        fit_abs_q,
        fit_error_envelope: fit_err,
        rows: rows
            .iter()
            .map(|r| RowOut {
                t: r.t,
                x: r.x,
                re_q_num: r.q_num.re,
                im_q_num: r.q_num.im,
                re_q_asym: r.q_asym.re,
                im_q_asym: r.q_asym.im,
                abs_err: r.abs_err,
                bound: r.bound,
            })
            .collect(),
    })
}

/// Side data emit_report renders alongside the JSON.
pub struct ReportArtifacts<'a> {
    pub scattering: &'a ScatteringData,
    pub sign_map: &'a SignMap,
    pub markers: Vec<(f64, String)>,
}

/// Write report.json, the three CSV tables, and the four SVG plots.
/// Returns the paths written, in a fixed order.
pub fn emit_report(
    report: &RunReport,
    artifacts: &ReportArtifacts<'_>,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let hash = &report.config_hash;
    let mut written = Vec::new();

    let mut path = out_dir.join(format!("{hash}_report.json"));
    std::fs::write(&path, serde_json::to_string_pretty(report)?)?;
    written.push(path);

    path = out_dir.join(format!("{hash}_scattering.csv"));
    let mut buf = Vec::new();
    artifacts.scattering.write_csv(&mut buf)?;
    std::fs::write(&path, buf)?;
    written.push(path);

    path = out_dir.join(format!("{hash}_ray_rows.csv"));
    let mut f = std::fs::File::create(&path)?;
    writeln!(f, "xi,t,x,re_q_num,im_q_num,re_q_asym,im_q_asym,abs_err,bound")?;
    for ray in &report.rays {
        for r in &ray.rows {
            writeln!(
                f,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                ray.xi, r.t, r.x, r.re_q_num, r.im_q_num, r.re_q_asym, r.im_q_asym, r.abs_err, r.bound
            )?;
        }
    }
    written.push(path);

    path = out_dir.join(format!("{hash}_decay_fits.csv"));
    let mut f = std::fs::File::create(&path)?;
    writeln!(f, "xi,quantity,slope,intercept,ci95,points")?;
    for ray in &report.rays {
        writeln!(
            f,
            "{:.17e},abs_q_num,{:.17e},{:.17e},{:.17e},{}",
            ray.xi, ray.fit_abs_q.slope, ray.fit_abs_q.intercept, ray.fit_abs_q.ci95, ray.fit_abs_q.points
        )?;
        writeln!(
            f,
            "{:.17e},error_envelope,{:.17e},{:.17e},{:.17e},{}",
            ray.xi,
            ray.fit_error_envelope.slope,
            ray.fit_error_envelope.intercept,
            ray.fit_error_envelope.ci95,
            ray.fit_error_envelope.points
        )?;
    }
    written.push(path);

    // sign map
    path = out_dir.join(format!("{hash}_signmap.svg"));
    let markers: Vec<(f64, &str)> =
        artifacts.markers.iter().map(|(x, s)| (*x, s.as_str())).collect();
    std::fs::write(
        &path,
        sign_heatmap(
            &format!("sign Im theta, xi = {}", artifacts.sign_map.xi),
            &artifacts.sign_map.xs,
            &artifacts.sign_map.ys,
            &artifacts.sign_map.sign,
            &markers,
        ),
    )?;
    written.push(path);

    // |r(z)|
    path = out_dir.join(format!("{hash}_reflection.svg"));
    let rabs: Vec<f64> = artifacts.scattering.r.iter().map(|v| v.norm()).collect();
    std::fs::write(
        &path,
        LinePlot {
            title: "reflection coefficient",
            x_label: "z",
            y_label: "|r(z)|",
            log_x: false,
            log_y: false,
            series: vec![Series {
                label: "|r|",
                color: "#1a55a0",
                xs: &artifacts.scattering.z_grid,
                ys: &rabs,
                dashed: false,
            }],
        }
        .render(),
    )?;
    written.push(path);

    // |q| along rays, both curves
    path = out_dir.join(format!("{hash}_ray_decay.svg"));
    let palette = ["#a02020", "#1a55a0", "#208050", "#8050a0"];
    let mut series = Vec::new();
    let mut keep: Vec<(Vec<f64>, Vec<f64>, Vec<f64>, String, String)> = Vec::new();
    for (i, ray) in report.rays.iter().enumerate() {
        let ts: Vec<f64> = ray.rows.iter().map(|r| r.t).collect();
        let qn: Vec<f64> =
            ray.rows.iter().map(|r| (r.re_q_num.powi(2) + r.im_q_num.powi(2)).sqrt()).collect();
        let qa: Vec<f64> =
            ray.rows.iter().map(|r| (r.re_q_asym.powi(2) + r.im_q_asym.powi(2)).sqrt()).collect();
        keep.push((
            ts,
            qn,
            qa,
            format!("|q_num| xi={}", ray.xi),
            format!("|q_asym| xi={}", ray.xi),
        ));
        let _ = i;
    }
    for (i, (ts, qn, qa, l1, l2)) in keep.iter().enumerate() {
        let color = palette[i % palette.len()];
        series.push(Series { label: l1, color, xs: ts, ys: qn, dashed: false });
        series.push(Series { label: l2, color, xs: ts, ys: qa, dashed: true });
    }
    std::fs::write(
        &path,
        LinePlot {
            title: "field modulus along rays",
            x_label: "t",
            y_label: "|q|",
            log_x: true,
            log_y: true,
            series,
        }
        .render(),
    )?;
    written.push(path);

    // error decay
    path = out_dir.join(format!("{hash}_error_decay.svg"));
    let mut series = Vec::new();
    let mut keep: Vec<(Vec<f64>, Vec<f64>, Vec<f64>, String, String)> = Vec::new();
    for ray in report.rays.iter() {
        let ts: Vec<f64> = ray.rows.iter().map(|r| r.t).collect();
        let errs: Vec<f64> = ray.rows.iter().map(|r| r.abs_err.max(1e-300)).collect();
        let fitline: Vec<f64> = ts
            .iter()
            .map(|&t| (ray.fit_error_envelope.intercept + ray.fit_error_envelope.slope * t.ln()).exp())
            .collect();
        keep.push((
            ts,
            errs,
            fitline,
            format!("|q_num - q_asym| xi={}", ray.xi),
            format!("fit slope {:.3}", ray.fit_error_envelope.slope),
        ));
    }
    for (i, (ts, errs, fitline, l1, l2)) in keep.iter().enumerate() {
        let color = palette[i % palette.len()];
        series.push(Series { label: l1, color, xs: ts, ys: errs, dashed: false });
        series.push(Series { label: l2, color, xs: ts, ys: fitline, dashed: true });
    }
    std::fs::write(
        &path,
        LinePlot {
            title: "asymptotic error along rays",
            x_label: "t",
            y_label: "|q_num - q_asym|",
            log_x: true,
            log_y: true,
            series,
        }
        .render(),
    )?;
    written.push(path);

    Ok(written)
}

/// Log-spaced time list snapped onto the dt lattice (deduplicated).
pub fn log_spaced_times(t_min: f64, t_max: f64, count: usize, dt: f64) -> Vec<f64> {
    let mut out: Vec<f64> = (0..count)
        .map(|i| {
            let t = t_min * (t_max / t_min).powf(i as f64 / (count - 1) as f64);
            (t / dt).round() * dt
        })
        .collect();
    out.dedup_by(|a, b| (*a - *b).abs() < 0.5 * dt);
    out
}

/// Consistency guard between the stepper symbol and the group velocity used
/// by the trust window (kept next to each other on purpose).
#[allow(dead_code)]
fn group_velocity_matches_symbol() {
    let k = 1.0;
    let h = 1e-5;
    let d = (linear_symbol(Reduction::Hnls, k + h, 0.0).im - linear_symbol(Reduction::Hnls, k - h, 0.0).im)
        / (2.0 * h);
    debug_assert!((d + group_velocity(k)).abs() < 1e-6);
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> SelfCheck {
    SelfCheck { name: name.to_string(), passed, detail }
}

/// Quick cross-module invariant sweep for the `selftest` command. Runs in
/// a few seconds; every check is a condensed version of a full test.
pub fn selftest() -> Vec<SelfCheck> {
    use crate::akns::{plane_wave_omega, residual_hnls};
    use crate::asymptotics::beta12;
    use crate::delta::{nu_profile, DeltaSolver, Side};
    use crate::gamma::gamma;
    use crate::pde::{evolve, EvolutionConfig};
    use crate::phase::{require_two_points, theta_prime};
    use crate::scattering::{reflection_coefficient, uniform_z_grid, InitialDatum};

    let mut out = Vec::new();

    // gamma values
    {
        let g1 = (gamma(Complex64::new(1.0, 0.0)) - Complex64::new(1.0, 0.0)).norm();
        let gh = (gamma(Complex64::new(0.5, 0.0)).re - std::f64::consts::PI.sqrt()).abs();
        let gi = (gamma(Complex64::new(0.0, -1.0)).norm()
            - (std::f64::consts::PI / std::f64::consts::PI.sinh()).sqrt())
        .abs();
        let worst = g1.max(gh).max(gi);
        out.push(check("gamma_reference_values", worst < 1e-12, format!("max dev {worst:.2e}")));
    }

    // stationary-point geometry
    {
        let mut worst = 0.0f64;
        for i in 0..100 {
            let xi = 0.7 + 9.3 * i as f64 / 99.0;
            let ctx = require_two_points(xi, 0.0).unwrap();
            for j in [1, 2] {
                worst = worst
                    .max(theta_prime(Complex64::new(ctx.stationary(j), 0.0), xi).norm());
            }
            worst = worst.max((ctx.z1 + ctx.z2 - 2.0 / 3.0).abs());
            worst = worst.max((ctx.theta_pp_1 + ctx.theta_pp_2).abs());
        }
        out.push(check("phase_geometry", worst < 1e-12, format!("max dev {worst:.2e}")));
    }

    // parabolic-cylinder constants
    {
        let mut worst = 0.0f64;
        for i in 1..=20 {
            let nu = 0.5 * i as f64 / 20.0;
            let r_abs = (1.0 - (-2.0 * std::f64::consts::PI * nu).exp()).sqrt();
            let r = Complex64::from_polar(r_abs, 1.7 * i as f64);
            for j in [1, 2] {
                worst = worst.max((beta12(j, r, nu).norm_sqr() - nu).abs());
            }
        }
        out.push(check("beta12_modulus_identity", worst < 1e-10, format!("max dev {worst:.2e}")));
    }

    // plane-wave residual of the displayed equation
    {
        let grid = Grid::new(256, 16.0 * std::f64::consts::PI).unwrap();
        let (a, k) = (0.5, 2.0);
        let omega = plane_wave_omega(k, a);
        let dt = 2e-5;
        let snaps: Vec<Vec<C64>> = [-dt, 0.0, dt]
            .iter()
            .map(|&t| {
                grid.xs()
                    .iter()
                    .map(|&x| num_complex::Complex64::from_polar(a, k * x - omega * t))
                    .collect()
            })
            .collect();
        let res = residual_hnls(grid, &snaps[0], &snaps[1], &snaps[2], dt).unwrap();
        let worst = res.iter().map(|v| v.norm()).fold(0.0, f64::max);
        out.push(check("plane_wave_residual", worst < 1e-8, format!("max residual {worst:.2e}")));
    }

    // plane-wave dispersion through the evolver
    {
        let grid = Grid::new(256, 16.0 * std::f64::consts::PI).unwrap();
        let (a, k) = (0.5, 2.0);
        let omega = plane_wave_omega(k, a);
        let q0: Vec<C64> = grid
            .xs()
            .iter()
            .map(|&x| num_complex::Complex64::from_polar(a, k * x))
            .collect();
        let mut cfg = EvolutionConfig::new(grid, 1e-3, 1.0, Reduction::Hnls);
        cfg.edge_tolerance = None;
        cfg.mass_tolerance = 1e-9;
        let res = evolve(&q0, &cfg);
        let detail = match res {
            Ok(out_evo) => {
                let got = &out_evo.snapshots.last().unwrap().q;
                let mut worst = 0.0f64;
                for (&x, g) in grid.xs().iter().zip(got) {
                    let expect = num_complex::Complex64::from_polar(a, k * x - omega);
                    worst = worst.max((g - expect).norm());
                }
                (worst < 1e-8, format!("max dev {worst:.2e}"))
            }
            Err(e) => (false, format!("{e}")),
        };
        out.push(check("plane_wave_dispersion", detail.0, detail.1));
    }

    // scattering unimodularity and the delta jump on a small pipeline
    {
        let grid = Grid::new(1024, 60.0).unwrap();
        let datum = InitialDatum::sech(grid, 0.5, 1.0, 0.0, 0.0).unwrap();
        let zs = uniform_z_grid(-8.0, 8.0, 161);
        match reflection_coefficient(&datum, &zs) {
            Ok(data) => {
                out.push(check(
                    "scattering_unimodularity",
                    data.unimodularity_defect < 1e-8,
                    format!("defect {:.2e}", data.unimodularity_defect),
                ));
                let ctx = require_two_points(1.2, 0.0).unwrap();
                let profile = nu_profile(&data, &ctx).unwrap();
                let solver = DeltaSolver::new(profile);
                let mut worst = 0.0f64;
                for &s in &[-3.0, -1.5, 1.5, 3.0] {
                    let plus = solver.delta_boundary(s, Side::Plus).unwrap().value;
                    let minus = solver.delta_boundary(s, Side::Minus).unwrap().value;
                    let expect = 1.0 - data.abs_r_sq_at(s);
                    worst = worst.max((plus / minus - expect).norm());
                }
                let z = Complex64::new(0.4, 0.8);
                let schwarz = (solver.delta(z).unwrap().value
                    * solver.delta(z.conj()).unwrap().value.conj()
                    - Complex64::new(1.0, 0.0))
                .norm();
                out.push(check(
                    "delta_jump_and_schwarz",
                    worst < 1e-6 && schwarz < 1e-8,
                    format!("jump dev {worst:.2e}, schwarz {schwarz:.2e}"),
                ));
            }
            Err(e) => out.push(check("scattering_unimodularity", false, format!("{e}"))),
        }
    }

    // decay fit sanity
    {
        let ts: Vec<f64> = (0..20).map(|i| 10.0 * 1.2f64.powi(i)).collect();
        let vals: Vec<f64> = ts.iter().map(|&t| t.powf(-0.5)).collect();
        let fit = fit_decay(&ts, &vals).unwrap();
        out.push(check(
            "decay_fit_exact_power",
            (fit.slope + 0.5).abs() < 1e-12,
            format!("slope {:.6}", fit.slope),
        ));
    }

    out
}
