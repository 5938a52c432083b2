//! Phase function theta(z) = z xi - z^3 + z^2 - z - 1, its stationary-point
//! geometry, the sign chart of Im theta, the deformation rays, and the
//! non-analytic sector extension R11 with its d-bar diagnostics.

use num_complex::Complex64;
use serde::Serialize;

use crate::delta::DeltaSolver;
use crate::error::{Error, Result};
use crate::grid::C64;
use crate::scattering::ScatteringData;

/// theta(z; xi) = z xi - z^3 + z^2 - z - 1.
pub fn theta(z: C64, xi: f64) -> C64 {
    z * xi - z * z * z + z * z - z - 1.0
}

/// d theta / dz = xi - 3 z^2 + 2 z - 1.
pub fn theta_prime(z: C64, xi: f64) -> C64 {
    Complex64::new(xi, 0.0) - 3.0 * z * z + 2.0 * z - 1.0
}

/// theta'' on the real axis: 2 - 6 z.
pub fn theta_double_prime(z: f64) -> f64 {
    2.0 - 6.0 * z
}

/// Ray geometry for a fixed speed xi = x/t > 2/3.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseContext {
    pub xi: f64,
    /// larger stationary point (theta'' < 0 here)
    pub z1: f64,
    /// smaller stationary point (theta'' > 0 here)
    pub z2: f64,
    pub theta_pp_1: f64,
    pub theta_pp_2: f64,
}

impl PhaseContext {
    pub fn theta_at(&self, j: usize, t_independent: bool) -> f64 {
        debug_assert!(t_independent);
        let z = Complex64::new(self.stationary(j), 0.0);
        theta(z, self.xi).re
    }

    pub fn stationary(&self, j: usize) -> f64 {
        match j {
            1 => self.z1,
            2 => self.z2,
            _ => panic!("stationary point index must be 1 or 2"),
        }
    }

    pub fn theta_pp(&self, j: usize) -> f64 {
        match j {
            1 => self.theta_pp_1,
            2 => self.theta_pp_2,
            _ => panic!("stationary point index must be 1 or 2"),
        }
    }
}

/// Trichotomy of theta'(z) = 0 over real z.
#[derive(Debug, Clone, Copy)]
pub enum StationaryPoints {
    Two(PhaseContext),
    Degenerate { z: f64 },
    None,
}

/// Solve theta' = 0. Two real roots iff xi > 2/3; xi = 2/3 is the double
/// root z = 1/3; below there is no real stationary point.
pub fn stationary_points(xi: f64) -> StationaryPoints {
    let disc = 3.0 * xi - 2.0; // discriminant/3 of 3z^2 - 2z + (1 - xi)
    if disc.abs() < 1e-12 {
        return StationaryPoints::Degenerate { z: 1.0 / 3.0 };
    }
    if disc < 0.0 {
        return StationaryPoints::None;
    }
    let root = disc.sqrt();
    let z1 = (1.0 + root) / 3.0;
    let z2 = (1.0 - root) / 3.0;
    StationaryPoints::Two(PhaseContext {
        xi,
        z1,
        z2,
        theta_pp_1: theta_double_prime(z1),
        theta_pp_2: theta_double_prime(z2),
    })
}

/// Context or a typed validity error, with an optional margin above 2/3.
pub fn require_two_points(xi: f64, margin: f64) -> Result<PhaseContext> {
    match stationary_points(xi) {
        StationaryPoints::Two(ctx) if xi > 2.0 / 3.0 + margin => Ok(ctx),
        StationaryPoints::Degenerate { .. } => Err(Error::DegenerateRay),
        _ => Err(Error::InvalidRay { xi, min_xi: 2.0 / 3.0 + margin }),
    }
}

/// Sign field of Im theta over a rectangle (the chart is t-independent).
#[derive(Debug, Clone)]
pub struct SignMap {
    pub xi: f64,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// row-major over (y, x): sign(Im theta) in {-1, 0, 1}
    pub sign: Vec<i8>,
    pub im_theta: Vec<f64>,
}

pub fn sign_map(xi: f64, window: [f64; 4], resolution: [usize; 2]) -> SignMap {
    let [x0, x1, y0, y1] = window;
    let [nx, ny] = resolution;
    let xs: Vec<f64> = (0..nx).map(|i| x0 + (x1 - x0) * i as f64 / (nx - 1) as f64).collect();
    let ys: Vec<f64> = (0..ny).map(|i| y0 + (y1 - y0) * i as f64 / (ny - 1) as f64).collect();
    let mut sign = Vec::with_capacity(nx * ny);
    let mut im = Vec::with_capacity(nx * ny);
    for &y in &ys {
        for &x in &xs {
            let v = theta(Complex64::new(x, y), xi).im;
            im.push(v);
            sign.push(if v > 0.0 {
                1
            } else if v < 0.0 {
                -1
            } else {
                0
            });
        }
    }
    SignMap { xi, xs, ys, sign, im_theta: im }
}

impl SignMap {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y,sign,im_theta\n");
        for (iy, &y) in self.ys.iter().enumerate() {
            for (ix, &x) in self.xs.iter().enumerate() {
                let k = iy * self.xs.len() + ix;
                out.push_str(&format!("{x:.12e},{y:.12e},{},{:.12e}\n", self.sign[k], self.im_theta[k]));
            }
        }
        out
    }
}

/// One deformation ray z_j + e^{i angle} R+.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Ray {
    pub anchor: f64,
    pub angle: f64,
    pub label: &'static str,
}

/// The eight rays of the deformed contour, opening angle phi in (0, pi/4].
#[derive(Debug, Clone, Serialize)]
pub struct ContourSet {
    pub phi: f64,
    pub rays: [Ray; 8],
}

pub fn contours(ctx: &PhaseContext, phi: f64) -> Result<ContourSet> {
    if !(phi > 0.0 && phi <= std::f64::consts::FRAC_PI_4 + 1e-12) {
        return Err(Error::Config(format!("opening angle {phi} outside (0, pi/4]")));
    }
    let pi = std::f64::consts::PI;
    let rays = [
        Ray { anchor: ctx.z1, angle: phi, label: "S11" },
        Ray { anchor: ctx.z1, angle: pi - phi, label: "S12" },
        Ray { anchor: ctx.z1, angle: pi + phi, label: "S13" },
        Ray { anchor: ctx.z1, angle: -phi, label: "S14" },
        Ray { anchor: ctx.z2, angle: pi - phi, label: "S21" },
        Ray { anchor: ctx.z2, angle: phi, label: "S22" },
        Ray { anchor: ctx.z2, angle: -phi, label: "S23" },
        Ray { anchor: ctx.z2, angle: pi + phi, label: "S24" },
    ];
    Ok(ContourSet { phi, rays })
}

/// -conj(r)/(1 - |r|^2) on the real axis, the boundary value R11 must take
/// on (z1, +infinity).
pub fn p11(scat: &ScatteringData, x: f64) -> C64 {
    let r = scat.r_at(x);
    -r.conj() / (1.0 - scat.abs_r_sq_at(x))
}

fn p11_prime(scat: &ScatteringData, x: f64) -> C64 {
    let h = 1e-4;
    (p11(scat, x + h) - p11(scat, x - h)) / (2.0 * h)
}

/// Sector extension of the exterior upper-triangular factor at z1:
/// R11(z) = cos(2 phi) p11(Re z) + (1 - cos 2 phi) f11(z) on
/// 0 <= arg(z - z1) <= pi/4.
pub fn extension_r11(
    z: C64,
    scat: &ScatteringData,
    delta: &DeltaSolver,
) -> Result<C64> {
    let ctx = delta.context();
    let rel = z - ctx.z1;
    let phi = rel.im.atan2(rel.re);
    if !(-1e-12..=std::f64::consts::FRAC_PI_4 + 1e-12).contains(&phi) {
        return Err(Error::OutsideSector(format!(
            "arg(z - z1) = {phi:.6} outside [0, pi/4]"
        )));
    }
    let w_real = (2.0 * phi).cos();
    let mut val = w_real * p11(scat, z.re);
    let w_f = 1.0 - w_real;
    if w_f.abs() > 1e-14 {
        let p_at = p11(scat, ctx.z1);
        let lam11 = delta.lambda_at_stationary(1);
        let nu1 = delta.profile().nu_z1;
        let power = (Complex64::new(0.0, 2.0 * nu1) * rel.ln()).exp();
        let d = delta.delta(z)?.value;
        val += w_f
            * p_at
            * (Complex64::new(0.0, 2.0 * lam11)).exp()
            * power
            / (d * d);
    }
    Ok(val)
}

/// Numerical d-bar of R11 by centered complex differences:
/// dbar = 1/2 (d/dx + i d/dy).
pub fn dbar_r11_numeric(
    z: C64,
    h: f64,
    scat: &ScatteringData,
    delta: &DeltaSolver,
) -> Result<C64> {
    let fxp = extension_r11(z + h, scat, delta)?;
    let fxm = extension_r11(z - h, scat, delta)?;
    let fyp = extension_r11(z + Complex64::new(0.0, h), scat, delta)?;
    let fym = extension_r11(z - Complex64::new(0.0, h), scat, delta)?;
    Ok(0.5 * ((fxp - fxm) / (2.0 * h) + Complex64::new(0.0, 1.0) * (fyp - fym) / (2.0 * h)))
}

#[derive(Debug, Clone, Serialize)]
pub struct DbarReport {
    pub samples: usize,
    /// max |dbar R11| / (|z-z1|^{-1/2} + |p11'(Re z)|)
    pub max_dbar_ratio: f64,
    /// max |R11| / (sin^2(arg(z-z1)) + <Re z>^{-1})
    pub max_amplitude_ratio: f64,
    /// max |d/dx R11 - p11'| on the real boundary
    pub boundary_derivative_dev: f64,
}

/// Sample the sector and compare the numerical d-bar and amplitude of R11
/// against the analytic envelope shapes. Report-only.
pub fn dbar_bound_check(
    scat: &ScatteringData,
    delta: &DeltaSolver,
    samples: usize,
    seed: u64,
) -> Result<DbarReport> {
    let ctx = delta.context();
    // simple deterministic low-discrepancy sweep; no RNG dependency needed
    let golden = 0.6180339887498949_f64;
    let mut acc = seed as f64 * golden;
    let mut next = || {
        acc = (acc + golden).fract();
        acc
    };

    let mut max_dbar = 0.0f64;
    let mut max_amp = 0.0f64;
    let fd_h = 1e-5;
    for _ in 0..samples {
        let rho = 0.05 + 1.2 * next();
        let phi = (0.08 + 0.84 * next()) * std::f64::consts::FRAC_PI_4;
        let z = Complex64::new(ctx.z1 + rho * phi.cos(), rho * phi.sin());
        let dbar = dbar_r11_numeric(z, fd_h, scat, delta)?;
        let envelope = rho.powf(-0.5) + p11_prime(scat, z.re).norm();
        max_dbar = max_dbar.max(dbar.norm() / envelope);

        let r11 = extension_r11(z, scat, delta)?;
        let amp_env = phi.sin().powi(2) + 1.0 / (1.0 + z.re * z.re).sqrt();
        max_amp = max_amp.max(r11.norm() / amp_env);
    }

    // tangential derivative along the real boundary matches p11'
    let mut bdev = 0.0f64;
    for i in 1..=8 {
        let x = ctx.z1 + 0.15 * i as f64;
        let num = (extension_r11(Complex64::new(x + fd_h, 0.0), scat, delta)?
            - extension_r11(Complex64::new(x - fd_h, 0.0), scat, delta)?)
            / (2.0 * fd_h);
        bdev = bdev.max((num - p11_prime(scat, x)).norm());
    }

    Ok(DbarReport {
        samples,
        max_dbar_ratio: max_dbar,
        max_amplitude_ratio: max_amp,
        boundary_derivative_dev: bdev,
    })
}
