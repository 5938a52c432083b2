//! The scalar jump function delta(z) on Upsilon = (-inf, z2) u (z1, +inf),
//! its exponent nu(s) = -(1/2 pi) ln(1 - |r(s)|^2), and the regularized
//! phase lambda(z, z_j) that factors delta near each stationary point.
//!
//! Near z2 (where Upsilon extends to the left) delta behaves like
//! (z - z2)^{+i nu2}; near z1 (Upsilon to the right) like (z - z1)^{-i nu1}.
//! The subtraction interval regularizing lambda therefore sits on the
//! Upsilon side of each point: (z2 - 1, z2) and (z1, z1 + 1). Both factored
//! forms are verified against the raw Cauchy integral in the tests.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::C64;
use crate::interp::interp_uniform_real;
use crate::phase::PhaseContext;
use crate::quad::{refined_breaks, GaussRule};
use crate::scattering::ScatteringData;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// nu(s) sampled from scattering data, restricted to the ray context.
#[derive(Debug, Clone)]
pub struct NuProfile {
    pub ctx: PhaseContext,
    pub z_min: f64,
    pub z_max: f64,
    z0: f64,
    hz: f64,
    abs_r_sq: Vec<f64>,
    pub nu_z1: f64,
    pub nu_z2: f64,
    pub sup_r: f64,
    /// crude bound on the truncated tail of the Cauchy integral
    pub tail_estimate: f64,
}

pub fn nu_profile(data: &ScatteringData, ctx: &PhaseContext) -> Result<NuProfile> {
    if data.sup_norm_r >= 1.0 {
        return Err(Error::NonDefocusing { z: f64::NAN, val: data.sup_norm_r });
    }
    let z_min = data.z_grid[0];
    let z_max = *data.z_grid.last().unwrap();
    if ctx.z2 <= z_min + 1.0 || ctx.z1 >= z_max - 1.0 {
        return Err(Error::Config(format!(
            "stationary points {} / {} too close to the z-grid span [{z_min}, {z_max}]",
            ctx.z2, ctx.z1
        )));
    }
    let abs_r_sq: Vec<f64> = data.r.iter().map(|v| v.norm_sqr()).collect();
    let hz = data.z_grid[1] - data.z_grid[0];
    let mut profile = NuProfile {
        ctx: *ctx,
        z_min,
        z_max,
        z0: z_min,
        hz,
        abs_r_sq,
        nu_z1: 0.0,
        nu_z2: 0.0,
        sup_r: data.sup_norm_r,
        tail_estimate: 0.0,
    };
    profile.nu_z1 = profile.nu(ctx.z1);
    profile.nu_z2 = profile.nu(ctx.z2);
    profile.tail_estimate = profile.nu(z_min) + profile.nu(z_max);
    Ok(profile)
}

impl NuProfile {
    /// nu(s) = -(1/2 pi) ln(1 - |r(s)|^2), nonnegative, zero outside the span.
    pub fn nu(&self, s: f64) -> f64 {
        if s < self.z_min || s > self.z_max {
            return 0.0;
        }
        let rsq = interp_uniform_real(self.z0, self.hz, &self.abs_r_sq, s)
            .clamp(0.0, 1.0 - 1e-15);
        (-(-rsq).ln_1p() / TWO_PI).max(0.0)
    }

    pub fn nu_at(&self, j: usize) -> f64 {
        match j {
            1 => self.nu_z1,
            2 => self.nu_z2,
            _ => panic!("stationary point index must be 1 or 2"),
        }
    }

    /// Upsilon-restricted samples (diagnostics / CSV export).
    pub fn samples(&self, per_piece: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(2 * per_piece);
        for i in 0..per_piece {
            let s = self.z_min + (self.ctx.z2 - self.z_min) * i as f64 / (per_piece - 1) as f64;
            out.push((s, self.nu(s)));
        }
        for i in 0..per_piece {
            let s = self.ctx.z1 + (self.z_max - self.ctx.z1) * i as f64 / (per_piece - 1) as f64;
            out.push((s, self.nu(s)));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy)]
pub struct DeltaValue {
    pub z: C64,
    pub value: C64,
    pub boundary_side: Option<Side>,
}

/// Quadrature-backed evaluator for delta and lambda.
pub struct DeltaSolver {
    profile: NuProfile,
    rule: GaussRule,
    coarse: usize,
    levels: usize,
}

impl DeltaSolver {
    pub fn new(profile: NuProfile) -> Self {
        Self::with_quadrature(profile, 20, 24, 10)
    }

    pub fn with_quadrature(profile: NuProfile, order: usize, coarse: usize, levels: usize) -> Self {
        DeltaSolver { profile, rule: GaussRule::new(order), coarse, levels }
    }

    pub fn profile(&self) -> &NuProfile {
        &self.profile
    }

    pub fn context(&self) -> &PhaseContext {
        &self.profile.ctx
    }

    fn piece_breaks(&self, a: f64, b: f64, z: C64, extra: &[f64]) -> Vec<f64> {
        let mut pts: Vec<f64> = extra.to_vec();
        if z.im.abs() < 1.0 && z.re > a - 1.0 && z.re < b + 1.0 {
            pts.push(z.re.clamp(a, b));
        }
        refined_breaks(a, b, &pts, self.coarse, self.levels)
    }

    fn on_upsilon(&self, z: C64) -> bool {
        z.im == 0.0
            && ((z.re <= self.profile.ctx.z2 && z.re >= self.profile.z_min)
                || (z.re >= self.profile.ctx.z1 && z.re <= self.profile.z_max))
    }

    /// log delta(z) = i * integral over Upsilon of nu(s)/(s - z) ds.
    pub fn log_delta(&self, z: C64) -> C64 {
        let p = &self.profile;
        let kernel = |s: f64| Complex64::new(p.nu(s), 0.0) / (Complex64::new(s, 0.0) - z);
        let left = self
            .rule
            .integrate_panels(&self.piece_breaks(p.z_min, p.ctx.z2, z, &[p.ctx.z2, p.ctx.z2 - 1.0]), kernel);
        let right = self
            .rule
            .integrate_panels(&self.piece_breaks(p.ctx.z1, p.z_max, z, &[p.ctx.z1, p.ctx.z1 + 1.0]), kernel);
        Complex64::new(0.0, 1.0) * (left + right)
    }

    /// delta(z) off the jump contour.
    pub fn delta(&self, z: C64) -> Result<DeltaValue> {
        if self.on_upsilon(z) {
            return Err(Error::Config(
                "delta evaluated on Upsilon; use delta_boundary with a side".into(),
            ));
        }
        Ok(DeltaValue { z, value: self.log_delta(z).exp(), boundary_side: None })
    }

    /// Boundary value of delta on the interior of Upsilon, from the chosen
    /// side, via the principal value plus the half-residue term.
    pub fn delta_boundary(&self, s0: f64, side: Side) -> Result<DeltaValue> {
        let p = &self.profile;
        let in_left = s0 > p.z_min + 1e-9 && s0 < p.ctx.z2 - 1e-9;
        let in_right = s0 > p.ctx.z1 + 1e-9 && s0 < p.z_max - 1e-9;
        if !in_left && !in_right {
            return Err(Error::Config(format!(
                "boundary evaluation point {s0} not in the interior of Upsilon"
            )));
        }
        let (a, b) = if in_left { (p.z_min, p.ctx.z2) } else { (p.ctx.z1, p.z_max) };
        let (oa, ob) = if in_left { (p.ctx.z1, p.z_max) } else { (p.z_min, p.ctx.z2) };

        let nu0 = p.nu(s0);
        let sing = |s: f64| {
            Complex64::new(if (s - s0).abs() < 1e-300 { 0.0 } else { (p.nu(s) - nu0) / (s - s0) }, 0.0)
        };
        let pv_sing = self
            .rule
            .integrate_panels(&refined_breaks(a, b, &[s0], self.coarse, self.levels), sing)
            .re
            + nu0 * ((b - s0) / (s0 - a)).ln();
        let other = self
            .rule
            .integrate_panels(
                &self.piece_breaks(oa.min(ob), ob.max(oa), Complex64::new(s0, 0.0), &[]),
                |s| Complex64::new(p.nu(s) / (s - s0), 0.0),
            )
            .re;
        let pv = pv_sing + other;
        let half_residue = match side {
            Side::Plus => Complex64::new(0.0, std::f64::consts::PI * nu0),
            Side::Minus => Complex64::new(0.0, -std::f64::consts::PI * nu0),
        };
        let value = (Complex64::new(0.0, 1.0) * (Complex64::new(pv, 0.0) + half_residue)).exp();
        Ok(DeltaValue { z: Complex64::new(s0, 0.0), value, boundary_side: Some(side) })
    }

    /// Regularized phase lambda(z, z_j) with the unit-length subtraction
    /// interval on the Upsilon side of z_j:
    ///   j = 2: delta(z) = (z - z2)^{+i nu2} exp(i lambda(z, 2))
    ///   j = 1: delta(z) = (z - z1)^{-i nu1} exp(i lambda(z, 1))
    pub fn lambda(&self, z: C64, j: usize) -> Result<C64> {
        if self.on_upsilon(z) {
            return Err(Error::Config("lambda evaluated on Upsilon".into()));
        }
        let p = &self.profile;
        if (z - Complex64::new(p.ctx.stationary(j) + if j == 1 { 1.0 } else { -1.0 }, 0.0)).norm()
            < 1e-12
        {
            return Err(Error::Config("lambda log singularity at z_j -+ 1".into()));
        }
        let nu_j = p.nu_at(j);
        let (chi_a, chi_b) = match j {
            2 => (p.ctx.z2 - 1.0, p.ctx.z2),
            1 => (p.ctx.z1, p.ctx.z1 + 1.0),
            _ => unreachable!(),
        };
        let kernel = |s: f64| {
            let chi = if s >= chi_a && s <= chi_b { nu_j } else { 0.0 };
            Complex64::new(p.nu(s) - chi, 0.0) / (Complex64::new(s, 0.0) - z)
        };
        let left = self
            .rule
            .integrate_panels(&self.piece_breaks(p.z_min, p.ctx.z2, z, &[p.ctx.z2, p.ctx.z2 - 1.0]), kernel);
        let right = self
            .rule
            .integrate_panels(&self.piece_breaks(p.ctx.z1, p.z_max, z, &[p.ctx.z1, p.ctx.z1 + 1.0]), kernel);
        let integral = left + right;
        let log_term = match j {
            2 => -nu_j * (z - p.ctx.z2 + 1.0).ln(),
            1 => nu_j * (z - p.ctx.z1 - 1.0).ln(),
            _ => unreachable!(),
        };
        Ok(integral + log_term)
    }

    /// The real principal value lambda(z_j, z_j). The radial limit of
    /// `lambda(z, 1)` from either half-plane exceeds this by +-i pi nu1 (the
    /// log regularizer crosses its cut at z1); the j = 2 limit is continuous.
    pub fn lambda_at_stationary(&self, j: usize) -> f64 {
        let p = &self.profile;
        let zj = p.ctx.stationary(j);
        let nu_j = p.nu_at(j);
        let (chi_a, chi_b) = match j {
            2 => (p.ctx.z2 - 1.0, p.ctx.z2),
            1 => (p.ctx.z1, p.ctx.z1 + 1.0),
            _ => unreachable!(),
        };
        let kernel = |s: f64| {
            let chi = if s >= chi_a && s <= chi_b { nu_j } else { 0.0 };
            let d = s - zj;
            Complex64::new(if d.abs() < 1e-300 { 0.0 } else { (p.nu(s) - chi) / d }, 0.0)
        };
        let left = self.rule.integrate_panels(
            &refined_breaks(p.z_min, p.ctx.z2, &[p.ctx.z2, p.ctx.z2 - 1.0, zj], self.coarse, self.levels),
            kernel,
        );
        let right = self.rule.integrate_panels(
            &refined_breaks(p.ctx.z1, p.z_max, &[p.ctx.z1, p.ctx.z1 + 1.0, zj], self.coarse, self.levels),
            kernel,
        );
        (left + right).re
    }

    /// Factored form (z - z_j)^{sigma_j i nu_j} e^{i lambda(z, j)} with
    /// sigma_2 = +1, sigma_1 = -1; must match `delta` off the contour.
    pub fn delta_from_lambda(&self, z: C64, j: usize) -> Result<C64> {
        let p = &self.profile;
        let nu_j = p.nu_at(j);
        let sigma = if j == 2 { 1.0 } else { -1.0 };
        let power = (Complex64::new(0.0, sigma * nu_j) * (z - p.ctx.stationary(j)).ln()).exp();
        Ok(power * (Complex64::new(0.0, 1.0) * self.lambda(z, j)?).exp())
    }

    /// ((1 - rho^2)^{1/2}, (1 - rho^2)^{-1/2}) with rho = sup |r|.
    pub fn modulus_bounds(&self) -> (f64, f64) {
        let m = (1.0 - self.profile.sup_r * self.profile.sup_r).sqrt();
        (m, 1.0 / m)
    }
}
