//! The explicit long-time formula along rays xi = x/t > 2/3.
//!
//! Each stationary point contributes a parabolic-cylinder constant beta12
//! with |beta12|^2 = nu(z_j); the two closed forms are complex-conjugate
//! twins and each stationary point carries the form matching the sign of
//! theta'' there: z2 (theta'' > 0) takes the e^{+i pi/4} / Gamma(-i nu)
//! form, z1 (theta'' < 0) the e^{-i pi/4} / Gamma(+i nu) form, both built
//! from the modified reflection
//!   r_{z_j} = r(z_j) exp(-2 i lambda_jj + 2 i t theta(z_j)
//!                        + sign(theta''_j) i nu_j ln(2 t |theta''_j|)).
//! The leading coefficient is
//!   q(x, t) ~ 2 t^{-1/2} [ c beta(z1)/sqrt(2|theta''_1|)
//!                          + beta(z2)/sqrt(2|theta''_2|) ],
//! where the branch constant c is 1 under convention A and i under
//! convention B (the alternative reading of sqrt(2 theta''(z1)) for
//! negative curvature). The ray comparison against the direct solver is
//! the arbiter between the two conventions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::akns::Mat2;
use crate::delta::{nu_profile, DeltaSolver};
use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::grid::C64;
use crate::phase::{require_two_points, theta, PhaseContext};
use crate::scattering::ScatteringData;

const I: C64 = Complex64::new(0.0, 1.0);

/// Branch convention for the z1 (negative-curvature) contribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    A,
    B,
}

impl Convention {
    /// Compensating phase applied to the z1 term.
    pub fn z1_phase(&self) -> C64 {
        match self {
            Convention::A => Complex64::new(1.0, 0.0),
            Convention::B => I,
        }
    }
}

impl std::fmt::Display for Convention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Convention::A => write!(f, "a"),
            Convention::B => write!(f, "b"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AsymOptions {
    pub convention: Convention,
    pub t_min: f64,
    pub xi_margin: f64,
}

impl Default for AsymOptions {
    fn default() -> Self {
        AsymOptions { convention: Convention::A, t_min: 10.0, xi_margin: 0.05 }
    }
}

/// Everything the formula needs at one stationary point and one time.
#[derive(Debug, Clone, Copy)]
pub struct PointConstants {
    pub z: f64,
    pub nu: f64,
    pub lambda_jj: f64,
    pub theta_j: f64,
    pub theta_pp_j: f64,
    pub r_at_zj: C64,
    pub r_mod: C64,
    pub beta12: C64,
}

#[derive(Debug, Clone, Copy)]
pub struct AsymptoticConstants {
    pub xi: f64,
    pub t: f64,
    /// z1, the negative-curvature point
    pub p1: PointConstants,
    /// z2, the positive-curvature point
    pub p2: PointConstants,
}

/// Modified reflection coefficient at a stationary point. The sign of the
/// nu log(2t|theta''|) phase follows the sign of theta'' and the logarithm
/// always takes |theta''|, which keeps |r_mod| = |r(z_j)| exactly.
pub fn modified_reflection(
    r_at_zj: C64,
    lambda_jj: f64,
    theta_j: f64,
    theta_pp_j: f64,
    nu_j: f64,
    t: f64,
) -> Result<C64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    if theta_pp_j == 0.0 {
        return Err(Error::DegenerateRay);
    }
    let log_term = (2.0 * t * theta_pp_j.abs()).ln();
    let phase = -2.0 * lambda_jj + 2.0 * t * theta_j + theta_pp_j.signum() * nu_j * log_term;
    Ok(r_at_zj * Complex64::from_polar(1.0, phase))
}

/// The two closed forms of the parabolic-cylinder constant, both with
/// |beta12|^2 = nu. `j = 1` selects the e^{+i pi/4} / Gamma(-i nu) form,
/// `j = 2` its conjugate twin e^{-i pi/4} / Gamma(+i nu).
pub fn beta12(j: usize, r_mod: C64, nu: f64) -> C64 {
    if nu == 0.0 || r_mod.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let front = (2.0 * std::f64::consts::PI).sqrt() * (-std::f64::consts::PI * nu / 2.0).exp();
    match j {
        1 => {
            front * Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)
                / (r_mod * gamma(Complex64::new(0.0, -nu)))
        }
        2 => {
            front * Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4)
                / (r_mod * gamma(Complex64::new(0.0, nu)))
        }
        _ => panic!("beta12 form index must be 1 or 2"),
    }
}

/// beta21 paired with beta12 through beta12 * beta21 = nu; with
/// |beta12|^2 = nu this is just the conjugate.
pub fn beta21(beta12: C64, nu: f64) -> C64 {
    if beta12.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    nu / beta12
}

/// Leading coefficient matrix M1 of the local-model solution: zero diagonal,
/// (1,2) entry -i t^{-1/2} [c beta(z1)/sqrt(2|th''1|) + beta(z2)/sqrt(2|th''2|)],
/// (2,1) entry the complex conjugate.
pub fn m1_lo(constants: &AsymptoticConstants, t: f64, convention: Convention) -> Result<Mat2> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    if constants.p1.theta_pp_j == 0.0 || constants.p2.theta_pp_j == 0.0 {
        return Err(Error::DegenerateRay);
    }
    let term1 = convention.z1_phase() * constants.p1.beta12
        / (2.0 * constants.p1.theta_pp_j.abs()).sqrt();
    let term2 = constants.p2.beta12 / (2.0 * constants.p2.theta_pp_j.abs()).sqrt();
    let entry12 = -I * t.powf(-0.5) * (term1 + term2);
    let mut m = Mat2::ZERO;
    m.0[0][1] = entry12;
    m.0[1][0] = entry12.conj();
    Ok(m)
}

/// One evaluated point of the asymptotic formula.
#[derive(Debug, Clone, Copy)]
pub struct AsymptoticValue {
    pub x: f64,
    pub t: f64,
    pub xi: f64,
    pub q: C64,
    /// triangle bound 2 t^{-1/2} (sqrt(nu1/(2|th''1|)) + sqrt(nu2/(2|th''2|)))
    pub leading_magnitude: f64,
    /// declared order of the dropped remainder
    pub error_order: &'static str,
}

/// Per-ray cache: scattering-derived constants that do not move with t.
#[derive(Debug, Clone)]
pub struct RayAsymptotics {
    pub ctx: PhaseContext,
    pub convention: Convention,
    pub t_min: f64,
    nu1: f64,
    nu2: f64,
    lambda1: f64,
    lambda2: f64,
    r1: C64,
    r2: C64,
}

impl RayAsymptotics {
    pub fn prepare(data: &ScatteringData, xi: f64, opts: &AsymOptions) -> Result<Self> {
        let ctx = require_two_points(xi, opts.xi_margin)?;
        let profile = nu_profile(data, &ctx)?;
        let solver = DeltaSolver::new(profile);
        let lambda1 = solver.lambda_at_stationary(1);
        let lambda2 = solver.lambda_at_stationary(2);
        let p = solver.profile();
        Ok(RayAsymptotics {
            ctx,
            convention: opts.convention,
            t_min: opts.t_min,
            nu1: p.nu_z1,
            nu2: p.nu_z2,
            lambda1,
            lambda2,
            r1: data.r_at(ctx.z1),
            r2: data.r_at(ctx.z2),
        })
    }

    pub fn constants(&self, t: f64) -> Result<AsymptoticConstants> {
        let th1 = theta(Complex64::new(self.ctx.z1, 0.0), self.ctx.xi).re;
        let th2 = theta(Complex64::new(self.ctx.z2, 0.0), self.ctx.xi).re;
        let r_mod1 =
            modified_reflection(self.r1, self.lambda1, th1, self.ctx.theta_pp_1, self.nu1, t)?;
        let r_mod2 =
            modified_reflection(self.r2, self.lambda2, th2, self.ctx.theta_pp_2, self.nu2, t)?;
        Ok(AsymptoticConstants {
            xi: self.ctx.xi,
            t,
            p1: PointConstants {
                z: self.ctx.z1,
                nu: self.nu1,
                lambda_jj: self.lambda1,
                theta_j: th1,
                theta_pp_j: self.ctx.theta_pp_1,
                r_at_zj: self.r1,
                r_mod: r_mod1,
                beta12: beta12(2, r_mod1, self.nu1),
            },
            p2: PointConstants {
                z: self.ctx.z2,
                nu: self.nu2,
                lambda_jj: self.lambda2,
                theta_j: th2,
                theta_pp_j: self.ctx.theta_pp_2,
                r_at_zj: self.r2,
                r_mod: r_mod2,
                beta12: beta12(1, r_mod2, self.nu2),
            },
        })
    }

    pub fn eval(&self, t: f64) -> Result<AsymptoticValue> {
        if t < self.t_min {
            return Err(Error::BelowMinimumTime { t, t_min: self.t_min });
        }
        let constants = self.constants(t)?;
        let m1 = m1_lo(&constants, t, self.convention)?;
        let q = 2.0 * I * m1.0[0][1];
        let bound = 2.0
            * t.powf(-0.5)
            * ((self.nu1 / (2.0 * self.ctx.theta_pp_1.abs())).sqrt()
                + (self.nu2 / (2.0 * self.ctx.theta_pp_2.abs())).sqrt());
        Ok(AsymptoticValue {
            x: self.ctx.xi * t,
            t,
            xi: self.ctx.xi,
            q,
            leading_magnitude: bound,
            error_order: "O(t^-3/4)",
        })
    }
}

/// One-shot evaluation at (x, t): builds the ray context and all constants.
pub fn q_asymptotic(
    x: f64,
    t: f64,
    data: &ScatteringData,
    opts: &AsymOptions,
) -> Result<AsymptoticValue> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    if t < opts.t_min {
        return Err(Error::BelowMinimumTime { t, t_min: opts.t_min });
    }
    let ray = RayAsymptotics::prepare(data, x / t, opts)?;
    ray.eval(t)
}
