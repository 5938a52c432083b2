//! The general two-component AKNS system, its named reductions, the Lax-pair
//! matrices, and residual / zero-curvature checkers.
//!
//! The flow parameters alpha..delta are purely imaginary; they are stored as
//! the real coefficient of i so the constraint is structural.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, Spectral, C64};

const I: C64 = Complex64::new(0.0, 1.0);

/// Flow parameters of the AKNS t-equation polynomial (az^3+bz^2+cz+d)sigma3,
/// each stored as the real coefficient of i.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AknsParams {
    pub alpha_im: f64,
    pub beta_im: f64,
    pub gamma_im: f64,
    pub delta_im: f64,
}

impl AknsParams {
    pub fn new(alpha_im: f64, beta_im: f64, gamma_im: f64, delta_im: f64) -> Result<Self> {
        let p = AknsParams { alpha_im, beta_im, gamma_im, delta_im };
        if ![alpha_im, beta_im, gamma_im, delta_im].iter().all(|v| v.is_finite()) {
            return Err(Error::Config("AKNS parameters must be finite".into()));
        }
        Ok(p)
    }

    /// Higher-order NLS flow: (alpha, beta, gamma, delta) = (i, -i, i, i).
    pub fn hnls() -> Self {
        AknsParams { alpha_im: 1.0, beta_im: -1.0, gamma_im: 1.0, delta_im: 1.0 }
    }

    /// KdV flow: alpha = -4i, rest zero (with r = -1).
    pub fn kdv() -> Self {
        AknsParams { alpha_im: -4.0, beta_im: 0.0, gamma_im: 0.0, delta_im: 0.0 }
    }

    /// mKdV flow: alpha = -4i, rest zero (with r = -q).
    pub fn mkdv() -> Self {
        AknsParams { alpha_im: -4.0, beta_im: 0.0, gamma_im: 0.0, delta_im: 0.0 }
    }

    /// Focusing NLS flow: beta = -2i, rest zero (with r = -q*).
    pub fn nls() -> Self {
        AknsParams { alpha_im: 0.0, beta_im: -2.0, gamma_im: 0.0, delta_im: 0.0 }
    }

    pub fn alpha(&self) -> C64 {
        I * self.alpha_im
    }
    pub fn beta(&self) -> C64 {
        I * self.beta_im
    }
    pub fn gamma(&self) -> C64 {
        I * self.gamma_im
    }
    pub fn delta(&self) -> C64 {
        I * self.delta_im
    }
}

/// Named reductions of the two-component system to scalar equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    Hnls,
    Kdv,
    Mkdv,
    Nls,
}

impl Reduction {
    pub fn params(&self) -> AknsParams {
        match self {
            Reduction::Hnls => AknsParams::hnls(),
            Reduction::Kdv => AknsParams::kdv(),
            Reduction::Mkdv => AknsParams::mkdv(),
            Reduction::Nls => AknsParams::nls(),
        }
    }

    /// The symmetry partner r(x) fixed by the reduction.
    pub fn r_of_q(&self, q: &[C64]) -> Vec<C64> {
        match self {
            Reduction::Hnls => q.iter().map(|v| v.conj()).collect(),
            Reduction::Kdv => vec![Complex64::new(-1.0, 0.0); q.len()],
            Reduction::Mkdv => q.iter().map(|v| -v).collect(),
            Reduction::Nls => q.iter().map(|v| -v.conj()).collect(),
        }
    }
}

/// A (q, r) pair sampled on a shared periodic grid.
#[derive(Debug, Clone)]
pub struct FieldPair {
    pub grid: Grid,
    pub q: Vec<C64>,
    pub r: Vec<C64>,
}

impl FieldPair {
    pub fn new(grid: Grid, q: Vec<C64>, r: Vec<C64>) -> Result<Self> {
        if q.len() != grid.n || r.len() != grid.n {
            return Err(Error::GridMismatch(format!(
                "field lengths {} / {} do not match grid n = {}",
                q.len(),
                r.len(),
                grid.n
            )));
        }
        Ok(FieldPair { grid, q, r })
    }

    pub fn from_q(grid: Grid, q: Vec<C64>, reduction: Reduction) -> Result<Self> {
        let r = reduction.r_of_q(&q);
        FieldPair::new(grid, q, r)
    }
}

/// 2x2 complex matrix with just the arithmetic the Lax machinery needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[Complex64::new(0.0, 0.0); 2]; 2]);

    pub fn sigma3() -> Mat2 {
        Mat2([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)],
        ])
    }

    pub fn scale(&self, c: C64) -> Mat2 {
        let mut out = *self;
        for row in &mut out.0 {
            for v in row {
                *v *= c;
            }
        }
        out
    }

    pub fn add(&self, other: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += other.0[i][j];
            }
        }
        out
    }

    pub fn sub(&self, other: &Mat2) -> Mat2 {
        let mut out = *self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= other.0[i][j];
            }
        }
        out
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &other.0;
        let mut out = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }

    pub fn commutator(&self, other: &Mat2) -> Mat2 {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn max_norm(&self) -> f64 {
        self.0.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }
}

/// Lax pair evaluated at a single point.
#[derive(Debug, Clone, Copy)]
pub struct LaxMatrices {
    pub u: Mat2,
    pub v: Mat2,
}

/// Pointwise values feeding the Lax matrices.
#[derive(Debug, Clone, Copy)]
pub struct LaxPoint {
    pub q: C64,
    pub q_x: C64,
    pub q_xx: C64,
    pub r: C64,
    pub r_x: C64,
    pub r_xx: C64,
}

/// U = -iz sigma3 + P and V = (az^3+bz^2+cz+d) sigma3 + Q with the
/// general z^2/z^1/z^0 blocks of the t-equation.
pub fn lax_matrices(pt: &LaxPoint, z: C64, params: &AknsParams) -> LaxMatrices {
    let (a, b, c, d) = (params.alpha(), params.beta(), params.gamma(), params.delta());
    let p = Mat2([[C64::new(0.0, 0.0), pt.q], [pt.r, C64::new(0.0, 0.0)]]);
    let u = Mat2::sigma3().scale(-I * z).add(&p);

    let ia2 = I * a * 0.5;
    let ia4 = I * a * 0.25;
    let m1 = Mat2([
        [ia2 * pt.q * pt.r, -ia2 * pt.q_x - b * pt.q],
        [ia2 * pt.r_x - b * pt.r, -ia2 * pt.q * pt.r],
    ]);
    let m0 = Mat2([
        [
            ia4 * (pt.q * pt.r_x - pt.r * pt.q_x) - 0.5 * b * pt.q * pt.r,
            -ia4 * (-pt.q_xx + 2.0 * pt.q * pt.q * pt.r) + 0.5 * b * pt.q_x - I * c * pt.q,
        ],
        [
            -ia4 * (-pt.r_xx + 2.0 * pt.q * pt.r * pt.r) - 0.5 * b * pt.r_x - I * c * pt.r,
            -ia4 * (pt.q * pt.r_x - pt.r * pt.q_x) + 0.5 * b * pt.q * pt.r,
        ],
    ]);
    let q_tilde = p.scale(I * a * z * z).sub(&m1.scale(I * z)).sub(&m0);
    let poly = ((a * z + b) * z + c) * z + d;
    let v = Mat2::sigma3().scale(poly).add(&q_tilde);
    LaxMatrices { u, v }
}

/// The t-equation matrix of the higher-order NLS flow written in the compact
/// P-polynomial form (independent route used to cross-check `lax_matrices`).
pub fn lax_v_hnls_compact(q: C64, q_x: C64, q_xx: C64, z: C64) -> Mat2 {
    let p = Mat2([[C64::new(0.0, 0.0), q], [q.conj(), C64::new(0.0, 0.0)]]);
    let px = Mat2([[C64::new(0.0, 0.0), q_x], [q_x.conj(), C64::new(0.0, 0.0)]]);
    let pxx = Mat2([[C64::new(0.0, 0.0), q_xx], [q_xx.conj(), C64::new(0.0, 0.0)]]);
    let s3 = Mat2::sigma3();
    let p2px_s3 = p.mul(&p).add(&px).mul(&s3);

    let mut qm = p.scale(-z * z);
    qm = qm.add(&p2px_s3.scale(I * z * 0.5));
    qm = qm.add(&p.commutator(&px).scale(C64::new(0.25, 0.0)));
    qm = qm.add(&p.mul(&p).mul(&p).scale(C64::new(-0.5, 0.0)));
    qm = qm.add(&pxx.scale(C64::new(0.25, 0.0)));
    qm = qm.add(&p.scale(z));
    qm = qm.add(&p2px_s3.scale(-I * 0.5));
    qm = qm.add(&p.scale(C64::new(-1.0, 0.0)));

    let poly = I * (z * z * z - z * z + z + C64::new(1.0, 0.0));
    s3.scale(poly).add(&qm)
}

/// Pointwise residual of both equations of the general system, with q_t, r_t
/// by centered difference over three snapshots and x-derivatives spectral.
pub fn residual_system3(
    prev: &FieldPair,
    cur: &FieldPair,
    next: &FieldPair,
    dt: f64,
    params: &AknsParams,
) -> Result<(Vec<C64>, Vec<C64>)> {
    if !(dt > 0.0) {
        return Err(Error::BadTimeStep(dt));
    }
    if prev.grid != cur.grid || next.grid != cur.grid {
        return Err(Error::GridMismatch("snapshots must share one grid".into()));
    }
    let sp = Spectral::new(cur.grid);
    let (a, b, c, d) = (params.alpha(), params.beta(), params.gamma(), params.delta());

    let qx = sp.derivative(&cur.q, 1);
    let qxx = sp.derivative(&cur.q, 2);
    let qxxx = sp.derivative(&cur.q, 3);
    let rx = sp.derivative(&cur.r, 1);
    let rxx = sp.derivative(&cur.r, 2);
    let rxxx = sp.derivative(&cur.r, 3);

    let n = cur.grid.n;
    let mut res_q = Vec::with_capacity(n);
    let mut res_r = Vec::with_capacity(n);
    for j in 0..n {
        let q = cur.q[j];
        let r = cur.r[j];
        let qt = (next.q[j] - prev.q[j]) / (2.0 * dt);
        let rt = (next.r[j] - prev.r[j]) / (2.0 * dt);
        let rhs_q =
            -I * a * 0.25 * (qxxx[j] - 6.0 * q * r * qx[j]) - 0.5 * b * (qxx[j] - 2.0 * q * q * r)
                + I * c * qx[j]
                + 2.0 * d * q;
        let rhs_r =
            -I * a * 0.25 * (rxxx[j] - 6.0 * q * r * rx[j]) + 0.5 * b * (rxx[j] - 2.0 * q * r * r)
                + I * c * rx[j]
                - 2.0 * d * r;
        res_q.push(qt - rhs_q);
        res_r.push(rt - rhs_r);
    }
    Ok((res_q, res_r))
}

/// Pointwise residual of the higher-order NLS equation in its displayed form
/// i q_t - (i/4) q_xxx + (3i/2)|q|^2 q_x + (1/2) q_xx + i q_x + 2 q - |q|^2 q.
pub fn residual_hnls(
    grid: Grid,
    prev: &[C64],
    cur: &[C64],
    next: &[C64],
    dt: f64,
) -> Result<Vec<C64>> {
    if !(dt > 0.0) {
        return Err(Error::BadTimeStep(dt));
    }
    if prev.len() != grid.n || cur.len() != grid.n || next.len() != grid.n {
        return Err(Error::GridMismatch("snapshot length != grid".into()));
    }
    let sp = Spectral::new(grid);
    let qx = sp.derivative(cur, 1);
    let qxx = sp.derivative(cur, 2);
    let qxxx = sp.derivative(cur, 3);
    let mut res = Vec::with_capacity(grid.n);
    for j in 0..grid.n {
        let q = cur[j];
        let qt = (next[j] - prev[j]) / (2.0 * dt);
        let aq2 = q.norm_sqr();
        res.push(
            I * qt - I * 0.25 * qxxx[j] + I * 1.5 * aq2 * qx[j] + 0.5 * qxx[j] + I * qx[j]
                + 2.0 * q
                - aq2 * q,
        );
    }
    Ok(res)
}

/// ||U_t - V_x + [U, V]||_max over the grid, with U_t by centered time
/// difference and V_x spectral. Small for exact solutions of the reduction.
pub fn zero_curvature_residual(
    grid: Grid,
    q_snapshots: [&[C64]; 3],
    dt: f64,
    z: C64,
    reduction: Reduction,
) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::BadTimeStep(dt));
    }
    for s in &q_snapshots {
        if s.len() != grid.n {
            return Err(Error::GridMismatch("snapshot length != grid".into()));
        }
    }
    let params = reduction.params();
    let sp = Spectral::new(grid);
    let [prev, cur, next] = q_snapshots;
    let r_cur = reduction.r_of_q(cur);
    let r_prev = reduction.r_of_q(prev);
    let r_next = reduction.r_of_q(next);

    let qx = sp.derivative(cur, 1);
    let qxx = sp.derivative(cur, 2);
    let rx = sp.derivative(&r_cur, 1);
    let rxx = sp.derivative(&r_cur, 2);

    // V entrywise on the grid, then V_x spectrally per entry
    let n = grid.n;
    let mut v_entries: [Vec<C64>; 4] = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    let mut us: Vec<Mat2> = Vec::with_capacity(n);
    let mut vs: Vec<Mat2> = Vec::with_capacity(n);
    for j in 0..n {
        let pt = LaxPoint {
            q: cur[j],
            q_x: qx[j],
            q_xx: qxx[j],
            r: r_cur[j],
            r_x: rx[j],
            r_xx: rxx[j],
        };
        let lax = lax_matrices(&pt, z, &params);
        for (slot, e) in v_entries.iter_mut().zip([
            lax.v.0[0][0],
            lax.v.0[0][1],
            lax.v.0[1][0],
            lax.v.0[1][1],
        ]) {
            slot.push(e);
        }
        us.push(lax.u);
        vs.push(lax.v);
    }
    let vx: Vec<Vec<C64>> = v_entries.iter().map(|col| sp.derivative(col, 1)).collect();

    let mut worst = 0.0f64;
    for j in 0..n {
        let ut = Mat2([
            [C64::new(0.0, 0.0), (next[j] - prev[j]) / (2.0 * dt)],
            [(r_next[j] - r_prev[j]) / (2.0 * dt), C64::new(0.0, 0.0)],
        ]);
        let vxm = Mat2([[vx[0][j], vx[1][j]], [vx[2][j], vx[3][j]]]);
        let res = ut.sub(&vxm).add(&us[j].commutator(&vs[j]));
        worst = worst.max(res.max_norm());
    }
    Ok(worst)
}

/// Exact plane-wave dispersion of the higher-order NLS flow:
/// q = A e^{i(kx - w t)} solves the equation iff w = k^3/4 + k^2/2 + k - 2 + A^2 (3k/2 + 1).
pub fn plane_wave_omega(k: f64, amplitude: f64) -> f64 {
    k * k * k / 4.0 + k * k / 2.0 + k - 2.0 + amplitude * amplitude * (1.5 * k + 1.0)
}
