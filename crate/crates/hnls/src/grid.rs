//! Uniform periodic grids and pseudo-spectral differentiation.
//!
//! All fields live on `x_j = -L/2 + j h`, `h = L/N`, with `N` a power of two.
//! Fourier modes follow the usual FFT layout `k_m = 2*pi*m/L` for
//! `m = 0..N/2-1, -N/2..-1`.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::error::{Error, Result};

pub type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Grid {
    pub n: usize,
    pub length: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::BadGridLength(n));
        }
        if !(length > 0.0) {
            return Err(Error::Config(format!("grid length must be positive, got {length}")));
        }
        Ok(Grid { n, length })
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn xs(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n).map(|j| -0.5 * self.length + j as f64 * h).collect()
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let scale = 2.0 * std::f64::consts::PI / self.length;
        (0..self.n)
            .map(|m| {
                let m = if m < self.n / 2 { m as i64 } else { m as i64 - self.n as i64 };
                scale * m as f64
            })
            .collect()
    }

    /// Trapezoidal (here: periodic rectangle) L2 norm squared.
    pub fn norm2_sq(&self, f: &[C64]) -> f64 {
        self.spacing() * f.iter().map(|v| v.norm_sqr()).sum::<f64>()
    }
}

/// FFT plans plus cached wavenumbers for one grid.
pub struct Spectral {
    pub grid: Grid,
    k: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Spectral {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.n);
        let inv = planner.plan_fft_inverse(grid.n);
        Spectral { grid, k: grid.wavenumbers(), fwd, inv }
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.k
    }

    pub fn forward(&self, f: &[C64]) -> Vec<C64> {
        let mut buf = f.to_vec();
        self.fwd.process(&mut buf);
        buf
    }

    /// Inverse transform including the 1/N normalization.
    pub fn inverse(&self, fhat: &[C64]) -> Vec<C64> {
        let mut buf = fhat.to_vec();
        self.inv.process(&mut buf);
        let scale = 1.0 / self.grid.n as f64;
        for v in &mut buf {
            *v *= scale;
        }
        buf
    }

    /// Spectral derivative of integer order.
    pub fn derivative(&self, f: &[C64], order: u32) -> Vec<C64> {
        let mut fhat = self.forward(f);
        for (v, &k) in fhat.iter_mut().zip(&self.k) {
            *v *= (C64::new(0.0, k)).powu(order);
        }
        self.inverse(&fhat)
    }

    /// Fraction of spectral mass (max modulus) sitting in the top third of
    /// the resolved band. Small values certify the field is resolved.
    pub fn tail_fraction(&self, f: &[C64]) -> f64 {
        let fhat = self.forward(f);
        let kmax = self.k.iter().cloned().fold(0.0, f64::max);
        let cut = 2.0 / 3.0 * kmax;
        let mut peak = 0.0f64;
        let mut tail = 0.0f64;
        for (v, &k) in fhat.iter().zip(&self.k) {
            let a = v.norm();
            peak = peak.max(a);
            if k.abs() >= cut {
                tail = tail.max(a);
            }
        }
        if peak == 0.0 {
            0.0
        } else {
            tail / peak
        }
    }

    /// Zero all modes with |k| above `fraction * k_max` (in place, spectral side).
    pub fn dealias(&self, fhat: &mut [C64], fraction: f64) {
        let kmax = self.k.iter().cloned().fold(0.0, f64::max);
        let cut = fraction * kmax;
        for (v, &k) in fhat.iter_mut().zip(&self.k) {
            if k.abs() > cut {
                *v = C64::new(0.0, 0.0);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_plane_wave() {
        let grid = Grid::new(128, 2.0 * std::f64::consts::PI).unwrap();
        let sp = Spectral::new(grid);
        let f: Vec<C64> = grid.xs().iter().map(|&x| C64::new(0.0, 3.0 * x).exp()).collect();
        let df = sp.derivative(&f, 1);
        for (d, v) in df.iter().zip(&f) {
            let expect = C64::new(0.0, 3.0) * v;
            assert!((d - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Grid::new(100, 1.0).is_err());
        assert!(Grid::new(4, 1.0).is_err());
    }

    #[test]
    fn third_derivative_matches_symbol() {
        let grid = Grid::new(64, 4.0 * std::f64::consts::PI).unwrap();
        let sp = Spectral::new(grid);
        let f: Vec<C64> = grid.xs().iter().map(|&x| C64::new(0.0, -2.0 * x).exp()).collect();
        let d3 = sp.derivative(&f, 3);
        for (d, v) in d3.iter().zip(&f) {
            let expect = C64::new(0.0, -2.0).powu(3) * v;
            assert!((d - expect).norm() < 1e-9);
        }
    }

    #[test]
    fn mass_of_sech() {
        // integral of sech^2 over the line is 2
        let grid = Grid::new(2048, 80.0).unwrap();
        let f: Vec<C64> = grid.xs().iter().map(|&x| C64::new(1.0 / x.cosh(), 0.0)).collect();
        assert!((grid.norm2_sq(&f) - 2.0).abs() < 1e-10);
    }
}
