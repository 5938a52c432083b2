//! Small-stencil polynomial interpolation on uniform grids.
//!
//! Stationary points rarely land on grid nodes; values like r(z_j) and the
//! evolution field at x = xi*t are read off through a 4-point (cubic)
//! Lagrange stencil.

use num_complex::Complex64;

/// Cubic Lagrange interpolation through four arbitrary abscissae.
pub fn lagrange4(xs: &[f64; 4], ys: &[Complex64; 4], x: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..4 {
        let mut w = 1.0;
        for j in 0..4 {
            if i != j {
                w *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        acc += w * ys[i];
    }
    acc
}

/// Index of the leftmost point of a centered 4-point stencil for `x` on the
/// uniform grid `x_j = x0 + j h` with `n` points (clamped at the ends).
fn stencil_start(x0: f64, h: f64, n: usize, x: f64) -> usize {
    let j = ((x - x0) / h).floor() as isize;
    (j - 1).clamp(0, n as isize - 4) as usize
}

/// 4-point interpolation of complex samples on a uniform grid.
pub fn interp_uniform(x0: f64, h: f64, ys: &[Complex64], x: f64) -> Complex64 {
    let s = stencil_start(x0, h, ys.len(), x);
    let xs = [
        x0 + s as f64 * h,
        x0 + (s + 1) as f64 * h,
        x0 + (s + 2) as f64 * h,
        x0 + (s + 3) as f64 * h,
    ];
    let vals = [ys[s], ys[s + 1], ys[s + 2], ys[s + 3]];
    lagrange4(&xs, &vals, x)
}

/// 4-point interpolation of real samples on a uniform grid.
pub fn interp_uniform_real(x0: f64, h: f64, ys: &[f64], x: f64) -> f64 {
    let s = stencil_start(x0, h, ys.len(), x);
    let xs = [
        x0 + s as f64 * h,
        x0 + (s + 1) as f64 * h,
        x0 + (s + 2) as f64 * h,
        x0 + (s + 3) as f64 * h,
    ];
    let vals = [
        Complex64::new(ys[s], 0.0),
        Complex64::new(ys[s + 1], 0.0),
        Complex64::new(ys[s + 2], 0.0),
        Complex64::new(ys[s + 3], 0.0),
    ];
    lagrange4(&xs, &vals, x).re
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubics_exactly() {
        let f = |x: f64| 2.0 - x + 3.0 * x * x - 0.5 * x * x * x;
        let ys: Vec<Complex64> = (0..16).map(|j| Complex64::new(f(j as f64 * 0.25), 0.0)).collect();
        for &x in &[0.1, 1.03, 2.9, 3.4] {
            let v = interp_uniform(0.0, 0.25, &ys, x);
            assert!((v.re - f(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn fourth_order_convergence_on_smooth_data() {
        let f = |x: f64| (1.5 * x).sin();
        let x = 1.33; // fixed physical point, off any node and away from zeros of f''''
        let err = |h: f64| {
            let ys: Vec<f64> = (0..256).map(|j| f(j as f64 * h)).collect();
            (interp_uniform_real(0.0, h, &ys, x) - f(x)).abs()
        };
        let e1 = err(0.2);
        let e2 = err(0.1);
        assert!(e2 < e1 / 10.0, "e1 = {e1}, e2 = {e2}");
    }
}
