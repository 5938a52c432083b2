//! Composite Gauss-Legendre quadrature with panel refinement, plus the
//! principal-value helpers the Cauchy integrals need.

use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial. Deterministic and accurate to machine precision for
/// the small orders used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and P_n' by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

#[derive(Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        GaussRule { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Integrate over consecutive panels given by `breaks`.
    pub fn integrate_panels<F: FnMut(f64) -> Complex64>(
        &self,
        breaks: &[f64],
        mut f: F,
    ) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for w in breaks.windows(2) {
            if w[1] > w[0] {
                acc += self.integrate(w[0], w[1], &mut f);
            }
        }
        acc
    }

    pub fn integrate_real<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.integrate(a, b, |x| Complex64::new(f(x), 0.0)).re
    }
}

/// Panel break points on [a, b] geometrically refined toward `point`
/// (which may lie at either end or inside). `coarse` equal panels are laid
/// first, then each panel adjacent to `point` is split `levels` times.
pub fn refined_breaks(a: f64, b: f64, points: &[f64], coarse: usize, levels: usize) -> Vec<f64> {
    let mut breaks: Vec<f64> = (0..=coarse)
        .map(|i| a + (b - a) * i as f64 / coarse as f64)
        .collect();
    for &p in points {
        if p > a && p < b {
            breaks.push(p);
        }
    }
    breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
    breaks.dedup();
    for _ in 0..levels {
        let mut extra = Vec::new();
        for &p in points {
            // split the panel immediately left and right of p
            for w in breaks.windows(2) {
                let touches = (w[0] - p).abs() < 1e-300
                    || (w[1] - p).abs() < 1e-300
                    || (w[0] < p && p < w[1]);
                if touches {
                    extra.push(0.5 * (w[0] + w[1]));
                }
            }
        }
        breaks.extend(extra);
        breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
        breaks.dedup();
    }
    breaks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        let rule = GaussRule::new(8);
        // degree-15 polynomial is exact for 8-point Gauss
        let val = rule.integrate_real(0.0, 1.0, |x| x.powi(15));
        assert!((val - 1.0 / 16.0).abs() < 1e-14);
    }

    #[test]
    fn panel_integration_of_smooth_function() {
        let rule = GaussRule::new(16);
        let breaks = refined_breaks(0.0, std::f64::consts::PI, &[1.0], 8, 2);
        let val = rule.integrate_panels(&breaks, |x| Complex64::new(x.sin(), 0.0));
        assert!((val.re - 2.0).abs() < 1e-13);
    }

    #[test]
    fn weights_sum_to_two() {
        for n in [4, 12, 24, 40] {
            let (_, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        }
    }
}
