//! Gauss–Legendre rules and composite panel integration.

use std::f64::consts::PI;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            // Newton iteration from the Chebyshev-like initial guess
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[lo, hi]`.
    pub fn mapped(&self, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        self.mapped(lo, hi).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over the segments between consecutive `breakpoints`,
    /// each split into panels no longer than `max_panel`.
    pub fn integrate_composite<F: FnMut(f64) -> f64>(
        &self,
        breakpoints: &[f64],
        max_panel: f64,
        mut f: F,
    ) -> f64 {
        let mut total = 0.0;
        for pair in breakpoints.windows(2) {
            for (lo, hi) in panels(pair[0], pair[1], max_panel) {
                total += self.integrate(lo, hi, &mut f);
            }
        }
        total
    }
}

/// Splits `[lo, hi]` into equal panels no longer than `max_panel`.
pub fn panels(lo: f64, hi: f64, max_panel: f64) -> impl Iterator<Item = (f64, f64)> {
    let len = hi - lo;
    let count = if len > 0.0 {
        ((len / max_panel).ceil() as usize).max(1)
    } else {
        0
    };
    let step = if count > 0 { len / count as f64 } else { 0.0 };
    (0..count).map(move |i| {
        let a = lo + step * i as f64;
        let b = if i + 1 == count { hi } else { lo + step * (i + 1) as f64 };
        (a, b)
    })
}

/// Sorted, deduplicated breakpoints restricted to `[lo, hi]`, endpoints included.
pub fn breakpoints_within(lo: f64, hi: f64, extra: &[f64]) -> Vec<f64> {
    let mut pts: Vec<f64> = std::iter::once(lo)
        .chain(extra.iter().copied().filter(|&x| x > lo && x < hi))
        .chain(std::iter::once(hi))
        .collect();
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + a.abs()));
    pts
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 16, 40] {
            let g = GaussLegendre::new(n);
            let s: f64 = g.weights().iter().sum();
            assert_abs_diff_eq!(s, 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let g = GaussLegendre::new(6);
        for deg in 0..12 {
            let v = g.integrate(-1.0, 1.0, |x| x.powi(deg));
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert_abs_diff_eq!(v, exact, epsilon = 1e-14);
        }
    }

    #[test]
    fn composite_exponential() {
        let g = GaussLegendre::new(12);
        let v = g.integrate_composite(&[0.0, 1.0, 30.0], 2.0, |x| (-x).exp());
        assert_abs_diff_eq!(v, 1.0 - (-30f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn breakpoints_sorted_and_clipped() {
        let b = breakpoints_within(-2.0, 3.0, &[5.0, 1.0, -1.0, 1.0, -7.0]);
        assert_eq!(b, vec![-2.0, -1.0, 1.0, 3.0]);
    }
}
