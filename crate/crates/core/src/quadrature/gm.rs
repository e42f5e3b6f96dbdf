//! Grundmann–Möller cubature on simplices.

use crate::polytope::Simplex;
use crate::quadrature::weight::for_each_composition;

/// One rule of degree `2s + 1` on an `n`-simplex: barycentric points and weights
/// summing to one.
#[derive(Debug, Clone)]
pub struct GmRule {
    pub s: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl GmRule {
    pub fn new(n: usize, s: usize) -> GmRule {
        let d = 2 * s + 1;
        let mut points = Vec::new();
        let mut weights = Vec::new();
        let fact = |k: usize| (1..=k).map(|j| j as f64).product::<f64>();
        for i in 0..=s {
            let denom = (d + n - 2 * i) as f64;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            // Normalized so the weights sum to one rather than to 1/n!.
            let w = sign * f64::powi(2.0, -(2 * s as i32)) * denom.powi(d as i32) * fact(n)
                / (fact(i) * fact(d + n - i));
            for_each_composition(s - i, n + 1, |beta| {
                points.push(beta.iter().map(|&b| (2 * b + 1) as f64 / denom).collect());
                weights.push(w);
            });
        }
        GmRule { s, points, weights }
    }

    pub fn degree(&self) -> usize {
        2 * self.s + 1
    }

    /// Applies the rule to `f` on `simplex`.
    pub fn apply(&self, simplex: &Simplex, f: &dyn Fn(&[f64]) -> f64) -> f64 {
        let verts = &simplex.points_f64;
        let n = verts[0].len();
        let mut x = vec![0.0; n];
        let mut sum = 0.0;
        for (bary, w) in self.points.iter().zip(&self.weights) {
            x.iter_mut().for_each(|xi| *xi = 0.0);
            for (lambda, v) in bary.iter().zip(verts) {
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi += lambda * vi;
                }
            }
            sum += w * f(&x);
        }
        sum * simplex.volume_f64
    }
}

/// Raises the degree until two consecutive rules agree to `tol`. Returns the
/// value, the final difference and whether `tol` was met.
pub fn adaptive(
    simplex: &Simplex,
    f: &dyn Fn(&[f64]) -> f64,
    start: usize,
    max_s: usize,
    tol: f64,
) -> (f64, f64, bool) {
    let n = simplex.points_f64.len() - 1;
    let start = start.max(1);
    let mut prev = GmRule::new(n, start - 1).apply(simplex, f);
    let mut last = (prev, f64::INFINITY, false);
    for s in start..=max_s.max(start) {
        let cur = GmRule::new(n, s).apply(simplex, f);
        let err = (cur - prev).abs();
        last = (cur, err, err <= tol);
        if last.2 {
            break;
        }
        prev = cur;
    }
    last
}
