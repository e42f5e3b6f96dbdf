//! `inf A(a) / S_g(a)` over the unit sphere.
//!
//! With `b_g` fixed the ratio is `A / (A + <a, b_g>)`, cheap to evaluate. The
//! search starts from the facet normals plus a uniform spread of directions
//! and refines the best candidates locally.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::weighted_barycenter;
use crate::polytope::LabelledPolytope;
use crate::quadrature::{weight::dotf, WeightFunction};
use crate::rational::to_f64_vec;

const ANGLE_SAMPLES: usize = 720;
const SPHERE_SAMPLES: usize = 4000;
const REFINED_STARTS: usize = 8;
const STEP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaResult {
    pub value: f64,
    pub direction: Vec<f64>,
    pub converged: bool,
}

struct Ratio<'a> {
    vertices: &'a [Vec<f64>],
    barycenter: Vec<f64>,
}

impl Ratio<'_> {
    fn eval(&self, a: &[f64]) -> f64 {
        let min = self
            .vertices
            .iter()
            .map(|v| dotf(a, v))
            .fold(f64::INFINITY, f64::min);
        let big_a = -min;
        big_a / (big_a + dotf(a, &self.barycenter))
    }
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// Toric delta: the infimum of `A/S_g` over toric valuations.
pub fn delta_toric(p: &LabelledPolytope, g: &WeightFunction) -> Result<DeltaResult> {
    let ratio = Ratio {
        vertices: p.vertices_f64(),
        barycenter: weighted_barycenter(p, g)?,
    };
    let result = match p.dim() {
        1 => {
            let (l, r) = (ratio.eval(&[-1.0]), ratio.eval(&[1.0]));
            let (value, d) = if r <= l { (r, 1.0) } else { (l, -1.0) };
            DeltaResult {
                value,
                direction: vec![d],
                converged: true,
            }
        }
        2 => search_circle(p, &ratio),
        _ => search_sphere(p, &ratio),
    };
    if !result.value.is_finite() {
        return Err(Error::NonConvergence {
            best: result.value,
            direction: result.direction,
        });
    }
    Ok(result)
}

fn facet_directions(p: &LabelledPolytope) -> Vec<Vec<f64>> {
    p.facets()
        .iter()
        .map(|f| {
            let mut v = to_f64_vec(&f.normal);
            normalize(&mut v);
            v
        })
        .collect()
}

fn best_starts(mut candidates: Vec<(f64, Vec<f64>)>) -> Vec<(f64, Vec<f64>)> {
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    candidates.truncate(REFINED_STARTS);
    candidates
}

fn search_circle(p: &LabelledPolytope, ratio: &Ratio) -> DeltaResult {
    let at = |t: f64| ratio.eval(&[t.cos(), t.sin()]);
    let mut angles: Vec<f64> = (0..ANGLE_SAMPLES)
        .map(|k| 2.0 * PI * k as f64 / ANGLE_SAMPLES as f64)
        .collect();
    angles.extend(facet_directions(p).iter().map(|v| v[1].atan2(v[0])));
    let starts = best_starts(angles.iter().map(|&t| (at(t), vec![t])).collect());
    let h = 2.0 * PI / ANGLE_SAMPLES as f64;
    let mut best = (f64::INFINITY, 0.0);
    for (v0, t0) in starts {
        let t0 = t0[0];
        let (t, v) = golden_section(&at, t0 - h, t0 + h);
        let cand = if v < v0 { (v, t) } else { (v0, t0) };
        if cand.0 < best.0 {
            best = cand;
        }
    }
    DeltaResult {
        value: best.0,
        direction: vec![best.1.cos(), best.1.sin()],
        converged: true,
    }
}

fn golden_section(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > STEP_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

fn fibonacci_sphere(n: usize, count: usize) -> Vec<Vec<f64>> {
    // Uniform directions in R^n: Fibonacci lattice for n = 3, a seeded
    // Gaussian sample otherwise.
    if n == 3 {
        let golden = PI * (3.0 - 5f64.sqrt());
        return (0..count)
            .map(|i| {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                let r = (1.0 - z * z).sqrt();
                let t = golden * i as f64;
                vec![r * t.cos(), r * t.sin(), z]
            })
            .collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..count)
        .map(|_| {
            let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            normalize(&mut v);
            v
        })
        .collect()
}

fn search_sphere(p: &LabelledPolytope, ratio: &Ratio) -> DeltaResult {
    let n = p.dim();
    let mut dirs = fibonacci_sphere(n, SPHERE_SAMPLES);
    dirs.extend(facet_directions(p));
    let starts = best_starts(dirs.into_iter().map(|d| (ratio.eval(&d), d)).collect());
    let mut best = (f64::INFINITY, vec![0.0; n]);
    let mut converged = true;
    for (v0, d0) in starts {
        let (v, d, ok) = pattern_search(ratio, v0, d0);
        if v < best.0 {
            best = (v, d);
            converged = ok;
        }
    }
    DeltaResult {
        value: best.0,
        direction: best.1,
        converged,
    }
}

/// Compass search on the sphere: coordinate moves followed by projection.
fn pattern_search(ratio: &Ratio, mut value: f64, mut x: Vec<f64>) -> (f64, Vec<f64>, bool) {
    let n = x.len();
    let mut step = 0.05;
    for _ in 0..100_000 {
        if step < STEP_TOL {
            return (value, x, true);
        }
        let mut improved = false;
        for d in 0..n {
            for s in [1.0, -1.0] {
                let mut y = x.clone();
                y[d] += s * step;
                normalize(&mut y);
                let v = ratio.eval(&y);
                if v < value {
                    value = v;
                    x = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (value, x, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_examples() {
        let p = LabelledPolytope::builtin("p1").unwrap();
        let d = delta_toric(&p, &WeightFunction::one()).unwrap();
        assert!((d.value - 1.0).abs() < 1e-15);
        let d = delta_toric(&p, &WeightFunction::exp_linear(vec![1.0])).unwrap();
        assert!((d.value - 1f64.tanh()).abs() < 1e-14);
        assert_eq!(d.direction, vec![1.0]);
    }

    #[test]
    fn symmetric_polygons_have_delta_one() {
        for name in ["p2", "p1xp1", "bl3p2"] {
            let p = LabelledPolytope::builtin(name).unwrap();
            let d = delta_toric(&p, &WeightFunction::one()).unwrap();
            assert!((d.value - 1.0).abs() < 1e-12, "{name}: {}", d.value);
        }
    }

    #[test]
    fn cube_in_three_dimensions() {
        let p = LabelledPolytope::from_vertices(
            &[
                [-1, -1, -1],
                [1, -1, -1],
                [-1, 1, -1],
                [1, 1, -1],
                [-1, -1, 1],
                [1, -1, 1],
                [-1, 1, 1],
                [1, 1, 1],
            ]
            .iter()
            .map(|v| crate::rational::qvec(v))
            .collect::<Vec<_>>(),
        )
        .unwrap();
        let g = WeightFunction::exp_linear(vec![0.5, 0.0, 0.0]);
        let d = delta_toric(&p, &g).unwrap();
        let b = weighted_barycenter(&p, &g).unwrap();
        // Minimum along the facet normal e_1: 1 / (1 + b_1).
        assert!((d.value - 1.0 / (1.0 + b[0])).abs() < 1e-9);
        assert!(d.converged);
    }
}
