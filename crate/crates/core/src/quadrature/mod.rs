//! Integrals of weights and weighted moments over a triangulated polytope.
//!
//! The default path is closed form on every simplex of the triangulation:
//! exact Dirichlet moments for polynomial integrands and divided differences
//! of `exp` for the exponential kind. Grundmann–Möller cubature is available
//! for comparison and for integrands with no closed form.

pub mod gm;
pub mod simplex;
pub mod weight;

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::polytope::{LabelledPolytope, Simplex};
use crate::rational::Q;

pub use weight::{Monomial, WeightBounds, WeightFunction};

/// Integration backend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Closed-form simplex formulas.
    Exact,
    /// Grundmann–Möller of degree `2s + 1`, raised until consecutive degrees
    /// agree to the tolerance.
    GrundmannMoller { s: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    pub method: Method,
    /// Absolute tolerance per simplex for the cubature path.
    pub tolerance: f64,
    /// Highest `s` tried by the cubature path.
    pub max_s: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            method: Method::Exact,
            tolerance: 1e-10,
            max_s: 12,
        }
    }
}

impl Options {
    pub fn cubature() -> Options {
        Options {
            method: Method::GrundmannMoller { s: 3 },
            ..Options::default()
        }
    }
}

/// A value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// `int_P g dx`.
pub fn integrate(p: &LabelledPolytope, g: &WeightFunction) -> Result<Integral> {
    moment(p, g, &vec![0; p.dim()])
}

/// `int_P x^alpha g(x) dx`.
pub fn moment(p: &LabelledPolytope, g: &WeightFunction, alpha: &[u32]) -> Result<Integral> {
    moment_with(p, g, alpha, &Options::default())
}

pub fn moment_with(
    p: &LabelledPolytope,
    g: &WeightFunction,
    alpha: &[u32],
    opts: &Options,
) -> Result<Integral> {
    g.check_dim(p.dim())?;
    moment_over(p.simplices(), g, alpha, opts)
}

/// `int x^alpha g(x) dx` over the union of `simplices`.
pub fn moment_over(
    simplices: &[Simplex],
    g: &WeightFunction,
    alpha: &[u32],
    opts: &Options,
) -> Result<Integral> {
    let parts: Vec<Integral> = simplices
        .par_iter()
        .map(|s| simplex_moment(s, g, alpha, opts))
        .collect::<Result<_>>()?;
    Ok(sum_integrals(&parts))
}

/// Integrates an arbitrary smooth function by adaptive cubature.
pub fn integrate_fn(
    simplices: &[Simplex],
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    opts: &Options,
) -> Result<Integral> {
    let start = match opts.method {
        Method::GrundmannMoller { s } => s,
        Method::Exact => 3,
    };
    let parts: Vec<Integral> = simplices
        .par_iter()
        .map(|s| {
            let (value, error, ok) = gm::adaptive(s, f, start, opts.max_s, opts.tolerance);
            if ok {
                Ok(Integral { value, error })
            } else {
                Err(Error::QuadratureNotConverged {
                    estimate: error,
                    tolerance: opts.tolerance,
                })
            }
        })
        .collect::<Result<_>>()?;
    Ok(sum_integrals(&parts))
}

/// The `n` first moments `int x_i g dx`.
pub fn first_moments(p: &LabelledPolytope, g: &WeightFunction) -> Result<Vec<f64>> {
    let n = p.dim();
    (0..n)
        .map(|i| {
            let mut alpha = vec![0; n];
            alpha[i] = 1;
            moment(p, g, &alpha).map(|m| m.value)
        })
        .collect()
}

/// The matrix of second moments `int x_i x_j g dx`.
pub fn second_moments(p: &LabelledPolytope, g: &WeightFunction) -> Result<Vec<Vec<f64>>> {
    let n = p.dim();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let mut alpha = vec![0; n];
            alpha[i] += 1;
            alpha[j] += 1;
            let v = moment(p, g, &alpha)?.value;
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

/// Exact `int_P x^alpha dx`.
pub fn monomial_exact(p: &LabelledPolytope, alpha: &[u32]) -> Q {
    p.simplices()
        .iter()
        .map(|s| simplex::monomial_integral_exact(s, alpha))
        .fold(Q::zero(), |acc, v| acc + v)
}

fn simplex_moment(
    s: &Simplex,
    g: &WeightFunction,
    alpha: &[u32],
    opts: &Options,
) -> Result<Integral> {
    match opts.method {
        Method::Exact => Ok(exact_moment(s, g, alpha)),
        Method::GrundmannMoller { s: start } => {
            let f = |x: &[f64]| {
                let mono: f64 = alpha.iter().zip(x).map(|(&k, xi)| xi.powi(k as i32)).product();
                mono * g.eval(x)
            };
            let (value, error, ok) = gm::adaptive(s, &f, start, opts.max_s, opts.tolerance);
            if ok {
                Ok(Integral { value, error })
            } else {
                Err(Error::QuadratureNotConverged {
                    estimate: error,
                    tolerance: opts.tolerance,
                })
            }
        }
    }
}

fn exact_moment(s: &Simplex, g: &WeightFunction, alpha: &[u32]) -> Integral {
    let poly = |a: &[u32]| simplex::monomial_exp_integral(s, a, None);
    let shifted = |d: usize, k: u32| -> Vec<u32> {
        let mut a = alpha.to_vec();
        a[d] += k;
        a
    };
    let (value, scale) = match g {
        WeightFunction::Constant(c) => {
            let (v, a) = poly(alpha);
            (c * v, c.abs() * a)
        }
        WeightFunction::Affine { a0, b } => {
            let (v0, s0) = poly(alpha);
            let mut value = a0 * v0;
            let mut scale = a0.abs() * s0;
            for (d, bd) in b.iter().enumerate() {
                if *bd != 0.0 {
                    let (v, a) = poly(&shifted(d, 1));
                    value += bd * v;
                    scale += bd.abs() * a;
                }
            }
            (value, scale)
        }
        WeightFunction::ExpAffine { a0, b } => {
            let (v, a) = simplex::monomial_exp_integral(s, alpha, Some(b));
            let e = a0.exp();
            (e * v, e * a)
        }
        WeightFunction::Polynomial(terms) => {
            let mut value = 0.0;
            let mut scale = 0.0;
            for t in terms {
                let a: Vec<u32> = alpha.iter().zip(&t.powers).map(|(x, y)| x + y).collect();
                let (v, sc) = poly(&a);
                value += t.coeff * v;
                scale += t.coeff.abs() * sc;
            }
            (value, scale)
        }
    };
    Integral {
        value,
        error: 64.0 * f64::EPSILON * scale,
    }
}

/// Pairwise summation in input order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

fn sum_integrals(parts: &[Integral]) -> Integral {
    let values: Vec<f64> = parts.iter().map(|p| p.value).collect();
    Integral {
        value: pairwise_sum(&values),
        error: parts.iter().map(|p| p.error).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qfrac, qvec};

    fn e() -> f64 {
        1f64.exp()
    }

    #[test]
    fn interval_examples() {
        let p = LabelledPolytope::builtin("p1").unwrap();
        assert!((integrate(&p, &WeightFunction::one()).unwrap().value - 2.0).abs() < 1e-15);
        let ex = WeightFunction::exp_linear(vec![1.0]);
        let v = integrate(&p, &ex).unwrap().value;
        assert!((v - (e() - 1.0 / e())).abs() < 1e-14);
        let m = moment(&p, &ex, &[1]).unwrap().value;
        assert!((m - 2.0 / e()).abs() < 1e-14);
        assert_eq!(moment(&p, &WeightFunction::one(), &[1]).unwrap().value, 0.0);
    }

    #[test]
    fn standard_simplex_first_moment() {
        let p = LabelledPolytope::from_vertices(&[qvec(&[-1, -1]), qvec(&[2, -1]), qvec(&[-1, 2])])
            .unwrap();
        assert_eq!(monomial_exact(&p, &[0, 0]), qfrac(9, 2));
        assert_eq!(monomial_exact(&p, &[1, 0]), q(0));
        let s = Simplex::new(vec![qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1])]);
        let v = moment_over(&[s], &WeightFunction::one(), &[1, 0], &Options::default()).unwrap();
        assert!((v.value - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn cubature_matches_closed_form() {
        let p = LabelledPolytope::builtin("bl2p2").unwrap();
        let g = WeightFunction::ExpAffine { a0: 0.2, b: vec![0.7, -1.1] };
        for alpha in [[0, 0], [1, 0], [1, 2]] {
            let a = moment(&p, &g, &alpha).unwrap().value;
            let b = moment_with(&p, &g, &alpha, &Options::cubature()).unwrap().value;
            assert!((a - b).abs() < 1e-9 * a.abs().max(1.0), "{alpha:?}: {a} {b}");
        }
    }

    #[test]
    fn cubature_reports_non_convergence() {
        let p = LabelledPolytope::builtin("p1").unwrap();
        let opts = Options {
            method: Method::GrundmannMoller { s: 1 },
            tolerance: 1e-30,
            max_s: 2,
        };
        let g = WeightFunction::exp_linear(vec![5.0]);
        assert!(matches!(
            moment_with(&p, &g, &[0], &opts),
            Err(Error::QuadratureNotConverged { .. })
        ));
    }
}
