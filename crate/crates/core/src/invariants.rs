//! Weighted volume, Duistermaat–Heckman marginals, weighted barycenter, the
//! Futaki invariant and the two toric soliton solvers.

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytope::hull::{simplex_volume, Halfspace, Hull};
use crate::polytope::LabelledPolytope;
use crate::quadrature::{self, weight::dotf, Integral, WeightFunction};
use crate::rational::{self, from_f64, to_f64, QVec, Q};

/// `V_g = n! int_P g dx`.
pub fn weighted_volume(p: &LabelledPolytope, g: &WeightFunction) -> Result<Integral> {
    let i = quadrature::integrate(p, g)?;
    let f = factorial(p.dim());
    Ok(Integral {
        value: f * i.value,
        error: f * i.error,
    })
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Density at `t` of the pushforward of Lebesgue measure on `P` under
/// `x -> <a, x>`. Equals the `(n-1)`-volume of the slice divided by `|a|`;
/// for `n = 1` it is `1/|a|` inside the interval.
pub fn dh_marginal(p: &LabelledPolytope, a: &[f64], t: f64) -> Result<f64> {
    let n = p.dim();
    if a.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.len(),
        });
    }
    if a.iter().all(|x| *x == 0.0) {
        return Err(Error::ZeroVector);
    }
    let (Some(aq), Some(tq)) = (
        a.iter().map(|x| from_f64(*x)).collect::<Option<QVec>>(),
        from_f64(t),
    ) else {
        return Err(Error::schema("/a", "non-finite direction or level"));
    };
    let lo = p.support_min(&aq);
    let hi = p.support_max(&aq);
    if tq <= lo || tq >= hi {
        return Ok(0.0);
    }
    // Eliminate the coordinate with the largest coefficient.
    let k = (0..n)
        .max_by(|&i, &j| aq[i].abs().cmp(&aq[j].abs()))
        .expect("nonempty");
    let ak = aq[k].clone();
    if n == 1 {
        return Ok(1.0 / to_f64(&ak.abs()));
    }
    let hs: Vec<Halfspace> = p
        .facets()
        .iter()
        .map(|f| {
            // <nu, x> with x_k = (t - sum_{j != k} a_j x_j) / a_k
            let c = &f.normal[k] / &ak;
            let normal: QVec = (0..n)
                .filter(|&j| j != k)
                .map(|j| &f.normal[j] - &c * &aq[j])
                .collect();
            Halfspace {
                normal,
                offset: Q::from_integer(1.into()) - &c * &tq,
            }
        })
        .collect();
    let Some(hull) = Hull::from_halfspaces(n - 1, &hs) else {
        return Ok(0.0);
    };
    let center = hull.vertex_centroid();
    let vol: Q = hull
        .triangulate_from(&center)
        .iter()
        .map(|s| simplex_volume(s))
        .fold(Q::zero(), |acc, v| acc + v);
    Ok(to_f64(&(vol / ak.abs())))
}

/// `b_g = int_P x g dx / int_P g dx`.
pub fn weighted_barycenter(p: &LabelledPolytope, g: &WeightFunction) -> Result<Vec<f64>> {
    let mass = quadrature::integrate(p, g)?.value;
    Ok(quadrature::first_moments(p, g)?
        .into_iter()
        .map(|m| m / mass)
        .collect())
}

/// `Fut_g(xi) = -<xi, b_g>`.
pub fn futaki(p: &LabelledPolytope, g: &WeightFunction, xi: &[f64]) -> Result<f64> {
    if xi.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: xi.len(),
        });
    }
    let b = weighted_barycenter(p, g)?;
    Ok(-dotf(xi, &b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SolitonKind {
    Kr,
    Mabuchi,
}

#[derive(Debug, Clone)]
pub struct SolitonSolution {
    pub kind: SolitonKind,
    /// `xi` for the Kähler–Ricci soliton, `b` for the Mabuchi soliton.
    pub vector: Vec<f64>,
    /// Exact `b` for the Mabuchi soliton.
    pub exact: Option<QVec>,
    /// `exp(<xi, x>)` or `1 + <b, x>`.
    pub weight: WeightFunction,
    /// Sup-norm of the weighted barycenter of `weight`.
    pub residual: f64,
    /// Whether `weight` is positive at every vertex.
    pub feasible: bool,
    pub iterations: usize,
    /// `|grad W| / W` at the returned point (Kähler–Ricci only).
    pub relative_gradient: Option<f64>,
}

pub const KR_MAX_ITERATIONS: usize = 200;
pub const KR_TOLERANCE: f64 = 1e-12;

/// `W(xi) = int_P exp(<xi, x>) dx` with gradient and Hessian.
pub fn kr_objective(p: &LabelledPolytope, xi: &[f64]) -> Result<(f64, Vec<f64>, Vec<Vec<f64>>)> {
    let g = WeightFunction::exp_linear(xi.to_vec());
    let w = quadrature::integrate(p, &g)?.value;
    let grad = quadrature::first_moments(p, &g)?;
    let hess = quadrature::second_moments(p, &g)?;
    Ok((w, grad, hess))
}

fn kr_value(p: &LabelledPolytope, xi: &[f64]) -> Result<f64> {
    Ok(quadrature::integrate(p, &WeightFunction::exp_linear(xi.to_vec()))?.value)
}

/// Minimizes `W` by Newton's method with backtracking from `xi = 0`.
pub fn solve_kr_soliton(p: &LabelledPolytope) -> Result<SolitonSolution> {
    let n = p.dim();
    let mut xi = vec![0.0; n];
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for iter in 0..=KR_MAX_ITERATIONS {
        let (w, grad, hess) = kr_objective(p, &xi)?;
        let rel = norm(&grad) / w;
        if rel < KR_TOLERANCE {
            let residual = grad.iter().fold(0.0f64, |m, x| m.max(x.abs())) / w;
            return Ok(SolitonSolution {
                kind: SolitonKind::Kr,
                weight: WeightFunction::exp_linear(xi.clone()),
                vector: xi,
                exact: None,
                residual,
                feasible: true,
                iterations: iter,
                relative_gradient: Some(rel),
            });
        }
        if iter == KR_MAX_ITERATIONS {
            return Err(Error::MaxIterations {
                iterations: iter,
                residual: rel,
            });
        }
        let h = DMatrix::from_fn(n, n, |i, j| hess[i][j]);
        let gvec = DVector::from_vec(grad.clone());
        let step = match h.cholesky() {
            Some(c) => -c.solve(&gvec),
            None => -gvec.clone(),
        };
        let slope = step.dot(&gvec);
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = xi.iter().zip(step.iter()).map(|(x, d)| x + t * d).collect();
            let wt = kr_value(p, &trial)?;
            if wt <= w + 1e-4 * t * slope || t < 1e-12 {
                xi = trial;
                break;
            }
            t *= 0.5;
        }
    }
    unreachable!()
}

/// Solves the exact moment system for the affine weight `1 + <b, x>` with
/// vanishing weighted barycenter.
pub fn solve_mabuchi_soliton(p: &LabelledPolytope) -> Result<SolitonSolution> {
    let n = p.dim();
    let unit = |i: usize| -> Vec<u32> {
        let mut a = vec![0; n];
        a[i] += 1;
        a
    };
    let beta: QVec = (0..n).map(|i| quadrature::monomial_exact(p, &unit(i))).collect();
    let m: Vec<QVec> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut a = unit(i);
                    a[j] += 1;
                    quadrature::monomial_exact(p, &a)
                })
                .collect()
        })
        .collect();
    let neg_beta: QVec = beta.iter().map(|x| -x).collect();
    let b = rational::solve(&m, &neg_beta).ok_or(Error::SingularMomentMatrix)?;
    let one = Q::from_integer(1.into());
    let feasible = p
        .vertices()
        .iter()
        .all(|v| (&one + rational::dot(&b, v)).is_positive());
    // int x_i (1 + <b, x>) dx, exactly.
    let moments: QVec = (0..n)
        .map(|i| &beta[i] + rational::dot(&m[i], &b))
        .collect();
    let mass = p.volume() + rational::dot(&b, &beta);
    let residual = if mass.is_zero() {
        moments.iter().map(|x| to_f64(&x.abs())).fold(0.0, f64::max)
    } else {
        moments
            .iter()
            .map(|x| to_f64(&(x / &mass).abs()))
            .fold(0.0, f64::max)
    };
    let bf = rational::to_f64_vec(&b);
    Ok(SolitonSolution {
        kind: SolitonKind::Mabuchi,
        weight: WeightFunction::Affine {
            a0: 1.0,
            b: bf.clone(),
        },
        vector: bf,
        exact: Some(b),
        residual,
        feasible,
        iterations: 0,
        relative_gradient: None,
    })
}
