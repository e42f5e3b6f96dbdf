//! Closed-form integrals of `x^alpha * exp(<b, x>)` over simplices.
//!
//! A monomial in Cartesian coordinates is expanded in barycentric coordinates
//! `lambda`. Over a simplex with vertex values `c_i = <b, v_i>`,
//!
//! ```text
//! int lambda^k exp(sum c_i lambda_i) dx = n! vol * prod(k_i!) * exp[c_0^(k_0+1), ..., c_n^(k_n+1)]
//! ```
//!
//! where the right side is a divided difference of `exp` with each node
//! repeated `k_i + 1` times. Repeated or nearly repeated nodes need no special
//! treatment: the divided difference is read off the exponential of a
//! bidiagonal matrix, computed by scaling and squaring with nonnegative entries
//! throughout.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::polytope::Simplex;
use crate::rational::{factorial, Q};

/// Terms kept in the Taylor series of the scaled divided differences.
const TAYLOR_TERMS: usize = 28;

/// Divided difference `exp[z_0, ..., z_m]` (nodes may repeat).
pub fn exp_divided_difference(z: &[f64]) -> f64 {
    let m = z.len();
    assert!(m > 0);
    let mean = z.iter().sum::<f64>() / m as f64;
    let radius = z.iter().fold(0.0f64, |acc, x| acc.max((x - mean).abs()));
    let mut squarings = 0u32;
    while radius / f64::powi(2.0, squarings as i32) > 0.5 {
        squarings += 1;
    }
    let scale = f64::powi(2.0, -(squarings as i32));
    let w: Vec<f64> = z.iter().map(|x| (x - mean) * scale).collect();

    let inv_fact: Vec<f64> = {
        let mut v = vec![1.0; m + TAYLOR_TERMS + 1];
        for k in 1..v.len() {
            v[k] = v[k - 1] / k as f64;
        }
        v
    };
    // f[i][j] = scale^(j-i) * exp[w_i..w_j]
    let mut f = vec![vec![0.0; m]; m];
    for i in 0..m {
        // Complete homogeneous symmetric polynomials h_k(w_i..w_j).
        let mut h = vec![0.0; TAYLOR_TERMS];
        h[0] = 1.0;
        let mut scale_pow = 1.0;
        for j in i..m {
            for k in 1..TAYLOR_TERMS {
                h[k] += w[j] * h[k - 1];
            }
            let order = j - i;
            let dd: f64 = h
                .iter()
                .enumerate()
                .map(|(k, hk)| hk * inv_fact[order + k])
                .sum();
            f[i][j] = scale_pow * dd;
            scale_pow *= scale;
        }
    }
    for _ in 0..squarings {
        let mut next = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i..m {
                next[i][j] = (i..=j).map(|k| f[i][k] * f[k][j]).sum();
            }
        }
        f = next;
    }
    mean.exp() * f[0][m - 1]
}

/// A polynomial in the `n + 1` barycentric coordinates of a simplex.
pub(crate) type BaryPoly = BTreeMap<Vec<u32>, f64>;

/// Expands `x^alpha` in barycentric coordinates of `points`.
pub(crate) fn barycentric_expansion(points: &[Vec<f64>], alpha: &[u32]) -> BaryPoly {
    let parts = points.len();
    let mut poly: BaryPoly = BTreeMap::new();
    poly.insert(vec![0; parts], 1.0);
    for (d, &k) in alpha.iter().enumerate() {
        for _ in 0..k {
            let mut next: BaryPoly = BTreeMap::new();
            for (key, c) in &poly {
                for (i, p) in points.iter().enumerate() {
                    if p[d] == 0.0 {
                        continue;
                    }
                    let mut nk = key.clone();
                    nk[i] += 1;
                    *next.entry(nk).or_insert(0.0) += c * p[d];
                }
            }
            poly = next;
        }
    }
    poly
}

fn factorial_f64(k: u32) -> f64 {
    (1..=k).map(|x| x as f64).product()
}

/// `int_simplex lambda^k exp(<b, x>) dx` given the vertex values `c_i = <b, v_i>`.
fn barycentric_monomial_exp(simplex: &Simplex, key: &[u32], c: &[f64]) -> f64 {
    let n = simplex.points_f64.len() - 1;
    let mut nodes = Vec::with_capacity(key.iter().map(|&k| k as usize + 1).sum());
    let mut fact = 1.0;
    for (&k, &ci) in key.iter().zip(c) {
        nodes.extend(std::iter::repeat_n(ci, k as usize + 1));
        fact *= factorial_f64(k);
    }
    factorial_f64(n as u32) * simplex.volume_f64 * fact * exp_divided_difference(&nodes)
}

/// `int_simplex x^alpha exp(<b, x>) dx`, returned with the sum of absolute
/// term contributions (for rounding estimates).
pub fn monomial_exp_integral(simplex: &Simplex, alpha: &[u32], b: Option<&[f64]>) -> (f64, f64) {
    let parts = simplex.points_f64.len();
    let c: Vec<f64> = match b {
        Some(b) => simplex
            .points_f64
            .iter()
            .map(|v| v.iter().zip(b).map(|(x, y)| x * y).sum())
            .collect(),
        None => vec![0.0; parts],
    };
    let poly = barycentric_expansion(&simplex.points_f64, alpha);
    let mut total = 0.0;
    let mut abs_total = 0.0;
    for (key, coeff) in &poly {
        let term = if b.is_some() {
            barycentric_monomial_exp(simplex, key, &c)
        } else {
            dirichlet_f64(simplex, key)
        };
        total += coeff * term;
        abs_total += (coeff * term).abs();
    }
    (total, abs_total)
}

/// `int_simplex lambda^k dx = n! vol prod(k_i!) / (|k| + n)!`.
fn dirichlet_f64(simplex: &Simplex, key: &[u32]) -> f64 {
    let n = simplex.points_f64.len() - 1;
    let total: u32 = key.iter().sum();
    let num: f64 = key.iter().map(|&k| factorial_f64(k)).product();
    let mut v = simplex.volume_f64 * num;
    // n! / (|k| + n)!
    for j in (n as u32 + 1)..=(total + n as u32) {
        v /= j as f64;
    }
    v
}

/// Exact `int_simplex x^alpha dx` in rationals.
pub fn monomial_integral_exact(simplex: &Simplex, alpha: &[u32]) -> Q {
    let parts = simplex.points.len();
    let n = parts - 1;
    let mut poly: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
    poly.insert(vec![0; parts], Q::from_integer(1.into()));
    for (d, &k) in alpha.iter().enumerate() {
        for _ in 0..k {
            let mut next: BTreeMap<Vec<u32>, Q> = BTreeMap::new();
            for (key, c) in &poly {
                for (i, p) in simplex.points.iter().enumerate() {
                    if p[d].is_zero() {
                        continue;
                    }
                    let mut nk = key.clone();
                    nk[i] += 1;
                    *next.entry(nk).or_insert_with(Q::zero) += c * &p[d];
                }
            }
            poly = next;
        }
    }
    let n_fact = factorial(n);
    poly.iter()
        .map(|(key, c)| {
            let total: usize = key.iter().map(|&k| k as usize).sum();
            let num: Q = key.iter().map(|&k| factorial(k as usize)).product();
            c * &simplex.volume * &n_fact * num / factorial(total + n)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qfrac, qvec};

    /// Recursive divided differences for distinct nodes.
    fn naive(z: &[f64]) -> f64 {
        if z.len() == 1 {
            return z[0].exp();
        }
        (naive(&z[1..]) - naive(&z[..z.len() - 1])) / (z[z.len() - 1] - z[0])
    }

    #[test]
    fn divided_difference_matches_recursion_for_distinct_nodes() {
        let cases: [&[f64]; 4] = [&[0.3], &[-1.0, 2.0], &[-1.5, 0.2, 3.0], &[-4.0, -1.0, 2.5, 7.0]];
        for z in cases {
            let a = exp_divided_difference(z);
            let b = naive(z);
            assert!((a - b).abs() <= 1e-13 * b.abs(), "{z:?}: {a} vs {b}");
        }
    }

    #[test]
    fn confluent_nodes_give_derivatives() {
        // exp[x, x, ..., x] (k+1 times) = e^x / k!
        for (x, k) in [(0.0, 0usize), (1.3, 2), (-2.0, 5), (8.0, 3)] {
            let z = vec![x; k + 1];
            let expected = f64::exp(x) / (1..=k).map(|j| j as f64).product::<f64>();
            let got = exp_divided_difference(&z);
            assert!((got - expected).abs() <= 1e-14 * expected, "{x} {k}");
        }
        // Nearly coincident nodes: compare with the Taylor expansion around the midpoint.
        let eps = 1e-9;
        let got = exp_divided_difference(&[1.0 - eps, 1.0 + eps]);
        assert!((got - 1f64.exp() * (1.0 + eps * eps / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn divided_difference_is_positive_for_wide_spread() {
        let z = [-12.0, -11.0, 0.0, 9.0, 9.0, 15.0];
        let v = exp_divided_difference(&z);
        assert!(v > 0.0 && v.is_finite());
        // Hermite-Genocchi: bounded by the node extremes over 5!.
        assert!(v <= f64::exp(15.0) / 120.0 && v >= f64::exp(-12.0) / 120.0);
    }

    #[test]
    fn standard_triangle_moments() {
        let s = Simplex::new(vec![qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1])]);
        assert_eq!(monomial_integral_exact(&s, &[1, 0]), qfrac(1, 6));
        assert_eq!(monomial_integral_exact(&s, &[1, 1]), qfrac(1, 24));
        assert_eq!(monomial_integral_exact(&s, &[2, 0]), qfrac(1, 12));
        let (v, _) = monomial_exp_integral(&s, &[1, 0], None);
        assert!((v - 1.0 / 6.0).abs() < 1e-16);
        let (v, _) = monomial_exp_integral(&s, &[1, 0], Some(&[0.0, 0.0]));
        assert!((v - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn exp_on_segment() {
        let s = Simplex::new(vec![qvec(&[0]), qvec(&[1])]);
        let (v, _) = monomial_exp_integral(&s, &[0], Some(&[1.0]));
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-15);
        // int_0^1 x e^x = 1
        let (v, _) = monomial_exp_integral(&s, &[1], Some(&[1.0]));
        assert!((v - 1.0).abs() < 1e-15);
        // int_0^1 x^2 e^x = e - 2
        let (v, _) = monomial_exp_integral(&s, &[2], Some(&[1.0]));
        assert!((v - (1f64.exp() - 2.0)).abs() < 1e-15);
    }
}
