use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::LabelledPolytope;

/// `coeff * x^powers`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub powers: Vec<u32>,
    #[serde(rename = "c")]
    pub coeff: f64,
}

/// A positive weight `g` on the moment polytope.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightFunction {
    Constant(f64),
    /// `a0 + <b, x>`
    Affine { a0: f64, b: Vec<f64> },
    /// `exp(a0 + <b, x>)`
    ExpAffine { a0: f64, b: Vec<f64> },
    Polynomial(Vec<Monomial>),
}

/// Certified range of `g` over a polytope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightBounds {
    pub min: f64,
    pub max: f64,
    /// True when both bounds are attained (vertex evaluation); false for a
    /// sampled certificate, where they are only enclosing bounds.
    pub attained: bool,
}

/// Samples per simplex edge used by the polynomial positivity certificate.
const CERTIFICATE_RESOLUTION: usize = 24;

impl WeightFunction {
    pub fn one() -> WeightFunction {
        WeightFunction::Constant(1.0)
    }

    pub fn exp_linear(b: Vec<f64>) -> WeightFunction {
        WeightFunction::ExpAffine { a0: 0.0, b }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            WeightFunction::Constant(_) => "constant",
            WeightFunction::Affine { .. } => "affine",
            WeightFunction::ExpAffine { .. } => "exp_affine",
            WeightFunction::Polynomial(_) => "polynomial",
        }
    }

    /// Variables the weight is written in, if it fixes one.
    pub fn arity(&self) -> Option<usize> {
        match self {
            WeightFunction::Constant(_) => None,
            WeightFunction::Affine { b, .. } | WeightFunction::ExpAffine { b, .. } => Some(b.len()),
            WeightFunction::Polynomial(terms) => terms.first().map(|t| t.powers.len()),
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        let bad = match self {
            WeightFunction::Polynomial(terms) => terms.iter().any(|t| t.powers.len() != dim),
            _ => self.arity().is_some_and(|a| a != dim),
        };
        if bad {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.arity().unwrap_or(0),
            });
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            WeightFunction::Constant(c) => *c,
            WeightFunction::Affine { a0, b } => a0 + dotf(b, x),
            WeightFunction::ExpAffine { a0, b } => (a0 + dotf(b, x)).exp(),
            WeightFunction::Polynomial(terms) => terms.iter().map(|t| eval_monomial(t, x)).sum(),
        }
    }

    /// `log g`; the exponent itself for the exponential kind.
    pub fn log_eval(&self, x: &[f64]) -> f64 {
        match self {
            WeightFunction::ExpAffine { a0, b } => a0 + dotf(b, x),
            _ => self.eval(x).ln(),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            WeightFunction::Constant(_) => vec![0.0; x.len()],
            WeightFunction::Affine { b, .. } => b.clone(),
            WeightFunction::ExpAffine { b, .. } => {
                let v = self.eval(x);
                b.iter().map(|bi| bi * v).collect()
            }
            WeightFunction::Polynomial(terms) => (0..x.len())
                .map(|d| {
                    terms
                        .iter()
                        .filter(|t| t.powers[d] > 0)
                        .map(|t| {
                            let mut p = t.powers.clone();
                            p[d] -= 1;
                            t.powers[d] as f64 * eval_monomial(&Monomial { powers: p, coeff: t.coeff }, x)
                        })
                        .sum()
                })
                .collect(),
        }
    }

    /// Positivity check plus the range of `g` on `p`.
    pub fn certify(&self, p: &LabelledPolytope) -> Result<WeightBounds> {
        self.check_dim(p.dim())?;
        match self {
            WeightFunction::Polynomial(_) => self.certify_polynomial(p),
            _ => {
                let values: Vec<f64> = p.vertices_f64().iter().map(|v| self.eval(v)).collect();
                let min = values.iter().copied().fold(f64::INFINITY, f64::min);
                let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if !(min > 0.0) || !max.is_finite() {
                    return Err(Error::PositivityViolated(format!(
                        "{} weight has minimum {min} over the vertices",
                        self.kind_name()
                    )));
                }
                Ok(WeightBounds {
                    min,
                    max,
                    attained: true,
                })
            }
        }
    }

    /// Samples a barycentric grid on every simplex and subtracts a Lipschitz
    /// margin covering the gaps between samples.
    fn certify_polynomial(&self, p: &LabelledPolytope) -> Result<WeightBounds> {
        let WeightFunction::Polynomial(terms) = self else {
            unreachable!()
        };
        let n = p.dim();
        let radius = p
            .vertices_f64()
            .iter()
            .flatten()
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
            .max(1.0);
        // |d/dx_d g| <= sum |c| * k_d * R^(deg - 1); Euclidean norm bounded by sqrt(n) * max.
        let lipschitz = (0..n)
            .map(|d| {
                terms
                    .iter()
                    .map(|t| {
                        let deg: u32 = t.powers.iter().sum();
                        t.coeff.abs() * t.powers[d] as f64 * radius.powi(deg as i32 - 1)
                    })
                    .sum::<f64>()
            })
            .fold(0.0f64, f64::max)
            * (n as f64).sqrt();
        let k = CERTIFICATE_RESOLUTION;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let mut margin: f64 = 0.0;
        for s in p.simplices() {
            let diam = simplex_diameter(&s.points_f64);
            margin = margin.max(lipschitz * diam / k as f64);
            for_each_composition(k, n + 1, |c| {
                let x: Vec<f64> = (0..n)
                    .map(|d| {
                        c.iter()
                            .zip(&s.points_f64)
                            .map(|(&ci, v)| ci as f64 * v[d])
                            .sum::<f64>()
                            / k as f64
                    })
                    .collect();
                let v = self.eval(&x);
                lo = lo.min(v);
                hi = hi.max(v);
            });
        }
        let min = lo - margin;
        if !(min > 0.0) {
            return Err(Error::PositivityViolated(format!(
                "polynomial sampled minimum {lo} does not clear the margin {margin}"
            )));
        }
        Ok(WeightBounds {
            min,
            max: hi + margin,
            attained: false,
        })
    }

    /// One-dimensional antiderivative `G(y) = int_lo^y g`.
    pub fn antiderivative_1d(&self, lo: f64, y: f64) -> f64 {
        match self {
            WeightFunction::Constant(c) => c * (y - lo),
            WeightFunction::Affine { a0, b } => {
                let b = b.first().copied().unwrap_or(0.0);
                a0 * (y - lo) + 0.5 * b * (y * y - lo * lo)
            }
            WeightFunction::ExpAffine { a0, b } => {
                let b = b.first().copied().unwrap_or(0.0);
                let t = y - lo;
                let base = (a0 + b * lo).exp();
                if b == 0.0 {
                    base * t
                } else {
                    base * (b * t).exp_m1() / b
                }
            }
            WeightFunction::Polynomial(terms) => terms
                .iter()
                .map(|m| {
                    let k = m.powers[0] as i32 + 1;
                    m.coeff * (y.powi(k) - lo.powi(k)) / k as f64
                })
                .sum(),
        }
    }

    /// `x -> g(U^{-1} x)` for an affine-type weight, given `U^{-T}`.
    pub fn pullback_linear(&self, inv_transpose: &[Vec<f64>]) -> Option<WeightFunction> {
        let map = |b: &[f64]| -> Vec<f64> {
            inv_transpose.iter().map(|row| dotf(row, b)).collect()
        };
        match self {
            WeightFunction::Constant(c) => Some(WeightFunction::Constant(*c)),
            WeightFunction::Affine { a0, b } => Some(WeightFunction::Affine { a0: *a0, b: map(b) }),
            WeightFunction::ExpAffine { a0, b } => {
                Some(WeightFunction::ExpAffine { a0: *a0, b: map(b) })
            }
            WeightFunction::Polynomial(_) => None,
        }
    }
}

pub(crate) fn dotf(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn eval_monomial(m: &Monomial, x: &[f64]) -> f64 {
    m.powers
        .iter()
        .zip(x)
        .fold(m.coeff, |acc, (&k, &xi)| acc * xi.powi(k as i32))
}

fn simplex_diameter(points: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max(a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt());
        }
    }
    d
}

/// Calls `f` on every vector of `parts` nonnegative integers summing to `total`.
pub(crate) fn for_each_composition(total: usize, parts: usize, mut f: impl FnMut(&[usize])) {
    fn rec(rest: usize, idx: usize, buf: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if idx + 1 == buf.len() {
            buf[idx] = rest;
            f(buf);
            return;
        }
        for k in 0..=rest {
            buf[idx] = k;
            rec(rest - k, idx + 1, buf, f);
        }
    }
    if parts == 0 {
        return;
    }
    let mut buf = vec![0; parts];
    rec(total, 0, &mut buf, &mut f);
}
