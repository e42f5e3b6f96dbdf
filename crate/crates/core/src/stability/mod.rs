//! Valuative stability data for toric valuations and toric filtrations.
//!
//! A vector `a` gives the valuation `wt_a` with log discrepancy
//! `A(a) = -min_P <a, .>` and expected vanishing order
//! `S_g(a) = int_P (<a, x> - min_P <a, .>) g / int_P g = A(a) + <a, b_g>`.

pub mod delta;
pub mod filtration;
pub mod pl;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::weighted_barycenter;
use crate::polytope::LabelledPolytope;
use crate::quadrature::{self, weight::dotf, Options, WeightFunction};
use crate::rational::{to_f64, QVec};

pub use delta::{delta_toric, DeltaResult};
pub use filtration::{dh_g_filtration, FiltrationSample};
pub use pl::{PLConvexFunction, Piece};

fn check_direction(p: &LabelledPolytope, a: &[f64]) -> Result<()> {
    if a.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: a.len(),
        });
    }
    if a.iter().all(|x| *x == 0.0) {
        return Err(Error::ZeroVector);
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::schema("/a", "direction must be finite"));
    }
    Ok(())
}

/// `A(a) = -min_P <a, .>`.
pub fn log_discrepancy(p: &LabelledPolytope, a: &[f64]) -> Result<f64> {
    check_direction(p, a)?;
    Ok(-p.support_min_f64(a))
}

/// `S_g(a)`.
pub fn s_g(p: &LabelledPolytope, g: &WeightFunction, a: &[f64]) -> Result<f64> {
    check_direction(p, a)?;
    let b = weighted_barycenter(p, g)?;
    Ok(-p.support_min_f64(a) + dotf(a, &b))
}

/// `A(a) - S_g(a)`.
pub fn ding_na_valuation(p: &LabelledPolytope, g: &WeightFunction, a: &[f64]) -> Result<f64> {
    check_direction(p, a)?;
    let b = weighted_barycenter(p, g)?;
    Ok(-dotf(a, &b))
}

/// The data attached to one toric valuation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToricValuation {
    pub a: Vec<f64>,
    pub support_min: f64,
    #[serde(rename = "A")]
    pub log_discrepancy: f64,
    #[serde(rename = "S_g")]
    pub s_g: f64,
}

impl ToricValuation {
    pub fn new(p: &LabelledPolytope, g: &WeightFunction, a: &[f64]) -> Result<ToricValuation> {
        check_direction(p, a)?;
        let support_min = p.support_min_f64(a);
        let b = weighted_barycenter(p, g)?;
        Ok(ToricValuation {
            a: a.to_vec(),
            support_min,
            log_discrepancy: -support_min,
            s_g: -support_min + dotf(a, &b),
        })
    }

    pub fn ratio(&self) -> f64 {
        self.log_discrepancy / self.s_g
    }

    pub fn ding_na(&self) -> f64 {
        self.log_discrepancy - self.s_g
    }
}

/// Finite-`m` value of `S_g(a)` from the lattice points of `mP`.
pub fn s_g_lattice(p: &LabelledPolytope, g: &WeightFunction, a: &[f64], m: u32) -> Result<f64> {
    check_direction(p, a)?;
    g.check_dim(p.dim())?;
    let pts = p.lattice_points(m)?;
    let min = p.support_min_f64(a);
    let mf = m as f64;
    let terms: Vec<(f64, f64)> = pts
        .par_iter()
        .map(|u| {
            let x: Vec<f64> = u.iter().map(|&k| k as f64 / mf).collect();
            let w = g.eval(&x);
            (w, w * (dotf(a, &x) - min))
        })
        .collect();
    let mass = quadrature::pairwise_sum(&terms.iter().map(|t| t.0).collect::<Vec<_>>());
    let num = quadrature::pairwise_sum(&terms.iter().map(|t| t.1).collect::<Vec<_>>());
    Ok(num / mass)
}

/// `E_g^NA(f) = int_P f g / int_P g` for the normalized `f`.
pub fn e_g_na(p: &LabelledPolytope, g: &WeightFunction, f: &PLConvexFunction) -> Result<f64> {
    g.check_dim(p.dim())?;
    let f = f.normalized(p)?;
    let n = p.dim();
    let opts = Options::default();
    let mut parts = Vec::new();
    for cell in f.cells(p)? {
        let piece = &f.pieces()[cell.piece];
        let mut v = to_f64(&piece.c)
            * quadrature::moment_over(&cell.simplices, g, &vec![0; n], &opts)?.value;
        for (d, ad) in piece.a.iter().enumerate() {
            let ad = to_f64(ad);
            if ad != 0.0 {
                let mut alpha = vec![0; n];
                alpha[d] = 1;
                v += ad * quadrature::moment_over(&cell.simplices, g, &alpha, &opts)?.value;
            }
        }
        parts.push(v);
    }
    let mass = quadrature::integrate(p, g)?.value;
    Ok(quadrature::pairwise_sum(&parts) / mass)
}

/// `Lambda^NA(f) = max_P f` for the normalized `f`.
pub fn lambda_na(p: &LabelledPolytope, f: &PLConvexFunction) -> Result<f64> {
    let f = f.normalized(p)?;
    Ok(to_f64(&f.max_on(p)?))
}

/// `J_g^NA(f) = Lambda^NA(f) - E_g^NA(f)`.
pub fn j_g_na(p: &LabelledPolytope, g: &WeightFunction, f: &PLConvexFunction) -> Result<f64> {
    Ok(lambda_na(p, f)? - e_g_na(p, g, f)?)
}

/// Twist of a PL function by `xi` (slopes shift by `xi`).
pub fn twist(p: &LabelledPolytope, f: &PLConvexFunction, xi: &QVec) -> Result<PLConvexFunction> {
    f.twist(p, xi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformCheck {
    pub stable_modulo_torus: bool,
    pub barycenter_norm: f64,
}

/// Vanishing of the weighted barycenter up to `tol`.
pub fn g_uniform_check(p: &LabelledPolytope, g: &WeightFunction, tol: f64) -> Result<UniformCheck> {
    let b = weighted_barycenter(p, g)?;
    let norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(UniformCheck {
        stable_modulo_torus: norm < tol,
        barycenter_norm: norm,
    })
}
