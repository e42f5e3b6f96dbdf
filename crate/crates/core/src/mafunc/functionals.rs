//! Energy functionals of a discrete potential relative to the reference `u0`.
//!
//! The discrete Monge–Ampère measure of `w` puts mass
//! `m_k(w) = G(y_{k+1/2}) - G(y_{k-1/2})` at node `k`. It is the gradient of the
//! concave energy `sum -h Gamma(y) + G(beta) w_last - G(alpha) w_0`, with
//! `Gamma' = G`, so the comparison inequalities between the functionals hold
//! for the discrete objects without discretization error.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::polytope::LabelledPolytope;
use crate::quadrature::{pairwise_sum, WeightFunction};

use super::solver::Discretization;
use super::{interval_of, DiscretePotential, Grid};

/// Nodes in the Gauss–Legendre rule for the energy integral.
const GL_NODES: usize = 16;
/// Densities below this are treated as zero in the entropy.
const DENSITY_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionalRecord {
    #[serde(rename = "E_g")]
    pub e_g: f64,
    #[serde(rename = "Lambda_g")]
    pub lambda_g: f64,
    #[serde(rename = "I_g")]
    pub i_g: f64,
    #[serde(rename = "J_g")]
    pub j_g: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "H_g")]
    pub h_g: f64,
    #[serde(rename = "M")]
    pub m: f64,
    /// Entropy terms dropped because the density underflowed.
    pub clamped: usize,
}

/// Gauss–Legendre nodes and weights on `[0, 1]` by the Golub–Welsch method.
fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == 1 {
            let k = i.max(j) as f64;
            k / (4.0 * k * k - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut rule: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (eig.eigenvalues[i] + 1.0), v0 * v0)
        })
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + pairwise_sum(&xs.map(|x| (x - m).exp()).collect::<Vec<_>>()).ln()
}

/// Evaluation context for one polytope, weight and grid.
pub struct Functionals<'a> {
    disc: Discretization<'a>,
    u0: DiscretePotential,
    m0: Vec<f64>,
    log_mu0: Vec<f64>,
    v_g: f64,
    rule: Vec<(f64, f64)>,
}

impl<'a> Functionals<'a> {
    pub fn new(p: &LabelledPolytope, g: &'a WeightFunction, grid: Grid) -> Result<Functionals<'a>> {
        let interval = interval_of(p)?;
        g.certify(p)?;
        let disc = Discretization::new(grid, g, interval);
        let u0 = DiscretePotential::reference(grid, interval);
        let w = disc.weights(0.0);
        let log_w: Vec<f64> = w
            .iter()
            .zip(&u0.values)
            .map(|(w, u)| w.ln() - u)
            .collect();
        let log_z = log_sum_exp(log_w.iter().copied());
        let log_mu0 = log_w.iter().map(|x| x - log_z).collect();
        let v_g = disc.big_g(disc.beta);
        let mut ctx = Functionals {
            disc,
            m0: Vec::new(),
            u0,
            log_mu0,
            v_g,
            rule: gauss_legendre_unit(GL_NODES),
        };
        ctx.m0 = ctx.masses(&ctx.u0.values);
        Ok(ctx)
    }

    pub fn reference(&self) -> &DiscretePotential {
        &self.u0
    }

    pub fn grid(&self) -> Grid {
        self.disc.grid
    }

    pub fn weighted_volume(&self) -> f64 {
        self.v_g
    }

    /// Node masses of the discrete Monge–Ampère measure of `u`.
    pub fn masses(&self, u: &[f64]) -> Vec<f64> {
        let n = u.len();
        let h = self.disc.grid.step();
        let flux: Vec<f64> = (0..=n)
            .map(|k| match k {
                0 => self.disc.big_g(self.disc.alpha),
                _ if k == n => self.disc.big_g(self.disc.beta),
                _ => self.disc.big_g((u[k] - u[k - 1]) / h),
            })
            .collect();
        flux.windows(2).map(|f| f[1] - f[0]).collect()
    }

    fn pair(&self, phi: &[f64], m: &[f64]) -> f64 {
        pairwise_sum(&phi.iter().zip(m).map(|(a, b)| a * b).collect::<Vec<_>>()) / self.v_g
    }

    /// `(1/V_g) int_0^1 <u - base, MA_g(base + t (u - base))> dt`.
    pub fn energy(&self, base: &[f64], u: &[f64]) -> f64 {
        let phi: Vec<f64> = u.iter().zip(base).map(|(a, b)| a - b).collect();
        let terms: Vec<f64> = self
            .rule
            .iter()
            .map(|&(t, w)| {
                let ut: Vec<f64> = base.iter().zip(&phi).map(|(b, f)| b + t * f).collect();
                w * self.pair(&phi, &self.masses(&ut))
            })
            .collect();
        pairwise_sum(&terms)
    }

    fn check(&self, u: &DiscretePotential) -> Result<()> {
        if u.grid != self.disc.grid {
            return Err(Error::schema("/grid", "potential grid differs from the reference grid"));
        }
        u.check_admissible((self.disc.alpha, self.disc.beta))
    }

    /// `E_g` of `u` relative to `u0`.
    pub fn e_g(&self, u: &DiscretePotential) -> Result<f64> {
        self.check(u)?;
        Ok(self.energy(&self.u0.values, &u.values))
    }

    /// `J_g` of `u` relative to `u0`.
    pub fn j_g(&self, u: &DiscretePotential) -> Result<f64> {
        self.check(u)?;
        let phi: Vec<f64> = u.values.iter().zip(&self.u0.values).map(|(a, b)| a - b).collect();
        Ok(self.pair(&phi, &self.m0) - self.energy(&self.u0.values, &u.values))
    }

    /// Central difference of `D` along the translations `u(x + s)`, taken over
    /// `shift` nodes either way. Close to minus the weighted barycenter, so a
    /// nonzero value shows `D` is unbounded below along that ray.
    pub fn ding_translation_slope(&self, u: &DiscretePotential, shift: usize) -> Result<f64> {
        let interval = (self.disc.alpha, self.disc.beta);
        let s = shift as isize;
        let fwd = self.evaluate(&u.translated(s, interval))?.d;
        let back = self.evaluate(&u.translated(-s, interval))?.d;
        Ok((fwd - back) / (2.0 * shift as f64 * self.disc.grid.step()))
    }

    pub fn evaluate(&self, u: &DiscretePotential) -> Result<FunctionalRecord> {
        self.check(u)?;
        let phi: Vec<f64> = u.values.iter().zip(&self.u0.values).map(|(a, b)| a - b).collect();
        let m = self.masses(&u.values);
        let e_g = self.energy(&self.u0.values, &u.values);
        let lambda_g = self.pair(&phi, &self.m0);
        let own = self.pair(&phi, &m);
        let i_g = lambda_g - own;
        let j_g = lambda_g - e_g;
        let l = -log_sum_exp(self.log_mu0.iter().zip(&phi).map(|(lm, f)| lm - f));
        let mut clamped = 0;
        let mut entropy = Vec::with_capacity(m.len());
        for (mk, lm) in m.iter().zip(&self.log_mu0) {
            let nu = mk / self.v_g;
            if nu < DENSITY_FLOOR {
                clamped += 1;
                continue;
            }
            entropy.push(nu * (nu.ln() - lm));
        }
        if clamped == m.len() {
            return Err(Error::NumericalUnderflow(
                "every Monge–Ampère density underflowed".into(),
            ));
        }
        let h_g = pairwise_sum(&entropy);
        Ok(FunctionalRecord {
            e_g,
            lambda_g,
            i_g,
            j_g,
            l,
            d: -e_g + l,
            h_g,
            m: h_g + j_g - i_g,
            clamped,
        })
    }
}

/// All functionals of `u` relative to the reference potential on `u`'s grid.
pub fn functionals(
    u: &DiscretePotential,
    g: &WeightFunction,
    p: &LabelledPolytope,
) -> Result<FunctionalRecord> {
    Functionals::new(p, g, u.grid)?.evaluate(u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_for_degree_31() {
        let rule = gauss_legendre_unit(GL_NODES);
        let total: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-14);
        let v: f64 = rule.iter().map(|(t, w)| w * t.powi(31)).sum();
        assert!((v - 1.0 / 32.0).abs() < 1e-14);
    }

    #[test]
    fn identity_and_constant_shift() {
        let p = LabelledPolytope::builtin("p1").unwrap();
        let g = WeightFunction::exp_linear(vec![1.0]);
        let ctx = Functionals::new(&p, &g, Grid::new(12.0, 1201).unwrap()).unwrap();
        let u0 = ctx.reference().clone();
        let r = ctx.evaluate(&u0).unwrap();
        for v in [r.e_g, r.lambda_g, r.i_g, r.j_g, r.l, r.d] {
            assert!(v.abs() < 1e-12, "{r:?}");
        }
        let s = ctx.evaluate(&u0.shifted(0.7)).unwrap();
        assert!((s.e_g - 0.7).abs() < 1e-12 && (s.lambda_g - 0.7).abs() < 1e-12);
        assert!(s.i_g.abs() < 1e-12 && s.j_g.abs() < 1e-12);
        assert!((s.d - r.d).abs() < 1e-12);
    }

    #[test]
    fn translation_slope_is_minus_barycenter() {
        let p = LabelledPolytope::builtin("p1").unwrap();
        let g = WeightFunction::exp_linear(vec![0.5]);
        let ctx = Functionals::new(&p, &g, Grid::new(20.0, 2001).unwrap()).unwrap();
        let slope = ctx.ding_translation_slope(ctx.reference(), 50).unwrap();
        let b = crate::invariants::weighted_barycenter(&p, &g).unwrap()[0];
        assert!((slope + b).abs() < 1e-6, "{slope} vs {b}");
    }

    #[test]
    fn masses_sum_to_weighted_volume() {
        let p = LabelledPolytope::builtin("p1").unwrap();
        let g = WeightFunction::exp_linear(vec![1.0]);
        let ctx = Functionals::new(&p, &g, Grid::new(12.0, 601).unwrap()).unwrap();
        let total: f64 = ctx.masses(&ctx.reference().values).iter().sum();
        assert!((total - 2.0 * 1f64.sinh()).abs() < 1e-13);
    }
}
