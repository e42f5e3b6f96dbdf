use serde::Serialize;

use crate::error::{Error, Result};
use crate::invariants::weighted_barycenter;
use crate::polytope::LabelledPolytope;
use crate::quadrature::WeightFunction;

use super::linalg::{solve_bordered, Row};
use super::{interval_of, DiscretePotential, Grid, DEFAULT_RADIUS};

/// Target node spacing for the default grid.
const DEFAULT_STEP: f64 = 0.004;

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Grid to use; chosen from the weight when absent.
    pub grid: Option<Grid>,
    /// Required sup-norm of the discrete residual.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Allowed distance between the boundary slopes and the endpoints of `P`.
    pub window_tolerance: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            grid: None,
            tolerance: 1e-8,
            max_iterations: 100,
            window_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Solution {
    pub potential: DiscretePotential,
    /// Normalizing constant `c`.
    pub c: f64,
    /// Twist; zero exactly when the weighted barycenter vanishes.
    pub eta: f64,
    /// Sup-norm of the discrete equation residual.
    pub residual: f64,
    pub iterations: usize,
    /// Step length accepted at each Newton iteration.
    pub damping: Vec<f64>,
    /// Largest distance between a boundary slope and its endpoint of `P`.
    pub boundary_gap: f64,
    /// True when a nonzero twist was needed.
    pub obstructed: bool,
}

/// Window half-width wide enough for the slopes to settle at both ends.
pub fn default_grid(interval: (f64, f64), eta: f64) -> Grid {
    let (a, b) = interval;
    let rate = (b - eta).min(eta - a).max(1e-3);
    let radius = DEFAULT_RADIUS.max(DEFAULT_RADIUS / rate).min(2000.0);
    let mut nodes = (2.0 * radius / DEFAULT_STEP).ceil() as usize + 1;
    if nodes.is_multiple_of(2) {
        nodes += 1;
    }
    Grid { radius, nodes }
}

/// The discrete problem: fluxes, tail weights and the two gauge conditions.
pub(crate) struct Discretization<'a> {
    pub grid: Grid,
    pub g: &'a WeightFunction,
    pub alpha: f64,
    pub beta: f64,
    x: Vec<f64>,
    anchor: f64,
}

impl<'a> Discretization<'a> {
    pub fn new(grid: Grid, g: &'a WeightFunction, interval: (f64, f64)) -> Self {
        let anchor = DiscretePotential::reference(grid, interval).values[grid.mid()];
        Discretization {
            grid,
            g,
            alpha: interval.0,
            beta: interval.1,
            x: grid.points(),
            anchor,
        }
    }

    pub fn big_g(&self, y: f64) -> f64 {
        self.g.antiderivative_1d(self.alpha, y)
    }

    pub fn small_g(&self, y: f64) -> f64 {
        self.g.eval(&[y])
    }

    /// Cell weights for `exp(-u + eta x)`: `h` inside, half a cell plus the
    /// exact tail integral at the ends.
    pub fn weights(&self, eta: f64) -> Vec<f64> {
        let h = self.grid.step();
        let mut w = vec![h; self.grid.nodes];
        w[0] = 0.5 * h + 1.0 / (eta - self.alpha);
        let last = self.grid.nodes - 1;
        w[last] = 0.5 * h + 1.0 / (self.beta - eta);
        w
    }

    /// Residuals of the flux equations followed by the two gauge rows.
    fn residual(&self, u: &[f64], gamma: f64, eta: f64) -> Vec<f64> {
        let n = self.grid.nodes;
        let h = self.grid.step();
        let w = self.weights(eta);
        let flux: Vec<f64> = (0..=n)
            .map(|k| match k {
                0 => self.big_g(self.alpha),
                _ if k == n => self.big_g(self.beta),
                _ => self.big_g((u[k] - u[k - 1]) / h),
            })
            .collect();
        let mut r: Vec<f64> = (0..n)
            .map(|k| (flux[k + 1] - flux[k]) / w[k] - (gamma - u[k] + eta * self.x[k]).exp())
            .collect();
        let mid = self.grid.mid();
        r.push(u[mid] - self.anchor);
        r.push((u[mid + 1] - u[mid - 1]) / (2.0 * h));
        r
    }

    fn jacobian(&self, u: &[f64], gamma: f64, eta: f64, rhs: &[f64]) -> Vec<Row> {
        let n = self.grid.nodes;
        let h = self.grid.step();
        let w = self.weights(eta);
        let (a, b) = (self.alpha, self.beta);
        let mut rows = Vec::with_capacity(n + 2);
        for k in 0..n {
            let e = (gamma - u[k] + eta * self.x[k]).exp();
            let gm = (k > 0).then(|| self.small_g((u[k] - u[k - 1]) / h));
            let gp = (k + 1 < n).then(|| self.small_g((u[k + 1] - u[k]) / h));
            let scale = 1.0 / (h * w[k]);
            let mut coefs = Vec::with_capacity(3);
            if let Some(gm) = gm {
                coefs.push(gm * scale);
            }
            coefs.push(-(gm.unwrap_or(0.0) + gp.unwrap_or(0.0)) * scale + e);
            if let Some(gp) = gp {
                coefs.push(gp * scale);
            }
            // Tail weights depend on eta.
            let mut d_eta = -self.x[k] * e;
            if k == 0 {
                let flux = self.big_g((u[1] - u[0]) / h) - self.big_g(a);
                d_eta += flux / (w[0] * w[0] * (eta - a).powi(2));
            }
            if k == n - 1 {
                let flux = self.big_g(b) - self.big_g((u[n - 1] - u[n - 2]) / h);
                d_eta -= flux / (w[k] * w[k] * (b - eta).powi(2));
            }
            rows.push(Row {
                start: k.saturating_sub(1),
                coefs,
                border: [-e, d_eta],
                rhs: -rhs[k],
            });
        }
        let mid = self.grid.mid();
        rows.push(Row {
            start: mid,
            coefs: vec![1.0],
            border: [0.0, 0.0],
            rhs: -rhs[n],
        });
        rows.push(Row {
            start: mid - 1,
            coefs: vec![-0.5 / h, 0.0, 0.5 / h],
            border: [0.0, 0.0],
            rhs: -rhs[n + 1],
        });
        rows
    }

    fn admissible(&self, u: &[f64], eta: f64) -> bool {
        let h = self.grid.step();
        let slack = 1e-6 * (self.beta - self.alpha);
        eta > self.alpha
            && eta < self.beta
            && u.windows(2).all(|p| {
                let y = (p[1] - p[0]) / h;
                y > self.alpha - slack && y < self.beta + slack && self.small_g(y) > 0.0
            })
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Damped Newton for `g(u') u'' = c exp(-u + eta x)` on a one-dimensional `P`.
pub fn solve_ma(p: &LabelledPolytope, g: &WeightFunction, opts: &SolveOptions) -> Result<Solution> {
    let interval = interval_of(p)?;
    g.certify(p)?;
    let eta0 = weighted_barycenter(p, g)?[0];
    let grid = opts.grid.unwrap_or_else(|| default_grid(interval, eta0));
    let disc = Discretization::new(grid, g, interval);
    let n = grid.nodes;

    let mut u = DiscretePotential::reference(grid, interval).values;
    let mut eta = eta0;
    let v_g = disc.big_g(disc.beta);
    let mass: f64 = disc
        .weights(eta)
        .iter()
        .zip(&u)
        .zip(&disc.x)
        .map(|((w, uk), x)| w * (-uk + eta * x).exp())
        .sum();
    let mut gamma = (v_g / mass).ln();

    let mut damping = Vec::new();
    let mut r = disc.residual(&u, gamma, eta);
    let mut norm = sup(&r);
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        if norm < opts.tolerance * 1e-4 {
            break;
        }
        let rows = disc.jacobian(&u, gamma, eta, &r);
        let Some((du, dz)) = solve_bordered(n, rows) else {
            return Err(Error::NewtonDiverged { damping });
        };
        let mut t = 1.0;
        let accepted = loop {
            let trial_u: Vec<f64> = u.iter().zip(&du).map(|(a, d)| a + t * d).collect();
            let trial_gamma = gamma + t * dz[0];
            let trial_eta = eta + t * dz[1];
            if disc.admissible(&trial_u, trial_eta) {
                let tr = disc.residual(&trial_u, trial_gamma, trial_eta);
                let tn = sup(&tr);
                if tn.is_finite() && tn < (1.0 - 1e-4 * t) * norm {
                    break Some((trial_u, trial_gamma, trial_eta, tr, tn));
                }
            }
            t *= 0.5;
            if t < 1e-10 {
                break None;
            }
        };
        iterations += 1;
        match accepted {
            Some((nu, ng, ne, nr, nn)) => {
                damping.push(t);
                u = nu;
                gamma = ng;
                eta = ne;
                r = nr;
                norm = nn;
            }
            None if norm < opts.tolerance => break,
            None => {
                damping.push(0.0);
                return Err(Error::NewtonDiverged { damping });
            }
        }
    }
    if !(norm < opts.tolerance) {
        return Err(Error::NewtonDiverged { damping });
    }
    let h = grid.step();
    let gap = ((u[1] - u[0]) / h - disc.alpha)
        .abs()
        .max((disc.beta - (u[n - 1] - u[n - 2]) / h).abs());
    if gap > opts.window_tolerance {
        return Err(Error::WindowTooSmall { gap });
    }
    Ok(Solution {
        potential: DiscretePotential { grid, values: u },
        c: gamma.exp(),
        eta,
        residual: norm,
        iterations,
        damping,
        boundary_gap: gap,
        obstructed: eta.abs() > 1e-8,
    })
}

impl Solution {
    /// Moments `int y^j d(grad u)_* (c exp(-u + eta x) dx)` for `j < count`,
    /// evaluated from the right-hand side of the equation.
    pub fn pushforward_moments(&self, p: &LabelledPolytope, g: &WeightFunction, count: usize) -> Result<Vec<f64>> {
        let interval = interval_of(p)?;
        let disc = Discretization::new(self.potential.grid, g, interval);
        let w = disc.weights(self.eta);
        let u = &self.potential.values;
        let y = self.potential.slopes();
        let n = u.len();
        let mut out = vec![0.0; count];
        for k in 0..n {
            let left = if k == 0 { interval.0 } else { y[k - 1] };
            let right = if k == n - 1 { interval.1 } else { y[k] };
            let slope = 0.5 * (left + right);
            let mass = self.c * w[k] * (-u[k] + self.eta * disc.x[k]).exp();
            let mut pw = 1.0;
            for m in out.iter_mut() {
                *m += mass * pw;
                pw *= slope;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SolveOptions {
        SolveOptions {
            grid: Some(Grid::new(20.0, 2001).unwrap()),
            ..SolveOptions::default()
        }
    }

    #[test]
    fn symmetric_data_gives_even_solution() {
        let p = LabelledPolytope::builtin("p1").unwrap();
        let s = solve_ma(&p, &WeightFunction::one(), &small()).unwrap();
        assert!(s.residual < 1e-8);
        assert!(s.eta.abs() < 1e-12 && !s.obstructed);
        let u = &s.potential.values;
        let n = u.len();
        let asym = (0..n).map(|k| (u[k] - u[n - 1 - k]).abs()).fold(0.0, f64::max);
        assert!(asym < 1e-8, "{asym}");
        s.potential.check_admissible((-1.0, 1.0)).unwrap();
    }

    #[test]
    fn twisted_solution_for_obstructed_weight() {
        let p = LabelledPolytope::builtin("p1").unwrap();
        let g = WeightFunction::exp_linear(vec![0.5]);
        let s = solve_ma(&p, &g, &SolveOptions::default()).unwrap();
        assert!(s.residual < 1e-8);
        let b = weighted_barycenter(&p, &g).unwrap()[0];
        assert!(s.obstructed);
        assert!((s.eta - b).abs() < 1e-5, "{} vs {b}", s.eta);
    }

    #[test]
    fn rejects_higher_dimensions() {
        let p = LabelledPolytope::builtin("p2").unwrap();
        assert!(solve_ma(&p, &WeightFunction::one(), &small()).is_err());
    }
}
