//! One-dimensional toric soliton equation and the energy functionals.
//!
//! On the open orbit a torus-invariant potential is a convex function `u` on
//! the line whose slopes fill the interval `P = [alpha, beta]`. The equation
//!
//! ```text
//! g(u') u'' = c exp(-u + eta x)
//! ```
//!
//! is discretized in flux form on a uniform grid. With `G` the antiderivative
//! of `g` from `alpha` and `y_{k+1/2} = (u_{k+1} - u_k) / h`, node `k` carries
//! the Monge–Ampère mass `G(y_{k+1/2}) - G(y_{k-1/2})`; the end nodes use the
//! tail fluxes `G(alpha)` and `G(beta)`. Masses then sum to `V_g` exactly.
//!
//! The twist `eta` equals the weighted barycenter of `g` and vanishes exactly
//! when the Futaki invariant does; without it the equation has no solution.

pub mod functionals;
pub mod linalg;
pub mod solver;
pub mod suite;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polytope::LabelledPolytope;

pub use functionals::{functionals, FunctionalRecord, Functionals};
pub use solver::{solve_ma, SolveOptions, Solution};
pub use suite::{inequality_suite, InequalityReport};

/// Default half-width of the window.
pub const DEFAULT_RADIUS: f64 = 20.0;
/// Default number of nodes.
pub const DEFAULT_NODES: usize = 10_001;
/// Largest grid accepted from input.
pub const MAX_NODES: usize = 1_000_001;

/// Uniform nodes `x_k = -R + k h`, `h = 2R / (N - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "N")]
    pub nodes: usize,
}

impl Grid {
    pub fn new(radius: f64, nodes: usize) -> Result<Grid> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::schema("/grid/R", "radius must be positive and finite"));
        }
        if nodes < 5 || nodes.is_multiple_of(2) || nodes > MAX_NODES {
            return Err(Error::schema(
                "/grid/N",
                format!("node count must be odd and in 5..={MAX_NODES}"),
            ));
        }
        Ok(Grid { radius, nodes })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.radius / (self.nodes - 1) as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        -self.radius + k as f64 * self.step()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.nodes).map(|k| self.x(k)).collect()
    }

    pub fn mid(&self) -> usize {
        self.nodes / 2
    }
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            radius: DEFAULT_RADIUS,
            nodes: DEFAULT_NODES,
        }
    }
}

/// Grid values of a convex potential, extended affinely outside the window
/// with the endpoint slopes of `P`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretePotential {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl DiscretePotential {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<DiscretePotential> {
        if values.len() != grid.nodes {
            return Err(Error::schema(
                "/values",
                format!("expected {} values, got {}", grid.nodes, values.len()),
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::schema(format!("/values/{i}"), "value is not finite"));
        }
        Ok(DiscretePotential { grid, values })
    }

    /// `log sum_v exp(v x)` over the endpoints of `P`.
    pub fn reference(grid: Grid, interval: (f64, f64)) -> DiscretePotential {
        let (a, b) = interval;
        let values = grid
            .points()
            .into_iter()
            .map(|x| {
                let (p, q) = (a * x, b * x);
                let m = p.max(q);
                m + ((p - m).exp() + (q - m).exp()).ln()
            })
            .collect();
        DiscretePotential { grid, values }
    }

    /// Forward slopes `y_{k+1/2}`.
    pub fn slopes(&self) -> Vec<f64> {
        let h = self.grid.step();
        self.values.windows(2).map(|w| (w[1] - w[0]) / h).collect()
    }

    /// Checks discrete convexity and that every slope lies in `[alpha, beta]`.
    pub fn check_admissible(&self, interval: (f64, f64)) -> Result<()> {
        let (a, b) = interval;
        let y = self.slopes();
        let slack = 1e-9 * (b - a);
        if let Some(k) = y.iter().position(|s| *s < a - slack || *s > b + slack) {
            return Err(Error::NonConvexInput(format!(
                "slope {} at cell {k} leaves [{a}, {b}]",
                y[k]
            )));
        }
        let h = self.grid.step();
        if let Some(k) = y.windows(2).position(|w| (w[1] - w[0]) * h < -1e-12) {
            return Err(Error::NonConvexInput(format!(
                "negative second difference at node {}",
                k + 1
            )));
        }
        Ok(())
    }

    pub fn shifted(&self, kappa: f64) -> DiscretePotential {
        DiscretePotential {
            grid: self.grid,
            values: self.values.iter().map(|v| v + kappa).collect(),
        }
    }

    /// `x -> u(x + s)` with `s = shift * h`, continued past the window with the
    /// endpoint slopes of `P`.
    pub fn translated(&self, shift: isize, interval: (f64, f64)) -> DiscretePotential {
        let n = self.values.len() as isize;
        let h = self.grid.step();
        let values = (0..n)
            .map(|k| {
                let j = k + shift;
                if j < 0 {
                    self.values[0] + interval.0 * j as f64 * h
                } else if j >= n {
                    self.values[(n - 1) as usize] + interval.1 * (j - n + 1) as f64 * h
                } else {
                    self.values[j as usize]
                }
            })
            .collect();
        DiscretePotential {
            grid: self.grid,
            values,
        }
    }

    /// `(1 - t) self + t other`.
    pub fn lerp(&self, other: &DiscretePotential, t: f64) -> DiscretePotential {
        DiscretePotential {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + t * (b - a))
                .collect(),
        }
    }
}

/// Endpoints of a one-dimensional polytope.
pub(crate) fn interval_of(p: &LabelledPolytope) -> Result<(f64, f64)> {
    p.interval().ok_or(Error::DimensionMismatch {
        expected: 1,
        got: p.dim(),
    })
}
