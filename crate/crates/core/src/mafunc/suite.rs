//! Randomized check of the comparison inequalities between the functionals.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::polytope::LabelledPolytope;
use crate::quadrature::WeightFunction;

use super::functionals::Functionals;
use super::{interval_of, DiscretePotential, Grid};

/// Interpolation times for the scaling check on `J_g`.
pub const SCALING_TIMES: [f64; 5] = [0.1, 0.25, 0.5, 0.75, 1.0];
/// Relative slack absorbing floating-point noise in each comparison.
pub const RELATIVE_SLACK: f64 = 1e-9;

/// `u(x) = kappa + tau log sum_j exp((a_j x + b_j) / tau)`.
///
/// The slopes include both endpoints of `P`, so `u` is convex, its slopes
/// fill `P` and it differs from `u0` by a bounded function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomPotential {
    pub slopes: Vec<f64>,
    pub offsets: Vec<f64>,
    pub tau: f64,
    pub kappa: f64,
}

impl RandomPotential {
    pub fn sample<R: Rng>(rng: &mut R, interval: (f64, f64)) -> RandomPotential {
        let (a, b) = interval;
        let interior = rng.gen_range(0..=3);
        let mut slopes = vec![a, b];
        slopes.extend((0..interior).map(|_| rng.gen_range(a..b)));
        let offsets = slopes.iter().map(|_| rng.gen_range(-1.5..1.5)).collect();
        RandomPotential {
            slopes,
            offsets,
            tau: rng.gen_range(0.3..2.0),
            kappa: rng.gen_range(-1.0..1.0),
        }
    }

    pub fn on(&self, grid: Grid) -> DiscretePotential {
        let values = grid
            .points()
            .into_iter()
            .map(|x| {
                let z: Vec<f64> = self
                    .slopes
                    .iter()
                    .zip(&self.offsets)
                    .map(|(a, b)| (a * x + b) / self.tau)
                    .collect();
                let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                self.kappa + self.tau * (m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln())
            })
            .collect();
        DiscretePotential { grid, values }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub name: &'static str,
    pub tested: usize,
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub check: &'static str,
    pub sample: usize,
    /// Holds when `lhs <= rhs`.
    pub lhs: f64,
    pub rhs: f64,
    pub potential: RandomPotential,
}

/// The sharper scaling `J_g(u_t) <= t^(1 + 1/C) J_g(u)`, reported but not
/// required.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpScaling {
    pub exponent: f64,
    pub tested: usize,
    pub satisfied: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub samples: usize,
    pub seed: u64,
    pub grid: Grid,
    pub checks: Vec<CheckSummary>,
    pub violations: Vec<Violation>,
    pub sharp_scaling: SharpScaling,
}

impl InequalityReport {
    pub fn total_violations(&self) -> usize {
        self.checks.iter().map(|c| c.violations).sum()
    }
}

const CHECKS: [&str; 6] = [
    "band_lower",
    "band_upper",
    "J_nonnegative",
    "I_minus_J_nonnegative",
    "M_above_D",
    "J_scaling",
];

struct Outcome {
    comparisons: Vec<(&'static str, f64, f64)>,
    sharp: (usize, usize),
}

fn leq(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + RELATIVE_SLACK * lhs.abs().max(rhs.abs()) + 1e-14
}

/// Draws `samples` random potentials from `seed` and tests each inequality.
/// Samples are evaluated in parallel; the result does not depend on the
/// thread count.
pub fn inequality_suite(
    p: &LabelledPolytope,
    g: &WeightFunction,
    samples: usize,
    seed: u64,
    grid: Option<Grid>,
) -> Result<InequalityReport> {
    let interval = interval_of(p)?;
    let grid = grid.unwrap_or_default();
    let bounds = g.certify(p)?;
    let (rho, big_r) = (bounds.min, bounds.max);
    let ctx = Functionals::new(p, g, grid)?;
    let one = WeightFunction::one();
    let flat = Functionals::new(p, &one, grid)?;
    // n! vol(P) with n = 1.
    let v1 = interval.1 - interval.0;
    let ratio = v1 / ctx.weighted_volume();
    let exponent = 1.0 + 1.0 / (2.0 * big_r / rho);

    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let params: Vec<RandomPotential> = (0..samples)
        .map(|_| {
            let mut rng = ChaCha8Rng::seed_from_u64(master.next_u64());
            RandomPotential::sample(&mut rng, interval)
        })
        .collect();

    let outcomes: Vec<Outcome> = params
        .par_iter()
        .map(|rp| -> Result<Outcome> {
            let u = rp.on(grid);
            let r = ctx.evaluate(&u)?;
            let r1 = flat.evaluate(&u)?;
            let gap1 = r1.i_g - r1.j_g;
            let gap = r.i_g - r.j_g;
            let mut comparisons = vec![
                ("band_lower", rho * ratio * gap1, gap),
                ("band_upper", gap, big_r * ratio * gap1),
                ("J_nonnegative", 0.0, r.j_g),
                ("I_minus_J_nonnegative", 0.0, gap),
                ("M_above_D", r.d, r.m),
            ];
            let u0 = ctx.reference();
            let mut sharp = (0, 0);
            for &t in &SCALING_TIMES {
                let jt = ctx.j_g(&u0.lerp(&u, t))?;
                comparisons.push(("J_scaling", jt, t * r.j_g));
                sharp.0 += 1;
                if leq(jt, t.powf(exponent) * r.j_g) {
                    sharp.1 += 1;
                }
            }
            Ok(Outcome { comparisons, sharp })
        })
        .collect::<Result<_>>()?;

    let mut checks: Vec<CheckSummary> = CHECKS
        .iter()
        .map(|&name| CheckSummary {
            name,
            tested: 0,
            violations: 0,
        })
        .collect();
    let mut violations = Vec::new();
    let mut sharp_scaling = SharpScaling {
        exponent,
        tested: 0,
        satisfied: 0,
    };
    for (sample, (o, rp)) in outcomes.iter().zip(&params).enumerate() {
        for &(check, lhs, rhs) in &o.comparisons {
            let entry = checks.iter_mut().find(|c| c.name == check).expect("known check");
            entry.tested += 1;
            if !leq(lhs, rhs) {
                entry.violations += 1;
                violations.push(Violation {
                    check,
                    sample,
                    lhs,
                    rhs,
                    potential: rp.clone(),
                });
            }
        }
        sharp_scaling.tested += o.sharp.0;
        sharp_scaling.satisfied += o.sharp.1;
    }
    Ok(InequalityReport {
        samples,
        seed,
        grid,
        checks,
        violations,
        sharp_scaling,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_potentials_are_admissible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grid = Grid::new(20.0, 801).unwrap();
        for _ in 0..20 {
            let rp = RandomPotential::sample(&mut rng, (-1.0, 2.0));
            rp.on(grid).check_admissible((-1.0, 2.0)).unwrap();
        }
    }

    #[test]
    fn small_suite_has_no_violations() {
        let p = LabelledPolytope::builtin("p1").unwrap();
        let g = WeightFunction::exp_linear(vec![0.3]);
        let grid = Some(Grid::new(20.0, 1001).unwrap());
        let report = inequality_suite(&p, &g, 8, 7, grid).unwrap();
        assert_eq!(report.total_violations(), 0, "{:?}", report.violations);
        assert_eq!(report.checks[0].tested, 8);
        let again = inequality_suite(&p, &g, 8, 7, grid).unwrap();
        assert_eq!(report, again);
    }
}
