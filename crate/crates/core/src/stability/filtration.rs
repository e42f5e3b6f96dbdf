use std::collections::BTreeMap;

use crate::error::Result;
use crate::polytope::LabelledPolytope;
use crate::quadrature::{pairwise_sum, WeightFunction};
use crate::rational::{to_f64, Q};

use super::pl::PLConvexFunction;

#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationEntry {
    pub u: Vec<i64>,
    /// `lambda_u = m f(u/m)`.
    pub lambda: f64,
    /// `g(u/m)`.
    pub weight: f64,
}

/// The weighted successive minima of the filtration attached to `f` at level `m`.
#[derive(Debug, Clone)]
pub struct FiltrationSample {
    pub m: u32,
    pub dim: usize,
    pub entries: Vec<FiltrationEntry>,
    /// Atoms of `nu_m` at the exact positions `f(u/m)`, in increasing order,
    /// each with mass `(n!/m^n) sum g(u/m)`.
    pub atoms: Vec<(Q, f64)>,
}

impl FiltrationSample {
    fn scale(&self) -> f64 {
        let n_fact: f64 = (1..=self.dim).map(|k| k as f64).product();
        n_fact / (self.m as f64).powi(self.dim as i32)
    }

    pub fn total_mass(&self) -> f64 {
        pairwise_sum(&self.atoms.iter().map(|a| a.1).collect::<Vec<_>>())
    }

    /// Barycenter of `nu_m` normalized to a probability measure.
    pub fn mean(&self) -> f64 {
        let moments: Vec<f64> = self.atoms.iter().map(|(x, w)| to_f64(x) * w).collect();
        pairwise_sum(&moments) / self.total_mass()
    }

    /// `f_m(lambda) = (n!/m^n) sum_{lambda_u >= m lambda} g(u/m)`.
    pub fn f_m(&self, lambda: f64) -> f64 {
        let mut tail = Vec::new();
        for (x, w) in self.atoms.iter().rev() {
            if to_f64(x) < lambda {
                break;
            }
            tail.push(*w);
        }
        pairwise_sum(&tail)
    }

    /// Atom positions and masses as floats.
    pub fn atoms_f64(&self) -> Vec<(f64, f64)> {
        self.atoms.iter().map(|(x, w)| (to_f64(x), *w)).collect()
    }
}

/// Builds `nu_m` for the normalized version of `f`.
pub fn dh_g_filtration(
    p: &LabelledPolytope,
    g: &WeightFunction,
    f: &PLConvexFunction,
    m: u32,
) -> Result<FiltrationSample> {
    g.check_dim(p.dim())?;
    let f = f.normalized(p)?;
    let points = p.lattice_points(m)?;
    let mq = Q::from_integer(m.into());
    let mut grouped: BTreeMap<Q, Vec<f64>> = BTreeMap::new();
    let mut entries = Vec::with_capacity(points.len());
    for u in points {
        let x: Vec<Q> = u.iter().map(|&k| Q::from_integer(k.into()) / &mq).collect();
        let value = f.eval(&x);
        let xf: Vec<f64> = x.iter().map(to_f64).collect();
        let weight = g.eval(&xf);
        entries.push(FiltrationEntry {
            lambda: to_f64(&(&value * &mq)),
            weight,
            u,
        });
        grouped.entry(value).or_default().push(weight);
    }
    let mut sample = FiltrationSample {
        m,
        dim: p.dim(),
        entries,
        atoms: Vec::new(),
    };
    let scale = sample.scale();
    sample.atoms = grouped
        .into_iter()
        .map(|(x, ws)| (x, scale * pairwise_sum(&ws)))
        .collect();
    Ok(sample)
}
