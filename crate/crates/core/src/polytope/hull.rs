//! Exact H-polytope machinery: vertex enumeration by hyperplane intersection,
//! facet recovery from tight vertex sets, and a pulling triangulation of the
//! boundary coned from an interior point.

use num_traits::{Signed, Zero};

use crate::rational::{affine_rank, det, dot, factorial, solve, QVec, Q};

/// `normal · x <= offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: QVec,
    pub offset: Q,
}

impl Halfspace {
    pub fn slack(&self, x: &[Q]) -> Q {
        &self.offset - dot(&self.normal, x)
    }
}

/// Vertices and facets of a bounded H-polytope.
#[derive(Debug, Clone)]
pub struct Hull {
    pub dim: usize,
    pub vertices: Vec<QVec>,
    /// `(halfspace index, sorted ids of tight vertices)` for every true facet.
    pub facets: Vec<(usize, Vec<usize>)>,
}

/// Calls `f` on every `k`-subset of `0..n` in lexicographic order.
pub fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All vertices of `{x : h.normal·x <= h.offset}`, sorted and deduplicated.
pub fn enumerate_vertices(dim: usize, hs: &[Halfspace]) -> Vec<QVec> {
    let mut out: Vec<QVec> = Vec::new();
    for_each_subset(hs.len(), dim, |subset| {
        let m: Vec<QVec> = subset.iter().map(|&i| hs[i].normal.clone()).collect();
        let rhs: Vec<Q> = subset.iter().map(|&i| hs[i].offset.clone()).collect();
        if let Some(x) = solve(&m, &rhs) {
            if hs.iter().all(|h| !h.slack(&x).is_negative()) {
                out.push(x);
            }
        }
    });
    out.sort();
    out.dedup();
    out
}

impl Hull {
    /// Builds the hull of a bounded H-polytope. Returns `None` when the
    /// polytope is empty or not full-dimensional.
    pub fn from_halfspaces(dim: usize, hs: &[Halfspace]) -> Option<Hull> {
        let vertices = enumerate_vertices(dim, hs);
        if vertices.len() < dim + 1 {
            return None;
        }
        let refs: Vec<&QVec> = vertices.iter().collect();
        if affine_rank(&refs) < dim {
            return None;
        }
        let mut facets: Vec<(usize, Vec<usize>)> = Vec::new();
        for (i, h) in hs.iter().enumerate() {
            let tight = tight_set(&vertices, h);
            if tight.len() < dim {
                continue;
            }
            let pts: Vec<&QVec> = tight.iter().map(|&v| &vertices[v]).collect();
            if affine_rank(&pts) + 1 == dim && !facets.iter().any(|(_, t)| *t == tight) {
                facets.push((i, tight));
            }
        }
        Some(Hull {
            dim,
            vertices,
            facets,
        })
    }

    pub fn vertex_centroid(&self) -> QVec {
        let n = Q::from_integer(self.vertices.len().into());
        (0..self.dim)
            .map(|d| self.vertices.iter().map(|v| v[d].clone()).sum::<Q>() / &n)
            .collect()
    }

    /// Simplices (as point lists of length `dim + 1`) coning the pulling
    /// triangulation of every facet from `center`.
    pub fn triangulate_from(&self, center: &QVec) -> Vec<Vec<QVec>> {
        let facet_sets: Vec<Vec<usize>> = self.facets.iter().map(|(_, t)| t.clone()).collect();
        let mut out = Vec::new();
        for set in &facet_sets {
            for cell in triangulate_face(&self.vertices, set, self.dim - 1, &facet_sets) {
                let mut simplex = Vec::with_capacity(self.dim + 1);
                simplex.push(center.clone());
                simplex.extend(cell.iter().map(|&v| self.vertices[v].clone()));
                out.push(simplex);
            }
        }
        out
    }
}

pub fn tight_set(vertices: &[QVec], h: &Halfspace) -> Vec<usize> {
    vertices
        .iter()
        .enumerate()
        .filter(|(_, v)| h.slack(v).is_zero())
        .map(|(i, _)| i)
        .collect()
}

/// Pulling triangulation of a `k`-dimensional face given by its vertex ids.
fn triangulate_face(
    vertices: &[QVec],
    face: &[usize],
    k: usize,
    facet_sets: &[Vec<usize>],
) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![face[0]]];
    }
    let apex = face[0];
    let mut subfaces: Vec<Vec<usize>> = Vec::new();
    for fs in facet_sets {
        let inter: Vec<usize> = face.iter().copied().filter(|v| fs.contains(v)).collect();
        if inter.len() < k || inter.len() == face.len() || inter.contains(&apex) {
            continue;
        }
        let pts: Vec<&QVec> = inter.iter().map(|&v| &vertices[v]).collect();
        if affine_rank(&pts) + 1 == k && !subfaces.contains(&inter) {
            subfaces.push(inter);
        }
    }
    let mut out = Vec::new();
    for sf in &subfaces {
        for mut cell in triangulate_face(vertices, sf, k - 1, facet_sets) {
            cell.insert(0, apex);
            out.push(cell);
        }
    }
    out
}

/// Unsigned volume of a simplex given by `dim + 1` points.
pub fn simplex_volume(points: &[QVec]) -> Q {
    let dim = points.len() - 1;
    let rows: Vec<QVec> = points[1..]
        .iter()
        .map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect())
        .collect();
    det(&rows).abs() / factorial(dim)
}
