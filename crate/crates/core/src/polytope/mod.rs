//! Monotone labelled lattice polytopes `P = {x : <nu_i, x> <= 1}` with the
//! origin strictly inside.

pub mod hull;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, affine_rank, dot, format_rational, q, solve, to_f64_vec, QVec, Q};
use hull::{for_each_subset, simplex_volume, tight_set, Halfspace, Hull};

/// Default cap on the number of lattice points visited by [`LabelledPolytope::lattice_points`].
pub const DEFAULT_LATTICE_CAP: u128 = 10_000_000;

/// Maximum number of facets or input points accepted by the constructors.
pub const MAX_GENERATORS: usize = 48;

/// A full-dimensional simplex with exact and floating coordinates.
#[derive(Debug, Clone)]
pub struct Simplex {
    pub points: Vec<QVec>,
    pub points_f64: Vec<Vec<f64>>,
    pub volume: Q,
    pub volume_f64: f64,
}

impl Simplex {
    pub fn new(points: Vec<QVec>) -> Simplex {
        let volume = simplex_volume(&points);
        Simplex {
            points_f64: points.iter().map(|p| to_f64_vec(p)).collect(),
            volume_f64: rational::to_f64(&volume),
            points,
            volume,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Facet {
    /// Outer normal scaled so that the facet is `<normal, x> = 1`.
    pub normal: QVec,
    /// Always one after normalization.
    pub label: Q,
    /// Indices into [`LabelledPolytope::vertices`] of the vertices on this facet.
    pub vertex_ids: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LabelledPolytope {
    dim: usize,
    facets: Vec<Facet>,
    vertices: Vec<QVec>,
    vertices_f64: Vec<Vec<f64>>,
    simplices: Vec<Simplex>,
    volume: Q,
}

impl LabelledPolytope {
    /// Builds `{x : <normal_i, x> <= label_i}` and rescales every facet to label one.
    pub fn from_facets(normals: &[QVec], labels: &[Q]) -> Result<LabelledPolytope> {
        if normals.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: normals.len(),
                got: labels.len(),
            });
        }
        if normals.is_empty() {
            return Err(Error::Empty);
        }
        if normals.len() > MAX_GENERATORS {
            return Err(Error::schema(
                "/facets",
                format!("at most {MAX_GENERATORS} facets supported"),
            ));
        }
        let dim = normals[0].len();
        if !(1..=4).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        let mut scaled: Vec<QVec> = Vec::with_capacity(normals.len());
        for (i, (nu, label)) in normals.iter().zip(labels).enumerate() {
            if nu.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: nu.len(),
                });
            }
            if !label.is_positive() {
                return Err(Error::DegenerateFacet {
                    index: i,
                    reason: format!("label {} is not positive", format_rational(label)),
                });
            }
            if nu.iter().all(Zero::is_zero) {
                return Err(Error::DegenerateFacet {
                    index: i,
                    reason: "zero normal".into(),
                });
            }
            scaled.push(nu.iter().map(|x| x / label).collect());
        }
        check_bounded(dim, &scaled)?;
        let hs: Vec<Halfspace> = scaled
            .iter()
            .map(|nu| Halfspace {
                normal: nu.clone(),
                offset: Q::one(),
            })
            .collect();
        let vertices = hull::enumerate_vertices(dim, &hs);
        if vertices.is_empty() {
            return Err(Error::Empty);
        }
        let mut facets = Vec::with_capacity(hs.len());
        for (i, h) in hs.iter().enumerate() {
            let tight = tight_set(&vertices, h);
            let pts: Vec<&QVec> = tight.iter().map(|&v| &vertices[v]).collect();
            if tight.is_empty() || affine_rank(&pts) + 1 != dim {
                return Err(Error::DegenerateFacet {
                    index: i,
                    reason: if tight.is_empty() {
                        "facet is not tight at any vertex".into()
                    } else {
                        "facet supports only a lower-dimensional face".into()
                    },
                });
            }
            if let Some(j) = facets.iter().position(|f: &Facet| f.vertex_ids == tight) {
                return Err(Error::DegenerateFacet {
                    index: i,
                    reason: format!("duplicates facet {j}"),
                });
            }
            facets.push(Facet {
                normal: h.normal.clone(),
                label: Q::one(),
                vertex_ids: tight,
            });
        }
        let hull = Hull {
            dim,
            vertices: vertices.clone(),
            facets: facets
                .iter()
                .enumerate()
                .map(|(i, f)| (i, f.vertex_ids.clone()))
                .collect(),
        };
        let simplices: Vec<Simplex> = hull
            .triangulate_from(&vec![Q::zero(); dim])
            .into_iter()
            .map(Simplex::new)
            .collect();
        let volume = simplices.iter().map(|s| s.volume.clone()).sum();
        Ok(LabelledPolytope {
            dim,
            vertices_f64: vertices.iter().map(|v| to_f64_vec(v)).collect(),
            facets,
            vertices,
            simplices,
            volume,
        })
    }

    /// Convex hull of `points`, with facets normalized to label one.
    pub fn from_vertices(points: &[QVec]) -> Result<LabelledPolytope> {
        let Some(first) = points.first() else {
            return Err(Error::Empty);
        };
        if points.len() > MAX_GENERATORS {
            return Err(Error::schema("/vertices", "too many points"));
        }
        let dim = first.len();
        if !(1..=4).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        let refs: Vec<&QVec> = points.iter().collect();
        let rank = affine_rank(&refs);
        if rank < dim {
            return Err(Error::LowerDimensional { rank, dim });
        }
        let mut normals: Vec<QVec> = Vec::new();
        let mut origin_inside = true;
        for_each_subset(points.len(), dim, |subset| {
            let Some((normal, offset)) = hyperplane_through(subset.iter().map(|&i| &points[i]))
            else {
                return;
            };
            let sides: Vec<Q> = points.iter().map(|p| dot(&normal, p) - &offset).collect();
            let (normal, offset) = if sides.iter().all(|s| !s.is_positive()) {
                (normal, offset)
            } else if sides.iter().all(|s| !s.is_negative()) {
                (normal.iter().map(|x| -x).collect::<QVec>(), -offset)
            } else {
                return;
            };
            if !offset.is_positive() {
                origin_inside = false;
                return;
            }
            let nu: QVec = normal.iter().map(|x| x / &offset).collect();
            if !normals.contains(&nu) {
                normals.push(nu);
            }
        });
        if !origin_inside {
            return Err(Error::OriginNotInterior);
        }
        normals.sort();
        let labels = vec![Q::one(); normals.len()];
        LabelledPolytope::from_facets(&normals, &labels)
    }

    /// One of the shipped reflexive examples; validated on every load.
    pub fn builtin(name: &str) -> Result<LabelledPolytope> {
        let verts: &[&[i64]] = match name {
            "p1" => &[&[-1], &[1]],
            "p2" => &[&[-1, -1], &[2, -1], &[-1, 2]],
            "p1xp1" => &[&[-1, -1], &[1, -1], &[1, 1], &[-1, 1]],
            "bl1p2" => &[&[-1, 0], &[0, -1], &[2, -1], &[-1, 2]],
            "bl2p2" => &[&[-1, 0], &[0, -1], &[1, -1], &[1, 0], &[-1, 2]],
            "bl3p2" => &[&[-1, 0], &[0, -1], &[1, -1], &[1, 0], &[0, 1], &[-1, 1]],
            _ => {
                return Err(Error::schema(
                    "/builtin",
                    format!("unknown builtin polytope {name:?}"),
                ))
            }
        };
        let points: Vec<QVec> = verts.iter().map(|v| rational::qvec(v)).collect();
        let p = LabelledPolytope::from_vertices(&points)?;
        if !p.is_reflexive() {
            return Err(Error::schema(
                "/builtin",
                format!("builtin {name} failed the reflexivity check"),
            ));
        }
        Ok(p)
    }

    pub const BUILTIN_NAMES: [&'static str; 6] = ["p1", "p2", "p1xp1", "bl1p2", "bl2p2", "bl3p2"];

    /// Integral vertices and integral unit-label facet normals.
    pub fn is_reflexive(&self) -> bool {
        self.vertices.iter().flatten().all(rational::is_integral)
            && self
                .facets
                .iter()
                .all(|f| f.label.is_one() && f.normal.iter().all(rational::is_integral))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn vertices(&self) -> &[QVec] {
        &self.vertices
    }

    pub fn vertices_f64(&self) -> &[Vec<f64>] {
        &self.vertices_f64
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    /// Star triangulation from the origin.
    pub fn triangulate(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn volume(&self) -> &Q {
        &self.volume
    }

    pub fn volume_f64(&self) -> f64 {
        rational::to_f64(&self.volume)
    }

    pub fn halfspaces(&self) -> Vec<Halfspace> {
        self.facets
            .iter()
            .map(|f| Halfspace {
                normal: f.normal.clone(),
                offset: Q::one(),
            })
            .collect()
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.facets.iter().all(|f| dot(&f.normal, x) <= Q::one())
    }

    /// `min_v <a, v>` over the vertices.
    pub fn support_min(&self, a: &[Q]) -> Q {
        self.vertices
            .iter()
            .map(|v| dot(a, v))
            .min()
            .expect("polytope has vertices")
    }

    pub fn support_max(&self, a: &[Q]) -> Q {
        self.vertices
            .iter()
            .map(|v| dot(a, v))
            .max()
            .expect("polytope has vertices")
    }

    pub fn support_min_f64(&self, a: &[f64]) -> f64 {
        self.vertices_f64
            .iter()
            .map(|v| v.iter().zip(a).map(|(x, y)| x * y).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    }

    /// Endpoints of a one-dimensional polytope.
    pub fn interval(&self) -> Option<(f64, f64)> {
        (self.dim == 1).then(|| {
            let lo = self.support_min_f64(&[1.0]);
            let hi = -self.support_min_f64(&[-1.0]);
            (lo, hi)
        })
    }

    /// Integer points of `mP`, in lexicographic order.
    pub fn lattice_points(&self, m: u32) -> Result<Vec<Vec<i64>>> {
        self.lattice_points_capped(m, DEFAULT_LATTICE_CAP)
    }

    pub fn lattice_points_capped(&self, m: u32, cap: u128) -> Result<Vec<Vec<i64>>> {
        if m == 0 {
            return Err(Error::schema("/m", "m must be positive"));
        }
        let mq = q(m as i64);
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        let mut box_size: u128 = 1;
        for d in 0..self.dim {
            let mut e = vec![Q::zero(); self.dim];
            e[d] = Q::one();
            let a = (self.support_min(&e) * &mq).floor();
            let b = (self.support_max(&e) * &mq).ceil();
            let (a, b) = (
                a.to_integer().to_i64().ok_or(Error::OverflowGuard {
                    requested: u128::MAX,
                    cap,
                })?,
                b.to_integer().to_i64().ok_or(Error::OverflowGuard {
                    requested: u128::MAX,
                    cap,
                })?,
            );
            box_size = box_size.saturating_mul((b - a + 1) as u128);
            lo.push(a);
            hi.push(b);
        }
        if box_size > cap {
            return Err(Error::OverflowGuard {
                requested: box_size,
                cap,
            });
        }
        // Integer facet inequalities <w, u> <= m * d.
        let integral: Vec<(Vec<i128>, i128)> = self
            .facets
            .iter()
            .map(|f| {
                let den = f
                    .normal
                    .iter()
                    .fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
                let w: Vec<i128> = f
                    .normal
                    .iter()
                    .map(|x| (x * Q::from_integer(den.clone())).to_integer().to_i128().unwrap())
                    .collect();
                (w, den.to_i128().unwrap() * m as i128)
            })
            .collect();
        let mut out = Vec::new();
        let mut u = lo.clone();
        loop {
            if integral.iter().all(|(w, rhs)| {
                w.iter().zip(&u).map(|(a, b)| a * *b as i128).sum::<i128>() <= *rhs
            }) {
                out.push(u.clone());
            }
            let mut d = self.dim;
            loop {
                if d == 0 {
                    return Ok(out);
                }
                d -= 1;
                if u[d] < hi[d] {
                    u[d] += 1;
                    for k in d + 1..self.dim {
                        u[k] = lo[k];
                    }
                    break;
                }
            }
        }
    }

    /// Image under an integer matrix with determinant +-1 (rows act on column vectors).
    pub fn linear_image(&self, matrix: &[Vec<i64>]) -> Result<LabelledPolytope> {
        if matrix.len() != self.dim || matrix.iter().any(|r| r.len() != self.dim) {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: matrix.len(),
            });
        }
        let qm: Vec<QVec> = matrix.iter().map(|r| rational::qvec(r)).collect();
        if rational::det(&qm).abs() != Q::one() {
            return Err(Error::schema("/matrix", "matrix is not unimodular"));
        }
        let points: Vec<QVec> = self
            .vertices
            .iter()
            .map(|v| qm.iter().map(|row| dot(row, v)).collect())
            .collect();
        LabelledPolytope::from_vertices(&points)
    }
}

/// `(normal, offset)` with `normal · p = offset` for all given points, or
/// `None` if they do not determine a unique hyperplane.
fn hyperplane_through<'a>(points: impl Iterator<Item = &'a QVec>) -> Option<(QVec, Q)> {
    let pts: Vec<&QVec> = points.collect();
    let dim = pts[0].len();
    if affine_rank(&pts) + 1 != dim {
        return None;
    }
    // Null vector of the (dim-1) x dim difference matrix via cofactors.
    let diffs: Vec<QVec> = pts[1..]
        .iter()
        .map(|p| p.iter().zip(pts[0]).map(|(a, b)| a - b).collect())
        .collect();
    let normal: QVec = (0..dim)
        .map(|k| {
            let minor: Vec<QVec> = diffs
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != k)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let d = rational::det(&minor);
            if k % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect();
    if normal.iter().all(Zero::is_zero) {
        return None;
    }
    let offset = dot(&normal, pts[0]);
    Some((normal, offset))
}

/// Rejects normal sets whose cone `{d : <nu_i, d> <= 0}` is nontrivial.
fn check_bounded(dim: usize, normals: &[QVec]) -> Result<()> {
    if rational::rank(normals) < dim {
        return Err(Error::Unbounded {
            direction: vec!["lineality".into()],
        });
    }
    let mut found: Option<QVec> = None;
    for_each_subset(normals.len(), dim - 1, |subset| {
        if found.is_some() {
            return;
        }
        for d in ray_candidates(dim, subset.iter().map(|&i| &normals[i])) {
            if normals.iter().all(|nu| !dot(nu, &d).is_positive()) {
                found = Some(d);
                return;
            }
        }
    });
    match found {
        Some(d) => Err(Error::Unbounded {
            direction: d.iter().map(format_rational).collect(),
        }),
        None => Ok(()),
    }
}

/// Both generators of the one-dimensional kernel of the given rows, if any.
fn ray_candidates<'a>(dim: usize, rows: impl Iterator<Item = &'a QVec>) -> Vec<QVec> {
    let rows: Vec<QVec> = rows.cloned().collect();
    if rational::rank(&rows) != dim - 1 {
        return Vec::new();
    }
    for k in 0..dim {
        // Fix coordinate k to one and solve the remaining square system.
        let mut m = rows.clone();
        let mut e = vec![Q::zero(); dim];
        e[k] = Q::one();
        m.push(e);
        let mut rhs = vec![Q::zero(); dim - 1];
        rhs.push(Q::one());
        if let Some(d) = solve(&m, &rhs) {
            let neg: QVec = d.iter().map(|x| -x).collect();
            return vec![d, neg];
        }
    }
    Vec::new()
}
