use num_traits::Zero;

use crate::error::{Error, Result};
use crate::polytope::hull::{Halfspace, Hull};
use crate::polytope::{LabelledPolytope, Simplex};
use crate::rational::{dot, to_f64, to_f64_vec, QVec, Q};

/// Largest number of affine pieces accepted.
pub const MAX_PIECES: usize = 32;

/// An affine piece `<a, x> + c`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Piece {
    pub a: QVec,
    pub c: Q,
}

impl Piece {
    pub fn eval(&self, x: &[Q]) -> Q {
        dot(&self.a, x) + &self.c
    }
}

/// `f(x) = max_j (<a_j, x> + c_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PLConvexFunction {
    pieces: Vec<Piece>,
}

/// The region of `P` where one piece attains the maximum.
#[derive(Debug, Clone)]
pub struct Cell {
    pub piece: usize,
    pub vertices: Vec<QVec>,
    pub simplices: Vec<Simplex>,
}

impl PLConvexFunction {
    /// Pieces are sorted and deduplicated; pieces that share a slope keep only
    /// the largest intercept.
    pub fn new(mut pieces: Vec<Piece>) -> Result<PLConvexFunction> {
        let Some(first) = pieces.first() else {
            return Err(Error::schema("/pieces", "at least one piece is required"));
        };
        if pieces.len() > MAX_PIECES {
            return Err(Error::schema(
                "/pieces",
                format!("at most {MAX_PIECES} pieces supported"),
            ));
        }
        let dim = first.a.len();
        if let Some(p) = pieces.iter().find(|p| p.a.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.a.len(),
            });
        }
        pieces.sort();
        let mut kept: Vec<Piece> = Vec::with_capacity(pieces.len());
        for p in pieces {
            match kept.last_mut() {
                Some(last) if last.a == p.a => last.c = p.c.max(last.c.clone()),
                _ => kept.push(p),
            }
        }
        Ok(PLConvexFunction { pieces: kept })
    }

    /// The zero function in `dim` variables.
    pub fn zero(dim: usize) -> PLConvexFunction {
        PLConvexFunction {
            pieces: vec![Piece {
                a: vec![Q::zero(); dim],
                c: Q::zero(),
            }],
        }
    }

    /// `f_a(x) = <a, x> - min_P <a, .>`.
    pub fn valuation(p: &LabelledPolytope, a: QVec) -> PLConvexFunction {
        let c = -p.support_min(&a);
        PLConvexFunction {
            pieces: vec![Piece { a, c }],
        }
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].a.len()
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        self.pieces
            .iter()
            .map(|p| p.eval(x))
            .max()
            .expect("at least one piece")
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|p| to_f64_vec(&p.a).iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + to_f64(&p.c))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn check_dim(&self, p: &LabelledPolytope) -> Result<()> {
        if self.dim() != p.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                got: self.dim(),
            });
        }
        Ok(())
    }

    /// Full-dimensional cells of the maximization diagram on `P`.
    pub fn cells(&self, p: &LabelledPolytope) -> Result<Vec<Cell>> {
        self.check_dim(p)?;
        let base = p.halfspaces();
        let mut out = Vec::new();
        for (j, pj) in self.pieces.iter().enumerate() {
            let mut hs = base.clone();
            for (k, pk) in self.pieces.iter().enumerate() {
                if k != j {
                    hs.push(Halfspace {
                        normal: pk.a.iter().zip(&pj.a).map(|(x, y)| x - y).collect(),
                        offset: &pj.c - &pk.c,
                    });
                }
            }
            let Some(hull) = Hull::from_halfspaces(p.dim(), &hs) else {
                continue;
            };
            let center = hull.vertex_centroid();
            let simplices = hull
                .triangulate_from(&center)
                .into_iter()
                .map(Simplex::new)
                .collect();
            out.push(Cell {
                piece: j,
                vertices: hull.vertices,
                simplices,
            });
        }
        Ok(out)
    }

    /// `min_P f`, attained at a vertex of some cell.
    pub fn min_on(&self, p: &LabelledPolytope) -> Result<Q> {
        let cells = self.cells(p)?;
        Ok(cells
            .iter()
            .flat_map(|c| c.vertices.iter().map(|v| self.pieces[c.piece].eval(v)))
            .min()
            .expect("P is covered by cells"))
    }

    /// `max_P f`, attained at a vertex of `P`.
    pub fn max_on(&self, p: &LabelledPolytope) -> Result<Q> {
        self.check_dim(p)?;
        Ok(p.vertices()
            .iter()
            .map(|v| self.eval(v))
            .max()
            .expect("P has vertices"))
    }

    /// Shifts every intercept so that `min_P f = 0`.
    pub fn normalized(&self, p: &LabelledPolytope) -> Result<PLConvexFunction> {
        let m = self.min_on(p)?;
        Ok(PLConvexFunction {
            pieces: self
                .pieces
                .iter()
                .map(|pc| Piece {
                    a: pc.a.clone(),
                    c: &pc.c - &m,
                })
                .collect(),
        })
    }

    /// Adds `xi` to every slope and renormalizes on `P`.
    pub fn twist(&self, p: &LabelledPolytope, xi: &[Q]) -> Result<PLConvexFunction> {
        if xi.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: xi.len(),
            });
        }
        let pieces = self
            .pieces
            .iter()
            .map(|pc| Piece {
                a: pc.a.iter().zip(xi).map(|(a, x)| a + x).collect(),
                c: pc.c.clone(),
            })
            .collect();
        PLConvexFunction::new(pieces)?.normalized(p)
    }

    /// Whether `f` is constant on `P`.
    pub fn is_constant_on(&self, p: &LabelledPolytope) -> Result<bool> {
        Ok(self.min_on(p)? == self.max_on(p)?)
    }
}
