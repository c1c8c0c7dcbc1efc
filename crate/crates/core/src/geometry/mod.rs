//! Polyhedron feasibility and 2-D region polygons.

pub mod lp;
mod polygon;

pub use polygon::{clip_to_polygon, polygon_area};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tol;
use lp::{LinearProgram, LpError, LpSolution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, found {got}")]
    Dimension { expected: usize, got: usize },
    #[error("feasibility LP inconclusive: {0}")]
    Inconclusive(String),
}

impl From<LpError> for GeometryError {
    fn from(e: LpError) -> Self {
        GeometryError::Inconclusive(e.to_string())
    }
}

/// `{x : alpha . x + beta <= 0}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub alpha: Vec<f64>,
    pub beta: f64,
}

impl HalfSpace {
    pub fn new(alpha: Vec<f64>, beta: f64) -> Self {
        HalfSpace { alpha, beta }
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// `alpha . x + beta`; non-positive inside.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.alpha.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() + self.beta
    }

    pub fn norm(&self) -> f64 {
        self.alpha.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    /// True when the normal vanishes, making the constraint a constant.
    pub fn is_degenerate(&self) -> bool {
        self.alpha.iter().all(|a| a.abs() <= tol::DEGENERATE_ROW)
    }

    /// For degenerate rows: whether the constant constraint holds everywhere.
    pub fn is_trivially_true(&self) -> bool {
        self.is_degenerate() && self.beta <= tol::DEGENERATE_ROW
    }

    pub fn negated(&self) -> HalfSpace {
        HalfSpace {
            alpha: self.alpha.iter().map(|a| -a).collect(),
            beta: -self.beta,
        }
    }

    pub fn scaled(&self, s: f64) -> HalfSpace {
        HalfSpace {
            alpha: self.alpha.iter().map(|a| a * s).collect(),
            beta: self.beta * s,
        }
    }
}

/// Axis-aligned box `lo <= x <= hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "box bounds must have equal length");
        BoundingBox { lo, hi }
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        BoundingBox::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| (h - l).max(0.0)).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (l, h))| *l <= *v && *v <= *h)
    }

    /// The `2 * dim` unit-normal half-spaces describing the box.
    pub fn halfspaces(&self) -> Vec<HalfSpace> {
        let n = self.dim();
        let mut out = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut up = vec![0.0; n];
            up[i] = 1.0;
            out.push(HalfSpace::new(up, -self.hi[i]));
            let mut down = vec![0.0; n];
            down[i] = -1.0;
            out.push(HalfSpace::new(down, self.lo[i]));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeasibilityStatus {
    /// Non-empty interior.
    FullDim,
    /// Non-empty but contained in a hyperplane (up to tolerance).
    Degenerate,
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub status: FeasibilityStatus,
    pub witness: Option<Vec<f64>>,
    /// Chebyshev radius at the witness, capped at 1.
    pub radius: Option<f64>,
}

impl Feasibility {
    pub fn is_full_dim(&self) -> bool {
        self.status == FeasibilityStatus::FullDim
    }

    fn empty() -> Self {
        Feasibility {
            status: FeasibilityStatus::Empty,
            witness: None,
            radius: None,
        }
    }
}

/// Classifies the intersection of `halfspaces` (and the optional box) in
/// `R^dim` by the largest inscribed ball, capped at radius 1:
///
/// ```text
/// maximize t  s.t.  alpha_j . x + beta_j + t |alpha_j| <= 0,  t <= 1
/// ```
///
/// Degenerate rows are resolved before the LP: constant-true rows are
/// dropped, constant-false rows make the set empty. Without a box the
/// witness is sought within `|x|_inf <= tol::SEARCH_SCALE * max(1, |beta_j| / |alpha_j|)`.
pub fn feasible(
    halfspaces: &[HalfSpace],
    dim: usize,
    bounding_box: Option<&BoundingBox>,
) -> Result<Feasibility, GeometryError> {
    let mut rows: Vec<HalfSpace> = Vec::with_capacity(halfspaces.len() + 2 * dim);
    for h in halfspaces {
        if h.dim() != dim {
            return Err(GeometryError::Dimension {
                expected: dim,
                got: h.dim(),
            });
        }
        if h.is_degenerate() {
            if h.is_trivially_true() {
                continue;
            }
            return Ok(Feasibility::empty());
        }
        rows.push(h.scaled(1.0 / h.norm()));
    }
    if let Some(b) = bounding_box {
        if b.dim() != dim {
            return Err(GeometryError::Dimension {
                expected: dim,
                got: b.dim(),
            });
        }
        rows.extend(b.halfspaces());
    } else {
        // Thin unbounded cells would otherwise place the witness arbitrarily
        // far out, where rounding swamps the margin.
        // The radius follows the hyperplanes' distances from the origin so
        // that box offsets stay commensurate with the other rows.
        let reach = rows.iter().fold(1.0f64, |m, h| m.max(h.beta.abs()));
        let r = tol::SEARCH_SCALE * reach;
        rows.extend(BoundingBox::cube(dim, -r, r).halfspaces());
    }
    if rows.is_empty() {
        return Ok(Feasibility {
            status: FeasibilityStatus::FullDim,
            witness: Some(vec![0.0; dim]),
            radius: Some(1.0),
        });
    }

    // Variables: x = p - q (p, q >= 0) and t = 1 - u (u >= 0); maximize -u.
    let mut objective = vec![0.0; 2 * dim + 1];
    objective[2 * dim] = -1.0;
    let mut lp = LinearProgram::new(objective);
    for h in &rows {
        let mut row = Vec::with_capacity(2 * dim + 1);
        row.extend(h.alpha.iter().copied());
        row.extend(h.alpha.iter().map(|a| -a));
        row.push(-1.0);
        lp.add_le(row, -h.beta - 1.0);
    }

    let (x, t_lp) = match lp.solve()? {
        LpSolution::Optimal { x: z, .. } => {
            let x: Vec<f64> = (0..dim).map(|i| z[i] - z[dim + i]).collect();
            (x, 1.0 - z[2 * dim])
        }
        // The Chebyshev LP is always feasible and bounded, so these are
        // numerical failures rather than answers.
        LpSolution::Infeasible => return Err(GeometryError::Inconclusive("Chebyshev LP reported infeasible".into())),
        LpSolution::Unbounded => return Err(GeometryError::Inconclusive("Chebyshev LP reported unbounded".into())),
    };

    // Margin actually achieved at the witness, in units of distance.
    let achieved = rows.iter().map(|h| -h.eval(&x)).fold(1.0f64, f64::min);

    if t_lp > tol::FEASIBILITY {
        if achieved > tol::FEASIBILITY {
            Ok(Feasibility {
                status: FeasibilityStatus::FullDim,
                witness: Some(x),
                radius: Some(achieved),
            })
        } else {
            Err(GeometryError::Inconclusive(format!(
                "LP radius {t_lp:e} but witness margin only {achieved:e} (|x|inf = {:e})",
                x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            )))
        }
    } else if t_lp >= -tol::FEASIBILITY {
        Ok(Feasibility {
            status: FeasibilityStatus::Degenerate,
            witness: Some(x),
            radius: Some(t_lp.max(0.0)),
        })
    } else {
        Ok(Feasibility::empty())
    }
}
