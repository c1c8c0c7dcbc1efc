//! Synthetic regression targets on a uniform 2-D grid.

use std::fmt;
use std::str::FromStr;

/// Smallest magnitude used for a coordinate inside `log |.|`.
const LOG_CLAMP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhiFunction {
    /// `sin(log|x| + log|y|)`
    LogSine,
    /// `sin(r) / r` with `r = sqrt(x^2 + y^2)`, equal to 1 at the origin
    Sinc,
    /// `sin(cos(x/2)) sin(cos(y/2))`
    CosineBumps,
    /// `sin(tan(x/2)) sin(tan(y/2))`
    TangentNoise,
}

impl serde::Serialize for PhiFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl PhiFunction {
    pub const ALL: [PhiFunction; 4] = [
        PhiFunction::LogSine,
        PhiFunction::Sinc,
        PhiFunction::CosineBumps,
        PhiFunction::TangentNoise,
    ];

    /// 1-based index as in `phi1` .. `phi4`.
    pub fn from_index(which: usize) -> Option<Self> {
        Self::ALL.get(which.checked_sub(1)?).copied()
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&f| f == self).unwrap() + 1
    }

    pub fn eval(self, x: f64, y: f64) -> f64 {
        match self {
            PhiFunction::LogSine => (x.abs().max(LOG_CLAMP).ln() + y.abs().max(LOG_CLAMP).ln()).sin(),
            PhiFunction::Sinc => {
                let r = x.hypot(y);
                if r == 0.0 {
                    1.0
                } else {
                    r.sin() / r
                }
            }
            PhiFunction::CosineBumps => (x / 2.0).cos().sin() * (y / 2.0).cos().sin(),
            PhiFunction::TangentNoise => (x / 2.0).tan().sin() * (y / 2.0).tan().sin(),
        }
    }
}

impl fmt::Display for PhiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "phi{}", self.index())
    }
}

impl FromStr for PhiFunction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix("phi")
            .and_then(|n| n.parse().ok())
            .and_then(PhiFunction::from_index)
            .ok_or_else(|| format!("unknown function `{s}`, expected phi1..phi4"))
    }
}

/// The `len x len` grid `start + i * step` in row-major order (`x` outer).
pub fn grid_points(start: f64, step: f64, len: usize) -> Vec<[f64; 2]> {
    let coord = |i: usize| start + i as f64 * step;
    (0..len)
        .flat_map(|i| (0..len).map(move |j| [coord(i), coord(j)]))
        .collect()
}

/// `((x, y), phi(x, y))` over [`grid_points`].
pub fn phi_dataset(which: PhiFunction, grid_start: f64, grid_step: f64, grid_len: usize) -> Vec<([f64; 2], f64)> {
    grid_points(grid_start, grid_step, grid_len)
        .into_iter()
        .map(|p| (p, which.eval(p[0], p[1])))
        .collect()
}
