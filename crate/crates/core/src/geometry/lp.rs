//! Dense two-phase tableau simplex for small problems.
//!
//! Solves `maximize c.x  s.t.  A x <= b, x >= 0` with `b` of any sign.
//! Dantzig pricing is used until a run of degenerate pivots is seen, after
//! which the solver falls back to Bland's rule, which cannot cycle.

use thiserror::Error;

const PIVOT_EPS: f64 = 1e-10;
const COST_EPS: f64 = 1e-10;
const PHASE_ONE_EPS: f64 = 1e-9;
const DRIVE_OUT_EPS: f64 = 1e-7;
const RATIO_TIE: f64 = 1e-12;
const STABLE_PIVOT_FRACTION: f64 = 1e-3;
const DEGENERATE_RUN_BEFORE_BLAND: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("simplex did not converge within {0} pivots")]
    IterationLimit(usize),
    #[error("constraint row {row} has {got} coefficients, expected {expected}")]
    Shape { row: usize, expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pricing {
    /// Dantzig's rule with automatic fallback to Bland's rule on stalling.
    Auto,
    /// Bland's rule from the first pivot.
    Bland,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        LinearProgram {
            objective,
            rows: Vec::new(),
            rhs: Vec::new(),
        }
    }

    /// Adds `row . x <= rhs`.
    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) {
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn solve(&self) -> Result<LpSolution, LpError> {
        self.solve_with(Pricing::Auto)
    }

    pub fn solve_with(&self, pricing: Pricing) -> Result<LpSolution, LpError> {
        let n = self.objective.len();
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != n {
                return Err(LpError::Shape {
                    row: i,
                    expected: n,
                    got: row.len(),
                });
            }
        }
        Tableau::build(self).run(pricing)
    }
}

struct Tableau {
    m: usize,
    n_struct: usize,
    n_art: usize,
    /// Column count excluding the RHS column.
    cols: usize,
    /// `m` constraint rows followed by the objective row, each `cols + 1` wide.
    data: Vec<f64>,
    basis: Vec<usize>,
    objective: Vec<f64>,
    iteration_cap: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let n = lp.objective.len();
        let negative: Vec<bool> = lp.rhs.iter().map(|&b| b < 0.0).collect();
        let n_art = negative.iter().filter(|&&neg| neg).count();
        let cols = n + m + n_art;
        let width = cols + 1;
        let mut data = vec![0.0; (m + 1) * width];
        let mut basis = Vec::with_capacity(m);
        let mut art = n + m;
        for i in 0..m {
            let sign = if negative[i] { -1.0 } else { 1.0 };
            let row = &mut data[i * width..(i + 1) * width];
            for (j, &a) in lp.rows[i].iter().enumerate() {
                row[j] = sign * a;
            }
            row[n + i] = sign;
            row[cols] = sign * lp.rhs[i];
            if negative[i] {
                row[art] = 1.0;
                basis.push(art);
                art += 1;
            } else {
                basis.push(n + i);
            }
        }
        Tableau {
            m,
            n_struct: n,
            n_art,
            cols,
            data,
            basis,
            objective: lp.objective.clone(),
            iteration_cap: 1000 + 50 * (m + cols),
        }
    }

    fn width(&self) -> usize {
        self.cols + 1
    }

    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width() + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.cols)
    }

    /// Loads `maximize cost.x` into the objective row as reduced costs
    /// `z_j - c_j` relative to the current basis.
    fn load_objective(&mut self, cost: &[f64]) {
        let w = self.width();
        let obj = self.m * w;
        for j in 0..w {
            self.data[obj + j] = 0.0;
        }
        for (j, &c) in cost.iter().enumerate() {
            self.data[obj + j] = -c;
        }
        for r in 0..self.m {
            let cb = cost.get(self.basis[r]).copied().unwrap_or(0.0);
            if cb != 0.0 {
                for j in 0..w {
                    self.data[obj + j] += cb * self.data[r * w + j];
                }
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width();
        let p = self.data[row * w + col];
        for j in 0..w {
            self.data[row * w + j] /= p;
        }
        self.data[row * w + col] = 1.0;
        for r in 0..=self.m {
            if r == row {
                continue;
            }
            let factor = self.data[r * w + col];
            if factor != 0.0 {
                for j in 0..w {
                    self.data[r * w + j] -= factor * self.data[row * w + j];
                }
                self.data[r * w + col] = 0.0;
            }
        }
        self.basis[row] = col;
    }

    /// Ratio test. Rows tied at the minimum ratio whose pivot is tiny next to
    /// the largest tied pivot are passed over, since pivoting on them
    /// amplifies rounding; the rest are ranked by basis index under Bland's
    /// rule and by pivot size otherwise.
    fn leaving_row(&self, col: usize, bland: bool) -> Option<(usize, f64)> {
        let candidates: Vec<(usize, f64, f64)> = (0..self.m)
            .filter_map(|r| {
                let a = self.at(r, col);
                (a > PIVOT_EPS).then(|| (r, self.rhs(r).max(0.0) / a, a))
            })
            .collect();
        let min_ratio = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let tied: Vec<&(usize, f64, f64)> = candidates.iter().filter(|c| c.1 <= min_ratio + RATIO_TIE).collect();
        let max_pivot = tied.iter().map(|c| c.2).fold(0.0f64, f64::max);
        tied.into_iter()
            .filter(|c| c.2 >= STABLE_PIVOT_FRACTION * max_pivot)
            .min_by(|x, y| {
                if bland {
                    self.basis[x.0].cmp(&self.basis[y.0])
                } else {
                    y.2.total_cmp(&x.2)
                }
            })
            .map(|c| (c.0, c.1))
    }

    /// Runs simplex iterations on the loaded objective over columns
    /// `< allowed`. Returns `false` if the objective is unbounded.
    fn iterate(&mut self, allowed: usize, mut bland: bool, pivots: &mut usize) -> Result<bool, LpError> {
        let obj = self.m;
        let mut degenerate_run = 0;
        loop {
            let entering = if bland {
                (0..allowed).find(|&j| self.at(obj, j) < -COST_EPS)
            } else {
                let mut best = None;
                let mut best_val = -COST_EPS;
                for j in 0..allowed {
                    let v = self.at(obj, j);
                    if v < best_val {
                        best_val = v;
                        best = Some(j);
                    }
                }
                best
            };
            let Some(col) = entering else {
                return Ok(true);
            };

            let Some((row, ratio)) = self.leaving_row(col, bland) else {
                return Ok(false);
            };

            *pivots += 1;
            if *pivots > self.iteration_cap {
                return Err(LpError::IterationLimit(self.iteration_cap));
            }
            if ratio <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(row, col);
        }
    }

    fn run(mut self, pricing: Pricing) -> Result<LpSolution, LpError> {
        let bland = pricing == Pricing::Bland;
        let mut pivots = 0;
        let art_start = self.n_struct + self.m;

        if self.n_art > 0 {
            let mut phase_one = vec![0.0; self.cols];
            for c in phase_one.iter_mut().skip(art_start) {
                *c = -1.0;
            }
            self.load_objective(&phase_one);
            self.iterate(self.cols, bland, &mut pivots)?;
            let infeasibility: f64 = (0..self.m)
                .filter(|&r| self.basis[r] >= art_start)
                .map(|r| self.rhs(r))
                .sum();
            if infeasibility > PHASE_ONE_EPS {
                return Ok(LpSolution::Infeasible);
            }
            // Drive remaining (zero-valued) artificials out of the basis on
            // the largest available entry; tiny pivots would blow up the
            // other rows.
            for r in 0..self.m {
                if self.basis[r] >= art_start {
                    let best = (0..art_start)
                        .map(|j| (j, self.at(r, j).abs()))
                        .max_by(|a, b| a.1.total_cmp(&b.1));
                    if let Some((col, mag)) = best {
                        if mag > DRIVE_OUT_EPS {
                            self.pivot(r, col);
                        }
                    }
                }
            }
        }

        let objective = self.objective.clone();
        self.load_objective(&objective);
        // Rows still holding an artificial are redundant; their entries over
        // the allowed columns are numerically zero, so they never pivot.
        if !self.iterate(art_start, bland, &mut pivots)? {
            return Ok(LpSolution::Unbounded);
        }

        let mut x = vec![0.0; self.n_struct];
        for r in 0..self.m {
            if self.basis[r] < self.n_struct {
                x[self.basis[r]] = self.rhs(r).max(0.0);
            }
        }
        let value = x.iter().zip(&self.objective).map(|(a, b)| a * b).sum();
        Ok(LpSolution::Optimal { x, value })
    }
}
