//! Dense tableau simplex for small problems of the form
//!
//! ```text
//! maximize cᵀx  subject to  A x <= b,  x >= 0,  with b >= 0
//! ```
//!
//! `b >= 0` makes the all-slack basis feasible, so no phase one is needed.
//! Pricing is Dantzig's rule, falling back to Bland's rule after a run of
//! degenerate pivots so that cycling cannot occur.

use crate::error::{Error, Result};

const EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 100_000;
const DEGENERATE_RUN_BEFORE_BLAND: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// Shadow price of each constraint row.
    pub duals: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Tableau {
    rows: usize,
    vars: usize,
    width: usize,
    // rows × width, last column is the right-hand side; row `rows` is the
    // objective row holding reduced costs.
    cells: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    /// `a` is row-major `rows × vars`.
    pub fn new(a: &[f64], b: &[f64], c: &[f64]) -> Self {
        let rows = b.len();
        let vars = c.len();
        assert_eq!(a.len(), rows * vars, "constraint matrix shape");
        assert!(
            b.iter().all(|&v| v >= 0.0),
            "right-hand side must be non-negative"
        );
        let width = vars + rows + 1;
        let mut cells = vec![0.0; (rows + 1) * width];
        for i in 0..rows {
            let row = &mut cells[i * width..(i + 1) * width];
            row[..vars].copy_from_slice(&a[i * vars..(i + 1) * vars]);
            row[vars + i] = 1.0;
            row[width - 1] = b[i];
        }
        let obj = &mut cells[rows * width..];
        for (j, &cj) in c.iter().enumerate() {
            obj[j] = -cj;
        }
        Tableau {
            rows,
            vars,
            width,
            cells,
            basis: (vars..vars + rows).collect(),
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.width + j]
    }

    fn entering(&self, bland: bool) -> Option<usize> {
        let obj = &self.cells[self.rows * self.width..(self.rows + 1) * self.width - 1];
        if bland {
            obj.iter().position(|&z| z < -EPS)
        } else {
            obj.iter()
                .enumerate()
                .filter(|(_, &z)| z < -EPS)
                .min_by(|a, b| a.1.total_cmp(b.1))
                .map(|(j, _)| j)
        }
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let rhs = self.width - 1;
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.rows {
            let a = self.at(i, col);
            if a > EPS {
                let ratio = self.at(i, rhs) / a;
                best = match best {
                    None => Some((i, ratio)),
                    Some((bi, br)) => {
                        if ratio < br - EPS || (ratio <= br + EPS && self.basis[i] < self.basis[bi])
                        {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    }
                };
            }
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let w = self.width;
        let p = self.at(r, col);
        for v in &mut self.cells[r * w..(r + 1) * w] {
            *v /= p;
        }
        let (before, rest) = self.cells.split_at_mut(r * w);
        let (pivot_row, after) = rest.split_at_mut(w);
        for row in before.chunks_exact_mut(w).chain(after.chunks_exact_mut(w)) {
            let f = row[col];
            if f != 0.0 {
                for (x, &pv) in row.iter_mut().zip(pivot_row.iter()) {
                    *x -= f * pv;
                }
                row[col] = 0.0;
            }
        }
        self.basis[r] = col;
    }

    pub fn solve(mut self) -> Result<LpSolution> {
        let rhs = self.width - 1;
        let mut degenerate_run = 0;
        for _ in 0..MAX_PIVOTS {
            let bland = degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND;
            let Some(col) = self.entering(bland) else {
                return Ok(self.extract());
            };
            let Some(r) = self.leaving(col) else {
                return Err(Error::LpUnbounded);
            };
            if self.at(r, rhs) <= EPS {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, col);
        }
        Err(Error::LpIterationLimit(MAX_PIVOTS))
    }

    fn extract(&self) -> LpSolution {
        let rhs = self.width - 1;
        let mut x = vec![0.0; self.vars];
        for (i, &bv) in self.basis.iter().enumerate() {
            if bv < self.vars {
                x[bv] = self.at(i, rhs).max(0.0);
            }
        }
        let duals = (0..self.rows)
            .map(|i| self.at(self.rows, self.vars + i))
            .collect();
        LpSolution {
            x,
            objective: self.at(self.rows, rhs),
            duals,
        }
    }
}

pub fn maximize(a: &[f64], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    Tableau::new(a, b, c).solve()
}
