//! Coefficient grids of two-variable Laurent polynomials.
//!
//! Entry `[r][s]` of a [`CoeffGrid`] is the coefficient of
//! `X^(r + x_offset) Y^(s + y_offset)`; the offsets let `mirror` and
//! `square_grid` produce negative and spread-out degrees without losing
//! track of which entry is the constant term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffGrid {
    rows: usize,
    cols: usize,
    x_offset: i64,
    y_offset: i64,
    data: Vec<f64>,
}

impl CoeffGrid {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::Parse("coefficient grid must be a non-empty rectangle".into()));
        }
        Ok(CoeffGrid {
            rows: rows.len(),
            cols: ncols,
            x_offset: 0,
            y_offset: 0,
            data: rows.concat(),
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        CoeffGrid {
            rows,
            cols,
            x_offset: 0,
            y_offset: 0,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn with_offsets(mut self, x_offset: i64, y_offset: i64) -> Self {
        self.x_offset = x_offset;
        self.y_offset = y_offset;
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn offsets(&self) -> (i64, i64) {
        (self.x_offset, self.y_offset)
    }

    /// Raw entry by grid index.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.cols).map(<[f64]>::to_vec).collect()
    }

    /// Coefficient of `X^x Y^y`, zero outside the grid.
    pub fn coeff(&self, x: i64, y: i64) -> f64 {
        let r = x - self.x_offset;
        let c = y - self.y_offset;
        if r < 0 || c < 0 || r >= self.rows as i64 || c >= self.cols as i64 {
            return 0.0;
        }
        self.get(r as usize, c as usize)
    }

    /// Sum of the coefficients of `X^x Y^b` over all `b` divisible by `modulus`.
    pub fn sum_x_row_mod(&self, x: i64, modulus: usize) -> f64 {
        let r = x - self.x_offset;
        if r < 0 || r >= self.rows as i64 {
            return 0.0;
        }
        let m = modulus as i64;
        (0..self.cols)
            .filter(|&c| (c as i64 + self.y_offset).rem_euclid(m) == 0)
            .map(|c| self.get(r as usize, c))
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    fn product(&self, other: &CoeffGrid) -> CoeffGrid {
        let rows = self.rows + other.rows - 1;
        let cols = self.cols + other.cols - 1;
        let mut out = vec![0.0; rows * cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == 0.0 {
                    continue;
                }
                for k in 0..other.rows {
                    let base = (i + k) * cols + j;
                    let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                    for (l, &b) in orow.iter().enumerate() {
                        out[base + l] += a * b;
                    }
                }
            }
        }
        CoeffGrid {
            rows,
            cols,
            x_offset: self.x_offset + other.x_offset,
            y_offset: self.y_offset + other.y_offset,
            data: out,
        }
    }
}

/// Coefficient grid of the product of the given polynomials.
///
/// A product of `t` grids of sizes `n_i x m_i` has size
/// `(1 - t + sum n_i) x (1 - t + sum m_i)`.
pub fn conv(grids: &[&CoeffGrid]) -> Result<CoeffGrid> {
    let (first, rest) = grids
        .split_first()
        .ok_or_else(|| Error::InvalidParams("conv needs at least one grid".into()))?;
    Ok(rest.iter().fold((*first).clone(), |acc, g| acc.product(g)))
}

/// Grid of `A(X^-1, Y^-1)`: entries reversed along both axes, offsets negated.
pub fn mirror(a: &CoeffGrid) -> CoeffGrid {
    let mut data = a.data.clone();
    data.reverse();
    CoeffGrid {
        rows: a.rows,
        cols: a.cols,
        x_offset: -(a.x_offset + a.rows as i64 - 1),
        y_offset: -(a.y_offset + a.cols as i64 - 1),
        data,
    }
}

/// Grid of `A(X^2, Y^2)`: entry `(i, j)` moves to `(2i, 2j)`, zeros between.
pub fn square_grid(a: &CoeffGrid) -> CoeffGrid {
    let rows = 2 * a.rows - 1;
    let cols = 2 * a.cols - 1;
    let mut out = CoeffGrid::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            out.data[2 * i * cols + 2 * j] = a.get(i, j);
        }
    }
    out.x_offset = 2 * a.x_offset;
    out.y_offset = 2 * a.y_offset;
    out
}
