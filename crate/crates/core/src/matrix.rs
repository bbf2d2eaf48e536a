//! Dense integer grids and the three design matrices.
//!
//! Text format: first line `<rows> <cols>`, then one line of
//! space-separated decimal integers per row. JSON format:
//! `{"rows": r, "cols": c, "data": [[...], ...]}`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::CodeParams;

/// Row-major dense grid of non-negative integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GridJson", into = "GridJson")]
pub struct IntGrid {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl IntGrid {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntGrid {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<u32>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::Parse(format!(
                    "row {r} has {} entries, expected {ncols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(IntGrid {
            rows: nrows,
            cols: ncols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        self.data.chunks(self.cols.max(1)).map(<[u32]>::to_vec).collect()
    }

    pub fn max_entry(&self) -> Option<u32> {
        self.data.iter().copied().max()
    }

    fn check(&self, params: &CodeParams, max: u32) -> Result<()> {
        if self.rows != params.gamma || self.cols != params.kappa {
            return Err(Error::Dimension {
                expected_rows: params.gamma,
                expected_cols: params.kappa,
                rows: self.rows,
                cols: self.cols,
            });
        }
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.get(r, c);
                if v > max {
                    return Err(Error::EntryRange {
                        row: r,
                        col: c,
                        value: v as i64,
                        max: max as i64,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GridJson::from(self)).expect("grid serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let g: GridJson = serde_json::from_str(s)?;
        g.try_into()
    }

    /// Parses either the plain-text or the JSON representation.
    pub fn parse_any(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            Self::from_json(s)
        } else {
            s.parse()
        }
    }
}

impl fmt::Display for IntGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.rows, self.cols)?;
        for r in 0..self.rows {
            let line: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for IntGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header `{header}`"))))
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(Error::Parse(format!("bad header `{header}`")));
        };
        let mut out = Vec::with_capacity(rows);
        for line in lines {
            let row: Vec<u32> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad entry `{t}`"))))
                .collect::<Result<_>>()?;
            out.push(row);
        }
        if out.len() != rows {
            return Err(Error::Parse(format!("expected {rows} rows, found {}", out.len())));
        }
        let grid = IntGrid::from_rows(out)?;
        if rows > 0 && grid.cols != cols {
            return Err(Error::Parse(format!("expected {cols} columns, found {}", grid.cols)));
        }
        Ok(grid)
    }
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    rows: usize,
    cols: usize,
    data: Vec<Vec<u32>>,
}

impl From<&IntGrid> for GridJson {
    fn from(g: &IntGrid) -> Self {
        GridJson {
            rows: g.rows,
            cols: g.cols,
            data: g.to_rows(),
        }
    }
}

impl From<IntGrid> for GridJson {
    fn from(g: IntGrid) -> Self {
        GridJson::from(&g)
    }
}

impl TryFrom<GridJson> for IntGrid {
    type Error = Error;

    fn try_from(j: GridJson) -> Result<Self> {
        let g = IntGrid::from_rows(j.data)?;
        if g.rows != j.rows || (g.rows > 0 && g.cols != j.cols) {
            return Err(Error::Parse(format!(
                "declared {}x{} but data is {}x{}",
                j.rows, j.cols, g.rows, g.cols
            )));
        }
        Ok(g)
    }
}

macro_rules! design_matrix {
    ($(#[$doc:meta])* $name:ident, $bound:expr) => {
        $(#[$doc])*
        ///
        /// Deserializing does not know the code parameters; call `check`.
        #[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(IntGrid);

        impl $name {
            /// Wraps a grid after checking its shape and entry range against `params`.
            pub fn new(grid: IntGrid, params: &CodeParams) -> Result<Self> {
                let bound: fn(&CodeParams) -> u32 = $bound;
                grid.check(params, bound(params))?;
                Ok($name(grid))
            }

            pub fn from_rows(rows: Vec<Vec<u32>>, params: &CodeParams) -> Result<Self> {
                Self::new(IntGrid::from_rows(rows)?, params)
            }

            pub fn zeros(params: &CodeParams) -> Self {
                $name(IntGrid::zeros(params.gamma, params.kappa))
            }

            pub fn grid(&self) -> &IntGrid {
                &self.0
            }

            pub fn get(&self, i: usize, j: usize) -> u32 {
                self.0.get(i, j)
            }

            pub fn rows(&self) -> usize {
                self.0.rows()
            }

            pub fn cols(&self) -> usize {
                self.0.cols()
            }

            pub fn check(&self, params: &CodeParams) -> Result<()> {
                let bound: fn(&CodeParams) -> u32 = $bound;
                self.0.check(params, bound(params))
            }
        }
    };
}

design_matrix!(
    /// Partitioning matrix `K`: the component index `0..=m` of every base-matrix entry.
    PartitioningMatrix,
    |p| p.memory as u32
);
design_matrix!(
    /// Lifting matrix: the circulant power `0..z` of every base-matrix entry.
    LiftingMatrix,
    |p| p.z.saturating_sub(1) as u32
);
design_matrix!(
    /// Relocation matrix: the auxiliary-matrix index `0..M` of every
    /// circulant; 0 means not relocated.
    RelocationMatrix,
    |p| p.copies.saturating_sub(1) as u32
);

impl RelocationMatrix {
    pub(crate) fn set(&mut self, i: usize, j: usize, v: u32) {
        self.0.set(i, j, v);
    }

    pub fn relocated_count(&self) -> usize {
        self.0.as_slice().iter().filter(|&&v| v != 0).count()
    }
}

/// Percentage of relocated circulants.
pub fn md_density(relocation: &RelocationMatrix) -> f64 {
    let total = relocation.rows() * relocation.cols();
    if total == 0 {
        return 0.0;
    }
    100.0 * relocation.relocated_count() as f64 / total as f64
}

/// Number of base-matrix entries assigned to each component `0..=m`.
pub fn component_census(partitioning: &PartitioningMatrix, memory: usize) -> Vec<usize> {
    let mut counts = vec![0; memory + 1];
    for &a in partitioning.grid().as_slice() {
        counts[a as usize] += 1;
    }
    counts
}
