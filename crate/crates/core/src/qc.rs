//! Block-sparse quasi-cyclic matrices and the SC / MD-SC constructions.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{LiftingMatrix, PartitioningMatrix, RelocationMatrix};
use crate::params::CodeParams;

/// One nonzero `z x z` circulant `sigma^power` at block position `(row, col)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Block {
    pub row: usize,
    pub col: usize,
    pub power: usize,
}

/// A parity-check matrix stored as its list of nonzero circulants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseQcMatrix {
    block_rows: usize,
    block_cols: usize,
    z: usize,
    blocks: Vec<Block>,
    /// `(gamma, kappa)` when the matrix is an SC matrix built from a base
    /// matrix: block `(R, C)` then sits at base position `(R mod gamma,
    /// C mod kappa)` in replica `C / kappa`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base: Option<(usize, usize)>,
}

impl SparseQcMatrix {
    pub fn new(block_rows: usize, block_cols: usize, z: usize, mut blocks: Vec<Block>) -> Result<Self> {
        if z == 0 {
            return Err(Error::InvalidParams("circulant size must be positive".into()));
        }
        let mut seen = HashSet::with_capacity(blocks.len());
        for b in &blocks {
            if b.row >= block_rows || b.col >= block_cols {
                return Err(Error::InvalidParams(format!(
                    "block ({}, {}) outside {block_rows}x{block_cols}",
                    b.row, b.col
                )));
            }
            if b.power >= z {
                return Err(Error::InvalidParams(format!(
                    "power {} at ({}, {}) not below z = {z}",
                    b.power, b.row, b.col
                )));
            }
            if !seen.insert((b.row, b.col)) {
                return Err(Error::InvalidParams(format!(
                    "duplicate block at ({}, {})",
                    b.row, b.col
                )));
            }
        }
        blocks.sort_unstable();
        Ok(SparseQcMatrix {
            block_rows,
            block_cols,
            z,
            blocks,
            base: None,
        })
    }

    /// Binary matrix of 1x1 blocks from a dense 0/1 pattern.
    pub fn from_dense(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let blocks = rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(move |(c, _)| Block { row: r, col: c, power: 0 })
            })
            .collect();
        Self::new(rows.len(), cols, 1, blocks)
    }

    /// All-one `rows x cols` protograph with the given circulant size.
    pub fn all_one(rows: usize, cols: usize, z: usize) -> Self {
        let blocks = (0..rows)
            .flat_map(|r| (0..cols).map(move |c| Block { row: r, col: c, power: 0 }))
            .collect();
        Self::new(rows, cols, z, blocks).expect("all-one matrix is well formed")
    }

    pub fn block_rows(&self) -> usize {
        self.block_rows
    }

    pub fn block_cols(&self) -> usize {
        self.block_cols
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn base_layout(&self) -> Option<(usize, usize)> {
        self.base
    }

    /// Tags the matrix as an SC matrix over a `gamma x kappa` base matrix.
    pub fn with_base_layout(mut self, gamma: usize, kappa: usize) -> Result<Self> {
        if gamma == 0 || kappa == 0 || !self.block_rows.is_multiple_of(gamma) || !self.block_cols.is_multiple_of(kappa) {
            return Err(Error::InvalidParams(format!(
                "{}x{} blocks do not tile by a {gamma}x{kappa} base matrix",
                self.block_rows, self.block_cols
            )));
        }
        self.base = Some((gamma, kappa));
        Ok(self)
    }

    /// Bit-level dimensions `(block_rows * z, block_cols * z)`.
    pub fn expanded_dims(&self) -> (usize, usize) {
        (self.block_rows * self.z, self.block_cols * self.z)
    }

    /// Same sparsity with every power set to zero and `z` replaced.
    pub fn protograph(&self) -> SparseQcMatrix {
        SparseQcMatrix {
            block_rows: self.block_rows,
            block_cols: self.block_cols,
            z: 1,
            blocks: self.blocks.iter().map(|b| Block { power: 0, ..*b }).collect(),
            base: self.base,
        }
    }

    /// Column indices of every bit-level row. Row `(R, a)` meets column
    /// `(C, (a + power) mod z)`.
    pub fn expand_rows(&self) -> Vec<Vec<usize>> {
        let z = self.z;
        let mut rows = vec![Vec::new(); self.block_rows * z];
        for b in &self.blocks {
            for a in 0..z {
                rows[b.row * z + a].push(b.col * z + (a + b.power) % z);
            }
        }
        for r in &mut rows {
            r.sort_unstable();
        }
        rows
    }

    /// Row and column weights of the bit-level matrix.
    pub fn weights(&self) -> (Vec<usize>, Vec<usize>) {
        let mut rw = vec![0; self.block_rows];
        let mut cw = vec![0; self.block_cols];
        for b in &self.blocks {
            rw[b.row] += 1;
            cw[b.col] += 1;
        }
        (rw, cw)
    }
}

/// Coordinates of one nonzero of the SC protograph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScNonzero {
    /// 1-based replica index.
    pub replica: usize,
    pub base_row: usize,
    pub base_col: usize,
    pub component: usize,
    pub power: usize,
}

impl ScNonzero {
    pub fn block_row(&self, gamma: usize) -> usize {
        (self.replica - 1 + self.component) * gamma + self.base_row
    }

    pub fn block_col(&self, kappa: usize) -> usize {
        (self.replica - 1) * kappa + self.base_col
    }
}

fn check_dims(k: &PartitioningMatrix, params: &CodeParams) -> Result<()> {
    params.check_structure()?;
    k.check(params)
}

/// Every nonzero of the SC protograph in replica-major order.
pub fn sc_nonzeros(
    k: &PartitioningMatrix,
    lifting: Option<&LiftingMatrix>,
    params: &CodeParams,
) -> Result<Vec<ScNonzero>> {
    check_dims(k, params)?;
    if let Some(l) = lifting {
        l.check(params)?;
    }
    let mut out = Vec::with_capacity(params.coupling_len * params.gamma * params.kappa);
    for replica in 1..=params.coupling_len {
        for i in 0..params.gamma {
            for j in 0..params.kappa {
                out.push(ScNonzero {
                    replica,
                    base_row: i,
                    base_col: j,
                    component: k.get(i, j) as usize,
                    power: lifting.map_or(0, |l| l.get(i, j) as usize),
                });
            }
        }
    }
    Ok(out)
}

/// Binary SC protograph, `(m + L) gamma x L kappa` blocks, all powers zero.
pub fn build_sc_protograph(k: &PartitioningMatrix, params: &CodeParams) -> Result<SparseQcMatrix> {
    let nz = sc_nonzeros(k, None, params)?;
    assemble_sc(&nz, params, 1)
}

/// Lifted SC parity-check matrix.
pub fn build_sc_matrix(
    k: &PartitioningMatrix,
    lifting: &LiftingMatrix,
    params: &CodeParams,
) -> Result<SparseQcMatrix> {
    let nz = sc_nonzeros(k, Some(lifting), params)?;
    assemble_sc(&nz, params, params.z)
}

fn assemble_sc(nz: &[ScNonzero], params: &CodeParams, z: usize) -> Result<SparseQcMatrix> {
    let blocks = nz
        .iter()
        .map(|n| Block {
            row: n.block_row(params.gamma),
            col: n.block_col(params.kappa),
            power: n.power,
        })
        .collect();
    SparseQcMatrix::new(params.sc_block_rows(), params.sc_block_cols(), z, blocks)?
        .with_base_layout(params.gamma, params.kappa)
}

/// MD-SC parity-check matrix: `M` copies of `H_SC` coupled block-circulantly.
///
/// Copy-row `r` holds `X_l` in copy-column `(r - l) mod M`, where `l` is the
/// relocation entry of the circulant's base position.
pub fn build_md_matrix(
    k: &PartitioningMatrix,
    lifting: &LiftingMatrix,
    relocation: &RelocationMatrix,
    params: &CodeParams,
) -> Result<SparseQcMatrix> {
    relocation.check(params)?;
    let nz = sc_nonzeros(k, Some(lifting), params)?;
    let copies = params.copies;
    let rows_sc = params.sc_block_rows();
    let cols_sc = params.sc_block_cols();
    let mut blocks = Vec::with_capacity(nz.len() * copies);
    for n in &nz {
        let shift = relocation.get(n.base_row, n.base_col) as usize;
        for r in 0..copies {
            let c = (r + copies - shift) % copies;
            blocks.push(Block {
                row: r * rows_sc + n.block_row(params.gamma),
                col: c * cols_sc + n.block_col(params.kappa),
                power: n.power,
            });
        }
    }
    SparseQcMatrix::new(copies * rows_sc, copies * cols_sc, params.z, blocks)
}

/// Splits `H_MD` back into `H'_SC` (index 0) and the auxiliary matrices
/// `X_1 .. X_{M-1}`, each as an SC-sized matrix, by reading copy-row 0.
pub fn decompose_md(h_md: &SparseQcMatrix, params: &CodeParams) -> Vec<SparseQcMatrix> {
    let copies = params.copies;
    let rows_sc = params.sc_block_rows();
    let cols_sc = params.sc_block_cols();
    let mut parts = vec![Vec::new(); copies];
    for b in h_md.blocks().iter().filter(|b| b.row < rows_sc) {
        let c = b.col / cols_sc;
        let l = (copies - c) % copies;
        parts[l].push(Block {
            row: b.row,
            col: b.col % cols_sc,
            power: b.power,
        });
    }
    parts
        .into_iter()
        .map(|blocks| {
            SparseQcMatrix::new(rows_sc, cols_sc, h_md.z(), blocks).expect("parts are disjoint")
        })
        .collect()
}

/// Sum of disjoint same-shape matrices. Overlapping blocks are an error.
pub fn sum_disjoint(parts: &[SparseQcMatrix]) -> Result<SparseQcMatrix> {
    let first = parts
        .first()
        .ok_or_else(|| Error::InvalidParams("nothing to sum".into()))?;
    let blocks = parts.iter().flat_map(|p| p.blocks().iter().copied()).collect();
    SparseQcMatrix::new(first.block_rows, first.block_cols, first.z, blocks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncoupled_block_code_is_all_one() {
        let p = CodeParams::new(3, 4, 1, 1, 0, 1).unwrap();
        let k = PartitioningMatrix::zeros(&p);
        let h = build_sc_protograph(&k, &p).unwrap();
        assert_eq!(h.blocks(), SparseQcMatrix::all_one(3, 4, 1).blocks());
    }

    #[test]
    fn hand_placed_memory_one_chain() {
        let p = CodeParams::new(1, 2, 1, 2, 1, 1).unwrap();
        let k = PartitioningMatrix::from_rows(vec![vec![0, 1]], &p).unwrap();
        let h = build_sc_protograph(&k, &p).unwrap();
        assert_eq!((h.block_rows(), h.block_cols()), (3, 4));
        let pos: Vec<(usize, usize)> = h.blocks().iter().map(|b| (b.row, b.col)).collect();
        assert_eq!(pos, vec![(0, 0), (1, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn unit_circulants_reproduce_protograph() {
        let p = CodeParams::new(3, 4, 1, 3, 2, 1).unwrap();
        let k = PartitioningMatrix::from_rows(vec![vec![0, 1, 2, 0]; 3], &p).unwrap();
        let l = LiftingMatrix::zeros(&p);
        assert_eq!(build_sc_matrix(&k, &l, &p).unwrap(), build_sc_protograph(&k, &p).unwrap());
    }

    #[test]
    fn no_relocation_gives_block_diagonal() {
        let p = CodeParams::new(3, 4, 3, 3, 1, 3).unwrap();
        let k = PartitioningMatrix::from_rows(vec![vec![0, 1, 0, 1]; 3], &p).unwrap();
        let l = LiftingMatrix::from_rows(vec![vec![0, 1, 2, 0]; 3], &p).unwrap();
        let h = build_md_matrix(&k, &l, &RelocationMatrix::zeros(&p), &p).unwrap();
        let (rs, cs) = (p.sc_block_rows(), p.sc_block_cols());
        assert!(h.blocks().iter().all(|b| b.row / rs == b.col / cs));
        assert_eq!(h.blocks().len(), 3 * 36);
    }

    #[test]
    fn single_relocation_lands_one_copy_to_the_left() {
        let p = CodeParams::new(1, 2, 1, 1, 0, 3).unwrap();
        let k = PartitioningMatrix::zeros(&p);
        let l = LiftingMatrix::zeros(&p);
        let m = RelocationMatrix::from_rows(vec![vec![0, 1]], &p).unwrap();
        let h = build_md_matrix(&k, &l, &m, &p).unwrap();
        let pos: Vec<(usize, usize)> = h.blocks().iter().map(|b| (b.row, b.col)).collect();
        // copy-row 1 holds X_1 in copy-column 0, copy-row 0 wraps to copy-column 2
        assert_eq!(pos, vec![(0, 0), (0, 5), (1, 1), (1, 2), (2, 3), (2, 4)]);
    }

    #[test]
    fn duplicate_blocks_rejected() {
        let b = Block { row: 0, col: 0, power: 0 };
        assert!(SparseQcMatrix::new(1, 1, 2, vec![b, b]).is_err());
        assert!(SparseQcMatrix::new(1, 1, 2, vec![Block { power: 2, ..b }]).is_err());
    }
}
