//! Protograph Tanner graph with edge voltages in `Z_z x Z_M`.

use crate::error::Result;
use crate::matrix::{LiftingMatrix, PartitioningMatrix, RelocationMatrix};
use crate::params::CodeParams;
use crate::qc::{sc_nonzeros, SparseQcMatrix};

pub(crate) const NO_TAG: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Edge {
    pub check: u32,
    pub var: u32,
    /// Circulant power, reduced mod `z`.
    pub power: u32,
    /// Relocation index, reduced mod `M`.
    pub shift: u32,
    /// Base position `i * kappa + j`, or `NO_TAG`.
    pub tag: u32,
    pub component: u32,
}

/// Bipartite protograph whose edges carry a lifting power and a copy shift.
///
/// Lifting by `Z_z x Z_M` with these voltages yields the expanded Tanner
/// graph of `H_SC` (`M = 1`) or of `H_MD`.
#[derive(Clone, Debug)]
pub struct TannerGraph {
    pub(crate) n_checks: usize,
    pub(crate) n_vars: usize,
    pub(crate) z: u32,
    pub(crate) copies: u32,
    /// Columns per replica, used for replica spans.
    pub(crate) replica_width: usize,
    /// `(gamma, kappa)` when edges carry base-position tags.
    pub(crate) base: Option<(usize, usize)>,
    pub(crate) edges: Vec<Edge>,
    pub(crate) check_adj: Vec<Vec<u32>>,
    pub(crate) var_adj: Vec<Vec<u32>>,
}

impl TannerGraph {
    fn build(
        n_checks: usize,
        n_vars: usize,
        z: usize,
        copies: usize,
        replica_width: usize,
        base: Option<(usize, usize)>,
        edges: Vec<Edge>,
    ) -> Self {
        let mut check_adj = vec![Vec::new(); n_checks];
        let mut var_adj = vec![Vec::new(); n_vars];
        for (idx, e) in edges.iter().enumerate() {
            check_adj[e.check as usize].push(idx as u32);
            var_adj[e.var as usize].push(idx as u32);
        }
        TannerGraph {
            n_checks,
            n_vars,
            z: z as u32,
            copies: copies as u32,
            replica_width: replica_width.max(1),
            base,
            edges,
            check_adj,
            var_adj,
        }
    }

    /// Graph of a block matrix. If the matrix carries an SC base layout,
    /// edges are tagged with base positions and spans are measured in
    /// replicas of `kappa` columns.
    pub fn from_qc(h: &SparseQcMatrix) -> Self {
        let base = h.base_layout();
        let edges = h
            .blocks()
            .iter()
            .map(|b| Edge {
                check: b.row as u32,
                var: b.col as u32,
                power: b.power as u32,
                shift: 0,
                tag: base.map_or(NO_TAG, |(g, k)| ((b.row % g) * k + b.col % k) as u32),
                component: 0,
            })
            .collect();
        let width = base.map_or(h.block_cols(), |(_, k)| k);
        Self::build(h.block_rows(), h.block_cols(), h.z(), 1, width, base, edges)
    }

    /// SC protograph of a design; with `relocation` the edges also carry
    /// copy shifts so that lifting yields `H_MD`.
    pub fn from_design(
        k: &PartitioningMatrix,
        lifting: &LiftingMatrix,
        relocation: Option<&RelocationMatrix>,
        params: &CodeParams,
    ) -> Result<Self> {
        if let Some(m) = relocation {
            m.check(params)?;
        }
        let copies = if relocation.is_some() { params.copies } else { 1 };
        let edges = sc_nonzeros(k, Some(lifting), params)?
            .into_iter()
            .map(|n| Edge {
                check: n.block_row(params.gamma) as u32,
                var: n.block_col(params.kappa) as u32,
                power: n.power as u32,
                shift: relocation.map_or(0, |m| m.get(n.base_row, n.base_col)),
                tag: (n.base_row * params.kappa + n.base_col) as u32,
                component: n.component as u32,
            })
            .collect();
        Ok(Self::build(
            params.sc_block_rows(),
            params.sc_block_cols(),
            params.z,
            copies,
            params.kappa,
            Some((params.gamma, params.kappa)),
            edges,
        ))
    }

    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Order of the voltage group, `z * M`.
    pub fn group_order(&self) -> u64 {
        self.z as u64 * self.copies as u64
    }

    pub fn base_layout(&self) -> Option<(usize, usize)> {
        self.base
    }

    pub(crate) fn replica_of(&self, var: u32) -> usize {
        var as usize / self.replica_width
    }
}
