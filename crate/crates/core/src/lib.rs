//! Design of multi-dimensional spatially-coupled (MD-SC) QC-LDPC codes.
//!
//! The crate covers the whole pipeline:
//!
//! - [`qc`], [`matrix`], [`params`]: the partitioning, lifting and relocation
//!   matrices and the SC / MD-SC parity-check matrices built from them.
//! - [`cycles`]: exact short-cycle censuses without expanding the matrices.
//! - [`grade`]: expected cycle-candidate counts as functions of the
//!   probability-distribution matrix, their gradients, and the
//!   gradient-descent distributor.
//! - [`flao`]: greedy finite-length relocation seeded from a distribution.
//! - [`fixtures`]: bundled reference designs with known cycle counts.
//! - [`job`]: the end-to-end design pipeline.

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cycles;
pub mod error;
pub mod fixtures;
pub mod flao;
pub mod grade;
pub mod job;
pub mod matrix;
pub mod params;
pub mod poly;
pub mod qc;

pub use error::{Error, Result};
pub use matrix::{component_census, md_density, IntGrid, LiftingMatrix, PartitioningMatrix, RelocationMatrix};
pub use params::CodeParams;
pub use qc::{build_md_matrix, build_sc_matrix, build_sc_protograph, Block, SparseQcMatrix};
