//! Bit-level exhaustive cycle counting, used as a test oracle.

use crate::error::{Error, Result};
use crate::qc::SparseQcMatrix;

/// Largest expanded column count the oracle accepts.
pub const BRUTE_FORCE_MAX_COLS: usize = 2048;

/// Counts simple cycles of length `2g` in the expanded Tanner graph by
/// depth-first search from each cycle's smallest node.
pub fn brute_force_cycle_count(h: &SparseQcMatrix, g: usize) -> Result<u64> {
    super::check_girth_arg(g)?;
    let (n_rows, n_cols) = h.expanded_dims();
    if n_cols > BRUTE_FORCE_MAX_COLS {
        return Err(Error::TooLarge(n_cols));
    }
    // checks are 0..n_rows, variables n_rows..n_rows + n_cols
    let n = n_rows + n_cols;
    let mut adj = vec![Vec::new(); n];
    for (r, cols) in h.expand_rows().into_iter().enumerate() {
        for c in cols {
            adj[r].push(n_rows + c);
            adj[n_rows + c].push(r);
        }
    }
    let len = 2 * g;
    let mut on_path = vec![false; n];
    let mut total = 0u64;
    for start in 0..n_rows {
        on_path[start] = true;
        total += extend(&adj, start, start, 1, len, &mut on_path);
        on_path[start] = false;
    }
    // every cycle is found once per direction
    Ok(total / 2)
}

fn extend(adj: &[Vec<usize>], start: usize, at: usize, depth: usize, len: usize, on_path: &mut [bool]) -> u64 {
    let mut found = 0;
    for &next in &adj[at] {
        if depth == len {
            if next == start {
                found += 1;
            }
            continue;
        }
        if next <= start || on_path[next] {
            continue;
        }
        on_path[next] = true;
        found += extend(adj, start, next, depth + 1, len, on_path);
        on_path[next] = false;
    }
    found
}
