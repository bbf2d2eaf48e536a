//! Short-cycle enumeration and censuses for SC and MD-SC Tanner graphs.
//!
//! Counting never expands the parity-check matrix: closed walks of the
//! protograph are enumerated and tested against the lifting and relocation
//! conditions (see [`walk`]). [`brute_force_cycle_count`] works on the
//! expanded graph and exists to check the walk-based counts.

mod brute;
mod graph;
mod walk;

use serde::{Deserialize, Serialize};

pub use brute::{brute_force_cycle_count, BRUTE_FORCE_MAX_COLS};
pub use graph::TannerGraph;

use crate::error::{Error, Result};
use crate::matrix::{LiftingMatrix, PartitioningMatrix, RelocationMatrix};
use crate::params::CodeParams;
use crate::qc::SparseQcMatrix;
use graph::NO_TAG;
use walk::{map_roots, walks_from_root, Walk, WalkMode};

pub(crate) fn check_girth_arg(g: usize) -> Result<()> {
    if (2..=4).contains(&g) {
        Ok(())
    } else {
        Err(Error::UnsupportedGirth(g))
    }
}

/// One class of closed walks of length `2g`, i.e. one protograph cycle
/// pattern together with the lifted cycles it produces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleRecord {
    /// `[c0, v1, c1, v2, .., c_{g-1}, v_g]`: block rows at even positions,
    /// block columns at odd positions, in traversal order.
    pub nodes: Vec<usize>,
    /// Base position `(i, j)` of each of the `2g` edges in traversal order;
    /// empty when the host matrix has no base layout.
    pub base_footprint: Vec<(usize, usize)>,
    /// Alternating sums over the traversal (edges leaving a check count `+`).
    pub partition_sum: i64,
    pub relocation_sum: i64,
    pub lifting_sum: i64,
    /// Number of expanded cycles this class stands for.
    pub multiplicity: u64,
    /// Number of consecutive replicas spanned by the variable nodes.
    pub span: usize,
}

impl CycleRecord {
    /// Distinct base positions touched, as indices `i * kappa + j`.
    pub fn base_positions(&self, kappa: usize) -> Vec<usize> {
        let mut pos: Vec<usize> = self.base_footprint.iter().map(|&(i, j)| i * kappa + j).collect();
        pos.sort_unstable();
        pos.dedup();
        pos
    }

    /// Base positions with their net coefficient in the alternating
    /// relocation sum; positions whose visits cancel are dropped.
    pub fn relocation_terms(&self, kappa: usize) -> Vec<(usize, i64)> {
        let mut terms: Vec<(usize, i64)> = Vec::with_capacity(self.base_footprint.len());
        for (t, &(i, j)) in self.base_footprint.iter().enumerate() {
            let sign = if t % 2 == 0 { 1 } else { -1 };
            let pos = i * kappa + j;
            match terms.iter_mut().find(|(p, _)| *p == pos) {
                Some(term) => term.1 += sign,
                None => terms.push((pos, sign)),
            }
        }
        terms.retain(|&(_, c)| c != 0);
        terms
    }

    /// Whether the relocation condition holds under `relocation`: the
    /// alternating sum of auxiliary indices vanishes mod `M`.
    pub fn is_active(&self, relocation: &RelocationMatrix, copies: usize) -> bool {
        let kappa = relocation.cols();
        let sum: i64 = self
            .relocation_terms(kappa)
            .iter()
            .map(|&(pos, c)| c * relocation.get(pos / kappa, pos % kappa) as i64)
            .sum();
        sum.rem_euclid(copies as i64) == 0
    }
}

/// Cycle totals of one length, split by replica span and by circulant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCensus {
    pub cycle_length: usize,
    pub total: u64,
    /// `per_span[k - 1]` counts cycles spanning `k` consecutive replicas.
    pub per_span: Vec<u64>,
    /// Cycles touching each base position; empty without a base layout.
    pub per_circulant: Vec<Vec<u64>>,
}

impl CycleCensus {
    fn empty(g: usize, base: Option<(usize, usize)>) -> Self {
        CycleCensus {
            cycle_length: 2 * g,
            total: 0,
            per_span: Vec::new(),
            per_circulant: base.map_or_else(Vec::new, |(gamma, kappa)| vec![vec![0; kappa]; gamma]),
        }
    }

    fn add_span(&mut self, span: usize, count: u64) {
        if self.per_span.len() < span {
            self.per_span.resize(span, 0);
        }
        self.per_span[span - 1] += count;
    }

    fn merge(&mut self, other: &CycleCensus) {
        self.total += other.total;
        for (k, &n) in other.per_span.iter().enumerate() {
            if n > 0 {
                self.add_span(k + 1, n);
            }
        }
        for (row, orow) in self.per_circulant.iter_mut().zip(&other.per_circulant) {
            for (a, b) in row.iter_mut().zip(orow) {
                *a += b;
            }
        }
    }

    /// Largest span with a nonzero count.
    pub fn max_span(&self) -> usize {
        self.per_span.iter().rposition(|&n| n > 0).map_or(0, |k| k + 1)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("census serializes")
    }
}

fn span_of(graph: &TannerGraph, walk: &Walk) -> usize {
    let (lo, hi) = walk
        .nodes
        .iter()
        .skip(1)
        .step_by(2)
        .map(|&v| graph.replica_of(v))
        .fold((usize::MAX, 0), |(lo, hi), r| (lo.min(r), hi.max(r)));
    hi - lo + 1
}

fn multiplicity(graph: &TannerGraph, walk: &Walk, mode: WalkMode) -> u64 {
    match mode {
        WalkMode::Candidates => 1,
        WalkMode::Lifted => {
            let len = walk.nodes.len() as u64;
            let scaled = graph.group_order() * walk.orbit as u64;
            debug_assert_eq!(scaled % len, 0, "orbit/group mismatch");
            scaled / len
        }
    }
}

fn record_of(graph: &TannerGraph, walk: &Walk, mode: WalkMode) -> CycleRecord {
    let mut partition_sum = 0i64;
    let mut relocation_sum = 0i64;
    let mut lifting_sum = 0i64;
    let mut base_footprint = Vec::new();
    for (t, &e) in walk.edges.iter().enumerate() {
        let edge = graph.edges[e as usize];
        let sign = if t % 2 == 0 { 1 } else { -1 };
        partition_sum += sign * edge.component as i64;
        relocation_sum += sign * edge.shift as i64;
        lifting_sum += sign * edge.power as i64;
        if let (Some((_, kappa)), true) = (graph.base, edge.tag != NO_TAG) {
            let tag = edge.tag as usize;
            base_footprint.push((tag / kappa, tag % kappa));
        }
    }
    CycleRecord {
        nodes: walk.nodes.iter().map(|&n| n as usize).collect(),
        base_footprint,
        partition_sum,
        relocation_sum,
        lifting_sum,
        multiplicity: multiplicity(graph, walk, mode),
        span: span_of(graph, walk),
    }
}

fn collect_records(graph: &TannerGraph, g: usize, mode: WalkMode) -> Result<Vec<CycleRecord>> {
    check_girth_arg(g)?;
    let per_root = map_roots(graph, |root| {
        let mut out = Vec::new();
        walks_from_root(graph, g, mode, root, |w| out.push(record_of(graph, w, mode)));
        out
    });
    Ok(per_root.into_iter().flatten().collect())
}

fn tally(graph: &TannerGraph, g: usize, mode: WalkMode) -> Result<CycleCensus> {
    check_girth_arg(g)?;
    let parts = map_roots(graph, |root| {
        let mut census = CycleCensus::empty(g, graph.base);
        let mut tags = [0u32; 8];
        walks_from_root(graph, g, mode, root, |w| {
            let n = multiplicity(graph, w, mode);
            census.total += n;
            census.add_span(span_of(graph, w), n);
            if let Some((_, kappa)) = graph.base {
                let len = w.edges.len();
                for (slot, &e) in tags.iter_mut().zip(w.edges) {
                    *slot = graph.edges[e as usize].tag;
                }
                let tags = &mut tags[..len];
                tags.sort_unstable();
                for (k, &tag) in tags.iter().enumerate() {
                    if tag != NO_TAG && (k == 0 || tags[k - 1] != tag) {
                        let tag = tag as usize;
                        census.per_circulant[tag / kappa][tag % kappa] += n;
                    }
                }
            }
        });
        census
    });
    let mut census = CycleCensus::empty(g, graph.base);
    for part in &parts {
        census.merge(part);
    }
    Ok(census)
}

/// Simple cycles of length `2g` of the protograph of `h` (powers ignored).
pub fn enumerate_protograph_cycles(h: &SparseQcMatrix, g: usize) -> Result<Vec<CycleRecord>> {
    let graph = TannerGraph::from_qc(&h.protograph());
    collect_records(&graph, g, WalkMode::Lifted)
}

/// Cycle candidates of length `2g` in the protograph of `h`: every class of
/// closed walks that never immediately reuse an edge, including the
/// degenerate patterns that revisit nodes.
pub fn enumerate_cycle_candidates(h: &SparseQcMatrix, g: usize) -> Result<Vec<CycleRecord>> {
    let graph = TannerGraph::from_qc(&h.protograph());
    collect_records(&graph, g, WalkMode::Candidates)
}

/// Protograph classes of the expanded cycles of length `2g` of `graph`,
/// each with the number of expanded cycles it stands for.
pub fn lifted_cycle_records(graph: &TannerGraph, g: usize) -> Result<Vec<CycleRecord>> {
    collect_records(graph, g, WalkMode::Lifted)
}

/// Census of the expanded cycles of length `2g` of `graph`.
pub fn census(graph: &TannerGraph, g: usize) -> Result<CycleCensus> {
    tally(graph, g, WalkMode::Lifted)
}

/// Census of the expanded Tanner graph of `h`, computed without expansion.
pub fn count_lifted_cycles(h: &SparseQcMatrix, g: usize) -> Result<CycleCensus> {
    if h.z() < 2 {
        return Err(Error::InvalidParams("lifted counting needs z >= 2".into()));
    }
    census(&TannerGraph::from_qc(h), g)
}

/// Census of the cycles of length `2g` of `H_MD` for the design.
pub fn md_census(
    k: &PartitioningMatrix,
    lifting: &LiftingMatrix,
    relocation: &RelocationMatrix,
    params: &CodeParams,
    g: usize,
) -> Result<CycleCensus> {
    let graph = TannerGraph::from_design(k, lifting, Some(relocation), params)?;
    census(&graph, g)
}

/// Number of cycles of length `2g` in `H_MD`.
///
/// Every `H_SC` cycle class whose relocation sum vanishes mod `M` lifts to
/// `M` times as many cycles of `H_MD`; the walk enumeration also catches
/// the rare `H_MD` cycles whose projection onto `H_SC` is not simple.
pub fn count_md_cycles(
    k: &PartitioningMatrix,
    lifting: &LiftingMatrix,
    relocation: &RelocationMatrix,
    params: &CodeParams,
    g: usize,
) -> Result<u64> {
    Ok(md_census(k, lifting, relocation, params, g)?.total)
}

/// Cycle total at coupling length `l2` predicted from a census taken at
/// coupling length `l1`, using the translation symmetry of the replicas.
pub fn scale_census_to_length(census: &CycleCensus, l1: usize, l2: usize) -> Result<u64> {
    if l1 == l2 {
        return Ok(census.total);
    }
    if census.max_span() >= l1 {
        return Err(Error::InvalidParams(format!(
            "span {} not below source length {l1}",
            census.max_span()
        )));
    }
    let mut total = 0u64;
    for (idx, &n) in census.per_span.iter().enumerate() {
        let span = idx + 1;
        if n == 0 {
            continue;
        }
        let from = (l1 + 1 - span) as u64;
        if n % from != 0 {
            return Err(Error::NonIntegerScaling { span });
        }
        let to = (l2 + 1).saturating_sub(span) as u64;
        total += n / from * to;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grade::Cycle8Weights;
    use crate::params::binomial;

    fn total(records: &[CycleRecord]) -> u64 {
        records.iter().map(|r| r.multiplicity).sum()
    }

    #[test]
    fn all_one_protograph_counts() {
        let h = SparseQcMatrix::all_one(3, 3, 1);
        assert_eq!(total(&enumerate_protograph_cycles(&h, 3).unwrap()), 6);
        let h = SparseQcMatrix::all_one(2, 2, 1);
        assert_eq!(total(&enumerate_protograph_cycles(&h, 2).unwrap()), 1);
        let h = SparseQcMatrix::all_one(4, 17, 1);
        let expected = 6.0 * binomial(4, 3) * binomial(17, 3);
        assert_eq!(total(&enumerate_protograph_cycles(&h, 3).unwrap()) as f64, expected);
        assert_eq!(expected, 16_320.0);
    }

    #[test]
    fn candidate_patterns_match_weights() {
        for (gamma, kappa) in [(3, 5), (3, 17), (4, 17)] {
            let h = SparseQcMatrix::all_one(gamma, kappa, 1);
            let w = Cycle8Weights::new(gamma, kappa);
            let n = enumerate_cycle_candidates(&h, 4).unwrap().len() as f64;
            assert_eq!(n, w.w1 + w.w2 + w.w3 + w.w4, "({gamma}, {kappa})");
            let n6 = enumerate_cycle_candidates(&h, 3).unwrap().len() as f64;
            assert_eq!(n6, 6.0 * binomial(gamma, 3) * binomial(kappa, 3));
        }
    }

    #[test]
    fn lifting_condition_kills_unbalanced_square() {
        let h = SparseQcMatrix::new(
            2,
            2,
            3,
            vec![
                crate::qc::Block { row: 0, col: 0, power: 0 },
                crate::qc::Block { row: 0, col: 1, power: 0 },
                crate::qc::Block { row: 1, col: 0, power: 0 },
                crate::qc::Block { row: 1, col: 1, power: 1 },
            ],
        )
        .unwrap();
        assert_eq!(count_lifted_cycles(&h, 2).unwrap().total, 0);
        assert_eq!(brute_force_cycle_count(&h, 2).unwrap(), 0);
        let balanced = SparseQcMatrix::all_one(2, 2, 3);
        assert_eq!(count_lifted_cycles(&balanced, 2).unwrap().total, 3);
        assert!(count_lifted_cycles(&SparseQcMatrix::all_one(2, 2, 1), 2).is_err());
        assert!(matches!(count_lifted_cycles(&balanced, 5), Err(Error::UnsupportedGirth(5))));
    }

    #[test]
    fn census_bookkeeping() {
        let params = CodeParams::new(3, 5, 5, 4, 1, 1).unwrap();
        let k = PartitioningMatrix::from_rows(vec![vec![0, 1, 0, 1, 0], vec![1, 0, 1, 0, 1], vec![0, 0, 1, 1, 0]], &params)
            .unwrap();
        let l = LiftingMatrix::from_rows(vec![vec![0, 0, 0, 0, 0], vec![0, 1, 2, 3, 4], vec![0, 2, 4, 1, 3]], &params)
            .unwrap();
        let h = crate::qc::build_sc_matrix(&k, &l, &params).unwrap();
        for g in 3..=4 {
            let c = count_lifted_cycles(&h, g).unwrap();
            assert_eq!(c.per_span.iter().sum::<u64>(), c.total);
            let touched: u64 = c.per_circulant.iter().flatten().sum();
            assert!(touched >= c.total && touched <= 2 * g as u64 * c.total);
            let records = lifted_cycle_records(&TannerGraph::from_qc(&h), g).unwrap();
            let by_positions: u64 = records.iter().map(|r| r.multiplicity * r.base_positions(5).len() as u64).sum();
            assert_eq!(by_positions, touched);
            assert_eq!(total(&records), c.total);
            for r in &records {
                assert_eq!(r.lifting_sum.rem_euclid(5), 0);
            }
        }
    }

    #[test]
    fn scaling_requires_short_spans() {
        let census = CycleCensus { cycle_length: 6, total: 11, per_span: vec![8, 3], per_circulant: vec![] };
        assert_eq!(scale_census_to_length(&census, 4, 4).unwrap(), 11);
        assert_eq!(scale_census_to_length(&census, 4, 7).unwrap(), 2 * 7 + 6);
        let odd = CycleCensus { per_span: vec![5], ..census.clone() };
        assert!(matches!(scale_census_to_length(&odd, 4, 7), Err(Error::NonIntegerScaling { span: 1 })));
        assert!(scale_census_to_length(&census, 2, 7).is_err());
    }
}
