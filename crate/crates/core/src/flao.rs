//! Greedy finite-length relocation optimizer.
//!
//! The lifted cycles of `H_SC` are enumerated once. A relocation matrix
//! deactivates a cycle when the alternating sum of the auxiliary indices
//! along it is nonzero mod `M`; every cycle left active becomes `M` cycles
//! of `H_MD`. Starting from a relocation drawn from a GRADE distribution,
//! the optimizer repeatedly moves the circulant involved in the most active
//! cycles around the middle replica to the auxiliary matrix that
//! deactivates the most of them.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cycles::{lifted_cycle_records, TannerGraph};
use crate::error::{Error, Result};
use crate::grade::ProbDistMatrix;
use crate::matrix::{component_census, md_density, LiftingMatrix, PartitioningMatrix, RelocationMatrix};
use crate::params::CodeParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlaoConfig {
    pub cycle_length: usize,
    /// Maximum number of greedy steps.
    pub relocation_bound: usize,
    pub seed: u64,
    /// Optional hard stop on the MD density, in percent.
    pub density_cap: Option<f64>,
}

impl FlaoConfig {
    /// Defaults for `params`: step bound `10 * gamma * kappa`, seed 0, no cap.
    pub fn for_params(params: &CodeParams, cycle_length: usize) -> Self {
        FlaoConfig {
            cycle_length,
            relocation_bound: 10 * params.gamma * params.kappa,
            seed: 0,
            density_cap: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.cycle_length.is_multiple_of(2) || !(4..=8).contains(&self.cycle_length) {
            return Err(Error::UnsupportedGirth(self.cycle_length / 2));
        }
        if self.relocation_bound == 0 {
            return Err(Error::InvalidParams("relocation bound must be at least 1".into()));
        }
        Ok(())
    }
}

/// One greedy step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    /// Base position `(i, j)` of the moved circulant.
    pub position: (usize, usize),
    /// Auxiliary-matrix index it was moved to.
    pub target: u32,
    /// Active `H_SC` cycles after the move.
    pub active: u64,
    /// False for the final step that failed to improve and was undone.
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlaoResult {
    pub relocation: RelocationMatrix,
    /// Cycles of the chosen length in `H_MD`: `M` times the active count.
    pub md_cycle_count: u64,
    pub initial_md_cycle_count: u64,
    pub iterations: usize,
    pub md_density: f64,
    pub seed: u64,
    pub trace: Vec<TraceStep>,
}

/// Draws a relocation matrix whose per-component use of each auxiliary
/// matrix follows `dist`, rounded by largest remainder to the actual
/// component sizes of `k`.
pub fn initial_relocation(
    dist: &ProbDistMatrix,
    k: &PartitioningMatrix,
    params: &CodeParams,
    seed: u64,
) -> Result<RelocationMatrix> {
    if dist.memory() != params.memory || dist.copies() != params.copies {
        return Err(Error::Dimension {
            expected_rows: params.memory + 1,
            expected_cols: params.copies,
            rows: dist.memory() + 1,
            cols: dist.copies(),
        });
    }
    k.check(params)?;
    let census = component_census(k, params.memory);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut relocation = RelocationMatrix::zeros(params);
    for (comp, &size) in census.iter().enumerate() {
        let row: Vec<f64> = (0..params.copies).map(|j| dist.get(comp, j)).collect();
        let counts = largest_remainder(&row, size);
        let mut members: Vec<(usize, usize)> = (0..params.gamma)
            .flat_map(|i| (0..params.kappa).map(move |j| (i, j)))
            .filter(|&(i, j)| k.get(i, j) as usize == comp)
            .collect();
        members.shuffle(&mut rng);
        let mut it = members.into_iter();
        for (target, &n) in counts.iter().enumerate().skip(1) {
            for (i, j) in it.by_ref().take(n) {
                relocation.set(i, j, target as u32);
            }
        }
    }
    Ok(relocation)
}

/// Integer counts proportional to `weights` summing to `total`.
fn largest_remainder(weights: &[f64], total: usize) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    if !(sum > 0.0) {
        let mut out = vec![0; weights.len()];
        out[0] = total;
        return out;
    }
    let exact: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut out: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let short = total - out.iter().sum::<usize>();
    for &j in order.iter().take(short) {
        out[j] += 1;
    }
    out
}

/// A lifted cycle class reduced to what the optimizer needs.
struct Tracked {
    /// `(i * kappa + j, net coefficient)` of the relocation sum.
    terms: Vec<(usize, i64)>,
    positions: Vec<usize>,
    weight: u64,
}

impl Tracked {
    fn active(&self, relocation: &[u32], copies: i64) -> bool {
        let s: i64 = self.terms.iter().map(|&(p, c)| c * relocation[p] as i64).sum();
        s.rem_euclid(copies) == 0
    }
}

fn active_weight(list: &[Tracked], relocation: &[u32], copies: i64) -> u64 {
    list.iter().filter(|t| t.active(relocation, copies)).map(|t| t.weight).sum()
}

fn flat(relocation: &RelocationMatrix) -> Vec<u32> {
    relocation.grid().as_slice().to_vec()
}

/// Runs the greedy optimizer from a relocation drawn from `dist`.
pub fn fl_ao(
    k: &PartitioningMatrix,
    lifting: &LiftingMatrix,
    params: &CodeParams,
    dist: &ProbDistMatrix,
    cfg: &FlaoConfig,
) -> Result<FlaoResult> {
    let start = initial_relocation(dist, k, params, cfg.seed)?;
    fl_ao_from(k, lifting, params, start, cfg)
}

/// Runs the greedy optimizer from an explicit starting relocation.
pub fn fl_ao_from(
    k: &PartitioningMatrix,
    lifting: &LiftingMatrix,
    params: &CodeParams,
    start: RelocationMatrix,
    cfg: &FlaoConfig,
) -> Result<FlaoResult> {
    cfg.validate()?;
    start.check(params)?;
    let graph = TannerGraph::from_design(k, lifting, None, params)?;
    let g = cfg.cycle_length / 2;
    for shorter in 2..g {
        if !lifted_cycle_records(&graph, shorter)?.is_empty() {
            return Err(Error::InvalidParams(format!(
                "H_SC has cycles shorter than {}",
                cfg.cycle_length
            )));
        }
    }
    let kappa = params.kappa;
    let copies = params.copies as i64;
    let middle = params.coupling_len / 2;
    let records = lifted_cycle_records(&graph, g)?;

    let mut full = Vec::with_capacity(records.len());
    let mut pruned = Vec::new();
    for r in &records {
        let tracked = Tracked {
            terms: r.relocation_terms(kappa),
            positions: r.base_positions(kappa),
            weight: r.multiplicity,
        };
        // Edge t joins nodes[t] and nodes[t + 1]; its variable node sits at
        // the odd one of the two positions.
        let len = r.nodes.len();
        let mut middle_edges: Vec<(usize, usize)> = (0..len)
            .map(|t| {
                let (a, b) = (r.nodes[t], r.nodes[(t + 1) % len]);
                if t % 2 == 0 { (a, b) } else { (b, a) }
            })
            .filter(|&(_, var)| var / kappa + 1 == middle)
            .collect();
        middle_edges.sort_unstable();
        middle_edges.dedup();
        if middle_edges.len() >= 2 {
            pruned.push(Tracked {
                terms: tracked.terms.clone(),
                positions: tracked.positions.clone(),
                weight: tracked.weight,
            });
        }
        full.push(tracked);
    }

    let mut relocation = start;
    let mut current = flat(&relocation);
    let mut active_prev = active_weight(&full, &current, copies);
    let initial = active_prev;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut trace = Vec::new();
    let mut iterations = 0;

    while !full.is_empty() && iterations < cfg.relocation_bound {
        let mut participation = vec![0u64; params.gamma * kappa];
        for t in pruned.iter().filter(|t| t.active(&current, copies)) {
            for &p in &t.positions {
                participation[p] += t.weight;
            }
        }
        let best = participation.iter().copied().max().unwrap_or(0);
        if best == 0 {
            break;
        }
        let pos = *pick(&mut rng, participation.iter().enumerate().filter(|(_, &v)| v == best).map(|(p, _)| p));

        let scores: Vec<u64> = (0..params.copies as u32)
            .into_par_iter()
            .map(|target| {
                let mut trial = current.clone();
                trial[pos] = target;
                pruned.iter().filter(|t| !t.active(&trial, copies)).map(|t| t.weight).sum()
            })
            .collect();
        let top = scores.iter().copied().max().unwrap_or(0);
        let target = *pick(&mut rng, (0..params.copies as u32).filter(|&t| scores[t as usize] == top));

        let previous = current[pos];
        current[pos] = target;
        iterations += 1;
        let active_cur = active_weight(&full, &current, copies);
        let over_cap = cfg.density_cap.is_some_and(|cap| {
            100.0 * current.iter().filter(|&&v| v != 0).count() as f64 / current.len() as f64 > cap
        });
        let improved = active_cur < active_prev && !over_cap;
        trace.push(TraceStep {
            position: (pos / kappa, pos % kappa),
            target,
            active: active_cur,
            accepted: improved,
        });
        if !improved {
            current[pos] = previous;
            break;
        }
        relocation.set(pos / kappa, pos % kappa, target);
        active_prev = active_cur;
    }

    Ok(FlaoResult {
        md_density: md_density(&relocation),
        relocation,
        md_cycle_count: copies as u64 * active_prev,
        initial_md_cycle_count: copies as u64 * initial,
        iterations,
        seed: cfg.seed,
        trace,
    })
}

fn pick<T, I: Iterator<Item = T>>(rng: &mut ChaCha8Rng, items: I) -> Box<T> {
    let mut v: Vec<T> = items.collect();
    v.shuffle(rng);
    Box::new(v.swap_remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn largest_remainder_hits_total() {
        assert_eq!(largest_remainder(&[0.5, 0.25, 0.25], 5), vec![3, 1, 1]);
        assert_eq!(largest_remainder(&[0.3672, 0.0664, 0.0664], 34), vec![25, 5, 4]);
        assert_eq!(largest_remainder(&[0.0, 0.0], 3), vec![3, 0]);
        assert_eq!(largest_remainder(&[1.0, 0.0, 0.0], 7), vec![7, 0, 0]);
    }

    fn small_design() -> (PartitioningMatrix, CodeParams) {
        let params = CodeParams::new(3, 5, 5, 4, 1, 3).unwrap();
        let k = PartitioningMatrix::from_rows(
            vec![vec![0, 1, 0, 1, 0], vec![1, 0, 1, 0, 1], vec![0, 0, 1, 1, 0]],
            &params,
        )
        .unwrap();
        (k, params)
    }

    #[test]
    fn initial_relocation_follows_component_counts() {
        let (k, params) = small_design();
        let dist = ProbDistMatrix::from_rows(&[vec![0.2, 0.2, 0.1], vec![0.5, 0.0, 0.0]], vec![0.5, 0.5]).unwrap();
        let m = initial_relocation(&dist, &k, &params, 7).unwrap();
        let mut per = [[0usize; 3]; 2];
        for i in 0..3 {
            for j in 0..5 {
                per[k.get(i, j) as usize][m.get(i, j) as usize] += 1;
            }
        }
        // component 0 has 8 circulants split 0.4/0.4/0.2, component 1 stays put
        assert_eq!(per, [[3, 3, 2], [7, 0, 0]]);
        assert_eq!(initial_relocation(&dist, &k, &params, 7).unwrap(), m);
        let none = ProbDistMatrix::unrelocated(&[0.5, 0.5], 3).unwrap();
        assert_eq!(initial_relocation(&none, &k, &params, 1).unwrap().relocated_count(), 0);
    }
}
