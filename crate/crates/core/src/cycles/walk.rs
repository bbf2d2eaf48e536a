//! Enumeration of closed non-backtracking protograph walks.
//!
//! A cycle of length `2g` in a `Z_z x Z_M` lift projects to a closed walk
//! of length `2g` in the protograph that never immediately reuses an edge.
//! The walk lifts to `z * M` closed walks; they are simple cycles iff the
//! alternating voltage sum vanishes and no two visits of the same
//! protograph node sit at the same lifted offset. Each lifted cycle is seen
//! from `2g` check-rooted, directed walks, so one class of walks with orbit
//! size `o` stands for `z * M * o / 2g` lifted cycles.

use rayon::prelude::*;

use super::graph::TannerGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum WalkMode {
    /// Every closed non-backtracking walk, ignoring voltages.
    Candidates,
    /// Walks that lift to simple cycles.
    Lifted,
}

/// One canonical walk: `nodes = [c0, v1, c1, v2, .., v_g]`; edge `t` joins
/// `nodes[t]` and `nodes[(t + 1) % 2g]`.
pub(crate) struct Walk<'a> {
    pub nodes: &'a [u32],
    pub edges: &'a [u32],
    /// Number of distinct rotations / reflections of the walk.
    pub orbit: usize,
}

const MAX_LEN: usize = 8;

struct Search<'g, F> {
    graph: &'g TannerGraph,
    len: usize,
    mode: WalkMode,
    root: u32,
    nodes: [u32; MAX_LEN],
    edges: [u32; MAX_LEN],
    pz: [u32; MAX_LEN + 1],
    pm: [u32; MAX_LEN + 1],
    /// `marker[v] = e + 1` when edge `e` joins the root to variable `v`.
    marker: Vec<u32>,
    visit: F,
}

impl<F: FnMut(&Walk)> Search<'_, F> {
    fn conflicts(&self, t: usize, node: u32, z_off: u32, m_off: u32) -> bool {
        if self.mode == WalkMode::Candidates {
            return false;
        }
        (t % 2..t)
            .step_by(2)
            .any(|s| self.nodes[s] == node && self.pz[s] == z_off && self.pm[s] == m_off)
    }

    fn step(&mut self, t: usize) {
        let graph = self.graph;
        let (z, copies) = (graph.z, graph.copies);
        let prev = self.nodes[t - 1];
        if t % 2 == 1 {
            for &e in &graph.check_adj[prev as usize] {
                let edge = graph.edges[e as usize];
                let v = edge.var;
                if t >= 3 && v == self.nodes[t - 2] {
                    continue;
                }
                let zo = (self.pz[t - 1] + edge.power) % z;
                let mo = (self.pm[t - 1] + edge.shift) % copies;
                if self.conflicts(t, v, zo, mo) {
                    continue;
                }
                self.nodes[t] = v;
                self.edges[t - 1] = e;
                self.pz[t] = zo;
                self.pm[t] = mo;
                if t + 1 == self.len {
                    self.close();
                } else {
                    self.step(t + 1);
                }
            }
        } else {
            for &e in &graph.var_adj[prev as usize] {
                let edge = graph.edges[e as usize];
                let c = edge.check;
                if c < self.root || c == self.nodes[t - 2] {
                    continue;
                }
                let zo = (self.pz[t - 1] + z - edge.power) % z;
                let mo = (self.pm[t - 1] + copies - edge.shift) % copies;
                if self.conflicts(t, c, zo, mo) {
                    continue;
                }
                self.nodes[t] = c;
                self.edges[t - 1] = e;
                self.pz[t] = zo;
                self.pm[t] = mo;
                self.step(t + 1);
            }
        }
    }

    fn close(&mut self) {
        let last = self.len - 1;
        let v = self.nodes[last];
        // Closing edge must differ from both neighbours on the walk.
        if v == self.nodes[1] || self.nodes[last - 1] == self.root {
            return;
        }
        let slot = self.marker[v as usize];
        if slot == 0 {
            return;
        }
        let e = slot - 1;
        if self.mode == WalkMode::Lifted {
            let edge = self.graph.edges[e as usize];
            let (z, copies) = (self.graph.z, self.graph.copies);
            if !(self.pz[last] + z - edge.power).is_multiple_of(z)
                || !(self.pm[last] + copies - edge.shift).is_multiple_of(copies)
            {
                return;
            }
        }
        self.edges[last] = e;
        if let Some(orbit) = canonical_orbit(&self.nodes[..self.len]) {
            let walk = Walk {
                nodes: &self.nodes[..self.len],
                edges: &self.edges[..self.len],
                orbit,
            };
            (self.visit)(&walk);
        }
    }
}

/// Returns the orbit size if `seq` is the lexicographically smallest of its
/// check-rooted rotations and reflections, `None` otherwise.
fn canonical_orbit(seq: &[u32]) -> Option<usize> {
    let n = seq.len();
    let mut stabilizer = 0;
    for p in (0..n).step_by(2).filter(|&p| seq[p] == seq[0]) {
        for reverse in [false, true] {
            let at = |k: usize| {
                if reverse {
                    seq[(p + n - k) % n]
                } else {
                    seq[(p + k) % n]
                }
            };
            match (0..n).map(at).cmp(seq.iter().copied()) {
                std::cmp::Ordering::Less => return None,
                std::cmp::Ordering::Equal => stabilizer += 1,
                std::cmp::Ordering::Greater => {}
            }
        }
    }
    Some(n / stabilizer)
}

/// Visits every canonical walk of length `2g` whose smallest check is `root`.
pub(crate) fn walks_from_root<F: FnMut(&Walk)>(
    graph: &TannerGraph,
    g: usize,
    mode: WalkMode,
    root: u32,
    visit: F,
) {
    let mut marker = vec![0u32; graph.n_vars];
    for &e in &graph.check_adj[root as usize] {
        marker[graph.edges[e as usize].var as usize] = e + 1;
    }
    let mut search = Search {
        graph,
        len: 2 * g,
        mode,
        root,
        nodes: [0; MAX_LEN],
        edges: [0; MAX_LEN],
        pz: [0; MAX_LEN + 1],
        pm: [0; MAX_LEN + 1],
        marker,
        visit,
    };
    search.nodes[0] = root;
    search.step(1);
}

/// Runs `per_root` over every root check in parallel and returns the
/// per-root results in root order.
pub(crate) fn map_roots<T, F>(graph: &TannerGraph, per_root: F) -> Vec<T>
where
    T: Send,
    F: Fn(u32) -> T + Sync + Send,
{
    (0..graph.n_checks as u32).into_par_iter().map(per_root).collect()
}
