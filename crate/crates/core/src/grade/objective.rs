//! Expected cycle-candidate counts and their gradients.
//!
//! Every objective is a weighted sum of terms of the form
//! `sum over M | b of [prod_k f(X^k, Y^k)^(n_k)]_{0,b}` with `k` in
//! `{-2, -1, 1, 2}`. Only the `X^0` coefficient with `Y`-degree divisible
//! by `M` is ever needed, so products are kept with `Y`-degrees reduced
//! mod `M`, which keeps every intermediate grid `(x-span) x M`.

use serde::{Deserialize, Serialize};

use super::dist::ProbDistMatrix;
use crate::params::binomial;

/// Which short cycles the optimizer targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Cycle6,
    Cycle8,
}

impl Objective {
    pub fn cycle_length(self) -> usize {
        match self {
            Objective::Cycle6 => 6,
            Objective::Cycle8 => 8,
        }
    }
}

impl std::str::FromStr for Objective {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "cycle6" | "6" => Ok(Objective::Cycle6),
            "cycle8" | "8" => Ok(Objective::Cycle8),
            other => Err(crate::Error::Parse(format!("unknown objective `{other}`"))),
        }
    }
}

/// Candidate-pattern weights of the cycle-8 objective.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cycle8Weights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
    pub w4: f64,
}

impl Cycle8Weights {
    pub fn new(gamma: usize, kappa: usize) -> Self {
        let c = binomial;
        let w4 = if gamma == 3 {
            6.0 * c(gamma, 2) * c(kappa, 4) + 36.0 * c(gamma, 3) * c(kappa, 4)
        } else {
            6.0 * c(gamma, 2) * c(kappa, 4)
                + 6.0 * c(gamma, 4) * c(kappa, 2)
                + 36.0 * c(gamma, 3) * c(kappa, 4)
                + 36.0 * c(gamma, 4) * c(kappa, 3)
                + 72.0 * c(gamma, 4) * c(kappa, 4)
        };
        Cycle8Weights {
            w1: c(gamma, 2) * c(kappa, 2),
            w2: 3.0 * c(gamma, 2) * c(kappa, 3) + 3.0 * c(gamma, 3) * c(kappa, 2),
            w3: 18.0 * c(gamma, 3) * c(kappa, 3),
            w4,
        }
    }
}

/// Number of cycle-6 candidates in the all-one `gamma x kappa` base matrix.
pub fn cycle6_weight(gamma: usize, kappa: usize) -> f64 {
    6.0 * binomial(gamma, 3) * binomial(kappa, 3)
}

/// One product term: `weight * [prod f(X^k, Y^k)^n]`, factors as `(k, n)`.
#[derive(Clone, Debug)]
struct Term {
    weight: f64,
    factors: Vec<(i64, usize)>,
}

fn terms(objective: Objective, gamma: usize, kappa: usize, include_w1: bool) -> Vec<Term> {
    match objective {
        Objective::Cycle6 => vec![Term {
            weight: cycle6_weight(gamma, kappa),
            factors: vec![(1, 3), (-1, 3)],
        }],
        Objective::Cycle8 => {
            let w = Cycle8Weights::new(gamma, kappa);
            let mut t = Vec::with_capacity(4);
            if include_w1 {
                t.push(Term { weight: w.w1, factors: vec![(2, 2), (-2, 2)] });
            }
            t.push(Term { weight: w.w2, factors: vec![(2, 1), (-2, 1), (1, 2), (-1, 2)] });
            t.push(Term { weight: w.w3, factors: vec![(2, 1), (1, 2), (-1, 4)] });
            t.push(Term { weight: w.w4, factors: vec![(1, 4), (-1, 4)] });
            t
        }
    }
}

/// Laurent polynomial in `X` with coefficients in the group algebra of `Z_M`.
struct Folded {
    x_lo: i64,
    rows: usize,
    copies: usize,
    data: Vec<f64>,
}

impl Folded {
    fn one(copies: usize) -> Self {
        let mut data = vec![0.0; copies];
        data[0] = 1.0;
        Folded { x_lo: 0, rows: 1, copies, data }
    }

    /// Multiplies by `f(X^k, Y^k)`.
    fn times(&self, p: &ProbDistMatrix, k: i64) -> Folded {
        let mem = p.memory() as i64;
        let m = self.copies;
        let lo = (k * mem).min(0);
        let rows = self.rows + (k.unsigned_abs() as usize) * p.memory();
        let mut data = vec![0.0; rows * m];
        for r in 0..self.rows {
            for c in 0..m {
                let a = self.data[r * m + c];
                if a == 0.0 {
                    continue;
                }
                for i in 0..=p.memory() {
                    let nr = (r as i64 + k * i as i64 - lo) as usize;
                    let row = &mut data[nr * m..(nr + 1) * m];
                    for j in 0..m {
                        let q = p.get(i, j);
                        if q != 0.0 {
                            let nc = (c as i64 + k * j as i64).rem_euclid(m as i64) as usize;
                            row[nc] += a * q;
                        }
                    }
                }
            }
        }
        Folded { x_lo: self.x_lo + lo, rows, copies: m, data }
    }

    /// Sum of the coefficients of `X^x Y^b` over `b = y mod M`.
    fn at(&self, x: i64, y: i64) -> f64 {
        let r = x - self.x_lo;
        if r < 0 || r >= self.rows as i64 {
            return 0.0;
        }
        self.data[r as usize * self.copies + y.rem_euclid(self.copies as i64) as usize]
    }
}

fn product(p: &ProbDistMatrix, factors: &[(i64, usize)], skip: Option<i64>) -> Folded {
    let mut acc = Folded::one(p.copies());
    let mut skipped = false;
    for &(k, n) in factors {
        for _ in 0..n {
            if !skipped && skip == Some(k) {
                skipped = true;
                continue;
            }
            acc = acc.times(p, k);
        }
    }
    acc
}

/// Expected candidate count for the chosen objective.
pub fn objective_value(p: &ProbDistMatrix, gamma: usize, kappa: usize, objective: Objective, include_w1: bool) -> f64 {
    terms(objective, gamma, kappa, include_w1)
        .iter()
        .map(|t| t.weight * product(p, &t.factors, None).at(0, 0))
        .sum()
}

/// Gradient of [`objective_value`] with respect to every `p_{i,j}`, row-major.
pub fn objective_gradient(
    p: &ProbDistMatrix,
    gamma: usize,
    kappa: usize,
    objective: Objective,
    include_w1: bool,
) -> Vec<f64> {
    let copies = p.copies();
    let mut grad = vec![0.0; (p.memory() + 1) * copies];
    for t in terms(objective, gamma, kappa, include_w1) {
        for &(k, n) in &t.factors {
            // d/dp_ij of f(X^k,Y^k)^n = n f^(n-1) X^(k i) Y^(k j); extracting the
            // constant X term of the product shifts the lookup to (-k i, -k j).
            let rest = product(p, &t.factors, Some(k));
            let scale = t.weight * n as f64;
            for i in 0..=p.memory() {
                for j in 0..copies {
                    grad[i * copies + j] += scale * rest.at(-k * i as i64, -k * j as i64);
                }
            }
        }
    }
    grad
}

pub fn objective_n6(p: &ProbDistMatrix, gamma: usize, kappa: usize) -> f64 {
    objective_value(p, gamma, kappa, Objective::Cycle6, false)
}

pub fn objective_n8(p: &ProbDistMatrix, gamma: usize, kappa: usize, include_w1: bool) -> f64 {
    objective_value(p, gamma, kappa, Objective::Cycle8, include_w1)
}

pub fn gradient_n6(p: &ProbDistMatrix, gamma: usize, kappa: usize) -> Vec<f64> {
    objective_gradient(p, gamma, kappa, Objective::Cycle6, false)
}

pub fn gradient_n8(p: &ProbDistMatrix, gamma: usize, kappa: usize, include_w1: bool) -> Vec<f64> {
    objective_gradient(p, gamma, kappa, Objective::Cycle8, include_w1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{conv, mirror, square_grid, CoeffGrid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_dist(rng: &mut ChaCha8Rng, memory: usize, copies: usize) -> ProbDistMatrix {
        let raw: Vec<Vec<f64>> = (0..=memory)
            .map(|_| (0..copies).map(|_| rng.random_range(0.05..1.0)).collect())
            .collect();
        ProbDistMatrix::from_weights(&raw).unwrap()
    }

    fn grid_of(p: &ProbDistMatrix) -> CoeffGrid {
        CoeffGrid::from_rows(&p.to_rows()).unwrap()
    }

    /// Coefficient extraction through the general grid arithmetic.
    fn via_grids(p: &ProbDistMatrix, factors: &[(i64, usize)]) -> f64 {
        let f = grid_of(p);
        let fbar = mirror(&f);
        let f2 = square_grid(&f);
        let f2bar = mirror(&f2);
        let mut parts = Vec::new();
        for &(k, n) in factors {
            let g = match k {
                1 => &f,
                -1 => &fbar,
                2 => &f2,
                _ => &f2bar,
            };
            parts.extend(std::iter::repeat_n(g, n));
        }
        conv(&parts).unwrap().sum_x_row_mod(0, p.copies())
    }

    /// Exhaustive sum over exponent tuples: every factor picks an entry
    /// `(i, j)` and contributes `k i`, `k j` to the total degree.
    fn tuple_sum(p: &ProbDistMatrix, factors: &[(i64, usize)]) -> f64 {
        let ks: Vec<i64> = factors.iter().flat_map(|&(k, n)| std::iter::repeat_n(k, n)).collect();
        let cells: Vec<(i64, i64, f64)> = (0..=p.memory())
            .flat_map(|i| (0..p.copies()).map(move |j| (i, j)))
            .map(|(i, j)| (i as i64, j as i64, p.get(i, j)))
            .collect();
        let mut total = 0.0;
        let mut idx = vec![0usize; ks.len()];
        loop {
            let (mut x, mut y, mut w) = (0i64, 0i64, 1.0);
            for (&k, &c) in ks.iter().zip(&idx) {
                x += k * cells[c].0;
                y += k * cells[c].1;
                w *= cells[c].2;
            }
            if x == 0 && y.rem_euclid(p.copies() as i64) == 0 {
                total += w;
            }
            let mut pos = 0;
            loop {
                if pos == idx.len() {
                    return total;
                }
                idx[pos] += 1;
                if idx[pos] < cells.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    }

    #[test]
    fn constant_distribution_counts_every_candidate() {
        let p = ProbDistMatrix::from_rows(&[vec![1.0]], vec![1.0]).unwrap();
        assert_eq!(objective_n6(&p, 3, 17), 6.0 * 680.0);
        let w = Cycle8Weights::new(3, 17);
        assert_eq!(objective_n8(&p, 3, 17, true), w.w1 + w.w2 + w.w3 + w.w4);
        assert_eq!(objective_n8(&p, 3, 17, false), w.w2 + w.w3 + w.w4);
        assert_eq!(gradient_n6(&p, 3, 17), vec![36.0 * 680.0]);
        // A circulant met twice contributes one probability factor, so the
        // three families are homogeneous of degree 6, 7 and 8.
        assert_eq!(gradient_n8(&p, 3, 17, false), vec![6.0 * w.w2 + 7.0 * w.w3 + 8.0 * w.w4]);
    }

    #[test]
    fn weights_for_small_bases() {
        let w = Cycle8Weights::new(3, 5);
        assert_eq!((w.w1, w.w2, w.w3, w.w4), (30.0, 120.0, 180.0, 270.0));
        let w = Cycle8Weights::new(4, 4);
        assert_eq!(w.w4, 6.0 * 6.0 + 6.0 * 6.0 + 36.0 * 4.0 + 36.0 * 4.0 + 72.0);
    }

    #[test]
    fn folded_products_match_tuple_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (memory, copies) in [(1, 2), (2, 2)] {
            let p = random_dist(&mut rng, memory, copies);
            let g6 = cycle6_weight(3, 5);
            let oracle6 = g6 * tuple_sum(&p, &[(1, 3), (-1, 3)]);
            assert!((objective_n6(&p, 3, 5) - oracle6).abs() < 1e-10 * oracle6.max(1.0));
            let w = Cycle8Weights::new(3, 5);
            let oracle8 = w.w1 * tuple_sum(&p, &[(2, 2), (-2, 2)])
                + w.w2 * tuple_sum(&p, &[(2, 1), (-2, 1), (1, 2), (-1, 2)])
                + w.w3 * tuple_sum(&p, &[(2, 1), (1, 2), (-1, 4)])
                + w.w4 * tuple_sum(&p, &[(1, 4), (-1, 4)]);
            let got = objective_n8(&p, 3, 5, true);
            assert!((got - oracle8).abs() < 1e-10 * oracle8, "{got} vs {oracle8}");
        }
    }

    #[test]
    fn folded_products_match_grid_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (memory, copies) in [(2, 3), (3, 4), (9, 9)] {
            let p = random_dist(&mut rng, memory, copies);
            for t in terms(Objective::Cycle8, 4, 9, true).iter().chain(&terms(Objective::Cycle6, 3, 7, false)) {
                let a = product(&p, &t.factors, None).at(0, 0);
                let b = via_grids(&p, &t.factors);
                assert!((a - b).abs() < 1e-13, "{a} vs {b}");
            }
        }
    }

    /// The fixed index arithmetic of the reference loop over the raw
    /// convolution arrays: `conv(P,P,P,P~,P~,P~)` row `3m`, columns `i` with
    /// `(i + 3 - 3M) = 0 mod M`, and the gradient read from
    /// `conv(P,P,P,P~,P~)[i+2m][b+j+2M-2]`.
    #[test]
    fn literal_index_constants_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (gamma, kappa) = (3, 7);
        for (memory, copies) in [(1, 2), (2, 3), (3, 4)] {
            let p = random_dist(&mut rng, memory, copies);
            let f = grid_of(&p);
            let fb = mirror(&f);
            let six = conv(&[&f, &f, &f, &fb, &fb, &fb]).unwrap();
            let mm = copies as i64;
            let value: f64 = (0..six.cols())
                .filter(|&i| (i as i64 + 3 - 3 * mm).rem_euclid(mm) == 0)
                .map(|i| six.get(3 * memory, i))
                .sum();
            let n6 = cycle6_weight(gamma, kappa) * value;
            assert!((n6 - objective_n6(&p, gamma, kappa)).abs() < 1e-10 * n6);

            let five = conv(&[&f, &f, &f, &fb, &fb]).unwrap();
            let grad = gradient_n6(&p, gamma, kappa);
            for i in 0..=memory {
                for j in 0..copies {
                    let jj = j as i64;
                    let mut s = 0.0;
                    for b in (2 - 2 * mm - jj)..(3 * mm - 2 - jj) {
                        if b.rem_euclid(mm) == 0 {
                            let col = b + jj + 2 * mm - 2;
                            if col >= 0 && (col as usize) < five.cols() {
                                s += five.get(i + 2 * memory, col as usize);
                            }
                        }
                    }
                    let lit = 36.0 * binomial(gamma, 3) * binomial(kappa, 3) * s;
                    let got = grad[i * copies + j];
                    assert!((lit - got).abs() < 1e-10 * got.abs().max(1.0), "{lit} vs {got}");
                }
            }
        }
    }

    #[test]
    fn identical_columns_get_identical_gradients() {
        let rows = vec![vec![0.2, 0.1, 0.1], vec![0.3, 0.15, 0.15]];
        let p = ProbDistMatrix::from_rows(&rows, vec![0.4, 0.6]).unwrap();
        for g in [gradient_n6(&p, 3, 7), gradient_n8(&p, 3, 7, false)] {
            for i in 0..2 {
                assert!((g[i * 3 + 1] - g[i * 3 + 2]).abs() < 1e-12);
            }
        }
    }

    /// Straight polynomial in `X` alone, independent of the folding code.
    fn one_dim_n6(p: &[f64], gamma: usize, kappa: usize) -> f64 {
        let m = p.len() - 1;
        let mut cube = vec![0.0; 3 * m + 1];
        for a in 0..=m {
            for b in 0..=m {
                for c in 0..=m {
                    cube[a + b + c] += p[a] * p[b] * p[c];
                }
            }
        }
        cycle6_weight(gamma, kappa) * cube.iter().map(|v| v * v).sum::<f64>()
    }

    #[test]
    fn single_copy_matches_one_dimensional_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let memory = rng.random_range(1..6);
            let p = random_dist(&mut rng, memory, 1);
            let col: Vec<f64> = p.as_slice().to_vec();
            let a = objective_n6(&p, 3, 11);
            let b = one_dim_n6(&col, 3, 11);
            assert!((a - b).abs() < 1e-12 * b);
        }
    }
}
