use mdsc::cycles::{brute_force_cycle_count, count_lifted_cycles, count_md_cycles, md_census};
use mdsc::grade::{force, md_grade, objective_gradient, objective_value, GradeConfig, Objective, ProbDistMatrix};
use mdsc::poly::{conv, CoeffGrid};
use mdsc::qc::{decompose_md, sum_disjoint};
use mdsc::{build_md_matrix, build_sc_matrix, CodeParams, LiftingMatrix, PartitioningMatrix, RelocationMatrix};
use proptest::prelude::*;

/// A random design small enough for the bit-level oracle.
#[derive(Debug, Clone)]
struct Design {
    params: CodeParams,
    k: PartitioningMatrix,
    lifting: LiftingMatrix,
    relocation: RelocationMatrix,
}

fn grid(raw: &[u32], params: &CodeParams, modulus: usize) -> Vec<Vec<u32>> {
    (0..params.gamma)
        .map(|i| (0..params.kappa).map(|j| raw[i * params.kappa + j] % modulus as u32).collect())
        .collect()
}

fn design(max_copies: usize) -> impl Strategy<Value = Design> {
    (
        1usize..=3,
        1usize..=5,
        2usize..=5,
        1usize..=4,
        0usize..=2,
        1usize..=max_copies,
        proptest::collection::vec(any::<u32>(), 45),
    )
        .prop_map(|(gamma, kappa, z, l, m, copies, raw)| {
            let params = CodeParams::new(gamma, kappa, z, l, m, copies).unwrap();
            let k = PartitioningMatrix::from_rows(grid(&raw, &params, m + 1), &params).unwrap();
            let lifting = LiftingMatrix::from_rows(grid(&raw[15..], &params, z), &params).unwrap();
            let relocation = RelocationMatrix::from_rows(grid(&raw[30..], &params, copies), &params).unwrap();
            Design { params, k, lifting, relocation }
        })
}

fn positive_rows(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec(0.05f64..1.0, cols), rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn lifted_count_matches_brute_force(d in design(1)) {
        let h = build_sc_matrix(&d.k, &d.lifting, &d.params).unwrap();
        for g in 2..=4 {
            let fast = count_lifted_cycles(&h, g).unwrap().total;
            prop_assert_eq!(fast, brute_force_cycle_count(&h, g).unwrap(), "g = {}", g);
        }
    }

    #[test]
    fn cycle_spans_are_bounded_by_memory(d in design(1)) {
        let h = build_sc_matrix(&d.k, &d.lifting, &d.params).unwrap();
        let m = d.params.memory;
        prop_assert!(count_lifted_cycles(&h, 3).unwrap().max_span() <= m + 1);
        prop_assert!(count_lifted_cycles(&h, 4).unwrap().max_span() <= 2 * m + 1);
    }

    #[test]
    fn force_meets_row_targets(
        rows in proptest::collection::vec(proptest::collection::vec(-1.0f64..1.0, 3), 4),
        weights in proptest::collection::vec(0.1f64..1.0, 4),
    ) {
        let total: f64 = weights.iter().sum();
        let targets: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let p = force(&rows, &targets).unwrap();
        for (i, &t) in targets.iter().enumerate() {
            prop_assert!((p.row_sum(i) - t).abs() < 1e-12);
        }
        prop_assert!(p.as_slice().iter().all(|&v| v >= 0.0));
        for objective in [Objective::Cycle6, Objective::Cycle8] {
            prop_assert!(objective_value(&p, 3, 7, objective, true) >= 0.0);
        }
    }

    #[test]
    fn convolution_commutes(a in positive_rows(3, 2), b in positive_rows(2, 4)) {
        let a = CoeffGrid::from_rows(&a).unwrap().with_offsets(-1, 0);
        let b = CoeffGrid::from_rows(&b).unwrap().with_offsets(0, -2);
        let ab = conv(&[&a, &b]).unwrap();
        let ba = conv(&[&b, &a]).unwrap();
        prop_assert_eq!(ab.offsets(), ba.offsets());
        for (x, y) in ab.to_rows().iter().flatten().zip(ba.to_rows().iter().flatten()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!((ab.total() - a.total() * b.total()).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(30))]

    #[test]
    fn md_count_matches_brute_force(d in design(3)) {
        let h = build_md_matrix(&d.k, &d.lifting, &d.relocation, &d.params).unwrap();
        for g in 2..=4 {
            let fast = count_md_cycles(&d.k, &d.lifting, &d.relocation, &d.params, g).unwrap();
            prop_assert_eq!(fast, brute_force_cycle_count(&h, g).unwrap(), "g = {}", g);
        }
    }

    #[test]
    fn md_matrix_is_block_circulant_and_decomposes(d in design(3)) {
        let p = &d.params;
        let h = build_md_matrix(&d.k, &d.lifting, &d.relocation, p).unwrap();
        let (rows, cols, copies) = (p.sc_block_rows(), p.sc_block_cols(), p.copies);
        for b in h.blocks() {
            let (r, c) = (b.row / rows, b.col / cols);
            let row = (r + 1) % copies * rows + b.row % rows;
            let col = (c + 1) % copies * cols + b.col % cols;
            prop_assert!(h.blocks().iter().any(|o| o.row == row && o.col == col && o.power == b.power));
        }
        let parts = decompose_md(&h, p);
        prop_assert_eq!(parts.len(), copies);
        let sc = build_sc_matrix(&d.k, &d.lifting, p).unwrap();
        let summed = sum_disjoint(&parts).unwrap();
        prop_assert_eq!(summed.blocks(), sc.blocks());
        let census = md_census(&d.k, &d.lifting, &d.relocation, p, 3).unwrap();
        prop_assert_eq!(census.per_span.iter().sum::<u64>(), census.total);
    }

    #[test]
    fn md_grade_never_increases_the_objective(
        weights in proptest::collection::vec(0.05f64..1.0, 2..=4),
        copies in 2usize..=4,
        kappa in 4usize..=9,
    ) {
        let total: f64 = weights.iter().sum();
        let p_star: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let params = CodeParams::new(3, kappa, 7, 20, p_star.len() - 1, copies).unwrap();
        let cfg = GradeConfig { density_cap: 30.0, max_iters: 2000, ..GradeConfig::default() };
        let out = md_grade(&params, &p_star, &cfg).unwrap();
        prop_assert!(out.objective_value <= out.initial_objective + 1e-12);
    }
}

/// Central differences of the objective polynomial against the analytic gradient.
fn check_gradient(memory: usize, copies: usize, seed: u64) {
    let mut state = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) | 1;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        0.05 + (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut rows: Vec<Vec<f64>> = (0..=memory).map(|_| (0..copies).map(|_| next()).collect()).collect();
    let total: f64 = rows.iter().flatten().sum();
    rows.iter_mut().flatten().for_each(|v| *v /= total);
    let h = 1e-6;
    for objective in [Objective::Cycle6, Objective::Cycle8] {
        let eval = |r: &[Vec<f64>]| objective_value(&ProbDistMatrix::from_raw(r).unwrap(), 3, 5, objective, true);
        let grad = objective_gradient(&ProbDistMatrix::from_raw(&rows).unwrap(), 3, 5, objective, true);
        for i in 0..=memory {
            for j in 0..copies {
                let (mut up, mut down) = (rows.clone(), rows.clone());
                up[i][j] += h;
                down[i][j] -= h;
                let fd = (eval(&up) - eval(&down)) / (2.0 * h);
                let exact = grad[i * copies + j];
                let rel = (fd - exact).abs() / exact.abs().max(1e-300);
                assert!(rel < 1e-6, "{objective:?} ({memory},{copies}) at ({i},{j}): fd {fd} vs {exact}");
            }
        }
    }
}

#[test]
fn gradient_matches_finite_differences() {
    for (memory, copies) in [(1, 2), (2, 3), (3, 4)] {
        for seed in 0..25 {
            check_gradient(memory, copies, seed);
        }
    }
}
