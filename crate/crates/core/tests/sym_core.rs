mod common;

use common::oracle::{self, JacobiSvd};
use common::*;
use proptest::prelude::*;
use symsplit::centro::{
    check_det_identity, decompose_solution, gram_split_check, norm_identity, recombine_solution,
    reconstruct_matrix, split_matrix, split_rhs, split_system, symmetrize, verify_symmetry,
    CentroSymmetricSystem, SolutionPair,
};
use symsplit::example1 as ex;
use symsplit::{pseudo_solve_dense, solve_split, Matrix, Method, SolveOptions};

fn extend_odd(f1: &[f64]) -> Vec<f64> {
    let mut v = f1.to_vec();
    v.extend(f1.iter().rev().map(|x| -x));
    v
}

fn extend_even(f2: &[f64]) -> Vec<f64> {
    let mut v = f2.to_vec();
    v.extend(f2.iter().rev());
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_then_reconstruct_is_identity(m in even(12), n in even(14), seed in any::<u64>()) {
        let a = random_centro(m, n, &mut rng(seed));
        let (a1, a2) = split_matrix(&a, 0.0).unwrap();
        let back = reconstruct_matrix(&a1, &a2).unwrap();
        prop_assert!(back.max_abs_diff(&a).unwrap() <= 1e-15);

        let sparse = a.to_sparse();
        let (s1, s2) = split_matrix(&sparse, 0.0).unwrap();
        prop_assert!(s1.is_sparse() && s2.is_sparse());
        prop_assert_eq!(s1.to_dense_values(), a1.to_dense_values());
        prop_assert_eq!(s2.to_dense_values(), a2.to_dense_values());
    }

    #[test]
    fn symmetrized_random_matrix_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        for (m, n) in [(6, 8), (10, 12)] {
            let raw = Matrix::from_dense(m, n, random_vec(m * n, &mut r)).unwrap();
            let a = symmetrize(&raw);
            prop_assert!(verify_symmetry(&a, 0.0).holds);
            let (a1, a2) = split_matrix(&a, 0.0).unwrap();
            prop_assert!(reconstruct_matrix(&a1, &a2).unwrap().max_abs_diff(&a).unwrap() <= 1e-15);
        }
    }

    #[test]
    fn decompose_recombine_round_trip(half in 1usize..40, seed in any::<u64>()) {
        let f = random_vec(2 * half, &mut rng(seed));
        let pair = decompose_solution(&f).unwrap();
        prop_assert!(max_abs_diff(&recombine_solution(&pair), &f) <= 1e-15);
        let id = norm_identity(&pair, &f);
        prop_assert!(id.rel_err <= 1e-13);
    }

    #[test]
    fn parity_of_branch_images(m in even(12), n in even(12), seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_centro(m, n, &mut r);
        let f = random_vec(n, &mut r);
        let pair = decompose_solution(&f).unwrap();
        let odd = a.matvec(&extend_odd(pair.f1())).unwrap();
        let even_img = a.matvec(&extend_even(pair.f2())).unwrap();
        for i in 0..m {
            prop_assert!((odd[i] + odd[m - 1 - i]).abs() <= 1e-10);
            prop_assert!((even_img[i] - even_img[m - 1 - i]).abs() <= 1e-10);
        }
    }

    #[test]
    fn split_rhs_matches_formula(half in 1usize..30, seed in any::<u64>()) {
        let p = random_vec(2 * half, &mut rng(seed));
        let (p1, p2) = split_rhs(&p).unwrap();
        let m = p.len();
        for i in 0..half {
            prop_assert_eq!(p1[i], p[i] - p[m - 1 - i]);
            prop_assert_eq!(p2[i], p[i] + p[m - 1 - i]);
        }
    }

    #[test]
    fn split_minimum_norm_matches_oracle(
        m in even(20),
        n in even(20),
        deficient in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let mut r = rng(seed);
        let a = if deficient {
            let rank = 1 + (seed as usize) % m.min(n);
            low_rank_centro(m, n, rank, &mut r)
        } else {
            random_centro(m, n, &mut r)
        };
        let p = random_vec(m, &mut r);
        let want = oracle::min_norm_solve(m, n, &a.to_dense_values(), &p);
        let sys = CentroSymmetricSystem::new(a.clone(), p.clone(), 0.0).unwrap();
        let split = solve_split(&sys, &SolveOptions::default()).unwrap();
        prop_assert!(rel_l2(&split.f, &want) <= 1e-9, "split vs oracle {}", rel_l2(&split.f, &want));
        let full = pseudo_solve_dense(&a, &p, usize::MAX).unwrap();
        prop_assert!(rel_l2(&full, &want) <= 1e-9, "full vs oracle {}", rel_l2(&full, &want));
    }

    #[test]
    fn consistent_systems_recombine_to_a_solution(m in even(20), n in even(20), seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_centro(m, n, &mut r);
        let f_true = random_vec(n, &mut r);
        let p = a.matvec(&f_true).unwrap();
        let sys = CentroSymmetricSystem::new(a, p.clone(), 0.0).unwrap();
        let tol = 1e-12;
        let opts = SolveOptions { method: Method::Cgls, max_iters: 10_000, tol, ..SolveOptions::default() };
        let rep = solve_split(&sys, &opts).unwrap();
        let split = split_system(&sys);
        let eps = rep.branches.iter().map(|b| b.residual_norm).fold(0.0, f64::max);
        let a_norm = split.a1.to_dense_values().iter().chain(&split.a2.to_dense_values()).map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(rep.residual_norm <= 2.0 * eps.max(tol * a_norm) + 1e-12, "{} vs eps {}", rep.residual_norm, eps);
    }

    #[test]
    fn gram_of_random_rectangular(m in even(20), n in even(30), seed in any::<u64>()) {
        let a = random_centro(m, n, &mut rng(seed));
        let g = gram_split_check(&a).unwrap();
        prop_assert!(g.b_symmetric);
        prop_assert!(g.max_dev1 <= 1e-10 && g.max_dev2 <= 1e-10);
    }
}

#[test]
fn determinant_identity_on_200_random_8x8() {
    let mut r = rng(8);
    for _ in 0..200 {
        let a = random_centro(8, 8, &mut r);
        let d = check_det_identity(&a).unwrap();
        assert!(d.rel_err <= 1e-8, "{d:?}");
        let independent = oracle::determinant(8, &a.to_dense_values());
        assert!((independent - d.det_a).abs() <= 1e-12 * independent.abs().max(1.0));
    }
}

#[test]
fn determinant_identity_all_even_sizes() {
    let mut r = rng(16);
    for n in (2..=16).step_by(2) {
        for _ in 0..20 {
            let d = check_det_identity(&random_centro(n, n, &mut r)).unwrap();
            assert!(d.rel_err <= 1e-8, "n = {n}: {d:?}");
        }
    }
}

#[test]
fn determinant_identity_rejects_bad_input() {
    let rect = random_centro(2, 4, &mut rng(1));
    assert!(check_det_identity(&rect).is_err());
    let skew = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap();
    assert!(check_det_identity(&skew).is_err());
}

#[test]
fn reference_solution_decomposes_to_reference_halves() {
    // The reference values are rounded to four places, so some differences
    // land exactly on the tolerance; the slack absorbs binary representation.
    let slack = 1e-12;
    let pair = decompose_solution(&ex::EXPECTED_F).unwrap();
    assert!(max_abs_diff(pair.f1(), &ex::EXPECTED_F1) <= 1e-4 + slack);
    assert!(max_abs_diff(pair.f2(), &ex::EXPECTED_F2) <= 1e-4 + slack);
    let f = recombine_solution(
        &SolutionPair::new(ex::EXPECTED_F1.to_vec(), ex::EXPECTED_F2.to_vec()).unwrap(),
    );
    assert!(max_abs_diff(&f, &ex::EXPECTED_F) <= 5e-5 + slack);
}

#[test]
fn example_singular_values_are_the_union_of_the_halves() {
    let sys = ex::system();
    let split = split_system(&sys);
    let full = JacobiSvd::new(4, 6, &sys.matrix().to_dense_values()).singular_values();
    let mut halves = JacobiSvd::new(2, 3, &split.a1.to_dense_values()).singular_values();
    halves.extend(JacobiSvd::new(2, 3, &split.a2.to_dense_values()).singular_values());
    halves.sort_by(|a, b| b.total_cmp(a));
    for (x, y) in full.iter().zip(&halves) {
        assert!((x - y).abs() <= 1e-12 * full[0], "{full:?} vs {halves:?}");
    }
}

#[test]
fn asymmetric_system_is_rejected_with_report() {
    let mut v = ex::matrix().to_dense_values();
    v[0] = 9.0;
    let a = Matrix::from_dense(4, 6, v).unwrap();
    let err = CentroSymmetricSystem::new(a, ex::rhs(), 1e-12).unwrap_err();
    match err {
        symsplit::Error::Asymmetric(report) => {
            assert_eq!(report.max_violation, 8.0);
            assert!(matches!(report.worst_index, Some((1, 1)) | Some((4, 6))));
        }
        other => panic!("unexpected error {other}"),
    }
}
