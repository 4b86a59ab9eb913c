use proptest::prelude::*;
use wfk::matrix::{frobenius_distance, inverse, mat_mul, solve_linear, CMatrix, C64};

fn entry() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(entry(), rows * cols)
        .prop_map(move |d| CMatrix::from_vec(rows, cols, d).unwrap())
}

/// Diagonally dominant, hence well conditioned.
fn well_conditioned(n: usize) -> impl Strategy<Value = CMatrix> {
    matrix(n, n).prop_map(move |mut m| {
        for i in 0..n {
            m[(i, i)] += C64::new(2.0 * n as f64, 0.0);
        }
        m
    })
}

fn triple() -> impl Strategy<Value = (CMatrix, CMatrix, CMatrix)> {
    (1usize..6, 1usize..6, 1usize..6, 1usize..6)
        .prop_flat_map(|(a, b, c, d)| (matrix(a, b), matrix(b, c), matrix(c, d)))
}

proptest! {
    #[test]
    fn product_is_associative((a, b, c) in triple()) {
        let left = mat_mul(&mat_mul(&a, &b).unwrap(), &c).unwrap();
        let right = mat_mul(&a, &mat_mul(&b, &c).unwrap()).unwrap();
        prop_assert!(frobenius_distance(&left, &right).unwrap() <= 1e-12);
    }

    #[test]
    fn adjoint_reverses_products((a, b, _) in triple()) {
        let lhs = mat_mul(&a, &b).unwrap().adjoint();
        let rhs = mat_mul(&b.adjoint(), &a.adjoint()).unwrap();
        prop_assert!(frobenius_distance(&lhs, &rhs).unwrap() <= 1e-13);
    }

    #[test]
    fn solve_recovers_the_right_hand_side(
        (a, x) in (1usize..8, 1usize..4).prop_flat_map(|(n, k)| (well_conditioned(n), matrix(n, k)))
    ) {
        let b = mat_mul(&a, &x).unwrap();
        let got = solve_linear(&a, &b).unwrap();
        prop_assert!(frobenius_distance(&got, &x).unwrap() <= 1e-9);
    }

    #[test]
    fn inverse_is_two_sided(a in (1usize..7).prop_flat_map(well_conditioned)) {
        let inv = inverse(&a).unwrap();
        let id = CMatrix::identity(a.rows());
        prop_assert!(frobenius_distance(&mat_mul(&a, &inv).unwrap(), &id).unwrap() <= 1e-12);
        prop_assert!(frobenius_distance(&mat_mul(&inv, &a).unwrap(), &id).unwrap() <= 1e-12);
    }

    #[test]
    fn adjoint_is_an_involution(a in (1usize..6, 1usize..6).prop_flat_map(|(r, c)| matrix(r, c))) {
        prop_assert_eq!(a.adjoint().adjoint(), a);
    }
}

#[test]
fn rank_deficient_matrix_is_singular() {
    let a = CMatrix::from_real_rows(&[[1., 2., 3.], [2., 4., 6.], [0., 1., 1.]]);
    assert!(matches!(
        solve_linear(&a, &CMatrix::identity(3)),
        Err(wfk::Error::Singular { .. })
    ));
}
