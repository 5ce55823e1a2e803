//! Property tests for the numeric kernels.

use proptest::prelude::*;
use sipde::problem::{build_grid, discrete_norms};
use sipde::linalg::{factor_shifted, factor_shifted_with, SolveStrategy};
use sipde::spatial::diffusion_matrix;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // l1 <= L * linf and l2^2 <= L * linf^2 for any nonempty vector.
    #[test]
    fn norm_sanity(values in prop::collection::vec(-1e6f64..1e6, 1..200), dx in 1e-6f64..1e3) {
        let n = discrete_norms(&values, dx).unwrap();
        let length = dx * values.len() as f64;
        prop_assert!(n.l1 <= length * n.linf * (1.0 + 1e-12));
        prop_assert!(n.l2 * n.l2 <= length * n.linf * n.linf * (1.0 + 1e-12));
        prop_assert!(n.l1 >= 0.0 && n.l2 >= 0.0 && n.linf >= 0.0);
    }

    // Manufactured round trip through the cyclic-banded SMW factorization,
    // and agreement with the dense path.
    #[test]
    fn shifted_solve_round_trip(
        seed_coefs in prop::collection::vec(0.5f64..3.0, 48),
        x_true in prop::collection::vec(-1.0f64..1.0, 48),
        c in -0.5f64..0.5,
    ) {
        let grid = build_grid(-1.0, 1.0, 48).unwrap();
        let b = diffusion_matrix(&grid, &seed_coefs, 4).unwrap();
        let bx = b.matvec(&x_true);
        let rhs: Vec<f64> = (0..48).map(|i| x_true[i] - c * bx[i]).collect();

        let fast = factor_shifted(&b, c).unwrap();
        let x = fast.solve(&rhs).unwrap();
        let scale = x_true.iter().fold(1e-12f64, |m, v| m.max(v.abs()));
        for i in 0..48 {
            prop_assert!((x[i] - x_true[i]).abs() < 1e-9 * scale, "i = {i}");
        }

        let dense = factor_shifted_with(&b, c, SolveStrategy::Dense).unwrap();
        let xd = dense.solve(&rhs).unwrap();
        for i in 0..48 {
            prop_assert!((x[i] - xd[i]).abs() < 1e-9 * scale.max(xd[i].abs()));
        }
    }
}
