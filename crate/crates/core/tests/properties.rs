use approx::assert_relative_eq;
use proptest::prelude::*;

use hr_sync::dynamics::full_rhs;
use hr_sync::grid::{helmholtz_apply, helmholtz_solve, l2_inner, laplacian_apply};
use hr_sync::model::compute_lambda;
use hr_sync::{
    compute_delta_mu, compute_sync_threshold, make_grid, parse_run_config, Grid, PairState,
    Parameters, Preset, RunConfig, ScalarField,
};

fn grid_and_fields(count: usize) -> impl Strategy<Value = (Grid, Vec<ScalarField>)> {
    (1usize..=2, 3usize..12, 0.5f64..3.0).prop_flat_map(move |(dim, n, len)| {
        let grid = make_grid(dim, n, len).unwrap();
        let nodes = grid.len();
        proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, nodes), count)
            .prop_map(move |fields| (grid, fields.into_iter().map(ScalarField::new).collect()))
    })
}

fn params() -> impl Strategy<Value = Parameters> {
    (
        0.0f64..4.0,
        0.2f64..4.0,
        0.0f64..4.0,
        0.1f64..5.0,
        0.0f64..30.0,
        1e-3f64..2.0,
        0.0f64..20.0,
    )
        .prop_map(|(a, b, alpha, beta, q, r, p)| Parameters {
            a,
            b,
            alpha,
            beta,
            q,
            r,
            p,
            ..Parameters::test_set()
        })
}

proptest! {
    #[test]
    fn laplacian_is_linear((grid, f) in grid_and_fields(2), s in -3.0f64..3.0) {
        let combo = f[0].axpy(s, &f[1]);
        let lhs = laplacian_apply(&grid, &combo).unwrap();
        let rhs = laplacian_apply(&grid, &f[0]).unwrap().axpy(s, &laplacian_apply(&grid, &f[1]).unwrap());
        let scale = 1.0 + rhs.max_abs();
        prop_assert!(lhs.axpy(-1.0, &rhs).max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn laplacian_is_symmetric_and_nonpositive((grid, f) in grid_and_fields(2)) {
        let lf = laplacian_apply(&grid, &f[0]).unwrap();
        let lg = laplacian_apply(&grid, &f[1]).unwrap();
        let a = l2_inner(&grid, &lf, &f[1]).unwrap();
        let b = l2_inner(&grid, &f[0], &lg).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        prop_assert!(l2_inner(&grid, &lf, &f[0]).unwrap() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn laplacian_conserves_the_mean((grid, f) in grid_and_fields(1)) {
        let lf = laplacian_apply(&grid, &f[0]).unwrap();
        let total = l2_inner(&grid, &lf, &grid.constant(1.0)).unwrap();
        prop_assert!(total.abs() <= 1e-9 * (1.0 + lf.max_abs()));
    }

    #[test]
    fn helmholtz_solve_inverts_apply((grid, f) in grid_and_fields(1), gamma in 0.0f64..0.5) {
        let rhs = helmholtz_apply(&grid, gamma, &f[0]).unwrap();
        let x = helmholtz_solve(&grid, gamma, &rhs).unwrap();
        prop_assert!(x.axpy(-1.0, &f[0]).max_abs() <= 1e-6 * (1.0 + f[0].max_abs()));
    }

    #[test]
    fn threshold_identity(p in params()) {
        let lambda = compute_lambda(&p);
        let p_star = compute_sync_threshold(&p).unwrap();
        let offset = 2.0 * lambda * lambda + 4.0 * lambda * p.a * p.a / p.b + (p.q - lambda).powi(2) / p.r;
        assert_relative_eq!(4.0 * p_star * lambda, offset, max_relative = 1e-12);
    }

    #[test]
    fn delta_has_slope_four_lambda(p in params(), step in 0.1f64..10.0) {
        let lambda = compute_lambda(&p);
        let p_star = compute_sync_threshold(&p).unwrap();
        let d1 = compute_delta_mu(&p, p_star + step).unwrap();
        let d2 = compute_delta_mu(&p, p_star + 2.0 * step).unwrap();
        assert_relative_eq!(d2.delta - d1.delta, 4.0 * lambda * step, max_relative = 1e-9, epsilon = 1e-9);
        prop_assert!(d1.mu <= p.r && d1.mu > 0.0);
        prop_assert!(compute_delta_mu(&p, p_star * (1.0 - 1e-9)).is_err());
    }

    #[test]
    fn neuron_swap_commutes_with_the_vector_field((grid, f) in grid_and_fields(6), p in params()) {
        let s = PairState::from_fields([0, 1, 2, 3, 4, 5].map(|i| f[i].clone()));
        let a = full_rhs(&grid, &p, &s.swapped()).unwrap();
        let b = full_rhs(&grid, &p, &s).unwrap().swapped();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn config_echo_round_trips(
        d in 0.01f64..1.0,
        p in 0.0f64..10.0,
        points in 3usize..200,
        seed in any::<u64>(),
        dt in 1e-5f64..1e-1,
    ) {
        let mut cfg = RunConfig::from_preset(Preset::Test);
        cfg.params.d = d;
        cfg.params.p = p;
        cfg.grid.points = points;
        cfg.initial.seed = seed;
        cfg.stepper.dt = dt;
        let parsed = parse_run_config(&cfg.to_config_string()).unwrap();
        prop_assert_eq!(parsed, cfg);
    }
}
