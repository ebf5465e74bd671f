use opmeans_core::generators::{convex_log_check, dyadic_grid, Classification};
use opmeans_core::linalg::{apply_fun, congruence, congruence_spd, metric_norm, sym_eig, trace_inner, DEFAULT_EIG_TOL};
use opmeans_core::random::{random_invertible, random_spd, random_symmetric_unit, random_weights, sample_rng};
use opmeans_core::solver::critical_point_residual;
use opmeans_core::{
    geometric_mean, perspective, solve_mean, trace_objective, Generator, InitStrategy, Matrix, MeanProblem,
    SolverConfig, SymMatrix,
};
use proptest::prelude::*;

fn sym_from(n: usize, entries: &[f64]) -> SymMatrix {
    let m = Matrix::from_fn(n, |i, j| if i <= j { entries[i * n + j] } else { entries[j * n + i] });
    SymMatrix::from_matrix(m).unwrap()
}

fn symmetric() -> impl Strategy<Value = SymMatrix> {
    (1usize..=8).prop_flat_map(|n| prop::collection::vec(-10.0f64..10.0, n * n).prop_map(move |e| sym_from(n, &e)))
}

fn classified() -> impl Strategy<Value = Generator> {
    prop_oneof![
        Just(Generator::karcher()),
        (0.0f64..10.0).prop_map(|l| Generator::shifted_log(l).unwrap()),
        (0.05f64..0.95).prop_map(|p| Generator::power_convex(p).unwrap()),
        (1.0f64..=2.0).prop_map(|p| Generator::power_concave(p).unwrap()),
    ]
}

fn problem(seed: u64, g: &Generator, n: usize, k: usize) -> MeanProblem {
    let mut rng = sample_rng(seed, 0);
    let w = random_weights(&mut rng, k);
    let a = (0..k).map(|_| random_spd(&mut rng, n)).collect();
    MeanProblem::new(w, a, g.clone()).unwrap()
}

type ScalarPair = (fn(f64) -> f64, fn(f64) -> f64);

fn rel(a: &SymMatrix, b: &SymMatrix) -> f64 {
    (a - b).frobenius() / b.frobenius()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn eigen_reconstruction(a in symmetric()) {
        let e = sym_eig(&a, DEFAULT_EIG_TOL).unwrap();
        let scale = 1.0 + a.max_abs();
        prop_assert!(e.reconstruct().max_abs_diff(&a) <= 1e-10 * scale);
        let q = e.q();
        let qtq = &q.transpose() * q;
        prop_assert!(qtq.max_abs_diff(&Matrix::identity(a.dim())) <= 1e-12);
        prop_assert!(e.eigenvalues().windows(2).all(|w| w[0] >= w[1]));
        let trace: f64 = e.eigenvalues().iter().sum();
        prop_assert!((trace - a.trace()).abs() <= 1e-10 * scale * a.dim() as f64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn functional_calculus_is_multiplicative(seed in any::<u64>(), n in 1usize..=6) {
        let a = random_spd(&mut sample_rng(seed, 0), n);
        let pairs: [ScalarPair; 3] =
            [(f64::ln, f64::sqrt), (|t| t * t, |t| 1.0 / t), (|t| t / (1.0 + t), |t| 1.0 + t)];
        for (h1, h2) in pairs {
            let product = apply_fun(&a, h1).unwrap().as_matrix() * apply_fun(&a, h2).unwrap().as_matrix();
            let direct = apply_fun(&a, |t| h1(t) * h2(t)).unwrap();
            prop_assert!(product.max_abs_diff(direct.as_matrix()) <= 1e-9 * (1.0 + direct.max_abs()));
        }
    }

    #[test]
    fn congruence_round_trip(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = sample_rng(seed, 0);
        let a = random_spd(&mut rng, n);
        let c = random_invertible(&mut rng, n, 100.0);
        let inv = c.inverse().unwrap();
        let back = congruence(&c, &congruence(&inv, a.as_sym()).unwrap()).unwrap();
        prop_assert!(rel(&back, a.as_sym()) <= 1e-8);
    }

    #[test]
    fn trace_inner_is_bilinear_and_positive(seed in any::<u64>(), n in 1usize..=6, s in -5.0f64..5.0, t in -5.0f64..5.0) {
        let mut rng = sample_rng(seed, 0);
        let x = random_spd(&mut rng, n);
        let (u, v, w) = (random_symmetric_unit(&mut rng, n), random_symmetric_unit(&mut rng, n), random_symmetric_unit(&mut rng, n));
        let combo = &u.scale(s) + &v.scale(t);
        let lhs = trace_inner(&x, &combo, &w);
        let rhs = s * trace_inner(&x, &u, &w) + t * trace_inner(&x, &v, &w);
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale);
        prop_assert!((trace_inner(&x, &u, &w) - trace_inner(&x, &w, &u)).abs() <= 1e-10 * scale);
        let uu = trace_inner(&x, &u, &u);
        prop_assert!(uu > 0.0);
        prop_assert!((metric_norm(&x, &u).powi(2) - uu).abs() <= 1e-10 * (1.0 + uu));
    }

    /// `g(t) = −Φ'(log t)` for a convex piecewise-linear `Φ` through the origin.
    #[test]
    fn convex_spline_gives_non_increasing_g(
        mut knots in prop::collection::vec(-8.0f64..8.0, 1..8),
        mut slopes in prop::collection::vec(-5.0f64..5.0, 2..9),
    ) {
        knots.sort_by(f64::total_cmp);
        slopes.sort_by(f64::total_cmp);
        slopes.truncate(knots.len() + 1);
        while slopes.len() < knots.len() + 1 {
            slopes.push(*slopes.last().unwrap());
        }
        let slope_at = |x: f64| slopes[knots.iter().take_while(|&&k| k < x).count()];
        let phi = |x: f64| {
            // Integral of the slope function from 0 to x.
            let (lo, hi, sign) = if x >= 0.0 { (0.0, x, 1.0) } else { (x, 0.0, -1.0) };
            let mut points = vec![lo];
            points.extend(knots.iter().copied().filter(|&k| k > lo && k < hi));
            points.push(hi);
            sign * points.windows(2).map(|w| slope_at(0.5 * (w[0] + w[1])) * (w[1] - w[0])).sum::<f64>()
        };
        let g = |t: f64| -slope_at(t.ln());
        let grid = dyadic_grid();
        prop_assert!(grid.windows(2).all(|w| g(w[1]) <= g(w[0])));
        let report = convex_log_check(&|t: f64| phi(t.ln()), 200, 7);
        prop_assert_eq!(report.violations, 0);
    }

    #[test]
    fn registry_transform_consistency(g in classified()) {
        if let Some(r) = g.transform_residual() {
            prop_assert!(r <= 1e-9, "{} residual {}", g.name(), r);
        }
        prop_assert!(g.g(1.0).abs() <= 1e-12);
        let grid = dyadic_grid();
        prop_assert!(grid.windows(2).all(|w| g.g(w[1]) < g.g(w[0])));
    }

    #[test]
    fn perspective_is_congruence_invariant(g in classified(), seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = sample_rng(seed, 0);
        let a = random_spd(&mut rng, n);
        let x = random_spd(&mut rng, n);
        let c = random_invertible(&mut rng, n, 100.0);
        let moved = perspective(&g, &congruence_spd(&c, &a).unwrap(), &congruence_spd(&c, &x).unwrap()).unwrap();
        let expected = congruence(&c, &perspective(&g, &a, &x).unwrap()).unwrap();
        prop_assert!((&moved - &expected).frobenius() <= 1e-7 * (1.0 + expected.frobenius()));
    }

    #[test]
    fn geodesic_convexity_of_objective(g in classified(), seed in any::<u64>(), n in 1usize..=4, k in 1usize..=3, p in 0.0f64..=1.0) {
        let problem = problem(seed, &g, n, k);
        let mut rng = sample_rng(seed, 1);
        let (x, y) = (random_spd(&mut rng, n), random_spd(&mut rng, n));
        let lhs = trace_objective(&problem, &geometric_mean(&x, &y, p).unwrap()).unwrap();
        let rhs = p * trace_objective(&problem, &x).unwrap() + (1.0 - p) * trace_objective(&problem, &y).unwrap();
        prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn converged_solution_is_a_critical_point(g in classified(), seed in any::<u64>(), n in 1usize..=4, k in 1usize..=4) {
        let problem = problem(seed, &g, n, k);
        let config = SolverConfig::default();
        let report = solve_mean(&problem, &config).unwrap();
        prop_assert!(report.converged, "{:?}", report.termination);
        let residual = critical_point_residual(&problem, &report.solution).unwrap();
        prop_assert!(residual.frobenius() <= config.grad_tol * (1.0 + report.solution.frobenius()));
    }

    #[test]
    fn solution_does_not_depend_on_start(g in classified(), seed in any::<u64>(), n in 1usize..=4, k in 2usize..=4) {
        let problem = problem(seed, &g, n, k);
        let a = solve_mean(&problem, &SolverConfig::default()).unwrap();
        let b = solve_mean(&problem, &SolverConfig::default().with_init(InitStrategy::LogEuclidean)).unwrap();
        prop_assert!(a.converged && b.converged);
        prop_assert!(rel(a.solution.as_sym(), b.solution.as_sym()) <= 1e-7);
    }

    #[test]
    fn objective_does_not_increase(g in classified(), seed in any::<u64>(), n in 1usize..=4, k in 2usize..=4) {
        let problem = problem(seed, &g, n, k);
        let report = solve_mean(&problem, &SolverConfig::default()).unwrap();
        let values = report.objective_values.unwrap();
        prop_assert_eq!(values.len(), report.iterations + 1);
        for w in values.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-10 * (1.0 + w[0].abs()), "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn identical_inputs_are_fixed(g in classified(), seed in any::<u64>(), n in 1usize..=4, k in 1usize..=4) {
        let a = random_spd(&mut sample_rng(seed, 0), n);
        let w = random_weights(&mut sample_rng(seed, 1), k);
        let problem = MeanProblem::new(w, vec![a.clone(); k], g).unwrap();
        let report = solve_mean(&problem, &SolverConfig::default()).unwrap();
        prop_assert!(report.solution.rel_diff(&a) <= 1e-12);
        prop_assert!(report.iterations <= 1);
    }

    #[test]
    fn unclassified_generators_still_solve(seed in any::<u64>(), n in 1usize..=3, k in 1usize..=3) {
        // g(t) = 1 − t³ is decreasing but not in the registry.
        let g = Generator::custom_from_g("cubic", std::sync::Arc::new(|t: f64| 1.0 - t * t * t), Classification::Unclassified).unwrap();
        let problem = problem(seed, &g, n, k);
        let report = solve_mean(&problem, &SolverConfig::default()).unwrap();
        prop_assert!(report.converged, "{:?}", report.termination);
        prop_assert!(report.bounds.is_none());
    }
}
