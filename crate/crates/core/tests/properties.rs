use std::f64::consts::PI;

use dirac_nu::nu_core::k_candidates;
use dirac_nu::oracle::{discretize, lowest_eigenvalues};
use dirac_nu::potentials::{centrifugal_approx, PotentialSpec};
use dirac_nu::reduction::{reduce, QuantumNumbers, ReducedProblem, SymmetryCase};
use dirac_nu::wavefunctions::{jacobi, jacobi_derivative, JacobiParams};
use proptest::prelude::*;

fn potential() -> impl Strategy<Value = PotentialSpec> {
    prop_oneof![
        (0.01f64..2.0, 0.01f64..2.0, 0.005f64..0.5).prop_map(|(a, b, beta)| PotentialSpec::hellmann(a, b, beta).unwrap()),
        (1e-4f64..1.0, 0.05f64..0.9, 0.005f64..0.5)
            .prop_map(|(d, a, beta)| PotentialSpec::wei_hua(d, a, beta).unwrap()),
        (0.01f64..2.0, 0.01f64..2.0, 0.001f64..0.5).prop_map(|(a, b, beta)| PotentialSpec::varshni(a, b, beta).unwrap()),
    ]
}

fn symmetry() -> impl Strategy<Value = SymmetryCase> {
    (any::<bool>(), 0.5f64..20.0, 0.0f64..20.0).prop_map(|(spin, m, c)| {
        if spin {
            SymmetryCase::spin(c, m).unwrap()
        } else {
            SymmetryCase::pseudospin(c, m).unwrap()
        }
    })
}

fn quantum_numbers() -> impl Strategy<Value = QuantumNumbers> {
    (0u32..6, prop_oneof![-6i32..=-1, 1i32..=6])
        .prop_filter_map("n + kappa = 0", |(n, k)| QuantumNumbers::new(n, k).ok())
}

fn problem() -> impl Strategy<Value = ReducedProblem> {
    (potential(), symmetry(), quantum_numbers()).prop_map(|(p, s, qn)| reduce(p, s, qn))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn k_roots_make_the_root_a_perfect_square(reduced in problem(), eps in -1.0f64..1.0) {
        let problem = reduced.nu_problem(eps);
        for k in k_candidates(&problem) {
            let u = problem.under_root(k);
            let scale = u.max_abs_coefficient().max(1.0);
            let disc = u.c1 * u.c1 - 4.0 * u.c0 * u.c2;
            prop_assert!(disc.abs() <= 1e-9 * scale * scale, "k {k}: {u}");
        }
    }

    #[test]
    fn jacobi_derivative_matches_difference_quotient(
        n in 0u32..=8,
        p in -0.9f64..6.0,
        q in -0.9f64..6.0,
        x in -0.95f64..0.95,
    ) {
        let params = JacobiParams::new(n, p, q);
        let central = |h: f64| (jacobi(params, x + h) - jacobi(params, x - h)) / (2.0 * h);
        let fd = (4.0 * central(5e-4) - central(1e-3)) / 3.0;
        let exact = jacobi_derivative(params, x);
        let scale = exact.abs().max(jacobi(params, x).abs()).max(1.0);
        prop_assert!((fd - exact).abs() <= 1e-7 * scale, "{fd} vs {exact}");
    }

    #[test]
    fn jacobi_reflection(n in 0u32..=10, p in -0.9f64..5.0, q in -0.9f64..5.0, x in -1.0f64..1.0) {
        let lhs = jacobi(JacobiParams::new(n, p, q), x);
        let rhs = if n % 2 == 0 { 1.0 } else { -1.0 } * jacobi(JacobiParams::new(n, q, p), -x);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn centrifugal_approximation_is_first_order(beta in 0.001f64..1.0, x in 1e-4f64..0.5) {
        let r = x / beta;
        let rel = (centrifugal_approx(beta, r) * r * r - 1.0).abs();
        prop_assert!(rel <= 1.5 * x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn coefficient_sum_does_not_depend_on_epsilon(reduced in problem(), e1 in -1.0f64..1.0, e2 in -1.0f64..1.0) {
        let b2 = reduced.beta() * reduced.beta();
        let offset = reduced.coefficient_sum_offset();
        for eps in [e1, e2] {
            let c = reduced.coefficients(eps);
            let expected = reduced.kappa_factor + offset;
            // each coefficient is O(|eps| / beta^2); the sum cancels that scale
            let scale = (1.0 + eps.abs()) / b2 + expected.abs();
            prop_assert!((c.sum() - expected).abs() <= 1e-12 * scale, "{} vs {expected}", c.sum());
        }
    }

    #[test]
    fn energy_map_round_trips(reduced in problem(), eps in -50.0f64..50.0) {
        if let Ok((lo, hi)) = reduced.epsilon_to_energy(eps) {
            for e in [lo, hi] {
                let back = reduced.energy_to_epsilon(e);
                let scale = e * e + reduced.symmetry.mass().powi(2) + reduced.symmetry.constant().powi(2);
                prop_assert!((back - eps).abs() <= 1e-12 * scale, "{back} vs {eps}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sturm_count_matches_free_particle_spectrum(points in 5usize..200, length in 0.5f64..20.0, t in 0.0f64..1.0) {
        let system = discretize(|_| 0.0, 0.0, length, points).unwrap();
        let h = system.h;
        let exact: Vec<f64> = (1..=points)
            .map(|k| 2.0 / (h * h) * (1.0 - (k as f64 * PI / (points + 1) as f64).cos()))
            .collect();
        let shift = t * 4.0 / (h * h);
        let gap = exact.iter().map(|e| (e - shift).abs()).fold(f64::INFINITY, f64::min);
        prop_assume!(gap > 1e-9 / (h * h));
        let below = exact.iter().filter(|&&e| e < shift).count();
        prop_assert_eq!(system.sturm_count(shift), below);
    }

    #[test]
    fn constant_shift_moves_every_eigenvalue(c in -50.0f64..50.0, w in 0.1f64..5.0, points in 50usize..300) {
        let u = |r: f64| w * w * (r - 5.0) * (r - 5.0);
        let base = lowest_eigenvalues(&discretize(u, 0.0, 10.0, points).unwrap(), 5);
        let shifted = lowest_eigenvalues(&discretize(|r| u(r) + c, 0.0, 10.0, points).unwrap(), 5);
        for (a, b) in base.iter().zip(&shifted) {
            prop_assert!((b - a - c).abs() <= 1e-9 * (1.0 + a.abs() + b.abs()), "{a} {b}");
        }
    }
}
