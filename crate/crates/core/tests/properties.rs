//! Property tests for the invariants of every module.

use proptest::prelude::*;

use intrinsic_coherence::basis_opt::{
    haar_unitary, maximize, unitarity_defect, SearchConfig, Target,
};
use intrinsic_coherence::bloch::{bloch_norm, from_bloch, to_bloch, BlochVector};
use intrinsic_coherence::infdim::{
    build_cv_grid, commutator_check, geometric_oam, p_inf_fock, p_inf_oam, thermal_fock, CvState,
};
use intrinsic_coherence::measures::{
    coherence_report, mu_n, mu_n_from_purity, p_n, pure_part_bound_check, pure_part_decomposition,
    visibility_f,
};
use intrinsic_coherence::state::{
    purity, random_state, read_state, spectral_decompose, write_state, RandomKind,
    DEFAULT_TOLERANCE,
};
use intrinsic_coherence::DensityMatrix;

fn kind() -> impl Strategy<Value = RandomKind> {
    prop_oneof![
        Just(RandomKind::HaarPure),
        Just(RandomKind::GinibreMixed),
        (1usize..4).prop_map(RandomKind::Rank),
    ]
}

fn state() -> impl Strategy<Value = DensityMatrix> {
    (2usize..8, kind(), any::<u64>()).prop_map(|(n, k, seed)| {
        let k = match k {
            RandomKind::Rank(r) => RandomKind::Rank(r.min(n)),
            other => other,
        };
        random_state(n, k, seed).unwrap()
    })
}

fn max_abs_diff(
    a: &nalgebra::DMatrix<num_complex::Complex64>,
    b: &nalgebra::DMatrix<num_complex::Complex64>,
) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn state_file_round_trip(rho in state()) {
        let back = read_state(&write_state(&rho), DEFAULT_TOLERANCE).unwrap();
        prop_assert!(max_abs_diff(back.matrix(), rho.matrix()) <= 1e-14);
    }

    #[test]
    fn spectrum_is_descending_and_reconstructs(rho in state()) {
        let spec = spectral_decompose(&rho).unwrap();
        prop_assert!(spec.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!((spec.eigenvalues.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(max_abs_diff(&spec.reconstruct(), rho.matrix()) <= 1e-10);
    }

    #[test]
    fn bloch_round_trip_and_norm(rho in state()) {
        let b = to_bloch(&rho);
        let back = from_bloch(&b).unwrap();
        prop_assert!(max_abs_diff(back.matrix(), rho.matrix()) <= 1e-12);
        prop_assert!((bloch_norm(&b) - p_n(&rho).unwrap()).abs() <= 1e-12);
        let flat = BlochVector::from_flat(rho.dim(), &b.to_flat()).unwrap();
        prop_assert_eq!(flat, b);
    }

    #[test]
    fn report_routes_agree(rho in state()) {
        let r = coherence_report(&rho).unwrap();
        prop_assert!(r.max_route_discrepancy <= 1e-9);
        prop_assert!((0.0..=1.0).contains(&r.p_n));
        prop_assert!(r.pure_part_gap >= -1e-10);
    }

    #[test]
    fn p_n_is_unitarily_invariant(rho in state(), seed in any::<u64>()) {
        let u = haar_unitary(rho.dim(), seed).unwrap();
        let rotated = u.transform(&rho).unwrap();
        prop_assert!((p_n(&rotated).unwrap() - p_n(&rho).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn mu_never_exceeds_p_n(rho in state(), seed in any::<u64>()) {
        let rotated = haar_unitary(rho.dim(), seed).unwrap().transform(&rho).unwrap();
        if let Ok(mu) = mu_n(&rotated) {
            prop_assert!(mu <= p_n(&rho).unwrap() + 1e-9);
            let alt = mu_n_from_purity(purity(&rotated), &rotated.diagonal()).unwrap();
            prop_assert!((alt - mu).abs() <= 1e-7);
        }
    }

    #[test]
    fn pure_part_identity(rho in state()) {
        let d = pure_part_decomposition(&rho).unwrap();
        let check = pure_part_bound_check(&d, p_n(&rho).unwrap());
        prop_assert!(check.bound_holds);
        prop_assert!(max_abs_diff(&d.reconstruct(), rho.matrix()) <= 1e-10);
    }

    #[test]
    fn visibility_is_scale_invariant(x in prop::collection::vec(0.0f64..1.0, 2..9), c in 0.01f64..100.0) {
        prop_assume!(x.iter().any(|&v| v > 1e-6));
        let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
        prop_assert!((visibility_f(&x).unwrap() - visibility_f(&scaled).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn haar_samples_are_unitary(n in 2usize..10, seed in any::<u64>()) {
        prop_assert!(unitarity_defect(haar_unitary(n, seed).unwrap().matrix()) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn search_stays_below_ceiling(rho in state(), seed in any::<u64>(), vis in any::<bool>()) {
        let target = if vis { Target::Visibility } else { Target::Mu };
        let config = SearchConfig::new(2_000, seed).haar_seeds_only();
        let r = maximize(&rho, target, &config).unwrap();
        prop_assert!(r.best_value <= p_n(&rho).unwrap() + 1e-9);
        prop_assert!(r.evaluations <= 2_000);
    }

    #[test]
    fn truncation_is_monotone(q in 0.05f64..0.9, nbar in 0.05f64..3.0, d in 2usize..30) {
        let small = p_inf_oam(&geometric_oam(q, d).unwrap()).unwrap();
        let large = p_inf_oam(&geometric_oam(q, 2 * d).unwrap()).unwrap();
        prop_assert!(large.value >= small.value - 1e-12);
        prop_assert!(large.value - small.value <= geometric_oam(q, d).unwrap().declared_tail_bound() + 1e-12);
        let fs = p_inf_fock(&thermal_fock(nbar, d).unwrap()).unwrap();
        let fl = p_inf_fock(&thermal_fock(nbar, 2 * d).unwrap()).unwrap();
        prop_assert!(fl.value >= fs.value - 1e-12);
    }

    #[test]
    fn cv_grid_relations(d in 4usize..40, p_max in 0.5f64..20.0, hbar in 0.1f64..3.0, x0 in -1.0f64..1.0) {
        let grid = build_cv_grid(d, p_max, hbar).unwrap();
        let rel = grid.defining_relation_residual().abs() / (2.0 * std::f64::consts::PI * hbar);
        prop_assert!(rel <= 4.0 * f64::EPSILON);
        let sigma = (grid.dx() * d as f64 / 6.0).max(grid.dx());
        let probe = CvState::gaussian(grid, sigma, x0 * grid.dx(), 0.0).unwrap();
        let c = commutator_check(&grid, &probe).unwrap();
        prop_assert!(c.trace <= 1e-10);
        prop_assert!(c.max_diagonal <= 1e-10);
    }
}
