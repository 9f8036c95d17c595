use approx::assert_abs_diff_eq;

use qfc_core::correlations::{
    lift_a, q_ah, q_api, q_pure_closed_form, total_local_qfi_b, total_mfi, LocalProjectorQfi, ObservableBasis,
};
use qfc_core::discord::{entropic_discord, geometric_discord, geometric_discord_optimized, von_neumann_entropy, Method};
use qfc_core::fisher::{qfi, Observable};
use qfc_core::linalg::{self, CMatrix, Party};
use qfc_core::optimizer::OptimizerConfig;
use qfc_core::random;
use qfc_core::states::{self, apply_channel_b, make_example1, BipartiteState, Example1Params, KrausChannel};
use qfc_core::VonNeumannMeasurement;

fn cfg(seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        seed,
        ..Default::default()
    }
}

/// Qubit measurements on a `steps × 2·steps` grid of Bloch angles.
fn qubit_grid(steps: usize) -> Vec<VonNeumannMeasurement> {
    let pi = std::f64::consts::PI;
    let mut out = Vec::new();
    for i in 0..=steps {
        for j in 0..2 * steps {
            out.push(VonNeumannMeasurement::qubit(
                pi * i as f64 / steps as f64,
                pi * j as f64 / steps as f64,
            ));
        }
    }
    out
}

#[test]
fn schmidt_pair_values() {
    let rho = states::pure_from_schmidt(&[0.8, 0.2], (2, 2), None, None).unwrap();
    assert_abs_diff_eq!(q_ah(&rho, &cfg(1)).unwrap().value, 0.32, epsilon = 1e-4);
    assert_abs_diff_eq!(q_api(&rho, &cfg(1)).unwrap().value, 0.32, epsilon = 1e-4);
}

#[test]
fn maximally_entangled_values() {
    for m in [2, 3] {
        let rho = states::max_entangled(m).unwrap();
        let target = 1.0 - 1.0 / m as f64;
        assert_abs_diff_eq!(q_ah(&rho, &cfg(2)).unwrap().value, target, epsilon = 1e-4);
        assert_abs_diff_eq!(q_api(&rho, &cfg(2)).unwrap().value, target, epsilon = 1e-4);
    }
}

#[test]
fn werner_q_api_matches_measurement_grid() {
    let singlet = states::werner(1.0).unwrap();
    assert_abs_diff_eq!(q_api(&singlet, &cfg(3)).unwrap().value, 0.5, epsilon = 1e-4);
    let basis = ObservableBasis::standard(2);
    let grid = qubit_grid(12);
    for w in [0.2, 0.5, 0.8] {
        let rho = states::werner(w).unwrap();
        let best = grid
            .iter()
            .map(|pi| total_mfi(&rho, pi, &basis).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        let brute = total_local_qfi_b(&rho, &basis).unwrap() - best;
        assert_abs_diff_eq!(q_api(&rho, &cfg(4)).unwrap().value, brute, epsilon = 1e-4);
    }
}

#[test]
fn two_qubit_q_ah_agrees_with_basis_grid() {
    let rho = states::random_bipartite((2, 2), 3, 17).unwrap();
    let kernel = LocalProjectorQfi::new(&rho);
    let grid_min = qubit_grid(40)
        .iter()
        .map(|pi| kernel.basis_sum(pi))
        .fold(f64::INFINITY, f64::min);
    let value = q_ah(&rho, &cfg(5)).unwrap().value;
    assert!(value <= grid_min + 1e-9, "{value} vs {grid_min}");
    assert!(grid_min - value <= 1e-3, "{value} vs {grid_min}");
}

#[test]
fn argopt_reproduces_value_through_generic_qfi() {
    let rho = states::random_bipartite((3, 2), 4, 21).unwrap();
    let r = q_ah(&rho, &cfg(6)).unwrap();
    let generic: f64 = r
        .argopt
        .projectors()
        .into_iter()
        .map(|p| qfi(rho.density(), &lift_a(&Observable::new(p).unwrap(), 2)).unwrap())
        .sum();
    assert_abs_diff_eq!(generic, r.value, epsilon = 1e-10);
    assert!(VonNeumannMeasurement::new(r.argopt.vectors().to_vec()).is_ok());
}

#[test]
fn classical_states_give_zero() {
    for seed in 0..4 {
        let cq = states::random_cq((3, 2), seed).unwrap();
        let cc = states::random_cc((2, 3), seed).unwrap();
        for rho in [&cq, &cc] {
            assert!(q_ah(rho, &cfg(seed)).unwrap().value.abs() <= 1e-6);
            assert!(q_api(rho, &cfg(seed)).unwrap().value.abs() <= 1e-6);
        }
    }
}

#[test]
fn local_unitaries_leave_values_unchanged() {
    let rho = states::random_bipartite((2, 3), 3, 8).unwrap();
    let moved = rho
        .local_unitary(&random::haar_unitary(2, 9), &random::haar_unitary(3, 10))
        .unwrap();
    let tol = 2e-6;
    assert_abs_diff_eq!(q_ah(&rho, &cfg(1)).unwrap().value, q_ah(&moved, &cfg(1)).unwrap().value, epsilon = tol);
    assert_abs_diff_eq!(q_api(&rho, &cfg(1)).unwrap().value, q_api(&moved, &cfg(1)).unwrap().value, epsilon = tol);
    let g = |r: &BipartiteState| geometric_discord(r, &cfg(1)).unwrap().value;
    let e = |r: &BipartiteState| entropic_discord(r, &cfg(1)).unwrap().value;
    assert_abs_diff_eq!(g(&rho), g(&moved), epsilon = tol);
    assert_abs_diff_eq!(e(&rho), e(&moved), epsilon = tol);
}

#[test]
fn identical_seeds_give_identical_reports() {
    let rho = states::random_bipartite((2, 2), 2, 30).unwrap();
    let a = q_ah(&rho, &cfg(11)).unwrap();
    let b = q_ah(&rho, &cfg(11)).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.report.best_unitary, b.report.best_unitary);
    assert_eq!(a.report.evaluations, b.report.evaluations);
}

#[test]
fn more_restarts_never_hurt() {
    let rho = states::random_bipartite((3, 2), 3, 31).unwrap();
    let mut previous = f64::INFINITY;
    for restarts in [1, 2, 4, 8] {
        let c = OptimizerConfig {
            restarts,
            seed: 5,
            ..Default::default()
        };
        let v = q_ah(&rho, &c).unwrap().value;
        assert!(v <= previous, "{restarts}: {v} > {previous}");
        previous = v;
    }
}

#[test]
fn qubit_commuting_projector_implies_zero() {
    for seed in 0..6 {
        let rho = states::random_cq((2, 3), seed).unwrap();
        let e = linalg::eigh(&rho.reduced(Party::A).into_matrix()).unwrap();
        let phi = e.vector(0);
        let lifted = lift_a(&Observable::new(linalg::projector(&phi)).unwrap(), 3);
        let residual = linalg::commutator(rho.matrix(), lifted.matrix()).norm();
        assert!(residual <= 1e-10);
        assert!(q_ah(&rho, &cfg(seed)).unwrap().value <= 1e-6);
    }
}

#[test]
fn example_state_has_commuting_projector_but_positive_quantifier() {
    let rho = make_example1(Example1Params::default(), (3, 2)).unwrap();
    let p0 = lift_a(&Observable::new(linalg::projector(&linalg::basis_vector(3, 0))).unwrap(), 2);
    assert!(linalg::commutator(rho.matrix(), p0.matrix()).norm() <= 1e-12);
    assert!(qfi(rho.density(), &p0).unwrap() <= 1e-12);
    assert!(q_ah(&rho, &cfg(7)).unwrap().value >= 1e-3);
    let wider = make_example1(
        Example1Params {
            a: (0.6, 0.8),
            b: (1.0, 0.0),
            probs: (0.2, 0.5, 0.3),
        },
        (4, 3),
    )
    .unwrap();
    assert!(q_ah(&wider, &cfg(7)).unwrap().value >= 1e-3);
}

#[test]
fn quantifiers_contract_under_channels_on_b() {
    let rho = states::random_pure((2, 3), 40).unwrap();
    let before = q_ah(&rho, &cfg(1)).unwrap().value;
    for p in [0.2, 0.6, 1.0] {
        let out = apply_channel_b(&rho, &KrausChannel::depolarizing(3, p).unwrap()).unwrap();
        assert!(q_ah(&out, &cfg(1)).unwrap().value <= before + 2e-4);
    }
    let fully = apply_channel_b(&rho, &KrausChannel::depolarizing(3, 1.0).unwrap()).unwrap();
    assert!(q_ah(&fully, &cfg(1)).unwrap().value <= 1e-6);
}

#[test]
fn iteration_cap_flags_without_discarding() {
    let rho = states::random_bipartite((3, 3), 9, 50).unwrap();
    let c = OptimizerConfig {
        restarts: 2,
        max_iterations: 5,
        ..Default::default()
    };
    let r = q_ah(&rho, &c).unwrap();
    assert!(!r.converged());
    assert!(r.value.is_finite() && r.value > 0.0);
}

#[test]
fn discords_on_pure_states() {
    for seed in 0..4 {
        let rho = states::random_pure((2, 3), seed).unwrap();
        let dq = entropic_discord(&rho, &cfg(seed)).unwrap().value;
        assert_abs_diff_eq!(dq, von_neumann_entropy(&rho.reduced(Party::A)), epsilon = 1e-4);
        assert!(dq >= 1e-4);
        let closed = geometric_discord(&rho, &cfg(seed)).unwrap();
        assert_eq!(closed.method, Method::ClosedForm);
        assert_abs_diff_eq!(closed.value, q_pure_closed_form(&rho).unwrap(), epsilon = 1e-12);
        let opt = geometric_discord_optimized(&rho, &cfg(seed)).unwrap();
        assert_abs_diff_eq!(opt.value, closed.value, epsilon = 1e-4);
    }
}

#[test]
fn discords_vanish_on_classical_states() {
    for seed in 0..3 {
        let cc = states::random_cc((3, 2), seed).unwrap();
        assert!(entropic_discord(&cc, &cfg(seed)).unwrap().value.abs() <= 1e-6);
        assert!(geometric_discord(&cc, &cfg(seed)).unwrap().value.abs() <= 1e-6);
    }
}

#[test]
fn maximally_mixed_state_is_uncorrelated() {
    let rho = BipartiteState::from_matrix(CMatrix::identity(6, 6).unscale(6.0), (3, 2)).unwrap();
    assert!(q_ah(&rho, &cfg(0)).unwrap().value.abs() <= 1e-12);
    assert!(q_api(&rho, &cfg(0)).unwrap().value.abs() <= 1e-12);
}
