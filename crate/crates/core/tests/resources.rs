use ancilla_core::error::Error;
use ancilla_core::pipeline::PhaseMethod;
use ancilla_core::resources::*;
use proptest::prelude::*;

#[test]
fn pairwise_three_photon_value_is_bit_exact() {
    let p = success_probability(3, PhaseMethod::PairwiseGates, 0.25).unwrap();
    assert_eq!(p, 2f64.powi(-26));
    assert!((p - 1.49e-8).abs() < 1e-10);
}

#[test]
fn parity_exponent_is_6n_minus_2() {
    for n in 1..=20 {
        let p = success_probability(n, PhaseMethod::ParityAncilla, 0.25).unwrap();
        assert_eq!(p, 2f64.powi(-2 * (6 * n as i32 - 2)));
    }
}

#[test]
fn oracle_method_needs_no_phase_gates() {
    let r = gate_counts(4, PhaseMethod::DirectOracle).unwrap();
    assert_eq!((r.phase_gates, r.total_gates, r.toffoli_overhead), (0, 6, 0));
}

#[test]
fn klm_scaling_dominates() {
    for n in 2..50 {
        let s = failure_scaling(n).unwrap();
        assert!(s.klm > s.high_fidelity);
    }
    let s = failure_scaling(1).unwrap();
    assert_eq!(s.klm, s.high_fidelity);
}

#[test]
fn sampled_means_match_geometric_law() {
    for (n, method, p, seed) in [
        (1, PhaseMethod::PairwiseGates, 0.5, 1u64),
        (3, PhaseMethod::PairwiseGates, 0.9, 2),
        (2, PhaseMethod::ParityAncilla, 0.8, 3),
    ] {
        let e = expected_attempts(n, method, p, 100_000, seed).unwrap();
        let g = gate_counts(n, method).unwrap().total_gates as i32;
        let analytic = 1.0 / p.powi(g);
        assert_eq!(e.analytic_mean, analytic);
        assert!(
            (e.mean - analytic).abs() <= 3.0 * e.standard_error,
            "n={n} p={p}: {} vs {analytic} ± {}",
            e.mean,
            e.standard_error
        );
    }
}

#[test]
fn three_sigma_coverage_over_seeds() {
    let (n, method, p) = (2, PhaseMethod::PairwiseGates, 0.9);
    let mut covered = 0;
    for seed in 0..100 {
        let e = expected_attempts(n, method, p, 2_000, seed).unwrap();
        if (e.mean - e.analytic_mean).abs() <= 3.0 * e.standard_error {
            covered += 1;
        }
    }
    assert!(covered >= 99, "coverage {covered}/100");
}

#[test]
fn guard_rejects_infeasible() {
    for (n, p) in [(3, 0.25), (5, 0.5)] {
        match expected_attempts(n, PhaseMethod::ParityAncilla, p, 10, 0) {
            Err(Error::InfeasibleParameters { analytic_mean, limit }) => {
                let g = gate_counts(n, PhaseMethod::ParityAncilla).unwrap().total_gates as i32;
                assert_eq!(analytic_mean, 1.0 / p.powi(g));
                assert_eq!(limit, MAX_SAMPLED_ATTEMPTS);
            }
            other => panic!("expected rejection, got {other:?}"),
        }
    }
    assert!(expected_attempts(2, PhaseMethod::PairwiseGates, 0.9, 0, 0).is_err());
}

proptest! {
    #[test]
    fn totals_add_up(n in 1usize..200) {
        let pw = gate_counts(n, PhaseMethod::PairwiseGates).unwrap();
        prop_assert_eq!(pw.total_gates, 2 * (n - 1) + n * n);
        let par = gate_counts(n, PhaseMethod::ParityAncilla).unwrap();
        prop_assert_eq!(par.total_gates, 6 * n - 2);
        prop_assert_eq!(par.conditional_transfer_gates + par.phase_gates, par.total_gates);
    }
}
