mod common;

use std::f64::consts::{FRAC_PI_2, PI};

use ancilla_core::dots::*;
use ancilla_core::fock::{Occupation, SparseState};
use ancilla_core::pipeline::{
    direct_oracle_pair, direct_oracle_single, schedule_from_profile, AmplitudeProfile,
};
use approx::assert_abs_diff_eq;
use common::*;
use proptest::prelude::*;

/// Dot-order branch j: 0^{n−j} 1^n 0^j.
fn dot_branch(n: usize, j: usize) -> Occupation {
    Occupation::with_ones(2 * n, n - j..2 * n - j)
}

#[test]
fn single_register_end_to_end() {
    let mut r = rng(4);
    for n in 1..=5 {
        for prof in [AmplitudeProfile::constant(n).unwrap(), random_profile(&mut r, n)] {
            let array = DotArray::single(n);
            let sched = compile_schedule(&prof).unwrap();
            let dots = execute(&array, &sched, &array.empty()).unwrap();
            for j in 0..=n {
                let a = dots.amplitude(&dot_branch(n, j));
                assert_abs_diff_eq!(a.re, prof.f(j), epsilon = 1e-12);
                assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
            }
            let photons = emit_photons(&dots, n).unwrap();
            assert_fidelity(&photons, &direct_oracle_single(&prof), 1e-10);
            assert_fidelity(&photons, &literal_single(prof.values()), 1e-10);
        }
    }
}

#[test]
fn pair_end_to_end_with_blockade_trace() {
    let mut r = rng(12);
    for n in 1..=4 {
        for (prof, lambda) in [
            (AmplitudeProfile::constant(n).unwrap(), 0.0),
            (random_profile(&mut r, n), 0.7),
            (random_profile(&mut r, n), 2.3),
        ] {
            let array = DotArray::pair(n);
            let sched = compile_pair_schedule(&prof, lambda).unwrap();
            let trace = execute_traced(&array, &sched, &array.empty()).unwrap();
            for s in &trace {
                assert!(s.iter().all(|(o, _)| o.max_count() <= 1));
                assert!((s.norm() - 1.0).abs() < 1e-12);
            }
            let photons = emit_photons(trace.last().unwrap(), n).unwrap();
            assert_fidelity(&photons, &direct_oracle_pair(&prof), 1e-10);
        }
    }
}

#[test]
fn delta_profile_fills_x_register() {
    let n = 3;
    let array = DotArray::single(n);
    let sched = compile_schedule(&AmplitudeProfile::delta(n).unwrap()).unwrap();
    let out = execute(&array, &sched, &array.empty()).unwrap();
    assert_eq!(out.len(), 1);
    assert_abs_diff_eq!(out.amplitude(&dot_branch(n, n)).re, 1.0, epsilon = 1e-12);
}

#[test]
fn pulse_count_is_exactly_quadratic() {
    let counts: Vec<usize> = (1..=8)
        .map(|n| compile_schedule(&AmplitudeProfile::constant(n).unwrap()).unwrap().len())
        .collect();
    for (i, &c) in counts.iter().enumerate() {
        assert_eq!(c, closed_form_pulse_count(i + 1));
    }
    let second: Vec<i64> = counts
        .windows(3)
        .map(|w| w[2] as i64 - 2 * w[1] as i64 + w[0] as i64)
        .collect();
    assert!(second.iter().all(|&d| d == second[0] && d > 0), "{second:?}");
    // a·n² + b·n + c with a = 9/2.
    for (i, &c) in counts.iter().enumerate() {
        let n = (i + 1) as f64;
        assert!(c as f64 <= 4.5 * n * n + 1.0);
    }
}

#[test]
fn shift_sequences_leave_stay_branches_alone() {
    let n = 4;
    let prof = AmplitudeProfile::constant(n).unwrap();
    let sched = compile_schedule(&prof).unwrap();
    let prefix = 1 + n + n * (n - 1) / 2;
    let after_first = prefix + n;
    let array = DotArray::single(n);
    for k in 2..=n {
        let partial = after_first + (k - 2) * (4 * n - 3);
        assert!(matches!(sched.pulses()[partial], Pulse::Rabi { to, .. } if to == n - k));
        let shift = PulseSchedule::new(sched.pulses()[partial + 1..partial + 1 + 4 * (n - 1)].to_vec());
        for j in 0..k {
            let s = SparseState::basis(dot_branch(n, j));
            let out = execute(&array, &shift, &s).unwrap();
            assert_eq!(out.len(), 1, "k = {k}, j = {j}");
            assert_abs_diff_eq!(out.amplitude(&dot_branch(n, j)).re, 1.0, epsilon = 1e-12);
        }
    }
}

/// Partial transfer at the boundary followed by plain nearest-neighbour
/// swaps carrying the hole to the right edge, with no conditioning.
fn unconditioned_sweep(prof: &AmplitudeProfile) -> PulseSchedule {
    let n = prof.n();
    let mut pulses = vec![Pulse::Thermalize];
    for m in 0..n {
        pulses.push(Pulse::LoadFromReservoir(2 * n - 1));
        for i in (n + m + 1..2 * n).rev() {
            pulses.push(Pulse::Rabi { from: i, to: i - 1, theta: FRAC_PI_2 });
        }
    }
    for (idx, &p) in schedule_from_profile(prof).probabilities().iter().enumerate() {
        let k = idx + 1;
        pulses.push(Pulse::Rabi { from: n - k + 1, to: n - k, theta: p.sqrt().asin() });
        for i in n - k + 1..2 * n - 1 {
            pulses.push(Pulse::Rabi { from: i + 1, to: i, theta: FRAC_PI_2 });
        }
    }
    PulseSchedule::new(pulses)
}

#[test]
fn unconditioned_sweep_corrupts_earlier_branches() {
    // Two-state swaps act on every branch, including ones where the boundary
    // transfer did not happen, so they cannot build more than two branches.
    let n = 2;
    let prof = AmplitudeProfile::constant(n).unwrap();
    let array = DotArray::single(n);
    let out = execute(&array, &unconditioned_sweep(&prof), &array.empty()).unwrap();
    let f = emit_photons(&out, n)
        .unwrap()
        .fidelity(&direct_oracle_single(&prof))
        .unwrap();
    assert!(f < 0.9, "fidelity {f}");
    let n1 = AmplitudeProfile::constant(1).unwrap();
    let out = execute(&DotArray::single(1), &unconditioned_sweep(&n1), &DotArray::single(1).empty()).unwrap();
    assert_fidelity(&emit_photons(&out, 1).unwrap(), &direct_oracle_single(&n1), 1e-12);
}

#[test]
fn lambda_is_cancelled_by_corrections() {
    let n = 3;
    let prof = AmplitudeProfile::constant(n).unwrap();
    let array = DotArray::pair(n);
    let base = execute(&array, &compile_pair_schedule(&prof, 0.0).unwrap(), &array.empty()).unwrap();
    for lambda in [0.7, 1.9, -3.0] {
        let with = execute(&array, &compile_pair_schedule(&prof, lambda).unwrap(), &array.empty()).unwrap();
        assert_fidelity(&with, &base, 1e-12);
        let raw = interaction_phase(&base, n, 0.0, lambda, &vec![0.0; n + 1]).unwrap();
        assert!(raw.fidelity(&base).unwrap() < 1.0 - 1e-3);
    }
}

#[test]
fn interaction_phase_requires_pair_shape() {
    let s = SparseState::vacuum(5);
    assert!(interaction_phase(&s, 2, PI, 0.0, &[0.0; 3]).is_err());
}

#[test]
fn schedule_file_round_trip_executes_identically() {
    let prof = AmplitudeProfile::new(vec![0.3, 0.9, 0.1, 0.5]).unwrap();
    let sched = compile_pair_schedule(&prof, 0.4).unwrap();
    let back = PulseSchedule::from_jsonl(&sched.to_jsonl()).unwrap();
    let array = DotArray::pair(3);
    assert_eq!(
        execute(&array, &sched, &array.empty()).unwrap(),
        execute(&array, &back, &array.empty()).unwrap()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rabi_is_unitary(seed in any::<u64>(), theta in 0.0f64..=FRAC_PI_2) {
        let s = random_binary_state(&mut rng(seed), 4, 6);
        let out = rabi(&s, 1, 3, theta).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        let back = rabi(&out, 3, 1, theta).unwrap();
        prop_assert!(back.fidelity(&s).unwrap() >= 1.0 - 1e-12);
    }

    #[test]
    fn full_rabi_twice_is_identity_up_to_sign(seed in any::<u64>()) {
        let s = random_binary_state(&mut rng(seed), 3, 5);
        let twice = rabi(&rabi(&s, 0, 2, FRAC_PI_2).unwrap(), 0, 2, FRAC_PI_2).unwrap();
        for (occ, a) in s.iter() {
            let b = twice.amplitude(occ);
            let flipped = occ.get(0) != occ.get(2);
            let want = if flipped { -a } else { *a };
            prop_assert!((b - want).norm() < 1e-12);
        }
    }
}
