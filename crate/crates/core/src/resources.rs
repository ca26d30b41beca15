//! Gate counts, success probabilities and sampled retry costs of the
//! post-selected preparation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pipeline::PhaseMethod;

/// Default success probability of one elementary probabilistic gate.
pub const DEFAULT_GATE_SUCCESS: f64 = 0.25;

/// Largest analytic mean number of attempts that will be sampled.
pub const MAX_SAMPLED_ATTEMPTS: f64 = 1e6;

/// CNOTs in the standard Toffoli decomposition.
pub const CNOTS_PER_TOFFOLI: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GateCountReport {
    pub n: usize,
    pub method: PhaseMethod,
    pub conditional_transfer_gates: usize,
    pub phase_gates: usize,
    pub total_gates: usize,
    /// Fixed cost of the parity method's two Toffolis and one extra
    /// controlled sign, kept out of `total_gates`.
    pub toffoli_overhead: usize,
    pub per_gate_success: f64,
    pub success_probability: f64,
}

fn phase_gates(n: usize, method: PhaseMethod) -> usize {
    match method {
        PhaseMethod::PairwiseGates => n * n,
        PhaseMethod::ParityAncilla => 4 * n,
        PhaseMethod::DirectOracle => 0,
    }
}

fn check_p(p: f64) -> Result<()> {
    if !p.is_finite() || p <= 0.0 || p > 1.0 {
        return Err(Error::OutOfRange {
            what: "p",
            value: p,
            range: "(0, 1]",
        });
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "n",
            value: 0.0,
            range: "n >= 1",
        });
    }
    Ok(())
}

/// Counts with the default per-gate success 1/4.
pub fn gate_counts(n: usize, method: PhaseMethod) -> Result<GateCountReport> {
    gate_counts_with(n, method, DEFAULT_GATE_SUCCESS)
}

pub fn gate_counts_with(n: usize, method: PhaseMethod, p: f64) -> Result<GateCountReport> {
    check_n(n)?;
    check_p(p)?;
    let conditional = 2 * (n - 1);
    let phase = phase_gates(n, method);
    let total = conditional + phase;
    let toffoli_overhead = match method {
        PhaseMethod::ParityAncilla => 2 * CNOTS_PER_TOFFOLI + 1,
        _ => 0,
    };
    Ok(GateCountReport {
        n,
        method,
        conditional_transfer_gates: conditional,
        phase_gates: phase,
        total_gates: total,
        toffoli_overhead,
        per_gate_success: p,
        success_probability: p.powi(total as i32),
    })
}

/// p raised to the number of probabilistic gates.
pub fn success_probability(n: usize, method: PhaseMethod, p: f64) -> Result<f64> {
    Ok(gate_counts_with(n, method, p)?.success_probability)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FailureScaling {
    /// 2/(n+1): two teleportations with constant-profile ancillas.
    pub klm: f64,
    /// 4/(n+1)²: optimized profiles.
    pub high_fidelity: f64,
}

pub fn failure_scaling(n: usize) -> Result<FailureScaling> {
    check_n(n)?;
    let m = n as f64 + 1.0;
    Ok(FailureScaling {
        klm: 2.0 / m,
        high_fidelity: 4.0 / (m * m),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AttemptEstimate {
    pub mean: f64,
    pub standard_error: f64,
    /// 1/p^G.
    pub analytic_mean: f64,
    pub trials: u64,
}

/// Samples the number of full-pipeline attempts until every gate in one
/// attempt succeeds, averaged over `trials` independent runs.
///
/// Parameters whose analytic mean exceeds [`MAX_SAMPLED_ATTEMPTS`] are
/// rejected with that mean in the error.
pub fn expected_attempts(
    n: usize,
    method: PhaseMethod,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<AttemptEstimate> {
    let report = gate_counts_with(n, method, p)?;
    if trials == 0 {
        return Err(Error::OutOfRange {
            what: "trials",
            value: 0.0,
            range: "trials >= 1",
        });
    }
    let analytic_mean = 1.0 / report.success_probability;
    if analytic_mean > MAX_SAMPLED_ATTEMPTS {
        return Err(Error::InfeasibleParameters {
            analytic_mean,
            limit: MAX_SAMPLED_ATTEMPTS,
        });
    }
    let gates = report.total_gates;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..trials {
        let mut attempts = 0u64;
        loop {
            attempts += 1;
            if (0..gates).all(|_| rng.random_bool(p)) {
                break;
            }
        }
        let a = attempts as f64;
        sum += a;
        sum_sq += a * a;
    }
    let t = trials as f64;
    let mean = sum / t;
    let standard_error = if trials > 1 {
        let var = ((sum_sq - t * mean * mean) / (t - 1.0)).max(0.0);
        (var / t).sqrt()
    } else {
        0.0
    };
    Ok(AttemptEstimate {
        mean,
        standard_error,
        analytic_mean,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn count_examples() {
        let r = gate_counts(3, PhaseMethod::PairwiseGates).unwrap();
        assert_eq!((r.conditional_transfer_gates, r.phase_gates, r.total_gates), (4, 9, 13));
        assert_eq!(r.success_probability, 0.25f64.powi(13));
        let r = gate_counts(1, PhaseMethod::PairwiseGates).unwrap();
        assert_eq!(r.total_gates, 1);
        for n in 1..10 {
            let r = gate_counts(n, PhaseMethod::ParityAncilla).unwrap();
            assert_eq!(r.total_gates, 6 * n - 2);
            assert_eq!(r.toffoli_overhead, 13);
        }
        assert!(gate_counts(0, PhaseMethod::PairwiseGates).is_err());
    }

    #[test]
    fn success_probability_bounds() {
        assert_eq!(success_probability(4, PhaseMethod::ParityAncilla, 1.0).unwrap(), 1.0);
        assert!(success_probability(2, PhaseMethod::PairwiseGates, 0.0).is_err());
        assert!(success_probability(2, PhaseMethod::PairwiseGates, 1.5).is_err());
    }

    #[test]
    fn scaling_examples() {
        assert_eq!(failure_scaling(1).unwrap(), FailureScaling { klm: 1.0, high_fidelity: 1.0 });
        assert_eq!(failure_scaling(3).unwrap(), FailureScaling { klm: 0.5, high_fidelity: 0.25 });
        assert_eq!(failure_scaling(7).unwrap(), FailureScaling { klm: 0.25, high_fidelity: 0.0625 });
    }

    #[test]
    fn certain_gates_take_one_attempt() {
        let e = expected_attempts(3, PhaseMethod::PairwiseGates, 1.0, 100, 7).unwrap();
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.standard_error, 0.0);
    }

    #[test]
    fn infeasible_reports_analytic_mean() {
        match expected_attempts(3, PhaseMethod::PairwiseGates, 0.25, 10, 1) {
            Err(Error::InfeasibleParameters { analytic_mean, .. }) => {
                assert_eq!(analytic_mean, 4f64.powi(13));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let a = expected_attempts(2, PhaseMethod::ParityAncilla, 0.8, 500, 42).unwrap();
        let b = expected_attempts(2, PhaseMethod::ParityAncilla, 0.8, 500, 42).unwrap();
        assert_eq!(a, b);
    }
}
