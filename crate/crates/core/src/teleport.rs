//! Single-rail teleportation through the single-register ancilla and the
//! controlled-sign gate built from two teleportations through the entangled
//! pair.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{apply_mode_transform, ModeMatrix, Occupation, SparseState};
use crate::pipeline::{direct_oracle_single, AmplitudeProfile};

/// Success outputs must match the input to this infidelity.
pub const FIDELITY_TOLERANCE: f64 = 1e-10;

/// α|0⟩ + β|1⟩ in one mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Qubit {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl Qubit {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidCoefficient(format!(
                "|α|² + |β|² = {norm}, expected 1"
            )));
        }
        Ok(Qubit { alpha, beta })
    }

    /// Normalizes an arbitrary nonzero pair.
    pub fn normalized(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::ZeroState);
        }
        Self::new(alpha / norm, beta / norm)
    }

    pub fn zero() -> Self {
        Qubit {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(0.0, 0.0),
        }
    }

    pub fn one() -> Self {
        Qubit {
            alpha: Complex64::new(0.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
        }
    }

    pub fn plus() -> Self {
        Qubit {
            alpha: Complex64::new(FRAC_1_SQRT_2, 0.0),
            beta: Complex64::new(FRAC_1_SQRT_2, 0.0),
        }
    }

    pub fn to_state(&self) -> SparseState {
        SparseState::from_terms(
            1,
            [
                (Occupation::from([0]), self.alpha),
                (Occupation::from([1]), self.beta),
            ],
        )
        .expect("qubit amplitudes are finite")
    }

    pub fn fidelity(&self, other: &Qubit) -> f64 {
        (self.alpha.conj() * other.alpha + self.beta.conj() * other.beta)
            .norm_sqr()
            .clamp(0.0, 1.0)
    }
}

/// N-point Fourier matrix with entries ω^{lm}/√N, ω = exp(2πi/N).
pub fn fourier_matrix(n: usize) -> ModeMatrix {
    let scale = 1.0 / (n as f64).sqrt();
    ModeMatrix::from_fn(n, n, |m, l| {
        let angle = 2.0 * PI * ((l * m) % n) as f64 / n as f64;
        Complex64::from_polar(scale, angle)
    })
}

/// Multimode Fourier transform on the listed modes, in order.
pub fn apply_qft(state: &SparseState, modes: &[usize]) -> Result<SparseState> {
    if modes.is_empty() {
        return Err(Error::ShapeMismatch("transform needs at least one mode".into()));
    }
    apply_mode_transform(state, modes, &fourier_matrix(modes.len()))
}

pub fn apply_qft_inverse(state: &SparseState, modes: &[usize]) -> Result<SparseState> {
    if modes.is_empty() {
        return Err(Error::ShapeMismatch("transform needs at least one mode".into()));
    }
    apply_mode_transform(state, modes, &fourier_matrix(modes.len()).adjoint())
}

/// Expected counts on the y register when the output sits in y_k holding
/// `bit`: y_1..y_{k−1} empty, y_{k+1}..y_n occupied.
fn y_pattern(n: usize, k: usize, bit: u32) -> Vec<u32> {
    (1..=n)
        .map(|m| match m.cmp(&k) {
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Equal => bit,
            std::cmp::Ordering::Greater => 1,
        })
        .collect()
}

/// Amplitudes (c0, c1) of the output held in y_k of a residual over y.
fn extract_qubit(residual: &SparseState, n: usize, k: usize) -> (Complex64, Complex64) {
    let c = |bit| residual.amplitude(&Occupation::new(y_pattern(n, k, bit)));
    (c(0), c(1))
}

/// Output phase corrections per measured (q, x) pattern.
#[derive(Clone, Debug, PartialEq)]
pub struct FeedForwardTable {
    n: usize,
    phases: BTreeMap<Vec<u32>, f64>,
    unresolved: Vec<Vec<u32>>,
}

impl FeedForwardTable {
    /// Derives the table by teleporting (|0⟩+|1⟩)/√2 through the constant
    /// profile ancilla and reading the relative phase of each success branch.
    /// Branches where no phase restores the reference are listed as
    /// unresolved.
    pub fn derive(n: usize) -> Result<Self> {
        let ancilla = direct_oracle_single(&AmplitudeProfile::constant(n)?);
        let reference = Qubit::plus();
        let mut phases = BTreeMap::new();
        let mut unresolved = Vec::new();
        for outcome in measure_teleport(&reference, &ancilla, n)? {
            let k = outcome.counts.iter().sum::<u32>() as usize;
            if k == 0 || k > n {
                continue;
            }
            let (c0, c1) = extract_qubit(&outcome.residual, n, k);
            let theta = c0.arg() - c1.arg();
            let corrected = Qubit {
                alpha: c0,
                beta: c1 * Complex64::from_polar(1.0, theta),
            };
            if reference.fidelity(&corrected) < 1.0 - FIDELITY_TOLERANCE {
                unresolved.push(outcome.counts.clone());
            }
            phases.insert(outcome.counts, theta);
        }
        Ok(FeedForwardTable {
            n,
            phases,
            unresolved,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn phase(&self, counts: &[u32]) -> Option<f64> {
        self.phases.get(counts).copied()
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u32>, &f64)> {
        self.phases.iter()
    }

    /// Patterns where a phase alone did not reproduce the reference qubit.
    pub fn unresolved(&self) -> &[Vec<u32>] {
        &self.unresolved
    }
}

fn check_single_shape(ancilla: &SparseState, n: usize) -> Result<()> {
    if n == 0 || ancilla.modes() != 2 * n {
        return Err(Error::ShapeMismatch(format!(
            "single-register ancilla for n = {n} needs {} modes, got {}",
            2 * n,
            ancilla.modes()
        )));
    }
    Ok(())
}

/// Input ⊗ ancilla, transform on (q, x), number measurement on (q, x).
fn measure_teleport(
    qubit: &Qubit,
    ancilla: &SparseState,
    n: usize,
) -> Result<Vec<crate::fock::MeasurementOutcome>> {
    check_single_shape(ancilla, n)?;
    let joint = qubit.to_state().tensor(ancilla);
    let modes: Vec<usize> = (0..=n).collect();
    apply_qft(&joint, &modes)?.measure_modes(&modes)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// Output found in y_k.
    Success { register: usize },
    Failure,
}

/// One measured pattern on (q, x).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TeleportOutcome {
    pub counts: Vec<u32>,
    pub k: u32,
    pub probability: f64,
    pub classification: Classification,
    /// Corrected output qubit on success.
    pub output: Option<Qubit>,
    /// Fidelity of `output` with the input.
    pub fidelity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TeleportReport {
    pub n: usize,
    pub outcomes: Vec<TeleportOutcome>,
    pub success_probability: f64,
    pub failure_probability: f64,
    /// Lowest fidelity over success branches (1 when there are none).
    pub min_fidelity: f64,
    /// Success patterns with no entry in the feed-forward table, or where the
    /// tabulated phase failed to restore the input.
    pub unresolved: Vec<Vec<u32>>,
}

/// Teleporter for a fixed register size, carrying its derived table.
#[derive(Clone, Debug)]
pub struct Teleporter {
    table: FeedForwardTable,
}

impl Teleporter {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::ShapeMismatch("n must be at least 1".into()));
        }
        Ok(Teleporter {
            table: FeedForwardTable::derive(n)?,
        })
    }

    pub fn n(&self) -> usize {
        self.table.n
    }

    pub fn table(&self) -> &FeedForwardTable {
        &self.table
    }

    /// Enumerates every measurement outcome exactly. Totals 1..=n succeed
    /// with the output in y_k after the tabulated phase; 0 and n+1 fail.
    pub fn teleport(&self, qubit: &Qubit, ancilla: &SparseState) -> Result<TeleportReport> {
        let n = self.n();
        let mut outcomes = Vec::new();
        let mut unresolved = Vec::new();
        let mut success = 0.0;
        let mut failure = 0.0;
        let mut min_fidelity: f64 = 1.0;
        for m in measure_teleport(qubit, ancilla, n)? {
            let k = m.total();
            let ku = k as usize;
            if ku == 0 || ku > n {
                failure += m.probability;
                outcomes.push(TeleportOutcome {
                    counts: m.counts,
                    k,
                    probability: m.probability,
                    classification: Classification::Failure,
                    output: None,
                    fidelity: None,
                });
                continue;
            }
            success += m.probability;
            let (c0, c1) = extract_qubit(&m.residual, n, ku);
            let (output, fid) = match self.table.phase(&m.counts) {
                Some(theta) => {
                    let out = Qubit {
                        alpha: c0,
                        beta: c1 * Complex64::from_polar(1.0, theta),
                    };
                    let fid = qubit.fidelity(&out);
                    (Some(out), fid)
                }
                None => (None, 0.0),
            };
            if fid < 1.0 - FIDELITY_TOLERANCE {
                unresolved.push(m.counts.clone());
            }
            min_fidelity = min_fidelity.min(fid);
            outcomes.push(TeleportOutcome {
                counts: m.counts,
                k,
                probability: m.probability,
                classification: Classification::Success { register: ku },
                output,
                fidelity: Some(fid),
            });
        }
        Ok(TeleportReport {
            n,
            outcomes,
            success_probability: success,
            failure_probability: failure,
            min_fidelity,
            unresolved,
        })
    }
}

/// Convenience wrapper deriving a fresh [`Teleporter`].
pub fn teleport(qubit: &Qubit, ancilla: &SparseState, n: usize) -> Result<TeleportReport> {
    Teleporter::new(n)?.teleport(qubit, ancilla)
}

/// Two-qubit amplitudes in the order |00⟩, |01⟩, |10⟩, |11⟩.
pub type TwoQubit = [Complex64; 4];

/// Ideal controlled-sign applied to `a ⊗ b`.
pub fn ideal_cz(a: &Qubit, b: &Qubit) -> TwoQubit {
    [
        a.alpha * b.alpha,
        a.alpha * b.beta,
        a.beta * b.alpha,
        -(a.beta * b.beta),
    ]
}

fn two_qubit_fidelity(a: &TwoQubit, b: &TwoQubit) -> f64 {
    let inner: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (inner.norm_sqr() / (na * nb)).clamp(0.0, 1.0)
}

/// One jointly successful branch of the teleported controlled-sign.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CzOutcome {
    pub counts_first: Vec<u32>,
    pub counts_second: Vec<u32>,
    pub probability: f64,
    /// Corrected output, normalized, order |00⟩, |01⟩, |10⟩, |11⟩.
    pub output: TwoQubit,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CzReport {
    pub n: usize,
    pub success_probability: f64,
    pub failure_probability: f64,
    pub ideal: TwoQubit,
    pub outcomes: Vec<CzOutcome>,
    pub min_fidelity: f64,
    pub unresolved: Vec<(Vec<u32>, Vec<u32>)>,
}

/// Controlled-sign by teleporting `q` and `q2` through the two halves of the
/// entangled pair (modes x, y, x', y').
///
/// Each success branch gets the tabulated phase on both outputs plus Z^{k₂}
/// on the first and Z^{k₁} on the second, which removes the outcome-dependent
/// part of (−1)^{(k₁−b₁)(k₂−b₂)}.
pub fn cz_via_double_teleportation(
    teleporter: &Teleporter,
    q: &Qubit,
    q2: &Qubit,
    ancilla_pair: &SparseState,
) -> Result<CzReport> {
    let n = teleporter.n();
    if ancilla_pair.modes() != 4 * n {
        return Err(Error::ShapeMismatch(format!(
            "entangled pair for n = {n} needs {} modes, got {}",
            4 * n,
            ancilla_pair.modes()
        )));
    }
    let table = teleporter.table();
    let ideal = ideal_cz(q, q2);
    // Modes: q, q', x, y, x', y'.
    let joint = q.to_state().tensor(&q2.to_state()).tensor(ancilla_pair);
    let first: Vec<usize> = std::iter::once(0).chain(2..2 + n).collect();
    let stage1 = apply_qft(&joint, &first)?.measure_modes(&first)?;

    let mut outcomes = Vec::new();
    let mut unresolved = Vec::new();
    let mut success = 0.0;
    let mut min_fidelity: f64 = 1.0;
    for m1 in stage1 {
        let k1 = m1.total() as usize;
        if k1 == 0 || k1 > n {
            continue;
        }
        // Residual modes: q', y, x', y'.
        let second: Vec<usize> = std::iter::once(0).chain(n + 1..2 * n + 1).collect();
        let stage2 = apply_qft(&m1.residual, &second)?.measure_modes(&second)?;
        for m2 in stage2 {
            let k2 = m2.total() as usize;
            if k2 == 0 || k2 > n {
                continue;
            }
            let probability = m1.probability * m2.probability;
            success += probability;
            let (theta1, theta2) = match (table.phase(&m1.counts), table.phase(&m2.counts)) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    unresolved.push((m1.counts.clone(), m2.counts.clone()));
                    min_fidelity = 0.0;
                    continue;
                }
            };
            let phase1 = theta1 + if k2 % 2 == 1 { PI } else { 0.0 };
            let phase2 = theta2 + if k1 % 2 == 1 { PI } else { 0.0 };
            let mut output = [Complex64::new(0.0, 0.0); 4];
            for (b1, b2) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let mut counts = y_pattern(n, k1, b1);
                counts.extend(y_pattern(n, k2, b2));
                let phase = phase1 * f64::from(b1) + phase2 * f64::from(b2);
                output[(2 * b1 + b2) as usize] = m2.residual.amplitude(&Occupation::new(counts))
                    * Complex64::from_polar(1.0, phase);
            }
            let fidelity = two_qubit_fidelity(&ideal, &output);
            if fidelity < 1.0 - FIDELITY_TOLERANCE {
                unresolved.push((m1.counts.clone(), m2.counts.clone()));
            }
            min_fidelity = min_fidelity.min(fidelity);
            outcomes.push(CzOutcome {
                counts_first: m1.counts.clone(),
                counts_second: m2.counts,
                probability,
                output,
                fidelity,
            });
        }
    }
    Ok(CzReport {
        n,
        success_probability: success,
        failure_probability: 1.0 - success,
        ideal,
        outcomes,
        min_fidelity,
        unresolved,
    })
}
