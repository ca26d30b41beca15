//! Post-selected preparation of the single-register ancilla
//! Σ_j f(j) |1^j 0^{n−j}⟩_x |0^j 1^{n−j}⟩_y and of the entangled pair that
//! carries an extra (−1)^{jj'} sign, together with literal oracles for both.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::layout::{X, X_PRIME, Y, Y_PRIME};
use crate::fock::{Occupation, RegisterLayout, SparseState};
use crate::gates::{
    cnot_logical, conditional_transfer, controlled_sign, controlled_transfer,
    toffoli_logical, transmission_for_probability,
};

/// Normalized real weights f(0)..f(n).
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeProfile {
    f: Vec<f64>,
}

#[derive(Deserialize, Serialize)]
struct ProfileJson {
    n: usize,
    f: Vec<f64>,
}

impl AmplitudeProfile {
    /// Normalizes `raw` (length n+1, n ≥ 1) to unit 2-norm.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::InvalidProfile(format!(
                "need at least 2 values, got {}",
                raw.len()
            )));
        }
        if raw.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProfile("non-finite value".into()));
        }
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidProfile("all values are zero".into()));
        }
        Ok(AmplitudeProfile {
            f: raw.into_iter().map(|v| v / norm).collect(),
        })
    }

    /// f(j) = 1/√(n+1) for every j.
    pub fn constant(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n + 1])
    }

    /// All weight on j = n.
    pub fn delta(n: usize) -> Result<Self> {
        let mut raw = vec![0.0; n + 1];
        if let Some(last) = raw.last_mut() {
            *last = 1.0;
        }
        Self::new(raw)
    }

    /// Parses `{"n": int, "f": [floats]}`; the values are normalized on load.
    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: ProfileJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if parsed.f.len() != parsed.n + 1 {
            return Err(Error::InvalidProfile(format!(
                "n = {} needs {} values, got {}",
                parsed.n,
                parsed.n + 1,
                parsed.f.len()
            )));
        }
        Self::new(parsed.f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ProfileJson {
            n: self.n(),
            f: self.f.clone(),
        })
        .expect("profile serializes")
    }

    pub fn n(&self) -> usize {
        self.f.len() - 1
    }

    pub fn f(&self, j: usize) -> f64 {
        self.f[j]
    }

    pub fn values(&self) -> &[f64] {
        &self.f
    }

    fn require_non_negative(&self) -> Result<()> {
        if self.f.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidProfile(
                "the transfer pipeline accepts only non-negative f(j)".into(),
            ));
        }
        Ok(())
    }
}

/// Conditional transfer probabilities P_1..P_n.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferSchedule {
    probabilities: Vec<f64>,
}

impl TransferSchedule {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn n(&self) -> usize {
        self.probabilities.len()
    }

    /// Weight of branch j: P_1 ⋯ P_j · (1 − P_{j+1}), with P_{n+1} = 0.
    pub fn branch_weights(&self) -> Vec<f64> {
        let n = self.n();
        (0..=n)
            .map(|j| {
                let go: f64 = self.probabilities[..j].iter().product();
                let stay = if j < n { 1.0 - self.probabilities[j] } else { 1.0 };
                go * stay
            })
            .collect()
    }
}

/// P_k = Σ_{j≥k} f(j)² / Σ_{j≥k−1} f(j)², with an empty tail giving 0.
pub fn schedule_from_profile(profile: &AmplitudeProfile) -> TransferSchedule {
    let n = profile.n();
    let mut tail = vec![0.0; n + 2];
    for j in (0..=n).rev() {
        tail[j] = tail[j + 1] + profile.f(j) * profile.f(j);
    }
    let probabilities = (1..=n)
        .map(|k| {
            if tail[k - 1] == 0.0 {
                0.0
            } else {
                (tail[k] / tail[k - 1]).clamp(0.0, 1.0)
            }
        })
        .collect();
    TransferSchedule { probabilities }
}

/// Interchangeable ways of applying the (−1)^{jj'} sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseMethod {
    /// n² controlled signs between every x and x' mode.
    PairwiseGates,
    /// Parities of x and x' computed into three logical ancillas.
    ParityAncilla,
    /// Direct basis phase, no gates.
    DirectOracle,
}

/// Gates used during one construction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GateTally {
    /// Transfers whose phase is set by a previous register mode.
    pub conditional_transfers: usize,
    /// Two-mode controlled signs of the pairwise method.
    pub controlled_signs: usize,
    /// Parity CNOTs, computation and uncomputation.
    pub cnots: usize,
    /// Toffolis of the parity method.
    pub toffolis: usize,
    /// Single q_c-controlled sign of the parity method.
    pub overhead_signs: usize,
}

impl GateTally {
    /// Gates counted in the large-n phase cost: n² or 4n.
    pub fn phase_gates(&self) -> usize {
        self.controlled_signs + self.cnots
    }
}

/// A constructed state plus the gates spent building it.
#[derive(Clone, Debug, PartialEq)]
pub struct Prepared {
    pub state: SparseState,
    pub layout: RegisterLayout,
    pub tally: GateTally,
}

/// Basis label of branch j over one x,y register pair:
/// |1^j 0^{n−j}⟩_x |0^j 1^{n−j}⟩_y.
pub fn branch_occupation(n: usize, j: usize) -> Occupation {
    Occupation::with_ones(2 * n, (0..j).chain(n + j..2 * n))
}

/// One photon in every mode of the named registers, vacuum elsewhere.
pub fn inject_singles(layout: &RegisterLayout, registers: &[&str]) -> Result<SparseState> {
    let mut occupied = Vec::new();
    for name in registers {
        occupied.extend(layout.range(name)?);
    }
    Ok(SparseState::basis(Occupation::with_ones(
        layout.total_modes(),
        occupied,
    )))
}

/// Runs the transfer chain y_k → x_k on one register. The first transfer is
/// unconditional; transfer k is conditioned on x_{k−1} being occupied.
fn transfer_chain(
    state: &SparseState,
    x: &[usize],
    y: &[usize],
    schedule: &TransferSchedule,
    tally: &mut GateTally,
) -> Result<SparseState> {
    let mut s = state.clone();
    for (k, &p) in schedule.probabilities().iter().enumerate() {
        let setting = transmission_for_probability(p)?;
        s = if k == 0 {
            conditional_transfer(&s, y[0], x[0], &setting)?
        } else {
            tally.conditional_transfers += 1;
            controlled_transfer(&s, x[k - 1], y[k], x[k], &setting)?
        };
    }
    Ok(s)
}

/// Builds the single-register ancilla by injection and conditional
/// transfers.
pub fn build_single_register(profile: &AmplitudeProfile) -> Result<Prepared> {
    profile.require_non_negative()?;
    let n = profile.n();
    let layout = RegisterLayout::single_pair(n);
    let schedule = schedule_from_profile(profile);
    let mut tally = GateTally::default();
    let start = inject_singles(&layout, &[Y])?;
    let state = transfer_chain(
        &start,
        &layout.modes(X)?,
        &layout.modes(Y)?,
        &schedule,
        &mut tally,
    )?;
    Ok(Prepared {
        state,
        layout,
        tally,
    })
}

/// Σ_j f(j) |1^j 0^{n−j}⟩_x |0^j 1^{n−j}⟩_y written out term by term.
pub fn direct_oracle_single(profile: &AmplitudeProfile) -> SparseState {
    let n = profile.n();
    let terms = (0..=n).map(|j| (branch_occupation(n, j), Complex64::new(profile.f(j), 0.0)));
    SparseState::from_terms(2 * n, terms)
        .and_then(|s| s.normalize())
        .expect("normalized profile gives a valid state")
}

fn pair_oracle(profile: &AmplitudeProfile, entangled: bool) -> SparseState {
    let n = profile.n();
    let mut terms = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for jp in 0..=n {
            let sign = if entangled && (j * jp) % 2 == 1 { -1.0 } else { 1.0 };
            let occ = branch_occupation(n, j).concat(&branch_occupation(n, jp));
            terms.push((occ, Complex64::new(sign * profile.f(j) * profile.f(jp), 0.0)));
        }
    }
    SparseState::from_terms(4 * n, terms)
        .and_then(|s| s.normalize())
        .expect("normalized profile gives a valid state")
}

/// Σ_{j,j'} (−1)^{jj'} f(j) f(j') over x, y, x', y'.
pub fn direct_oracle_pair(profile: &AmplitudeProfile) -> SparseState {
    pair_oracle(profile, true)
}

/// The pair oracle with the sign factor forced to +1.
pub fn direct_oracle_product(profile: &AmplitudeProfile) -> SparseState {
    pair_oracle(profile, false)
}

/// Multiplies every term of a two-register state by (−1)^{jj'}.
///
/// `layout` must contain x and x' of equal size. The parity method borrows
/// three extra modes and checks that they return to |000⟩.
pub fn apply_entangling_phase(
    state: &SparseState,
    layout: &RegisterLayout,
    method: PhaseMethod,
    tally: &mut GateTally,
) -> Result<SparseState> {
    if layout.total_modes() != state.modes() {
        return Err(Error::ShapeMismatch(format!(
            "layout has {} modes, state has {}",
            layout.total_modes(),
            state.modes()
        )));
    }
    let x = layout.modes(X)?;
    let xp = layout.modes(X_PRIME)?;
    if x.len() != xp.len() || x.is_empty() {
        return Err(Error::ShapeMismatch(format!(
            "x has {} modes, x' has {}",
            x.len(),
            xp.len()
        )));
    }
    match method {
        PhaseMethod::DirectOracle => Ok(state.apply_basis_phase(|occ| {
            PI * f64::from(occ.total_on(x.iter().copied()) * occ.total_on(xp.iter().copied()))
        })),
        PhaseMethod::PairwiseGates => {
            let mut s = state.clone();
            for &a in &x {
                for &b in &xp {
                    s = controlled_sign(&s, &[a], b)?;
                    tally.controlled_signs += 1;
                }
            }
            Ok(s)
        }
        PhaseMethod::ParityAncilla => parity_phase(state, &x, &xp, tally),
    }
}

fn parity_phase(
    state: &SparseState,
    x: &[usize],
    xp: &[usize],
    tally: &mut GateTally,
) -> Result<SparseState> {
    let base = state.modes();
    let (qa, qb, qc) = (base, base + 1, base + 2);
    let parities = |mut s: SparseState, tally: &mut GateTally| -> Result<SparseState> {
        for &m in x {
            s = cnot_logical(&s, m, qa)?;
        }
        for &m in xp {
            s = cnot_logical(&s, m, qb)?;
        }
        tally.cnots += x.len() + xp.len();
        Ok(s)
    };
    let mut s = parities(state.extend_modes(3), tally)?;
    s = toffoli_logical(&s, qa, qb, qc)?;
    s = controlled_sign(&s, &[qc], x[0])?;
    s = toffoli_logical(&s, qa, qb, qc)?;
    tally.toffolis += 2;
    tally.overhead_signs += 1;
    s = parities(s, tally)?;

    let ancillas = [qa, qb, qc];
    let (_, leftover) = s.partition(|occ| ancillas.iter().all(|&m| occ.get(m) == 0));
    let residual = leftover.norm();
    if residual > 1e-12 {
        return Err(Error::AncillaNotDisentangled(residual));
    }
    s.select_outcome(&ancillas, &[0, 0, 0])
}

/// Builds the entangled pair: both registers by conditional transfers, then
/// the (−1)^{jj'} sign by `method`.
pub fn build_entangled_pair(profile: &AmplitudeProfile, method: PhaseMethod) -> Result<Prepared> {
    profile.require_non_negative()?;
    let n = profile.n();
    let layout = RegisterLayout::double_pair(n);
    let schedule = schedule_from_profile(profile);
    let mut tally = GateTally::default();
    let mut s = inject_singles(&layout, &[Y, Y_PRIME])?;
    s = transfer_chain(&s, &layout.modes(X)?, &layout.modes(Y)?, &schedule, &mut tally)?;
    s = transfer_chain(
        &s,
        &layout.modes(X_PRIME)?,
        &layout.modes(Y_PRIME)?,
        &schedule,
        &mut tally,
    )?;
    let state = apply_entangling_phase(&s, &layout, method, &mut tally)?;
    Ok(Prepared {
        state,
        layout,
        tally,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn schedule_examples() {
        let p = schedule_from_profile(&AmplitudeProfile::constant(3).unwrap());
        assert_eq!(p.probabilities(), &[0.75, 2.0 / 3.0, 0.5]);
        let p = schedule_from_profile(&AmplitudeProfile::constant(1).unwrap());
        assert_abs_diff_eq!(p.probabilities()[0], 0.5, epsilon = 1e-15);
        let p = schedule_from_profile(&AmplitudeProfile::delta(3).unwrap());
        assert_eq!(p.probabilities(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn empty_tail_gives_zero() {
        let prof = AmplitudeProfile::new(vec![1.0, 0.0, 0.0]).unwrap();
        let p = schedule_from_profile(&prof);
        assert_eq!(p.probabilities(), &[0.0, 0.0]);
    }

    #[test]
    fn profile_validation() {
        assert!(AmplitudeProfile::new(vec![0.0, 0.0]).is_err());
        assert!(AmplitudeProfile::new(vec![1.0]).is_err());
        assert!(AmplitudeProfile::new(vec![1.0, f64::NAN]).is_err());
        let p = AmplitudeProfile::from_json(r#"{"n": 2, "f": [1, 1, 1]}"#).unwrap();
        assert_abs_diff_eq!(p.f(1), 1.0 / 3f64.sqrt(), epsilon = 1e-15);
        assert!(AmplitudeProfile::from_json(r#"{"n": 3, "f": [1, 1]}"#).is_err());
        let signed = AmplitudeProfile::new(vec![1.0, -1.0]).unwrap();
        assert!(matches!(
            build_single_register(&signed),
            Err(Error::InvalidProfile(_))
        ));
    }

    #[test]
    fn inject_examples() {
        let l = RegisterLayout::double_pair(3);
        let s = inject_singles(&l, &[Y, Y_PRIME]).unwrap();
        let expect = Occupation::from([0, 0, 0, 1, 1, 1, 0, 0, 0, 1, 1, 1]);
        assert_eq!(s, SparseState::basis(expect));
        let l = RegisterLayout::single_pair(2);
        let s = inject_singles(&l, &[Y]).unwrap();
        assert_eq!(s, SparseState::basis(Occupation::from([0, 0, 1, 1])));
    }

    #[test]
    fn single_register_examples() {
        let built = build_single_register(&AmplitudeProfile::constant(1).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(built.state.amplitude(&Occupation::from([1, 0])).re, h, epsilon = 1e-12);
        assert_abs_diff_eq!(built.state.amplitude(&Occupation::from([0, 1])).re, h, epsilon = 1e-12);

        let built = build_single_register(&AmplitudeProfile::delta(3).unwrap()).unwrap();
        assert_eq!(built.state.len(), 1);
        assert_abs_diff_eq!(
            built.state.amplitude(&Occupation::from([1, 1, 1, 0, 0, 0])).re,
            1.0,
            epsilon = 1e-12
        );

        let built = build_single_register(&AmplitudeProfile::constant(3).unwrap()).unwrap();
        assert_eq!(built.state.len(), 4);
        for j in 0..=3 {
            let a = built.state.amplitude(&branch_occupation(3, j));
            assert_abs_diff_eq!(a.re, 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-12);
        }
        assert_eq!(built.tally.conditional_transfers, 2);
    }

    #[test]
    fn pair_examples() {
        let prof = AmplitudeProfile::constant(1).unwrap();
        for method in [PhaseMethod::PairwiseGates, PhaseMethod::ParityAncilla] {
            let built = build_entangled_pair(&prof, method).unwrap();
            assert_eq!(built.state.len(), 4);
            let a = built.state.amplitude(&Occupation::from([1, 0, 1, 0]));
            assert_abs_diff_eq!(a.re, -0.5, epsilon = 1e-12);
            let a = built.state.amplitude(&Occupation::from([0, 1, 1, 0]));
            assert_abs_diff_eq!(a.re, 0.5, epsilon = 1e-12);
        }

        let built = build_entangled_pair(&AmplitudeProfile::delta(3).unwrap(), PhaseMethod::ParityAncilla)
            .unwrap();
        assert_eq!(built.state.len(), 1);
        let occ = Occupation::from([1, 1, 1, 0, 0, 0, 1, 1, 1, 0, 0, 0]);
        assert_abs_diff_eq!(built.state.amplitude(&occ).re, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn parity_table_for_single_terms() {
        let n = 2;
        let layout = RegisterLayout::double_pair(n);
        for j in 0..=n {
            for jp in 0..=n {
                let occ = branch_occupation(n, j).concat(&branch_occupation(n, jp));
                let s = SparseState::basis(occ.clone());
                let mut tally = GateTally::default();
                let out = apply_entangling_phase(&s, &layout, PhaseMethod::ParityAncilla, &mut tally)
                    .unwrap();
                let expect = if j * jp % 2 == 1 { -1.0 } else { 1.0 };
                assert_abs_diff_eq!(out.amplitude(&occ).re, expect, epsilon = 1e-12);
                assert_eq!(tally.cnots, 4 * n);
                assert_eq!(tally.toffolis, 2);
            }
        }
    }
}
