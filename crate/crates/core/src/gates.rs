//! Conditional-transfer interferometer and logical gates on 0/1 modes.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{apply_beamsplitter, Accumulator, Occupation, SparseState};

/// Internal phase of the transfer interferometer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseSetting {
    /// φ = 0: the photon is transferred with amplitude 2iRT.
    Zero,
    /// φ = π: the photon stays in the source mode.
    Pi,
}

impl PhaseSetting {
    pub fn radians(self) -> f64 {
        match self {
            PhaseSetting::Zero => 0.0,
            PhaseSetting::Pi => PI,
        }
    }
}

/// Beamsplitter coefficients and internal phase of one transfer gadget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferSetting {
    t: f64,
    r: f64,
    phi: PhaseSetting,
}

impl TransferSetting {
    pub fn new(t: f64, phi: PhaseSetting) -> Result<Self> {
        if !t.is_finite() || !(0.0..=1.0).contains(&t) {
            return Err(Error::OutOfRange {
                what: "T",
                value: t,
                range: "[0, 1]",
            });
        }
        Ok(TransferSetting {
            t,
            r: (1.0 - t * t).max(0.0).sqrt(),
            phi,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn phi(&self) -> PhaseSetting {
        self.phi
    }

    pub fn with_phase(self, phi: PhaseSetting) -> Self {
        TransferSetting { phi, ..self }
    }

    /// Probability 4R²T² that a single photon is transferred when φ = 0.
    pub fn transfer_probability(&self) -> f64 {
        4.0 * self.r * self.r * self.t * self.t
    }
}

/// Smaller-root transmission giving transfer probability `p`:
/// T² = (1 − √(1 − p)) / 2, so T ≤ 1/√2. The phase is set to φ = 0.
pub fn transmission_for_probability(p: f64) -> Result<TransferSetting> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            what: "P",
            value: p,
            range: "[0, 1]",
        });
    }
    let t = if p == 1.0 {
        FRAC_1_SQRT_2
    } else {
        ((1.0 - (1.0 - p).sqrt()) / 2.0).sqrt()
    };
    TransferSetting::new(t, PhaseSetting::Zero)
}

/// Raw gadget: beamsplitter, phase φ on the source path, beamsplitter.
/// No phase fixup is applied.
pub fn interferometer(
    state: &SparseState,
    src: usize,
    dst: usize,
    setting: &TransferSetting,
) -> Result<SparseState> {
    let s = apply_beamsplitter(state, src, dst, setting.t)?;
    let s = s.apply_phase(src, setting.phi.radians())?;
    apply_beamsplitter(&s, src, dst, setting.t)
}

/// Fixed phases (π on the source, −π/2 on the destination) that make a
/// single photon's stay amplitude +√(1−P) and transfer amplitude +√P when
/// T ≤ 1/√2; the φ = π branch becomes +|src⟩.
fn phase_fixup(state: &SparseState, src: usize, dst: usize) -> Result<SparseState> {
    state.apply_phase(src, PI)?.apply_phase(dst, -FRAC_PI_2)
}

/// The transfer gadget followed by the canonical phase fixup.
pub fn conditional_transfer(
    state: &SparseState,
    src: usize,
    dst: usize,
    setting: &TransferSetting,
) -> Result<SparseState> {
    phase_fixup(&interferometer(state, src, dst, setting)?, src, dst)
}

/// Transfer gadget whose phase is chosen by the occupancy of `control`:
/// φ = 0 on terms where it is occupied, φ = π elsewhere.
pub fn controlled_transfer(
    state: &SparseState,
    control: usize,
    src: usize,
    dst: usize,
    setting: &TransferSetting,
) -> Result<SparseState> {
    state.check_distinct(&[control, src, dst])?;
    let (go, stay) = state.partition(|occ| occ.is_occupied(control));
    let go = interferometer(&go, src, dst, &setting.with_phase(PhaseSetting::Zero))?;
    let stay = interferometer(&stay, src, dst, &setting.with_phase(PhaseSetting::Pi))?;
    phase_fixup(&go.superpose(&stay)?, src, dst)
}

/// Sign flip on terms where every control and the target are occupied.
pub fn controlled_sign(state: &SparseState, controls: &[usize], target: usize) -> Result<SparseState> {
    let mut all = controls.to_vec();
    all.push(target);
    state.check_distinct(&all)?;
    let mut acc = Accumulator::new();
    for (occ, &a) in state.iter() {
        let flip = all.iter().all(|&m| occ.is_occupied(m));
        acc.add(occ.clone(), if flip { -a } else { a });
    }
    Ok(acc.finish(state.modes(), state.tolerance()))
}

fn check_binary(state: &SparseState, mode: usize) -> Result<()> {
    state.check_mode(mode)?;
    match state.iter().map(|(o, _)| o.get(mode)).find(|&c| c > 1) {
        Some(count) => Err(Error::NonBinaryTarget { mode, count }),
        None => Ok(()),
    }
}

/// Flips the 0/1 occupancy of `target` on terms where `control` is occupied.
pub fn cnot_logical(state: &SparseState, control: usize, target: usize) -> Result<SparseState> {
    state.check_distinct(&[control, target])?;
    check_binary(state, target)?;
    state.map_occupations(state.modes(), |occ| {
        if occ.is_occupied(control) {
            occ.with_count(target, 1 - occ.get(target))
        } else {
            occ.clone()
        }
    })
}

/// Hadamard on a mode holding 0 or 1 photons, treated as a qubit.
pub fn hadamard_logical(state: &SparseState, mode: usize) -> Result<SparseState> {
    check_binary(state, mode)?;
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let mut acc = Accumulator::new();
    for (occ, a) in state.iter() {
        let zero: Occupation = occ.with_count(mode, 0);
        let one = occ.with_count(mode, 1);
        let sign = if occ.get(mode) == 1 { -1.0 } else { 1.0 };
        acc.add(zero, a * h);
        acc.add(one, a * h * sign);
    }
    Ok(acc.finish(state.modes(), state.tolerance()))
}

/// Toffoli on 0/1 modes: H(target) · CCZ · H(target).
pub fn toffoli_logical(state: &SparseState, c1: usize, c2: usize, target: usize) -> Result<SparseState> {
    let s = hadamard_logical(state, target)?;
    let s = controlled_sign(&s, &[c1, c2], target)?;
    hadamard_logical(&s, target)
}
