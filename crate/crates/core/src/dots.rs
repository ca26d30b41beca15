//! Quantum-dot preparation of the ancilla registers.
//!
//! Each register pair is a row of 2n dots: x̃ on dots 0..n and ỹ on dots
//! n..2n, both stored in reverse order relative to the photonic x and y. A
//! second pair, when present, occupies dots 2n..4n. A dot holds at most one
//! excitation; any pulse that would put two on one dot is an error.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::fock::{Accumulator, Occupation, SparseState};
use crate::pipeline::{schedule_from_profile, AmplitudeProfile};

/// One control operation on the dot array.
#[derive(Clone, Debug, PartialEq)]
pub enum Pulse {
    /// Empties every dot.
    Thermalize,
    /// Sets an empty dot to occupied.
    LoadFromReservoir(usize),
    /// Rabi rotation moving an excitation from `from` toward `to`; θ = π/2
    /// is a complete transfer.
    Rabi { from: usize, to: usize, theta: f64 },
    /// Coulomb phase κt·jj' + λ·(j(j−1)/2 + j'(j'−1)/2) between x̃ and x̃'.
    InteractionPhase { kappa_t: f64, lambda: f64 },
    /// Phase `table[j]` on each pair with j occupied x̃ dots.
    UGateCorrection(Vec<f64>),
}

#[derive(Serialize, Deserialize)]
struct PulseLine {
    op: String,
    args: Vec<Value>,
}

fn arg_f64(args: &[Value], i: usize) -> Result<f64> {
    args.get(i)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Parse(format!("argument {i} must be a number")))
}

fn arg_usize(args: &[Value], i: usize) -> Result<usize> {
    args.get(i)
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .ok_or_else(|| Error::Parse(format!("argument {i} must be a dot index")))
}

impl Pulse {
    fn to_line(&self) -> PulseLine {
        let (op, args): (&str, Vec<Value>) = match self {
            Pulse::Thermalize => ("thermalize", vec![]),
            Pulse::LoadFromReservoir(d) => ("load", vec![(*d).into()]),
            Pulse::Rabi { from, to, theta } => {
                ("rabi", vec![(*from).into(), (*to).into(), (*theta).into()])
            }
            Pulse::InteractionPhase { kappa_t, lambda } => {
                ("interaction_phase", vec![(*kappa_t).into(), (*lambda).into()])
            }
            Pulse::UGateCorrection(t) => ("u_gate", t.iter().map(|&v| v.into()).collect()),
        };
        PulseLine {
            op: op.to_string(),
            args,
        }
    }

    fn from_line(line: PulseLine) -> Result<Self> {
        let a = &line.args;
        let expect = |len: usize| -> Result<()> {
            if a.len() == len {
                Ok(())
            } else {
                Err(Error::Parse(format!(
                    "{} takes {len} arguments, got {}",
                    line.op,
                    a.len()
                )))
            }
        };
        match line.op.as_str() {
            "thermalize" => {
                expect(0)?;
                Ok(Pulse::Thermalize)
            }
            "load" => {
                expect(1)?;
                Ok(Pulse::LoadFromReservoir(arg_usize(a, 0)?))
            }
            "rabi" => {
                expect(3)?;
                Ok(Pulse::Rabi {
                    from: arg_usize(a, 0)?,
                    to: arg_usize(a, 1)?,
                    theta: arg_f64(a, 2)?,
                })
            }
            "interaction_phase" => {
                expect(2)?;
                Ok(Pulse::InteractionPhase {
                    kappa_t: arg_f64(a, 0)?,
                    lambda: arg_f64(a, 1)?,
                })
            }
            "u_gate" => Ok(Pulse::UGateCorrection(
                (0..a.len()).map(|i| arg_f64(a, i)).collect::<Result<_>>()?,
            )),
            other => Err(Error::Parse(format!("unknown pulse {other:?}"))),
        }
    }
}

/// Ordered pulses, serialized as JSON lines `{"op": name, "args": [...]}`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PulseSchedule {
    pulses: Vec<Pulse>,
}

impl PulseSchedule {
    pub fn new(pulses: Vec<Pulse>) -> Self {
        PulseSchedule { pulses }
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    fn push(&mut self, p: Pulse) {
        self.pulses.push(p);
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for p in &self.pulses {
            let line = serde_json::to_string(&p.to_line()).expect("pulse serializes");
            writeln!(out, "{line}").expect("writing to a String");
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let pulses = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                let line: PulseLine =
                    serde_json::from_str(l).map_err(|e| Error::Parse(e.to_string()))?;
                Pulse::from_line(line)
            })
            .collect::<Result<_>>()?;
        Ok(PulseSchedule { pulses })
    }
}

/// Geometry of one or two register pairs of n dots per register.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DotArray {
    pub n: usize,
    pub pairs: usize,
}

impl DotArray {
    pub fn single(n: usize) -> Self {
        DotArray { n, pairs: 1 }
    }

    pub fn pair(n: usize) -> Self {
        DotArray { n, pairs: 2 }
    }

    pub fn dots(&self) -> usize {
        2 * self.n * self.pairs
    }

    pub fn empty(&self) -> SparseState {
        SparseState::vacuum(self.dots())
    }

    /// Dots of x̃ for register pair `p`.
    pub fn x_dots(&self, p: usize) -> std::ops::Range<usize> {
        let base = 2 * self.n * p;
        base..base + self.n
    }

    /// Number of occupied x̃ dots in each pair.
    fn register_counts(&self, occ: &Occupation) -> Vec<u32> {
        (0..self.pairs).map(|p| occ.total_on(self.x_dots(p))).collect()
    }

    fn check_dot(&self, dot: usize) -> Result<()> {
        if dot >= self.dots() {
            return Err(Error::DotOutOfRange {
                dot,
                dots: self.dots(),
            });
        }
        Ok(())
    }

    fn check_state(&self, state: &SparseState) -> Result<()> {
        if state.modes() != self.dots() {
            return Err(Error::ShapeMismatch(format!(
                "array has {} dots, state has {} modes",
                self.dots(),
                state.modes()
            )));
        }
        Ok(())
    }
}

/// First dot holding two or more excitations in any term.
fn blockade_violation(state: &SparseState) -> Option<(usize, u32)> {
    state.iter().find_map(|(occ, _)| {
        occ.counts()
            .iter()
            .enumerate()
            .find(|(_, &c)| c > 1)
            .map(|(d, &c)| (d, c))
    })
}

fn check_blockade(state: &SparseState) -> Result<()> {
    match blockade_violation(state) {
        Some((dot, count)) => Err(Error::BlockadeViolated { dot, count }),
        None => Ok(()),
    }
}

/// Rabi rotation between two dots. On {|1_from 0_to⟩, |0_from 1_to⟩}:
///
/// |10⟩ → cos θ |10⟩ + sin θ |01⟩, |01⟩ → −sin θ |10⟩ + cos θ |01⟩;
///
/// |00⟩ and |11⟩ are unchanged. This is the raw coupling (cos θ, i sin θ)
/// conjugated by a π/2 phase on `to`, so the transferred amplitude is real
/// and non-negative.
pub fn rabi(state: &SparseState, from: usize, to: usize, theta: f64) -> Result<SparseState> {
    let dots = state.modes();
    for d in [from, to] {
        if d >= dots {
            return Err(Error::DotOutOfRange { dot: d, dots });
        }
    }
    if from == to {
        return Err(Error::InvalidPulse(format!("rabi between dot {from} and itself")));
    }
    if !theta.is_finite() || !(0.0..=FRAC_PI_2 + 1e-15).contains(&theta) {
        return Err(Error::InvalidPulse(format!("θ = {theta} outside [0, π/2]")));
    }
    check_blockade(state)?;
    let (c, s) = (theta.cos(), theta.sin());
    let mut acc = Accumulator::new();
    for (occ, &a) in state.iter() {
        match (occ.get(from), occ.get(to)) {
            (1, 0) => {
                acc.add(occ.clone(), a * c);
                acc.add(occ.with_count(from, 0).with_count(to, 1), a * s);
            }
            (0, 1) => {
                acc.add(occ.clone(), a * c);
                acc.add(occ.with_count(from, 1).with_count(to, 0), -a * s);
            }
            _ => acc.add(occ.clone(), a),
        }
    }
    Ok(acc.finish(dots, state.tolerance()))
}

fn branch_phase(j: u32, kappa_t: f64, jp: u32, lambda: f64) -> f64 {
    let tri = |v: u32| f64::from(v) * (f64::from(v) - 1.0) / 2.0;
    kappa_t * f64::from(j) * f64::from(jp) + lambda * (tri(j) + tri(jp))
}

fn correction(table: &[f64], j: u32) -> Result<f64> {
    table.get(j as usize).copied().ok_or_else(|| {
        Error::ShapeMismatch(format!("correction table has no entry for j = {j}"))
    })
}

/// Multiplies each term by exp(i[κt·jj' + λ(j(j−1)/2 + j'(j'−1)/2)]) and
/// then by exp(i[corrections[j] + corrections[j']]), with j, j' the occupied
/// x̃ and x̃' dots. ỹ dots are shielded and do not contribute.
pub fn interaction_phase(
    state: &SparseState,
    n: usize,
    kappa_t: f64,
    lambda: f64,
    corrections: &[f64],
) -> Result<SparseState> {
    let array = DotArray::pair(n);
    array.check_state(state)?;
    if corrections.len() < n + 1 {
        return Err(Error::ShapeMismatch(format!(
            "need {} corrections, got {}",
            n + 1,
            corrections.len()
        )));
    }
    let mut acc = Accumulator::new();
    for (occ, &a) in state.iter() {
        let js = array.register_counts(occ);
        let (j, jp) = (js[0], js[1]);
        let phase = branch_phase(j, kappa_t, jp, lambda)
            + correction(corrections, j)?
            + correction(corrections, jp)?;
        acc.add(occ.clone(), a * Complex64::from_polar(1.0, phase));
    }
    Ok(acc.finish(state.modes(), state.tolerance()))
}

/// Per-j phases −λ·j(j−1)/2 (mod 2π) cancelling the intra-register term.
pub fn canonical_corrections(n: usize, lambda: f64) -> Vec<f64> {
    (0..=n)
        .map(|j| (-lambda * (j * j.saturating_sub(1)) as f64 / 2.0).rem_euclid(TAU) + 0.0)
        .collect()
}

/// Transfer from `q` to `t` conditioned on dot `c` being occupied, with
/// effective angle `phi / 2` on that branch. With `c` empty the four pulses
/// compose to the identity.
fn conditional_hop(s: &mut PulseSchedule, t: usize, q: usize, c: usize, phi: f64) {
    s.push(Pulse::Rabi { from: t, to: c, theta: FRAC_PI_2 });
    s.push(Pulse::Rabi { from: c, to: q, theta: phi / 2.0 });
    s.push(Pulse::Rabi { from: c, to: t, theta: FRAC_PI_2 });
    s.push(Pulse::Rabi { from: q, to: t, theta: phi / 2.0 });
}

/// Pulses preparing one register pair on dots `offset..offset + 2n`,
/// without the initial Thermalize.
fn prepare_pair(s: &mut PulseSchedule, profile: &AmplitudeProfile, offset: usize) -> Result<()> {
    if profile.values().iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidProfile(
            "the dot compiler accepts only non-negative f(j)".into(),
        ));
    }
    let n = profile.n();
    let d = |i: usize| offset + i;
    let rabi = |from: usize, to: usize, theta: f64| Pulse::Rabi {
        from: d(from),
        to: d(to),
        theta,
    };
    // Fill ỹ from its far end, shuffling each load left.
    for m in 0..n {
        s.push(Pulse::LoadFromReservoir(d(2 * n - 1)));
        for i in (n + m + 1..2 * n).rev() {
            s.push(rabi(i, i - 1, FRAC_PI_2));
        }
    }
    let schedule = schedule_from_profile(profile);
    for (idx, &p) in schedule.probabilities().iter().enumerate() {
        let k = idx + 1;
        let (src, dst) = (n - k + 1, n - k);
        s.push(rabi(src, dst, p.sqrt().asin()));
        if k == 1 {
            for i in n..2 * n - 1 {
                s.push(rabi(i + 1, i, FRAC_PI_2));
            }
        } else {
            // Close the gap left at `src` only on branches where `dst` was
            // filled, so earlier stay branches are untouched.
            for i in n - k + 1..2 * n - k {
                conditional_hop(s, d(i), d(i + 1), d(dst), FRAC_PI_2);
            }
        }
    }
    Ok(())
}

/// Schedule preparing one register pair: Thermalize, then loads, a boundary
/// partial transfer per step, and the shifts that keep the occupied block
/// contiguous.
///
/// After execution branch j holds 0^{n−j} 1^n 0^j across the 2n dots with
/// amplitude f(j).
pub fn compile_schedule(profile: &AmplitudeProfile) -> Result<PulseSchedule> {
    let mut s = PulseSchedule::default();
    s.push(Pulse::Thermalize);
    prepare_pair(&mut s, profile, 0)?;
    Ok(s)
}

/// Both register pairs, then the Coulomb phase with κt = π and the U-gate
/// table cancelling the intra-register term for `lambda`.
pub fn compile_pair_schedule(profile: &AmplitudeProfile, lambda: f64) -> Result<PulseSchedule> {
    let n = profile.n();
    let mut s = PulseSchedule::default();
    s.push(Pulse::Thermalize);
    prepare_pair(&mut s, profile, 0)?;
    prepare_pair(&mut s, profile, 2 * n)?;
    s.push(Pulse::InteractionPhase { kappa_t: PI, lambda });
    s.push(Pulse::UGateCorrection(canonical_corrections(n, lambda)));
    Ok(s)
}

/// Length of [`compile_schedule`] output:
/// 1 + 2n + (n−1) + n(n−1)/2 + 4(n−1)².
pub fn closed_form_pulse_count(n: usize) -> usize {
    let m = n.saturating_sub(1);
    1 + 2 * n + m + n * m / 2 + 4 * m * m
}

/// Length of [`compile_pair_schedule`] output.
pub fn closed_form_pair_pulse_count(n: usize) -> usize {
    2 * closed_form_pulse_count(n) + 1
}

fn apply_pulse(array: &DotArray, pulse: &Pulse, state: &SparseState) -> Result<SparseState> {
    match pulse {
        Pulse::Thermalize => Ok(array.empty().with_tolerance(state.tolerance())),
        Pulse::LoadFromReservoir(dot) => {
            array.check_dot(*dot)?;
            if let Some((occ, _)) = state.iter().find(|(o, _)| o.get(*dot) > 0) {
                return Err(Error::BlockadeViolated {
                    dot: *dot,
                    count: occ.get(*dot) + 1,
                });
            }
            state.map_occupations(state.modes(), |o| o.with_count(*dot, 1))
        }
        Pulse::Rabi { from, to, theta } => rabi(state, *from, *to, *theta),
        Pulse::InteractionPhase { kappa_t, lambda } => {
            let zero = vec![0.0; array.n + 1];
            interaction_phase(state, array.n, *kappa_t, *lambda, &zero)
        }
        Pulse::UGateCorrection(table) => {
            let mut acc = Accumulator::new();
            for (occ, &a) in state.iter() {
                let mut phase = 0.0;
                for j in array.register_counts(occ) {
                    phase += correction(table, j)?;
                }
                acc.add(occ.clone(), a * Complex64::from_polar(1.0, phase));
            }
            Ok(acc.finish(state.modes(), state.tolerance()))
        }
    }
}

/// Runs `schedule`, returning the state after every pulse. Fails on the
/// first pulse that leaves any dot doubly occupied.
pub fn execute_traced(
    array: &DotArray,
    schedule: &PulseSchedule,
    state: &SparseState,
) -> Result<Vec<SparseState>> {
    array.check_state(state)?;
    let mut trace = Vec::with_capacity(schedule.len());
    let mut current = state.clone();
    for pulse in schedule.pulses() {
        current = apply_pulse(array, pulse, &current)?;
        check_blockade(&current)?;
        trace.push(current.clone());
    }
    Ok(trace)
}

/// Runs `schedule` and returns the final state.
pub fn execute(array: &DotArray, schedule: &PulseSchedule, state: &SparseState) -> Result<SparseState> {
    array.check_state(state)?;
    let mut current = state.clone();
    for pulse in schedule.pulses() {
        current = apply_pulse(array, pulse, &current)?;
        check_blockade(&current)?;
    }
    Ok(current)
}

/// Converts dot occupancies to photons in the x, y (and x', y') fiber modes,
/// undoing the reversed dot order within each register.
pub fn emit_photons(state: &SparseState, n: usize) -> Result<SparseState> {
    if n == 0 || !state.modes().is_multiple_of(2 * n) {
        return Err(Error::ShapeMismatch(format!(
            "{} dots is not a whole number of pairs for n = {n}",
            state.modes()
        )));
    }
    let modes = state.modes();
    state.map_occupations(modes, |occ| {
        let counts = occ.counts();
        (0..modes)
            .map(|m| {
                let (base, within) = (m - m % (2 * n), m % (2 * n));
                let (start, i) = if within < n { (0, within) } else { (n, within - n) };
                counts[base + start + (n - 1 - i)]
            })
            .collect()
    })
}
