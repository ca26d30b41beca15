use std::collections::BTreeMap;

use num_complex::Complex64;

use super::Occupation;
use crate::error::{Error, Result};

/// Default pruning threshold on |amplitude|.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Sparse multimode Fock state: occupation labels mapped to complex
/// amplitudes.
///
/// Every operation returns a new state; inputs are never mutated. Terms whose
/// amplitude magnitude falls below the tolerance are dropped. Global phase is
/// carried through untouched.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseState {
    modes: usize,
    terms: BTreeMap<Occupation, Complex64>,
    tolerance: f64,
}

/// One measurement result from [`SparseState::measure_modes`].
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOutcome {
    /// Counts on the measured modes, in the order they were requested.
    pub counts: Vec<u32>,
    pub probability: f64,
    /// Normalized post-measurement state over the unmeasured modes.
    pub residual: SparseState,
}

impl MeasurementOutcome {
    pub fn total(&self) -> u32 {
        self.counts.iter().sum()
    }
}

/// Collects amplitudes keyed by occupation, summing duplicates.
#[derive(Debug, Default)]
pub(crate) struct Accumulator {
    terms: BTreeMap<Occupation, Complex64>,
}

impl Accumulator {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, occ: Occupation, amp: Complex64) {
        *self.terms.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += amp;
    }

    pub(crate) fn finish(self, modes: usize, tolerance: f64) -> SparseState {
        let mut terms = self.terms;
        terms.retain(|_, a| a.norm() >= tolerance);
        SparseState {
            modes,
            terms,
            tolerance,
        }
    }
}

impl SparseState {
    /// The zero vector over `modes` modes.
    pub fn zero(modes: usize) -> Self {
        SparseState {
            modes,
            terms: BTreeMap::new(),
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn vacuum(modes: usize) -> Self {
        Self::basis(Occupation::vacuum(modes))
    }

    pub fn basis(occ: Occupation) -> Self {
        let modes = occ.len();
        let mut terms = BTreeMap::new();
        terms.insert(occ, Complex64::new(1.0, 0.0));
        SparseState {
            modes,
            terms,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    /// Builds a state from explicit terms. Duplicate labels are summed.
    pub fn from_terms<I>(modes: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Occupation, Complex64)>,
    {
        let mut acc = Accumulator::new();
        for (occ, amp) in terms {
            if occ.len() != modes {
                return Err(Error::DimensionMismatch {
                    left: modes,
                    right: occ.len(),
                });
            }
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(Error::NonFiniteAmplitude(occ.into_counts()));
            }
            acc.add(occ, amp);
        }
        Ok(acc.finish(modes, DEFAULT_TOLERANCE))
    }

    /// Same state with a different pruning threshold; terms below it are
    /// dropped immediately.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.terms.retain(|_, a| a.norm() >= tolerance);
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Number of stored terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, occ: &Occupation) -> Complex64 {
        self.terms
            .get(occ)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest single-mode count over all terms.
    pub fn max_occupation(&self) -> u32 {
        self.terms.keys().map(|o| o.max_count()).max().unwrap_or(0)
    }

    pub(crate) fn empty_like(&self) -> Accumulator {
        Accumulator::new()
    }

    pub(crate) fn rebuild(&self, acc: Accumulator) -> SparseState {
        acc.finish(self.modes, self.tolerance)
    }

    pub(crate) fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            Err(Error::ModeOutOfRange {
                mode,
                modes: self.modes,
            })
        } else {
            Ok(())
        }
    }

    pub(crate) fn check_distinct(&self, modes: &[usize]) -> Result<()> {
        for &m in modes {
            self.check_mode(m)?;
        }
        for (i, a) in modes.iter().enumerate() {
            if modes[i + 1..].contains(a) {
                return Err(Error::ModesNotDistinct(modes.to_vec()));
            }
        }
        Ok(())
    }

    /// Rescales to unit 2-norm. Relative and global phases are preserved.
    pub fn normalize(&self) -> Result<Self> {
        let norm = self.norm();
        if self.terms.is_empty() || norm < self.tolerance {
            return Err(Error::ZeroState);
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let mut acc = self.empty_like();
        for (occ, a) in &self.terms {
            acc.add(occ.clone(), a * factor);
        }
        self.rebuild(acc)
    }

    /// Sum of two states over the same modes.
    pub fn superpose(&self, other: &SparseState) -> Result<Self> {
        self.check_same_modes(other)?;
        let mut acc = self.empty_like();
        for (occ, a) in self.terms.iter().chain(other.terms.iter()) {
            acc.add(occ.clone(), *a);
        }
        Ok(self.rebuild(acc))
    }

    fn check_same_modes(&self, other: &SparseState) -> Result<()> {
        if self.modes != other.modes {
            return Err(Error::DimensionMismatch {
                left: self.modes,
                right: other.modes,
            });
        }
        Ok(())
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &SparseState) -> Result<Complex64> {
        self.check_same_modes(other)?;
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut sum = Complex64::new(0.0, 0.0);
        for (occ, a) in &small.terms {
            if let Some(b) = large.terms.get(occ) {
                sum += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(sum)
    }

    /// |⟨self|other⟩|², clamped to [0, 1].
    pub fn fidelity(&self, other: &SparseState) -> Result<f64> {
        fidelity(self, other)
    }

    /// Splits into (terms satisfying `pred`, the rest). Neither part is
    /// renormalized.
    pub fn partition(&self, pred: impl Fn(&Occupation) -> bool) -> (Self, Self) {
        let mut yes = self.empty_like();
        let mut no = self.empty_like();
        for (occ, a) in &self.terms {
            if pred(occ) {
                yes.add(occ.clone(), *a);
            } else {
                no.add(occ.clone(), *a);
            }
        }
        (self.rebuild(yes), self.rebuild(no))
    }

    /// Relabels every term through `f`. `f` must be injective on the support
    /// for the result to keep the same norm.
    pub fn map_occupations(
        &self,
        modes: usize,
        f: impl Fn(&Occupation) -> Occupation,
    ) -> Result<Self> {
        let mut acc = Accumulator::new();
        for (occ, a) in &self.terms {
            let mapped = f(occ);
            if mapped.len() != modes {
                return Err(Error::DimensionMismatch {
                    left: modes,
                    right: mapped.len(),
                });
            }
            acc.add(mapped, *a);
        }
        Ok(acc.finish(modes, self.tolerance))
    }

    /// Multiplies each term by exp(i·φ·n) where n is its count on `mode`.
    pub fn apply_phase(&self, mode: usize, phi: f64) -> Result<Self> {
        self.check_mode(mode)?;
        Ok(self.apply_basis_phase(|occ| phi * f64::from(occ.get(mode))))
    }

    /// Multiplies each term by exp(i·phase_fn(label)).
    pub fn apply_basis_phase(&self, phase_fn: impl Fn(&Occupation) -> f64) -> Self {
        let mut acc = self.empty_like();
        for (occ, a) in &self.terms {
            let phi = phase_fn(occ);
            acc.add(occ.clone(), a * Complex64::from_polar(1.0, phi));
        }
        self.rebuild(acc)
    }

    /// Tensor product, `self` modes first.
    pub fn tensor(&self, other: &SparseState) -> Self {
        let mut acc = Accumulator::new();
        for (oa, a) in &self.terms {
            for (ob, b) in &other.terms {
                acc.add(oa.concat(ob), a * b);
            }
        }
        acc.finish(self.modes + other.modes, self.tolerance.min(other.tolerance))
    }

    /// Appends `extra` vacuum modes after the existing ones.
    pub fn extend_modes(&self, extra: usize) -> Self {
        self.tensor(&SparseState::vacuum(extra).with_tolerance(self.tolerance))
    }

    /// Keeps only terms whose counts on `modes` equal `counts`, dropping those
    /// modes. The result is not renormalized.
    pub fn select_outcome(&self, modes: &[usize], counts: &[u32]) -> Result<Self> {
        self.check_distinct(modes)?;
        if modes.len() != counts.len() {
            return Err(Error::DimensionMismatch {
                left: modes.len(),
                right: counts.len(),
            });
        }
        let mut acc = Accumulator::new();
        for (occ, a) in &self.terms {
            if occ.select(modes) == counts {
                acc.add(occ.without(modes), *a);
            }
        }
        Ok(acc.finish(self.modes - modes.len(), self.tolerance))
    }

    /// Projective photon-number measurement of `modes`.
    ///
    /// Returns every outcome with nonzero probability, sorted by the measured
    /// counts. Each residual is normalized and omits the measured modes.
    pub fn measure_modes(&self, modes: &[usize]) -> Result<Vec<MeasurementOutcome>> {
        self.check_distinct(modes)?;
        let total = self.norm_sqr();
        if total < self.tolerance * self.tolerance {
            return Err(Error::ZeroState);
        }
        let mut groups: BTreeMap<Vec<u32>, Accumulator> = BTreeMap::new();
        for (occ, a) in &self.terms {
            groups
                .entry(occ.select(modes))
                .or_default()
                .add(occ.without(modes), *a);
        }
        let rest = self.modes - modes.len();
        let mut outcomes = Vec::with_capacity(groups.len());
        for (counts, acc) in groups {
            let branch = acc.finish(rest, self.tolerance);
            let weight = branch.norm_sqr();
            if branch.is_empty() {
                continue;
            }
            let residual = branch.scale(Complex64::new(1.0 / weight.sqrt(), 0.0));
            outcomes.push(MeasurementOutcome {
                counts,
                probability: weight / total,
                residual,
            });
        }
        Ok(outcomes)
    }
}

/// |⟨a|b⟩|² for two states over the same modes.
pub fn fidelity(a: &SparseState, b: &SparseState) -> Result<f64> {
    let overlap = a.inner(b)?;
    Ok(overlap.norm_sqr().clamp(0.0, 1.0))
}
