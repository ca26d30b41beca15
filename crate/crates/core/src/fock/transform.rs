use std::collections::{BTreeMap, HashMap};

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{Occupation, SparseState};
use crate::error::{Error, Result};

/// Square complex matrix acting on a list of modes. Column `l` holds the
/// image of the creation operator on input mode `l`.
pub type ModeMatrix = DMatrix<Complex64>;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Expands ∏_l (Σ_m U[m][l] a_m†)^{n_l} |0⟩ into normalized Fock amplitudes.
fn expand(u: &ModeMatrix, input: &[u32]) -> Vec<(Vec<u32>, Complex64)> {
    let k = input.len();
    let mut poly: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
    poly.insert(vec![0; k], Complex64::new(1.0, 0.0));
    for (l, &count) in input.iter().enumerate() {
        for _ in 0..count {
            let mut next: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
            for (mono, c) in &poly {
                for m in 0..k {
                    let coeff = u[(m, l)];
                    if coeff == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut out = mono.clone();
                    out[m] += 1;
                    *next.entry(out).or_insert(Complex64::new(0.0, 0.0)) += c * coeff;
                }
            }
            poly = next;
        }
    }
    let in_norm: f64 = input.iter().map(|&n| factorial(n)).product::<f64>().sqrt();
    poly.into_iter()
        .map(|(mono, c)| {
            let out_norm: f64 = mono.iter().map(|&n| factorial(n)).product::<f64>().sqrt();
            (mono, c * (out_norm / in_norm))
        })
        .collect()
}

/// Applies the linear-optical transform `u` to the listed modes, leaving all
/// other modes untouched. Multi-photon terms are expanded exactly.
pub fn apply_mode_transform(
    state: &SparseState,
    modes: &[usize],
    u: &ModeMatrix,
) -> Result<SparseState> {
    state.check_distinct(modes)?;
    if u.nrows() != modes.len() || u.ncols() != modes.len() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} matrix for {} modes",
            u.nrows(),
            u.ncols(),
            modes.len()
        )));
    }
    let mut cache: HashMap<Vec<u32>, Vec<(Vec<u32>, Complex64)>> = HashMap::new();
    let mut acc = state.empty_like();
    for (occ, amp) in state.iter() {
        let sub = occ.select(modes);
        let images = cache.entry(sub.clone()).or_insert_with(|| expand(u, &sub));
        for (out, c) in images.iter() {
            let mut counts = occ.counts().to_vec();
            for (&m, &v) in modes.iter().zip(out) {
                counts[m] = v;
            }
            acc.add(Occupation::new(counts), amp * c);
        }
    }
    Ok(state.rebuild(acc))
}

/// The two-mode matrix [[T, iR], [iR, T]] with R = √(1−T²).
pub fn beamsplitter_matrix(t: f64) -> Result<ModeMatrix> {
    if !t.is_finite() || !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidCoefficient(format!(
            "transmission {t} outside [0, 1]"
        )));
    }
    let r = (1.0 - t * t).max(0.0).sqrt();
    let tt = Complex64::new(t, 0.0);
    let ir = Complex64::new(0.0, r);
    Ok(ModeMatrix::from_row_slice(2, 2, &[tt, ir, ir, tt]))
}

/// In-place beamsplitter: a†_{m1} → T a†_{m1} + iR a†_{m2} and
/// a†_{m2} → iR a†_{m1} + T a†_{m2}.
pub fn apply_beamsplitter(state: &SparseState, m1: usize, m2: usize, t: f64) -> Result<SparseState> {
    let u = beamsplitter_matrix(t)?;
    apply_mode_transform(state, &[m1, m2], &u)
}

/// Inverse of [`apply_beamsplitter`] with the same arguments.
pub fn apply_beamsplitter_inverse(
    state: &SparseState,
    m1: usize,
    m2: usize,
    t: f64,
) -> Result<SparseState> {
    let u = beamsplitter_matrix(t)?.adjoint();
    apply_mode_transform(state, &[m1, m2], &u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn amp(s: &SparseState, occ: [u32; 2]) -> Complex64 {
        s.amplitude(&Occupation::from(occ))
    }

    #[test]
    fn fully_transmitting_is_identity() {
        let s = SparseState::basis(Occupation::from([1, 0]));
        assert_eq!(apply_beamsplitter(&s, 0, 1, 1.0).unwrap(), s);
    }

    #[test]
    fn balanced_single_photon() {
        let s = SparseState::basis(Occupation::from([1, 0]));
        let out = apply_beamsplitter(&s, 0, 1, FRAC_1_SQRT_2).unwrap();
        assert_abs_diff_eq!(amp(&out, [1, 0]).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(amp(&out, [0, 1]).im, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn two_photon_bunching() {
        let s = SparseState::basis(Occupation::from([1, 1]));
        let out = apply_beamsplitter(&s, 0, 1, FRAC_1_SQRT_2).unwrap();
        assert_eq!(out.len(), 2);
        for occ in [[2, 0], [0, 2]] {
            let a = amp(&out, occ);
            assert_abs_diff_eq!(a.re, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(a.im, FRAC_1_SQRT_2, epsilon = 1e-15);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let s = SparseState::vacuum(2);
        assert!(matches!(
            apply_beamsplitter(&s, 0, 1, 1.5),
            Err(Error::InvalidCoefficient(_))
        ));
        assert!(matches!(
            apply_beamsplitter(&s, 0, 2, 0.5),
            Err(Error::ModeOutOfRange { .. })
        ));
        assert!(matches!(
            apply_beamsplitter(&s, 1, 1, 0.5),
            Err(Error::ModesNotDistinct(_))
        ));
    }

    #[test]
    fn inverse_round_trip() {
        let s = SparseState::basis(Occupation::from([2, 1]));
        let fwd = apply_beamsplitter(&s, 1, 0, 0.3).unwrap();
        let back = apply_beamsplitter_inverse(&fwd, 1, 0, 0.3).unwrap();
        assert_abs_diff_eq!(back.fidelity(&s).unwrap(), 1.0, epsilon = 1e-12);
    }
}
