#![allow(dead_code)]

use ancilla_core::fock::{ModeMatrix, Occupation, SparseState};
use ancilla_core::pipeline::AmplitudeProfile;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Permanent by expansion over all permutations. Fine up to ~7 photons.
pub fn permanent(m: &[Vec<Complex64>]) -> Complex64 {
    fn go(m: &[Vec<Complex64>], row: usize, used: &mut Vec<bool>) -> Complex64 {
        if row == m.len() {
            return c(1.0, 0.0);
        }
        let mut sum = c(0.0, 0.0);
        for col in 0..m.len() {
            if !used[col] {
                used[col] = true;
                sum += m[row][col] * go(m, row + 1, used);
                used[col] = false;
            }
        }
        sum
    }
    go(m, 0, &mut vec![false; m.len()])
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Every occupation of `modes` modes holding exactly `total` photons.
pub fn compositions(modes: usize, total: u32) -> Vec<Vec<u32>> {
    if modes == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(modes - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// ⟨out|U|in⟩ on a set of modes, from the permanent of the submatrix whose
/// rows repeat output modes and columns repeat input modes.
pub fn transition_amplitude(u: &ModeMatrix, input: &[u32], output: &[u32]) -> Complex64 {
    let rows: Vec<usize> = output
        .iter()
        .enumerate()
        .flat_map(|(m, &k)| std::iter::repeat_n(m, k as usize))
        .collect();
    let cols: Vec<usize> = input
        .iter()
        .enumerate()
        .flat_map(|(l, &k)| std::iter::repeat_n(l, k as usize))
        .collect();
    if rows.len() != cols.len() {
        return c(0.0, 0.0);
    }
    let sub: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&cc| u[(r, cc)]).collect())
        .collect();
    let norm: f64 = input.iter().chain(output).map(|&k| factorial(k)).product();
    permanent(&sub) / norm.sqrt()
}

/// Mode transform computed term by term from permanents.
pub fn permanent_transform(state: &SparseState, modes: &[usize], u: &ModeMatrix) -> SparseState {
    let mut terms = Vec::new();
    for (occ, a) in state.iter() {
        let sub = occ.select(modes);
        let total: u32 = sub.iter().sum();
        for out in compositions(modes.len(), total) {
            let amp = transition_amplitude(u, &sub, &out);
            let mut counts = occ.counts().to_vec();
            for (&m, &v) in modes.iter().zip(&out) {
                counts[m] = v;
            }
            terms.push((Occupation::new(counts), a * amp));
        }
    }
    SparseState::from_terms(state.modes(), terms).unwrap()
}

/// Random normalized state with up to `max_photons` photons per term.
pub fn random_state(rng: &mut ChaCha8Rng, modes: usize, max_photons: u32, terms: usize) -> SparseState {
    loop {
        let raw = (0..terms).map(|_| {
            let total = rng.random_range(0..=max_photons);
            let mut counts = vec![0u32; modes];
            for _ in 0..total {
                counts[rng.random_range(0..modes)] += 1;
            }
            (
                Occupation::new(counts),
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            )
        });
        if let Ok(s) = SparseState::from_terms(modes, raw).unwrap().normalize() {
            return s;
        }
    }
}

/// Random 0/1 state.
pub fn random_binary_state(rng: &mut ChaCha8Rng, modes: usize, terms: usize) -> SparseState {
    loop {
        let raw = (0..terms).map(|_| {
            let counts: Vec<u32> = (0..modes).map(|_| rng.random_range(0..2)).collect();
            (
                Occupation::new(counts),
                c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            )
        });
        if let Ok(s) = SparseState::from_terms(modes, raw).unwrap().normalize() {
            return s;
        }
    }
}

/// Random non-negative profile of size n.
pub fn random_profile(rng: &mut ChaCha8Rng, n: usize) -> AmplitudeProfile {
    AmplitudeProfile::new((0..=n).map(|_| rng.random_range(0.05..1.0)).collect()).unwrap()
}

/// Equation-level branch state for the single register, written from the
/// pattern definition rather than any library helper.
pub fn literal_single(f: &[f64]) -> SparseState {
    let n = f.len() - 1;
    let norm = f.iter().map(|v| v * v).sum::<f64>().sqrt();
    let terms = (0..=n).map(|j| {
        let mut counts = vec![0u32; 2 * n];
        for i in 0..n {
            counts[i] = u32::from(i < j);
            counts[n + i] = u32::from(i >= j);
        }
        (Occupation::new(counts), c(f[j] / norm, 0.0))
    });
    SparseState::from_terms(2 * n, terms).unwrap()
}

pub fn assert_fidelity(a: &SparseState, b: &SparseState, tol: f64) {
    let f = a.fidelity(b).unwrap();
    assert!(f >= 1.0 - tol, "fidelity {f} below 1 - {tol:e}");
}

/// Random normalized qubit amplitudes.
pub fn random_qubit(rng: &mut ChaCha8Rng) -> ancilla_core::teleport::Qubit {
    ancilla_core::teleport::Qubit::normalized(
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
    )
    .unwrap()
}
