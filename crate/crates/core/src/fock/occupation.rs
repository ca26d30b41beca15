use std::fmt;

use serde::{Deserialize, Serialize};

/// Photon (or electron) count per global mode: one Fock basis label.
///
/// Ordering is lexicographic over the counts, which fixes the term order of
/// every serialized state.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Occupation(Vec<u32>);

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Self {
        Occupation(counts)
    }

    pub fn vacuum(modes: usize) -> Self {
        Occupation(vec![0; modes])
    }

    /// Basis label with a single particle in each listed mode.
    pub fn with_ones(modes: usize, occupied: impl IntoIterator<Item = usize>) -> Self {
        let mut counts = vec![0; modes];
        for m in occupied {
            counts[m] = 1;
        }
        Occupation(counts)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn into_counts(self) -> Vec<u32> {
        self.0
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    pub fn is_occupied(&self, mode: usize) -> bool {
        self.0[mode] > 0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Total count over a subset of modes.
    pub fn total_on(&self, modes: impl IntoIterator<Item = usize>) -> u32 {
        modes.into_iter().map(|m| self.0[m]).sum()
    }

    pub fn set(&mut self, mode: usize, count: u32) {
        self.0[mode] = count;
    }

    pub fn with_count(&self, mode: usize, count: u32) -> Self {
        let mut out = self.clone();
        out.0[mode] = count;
        out
    }

    /// Counts on `modes`, in the order given.
    pub fn select(&self, modes: &[usize]) -> Vec<u32> {
        modes.iter().map(|&m| self.0[m]).collect()
    }

    /// Copy of `self` with the listed modes removed; remaining modes keep their
    /// relative order.
    pub fn without(&self, modes: &[usize]) -> Self {
        Occupation(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| !modes.contains(i))
                .map(|(_, &c)| c)
                .collect(),
        )
    }

    pub fn concat(&self, other: &Occupation) -> Self {
        let mut counts = Vec::with_capacity(self.len() + other.len());
        counts.extend_from_slice(&self.0);
        counts.extend_from_slice(&other.0);
        Occupation(counts)
    }

    pub fn max_count(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl From<Vec<u32>> for Occupation {
    fn from(counts: Vec<u32>) -> Self {
        Occupation(counts)
    }
}

impl<const N: usize> From<[u32; N]> for Occupation {
    fn from(counts: [u32; N]) -> Self {
        Occupation(counts.to_vec())
    }
}

impl FromIterator<u32> for Occupation {
    fn from_iter<I: IntoIterator<Item = u32>>(iter: I) -> Self {
        Occupation(iter.into_iter().collect())
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "⟩")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_and_without_keep_order() {
        let occ = Occupation::from([3, 0, 1, 2]);
        assert_eq!(occ.select(&[3, 0]), vec![2, 3]);
        assert_eq!(occ.without(&[1, 3]), Occupation::from([3, 1]));
        assert_eq!(occ.total_on([0, 2]), 4);
    }

    #[test]
    fn lexicographic_order() {
        let a = Occupation::from([0, 1]);
        let b = Occupation::from([1, 0]);
        assert!(a < b);
        assert_eq!(format!("{b}"), "|1,0⟩");
    }
}
