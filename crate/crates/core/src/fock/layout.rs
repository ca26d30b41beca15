use std::ops::Range;

use crate::error::{Error, Result};

pub const Q: &str = "q";
pub const Q_PRIME: &str = "q'";
pub const X: &str = "x";
pub const Y: &str = "y";
pub const X_PRIME: &str = "x'";
pub const Y_PRIME: &str = "y'";
pub const Q_A: &str = "q_a";
pub const Q_B: &str = "q_b";
pub const Q_C: &str = "q_c";

/// Named registers mapped onto contiguous, disjoint ranges of global modes
/// that together cover `0..total_modes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    registers: Vec<(String, Range<usize>)>,
    total: usize,
}

impl Default for RegisterLayout {
    fn default() -> Self {
        Self::new()
    }
}

impl RegisterLayout {
    pub fn new() -> Self {
        RegisterLayout {
            registers: Vec::new(),
            total: 0,
        }
    }

    /// Appends a register of `size` modes after the existing ones.
    pub fn with_register(mut self, name: &str, size: usize) -> Result<Self> {
        if self.registers.iter().any(|(n, _)| n == name) {
            return Err(Error::InvalidLayout(format!("duplicate register {name:?}")));
        }
        let start = self.total;
        self.total += size;
        self.registers.push((name.to_string(), start..self.total));
        Ok(self)
    }

    /// Builds a layout from explicit ranges, checking that they are disjoint
    /// and cover `0..total` with no gaps.
    pub fn from_ranges(ranges: Vec<(String, Range<usize>)>) -> Result<Self> {
        let mut sorted: Vec<&(String, Range<usize>)> = ranges.iter().collect();
        sorted.sort_by_key(|(_, r)| (r.start, r.end));
        let mut next = 0;
        for (name, r) in &sorted {
            if r.start != next {
                return Err(Error::InvalidLayout(format!(
                    "register {name:?} starts at {} but the previous range ends at {next}",
                    r.start
                )));
            }
            if r.end < r.start {
                return Err(Error::InvalidLayout(format!("register {name:?} has a reversed range")));
            }
            next = r.end;
        }
        for (i, (a, _)) in ranges.iter().enumerate() {
            if ranges[i + 1..].iter().any(|(b, _)| a == b) {
                return Err(Error::InvalidLayout(format!("duplicate register {a:?}")));
            }
        }
        Ok(RegisterLayout {
            registers: ranges,
            total: next,
        })
    }

    /// x, y with `n` modes each.
    pub fn single_pair(n: usize) -> Self {
        Self::build(&[(X, n), (Y, n)])
    }

    /// x, y, x', y' with `n` modes each.
    pub fn double_pair(n: usize) -> Self {
        Self::build(&[(X, n), (Y, n), (X_PRIME, n), (Y_PRIME, n)])
    }

    fn build(regs: &[(&str, usize)]) -> Self {
        regs.iter()
            .try_fold(Self::new(), |l, (name, size)| l.with_register(name, *size))
            .expect("static layouts have unique names")
    }

    pub fn total_modes(&self) -> usize {
        self.total
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.registers.iter().map(|(n, _)| n.as_str())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.registers.iter().any(|(n, _)| n == name)
    }

    pub fn range(&self, name: &str) -> Result<Range<usize>> {
        self.registers
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, r)| r.clone())
            .ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    /// Global mode index of the `index`-th mode (0-based) of a register.
    pub fn mode(&self, name: &str, index: usize) -> Result<usize> {
        let r = self.range(name)?;
        if index >= r.len() {
            return Err(Error::ModeOutOfRange {
                mode: index,
                modes: r.len(),
            });
        }
        Ok(r.start + index)
    }

    pub fn modes(&self, name: &str) -> Result<Vec<usize>> {
        Ok(self.range(name)?.collect())
    }
}
