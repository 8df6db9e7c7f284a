//! Occupation-number basis of the double well.
//!
//! States are `|n_a, n_b⟩`. A [`BasisKind::Sector`] basis holds the `N + 1`
//! states with fixed total number `N`; a [`BasisKind::Full`] basis stacks the
//! sectors `N_max, N_max - 1, ..., 0` as contiguous blocks. Inside every block
//! the occupation of well A decreases from top to bottom.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;
use std::sync::Arc;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState {
    pub n_a: usize,
    pub n_b: usize,
}

impl FockState {
    pub const fn new(n_a: usize, n_b: usize) -> Self {
        Self { n_a, n_b }
    }

    pub const fn total(&self) -> usize {
        self.n_a + self.n_b
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{},{}⟩", self.n_a, self.n_b)
    }
}

/// Descriptor that fully determines a basis. Two bases are the same space iff
/// their kinds are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    /// Fixed particle number `N`.
    Sector(usize),
    /// All particle numbers `0..=N_max`.
    Full(usize),
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisKind::Sector(n) => write!(f, "Sector({n})"),
            BasisKind::Full(n) => write!(f, "Full({n})"),
        }
    }
}

/// Contiguous block of a full basis holding every state with `total` particles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorSlice {
    pub total: usize,
    pub range: Range<usize>,
}

#[derive(Debug, Clone)]
pub struct FockBasis {
    kind: BasisKind,
    states: Vec<FockState>,
    index: HashMap<FockState, usize>,
}

impl FockBasis {
    fn from_states(kind: BasisKind, states: Vec<FockState>) -> Self {
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Self {
            kind,
            states,
            index,
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> FockState {
        self.states[i]
    }

    pub fn index_of(&self, state: FockState) -> Option<usize> {
        self.index.get(&state).copied()
    }

    /// Largest particle number represented in the basis.
    pub fn max_particles(&self) -> usize {
        match self.kind {
            BasisKind::Sector(n) | BasisKind::Full(n) => n,
        }
    }

    pub fn is_sector(&self) -> bool {
        matches!(self.kind, BasisKind::Sector(_))
    }

    /// Block layout of a full basis, in descending particle number.
    pub fn sector_slices(&self) -> Result<Vec<SectorSlice>> {
        let BasisKind::Full(n_max) = self.kind else {
            return Err(Error::UnsupportedBasis {
                operation: "sector_slices",
                kind: self.kind,
            });
        };
        let mut start = 0;
        Ok((0..=n_max)
            .rev()
            .map(|total| {
                let range = start..start + total + 1;
                start = range.end;
                SectorSlice { total, range }
            })
            .collect())
    }

    pub fn ensure_same(&self, other: &FockBasis) -> Result<()> {
        if self.kind == other.kind {
            Ok(())
        } else {
            Err(Error::BasisMismatch {
                expected: self.kind,
                found: other.kind,
            })
        }
    }
}

fn sector_states(n: usize) -> impl Iterator<Item = FockState> {
    (0..=n).rev().map(move |n_a| FockState::new(n_a, n - n_a))
}

/// Fixed-`N` pair basis `|N,0⟩, |N-1,1⟩, ..., |0,N⟩`.
pub fn sector_basis(n: usize) -> Arc<FockBasis> {
    Arc::new(FockBasis::from_states(
        BasisKind::Sector(n),
        sector_states(n).collect(),
    ))
}

/// Truncated space with at most `n_max` particles, sectors stacked from `n_max`
/// down to the vacuum.
pub fn full_basis(n_max: usize) -> Arc<FockBasis> {
    Arc::new(FockBasis::from_states(
        BasisKind::Full(n_max),
        (0..=n_max).rev().flat_map(sector_states).collect(),
    ))
}

pub fn basis_for(kind: BasisKind) -> Arc<FockBasis> {
    match kind {
        BasisKind::Sector(n) => sector_basis(n),
        BasisKind::Full(n) => full_basis(n),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn st(a: usize, b: usize) -> FockState {
        FockState::new(a, b)
    }

    #[test]
    fn sector_examples() {
        assert_eq!(sector_basis(0).states(), &[st(0, 0)]);
        assert_eq!(sector_basis(2).states(), &[st(2, 0), st(1, 1), st(0, 2)]);
        let b5 = sector_basis(5);
        assert_eq!(b5.dim(), 6);
        assert_eq!(b5.state(0), st(5, 0));
        assert_eq!(b5.state(5), st(0, 5));
    }

    #[test]
    fn full_examples() {
        assert_eq!(full_basis(1).states(), &[st(1, 0), st(0, 1), st(0, 0)]);
        assert_eq!(
            full_basis(2).states(),
            &[st(2, 0), st(1, 1), st(0, 2), st(1, 0), st(0, 1), st(0, 0)]
        );
        assert_eq!(full_basis(5).dim(), 21);
    }

    #[test]
    fn slices() {
        let s = |total, range| SectorSlice { total, range };
        assert_eq!(full_basis(1).sector_slices().unwrap(), vec![s(1, 0..2), s(0, 2..3)]);
        assert_eq!(
            full_basis(2).sector_slices().unwrap(),
            vec![s(2, 0..3), s(1, 3..5), s(0, 5..6)]
        );
        assert_eq!(full_basis(0).sector_slices().unwrap(), vec![s(0, 0..1)]);
        assert!(matches!(
            sector_basis(3).sector_slices(),
            Err(Error::UnsupportedBasis { .. })
        ));
    }

    #[test]
    fn mismatch_is_reported() {
        let err = sector_basis(2).ensure_same(&full_basis(2)).unwrap_err();
        assert_eq!(
            err,
            Error::BasisMismatch {
                expected: BasisKind::Sector(2),
                found: BasisKind::Full(2)
            }
        );
    }

    proptest! {
        #[test]
        fn sector_invariants(n in 0usize..60) {
            let b = sector_basis(n);
            prop_assert_eq!(b.dim(), n + 1);
            prop_assert!(b.states().iter().all(|s| s.total() == n));
            prop_assert!(b.states().windows(2).all(|w| w[0].n_a > w[1].n_a));
            for (i, s) in b.states().iter().enumerate() {
                prop_assert_eq!(b.index_of(*s), Some(i));
            }
        }

        #[test]
        fn full_is_concatenated_sectors(n_max in 0usize..25) {
            let full = full_basis(n_max);
            prop_assert_eq!(full.dim(), (n_max + 1) * (n_max + 2) / 2);
            let concat: Vec<_> = (0..=n_max)
                .rev()
                .flat_map(|m| sector_basis(m).states().to_vec())
                .collect();
            prop_assert_eq!(full.states(), concat.as_slice());
            for (i, s) in full.states().iter().enumerate() {
                prop_assert_eq!(full.index_of(*s), Some(i));
            }
            let slices = full.sector_slices().unwrap();
            prop_assert_eq!(slices.last().unwrap().range.end, full.dim());
            for sl in &slices {
                prop_assert_eq!(sl.range.len(), sl.total + 1);
                prop_assert!(full.states()[sl.range.clone()].iter().all(|s| s.total() == sl.total));
            }
        }
    }
}
