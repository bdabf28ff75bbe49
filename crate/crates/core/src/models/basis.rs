// Copyright 2026 The qbattery Authors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

/// Representation in which an operator or state is expressed.
#[derive(Debug, Clone, PartialEq)]
pub enum Basis {
    /// Computational basis of `2^sites` product states; site 1 is the most
    /// significant bit and bit value 0 is the `σ^z = −1` state.
    FullSpin { sites: usize },
    /// Maximal total-spin sector `|S = sites/2, m⟩`, ordered `m = −S..S`.
    Dicke { sites: usize },
    /// Two-level Bogoliubov pair space of one momentum mode.
    KMode,
    /// Symmetry-reduced subspace of the computational basis.
    Sector(Arc<SectorBasis>),
}

impl Basis {
    pub fn full(sites: usize) -> Self {
        Basis::FullSpin { sites }
    }

    pub fn dicke(sites: usize) -> Self {
        Basis::Dicke { sites }
    }

    /// Even-parity, reflection-symmetric sector containing the polarized state.
    pub fn polarized_sector(sites: usize) -> Self {
        Basis::Sector(Arc::new(SectorBasis::new(sites, true)))
    }

    pub fn dim(&self) -> usize {
        match self {
            Basis::FullSpin { sites } => 1usize << sites,
            Basis::Dicke { sites } => sites + 1,
            Basis::KMode => 2,
            Basis::Sector(s) => s.dim(),
        }
    }

    pub fn sites(&self) -> Option<usize> {
        match self {
            Basis::FullSpin { sites } | Basis::Dicke { sites } => Some(*sites),
            Basis::KMode => None,
            Basis::Sector(s) => Some(s.sites),
        }
    }

    /// Index of the polarized state `|00…0⟩` (all `σ^z = −1`), when present.
    pub fn polarized_index(&self) -> Option<usize> {
        match self {
            Basis::FullSpin { .. } | Basis::Dicke { .. } => Some(0),
            Basis::KMode => None,
            Basis::Sector(s) => s.position(0).map(|(i, _)| i),
        }
    }
}

/// Subspace spanned by computational states of even `σ^z = +1` count,
/// optionally symmetrized under the chain reflection `i ↦ N + 1 − i`.
///
/// Every operator built from `XX`, `YY` and `Z`-string terms on a chain with
/// reflection-invariant couplings preserves this subspace, and so does the
/// polarized initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    pub sites: usize,
    pub reflection: bool,
    /// Each basis vector is `(|s⟩ + |R s⟩)/√2`, or `|s⟩` for a palindrome.
    members: Vec<(u64, Option<u64>)>,
    /// `index[state]` is the basis vector containing `state`, or `u32::MAX`.
    index: Vec<u32>,
}

impl SectorBasis {
    pub fn new(sites: usize, reflection: bool) -> Self {
        assert!(sites <= 24, "sector enumeration supports at most 24 sites");
        let full = 1usize << sites;
        let mut members = Vec::new();
        let mut index = vec![u32::MAX; full];
        for s in 0..full as u64 {
            if s.count_ones() % 2 != 0 || index[s as usize] != u32::MAX {
                continue;
            }
            let id = members.len() as u32;
            index[s as usize] = id;
            if reflection {
                let r = reflect(s, sites);
                if r != s {
                    index[r as usize] = id;
                    members.push((s, Some(r)));
                    continue;
                }
            }
            members.push((s, None));
        }
        Self { sites, reflection, members, index }
    }

    pub fn dim(&self) -> usize {
        self.members.len()
    }

    /// Basis vector index of a computational state and its amplitude there.
    pub fn position(&self, state: u64) -> Option<(usize, f64)> {
        let id = *self.index.get(state as usize)?;
        if id == u32::MAX {
            return None;
        }
        let amp = match self.members[id as usize].1 {
            Some(_) => std::f64::consts::FRAC_1_SQRT_2,
            None => 1.0,
        };
        Some((id as usize, amp))
    }

    /// Computational states (with amplitudes) making up basis vector `i`.
    pub fn components(&self, i: usize) -> impl Iterator<Item = (u64, f64)> + '_ {
        let (s, partner) = self.members[i];
        let amp = if partner.is_some() { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
        std::iter::once((s, amp)).chain(partner.map(|r| (r, amp)))
    }

    pub fn reflect(&self, state: u64) -> u64 {
        reflect(state, self.sites)
    }
}

fn reflect(state: u64, sites: usize) -> u64 {
    state.reverse_bits() >> (64 - sites)
}
