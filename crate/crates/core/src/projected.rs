//! The projected ensemble: post-measurement states on `A` after measuring
//! the bath `B` in the computational basis, with their Born weights.

use crate::error::{Error, Result};
use crate::linalg::{check_dim, DimensionSpec, PureState, C64};

/// Outcomes lighter than this are dropped rather than normalized.
pub const DROP_THRESHOLD: f64 = 1e-14;
/// Largest bath that is enumerated exhaustively.
pub const MAX_BATH_QUBITS: u32 = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedEntry {
    /// Bath outcome, bit `n_b - 1 - i` of `z` being the `i`-th bath qubit.
    pub z: usize,
    pub q: f64,
    pub state: PureState,
}

#[derive(Debug, Clone)]
pub struct ProjectedEnsemble {
    dims: DimensionSpec,
    entries: Vec<ProjectedEntry>,
    dropped_weight: f64,
}

impl ProjectedEnsemble {
    pub fn dims(&self) -> DimensionSpec {
        self.dims
    }

    pub fn entries(&self) -> &[ProjectedEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Total weight of the outcomes below [`DROP_THRESHOLD`].
    pub fn dropped_weight(&self) -> f64 {
        self.dropped_weight
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|e| e.q).sum()
    }

    /// `Σ_z √q_z |Φ_z⟩ ⊗ |z⟩`.
    pub fn reconstruct(&self) -> Vec<C64> {
        let nb = self.dims.dim_b();
        let mut out = vec![C64::new(0.0, 0.0); self.dims.dim()];
        for e in &self.entries {
            let s = e.q.sqrt();
            for (a, x) in e.state.amplitudes().iter().enumerate() {
                out[a * nb + e.z] = x * s;
            }
        }
        out
    }

    /// Bitstring of an outcome, most-significant bath qubit first.
    pub fn bitstring(&self, z: usize) -> String {
        (0..self.dims.n_b)
            .rev()
            .map(|i| if (z >> i) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// `|Φ̃_z⟩ = (I_A ⊗ ⟨z|) |Φ⟩`, unnormalized, for every `z`.
pub fn unnormalized_branches(phi: &PureState, dims: DimensionSpec) -> Result<Vec<Vec<C64>>> {
    check_dim(dims.dim(), phi.dim())?;
    let (na, nb) = (dims.dim_a(), dims.dim_b());
    let amp = phi.amplitudes();
    Ok((0..nb)
        .map(|z| (0..na).map(|a| amp[a * nb + z]).collect())
        .collect())
}

pub fn build_projected_ensemble(phi: &PureState, dims: DimensionSpec) -> Result<ProjectedEnsemble> {
    if dims.n_b > MAX_BATH_QUBITS {
        return Err(Error::GuardExceeded(format!(
            "n_b = {} exceeds the enumeration limit of {MAX_BATH_QUBITS} bath qubits",
            dims.n_b
        )));
    }
    let branches = unnormalized_branches(phi, dims)?;
    let mut entries = Vec::with_capacity(branches.len());
    let mut dropped_weight = 0.0;
    for (z, slice) in branches.into_iter().enumerate() {
        let q: f64 = slice.iter().map(|x| x.norm_sqr()).sum();
        if q < DROP_THRESHOLD {
            dropped_weight += q;
            continue;
        }
        let state = PureState::from_unnormalized(slice)?;
        entries.push(ProjectedEntry { z, q, state });
    }
    Ok(ProjectedEnsemble {
        dims,
        entries,
        dropped_weight,
    })
}
