//! Dense real vector helpers and eigenspace representations.

use thiserror::Error;

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `y += alpha·x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    for xi in x {
        *xi *= alpha;
    }
}

/// Projects `v` onto the orthogonal complement of `basis` with two
/// classical Gram–Schmidt sweeps.
pub fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
}

#[derive(Debug, Error)]
pub enum SubspaceError {
    #[error("basis vector {index} has length {got}, expected {expected}")]
    Dimension {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("basis is not orthonormal: |⟨g{i}|g{j}⟩ − δ| = {deviation:e}")]
    NotOrthonormal { i: usize, j: usize, deviation: f64 },
    #[error("basis state {0} out of range")]
    BasisIndex(usize),
}

/// Tolerance for accepting a supplied basis as orthonormal.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

/// An eigenspace, stored either as dense orthonormal vectors or as a set of
/// computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub enum Subspace {
    Vectors { dim: usize, vectors: Vec<Vec<f64>> },
    BasisStates { dim: usize, states: Vec<usize> },
}

impl Subspace {
    /// Validates orthonormality of `vectors` to [`ORTHONORMAL_TOL`].
    pub fn from_vectors(dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self, SubspaceError> {
        for (index, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(SubspaceError::Dimension {
                    index,
                    expected: dim,
                    got: v.len(),
                });
            }
        }
        for i in 0..vectors.len() {
            for j in 0..=i {
                let g = dot(&vectors[i], &vectors[j]);
                let deviation = (g - if i == j { 1.0 } else { 0.0 }).abs();
                if deviation > ORTHONORMAL_TOL {
                    return Err(SubspaceError::NotOrthonormal { i, j, deviation });
                }
            }
        }
        Ok(Subspace::Vectors { dim, vectors })
    }

    /// Skips validation; for bases produced by this crate's solvers.
    pub(crate) fn from_vectors_unchecked(dim: usize, vectors: Vec<Vec<f64>>) -> Self {
        Subspace::Vectors { dim, vectors }
    }

    pub fn from_basis_states(dim: usize, mut states: Vec<usize>) -> Result<Self, SubspaceError> {
        states.sort_unstable();
        states.dedup();
        if let Some(&s) = states.iter().find(|&&s| s >= dim) {
            return Err(SubspaceError::BasisIndex(s));
        }
        Ok(Subspace::BasisStates { dim, states })
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Subspace::Vectors { dim, .. } | Subspace::BasisStates { dim, .. } => *dim,
        }
    }

    /// Dimension of the subspace itself.
    pub fn rank(&self) -> usize {
        match self {
            Subspace::Vectors { vectors, .. } => vectors.len(),
            Subspace::BasisStates { states, .. } => states.len(),
        }
    }

    /// `‖P x‖²` for the orthogonal projector `P` onto the subspace.
    pub fn weight(&self, x: &[f64]) -> f64 {
        match self {
            Subspace::Vectors { vectors, .. } => vectors.iter().map(|g| dot(g, x).powi(2)).sum(),
            Subspace::BasisStates { states, .. } => states.iter().map(|&s| x[s] * x[s]).sum(),
        }
    }

    /// In-place `x ← (𝟙 − 2P)·x`.
    pub fn reflect_in_place(&self, x: &mut [f64]) {
        match self {
            Subspace::Vectors { vectors, .. } => {
                let coeffs: Vec<f64> = vectors.iter().map(|g| dot(g, x)).collect();
                for (g, c) in vectors.iter().zip(coeffs) {
                    axpy(-2.0 * c, g, x);
                }
            }
            Subspace::BasisStates { states, .. } => {
                for &s in states {
                    x[s] = -x[s];
                }
            }
        }
    }

    /// Direct sum with another subspace of the same ambient space, assumed orthogonal.
    pub fn union(&self, other: &Subspace) -> Subspace {
        match (self, other) {
            (Subspace::BasisStates { dim, states: a }, Subspace::BasisStates { states: b, .. }) => {
                let mut states = a.clone();
                states.extend_from_slice(b);
                states.sort_unstable();
                states.dedup();
                Subspace::BasisStates { dim: *dim, states }
            }
            _ => {
                let mut vectors = self.dense_vectors();
                vectors.extend(other.dense_vectors());
                Subspace::Vectors {
                    dim: self.ambient_dim(),
                    vectors,
                }
            }
        }
    }

    pub fn dense_vectors(&self) -> Vec<Vec<f64>> {
        match self {
            Subspace::Vectors { vectors, .. } => vectors.clone(),
            Subspace::BasisStates { dim, states } => states
                .iter()
                .map(|&s| {
                    let mut v = vec![0.0; *dim];
                    v[s] = 1.0;
                    v
                })
                .collect(),
        }
    }
}
