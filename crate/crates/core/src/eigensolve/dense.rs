//! Full dense diagonalization, used as a small-`n` oracle and fallback.

use nalgebra::{DMatrix, SymmetricEigen};

use super::EigenError;
use crate::hamiltonian::{InterpolatedHamiltonian, Operator};

pub const DENSE_MAX_VARS: usize = 10;

/// All eigenpairs, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct DenseSpectrum {
    pub values: Vec<f64>,
    /// `vectors[i]` belongs to `values[i]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Dense matrix of an operator, built column by column.
pub fn to_matrix<O: Operator>(op: &O) -> DMatrix<f64> {
    let dim = op.dim();
    let mut m = DMatrix::zeros(dim, dim);
    let mut e = vec![0.0; dim];
    let mut col = vec![0.0; dim];
    for j in 0..dim {
        e[j] = 1.0;
        op.apply(&e, &mut col);
        for i in 0..dim {
            m[(i, j)] = col[i];
        }
        e[j] = 0.0;
    }
    m
}

pub fn dense_spectrum(h: &InterpolatedHamiltonian<'_>) -> Result<DenseSpectrum, EigenError> {
    let n = h.problem().n();
    if n > DENSE_MAX_VARS {
        return Err(EigenError::DenseTooLarge { n });
    }
    Ok(decompose(to_matrix(h)))
}

pub(crate) fn decompose(m: DMatrix<f64>) -> DenseSpectrum {
    let dim = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    DenseSpectrum {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
            .collect(),
    }
}
