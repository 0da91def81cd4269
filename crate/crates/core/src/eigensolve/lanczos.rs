//! Lanczos with full reorthogonalization and locking.
//!
//! A single Krylov sequence only sees one direction per eigenvalue, so a
//! degenerate level shows up once per run. [`lowest_levels`] therefore runs
//! repeatedly, each time in the orthogonal complement of every eigenvector
//! locked so far, until the lowest eigenvalue left in the complement lies
//! above the highest level whose eigenspace was requested.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{level_tolerance, EigenError};
use crate::hamiltonian::Operator;
use crate::linalg::{axpy, dot, norm, orthogonalize, scale};
use crate::seed::rng_from;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosConfig {
    /// Residual bound `‖A v − θ v‖` for accepting a Ritz pair.
    pub tol: f64,
    /// Matrix-vector products allowed across all runs of one solve.
    pub max_matvecs: usize,
    /// Krylov dimension at which a run restarts.
    pub max_basis: usize,
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig {
            tol: 1e-10,
            max_matvecs: 5000,
            max_basis: 400,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct RitzPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// Lowest distinct levels with eigenspaces for the first few.
#[derive(Debug, Clone)]
pub struct Levels {
    /// Distinct eigenvalues, ascending. May be shorter than requested when
    /// the space is small.
    pub values: Vec<f64>,
    /// Orthonormal eigenspace bases for the lowest levels.
    pub spaces: Vec<Vec<Vec<f64>>>,
    pub matvecs: usize,
}

const BREAKDOWN: f64 = 1e-12;

fn random_unit(dim: usize, rng: &mut ChaCha8Rng, against: &[&[Vec<f64>]]) -> Result<Vec<f64>, EigenError> {
    for _ in 0..8 {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        for basis in against {
            orthogonalize(&mut v, basis);
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            scale(1.0 / nv, &mut v);
            return Ok(v);
        }
    }
    Err(EigenError::StartVector)
}

/// Ritz values of the tridiagonal matrix with last-row eigenvector components.
fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// One Lanczos run in the complement of `locked`, returning the lowest
/// `want` Ritz pairs once each has residual at most `cfg.tol`.
pub(crate) fn krylov_lowest<O: Operator>(
    op: &O,
    locked: &[Vec<f64>],
    want: usize,
    cfg: &LanczosConfig,
    rng: &mut ChaCha8Rng,
    matvecs: &mut usize,
) -> Result<Vec<RitzPair>, EigenError> {
    let dim = op.dim();
    let free = dim - locked.len().min(dim);
    if free == 0 || want == 0 {
        return Ok(Vec::new());
    }
    let want = want.min(free);
    let max_basis = cfg.max_basis.max(want + 2).min(free);

    let mut q = random_unit(dim, rng, &[locked])?;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_basis);
    let mut alpha: Vec<f64> = Vec::with_capacity(max_basis);
    let mut beta: Vec<f64> = Vec::with_capacity(max_basis);
    let mut w = vec![0.0; dim];

    loop {
        basis.push(q);
        let j = basis.len() - 1;
        if *matvecs >= cfg.max_matvecs {
            return Err(EigenError::NotConverged { matvecs: *matvecs });
        }
        op.apply(&basis[j], &mut w);
        *matvecs += 1;
        let a = dot(&basis[j], &w);
        axpy(-a, &basis[j], &mut w);
        if j > 0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut w);
        }
        orthogonalize(&mut w, locked);
        orthogonalize(&mut w, &basis);
        let b = norm(&w);
        alpha.push(a);
        let m = alpha.len();

        let breakdown = b <= BREAKDOWN;
        let interval = (m / 8).max(4);
        let due = m >= want && (m % interval == 0 || m == max_basis || breakdown);
        if due {
            let (values, vecs) = tridiagonal_eigen(&alpha, &beta);
            let converged = (0..want).all(|i| (b * vecs[(m - 1, i)]).abs() <= cfg.tol);
            if converged || m == free {
                let take = if m == free { values.len().min(want) } else { want };
                return Ok((0..take)
                    .map(|i| {
                        let mut v = vec![0.0; dim];
                        for (k, qk) in basis.iter().enumerate() {
                            axpy(vecs[(k, i)], qk, &mut v);
                        }
                        orthogonalize(&mut v, locked);
                        let nv = norm(&v);
                        scale(1.0 / nv, &mut v);
                        RitzPair {
                            value: values[i],
                            vector: v,
                        }
                    })
                    .collect());
            }
            if m == max_basis {
                // explicit restart from the sum of the wanted Ritz vectors
                let mut restart = vec![0.0; dim];
                for i in 0..want {
                    for (k, qk) in basis.iter().enumerate() {
                        axpy(vecs[(k, i)], qk, &mut restart);
                    }
                }
                orthogonalize(&mut restart, locked);
                let nr = norm(&restart);
                scale(1.0 / nr, &mut restart);
                basis.clear();
                alpha.clear();
                beta.clear();
                q = restart;
                continue;
            }
        }
        if breakdown {
            // invariant subspace: continue with a fresh direction, decoupled
            q = random_unit(dim, rng, &[locked, &basis])?;
            beta.push(0.0);
        } else {
            beta.push(b);
            q = w.iter().map(|x| x / b).collect();
        }
    }
}

/// Lowest eigenpair. One run; valid as a full eigenspace only when the
/// lowest level is known to be simple.
pub fn lowest_pair<O: Operator>(op: &O, cfg: &LanczosConfig) -> Result<(f64, Vec<f64>), EigenError> {
    let mut rng = rng_from(cfg.seed);
    let mut matvecs = 0;
    let mut pairs = krylov_lowest(op, &[], 1, cfg, &mut rng, &mut matvecs)?;
    let p = pairs.pop().ok_or(EigenError::TooSmall(op.dim()))?;
    Ok((p.value, p.vector))
}

/// The lowest `k_distinct` distinct eigenvalues, with complete eigenspaces
/// for the lowest `resolve` of them.
pub fn lowest_levels<O: Operator>(
    op: &O,
    k_distinct: usize,
    resolve: usize,
    cfg: &LanczosConfig,
) -> Result<Levels, EigenError> {
    let resolve = resolve.max(1);
    let k_distinct = k_distinct.max(resolve);
    let mut rng = rng_from(cfg.seed);
    let mut matvecs = 0;
    let mut locked: Vec<RitzPair> = Vec::new();
    let mut seen: Vec<f64> = Vec::new();
    let mut want = k_distinct;

    loop {
        let locked_vecs: Vec<Vec<f64>> = locked.iter().map(|p| p.vector.clone()).collect();
        let found = krylov_lowest(op, &locked_vecs, want, cfg, &mut rng, &mut matvecs)?;
        let Some(lowest) = found.first().map(|p| p.value) else {
            break;
        };
        if !locked.is_empty() {
            let values: Vec<f64> = locked.iter().map(|p| p.value).collect();
            let groups = group_levels(&values);
            if groups.len() >= resolve {
                let tol = level_tolerance(groups[0].0);
                let ceiling = values[*groups[resolve - 1].1.last().unwrap()];
                if lowest > ceiling + tol {
                    seen.extend(found.iter().map(|p| p.value));
                    break;
                }
            }
        }
        locked.extend(found);
        want = resolve;
    }

    let mut all: Vec<f64> = locked.iter().map(|p| p.value).collect();
    let n_locked = all.len();
    all.extend_from_slice(&seen);
    let groups = group_levels(&all);
    let values = groups.iter().take(k_distinct).map(|g| g.0).collect();
    let spaces = groups
        .iter()
        .take(resolve)
        .map(|(_, members)| {
            members
                .iter()
                .filter(|&&i| i < n_locked)
                .map(|&i| locked[i].vector.clone())
                .collect()
        })
        .collect();
    Ok(Levels {
        values,
        spaces,
        matvecs,
    })
}

/// Groups eigenvalues into levels: `(level value, member indices)` ascending.
pub(crate) fn group_levels(values: &[f64]) -> Vec<(f64, Vec<usize>)> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let Some(&first) = order.first() else {
        return Vec::new();
    };
    let tol = level_tolerance(values[first]);
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for i in order {
        match groups.last_mut() {
            Some((start, members)) if values[i] - *start <= tol => members.push(i),
            _ => groups.push((values[i], vec![i])),
        }
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Diag(Vec<f64>);

    impl Operator for Diag {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn apply(&self, x: &[f64], y: &mut [f64]) {
            for i in 0..x.len() {
                y[i] = self.0[i] * x[i];
            }
        }
    }

    #[test]
    fn resolves_degenerate_levels() {
        let mut d: Vec<f64> = (0..60).map(|i| 1.0 + i as f64 * 0.1).collect();
        d[7] = 0.2;
        d[20] = 0.2;
        d[33] = 0.2;
        d[40] = 0.5;
        d[41] = 0.5;
        let op = Diag(d);
        let lv = lowest_levels(&op, 3, 2, &LanczosConfig::default()).unwrap();
        assert_eq!(lv.spaces[0].len(), 3);
        assert_eq!(lv.spaces[1].len(), 2);
        assert!((lv.values[0] - 0.2).abs() < 1e-12);
        assert!((lv.values[1] - 0.5).abs() < 1e-12);
        assert!((lv.values[2] - 1.0).abs() < 1e-12);
        for v in &lv.spaces[0] {
            let off: f64 = v
                .iter()
                .enumerate()
                .filter(|(i, _)| ![7, 20, 33].contains(i))
                .map(|(_, x)| x * x)
                .sum();
            assert!(off < 1e-16);
        }
    }

    #[test]
    fn tiny_space_is_exhausted_exactly() {
        let op = Diag(vec![3.0, 1.0, 2.0, 1.0]);
        let lv = lowest_levels(&op, 3, 2, &LanczosConfig::default()).unwrap();
        for (got, want) in lv.values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(lv.spaces[0].len(), 2);
        assert_eq!(lv.spaces[1].len(), 1);
    }

    #[test]
    fn matvec_budget_enforced() {
        let op = Diag((0..500).map(|i| (i as f64).sqrt()).collect());
        let cfg = LanczosConfig {
            max_matvecs: 10,
            ..LanczosConfig::default()
        };
        assert!(matches!(
            lowest_levels(&op, 3, 2, &cfg),
            Err(EigenError::NotConverged { .. })
        ));
    }

    #[test]
    fn grouping_uses_relative_tolerance() {
        let g = group_levels(&[5.0, 5.0 + 1e-10, 5.0 + 1e-7, 1.0]);
        assert_eq!(g.len(), 3);
        assert_eq!(g[0].1, vec![3]);
        assert_eq!(g[1].1, vec![0, 1]);
    }
}
