#![allow(dead_code)]

use num_rational::Ratio;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use rba::instance::{clause_count, clause_pool_size, generate, SatInstance};
use rba::seed::rng_from;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rng_from(seed)
}

/// Uniformly random unit vector in `dim` dimensions.
pub fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let nrm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nrm > 1e-3 {
            return v.into_iter().map(|x| x / nrm).collect();
        }
    }
}

/// A random instance with `n` in `ns`, drawing a ratio whose clause count
/// fits the pool.
pub fn random_instance(rng: &mut ChaCha8Rng, ns: std::ops::RangeInclusive<usize>) -> SatInstance {
    loop {
        let n = rng.random_range(ns.clone());
        let r = Ratio::new(rng.random_range(1..=16u64), 2);
        let Some(m) = clause_count(n, r) else { continue };
        if m == 0 || m > clause_pool_size(n) {
            continue;
        }
        return generate(n, r, rng.random()).unwrap();
    }
}

/// Clause energy from the spin form: each clause contributes
/// `s1·s2·Z1·Z2 + s1·Z1 + s2·Z2`, with `s = −1` on negated literals and
/// `Z = −1` on true variables.
pub fn pauli_energy(inst: &SatInstance, basis: usize) -> i64 {
    let z = |v: u32| if basis >> v & 1 == 1 { -1i64 } else { 1 };
    inst.clauses()
        .iter()
        .map(|c| {
            let (a, b) = (c.first(), c.second());
            let s1 = if a.negated { -1 } else { 1 };
            let s2 = if b.negated { -1 } else { 1 };
            let (z1, z2) = (z(a.var), z(b.var));
            s1 * s2 * z1 * z2 + s1 * z1 + s2 * z2
        })
        .sum()
}

/// `sin²((k + ½)θ)` with `sin(θ/2) = √(d/dim)`.
pub fn grover_closed_form(d: usize, dim: usize, k: usize) -> f64 {
    let theta = 2.0 * (d as f64 / dim as f64).sqrt().asin();
    ((k as f64 + 0.5) * theta).sin().powi(2)
}

/// Like [`random_instance`], skipping instances with a constant energy.
pub fn random_nonconstant(rng: &mut ChaCha8Rng, ns: std::ops::RangeInclusive<usize>) -> SatInstance {
    loop {
        let inst = random_instance(rng, ns.clone());
        let e = rba::hamiltonian::DiagonalEnergies::build(&inst).unwrap();
        if e.min() < e.max() {
            return inst;
        }
    }
}

/// Random `rank`-dimensional subspace, orthonormalized by Gram–Schmidt.
pub fn random_subspace(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> rba::linalg::Subspace {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(rank);
    while basis.len() < rank {
        let mut v = random_unit(rng, dim);
        rba::linalg::orthogonalize(&mut v, &basis);
        rba::linalg::orthogonalize(&mut v, &basis);
        let nrm = rba::linalg::norm(&v);
        if nrm > 1e-6 {
            basis.push(v.into_iter().map(|x| x / nrm).collect());
        }
    }
    rba::linalg::Subspace::from_vectors(dim, basis).unwrap()
}
