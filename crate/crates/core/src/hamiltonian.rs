//! Matrix-free problem and mixer Hamiltonians.
//!
//! The problem Hamiltonian is diagonal in the computational basis: each
//! violated clause costs +3 and each satisfied clause −1. The mixer is the
//! transverse field `−Σ X_k`, applied by flipping one bit at a time. Both are
//! affinely rescaled so their spectra sit in `[0, 2π)` with ground energy 0,
//! and `H_w = (1−w)·H₀ + w·H₁` interpolates between them.

use std::f64::consts::PI;
use std::io::Write;

use thiserror::Error;

use crate::instance::SatInstance;

/// Largest `n` for which the diagonal is materialized.
pub const MAX_VARS: usize = 24;

/// Multiplicative guard keeping the top of every normalized spectrum strictly below 2π.
pub const SPECTRUM_GUARD: f64 = 1.0 - 1.0 / 4_294_967_296.0;

#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error("{n} variables exceeds the memory limit of {max}")]
    TooLarge { n: usize, max: usize },
    #[error("constant Hamiltonian: every basis state has energy {0}")]
    ConstantSpectrum(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("weight {0} outside [0, 1]")]
    WeightOutOfRange(f64),
}

/// A real symmetric linear operator applied without forming its matrix.
pub trait Operator {
    fn dim(&self) -> usize;
    /// Writes `A·x` into `y`. Both slices have length `dim()`.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

/// Raw clause energies `3·unsat(b) − sat(b)` for every basis state `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalEnergies {
    n: usize,
    num_clauses: usize,
    values: Vec<f64>,
}

impl DiagonalEnergies {
    pub fn build(inst: &SatInstance) -> Result<Self, HamiltonianError> {
        let n = inst.n();
        if n > MAX_VARS {
            return Err(HamiltonianError::TooLarge { n, max: MAX_VARS });
        }
        let m = inst.num_clauses() as i64;
        let values = (0..1u64 << n)
            .map(|b| {
                let sat = inst.num_satisfied(b) as i64;
                (3 * (m - sat) - sat) as f64
            })
            .collect();
        Ok(DiagonalEnergies {
            n,
            num_clauses: inst.num_clauses(),
            values,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_clauses(&self) -> usize {
        self.num_clauses
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Distinct energies in ascending order. Raw energies are integers, so
    /// exact comparison is safe.
    pub fn levels(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Basis states at the minimum energy.
    pub fn ground_states(&self) -> Vec<usize> {
        let min = self.min();
        (0..self.values.len())
            .filter(|&b| self.values[b] == min)
            .collect()
    }

    /// CSV dump, `basis_index,energy`.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "basis_index,energy")?;
        for (b, e) in self.values.iter().enumerate() {
            writeln!(out, "{b},{e}")?;
        }
        Ok(())
    }
}

/// How the width of the problem spectrum is obtained for rescaling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundMode {
    /// Exact `max − min` of the clause energies.
    #[default]
    Ideal,
    /// The a-priori bound `4·|C|` in place of `max − min`.
    Heuristic,
}

/// Affine maps `H₀ = h0_scale·(H_trans − h0_shift)` and `H₁ = h1_scale·(H_C − h1_shift)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedPair {
    pub h0_shift: f64,
    pub h0_scale: f64,
    pub h1_shift: f64,
    pub h1_scale: f64,
}

pub fn normalize(diag: &DiagonalEnergies, mode: BoundMode) -> Result<NormalizedPair, HamiltonianError> {
    let n = diag.n() as f64;
    let (lo, hi) = (diag.min(), diag.max());
    if hi == lo {
        return Err(HamiltonianError::ConstantSpectrum(lo));
    }
    let width = match mode {
        BoundMode::Ideal => hi - lo,
        BoundMode::Heuristic => 4.0 * diag.num_clauses() as f64,
    };
    Ok(NormalizedPair {
        h0_shift: -n,
        h0_scale: 2.0 * PI * SPECTRUM_GUARD / (2.0 * n),
        h1_shift: lo,
        h1_scale: 2.0 * PI * SPECTRUM_GUARD / width,
    })
}

/// `y[b] = −Σ_k x[b ⊕ 2^k]`.
pub fn apply_transverse(x: &[f64], y: &mut [f64]) -> Result<(), HamiltonianError> {
    let dim = x.len();
    if !dim.is_power_of_two() || y.len() != dim {
        return Err(HamiltonianError::DimensionMismatch {
            expected: dim.next_power_of_two(),
            got: y.len(),
        });
    }
    transverse_into(x, y);
    Ok(())
}

#[inline]
fn transverse_into(x: &[f64], y: &mut [f64]) {
    let dim = x.len();
    let n = dim.trailing_zeros();
    for (b, yb) in y.iter_mut().enumerate() {
        let mut acc = 0.0;
        for k in 0..n {
            acc += x[b ^ (1 << k)];
        }
        *yb = -acc;
    }
}

/// The normalized operators of one instance.
#[derive(Debug, Clone)]
pub struct ProblemHamiltonian {
    diag: DiagonalEnergies,
    pair: NormalizedPair,
    /// Normalized H₁ diagonal.
    h1: Vec<f64>,
}

impl ProblemHamiltonian {
    pub fn new(inst: &SatInstance, mode: BoundMode) -> Result<Self, HamiltonianError> {
        let diag = DiagonalEnergies::build(inst)?;
        let pair = normalize(&diag, mode)?;
        let h1 = diag
            .values()
            .iter()
            .map(|&e| pair.h1_scale * (e - pair.h1_shift))
            .collect();
        Ok(ProblemHamiltonian { diag, pair, h1 })
    }

    pub fn n(&self) -> usize {
        self.diag.n()
    }

    pub fn dim(&self) -> usize {
        1 << self.diag.n()
    }

    pub fn diagonal(&self) -> &DiagonalEnergies {
        &self.diag
    }

    pub fn pair(&self) -> &NormalizedPair {
        &self.pair
    }

    /// Normalized H₁ energies per basis state.
    pub fn h1_diagonal(&self) -> &[f64] {
        &self.h1
    }

    /// `H_w` at weight `w`.
    pub fn at(&self, w: f64) -> Result<InterpolatedHamiltonian<'_>, HamiltonianError> {
        if !(0.0..=1.0).contains(&w) {
            return Err(HamiltonianError::WeightOutOfRange(w));
        }
        Ok(InterpolatedHamiltonian { problem: self, w })
    }

    /// Gap between the two lowest distinct levels of normalized H₁.
    pub fn target_gap(&self) -> f64 {
        let levels = self.diag.levels();
        self.pair.h1_scale * (levels[1] - levels[0])
    }

    /// Normalized H₀ spectrum: level `m` is `2πm/n` (times the guard) with
    /// multiplicity `C(n, m)`.
    pub fn h0_level(&self, m: usize) -> f64 {
        self.pair.h0_scale * 2.0 * m as f64
    }
}

/// `H_w = (1−w)·H₀ + w·H₁`, borrowing the normalized operators.
#[derive(Debug, Clone, Copy)]
pub struct InterpolatedHamiltonian<'a> {
    problem: &'a ProblemHamiltonian,
    w: f64,
}

impl<'a> InterpolatedHamiltonian<'a> {
    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn problem(&self) -> &'a ProblemHamiltonian {
        self.problem
    }

    /// Checked form of [`Operator::apply`].
    pub fn apply_checked(&self, x: &[f64], y: &mut [f64]) -> Result<(), HamiltonianError> {
        let dim = self.problem.dim();
        for len in [x.len(), y.len()] {
            if len != dim {
                return Err(HamiltonianError::DimensionMismatch {
                    expected: dim,
                    got: len,
                });
            }
        }
        self.apply(x, y);
        Ok(())
    }

    /// Diagonal entry `⟨b|H_w|b⟩`.
    pub fn diagonal_entry(&self, b: usize) -> f64 {
        let p = &self.problem.pair;
        (1.0 - self.w) * p.h0_scale * (-p.h0_shift) + self.w * self.problem.h1[b]
    }
}

impl Operator for InterpolatedHamiltonian<'_> {
    fn dim(&self) -> usize {
        self.problem.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let p = &self.problem.pair;
        let n = self.problem.n();
        let mix = (1.0 - self.w) * p.h0_scale;
        let diag0 = mix * (-p.h0_shift);
        let h1 = &self.problem.h1;
        if mix == 0.0 {
            for ((yb, &xb), &e) in y.iter_mut().zip(x).zip(h1) {
                *yb = self.w * e * xb;
            }
            return;
        }
        for (b, yb) in y.iter_mut().enumerate() {
            let mut flip = 0.0;
            for k in 0..n {
                flip += x[b ^ (1 << k)];
            }
            *yb = -mix * flip + (diag0 + self.w * h1[b]) * x[b];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate, Clause, Literal};
    use num_rational::Ratio;
    use rand::Rng;

    fn single_clause() -> SatInstance {
        let c = Clause::new(Literal::new(0, false), Literal::new(1, false)).unwrap();
        SatInstance::from_clauses(2, vec![c], 0).unwrap()
    }

    #[test]
    fn clause_penalties() {
        let d = DiagonalEnergies::build(&single_clause()).unwrap();
        // b = 0 is FALSE, FALSE
        assert_eq!(d.values()[0], 3.0);
        for b in 1..4 {
            assert_eq!(d.values()[b], -1.0);
        }
    }

    #[test]
    fn satisfiable_instance_shifts_to_zero() {
        let inst = generate(6, Ratio::from_integer(1), 3).unwrap();
        let d = DiagonalEnergies::build(&inst).unwrap();
        let m = inst.num_clauses() as f64;
        // r = 1 on six variables is satisfiable for this seed
        assert_eq!(d.min() + m, 0.0);
        assert!(d.max() + m <= 4.0 * m);
    }

    #[test]
    fn transverse_on_uniform_and_single_qubit() {
        let n = 4;
        let x = vec![0.25; 1 << n];
        let mut y = vec![0.0; 1 << n];
        apply_transverse(&x, &mut y).unwrap();
        for v in &y {
            assert!((v + n as f64 * 0.25).abs() < 1e-15);
        }
        let mut y = vec![0.0; 2];
        apply_transverse(&[1.0, 0.0], &mut y).unwrap();
        assert_eq!(y, vec![0.0, -1.0]);
        assert!(apply_transverse(&[1.0, 0.0], &mut [0.0; 3]).is_err());
    }

    #[test]
    fn transverse_is_symmetric() {
        let mut rng = crate::seed::rng_from(9);
        let dim = 1 << 5;
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let xp: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (mut y, mut yp) = (vec![0.0; dim], vec![0.0; dim]);
        apply_transverse(&xp, &mut yp).unwrap();
        apply_transverse(&x, &mut y).unwrap();
        let lhs: f64 = x.iter().zip(&yp).map(|(a, b)| a * b).sum();
        let rhs: f64 = y.iter().zip(&xp).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn normalization_pins_ground_to_zero() {
        let inst = generate(6, Ratio::from_integer(4), 1).unwrap();
        let h = ProblemHamiltonian::new(&inst, BoundMode::Ideal).unwrap();
        let h1 = h.h1_diagonal();
        let lo = h1.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = h1.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(lo, 0.0);
        assert!(hi < 2.0 * PI);
        assert!(hi > 2.0 * PI * (1.0 - 1e-9));
        assert!(h.h0_level(6) < 2.0 * PI);
    }

    #[test]
    fn heuristic_bound_compresses_spectrum() {
        let inst = generate(6, Ratio::from_integer(4), 1).unwrap();
        let ideal = ProblemHamiltonian::new(&inst, BoundMode::Ideal).unwrap();
        let heur = ProblemHamiltonian::new(&inst, BoundMode::Heuristic).unwrap();
        assert!(heur.pair().h1_scale <= ideal.pair().h1_scale);
        assert_eq!(heur.pair().h1_shift, ideal.pair().h1_shift);
    }

    #[test]
    fn constant_spectrum_rejected() {
        let inst = generate(5, Ratio::from_integer(8), 0).unwrap();
        assert!(matches!(
            ProblemHamiltonian::new(&inst, BoundMode::Ideal),
            Err(HamiltonianError::ConstantSpectrum(_))
        ));
        let empty = SatInstance::from_clauses(3, vec![], 0).unwrap();
        assert!(ProblemHamiltonian::new(&empty, BoundMode::Ideal).is_err());
    }

    #[test]
    fn endpoints_match_component_operators() {
        let inst = generate(5, Ratio::from_integer(3), 2).unwrap();
        let h = ProblemHamiltonian::new(&inst, BoundMode::Ideal).unwrap();
        let mut rng = crate::seed::rng_from(4);
        let x: Vec<f64> = (0..32).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut y = vec![0.0; 32];
        h.at(1.0).unwrap().apply(&x, &mut y);
        for b in 0..32 {
            assert_eq!(y[b], h.h1_diagonal()[b] * x[b]);
        }
        let mut t = vec![0.0; 32];
        apply_transverse(&x, &mut t).unwrap();
        h.at(0.0).unwrap().apply(&x, &mut y);
        let p = h.pair();
        for b in 0..32 {
            let expect = p.h0_scale * (t[b] - p.h0_shift * x[b]);
            assert!((y[b] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn weight_range_checked() {
        let inst = generate(4, Ratio::from_integer(2), 2).unwrap();
        let h = ProblemHamiltonian::new(&inst, BoundMode::Ideal).unwrap();
        assert!(h.at(1.5).is_err());
        assert!(h.at(-0.1).is_err());
        let hw = h.at(0.5).unwrap();
        assert!(hw.apply_checked(&[0.0; 3], &mut [0.0; 16]).is_err());
    }

    #[test]
    fn csv_dump() {
        let d = DiagonalEnergies::build(&single_clause()).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "basis_index,energy\n0,3\n1,-1\n2,-1\n3,-1\n"
        );
    }
}
