//! Lowest levels of `H_w`: energies, gaps and eigenspaces.
//!
//! Levels are distinct eigenvalues; two eigenvalues belong to the same level
//! when they differ by at most [`level_tolerance`]. Gaps are always measured
//! between distinct levels, so a degenerate ground space does not produce a
//! zero gap.
//!
//! At the endpoints the spectrum is known in closed form: `H₁` is diagonal
//! and `H₀` is diagonalized by the Walsh–Hadamard basis. [`slice`] and
//! [`ground_space`] use those forms at `w = 1` and `w = 0` and fall back to
//! Lanczos in between.

pub mod dense;
pub mod lanczos;

use std::io::Write;

use thiserror::Error;

pub use dense::{dense_spectrum, DenseSpectrum, DENSE_MAX_VARS};
pub use lanczos::{lowest_levels, lowest_pair, LanczosConfig, Levels};

use crate::hamiltonian::{InterpolatedHamiltonian, ProblemHamiltonian};
use crate::linalg::Subspace;
use crate::seed::mix;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("Lanczos did not converge within {matvecs} matrix-vector products")]
    NotConverged { matvecs: usize },
    #[error("dense diagonalization limited to n ≤ {}, got {n}", DENSE_MAX_VARS)]
    DenseTooLarge { n: usize },
    #[error("space of dimension {0} has fewer than two levels")]
    TooSmall(usize),
    #[error("could not draw a start vector outside the locked space")]
    StartVector,
    #[error("weight {0} outside (0, 1]")]
    Weight(f64),
}

/// Two eigenvalues are one level when they differ by at most this.
pub fn level_tolerance(e0: f64) -> f64 {
    1e-9 * e0.abs().max(1.0)
}

/// The lowest levels of `H_w` at one weight.
#[derive(Debug, Clone)]
pub struct SpectrumSlice {
    pub w: f64,
    pub e0: f64,
    pub e1: f64,
    pub e2: Option<f64>,
    pub ground: Subspace,
    pub first_excited: Subspace,
}

impl SpectrumSlice {
    pub fn gap01(&self) -> f64 {
        self.e1 - self.e0
    }

    pub fn gap02(&self) -> Option<f64> {
        self.e2.map(|e2| e2 - self.e0)
    }

    pub fn deg0(&self) -> usize {
        self.ground.rank()
    }

    pub fn deg1(&self) -> usize {
        self.first_excited.rank()
    }

    pub const CSV_HEADER: &'static str = "w,e0,e1,e2,deg0,deg1,gap01,gap02";

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(crate::study::fmt_f64).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{}",
            crate::study::fmt_f64(self.w),
            crate::study::fmt_f64(self.e0),
            crate::study::fmt_f64(self.e1),
            opt(self.e2),
            self.deg0(),
            self.deg1(),
            crate::study::fmt_f64(self.gap01()),
            opt(self.gap02()),
        )
    }

    fn from_levels(w: f64, dim: usize, levels: Levels) -> Result<Self, EigenError> {
        if levels.values.len() < 2 || levels.spaces.len() < 2 {
            return Err(EigenError::TooSmall(dim));
        }
        let mut spaces = levels.spaces.into_iter();
        Ok(SpectrumSlice {
            w,
            e0: levels.values[0],
            e1: levels.values[1],
            e2: levels.values.get(2).copied(),
            ground: Subspace::from_vectors_unchecked(dim, spaces.next().unwrap()),
            first_excited: Subspace::from_vectors_unchecked(dim, spaces.next().unwrap()),
        })
    }

    /// Groups a full dense spectrum into levels.
    pub fn from_dense(w: f64, spec: &DenseSpectrum) -> Result<Self, EigenError> {
        let dim = spec.values.len();
        let groups = lanczos::group_levels(&spec.values);
        let levels = Levels {
            values: groups.iter().take(3).map(|g| g.0).collect(),
            spaces: groups
                .iter()
                .take(2)
                .map(|(_, members)| members.iter().map(|&i| spec.vectors[i].clone()).collect())
                .collect(),
            matvecs: 0,
        };
        Self::from_levels(w, dim, levels)
    }

    /// Closed form at `w = 1`: the levels of the clause energies.
    pub fn problem_endpoint(problem: &ProblemHamiltonian) -> Self {
        let dim = problem.dim();
        let raw = problem.diagonal();
        let levels = raw.levels();
        let pair = problem.pair();
        let level_states = |lv: f64| -> Vec<usize> { (0..dim).filter(|&b| raw.values()[b] == lv).collect() };
        let energy = |lv: f64| pair.h1_scale * (lv - pair.h1_shift);
        SpectrumSlice {
            w: 1.0,
            e0: energy(levels[0]),
            e1: energy(levels[1]),
            e2: levels.get(2).map(|&l| energy(l)),
            ground: Subspace::BasisStates {
                dim,
                states: level_states(levels[0]),
            },
            first_excited: Subspace::BasisStates {
                dim,
                states: level_states(levels[1]),
            },
        }
    }

    /// Closed form at `w = 0`: uniform ground state, and the `n` Walsh
    /// functions of Hamming weight one spanning the first excited level.
    pub fn mixer_endpoint(problem: &ProblemHamiltonian) -> Self {
        let n = problem.n();
        let dim = problem.dim();
        let amp = 1.0 / (dim as f64).sqrt();
        let walsh = |k: usize| -> Vec<f64> {
            (0..dim)
                .map(|b| if (b >> k) & 1 == 1 { -amp } else { amp })
                .collect()
        };
        SpectrumSlice {
            w: 0.0,
            e0: problem.h0_level(0),
            e1: problem.h0_level(1),
            e2: (n >= 2).then(|| problem.h0_level(2)),
            ground: Subspace::from_vectors_unchecked(dim, vec![vec![amp; dim]]),
            first_excited: Subspace::from_vectors_unchecked(dim, (0..n).map(walsh).collect()),
        }
    }
}

/// Lanczos slice of `H_w` with no endpoint shortcuts.
pub fn lanczos_lowest(
    h: &InterpolatedHamiltonian<'_>,
    k_distinct: usize,
    cfg: &LanczosConfig,
) -> Result<SpectrumSlice, EigenError> {
    let levels = lowest_levels(h, k_distinct.clamp(2, 3), 2, cfg)?;
    SpectrumSlice::from_levels(h.w(), crate::hamiltonian::Operator::dim(h), levels)
}

/// Solver settings shared across the weights of one instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub lanczos: LanczosConfig,
    /// Retry with dense diagonalization when Lanczos fails and `n` allows it.
    pub dense_fallback: bool,
}

impl SolverConfig {
    pub fn new(seed: u64) -> Self {
        SolverConfig {
            lanczos: LanczosConfig {
                seed,
                ..LanczosConfig::default()
            },
            dense_fallback: true,
        }
    }

    /// Lanczos settings at weight `w`; the start vector depends only on
    /// the instance seed and `w`.
    pub fn at(&self, w: f64) -> LanczosConfig {
        LanczosConfig {
            seed: mix(&[self.lanczos.seed, w.to_bits()]),
            ..self.lanczos
        }
    }
}

/// Full slice at one weight.
pub fn slice(problem: &ProblemHamiltonian, w: f64, cfg: &SolverConfig) -> Result<SpectrumSlice, EigenError> {
    if w == 1.0 {
        return Ok(SpectrumSlice::problem_endpoint(problem));
    }
    if w == 0.0 {
        return Ok(SpectrumSlice::mixer_endpoint(problem));
    }
    let h = problem.at(w).map_err(|_| EigenError::Weight(w))?;
    match lanczos_lowest(&h, 3, &cfg.at(w)) {
        Err(EigenError::NotConverged { .. }) if cfg.dense_fallback && problem.n() <= DENSE_MAX_VARS => {
            log::warn!("Lanczos failed at w = {w}; using dense diagonalization");
            SpectrumSlice::from_dense(w, &dense_spectrum(&h)?)
        }
        other => other,
    }
}

/// Ground energy and eigenspace only.
///
/// For `0 < w < 1`, `H_w` is irreducible with non-positive off-diagonal
/// entries, so its ground level is simple and one Lanczos run suffices.
pub fn ground_space(
    problem: &ProblemHamiltonian,
    w: f64,
    cfg: &SolverConfig,
) -> Result<(f64, Subspace), EigenError> {
    if w == 1.0 {
        let s = SpectrumSlice::problem_endpoint(problem);
        return Ok((s.e0, s.ground));
    }
    if w == 0.0 {
        let s = SpectrumSlice::mixer_endpoint(problem);
        return Ok((s.e0, s.ground));
    }
    let h = problem.at(w).map_err(|_| EigenError::Weight(w))?;
    let dim = problem.dim();
    match lowest_pair(&h, &cfg.at(w)) {
        Ok((e0, v)) => Ok((e0, Subspace::from_vectors_unchecked(dim, vec![v]))),
        Err(EigenError::NotConverged { .. }) if cfg.dense_fallback && problem.n() <= DENSE_MAX_VARS => {
            log::warn!("Lanczos failed at w = {w}; using dense diagonalization");
            let spec = dense_spectrum(&h)?;
            Ok((
                spec.values[0],
                Subspace::from_vectors_unchecked(dim, vec![spec.vectors[0].clone()]),
            ))
        }
        Err(e) => Err(e),
    }
}

/// One independently computed slice per weight.
pub fn slice_schedule(
    problem: &ProblemHamiltonian,
    weights: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<SpectrumSlice>, (f64, EigenError)> {
    weights
        .iter()
        .map(|&w| {
            if !(w > 0.0 && w <= 1.0) {
                return Err((w, EigenError::Weight(w)));
            }
            slice(problem, w, cfg).map_err(|e| (w, e))
        })
        .collect()
}

/// CSV dump of slices, one row per weight.
pub fn write_slices_csv(slices: &[SpectrumSlice], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{}", SpectrumSlice::CSV_HEADER)?;
    for s in slices {
        writeln!(out, "{}", s.csv_row())?;
    }
    Ok(())
}
