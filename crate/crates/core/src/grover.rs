//! Closed-form Grover baseline.
//!
//! With `d` marked states out of `2^n` and `sin(θ/2) = √(d/2^n)`, the
//! success probability after `k` iterations is `sin²((k + ½)θ)`. Cost is
//! counted in the same per-query unit as the reflection algorithm, `2r/Δ`,
//! using the normalized gap of the problem Hamiltonian.

use std::f64::consts::PI;

use thiserror::Error;

use crate::dynamics::RbaProblem;
use crate::schedule::{repetition_factor, Algorithm, TtsRecord};

#[derive(Debug, Error, PartialEq)]
pub enum GroverError {
    #[error("search space is all-marked ({0} of {0} states)")]
    AllMarked(usize),
    #[error("no marked states")]
    NoneMarked,
    #[error("failure target {0} outside (0, 1)")]
    FailureTarget(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroverAnalysis {
    pub theta: f64,
    /// `⌈π/(2θ) − ½⌉`.
    pub n_opt: usize,
    pub marked: usize,
    pub dim: usize,
}

impl GroverAnalysis {
    pub fn new(marked: usize, dim: usize) -> Result<Self, GroverError> {
        if marked == 0 {
            return Err(GroverError::NoneMarked);
        }
        if marked >= dim {
            return Err(GroverError::AllMarked(dim));
        }
        let theta = 2.0 * (marked as f64 / dim as f64).sqrt().asin();
        Ok(Self::from_theta(theta, marked, dim))
    }

    /// Analysis for an arbitrary angle in `(0, π]`.
    pub fn from_theta(theta: f64, marked: usize, dim: usize) -> Self {
        let x = PI / (2.0 * theta) - 0.5;
        // absorb rounding at exact integers, e.g. θ = π/3
        let n_opt = (x - 1e-12 * x.abs().max(1.0)).ceil().max(0.0) as usize;
        GroverAnalysis {
            theta,
            n_opt,
            marked,
            dim,
        }
    }

    pub fn p_at(&self, iterations: usize) -> f64 {
        ((iterations as f64 + 0.5) * self.theta).sin().powi(2)
    }

    /// The iteration count that actually maximizes [`Self::p_at`]:
    /// `round(π/(2θ) − ½)`, smaller on ties. Differs from `n_opt` by one
    /// whenever the fractional part of `π/(2θ)` exceeds ½.
    pub fn n_argmax(&self) -> usize {
        let x = PI / (2.0 * self.theta) - 0.5;
        let lo = x.floor().max(0.0) as usize;
        if self.p_at(lo + 1) > self.p_at(lo) {
            lo + 1
        } else {
            lo
        }
    }

    /// Smallest iteration count reaching `p ≥ 1 − p_fail_max` within the
    /// first lobe (up to `n_opt`), or `n_opt` when none does.
    pub fn iterations_to_failure_target(&self, p_fail_max: f64) -> Result<usize, GroverError> {
        if !(p_fail_max > 0.0 && p_fail_max < 1.0) {
            return Err(GroverError::FailureTarget(p_fail_max));
        }
        Ok((0..=self.n_opt)
            .find(|&k| self.p_at(k) >= 1.0 - p_fail_max)
            .unwrap_or(self.n_opt))
    }
}

/// Analysis with the optimal assignments of `problem` as the marked set.
pub fn analyze(problem: &RbaProblem) -> Result<GroverAnalysis, GroverError> {
    GroverAnalysis::new(problem.degeneracy(), problem.hamiltonian().dim())
}

/// Time to solution running `n_opt` iterations per trial.
pub fn grover_tts(problem: &RbaProblem, ga: &GroverAnalysis, epsilon: f64) -> TtsRecord {
    grover_tts_at(problem, ga, ga.n_opt, epsilon)
}

/// Time to solution running `iterations` per trial:
/// `[log ε / log(1 − p)] · 2·iterations·r / Δ_T`.
pub fn grover_tts_at(
    problem: &RbaProblem,
    ga: &GroverAnalysis,
    iterations: usize,
    epsilon: f64,
) -> TtsRecord {
    let p = ga.p_at(iterations);
    let gap = problem.hamiltonian().target_gap();
    let cost = 2.0 * iterations as f64 * problem.ratio() / gap;
    let reps = repetition_factor(p, epsilon);
    TtsRecord {
        algorithm: Algorithm::Grover,
        variant: "n-opt".into(),
        mode: None,
        n: problem.n(),
        r: problem.instance().ratio(),
        seed: problem.instance().seed(),
        steps: iterations,
        p_success: p,
        gaps: vec![gap],
        epsilon,
        repetitions: reps,
        cost_per_trial: cost,
        tts: reps * cost,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubit_single_marked() {
        let ga = GroverAnalysis::new(1, 4).unwrap();
        assert!((ga.theta - PI / 3.0).abs() < 1e-15);
        assert_eq!(ga.n_opt, 1);
        assert!((ga.p_at(1) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quarter_marked_is_one_step_for_any_n() {
        for n in 2..14 {
            let ga = GroverAnalysis::new(1 << (n - 2), 1 << n).unwrap();
            assert!((ga.theta - PI / 3.0).abs() < 1e-12);
            assert_eq!(ga.n_opt, 1);
            assert!((ga.p_at(1) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ten_qubits_single_marked() {
        let ga = GroverAnalysis::new(1, 1024).unwrap();
        assert_eq!(ga.n_opt, 25);
        assert!(ga.p_at(25) >= 0.99);
        // linear scan oracle over the first period; [0, 100] also covers
        // the second peak at 75, which is marginally higher
        let period = (PI / ga.theta).floor() as usize;
        assert_eq!(period, 50);
        let scan = (0..=period)
            .max_by(|&a, &b| ga.p_at(a).total_cmp(&ga.p_at(b)).then(b.cmp(&a)))
            .unwrap();
        assert_eq!(scan, 25);
        assert_eq!(ga.n_argmax(), 25);
    }

    #[test]
    fn failure_target_counts() {
        let ga = GroverAnalysis::from_theta(PI / 3.0, 1, 4);
        assert_eq!(ga.iterations_to_failure_target(0.2).unwrap(), 1);
        let ga = GroverAnalysis::new(1, 1024).unwrap();
        let k = ga.iterations_to_failure_target(0.2).unwrap();
        let scan = (0..=ga.n_opt).find(|&i| ga.p_at(i) >= 0.8).unwrap();
        assert_eq!(k, scan);
        assert!(ga.p_at(k - 1) < 0.8);
        assert!(ga.iterations_to_failure_target(0.0).is_err());
    }

    #[test]
    fn unreachable_target_caps_at_n_opt() {
        // θ = 0.8π: p(0) ≈ 0.905, p(1) ≈ 0.345, n_opt = 1
        let ga = GroverAnalysis::from_theta(0.8 * PI, 1, 2);
        assert!(ga.p_at(ga.n_opt) < 0.8);
        assert_eq!(ga.iterations_to_failure_target(0.01).unwrap(), ga.n_opt);
    }

    #[test]
    fn n_opt_overshoots_argmax_above_half_fraction() {
        // π/(2θ) = 2.6: the formula gives 3, the maximum sits at 2
        let ga = GroverAnalysis::from_theta(PI / 5.2, 1, 1000);
        assert_eq!(ga.n_opt, 3);
        assert_eq!(ga.n_argmax(), 2);
        assert!(ga.p_at(2) > ga.p_at(3));
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(GroverAnalysis::new(8, 8), Err(GroverError::AllMarked(8)));
        assert_eq!(GroverAnalysis::new(0, 8), Err(GroverError::NoneMarked));
    }
}
