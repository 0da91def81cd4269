//! Exact statevector simulation of the reflection sequence.
//!
//! Starting from the uniform superposition, each weight `w_k` contributes
//! one reflection `𝟙 − 2P_k`, where `P_k` projects onto the low-energy
//! eigenspace of `H_{w_k}` selected by the [`ThresholdMode`]. Success is the
//! weight of the final state on the optimal assignments.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use thiserror::Error;

use crate::eigensolve::{self, EigenError, SolverConfig};
use crate::hamiltonian::{BoundMode, HamiltonianError, ProblemHamiltonian};
use crate::instance::SatInstance;
use crate::linalg::{dot, norm, Subspace, SubspaceError};

#[derive(Debug, Error)]
pub enum RbaError {
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error("step {step} (w = {w}): {source}")]
    Eigen {
        step: usize,
        w: f64,
        #[source]
        source: EigenError,
    },
    #[error("step {step}: weight {w} outside [0, 1]")]
    Weight { step: usize, w: f64 },
    #[error("step {step} (w = {w}): no second excited level to place the threshold below")]
    MissingLevel { step: usize, w: f64 },
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error("dimension mismatch: state has {state}, operator has {operator}")]
    Dimension { state: usize, operator: usize },
    #[error("vector {0} is not normalized (‖v‖ = {1})")]
    NotUnit(&'static str, f64),
}

/// Tolerance on ‖v‖ − 1 for inputs that must be unit vectors.
pub const UNIT_TOL: f64 = 1e-10;

/// Real amplitudes over the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<f64>);

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<f64>) -> Result<Self, RbaError> {
        let nv = norm(&amplitudes);
        if (nv - 1.0).abs() > UNIT_TOL {
            return Err(RbaError::NotUnit("state", nv));
        }
        Ok(StateVector(amplitudes))
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.0
    }

    pub fn into_amplitudes(self) -> Vec<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    pub fn overlap(&self, other: &StateVector) -> f64 {
        dot(&self.0, &other.0)
    }

    /// CSV dump, `basis_index,amplitude`.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "basis_index,amplitude")?;
        for (b, a) in self.0.iter().enumerate() {
            writeln!(out, "{b},{}", crate::study::fmt_f64(*a))?;
        }
        Ok(())
    }
}

/// Uniform superposition over `2^n` basis states.
pub fn initial_state(n: usize) -> StateVector {
    let dim = 1usize << n;
    StateVector(vec![1.0 / (dim as f64).sqrt(); dim])
}

/// `state − 2·Σᵢ ⟨gᵢ|state⟩·gᵢ`.
pub fn reflect(state: &StateVector, subspace: &Subspace) -> Result<StateVector, RbaError> {
    if subspace.ambient_dim() != state.dim() {
        return Err(RbaError::Dimension {
            state: state.dim(),
            operator: subspace.ambient_dim(),
        });
    }
    let mut out = state.0.clone();
    subspace.reflect_in_place(&mut out);
    Ok(StateVector(out))
}

/// Where the energy threshold sits relative to the instantaneous levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub enum ThresholdMode {
    /// Between `E⁰` and `E¹`: reflect through the ground eigenspace.
    #[default]
    BelowFirstExcited,
    /// Between `E¹` and `E²`: reflect through ground and first excited eigenspaces.
    BelowSecondExcited,
}

impl ThresholdMode {
    pub fn label(self) -> &'static str {
        match self {
            ThresholdMode::BelowFirstExcited => "below-first-excited",
            ThresholdMode::BelowSecondExcited => "below-second-excited",
        }
    }
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ThresholdMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "below-first-excited" | "first" | "e1" => Ok(ThresholdMode::BelowFirstExcited),
            "below-second-excited" | "second" | "e2" => Ok(ThresholdMode::BelowSecondExcited),
            other => Err(format!(
                "unknown threshold mode {other:?} (expected below-first-excited or below-second-excited)"
            )),
        }
    }
}

/// An instance prepared for simulation: normalized operators, the optimal
/// assignments, and eigensolver settings.
#[derive(Debug, Clone)]
pub struct RbaProblem {
    instance: SatInstance,
    hamiltonian: ProblemHamiltonian,
    target: Subspace,
    solver: SolverConfig,
}

impl RbaProblem {
    pub fn new(instance: &SatInstance, bound: BoundMode) -> Result<Self, RbaError> {
        let hamiltonian = ProblemHamiltonian::new(instance, bound)?;
        let target = Subspace::BasisStates {
            dim: hamiltonian.dim(),
            states: hamiltonian.diagonal().ground_states(),
        };
        Ok(RbaProblem {
            instance: instance.clone(),
            hamiltonian,
            target,
            solver: SolverConfig::new(instance.seed()),
        })
    }

    pub fn with_solver(mut self, solver: SolverConfig) -> Self {
        self.solver = solver;
        self
    }

    pub fn instance(&self) -> &SatInstance {
        &self.instance
    }

    pub fn hamiltonian(&self) -> &ProblemHamiltonian {
        &self.hamiltonian
    }

    pub fn solver(&self) -> &SolverConfig {
        &self.solver
    }

    /// Optimal assignments as a computational-basis subspace.
    pub fn target(&self) -> &Subspace {
        &self.target
    }

    pub fn degeneracy(&self) -> usize {
        self.target.rank()
    }

    pub fn n(&self) -> usize {
        self.instance.n()
    }

    pub fn ratio(&self) -> f64 {
        self.instance.ratio_f64()
    }
}

/// Gaps available at one reflection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepGaps {
    pub w: f64,
    pub gap01: f64,
    pub gap02: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct RbaOutcome {
    pub final_state: StateVector,
    pub p_success: f64,
    /// Mode-selected gap per executed reflection, used for costing.
    pub per_step_gaps: Vec<f64>,
    pub steps: Vec<StepGaps>,
    pub expected_energy: f64,
    pub mode: ThresholdMode,
}

impl RbaOutcome {
    pub fn p_fail(&self) -> f64 {
        1.0 - self.p_success
    }
}

/// The subspace reflected through at weight `w`, with the level gaps when
/// `gaps` is set. `step` only labels errors.
pub fn reflection_subspace(
    problem: &RbaProblem,
    w: f64,
    mode: ThresholdMode,
    step: usize,
    gaps: bool,
) -> Result<(Subspace, Option<StepGaps>), RbaError> {
    if !(0.0..=1.0).contains(&w) {
        return Err(RbaError::Weight { step, w });
    }
    let h = &problem.hamiltonian;
    let cfg = &problem.solver;
    let eig = |source| RbaError::Eigen { step, w, source };
    let gaps_of = |s: &eigensolve::SpectrumSlice| StepGaps {
        w,
        gap01: s.gap01(),
        gap02: s.gap02(),
    };
    match mode {
        ThresholdMode::BelowFirstExcited => {
            let (_, ground) = eigensolve::ground_space(h, w, cfg).map_err(eig)?;
            let g = if gaps {
                Some(gaps_of(&eigensolve::slice(h, w, cfg).map_err(eig)?))
            } else {
                None
            };
            Ok((ground, g))
        }
        ThresholdMode::BelowSecondExcited => {
            let s = eigensolve::slice(h, w, cfg).map_err(eig)?;
            if s.e2.is_none() {
                return Err(RbaError::MissingLevel { step, w });
            }
            let g = gaps.then(|| gaps_of(&s));
            Ok((s.ground.union(&s.first_excited), g))
        }
    }
}

/// Applies the reflections only. With `gaps`, also records the levels at
/// each step.
fn evolve(
    problem: &RbaProblem,
    weights: &[f64],
    mode: ThresholdMode,
    gaps: bool,
) -> Result<(StateVector, Vec<StepGaps>), RbaError> {
    let mut state = initial_state(problem.n());
    let mut steps = Vec::with_capacity(if gaps { weights.len() } else { 0 });
    for (step, &w) in weights.iter().enumerate() {
        let (space, g) = reflection_subspace(problem, w, mode, step, gaps)?;
        space.reflect_in_place(&mut state.0);
        steps.extend(g);
    }
    Ok((state, steps))
}

/// Initial state reflected through `spaces` in order.
pub fn apply_reflections(n: usize, spaces: &[&Subspace]) -> StateVector {
    let mut state = initial_state(n);
    for space in spaces {
        space.reflect_in_place(&mut state.0);
    }
    state
}

/// Final state after the reflections at `weights`, without gap bookkeeping.
pub fn final_state(
    problem: &RbaProblem,
    weights: &[f64],
    mode: ThresholdMode,
) -> Result<StateVector, RbaError> {
    evolve(problem, weights, mode, false).map(|(s, _)| s)
}

/// Probability of measuring an optimal assignment after the reflections.
pub fn success_probability(
    problem: &RbaProblem,
    weights: &[f64],
    mode: ThresholdMode,
) -> Result<f64, RbaError> {
    final_state(problem, weights, mode).map(|s| problem.target.weight(&s.0))
}

pub fn run_rba(problem: &RbaProblem, weights: &[f64], mode: ThresholdMode) -> Result<RbaOutcome, RbaError> {
    let (state, steps) = evolve(problem, weights, mode, true)?;
    let per_step_gaps = steps
        .iter()
        .map(|s| match mode {
            ThresholdMode::BelowFirstExcited => s.gap01,
            ThresholdMode::BelowSecondExcited => s.gap02.expect("checked during evolution"),
        })
        .collect();
    Ok(RbaOutcome {
        p_success: problem.target.weight(&state.0),
        expected_energy: expected_energy(&state, problem)?,
        final_state: state,
        per_step_gaps,
        steps,
        mode,
    })
}

/// `⟨state|H₁|state⟩` with the normalized problem Hamiltonian.
pub fn expected_energy(state: &StateVector, problem: &RbaProblem) -> Result<f64, RbaError> {
    let h1 = problem.hamiltonian.h1_diagonal();
    if h1.len() != state.dim() {
        return Err(RbaError::Dimension {
            state: state.dim(),
            operator: h1.len(),
        });
    }
    Ok(state.0.iter().zip(h1).map(|(a, e)| a * a * e).sum())
}

/// `(δP, δR)` for one projector/reflection pair built from `k`:
/// `δP = |⟨F|k⟩⟨k|I⟩| − |⟨F|I⟩|` and `δR = |⟨F|I⟩ − 2⟨F|k⟩⟨k|I⟩| − |⟨F|I⟩|`.
pub fn overlap_deltas(initial: &[f64], fin: &[f64], k: &[f64]) -> Result<(f64, f64), RbaError> {
    for (name, v) in [("I", initial), ("F", fin), ("k", k)] {
        let nv = norm(v);
        if (nv - 1.0).abs() > UNIT_TOL {
            return Err(RbaError::NotUnit(name, nv));
        }
    }
    if fin.len() != initial.len() || k.len() != initial.len() {
        return Err(RbaError::Dimension {
            state: initial.len(),
            operator: k.len(),
        });
    }
    let fi = dot(fin, initial);
    let fk_ki = dot(fin, k) * dot(k, initial);
    Ok((fk_ki.abs() - fi.abs(), (fi - 2.0 * fk_ki).abs() - fi.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::generate;
    use num_rational::Ratio;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn initial_states() {
        let s = initial_state(1);
        assert!(s.amplitudes().iter().all(|a| (a - FRAC_1_SQRT_2).abs() < 1e-15));
        let s = initial_state(3);
        assert!(s.amplitudes().iter().all(|&a| a == 1.0 / 8f64.sqrt()));
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reflection_fixes_complement_and_negates_span() {
        let sub = Subspace::from_vectors(2, vec![vec![1.0, 0.0]]).unwrap();
        let perp = StateVector::from_amplitudes(vec![0.0, 1.0]).unwrap();
        assert_eq!(reflect(&perp, &sub).unwrap(), perp);
        let inside = StateVector::from_amplitudes(vec![1.0, 0.0]).unwrap();
        assert_eq!(reflect(&inside, &sub).unwrap().amplitudes(), &[-1.0, 0.0]);
    }

    #[test]
    fn engineered_single_reflection_reaches_target() {
        // reflecting through (Init − F)/‖Init − F‖ swaps Init and F
        let init = initial_state(1);
        let target = [1.0, 0.0];
        let mut k: Vec<f64> = init.amplitudes().iter().zip(target).map(|(a, t)| a - t).collect();
        let nk = norm(&k);
        k.iter_mut().for_each(|x| *x /= nk);
        let sub = Subspace::from_vectors(2, vec![k]).unwrap();
        let out = reflect(&init, &sub).unwrap();
        let p = out.amplitudes()[0].powi(2);
        assert!((p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_schedule_measures_uniform_overlap() {
        let inst = generate(6, Ratio::from_integer(4), 1).unwrap();
        let problem = RbaProblem::new(&inst, BoundMode::Ideal).unwrap();
        let out = run_rba(&problem, &[], ThresholdMode::BelowFirstExcited).unwrap();
        let d = crate::instance::brute_force(&inst).unwrap().ground_degeneracy();
        assert_eq!(problem.degeneracy(), d);
        assert!((out.p_success - d as f64 / 64.0).abs() < 1e-15);
        assert!(out.per_step_gaps.is_empty());
    }

    #[test]
    fn expected_energy_bounds() {
        let inst = generate(6, Ratio::from_integer(4), 2).unwrap();
        let problem = RbaProblem::new(&inst, BoundMode::Ideal).unwrap();
        let uniform = initial_state(6);
        let mean: f64 = problem.hamiltonian().h1_diagonal().iter().sum::<f64>() / 64.0;
        let e = expected_energy(&uniform, &problem).unwrap();
        assert!((e - mean).abs() < 1e-12);
        assert!((0.0..2.0 * std::f64::consts::PI).contains(&e));
        let b = problem.hamiltonian().diagonal().ground_states()[0];
        let mut amps = vec![0.0; 64];
        amps[b] = 1.0;
        let ground = StateVector::from_amplitudes(amps).unwrap();
        assert_eq!(expected_energy(&ground, &problem).unwrap(), 0.0);
    }

    #[test]
    fn overlap_deltas_examples() {
        let s = FRAC_1_SQRT_2;
        let (dp, dr) = overlap_deltas(&[1.0, 0.0], &[0.0, 1.0], &[s, s]).unwrap();
        assert!((dp - 0.5).abs() < 1e-15);
        assert!((dr - 1.0).abs() < 1e-15);
        let i = [1.0, 0.0, 0.0];
        let f = [s, s, 0.0];
        let (dp, dr) = overlap_deltas(&i, &f, &[0.0, 0.0, 1.0]).unwrap();
        assert!((dp + s).abs() < 1e-15);
        assert_eq!(dr, 0.0);
        assert!(overlap_deltas(&[1.0, 1.0], &f[..2], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn threshold_mode_parsing() {
        assert_eq!(
            "below-second-excited".parse::<ThresholdMode>().unwrap(),
            ThresholdMode::BelowSecondExcited
        );
        assert!("middle".parse::<ThresholdMode>().is_err());
        assert_eq!(ThresholdMode::default().to_string(), "below-first-excited");
    }

    #[test]
    fn out_of_range_weight_reports_step() {
        let inst = generate(5, Ratio::from_integer(2), 1).unwrap();
        let problem = RbaProblem::new(&inst, BoundMode::Ideal).unwrap();
        match run_rba(&problem, &[0.5, 1.5], ThresholdMode::BelowFirstExcited) {
            Err(RbaError::Weight { step: 1, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }
}
