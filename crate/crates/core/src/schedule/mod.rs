//! Reflection schedules, their optimization, and time-to-solution accounting.

pub mod nelder_mead;

use std::fmt;

use num_rational::Ratio;
use rand::Rng;
use serde::Serialize;

use crate::dynamics::{run_rba, success_probability, RbaError, RbaOutcome, RbaProblem, ThresholdMode};
use crate::seed::rng_from;
use nelder_mead::{minimize, NelderMeadOptions};

/// Default confidence parameter: a solution with probability `1 − ε`.
pub const DEFAULT_EPSILON: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Equidistant,
    Optimized,
}

impl Provenance {
    pub fn label(self) -> &'static str {
        match self {
            Provenance::Equidistant => "equidistant",
            Provenance::Optimized => "optimized",
        }
    }
}

/// Weights in execution order plus where the threshold sits.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub weights: Vec<f64>,
    pub mode: ThresholdMode,
    pub provenance: Provenance,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn with_mode(mut self, mode: ThresholdMode) -> Self {
        self.mode = mode;
        self
    }

    /// Same weights in ascending order.
    pub fn sorted(&self) -> Schedule {
        let mut weights = self.weights.clone();
        weights.sort_by(f64::total_cmp);
        Schedule {
            weights,
            ..self.clone()
        }
    }
}

/// `w_k = k/(L+1)` for `k = 1..L`.
pub fn equidistant(l: usize) -> Schedule {
    Schedule {
        weights: (1..=l).map(|k| k as f64 / (l + 1) as f64).collect(),
        mode: ThresholdMode::default(),
        provenance: Provenance::Equidistant,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Rba,
    Grover,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Rba => "rba",
            Algorithm::Grover => "grover",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One time-to-solution measurement, in query units of `2r/Δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TtsRecord {
    pub algorithm: Algorithm,
    pub variant: String,
    /// Threshold placement; `None` for Grover.
    pub mode: Option<ThresholdMode>,
    pub n: usize,
    pub r: Ratio<u64>,
    pub seed: u64,
    /// Reflections `L` for RBA, iterations `n_it` for Grover.
    pub steps: usize,
    pub p_success: f64,
    pub gaps: Vec<f64>,
    pub epsilon: f64,
    pub repetitions: f64,
    pub cost_per_trial: f64,
    pub tts: f64,
}

impl TtsRecord {
    /// False for the sentinels: zero cost (nothing executed) or infinite
    /// cost (zero success probability).
    pub fn is_valid(&self) -> bool {
        self.tts.is_finite() && self.tts > 0.0
    }

    pub fn p_fail(&self) -> f64 {
        1.0 - self.p_success
    }
}

/// `log ε / log(1 − p)`, at least 1. Equal to 1 for `p ≥ 1` and infinite
/// for `p ≤ 0`.
pub fn repetition_factor(p_success: f64, epsilon: f64) -> f64 {
    if p_success >= 1.0 {
        return 1.0;
    }
    if p_success <= 0.0 {
        return f64::INFINITY;
    }
    (epsilon.ln() / (-p_success).ln_1p()).max(1.0)
}

/// `Σ_k 2r/Δ_k`.
pub fn trial_cost(gaps: &[f64], r: f64) -> f64 {
    gaps.iter().map(|g| 2.0 * r / g).sum()
}

/// RBA time to solution from the gaps of the executed reflections.
pub fn rba_tts(problem: &RbaProblem, outcome: &RbaOutcome, epsilon: f64, variant: &str) -> TtsRecord {
    let reps = repetition_factor(outcome.p_success, epsilon);
    let cost = trial_cost(&outcome.per_step_gaps, problem.ratio());
    // an empty schedule costs nothing; keep 0 rather than ∞·0
    let tts = if cost == 0.0 { 0.0 } else { reps * cost };
    TtsRecord {
        algorithm: Algorithm::Rba,
        variant: variant.to_string(),
        mode: Some(outcome.mode),
        n: problem.n(),
        r: problem.instance().ratio(),
        seed: problem.instance().seed(),
        steps: outcome.per_step_gaps.len(),
        p_success: outcome.p_success,
        gaps: outcome.per_step_gaps.clone(),
        epsilon,
        repetitions: reps,
        cost_per_trial: cost,
        tts,
    }
}

/// Nelder–Mead settings for schedule optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NmConfig {
    /// Objective evaluations allowed; `None` means `200·L`.
    pub max_evals: Option<usize>,
    /// Chooses the direction of each initial simplex edge.
    pub seed: u64,
    /// Initial edge length as a multiple of the equidistant spacing.
    pub initial_step: f64,
    pub x_tol: f64,
    pub f_tol: f64,
}

impl Default for NmConfig {
    fn default() -> Self {
        NmConfig {
            max_evals: None,
            seed: 0,
            initial_step: 0.5,
            x_tol: 1e-4,
            f_tol: 1e-8,
        }
    }
}

impl NmConfig {
    pub fn max_evals_for(&self, l: usize) -> usize {
        self.max_evals.unwrap_or(200 * l)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedSchedule {
    /// Best vertex, weights in execution order.
    pub schedule: Schedule,
    pub p_fail: f64,
    pub evals: usize,
    /// False when `max_evals` ran out before the simplex collapsed.
    pub converged: bool,
}

impl OptimizedSchedule {
    pub fn sorted(&self) -> Schedule {
        self.schedule.sorted()
    }
}

/// Penalized failure probability: `1 + (distance outside (0, 1])` for
/// infeasible weights.
fn penalty(weights: &[f64]) -> Option<f64> {
    let violation: f64 = weights
        .iter()
        .map(|&w| {
            if w <= 0.0 {
                -w + f64::EPSILON
            } else if w > 1.0 {
                w - 1.0
            } else {
                0.0
            }
        })
        .sum();
    (violation > 0.0).then(|| 1.0 + violation)
}

/// Minimizes the failure probability over `L` weights, starting from a
/// simplex that has the equidistant schedule as one vertex.
pub fn optimize_weights(
    problem: &RbaProblem,
    l: usize,
    mode: ThresholdMode,
    cfg: &NmConfig,
) -> Result<OptimizedSchedule, RbaError> {
    assert!(l >= 1, "optimization needs at least one weight");
    let x0 = equidistant(l).weights;
    let p0 = success_probability(problem, &x0, mode)?;

    let step = cfg.initial_step / (l + 1) as f64;
    let mut rng = rng_from(cfg.seed);
    let mut simplex = vec![x0.clone()];
    for i in 0..l {
        let mut v = x0.clone();
        v[i] += if rng.random::<bool>() { step } else { -step };
        simplex.push(v);
    }

    let mut first_error: Option<RbaError> = None;
    let objective = |w: &[f64]| -> f64 {
        if w == x0.as_slice() {
            return 1.0 - p0;
        }
        if let Some(p) = penalty(w) {
            return p;
        }
        match success_probability(problem, w, mode) {
            Ok(p) => 1.0 - p,
            Err(e) => {
                log::warn!("objective failed at {w:?}: {e}");
                first_error.get_or_insert(e);
                2.0
            }
        }
    };
    let opts = NelderMeadOptions {
        x_tol: cfg.x_tol,
        f_tol: cfg.f_tol,
        max_evals: cfg.max_evals_for(l),
        ..NelderMeadOptions::default()
    };
    let res = minimize(objective, simplex, &opts);
    if res.fx > 1.0 {
        if let Some(e) = first_error {
            return Err(e);
        }
    }
    if !res.converged {
        log::warn!(
            "Nelder–Mead hit {} evaluations at L = {l} (n = {}, seed = {}); keeping best vertex",
            res.evals,
            problem.n(),
            problem.instance().seed()
        );
    }
    Ok(OptimizedSchedule {
        schedule: Schedule {
            weights: res.x,
            mode,
            provenance: Provenance::Optimized,
        },
        p_fail: res.fx,
        evals: res.evals,
        converged: res.converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub mode: ThresholdMode,
    pub epsilon: f64,
    pub optimize: bool,
    /// Consecutive L values without a new minimum before stopping.
    pub patience: usize,
    pub max_l: usize,
    pub nm: NmConfig,
    /// Keep going past the TTS minimum until some L reaches a failure
    /// probability below this.
    pub until_failure_below: Option<f64>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            mode: ThresholdMode::default(),
            epsilon: DEFAULT_EPSILON,
            optimize: true,
            patience: 2,
            max_l: 64,
            nm: NmConfig::default(),
            until_failure_below: None,
        }
    }
}

/// One L of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub l: usize,
    pub schedule: Schedule,
    pub record: TtsRecord,
    /// Equidistant record at the same L, kept alongside optimized points.
    pub equidistant: Option<TtsRecord>,
    pub nm_evals: usize,
    pub converged: bool,
}

impl SweepPoint {
    pub fn p_fail(&self) -> f64 {
        self.record.p_fail()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// The TTS stopped improving for `patience` consecutive L values.
    Patience,
    /// `max_l` was reached first.
    MaxL,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    /// L with the smallest valid TTS (smaller L on ties).
    pub best_l: Option<usize>,
    pub stop_reason: StopReason,
}

impl SweepResult {
    pub fn best(&self) -> Option<&SweepPoint> {
        self.best_l.and_then(|l| self.points.iter().find(|p| p.l == l))
    }

    /// Smallest L whose failure probability is below `target`.
    pub fn first_below(&self, target: f64) -> Option<usize> {
        self.points.iter().find(|p| p.p_fail() < target).map(|p| p.l)
    }
}

/// Tracks the stopping rule over a stream of TTS values.
#[derive(Debug, Clone, Default)]
pub struct StopRule {
    patience: usize,
    best: Option<(usize, f64)>,
    since_best: usize,
}

impl StopRule {
    pub fn new(patience: usize) -> Self {
        StopRule {
            patience,
            ..Default::default()
        }
    }

    /// Feeds the TTS at `l`; returns true once `patience` consecutive
    /// values failed to beat the minimum.
    pub fn push(&mut self, l: usize, tts: f64, valid: bool) -> bool {
        let improves = valid && self.best.is_none_or(|(_, b)| tts < b);
        if improves {
            self.best = Some((l, tts));
            self.since_best = 0;
        } else {
            self.since_best += 1;
        }
        self.since_best >= self.patience
    }

    pub fn best_l(&self) -> Option<usize> {
        self.best.map(|(l, _)| l)
    }
}

/// Evaluates `L = 1, 2, …` until the TTS minimum has been passed.
pub fn sweep_l(problem: &RbaProblem, cfg: &SweepConfig) -> Result<SweepResult, RbaError> {
    let mut rule = StopRule::new(cfg.patience.max(1));
    let mut points = Vec::new();
    let mut stop_reason = StopReason::MaxL;
    for l in 1..=cfg.max_l {
        let eq = equidistant(l).with_mode(cfg.mode);
        let point = if cfg.optimize {
            let opt = optimize_weights(problem, l, cfg.mode, &cfg.nm)?;
            let outcome = run_rba(problem, &opt.schedule.weights, cfg.mode)?;
            let eq_outcome = run_rba(problem, &eq.weights, cfg.mode)?;
            SweepPoint {
                l,
                record: rba_tts(problem, &outcome, cfg.epsilon, Provenance::Optimized.label()),
                equidistant: Some(rba_tts(
                    problem,
                    &eq_outcome,
                    cfg.epsilon,
                    Provenance::Equidistant.label(),
                )),
                schedule: opt.schedule,
                nm_evals: opt.evals,
                converged: opt.converged,
            }
        } else {
            let outcome = run_rba(problem, &eq.weights, cfg.mode)?;
            SweepPoint {
                l,
                record: rba_tts(problem, &outcome, cfg.epsilon, Provenance::Equidistant.label()),
                equidistant: None,
                schedule: eq,
                nm_evals: 0,
                converged: true,
            }
        };
        log::debug!(
            "n = {} seed = {} L = {l}: p_fail = {:.3e}, tts = {:.4e}",
            problem.n(),
            problem.instance().seed(),
            point.p_fail(),
            point.record.tts
        );
        let patience_spent = rule.push(l, point.record.tts, point.record.is_valid());
        let p_fail = point.p_fail();
        points.push(point);
        let target_met = match cfg.until_failure_below {
            Some(t) => points.iter().any(|p| p.p_fail() < t) || p_fail < t,
            None => true,
        };
        if patience_spent && target_met {
            stop_reason = StopReason::Patience;
            break;
        }
    }
    Ok(SweepResult {
        points,
        best_l: rule.best_l(),
        stop_reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::BoundMode;
    use crate::instance::generate;
    use std::f64::consts::PI;

    #[test]
    fn equidistant_examples() {
        assert_eq!(equidistant(1).weights, vec![0.5]);
        assert_eq!(equidistant(3).weights, vec![0.25, 0.5, 0.75]);
        assert!(equidistant(0).is_empty());
        assert_eq!(equidistant(2).provenance, Provenance::Equidistant);
    }

    #[test]
    fn repetition_factor_conventions() {
        assert_eq!(repetition_factor(0.9, 0.1), 1.0);
        assert_eq!(repetition_factor(1.0, 0.1), 1.0);
        assert_eq!(repetition_factor(0.99, 0.1), 1.0);
        assert_eq!(repetition_factor(0.0, 0.1), f64::INFINITY);
        let f = repetition_factor(0.5, 0.1);
        assert!((f - 0.1f64.ln() / 0.5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn single_reflection_arithmetic() {
        let cost = trial_cost(&[PI], 4.0);
        assert!((repetition_factor(0.9, 0.1) * cost - 8.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn empty_schedule_is_flagged() {
        let inst = generate(5, Ratio::from_integer(2), 3).unwrap();
        let p = RbaProblem::new(&inst, BoundMode::Ideal).unwrap();
        let out = run_rba(&p, &[], ThresholdMode::BelowFirstExcited).unwrap();
        let rec = rba_tts(&p, &out, 0.1, "equidistant");
        assert_eq!(rec.tts, 0.0);
        assert_eq!(rec.steps, 0);
        assert!(!rec.is_valid());
    }

    #[test]
    fn stop_rule_semantics() {
        let mut rule = StopRule::new(2);
        let seq = [5.0, 4.0, 3.0, 3.5, 3.2, 1.0];
        let stops: Vec<bool> = seq
            .iter()
            .enumerate()
            .map(|(i, &t)| rule.push(i + 1, t, true))
            .collect();
        assert_eq!(stops, vec![false, false, false, false, true, false]);
        assert_eq!(rule.best_l(), Some(6));

        let mut rule = StopRule::new(2);
        assert!(!rule.push(1, 1.0, true));
        assert!(!rule.push(2, 2.0, true));
        assert!(rule.push(3, 3.0, true));
        assert_eq!(rule.best_l(), Some(1));
    }

    #[test]
    fn penalty_is_graded() {
        assert_eq!(penalty(&[0.2, 1.0]), None);
        assert!(penalty(&[0.0]).unwrap() > 1.0);
        assert!(penalty(&[1.5]).unwrap() < penalty(&[2.0]).unwrap());
    }

    #[test]
    fn optimizer_on_easy_instance() {
        let inst = generate(5, Ratio::from_integer(2), 7).unwrap();
        let p = RbaProblem::new(&inst, BoundMode::Ideal).unwrap();
        let mode = ThresholdMode::BelowFirstExcited;
        let eq_fail = 1.0 - success_probability(&p, &[0.5], mode).unwrap();
        let opt = optimize_weights(&p, 1, mode, &NmConfig::default()).unwrap();
        assert!(opt.p_fail <= eq_fail);
        let again = 1.0 - success_probability(&p, &opt.schedule.weights, mode).unwrap();
        assert!((again - opt.p_fail).abs() <= 1e-12);
    }
}
