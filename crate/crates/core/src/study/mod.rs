//! Experiment harness: ensembles of instances, the Grover comparison,
//! iteration medians, optimization ratios, threshold placement and the
//! gradient-variance study.
//!
//! Work is spread over the current rayon pool one instance at a time and
//! always collected back in `(n, r, index)` order, so every CSV is a pure
//! function of the spec.

pub mod barren;
pub mod report;
pub mod stats;
pub mod thresholds;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::{RbaError, RbaProblem, ThresholdMode};
use crate::grover::{self, GroverError};
use crate::hamiltonian::BoundMode;
use crate::instance::{clause_count, clause_pool_size, generate, InstanceError, SatInstance};
use crate::schedule::{sweep_l, Algorithm, NmConfig, SweepConfig, SweepResult, TtsRecord, DEFAULT_EPSILON};
use crate::seed::mix;

pub use barren::{barren_plateau, BarrenPlateauSpec, FitResult};
pub use report::report;
pub use thresholds::{threshold_study, ThresholdRow, ThresholdSpec};

/// Floats in every CSV: 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Error)]
pub enum StudyError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Rba(#[from] RbaError),
    #[error(transparent)]
    Grover(#[from] GroverError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("invalid spec: {}", .0.join("; "))]
    Spec(Vec<String>),
    #[error("fit needs at least 3 distinct n with positive variance, got {0}")]
    Fit(usize),
    #[error("missing dataset files in {dir}: {}", .files.join(", "))]
    MissingFiles { dir: PathBuf, files: Vec<String> },
    #[error("{file}: {reason}")]
    Malformed { file: String, reason: String },
    #[error("{path} exists; pass --force to overwrite")]
    Exists { path: PathBuf },
}

/// `(n, r, index) → generator seed` for ensemble members.
pub fn instance_seed(base: u64, n: usize, r: Ratio<u64>, index: usize) -> u64 {
    mix(&[base, n as u64, *r.numer(), *r.denom(), index as u64])
}

/// Number of distinct instances drawn in a cell: one when `r·n` uses the
/// whole clause pool, `count` otherwise.
pub fn cell_size(n: usize, r: Ratio<u64>, count: usize) -> usize {
    match clause_count(n, r) {
        Some(m) if m == clause_pool_size(n) => 1,
        _ => count,
    }
}

/// Checks that every `(n, r)` pair gives a valid instance.
pub fn check_grid(ns: &[usize], rs: &[Ratio<u64>]) -> Vec<String> {
    let mut errors = Vec::new();
    if ns.is_empty() {
        errors.push("no n values".into());
    }
    if rs.is_empty() {
        errors.push("no r values".into());
    }
    for &n in ns {
        if n < 2 {
            errors.push(format!("n = {n}: need n ≥ 2"));
            continue;
        }
        if n > crate::hamiltonian::MAX_VARS {
            errors.push(format!(
                "n = {n}: statevector limited to n ≤ {}",
                crate::hamiltonian::MAX_VARS
            ));
        }
        for &r in rs {
            match clause_count(n, r) {
                None => errors.push(format!("n = {n}, r = {r}: r·n is not an integer")),
                Some(m) if m > clause_pool_size(n) => errors.push(format!(
                    "n = {n}, r = {r}: {m} clauses exceed the pool of {}",
                    clause_pool_size(n)
                )),
                Some(_) => {}
            }
        }
    }
    errors
}

/// Generates the members of every cell in `(n, r, index)` order.
pub fn ensemble_instances(
    ns: &[usize],
    rs: &[Ratio<u64>],
    count: usize,
    base_seed: u64,
) -> Result<Vec<SatInstance>, InstanceError> {
    let mut out = Vec::new();
    for &n in ns {
        for &r in rs {
            for i in 0..cell_size(n, r, count) {
                out.push(generate(n, r, instance_seed(base_seed, n, r, i))?);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    pub ns: Vec<usize>,
    pub rs: Vec<Ratio<u64>>,
    pub count: usize,
    pub base_seed: u64,
    pub epsilon: f64,
    pub mode: ThresholdMode,
    /// Run the optimized sweep as well as the equidistant one.
    pub optimize: bool,
    /// Failure probability defining the iteration counts.
    pub failure_target: f64,
    pub patience: usize,
    pub max_l: usize,
    pub nm: NmConfig,
    pub bound: BoundMode,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        EnsembleSpec {
            ns: (5..=13).collect(),
            rs: [4, 6, 8].map(Ratio::from_integer).to_vec(),
            count: 20,
            base_seed: 0,
            epsilon: DEFAULT_EPSILON,
            mode: ThresholdMode::default(),
            optimize: true,
            failure_target: 0.2,
            patience: 2,
            max_l: 64,
            nm: NmConfig::default(),
            bound: BoundMode::Ideal,
        }
    }
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<(), StudyError> {
        let mut errors = check_grid(&self.ns, &self.rs);
        if self.count == 0 {
            errors.push("count must be at least 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            errors.push(format!("epsilon = {} outside (0, 1)", self.epsilon));
        }
        if !(self.failure_target > 0.0 && self.failure_target < 1.0) {
            errors.push(format!("failure target {} outside (0, 1)", self.failure_target));
        }
        if self.max_l == 0 {
            errors.push("max L must be at least 1".into());
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(StudyError::Spec(errors))
        }
    }

    pub fn instances(&self) -> Result<Vec<SatInstance>, InstanceError> {
        ensemble_instances(&self.ns, &self.rs, self.count, self.base_seed)
    }

    fn sweep(&self, optimize: bool, seed: u64) -> SweepConfig {
        SweepConfig {
            mode: self.mode,
            epsilon: self.epsilon,
            optimize,
            patience: self.patience,
            max_l: self.max_l,
            nm: NmConfig {
                seed: mix(&[self.nm.seed, seed]),
                ..self.nm
            },
            until_failure_below: None,
        }
    }
}

/// Everything measured on one instance.
#[derive(Debug, Clone)]
pub struct InstanceResult {
    pub n: usize,
    pub r: Ratio<u64>,
    pub seed: u64,
    pub degeneracy: usize,
    pub grover: TtsRecord,
    /// Grover iterations to reach the failure target.
    pub grover_iterations: usize,
    pub optimized: Option<SweepResult>,
    pub equidistant: SweepResult,
    /// Smallest L reaching the failure target in the primary sweep.
    pub rba_iterations: Option<usize>,
}

impl InstanceResult {
    /// The optimized sweep when present, else the equidistant one.
    pub fn primary(&self) -> &SweepResult {
        self.optimized.as_ref().unwrap_or(&self.equidistant)
    }

    /// `TTS_Grover / TTS_RBA` at the primary sweep's L*.
    pub fn advantage(&self) -> Option<f64> {
        let rba = self.primary().best()?;
        (rba.record.is_valid() && self.grover.is_valid()).then(|| self.grover.tts / rba.record.tts)
    }
}

pub fn run_instance(inst: &SatInstance, spec: &EnsembleSpec) -> Result<InstanceResult, StudyError> {
    let problem = RbaProblem::new(inst, spec.bound)?;
    let ga = grover::analyze(&problem)?;
    let grover = grover::grover_tts(&problem, &ga, spec.epsilon);
    let grover_iterations = ga.iterations_to_failure_target(spec.failure_target)?;

    let target = Some(spec.failure_target);
    let mut eq_cfg = spec.sweep(false, inst.seed());
    if !spec.optimize {
        eq_cfg.until_failure_below = target;
    }
    let equidistant = sweep_l(&problem, &eq_cfg)?;
    let optimized = if spec.optimize {
        let cfg = SweepConfig {
            until_failure_below: target,
            ..spec.sweep(true, inst.seed())
        };
        Some(sweep_l(&problem, &cfg)?)
    } else {
        None
    };
    let primary = optimized.as_ref().unwrap_or(&equidistant);
    let rba_iterations = primary.first_below(spec.failure_target);
    if rba_iterations.is_none() {
        log::warn!(
            "n = {} r = {} seed = {}: failure target {} not reached by L = {}",
            inst.n(),
            inst.ratio(),
            inst.seed(),
            spec.failure_target,
            spec.max_l
        );
    }
    Ok(InstanceResult {
        n: inst.n(),
        r: inst.ratio(),
        seed: inst.seed(),
        degeneracy: problem.degeneracy(),
        grover,
        grover_iterations,
        optimized,
        equidistant,
        rba_iterations,
    })
}

/// An instance that could not be simulated.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub n: usize,
    pub r: Ratio<u64>,
    pub seed: u64,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub spec: EnsembleSpec,
    pub results: Vec<InstanceResult>,
    pub skipped: Vec<Skipped>,
}

/// Runs every instance of the spec on the current rayon pool. Failures
/// are logged and recorded in [`Dataset::skipped`].
pub fn run_ensemble(spec: &EnsembleSpec) -> Result<Dataset, StudyError> {
    spec.validate()?;
    let instances = spec.instances()?;
    let outcomes: Vec<_> = instances
        .par_iter()
        .map(|inst| (inst, run_instance(inst, spec)))
        .collect();
    let mut results = Vec::new();
    let mut skipped = Vec::new();
    for (inst, outcome) in outcomes {
        match outcome {
            Ok(r) => results.push(r),
            Err(e) => {
                log::warn!(
                    "skipping n = {} r = {} seed = {}: {e}",
                    inst.n(),
                    inst.ratio(),
                    inst.seed()
                );
                skipped.push(Skipped {
                    n: inst.n(),
                    r: inst.ratio(),
                    seed: inst.seed(),
                    reason: e.to_string(),
                });
            }
        }
    }
    Ok(Dataset {
        spec: spec.clone(),
        results,
        skipped,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationMedian {
    pub algorithm: Algorithm,
    pub n: usize,
    pub r: Ratio<u64>,
    pub median: f64,
    pub count: usize,
}

/// Median iterations to the failure target per `(n, r)`, Grover and RBA.
pub fn iteration_medians(data: &Dataset) -> Vec<IterationMedian> {
    let mut cells: BTreeMap<(usize, Ratio<u64>), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for res in &data.results {
        let cell = cells.entry((res.n, res.r)).or_default();
        cell.0.push(res.grover_iterations as f64);
        if let Some(l) = res.rba_iterations {
            cell.1.push(l as f64);
        }
    }
    let mut out = Vec::new();
    for ((n, r), (grover, rba)) in cells {
        for (algorithm, values) in [(Algorithm::Rba, rba), (Algorithm::Grover, grover)] {
            match stats::median(&values) {
                Some(median) => out.push(IterationMedian {
                    algorithm,
                    n,
                    r,
                    median,
                    count: values.len(),
                }),
                None => log::warn!("no {algorithm} iteration counts for n = {n}, r = {r}"),
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub n: usize,
    pub r: Ratio<u64>,
    pub seed: u64,
    pub l: usize,
    /// `TTS_equidistant / TTS_optimized` at the same L.
    pub ratio: f64,
}

pub fn optimization_ratios(data: &Dataset) -> Vec<RatioRow> {
    let mut rows = Vec::new();
    for res in &data.results {
        let Some(opt) = &res.optimized else { continue };
        for p in &opt.points {
            let Some(eq) = &p.equidistant else { continue };
            if eq.is_valid() && p.record.is_valid() {
                rows.push(RatioRow {
                    n: res.n,
                    r: res.r,
                    seed: res.seed,
                    l: p.l,
                    ratio: eq.tts / p.record.tts,
                });
            }
        }
    }
    rows
}

/// Median ratio per L, and the Spearman correlation between L and it.
pub fn ratio_trend(rows: &[RatioRow]) -> (Vec<(usize, f64)>, Option<f64>) {
    let mut by_l: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for row in rows {
        by_l.entry(row.l).or_default().push(row.ratio);
    }
    let medians: Vec<(usize, f64)> = by_l
        .into_iter()
        .filter_map(|(l, v)| stats::median(&v).map(|m| (l, m)))
        .collect();
    let ls: Vec<f64> = medians.iter().map(|m| m.0 as f64).collect();
    let ms: Vec<f64> = medians.iter().map(|m| m.1).collect();
    let rho = stats::spearman(&ls, &ms);
    (medians, rho)
}

/// Median `TTS_Grover / TTS_RBA` per `(n, r)` with the cell size.
pub fn advantage_medians(data: &Dataset) -> Vec<(usize, Ratio<u64>, f64, usize)> {
    let mut cells: BTreeMap<(usize, Ratio<u64>), Vec<f64>> = BTreeMap::new();
    for res in &data.results {
        if let Some(a) = res.advantage() {
            cells.entry((res.n, res.r)).or_default().push(a);
        }
    }
    cells
        .into_iter()
        .filter_map(|((n, r), v)| stats::median(&v).map(|m| (n, r, m, v.len())))
        .collect()
}

pub const TTS_HEADER: [&str; 9] = [
    "algorithm",
    "variant",
    "mode",
    "n",
    "r",
    "seed",
    "L_or_nit",
    "p_success",
    "tts",
];
pub const ITERATIONS_HEADER: [&str; 4] = ["algorithm", "n", "r", "median_iterations"];
pub const RATIO_HEADER: [&str; 5] = ["n", "r", "seed", "L", "tts_ratio"];
pub const SWEEP_HEADER: [&str; 12] = [
    "n",
    "r",
    "seed",
    "variant",
    "mode",
    "L",
    "p_success",
    "tts",
    "nm_evals",
    "converged",
    "weights",
    "sorted_weights",
];

fn tts_row(rec: &TtsRecord) -> Vec<String> {
    vec![
        rec.algorithm.label().into(),
        rec.variant.clone(),
        rec.mode.map(|m| m.label().to_string()).unwrap_or_default(),
        rec.n.to_string(),
        rec.r.to_string(),
        rec.seed.to_string(),
        rec.steps.to_string(),
        fmt_f64(rec.p_success),
        fmt_f64(rec.tts),
    ]
}

fn join_weights(w: &[f64]) -> String {
    w.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(";")
}

/// One row per (instance, algorithm, variant); RBA rows at each sweep's L*.
pub fn write_tts_csv(data: &Dataset, out: impl Write) -> Result<(), StudyError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TTS_HEADER)?;
    for res in &data.results {
        w.write_record(tts_row(&res.grover))?;
        for sweep in [res.optimized.as_ref(), Some(&res.equidistant)]
            .into_iter()
            .flatten()
        {
            if let Some(best) = sweep.best() {
                w.write_record(tts_row(&best.record))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Every L of every sweep.
pub fn write_sweep_csv(data: &Dataset, out: impl Write) -> Result<(), StudyError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for res in &data.results {
        for sweep in [res.optimized.as_ref(), Some(&res.equidistant)]
            .into_iter()
            .flatten()
        {
            for p in &sweep.points {
                w.write_record([
                    res.n.to_string(),
                    res.r.to_string(),
                    res.seed.to_string(),
                    p.record.variant.clone(),
                    p.schedule.mode.label().to_string(),
                    p.l.to_string(),
                    fmt_f64(p.record.p_success),
                    fmt_f64(p.record.tts),
                    p.nm_evals.to_string(),
                    p.converged.to_string(),
                    join_weights(&p.schedule.weights),
                    join_weights(&p.schedule.sorted().weights),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_iterations_csv(rows: &[IterationMedian], out: impl Write) -> Result<(), StudyError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ITERATIONS_HEADER)?;
    for row in rows {
        w.write_record([
            row.algorithm.label().to_string(),
            row.n.to_string(),
            row.r.to_string(),
            fmt_f64(row.median),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_ratio_csv(rows: &[RatioRow], out: impl Write) -> Result<(), StudyError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RATIO_HEADER)?;
    for row in rows {
        w.write_record([
            row.n.to_string(),
            row.r.to_string(),
            row.seed.to_string(),
            row.l.to_string(),
            fmt_f64(row.ratio),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Creates `path` for writing unless it exists and `force` is off.
pub fn create_output(path: &Path, force: bool) -> Result<fs::File, StudyError> {
    if path.exists() && !force {
        return Err(StudyError::Exists {
            path: path.to_path_buf(),
        });
    }
    Ok(fs::File::create(path)?)
}

pub const ENSEMBLE_FILES: [&str; 4] = ["tts.csv", "iterations.csv", "ratio.csv", "sweep.csv"];

/// Writes the ensemble CSVs into `dir`, creating it if needed. Checks all
/// targets before writing any.
pub fn write_dataset(data: &Dataset, dir: &Path, force: bool) -> Result<Vec<PathBuf>, StudyError> {
    fs::create_dir_all(dir)?;
    let paths: Vec<PathBuf> = ENSEMBLE_FILES.iter().map(|f| dir.join(f)).collect();
    if !force {
        if let Some(p) = paths.iter().find(|p| p.exists()) {
            return Err(StudyError::Exists { path: p.clone() });
        }
    }
    write_tts_csv(data, create_output(&paths[0], true)?)?;
    write_iterations_csv(&iteration_medians(data), create_output(&paths[1], true)?)?;
    write_ratio_csv(&optimization_ratios(data), create_output(&paths[2], true)?)?;
    write_sweep_csv(data, create_output(&paths[3], true)?)?;
    Ok(paths)
}
