//! Variance of `∂E/∂wᵢ` over random two-reflection schedules, and its
//! exponential fit in `n`.

use std::collections::BTreeMap;
use std::io::Write;

use num_rational::Ratio;
use rand::Rng;
use rayon::prelude::*;

use super::{ensemble_instances, fmt_f64, stats, Skipped, StudyError};
use crate::dynamics::{
    apply_reflections, expected_energy, final_state, reflection_subspace, RbaError, RbaProblem, ThresholdMode,
};
use crate::hamiltonian::BoundMode;
use crate::instance::SatInstance;
use crate::linalg::Subspace;
use crate::seed::{mix, rng_from};

/// Sampling intervals for `w₁` and `w₂`.
pub const W1_RANGE: (f64, f64) = (1.0 / 6.0, 0.5);
pub const W2_RANGE: (f64, f64) = (0.5, 5.0 / 6.0);

#[derive(Debug, Clone, PartialEq)]
pub struct BarrenPlateauSpec {
    pub ns: Vec<usize>,
    pub rs: Vec<Ratio<u64>>,
    pub instances: usize,
    pub samples: usize,
    /// Central-difference step.
    pub h: f64,
    /// Instance generator base seed, shared with the ensembles.
    pub base_seed: u64,
    /// Seed for the sample points.
    pub seed: u64,
    pub mode: ThresholdMode,
    pub bound: BoundMode,
}

impl Default for BarrenPlateauSpec {
    fn default() -> Self {
        BarrenPlateauSpec {
            ns: (5..=13).collect(),
            rs: vec![Ratio::from_integer(8)],
            instances: 5,
            samples: 5000,
            h: 1e-4,
            base_seed: 0,
            seed: 0,
            mode: ThresholdMode::default(),
            bound: BoundMode::Ideal,
        }
    }
}

impl BarrenPlateauSpec {
    pub fn validate(&self) -> Result<(), StudyError> {
        let mut errors = super::check_grid(&self.ns, &self.rs);
        if self.instances == 0 {
            errors.push("need at least one instance per n".into());
        }
        if self.samples < 2 {
            errors.push("need at least two samples for a variance".into());
        }
        let margin = (W1_RANGE.0).min(1.0 - W2_RANGE.1);
        if !(self.h > 0.0 && self.h < margin) {
            errors.push(format!("step h = {} must lie in (0, {margin})", self.h));
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(StudyError::Spec(errors))
        }
    }
}

/// `[f(w + h·eᵢ) − f(w − h·eᵢ)] / 2h`.
pub fn central_difference<F, E>(f: &mut F, w: &[f64], i: usize, h: f64) -> Result<f64, E>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    let mut x = w.to_vec();
    x[i] = w[i] + h;
    let plus = f(&x)?;
    x[i] = w[i] - h;
    let minus = f(&x)?;
    Ok((plus - minus) / (2.0 * h))
}

/// Fourth-order stencil `[−f(+2h) + 8f(+h) − 8f(−h) + f(−2h)] / 12h`.
pub fn five_point_difference<F, E>(f: &mut F, w: &[f64], i: usize, h: f64) -> Result<f64, E>
where
    F: FnMut(&[f64]) -> Result<f64, E>,
{
    let mut x = w.to_vec();
    let mut at = |d: f64| {
        x[i] = w[i] + d;
        f(&x)
    };
    let (p2, p1, m1, m2) = (at(2.0 * h)?, at(h)?, at(-h)?, at(-2.0 * h)?);
    Ok((-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h))
}

/// Expected normalized problem energy after the reflections at `w`.
pub fn energy(problem: &RbaProblem, w: &[f64], mode: ThresholdMode) -> Result<f64, RbaError> {
    let state = final_state(problem, w, mode)?;
    expected_energy(&state, problem)
}

/// Gradient samples `(∂E/∂w₁, ∂E/∂w₂)` at uniform points of the box.
///
/// Equal to central differences of [`energy`], with each of the six
/// eigenspaces per sample computed once.
pub fn gradient_samples(
    problem: &RbaProblem,
    samples: usize,
    h: f64,
    mode: ThresholdMode,
    seed: u64,
) -> Result<Vec<[f64; 2]>, StudyError> {
    let mut rng = rng_from(seed);
    let n = problem.n();
    let space = |w: f64, step: usize| reflection_subspace(problem, w, mode, step, false).map(|s| s.0);
    let e = |a: &Subspace, b: &Subspace| expected_energy(&apply_reflections(n, &[a, b]), problem);
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let w1 = rng.random_range(W1_RANGE.0..W1_RANGE.1);
        let w2 = rng.random_range(W2_RANGE.0..W2_RANGE.1);
        let (a_minus, a, a_plus) = (space(w1 - h, 0)?, space(w1, 0)?, space(w1 + h, 0)?);
        let (b_minus, b, b_plus) = (space(w2 - h, 1)?, space(w2, 1)?, space(w2 + h, 1)?);
        let g = [
            (e(&a_plus, &b)? - e(&a_minus, &b)?) / (2.0 * h),
            (e(&a, &b_plus)? - e(&a, &b_minus)?) / (2.0 * h),
        ];
        if !g.iter().all(|x| x.is_finite()) {
            return Err(StudyError::Malformed {
                file: format!("seed {}", problem.instance().seed()),
                reason: format!("non-finite energy gradient at ({w1}, {w2})"),
            });
        }
        out.push(g);
    }
    Ok(out)
}

/// Gradient variance of one instance for one weight index (1-based).
#[derive(Debug, Clone, PartialEq)]
pub struct BpRow {
    pub n: usize,
    pub r: Ratio<u64>,
    pub seed: u64,
    pub wi: usize,
    pub variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerN {
    pub n: usize,
    pub median: f64,
    pub std_dev: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub wi: usize,
    pub slope: f64,
    pub intercept: f64,
    /// `−slope`.
    pub rate: f64,
    pub residual: f64,
    pub per_n: Vec<PerN>,
}

/// Least-squares fit of `ln(median variance)` against `n`, pooling all
/// rows for weight index `wi`. Zero variances are left out.
pub fn fit_rows(rows: &[BpRow], wi: usize) -> Result<FitResult, StudyError> {
    let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for row in rows.iter().filter(|r| r.wi == wi) {
        if row.variance > 0.0 && row.variance.is_finite() {
            by_n.entry(row.n).or_default().push(row.variance);
        }
    }
    let per_n: Vec<PerN> = by_n
        .into_iter()
        .filter_map(|(n, v)| {
            Some(PerN {
                n,
                median: stats::median(&v)?,
                std_dev: stats::std_dev(&v)?,
                count: v.len(),
            })
        })
        .collect();
    if per_n.len() < 3 {
        return Err(StudyError::Fit(per_n.len()));
    }
    let x: Vec<f64> = per_n.iter().map(|p| p.n as f64).collect();
    let y: Vec<f64> = per_n.iter().map(|p| p.median.ln()).collect();
    let line = stats::least_squares(&x, &y).ok_or(StudyError::Fit(per_n.len()))?;
    Ok(FitResult {
        wi,
        slope: line.slope,
        intercept: line.intercept,
        rate: -line.slope,
        residual: line.residual,
        per_n,
    })
}

#[derive(Debug, Clone)]
pub struct BarrenPlateauResult {
    pub rows: Vec<BpRow>,
    /// Fits for `∂E/∂w₁` and `∂E/∂w₂`, when enough n values survive.
    pub fits: Vec<FitResult>,
    pub skipped: Vec<Skipped>,
}

impl BarrenPlateauResult {
    pub fn fit(&self, wi: usize) -> Option<&FitResult> {
        self.fits.iter().find(|f| f.wi == wi)
    }
}

fn instance_rows(inst: &SatInstance, spec: &BarrenPlateauSpec) -> Result<Vec<BpRow>, StudyError> {
    let problem = RbaProblem::new(inst, spec.bound)?;
    let grads = gradient_samples(
        &problem,
        spec.samples,
        spec.h,
        spec.mode,
        mix(&[spec.seed, inst.seed()]),
    )?;
    Ok((0..2)
        .map(|i| {
            let g: Vec<f64> = grads.iter().map(|s| s[i]).collect();
            BpRow {
                n: inst.n(),
                r: inst.ratio(),
                seed: inst.seed(),
                wi: i + 1,
                variance: stats::variance(&g).unwrap_or(0.0),
            }
        })
        .collect())
}

/// Gradient variances for every instance of the spec, and the fits.
pub fn barren_plateau(spec: &BarrenPlateauSpec) -> Result<BarrenPlateauResult, StudyError> {
    spec.validate()?;
    let instances = ensemble_instances(&spec.ns, &spec.rs, spec.instances, spec.base_seed)?;
    let outcomes: Vec<_> = instances
        .par_iter()
        .map(|inst| (inst, instance_rows(inst, spec)))
        .collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (inst, outcome) in outcomes {
        match outcome {
            Ok(r) => rows.extend(r),
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
    let mut fits = Vec::new();
    for wi in [1, 2] {
        match fit_rows(&rows, wi) {
            Ok(f) => fits.push(f),
            Err(e) => log::warn!("no fit for w{wi}: {e}"),
        }
    }
    Ok(BarrenPlateauResult { rows, fits, skipped })
}

pub const BP_HEADER: [&str; 5] = ["n", "r", "seed", "wi", "variance"];
pub const BP_FIT_HEADER: [&str; 4] = ["wi", "rate", "intercept", "residual"];

pub fn write_bp_csv(rows: &[BpRow], out: impl Write) -> Result<(), StudyError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BP_HEADER)?;
    for row in rows {
        w.write_record([
            row.n.to_string(),
            row.r.to_string(),
            row.seed.to_string(),
            row.wi.to_string(),
            fmt_f64(row.variance),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_bp_fit_csv(fits: &[FitResult], out: impl Write) -> Result<(), StudyError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BP_FIT_HEADER)?;
    for f in fits {
        w.write_record([
            f.wi.to_string(),
            fmt_f64(f.rate),
            fmt_f64(f.intercept),
            fmt_f64(f.residual),
        ])?;
    }
    w.flush()?;
    Ok(())
}
