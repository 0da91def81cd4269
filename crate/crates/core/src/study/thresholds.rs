//! Threshold placement: the same equidistant schedules run with the
//! threshold below `E¹` and below `E²`.

use std::collections::BTreeMap;
use std::io::Write;

use num_rational::Ratio;
use rayon::prelude::*;

use super::{ensemble_instances, fmt_f64, Skipped, StudyError};
use crate::dynamics::{run_rba, RbaProblem, ThresholdMode};
use crate::hamiltonian::BoundMode;
use crate::instance::SatInstance;
use crate::schedule::{equidistant, rba_tts, DEFAULT_EPSILON};

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSpec {
    pub ns: Vec<usize>,
    pub rs: Vec<Ratio<u64>>,
    pub count: usize,
    pub base_seed: u64,
    pub epsilon: f64,
    /// Schedules of length `1..=max_l` are compared.
    pub max_l: usize,
    pub bound: BoundMode,
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        ThresholdSpec {
            ns: (5..=10).collect(),
            rs: [4, 6, 8].map(Ratio::from_integer).to_vec(),
            count: 5,
            base_seed: 0,
            epsilon: DEFAULT_EPSILON,
            max_l: 8,
            bound: BoundMode::Ideal,
        }
    }
}

/// Both modes at one (instance, L).
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRow {
    pub n: usize,
    pub r: Ratio<u64>,
    pub seed: u64,
    pub l: usize,
    pub p_first: f64,
    pub p_second: f64,
    pub tts_first: f64,
    pub tts_second: f64,
    /// Smallest `E¹ − E⁰` over the schedule.
    pub min_gap01: f64,
    /// Smallest `E² − E⁰` over the schedule.
    pub min_gap02: f64,
}

fn instance_rows(inst: &SatInstance, spec: &ThresholdSpec) -> Result<Vec<ThresholdRow>, StudyError> {
    let problem = RbaProblem::new(inst, spec.bound)?;
    let mut rows = Vec::with_capacity(spec.max_l);
    for l in 1..=spec.max_l {
        let w = equidistant(l).weights;
        let first = run_rba(&problem, &w, ThresholdMode::BelowFirstExcited)?;
        let second = run_rba(&problem, &w, ThresholdMode::BelowSecondExcited)?;
        let label = "equidistant";
        let min = |v: &mut dyn Iterator<Item = f64>| v.fold(f64::INFINITY, f64::min);
        rows.push(ThresholdRow {
            n: inst.n(),
            r: inst.ratio(),
            seed: inst.seed(),
            l,
            p_first: first.p_success,
            p_second: second.p_success,
            tts_first: rba_tts(&problem, &first, spec.epsilon, label).tts,
            tts_second: rba_tts(&problem, &second, spec.epsilon, label).tts,
            min_gap01: min(&mut second.steps.iter().map(|s| s.gap01)),
            min_gap02: min(&mut second.steps.iter().filter_map(|s| s.gap02)),
        });
    }
    Ok(rows)
}

pub fn threshold_study(spec: &ThresholdSpec) -> Result<(Vec<ThresholdRow>, Vec<Skipped>), StudyError> {
    let mut errors = super::check_grid(&spec.ns, &spec.rs);
    if spec.max_l == 0 {
        errors.push("max L must be at least 1".into());
    }
    if !(spec.epsilon > 0.0 && spec.epsilon < 1.0) {
        errors.push(format!("epsilon = {} outside (0, 1)", spec.epsilon));
    }
    if !errors.is_empty() {
        return Err(StudyError::Spec(errors));
    }
    let instances = ensemble_instances(&spec.ns, &spec.rs, spec.count, spec.base_seed)?;
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
    Ok((rows, skipped))
}

/// Per instance, the best TTS over L under each mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSummary {
    pub instances: usize,
    /// Instances whose best TTS is lower with the threshold below `E²`.
    pub second_wins: usize,
}

pub fn summarize(rows: &[ThresholdRow]) -> ThresholdSummary {
    let mut best: BTreeMap<(usize, Ratio<u64>, u64), (f64, f64)> = BTreeMap::new();
    for row in rows {
        let e = best
            .entry((row.n, row.r, row.seed))
            .or_insert((f64::INFINITY, f64::INFINITY));
        e.0 = e.0.min(row.tts_first);
        e.1 = e.1.min(row.tts_second);
    }
    ThresholdSummary {
        instances: best.len(),
        second_wins: best.values().filter(|(a, b)| b < a).count(),
    }
}

pub const THRESHOLDS_HEADER: [&str; 10] = [
    "n",
    "r",
    "seed",
    "L",
    "p_first",
    "p_second",
    "tts_first",
    "tts_second",
    "min_gap01",
    "min_gap02",
];

pub fn write_thresholds_csv(rows: &[ThresholdRow], out: impl Write) -> Result<(), StudyError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(THRESHOLDS_HEADER)?;
    for row in rows {
        w.write_record([
            row.n.to_string(),
            row.r.to_string(),
            row.seed.to_string(),
            row.l.to_string(),
            fmt_f64(row.p_first),
            fmt_f64(row.p_second),
            fmt_f64(row.tts_first),
            fmt_f64(row.tts_second),
            fmt_f64(row.min_gap01),
            fmt_f64(row.min_gap02),
        ])?;
    }
    w.flush()?;
    Ok(())
}
