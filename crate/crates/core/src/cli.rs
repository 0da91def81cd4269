//! `rba-bench`: one subcommand per experiment.
//!
//! Exit codes are 0 on success, 1 on usage errors and 2 on runtime
//! failures.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::Ratio;

use crate::dynamics::{run_rba, RbaProblem, ThresholdMode};
use crate::eigensolve::{slice_schedule, write_slices_csv};
use crate::grover;
use crate::hamiltonian::BoundMode;
use crate::instance::{brute_force, generate, parse_ratio, BruteForceResult, Format, SatInstance};
use crate::schedule::{equidistant, rba_tts, sweep_l, NmConfig, SweepConfig, TtsRecord};
use crate::study::{
    self, barren, fmt_f64, thresholds, BarrenPlateauSpec, EnsembleSpec, StudyError, ThresholdSpec,
};

pub const SEED_ENV: &str = "RBA_BENCH_SEED";

fn parse_r(s: &str) -> Result<Ratio<u64>, String> {
    parse_ratio(s)
}

fn parse_mode(s: &str) -> Result<ThresholdMode, String> {
    s.parse()
}

fn parse_bound(s: &str) -> Result<BoundMode, String> {
    match s {
        "ideal" => Ok(BoundMode::Ideal),
        "heuristic" => Ok(BoundMode::Heuristic),
        other => Err(format!("unknown bound {other:?} (expected ideal or heuristic)")),
    }
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s {
        "json" => Ok(Format::Json),
        "wcnf" => Ok(Format::Wcnf),
        other => Err(format!("unknown format {other:?} (expected json or wcnf)")),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "rba-bench",
    version,
    about = "Reflection-based adiabatic algorithm versus Grover search on random MAX-2SAT"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Selects one instance, either generated or read from a file.
#[derive(Debug, Args, Clone)]
pub struct InstanceArgs {
    /// Number of variables.
    #[arg(long)]
    pub n: Option<usize>,
    /// Clause-to-variable ratio, as an integer, fraction or decimal.
    #[arg(long, value_parser = parse_r)]
    pub r: Option<Ratio<u64>>,
    /// Generator seed.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub seed: u64,
    /// Read the instance from a .json or .wcnf file instead.
    #[arg(long, conflicts_with_all = ["n", "r"])]
    pub instance: Option<PathBuf>,
    /// Spectrum width used for rescaling: ideal (max − min) or heuristic (4·|C|).
    #[arg(long, value_parser = parse_bound, default_value = "ideal")]
    pub bound: BoundMode,
}

#[derive(Debug, Args, Clone)]
pub struct NmArgs {
    /// Objective evaluations per optimization [default: 200·L].
    #[arg(long)]
    pub nm_max_evals: Option<usize>,
    /// Seed for the initial simplex directions.
    #[arg(long, default_value_t = 0)]
    pub nm_seed: u64,
}

impl NmArgs {
    fn config(&self) -> NmConfig {
        NmConfig {
            max_evals: self.nm_max_evals,
            seed: self.nm_seed,
            ..NmConfig::default()
        }
    }
}

#[derive(Debug, Args, Clone)]
pub struct OutArgs {
    /// Output directory, created if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overwrite existing files.
    #[arg(long)]
    pub force: bool,
    /// Worker threads [default: available parallelism].
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args, Clone)]
pub struct GridArgs {
    /// Variable counts.
    #[arg(long, value_delimiter = ',', default_value = "5,6,7,8,9,10,11,12,13")]
    pub n: Vec<usize>,
    /// Clause-to-variable ratios.
    #[arg(long, value_delimiter = ',', value_parser = parse_r, default_value = "4,6,8")]
    pub r: Vec<Ratio<u64>>,
    /// Instances per (n, r) cell.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    /// Base seed from which every instance seed is derived.
    #[arg(long, env = SEED_ENV, default_value_t = 0)]
    pub base_seed: u64,
}

#[derive(Debug, Args, Clone)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Confidence parameter of the time to solution.
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Threshold placement: below-first-excited or below-second-excited.
    #[arg(long, value_parser = parse_mode, default_value = "below-first-excited")]
    pub mode: ThresholdMode,
    /// Skip the optimized sweeps.
    #[arg(long)]
    pub no_optimize: bool,
    /// Failure probability defining the iteration counts.
    #[arg(long, default_value_t = 0.2)]
    pub failure_target: f64,
    /// Non-improving L values tolerated before a sweep stops.
    #[arg(long, default_value_t = 2)]
    pub patience: usize,
    /// Largest L tried.
    #[arg(long, default_value_t = 64)]
    pub max_l: usize,
    #[command(flatten)]
    pub nm: NmArgs,
    #[arg(long, value_parser = parse_bound, default_value = "ideal")]
    pub bound: BoundMode,
    #[command(flatten)]
    pub out: OutArgs,
}

impl EnsembleArgs {
    fn spec(&self) -> EnsembleSpec {
        EnsembleSpec {
            ns: self.grid.n.clone(),
            rs: self.grid.r.clone(),
            count: self.grid.count,
            base_seed: self.grid.base_seed,
            epsilon: self.epsilon,
            mode: self.mode,
            optimize: !self.no_optimize,
            failure_target: self.failure_target,
            patience: self.patience,
            max_l: self.max_l,
            nm: self.nm.config(),
            bound: self.bound,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write random instances.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, value_parser = parse_r)]
        r: Ratio<u64>,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        seed: u64,
        /// Instances with consecutive seeds starting at --seed.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// json (keeps the seed) or wcnf (clauses only).
        #[arg(long, value_parser = parse_format, default_value = "wcnf")]
        format: Format,
        /// Directory for the files; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Brute-force optimum of one instance.
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Also write the clause energies as CSV.
        #[arg(long)]
        energies: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Run one schedule and report its success probability and cost.
    Rba {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Reflection weights in execution order.
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            conflicts_with = "equidistant"
        )]
        weights: Option<Vec<f64>>,
        /// Use the equidistant schedule with this many reflections.
        #[arg(long)]
        equidistant: Option<usize>,
        #[arg(long, value_parser = parse_mode, default_value = "below-first-excited")]
        mode: ThresholdMode,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Write the final amplitudes as CSV.
        #[arg(long)]
        state_out: Option<PathBuf>,
        /// Write the levels at each weight as CSV.
        #[arg(long)]
        slices_out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Closed-form Grover baseline for one instance.
    Grover {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.2)]
        failure_target: f64,
    },
    /// Sweep L on one instance until the time to solution stops improving.
    Sweep {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_parser = parse_mode, default_value = "below-first-excited")]
        mode: ThresholdMode,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Use equidistant schedules instead of optimizing each L.
        #[arg(long)]
        no_optimize: bool,
        #[arg(long, default_value_t = 2)]
        patience: usize,
        #[arg(long, default_value_t = 64)]
        max_l: usize,
        /// Continue past the minimum until some L has a failure probability below this.
        #[arg(long)]
        until_failure_below: Option<f64>,
        #[command(flatten)]
        nm: NmArgs,
    },
    /// Ensemble run: tts.csv, iterations.csv, ratio.csv and sweep.csv.
    Ensemble(EnsembleArgs),
    /// Gradient variance study: bp.csv and bp_fit.csv.
    Bp {
        #[arg(long, value_delimiter = ',', default_value = "5,6,7,8,9,10,11,12,13")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', value_parser = parse_r, default_value = "8")]
        r: Vec<Ratio<u64>>,
        /// Instances per n.
        #[arg(long, default_value_t = 5)]
        instances: usize,
        /// Random schedules per instance.
        #[arg(long, default_value_t = 5000)]
        samples: usize,
        /// Central-difference step.
        #[arg(long, default_value_t = 1e-4)]
        h: f64,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        base_seed: u64,
        /// Seed for the sample points.
        #[arg(long, default_value_t = 0)]
        sample_seed: u64,
        #[arg(long, value_parser = parse_mode, default_value = "below-first-excited")]
        mode: ThresholdMode,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Equidistant over optimized time to solution per L: ratio.csv.
    Ratio(EnsembleArgs),
    /// Threshold below E1 versus below E2 on equidistant schedules: thresholds.csv.
    Thresholds {
        #[arg(long, value_delimiter = ',', default_value = "5,6,7,8,9,10")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', value_parser = parse_r, default_value = "4,6,8")]
        r: Vec<Ratio<u64>>,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long, env = SEED_ENV, default_value_t = 0)]
        base_seed: u64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// Schedules of length 1..=max-l are compared.
        #[arg(long, default_value_t = 8)]
        max_l: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Summarize the CSVs of a dataset directory.
    Report { dir: PathBuf },
}

#[derive(Debug)]
pub enum CliError {
    Usage(Vec<String>),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(errors) => {
                for e in errors {
                    writeln!(f, "error: {e}")?;
                }
                Ok(())
            }
            CliError::Runtime(e) => writeln!(f, "error: {e}"),
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn check_epsilon(name: &str, v: f64, errors: &mut Vec<String>) {
    if !(v > 0.0 && v < 1.0) {
        errors.push(format!("--{name} = {v} must lie in (0, 1)"));
    }
}

fn check_instance(args: &InstanceArgs, errors: &mut Vec<String>) {
    if args.instance.is_some() {
        return;
    }
    match (args.n, args.r) {
        (Some(n), Some(r)) => check_cell(n, r, errors),
        _ => errors.push("give --n and --r, or --instance FILE".into()),
    }
}

fn check_cell(n: usize, r: Ratio<u64>, errors: &mut Vec<String>) {
    errors.extend(study::check_grid(&[n], &[r]));
}

fn check_workers(out: &OutArgs, errors: &mut Vec<String>) {
    if out.workers == Some(0) {
        errors.push("--workers must be at least 1".into());
    }
}

fn check_ensemble(a: &EnsembleArgs, errors: &mut Vec<String>) {
    errors.extend(study::check_grid(&a.grid.n, &a.grid.r));
    if a.grid.count == 0 {
        errors.push("--count must be at least 1".into());
    }
    check_epsilon("epsilon", a.epsilon, errors);
    check_epsilon("failure-target", a.failure_target, errors);
    if a.max_l == 0 {
        errors.push("--max-l must be at least 1".into());
    }
    if a.out.out.is_none() {
        errors.push("--out DIR is required".into());
    }
    check_workers(&a.out, errors);
}

/// Range checks that clap cannot express. Returns every problem found.
pub fn validate_config(cmd: &Command) -> Result<(), Vec<String>> {
    let mut errors = Vec::new();
    match cmd {
        Command::Gen { n, r, count, .. } => {
            check_cell(*n, *r, &mut errors);
            if *count == 0 {
                errors.push("--count must be at least 1".into());
            }
        }
        Command::Solve { instance, .. } => check_instance(instance, &mut errors),
        Command::Rba {
            instance,
            weights,
            equidistant,
            epsilon,
            ..
        } => {
            check_instance(instance, &mut errors);
            check_epsilon("epsilon", *epsilon, &mut errors);
            match (weights, equidistant) {
                (None, None) => errors.push("give --weights or --equidistant L".into()),
                (Some(w), _) => {
                    for (k, x) in w.iter().enumerate() {
                        if !(0.0..=1.0).contains(x) {
                            errors.push(format!("weight {} = {x} outside [0, 1]", k + 1));
                        }
                    }
                }
                _ => {}
            }
        }
        Command::Grover {
            instance,
            epsilon,
            failure_target,
        } => {
            check_instance(instance, &mut errors);
            check_epsilon("epsilon", *epsilon, &mut errors);
            check_epsilon("failure-target", *failure_target, &mut errors);
        }
        Command::Sweep {
            instance,
            epsilon,
            max_l,
            until_failure_below,
            ..
        } => {
            check_instance(instance, &mut errors);
            check_epsilon("epsilon", *epsilon, &mut errors);
            if *max_l == 0 {
                errors.push("--max-l must be at least 1".into());
            }
            if let Some(t) = until_failure_below {
                check_epsilon("until-failure-below", *t, &mut errors);
            }
        }
        Command::Ensemble(a) | Command::Ratio(a) => check_ensemble(a, &mut errors),
        Command::Bp {
            n,
            r,
            instances,
            samples,
            h,
            out,
            ..
        } => {
            let spec = BarrenPlateauSpec {
                ns: n.clone(),
                rs: r.clone(),
                instances: *instances,
                samples: *samples,
                h: *h,
                ..BarrenPlateauSpec::default()
            };
            if let Err(StudyError::Spec(e)) = spec.validate() {
                errors.extend(e);
            }
            if out.out.is_none() {
                errors.push("--out DIR is required".into());
            }
            check_workers(out, &mut errors);
        }
        Command::Thresholds {
            n,
            r,
            count,
            epsilon,
            max_l,
            out,
            ..
        } => {
            errors.extend(study::check_grid(n, r));
            if *count == 0 {
                errors.push("--count must be at least 1".into());
            }
            if *max_l == 0 {
                errors.push("--max-l must be at least 1".into());
            }
            check_epsilon("epsilon", *epsilon, &mut errors);
            if out.out.is_none() {
                errors.push("--out DIR is required".into());
            }
            check_workers(out, &mut errors);
        }
        Command::Report { .. } => {}
    }
    if errors.is_empty() {
        Ok(())
    } else {
        Err(errors)
    }
}

fn load_instance(args: &InstanceArgs) -> Result<SatInstance, CliError> {
    match &args.instance {
        Some(path) => SatInstance::load(path).map_err(|e| runtime(format!("{}: {e}", path.display()))),
        None => generate(args.n.unwrap(), args.r.unwrap(), args.seed).map_err(runtime),
    }
}

fn problem(args: &InstanceArgs) -> Result<RbaProblem, CliError> {
    let inst = load_instance(args)?;
    RbaProblem::new(&inst, args.bound).map_err(runtime)
}

fn with_pool<T>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError>
where
    T: Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        builder = builder.num_threads(w);
    }
    let pool = builder.build().map_err(runtime)?;
    Ok(pool.install(f))
}

fn write_file(
    path: &Path,
    force: bool,
    f: impl FnOnce(fs::File) -> Result<(), StudyError>,
) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(runtime)?;
    }
    let file = study::create_output(path, force).map_err(runtime)?;
    f(file).map_err(runtime)
}

fn record_lines(rec: &TtsRecord, out: &mut String) {
    let gaps: Vec<String> = rec.gaps.iter().map(|g| fmt_f64(*g)).collect();
    writeln!(out, "steps = {}", rec.steps).unwrap();
    writeln!(out, "p_success = {}", fmt_f64(rec.p_success)).unwrap();
    writeln!(out, "gaps = [{}]", gaps.join(", ")).unwrap();
    writeln!(out, "epsilon = {}", rec.epsilon).unwrap();
    writeln!(out, "repetitions = {}", fmt_f64(rec.repetitions)).unwrap();
    writeln!(out, "cost_per_trial = {}", fmt_f64(rec.cost_per_trial)).unwrap();
    writeln!(out, "tts = {}", fmt_f64(rec.tts)).unwrap();
    if !rec.is_valid() {
        writeln!(out, "tts_valid = false").unwrap();
    }
}

fn header_lines(p: &RbaProblem, out: &mut String) {
    let inst = p.instance();
    writeln!(out, "n = {}", inst.n()).unwrap();
    writeln!(out, "r = {}", inst.ratio()).unwrap();
    writeln!(out, "seed = {}", inst.seed()).unwrap();
    writeln!(out, "clauses = {}", inst.num_clauses()).unwrap();
    writeln!(out, "degeneracy = {}", p.degeneracy()).unwrap();
}

fn file_stem(n: usize, r: Ratio<u64>, seed: u64) -> String {
    format!("n{n}_r{}_s{seed}", r.to_string().replace('/', "o"))
}

/// Runs one parsed command, returning what goes to stdout.
pub fn execute(cmd: &Command) -> Result<String, CliError> {
    validate_config(cmd).map_err(CliError::Usage)?;
    let mut out = String::new();
    match cmd {
        Command::Gen {
            n,
            r,
            seed,
            count,
            format,
            out: dir,
            force,
        } => {
            for i in 0..*count as u64 {
                let s = seed.wrapping_add(i);
                let inst = generate(*n, *r, s).map_err(runtime)?;
                let text = match format {
                    Format::Json => inst.to_json(),
                    Format::Wcnf => inst.to_wcnf(),
                };
                match dir {
                    Some(dir) => {
                        let path = dir.join(format!("{}.{}", file_stem(*n, *r, s), format.extension()));
                        write_file(&path, *force, |mut f| Ok(f.write_all(text.as_bytes())?))?;
                        writeln!(out, "{}", path.display()).unwrap();
                    }
                    None => out.push_str(&text),
                }
            }
        }
        Command::Solve {
            instance,
            energies,
            force,
        } => {
            let inst = load_instance(instance)?;
            let bf = brute_force(&inst).map_err(runtime)?;
            writeln!(out, "n = {}", inst.n()).unwrap();
            writeln!(out, "r = {}", inst.ratio()).unwrap();
            writeln!(out, "seed = {}", inst.seed()).unwrap();
            writeln!(out, "clauses = {}", inst.num_clauses()).unwrap();
            writeln!(out, "max_satisfied = {}", bf.max_satisfied).unwrap();
            writeln!(out, "degeneracy = {}", bf.ground_degeneracy()).unwrap();
            for b in &bf.optimal_assignments {
                writeln!(out, "optimum {}", BruteForceResult::bitstring(*b, inst.n())).unwrap();
            }
            if let Some(path) = energies {
                let diag = crate::hamiltonian::DiagonalEnergies::build(&inst).map_err(runtime)?;
                write_file(path, *force, |f| Ok(diag.write_csv(f)?))?;
            }
        }
        Command::Rba {
            instance,
            weights,
            equidistant: eq,
            mode,
            epsilon,
            state_out,
            slices_out,
            force,
        } => {
            let p = problem(instance)?;
            let (w, variant) = match (weights, eq) {
                (Some(w), _) => (w.clone(), "given"),
                (None, Some(l)) => (equidistant(*l).weights, "equidistant"),
                (None, None) => unreachable!("rejected by validate_config"),
            };
            let outcome = run_rba(&p, &w, *mode).map_err(runtime)?;
            let rec = rba_tts(&p, &outcome, *epsilon, variant);
            header_lines(&p, &mut out);
            writeln!(out, "mode = {mode}").unwrap();
            let ws: Vec<String> = w.iter().map(|x| x.to_string()).collect();
            writeln!(out, "weights = [{}]", ws.join(", ")).unwrap();
            writeln!(out, "expected_energy = {}", fmt_f64(outcome.expected_energy)).unwrap();
            record_lines(&rec, &mut out);
            if let Some(path) = state_out {
                write_file(path, *force, |f| Ok(outcome.final_state.write_csv(f)?))?;
            }
            if let Some(path) = slices_out {
                let interior: Vec<f64> = w.iter().copied().filter(|&x| x > 0.0).collect();
                let slices = slice_schedule(p.hamiltonian(), &interior, p.solver())
                    .map_err(|(w, e)| runtime(format!("w = {w}: {e}")))?;
                write_file(path, *force, |f| Ok(write_slices_csv(&slices, f)?))?;
            }
        }
        Command::Grover {
            instance,
            epsilon,
            failure_target,
        } => {
            let p = problem(instance)?;
            let ga = grover::analyze(&p).map_err(runtime)?;
            let rec = grover::grover_tts(&p, &ga, *epsilon);
            header_lines(&p, &mut out);
            writeln!(out, "theta = {}", fmt_f64(ga.theta)).unwrap();
            writeln!(out, "n_opt = {}", ga.n_opt).unwrap();
            writeln!(out, "n_argmax = {}", ga.n_argmax()).unwrap();
            writeln!(
                out,
                "iterations_to_failure_target = {}",
                ga.iterations_to_failure_target(*failure_target)
                    .map_err(runtime)?
            )
            .unwrap();
            record_lines(&rec, &mut out);
        }
        Command::Sweep {
            instance,
            mode,
            epsilon,
            no_optimize,
            patience,
            max_l,
            until_failure_below,
            nm,
        } => {
            let p = problem(instance)?;
            let cfg = SweepConfig {
                mode: *mode,
                epsilon: *epsilon,
                optimize: !no_optimize,
                patience: *patience,
                max_l: *max_l,
                nm: nm.config(),
                until_failure_below: *until_failure_below,
            };
            let res = sweep_l(&p, &cfg).map_err(runtime)?;
            header_lines(&p, &mut out);
            writeln!(out, "L,p_success,tts,nm_evals,converged,weights").unwrap();
            for pt in &res.points {
                let ws: Vec<String> = pt.schedule.weights.iter().map(|x| fmt_f64(*x)).collect();
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    pt.l,
                    fmt_f64(pt.record.p_success),
                    fmt_f64(pt.record.tts),
                    pt.nm_evals,
                    pt.converged,
                    ws.join(";")
                )
                .unwrap();
            }
            match res.best() {
                Some(b) => writeln!(out, "best_L = {}\nbest_tts = {}", b.l, fmt_f64(b.record.tts)).unwrap(),
                None => writeln!(out, "best_L = none").unwrap(),
            }
            writeln!(out, "stop = {:?}", res.stop_reason).unwrap();
        }
        Command::Ensemble(a) => {
            let spec = a.spec();
            let dir = a.out.out.as_ref().unwrap();
            let data = with_pool(a.out.workers, || study::run_ensemble(&spec))?.map_err(runtime)?;
            let paths = study::write_dataset(&data, dir, a.out.force).map_err(runtime)?;
            for p in paths {
                writeln!(out, "{}", p.display()).unwrap();
            }
            for s in &data.skipped {
                writeln!(
                    out,
                    "skipped n = {} r = {} seed = {}: {}",
                    s.n, s.r, s.seed, s.reason
                )
                .unwrap();
            }
        }
        Command::Ratio(a) => {
            let mut spec = a.spec();
            spec.optimize = true;
            let dir = a.out.out.as_ref().unwrap();
            let data = with_pool(a.out.workers, || study::run_ensemble(&spec))?.map_err(runtime)?;
            let rows = study::optimization_ratios(&data);
            let path = dir.join("ratio.csv");
            write_file(&path, a.out.force, |f| study::write_ratio_csv(&rows, f))?;
            writeln!(out, "{}", path.display()).unwrap();
            let (medians, rho) = study::ratio_trend(&rows);
            for (l, m) in medians {
                writeln!(out, "L = {l}: median ratio {}", fmt_f64(m)).unwrap();
            }
            match rho {
                Some(rho) => writeln!(out, "spearman = {}", fmt_f64(rho)).unwrap(),
                None => writeln!(out, "spearman = undefined").unwrap(),
            }
        }
        Command::Bp {
            n,
            r,
            instances,
            samples,
            h,
            base_seed,
            sample_seed,
            mode,
            out: o,
        } => {
            let spec = BarrenPlateauSpec {
                ns: n.clone(),
                rs: r.clone(),
                instances: *instances,
                samples: *samples,
                h: *h,
                base_seed: *base_seed,
                seed: *sample_seed,
                mode: *mode,
                bound: BoundMode::Ideal,
            };
            let dir = o.out.as_ref().unwrap();
            let targets = [dir.join("bp.csv"), dir.join("bp_fit.csv")];
            if !o.force {
                if let Some(p) = targets.iter().find(|p| p.exists()) {
                    return Err(runtime(StudyError::Exists { path: p.clone() }));
                }
            }
            let res = with_pool(o.workers, || barren::barren_plateau(&spec))?.map_err(runtime)?;
            write_file(&targets[0], true, |f| barren::write_bp_csv(&res.rows, f))?;
            write_file(&targets[1], true, |f| barren::write_bp_fit_csv(&res.fits, f))?;
            for fit in &res.fits {
                writeln!(out, "w{}: rate = {}", fit.wi, fmt_f64(fit.rate)).unwrap();
            }
            for s in &res.skipped {
                writeln!(
                    out,
                    "skipped n = {} r = {} seed = {}: {}",
                    s.n, s.r, s.seed, s.reason
                )
                .unwrap();
            }
        }
        Command::Thresholds {
            n,
            r,
            count,
            base_seed,
            epsilon,
            max_l,
            out: o,
        } => {
            let spec = ThresholdSpec {
                ns: n.clone(),
                rs: r.clone(),
                count: *count,
                base_seed: *base_seed,
                epsilon: *epsilon,
                max_l: *max_l,
                bound: BoundMode::Ideal,
            };
            let path = o.out.as_ref().unwrap().join("thresholds.csv");
            if path.exists() && !o.force {
                return Err(runtime(StudyError::Exists { path }));
            }
            let (rows, skipped) = with_pool(o.workers, || study::threshold_study(&spec))?.map_err(runtime)?;
            write_file(&path, true, |f| thresholds::write_thresholds_csv(&rows, f))?;
            let s = thresholds::summarize(&rows);
            writeln!(out, "{}", path.display()).unwrap();
            writeln!(
                out,
                "below-second-excited wins on {} of {} instances",
                s.second_wins, s.instances
            )
            .unwrap();
            for s in &skipped {
                writeln!(
                    out,
                    "skipped n = {} r = {} seed = {}: {}",
                    s.n, s.r, s.seed, s.reason
                )
                .unwrap();
            }
        }
        Command::Report { dir } => {
            out = study::report(dir).map_err(runtime)?;
        }
    }
    Ok(out)
}

/// Parses `args` and runs the command, writing to the given streams.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok(text) => {
            let _ = stdout.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let _ = write!(stderr, "{e}");
            e.exit_code()
        }
    }
}

/// Entry point for the binary.
pub fn main_from_env() -> i32 {
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr().lock();
    run(std::env::args_os(), &mut stdout, &mut stderr)
}
