//! One reflection schedule: success probability, gaps and time to solution.
//!
//! cargo run --release --example single_run -- [L] [below-first-excited|below-second-excited]

use rba::dynamics::{run_rba, RbaProblem, ThresholdMode};
use rba::hamiltonian::BoundMode;
use rba::instance::generate;
use rba::schedule::{equidistant, rba_tts, DEFAULT_EPSILON};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let l: usize = args.first().map_or(Ok(4), |s| s.parse())?;
    let mode: ThresholdMode = args
        .get(1)
        .map_or("below-first-excited", String::as_str)
        .parse()?;

    let inst = generate(8, num_rational::Ratio::from_integer(4), 2)?;
    let problem = RbaProblem::new(&inst, BoundMode::Ideal)?;
    let schedule = equidistant(l);
    let out = run_rba(&problem, &schedule.weights, mode)?;

    println!("{:>8} {:>12} {:>12}", "w", "gap01", "gap02");
    for s in &out.steps {
        println!(
            "{:>8.4} {:>12.4e} {:>12}",
            s.w,
            s.gap01,
            s.gap02.map_or("-".into(), |g| format!("{g:.4e}"))
        );
    }
    let rec = rba_tts(&problem, &out, DEFAULT_EPSILON, "equidistant");
    println!("\np_success = {:.6}", out.p_success);
    println!("expected energy = {:.6}", out.expected_energy);
    println!(
        "cost per trial = {:.4}, repetitions = {:.3}",
        rec.cost_per_trial, rec.repetitions
    );
    println!("tts = {:.4}", rec.tts);
    Ok(())
}
