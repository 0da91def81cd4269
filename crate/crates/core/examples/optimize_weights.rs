//! Nelder–Mead over the weights of a fixed-length schedule.
//!
//! cargo run --release --example optimize_weights -- [L]

use rba::dynamics::{success_probability, RbaProblem, ThresholdMode};
use rba::hamiltonian::BoundMode;
use rba::instance::generate;
use rba::schedule::{equidistant, optimize_weights, NmConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let l: usize = std::env::args().nth(1).map_or(Ok(3), |s| s.parse())?;
    let inst = generate(8, num_rational::Ratio::from_integer(6), 11)?;
    let problem = RbaProblem::new(&inst, BoundMode::Ideal)?;
    let mode = ThresholdMode::BelowFirstExcited;

    let eq = equidistant(l);
    let p_eq = success_probability(&problem, &eq.weights, mode)?;
    let opt = optimize_weights(&problem, l, mode, &NmConfig::default())?;
    println!("equidistant {:?}: p_fail = {:.6}", eq.weights, 1.0 - p_eq);
    println!(
        "optimized   {:?}: p_fail = {:.6} after {} evaluations (converged: {})",
        opt.schedule.weights, opt.p_fail, opt.evals, opt.converged
    );
    println!("sorted      {:?}", opt.sorted().weights);
    Ok(())
}
