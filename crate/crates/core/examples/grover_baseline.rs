//! Closed-form Grover baseline, and the same numbers from reflections
//! with alternating weights 1, 0.

use rba::dynamics::{run_rba, RbaProblem, ThresholdMode};
use rba::grover::{analyze, grover_tts};
use rba::hamiltonian::BoundMode;
use rba::instance::generate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = generate(9, num_rational::Ratio::from_integer(6), 4)?;
    let problem = RbaProblem::new(&inst, BoundMode::Ideal)?;
    let ga = analyze(&problem)?;
    println!(
        "d = {}, θ = {:.6}, n_opt = {}, argmax = {}, iterations to p ≥ 0.8 = {}",
        ga.marked,
        ga.theta,
        ga.n_opt,
        ga.n_argmax(),
        ga.iterations_to_failure_target(0.2)?
    );
    let rec = grover_tts(&problem, &ga, 0.1);
    println!(
        "tts = {:.4} (p = {:.6}, Δ_T = {:.6})\n",
        rec.tts, rec.p_success, rec.gaps[0]
    );

    println!("{:>4} {:>12} {:>12}", "k", "closed form", "reflections");
    for k in 0..=ga.n_opt {
        let w: Vec<f64> = (0..2 * k).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect();
        let sim = run_rba(&problem, &w, ThresholdMode::BelowFirstExcited)?.p_success;
        println!("{k:>4} {:>12.9} {:>12.9}", ga.p_at(k), sim);
    }
    Ok(())
}
