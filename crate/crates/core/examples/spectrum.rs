//! Lowest levels of H_w along the interpolation, as CSV.
//!
//! cargo run --release --example spectrum -- [n] [r] [seed] [points]

use rba::dynamics::RbaProblem;
use rba::eigensolve::{slice_schedule, write_slices_csv};
use rba::hamiltonian::BoundMode;
use rba::instance::{generate, parse_ratio};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(8), |s| s.parse())?;
    let r = parse_ratio(args.get(1).map_or("4", String::as_str))?;
    let seed: u64 = args.get(2).map_or(Ok(1), |s| s.parse())?;
    let points: usize = args.get(3).map_or(Ok(20), |s| s.parse())?;

    let problem = RbaProblem::new(&generate(n, r, seed)?, BoundMode::Ideal)?;
    let weights: Vec<f64> = (1..=points).map(|k| k as f64 / points as f64).collect();
    let slices = slice_schedule(problem.hamiltonian(), &weights, problem.solver())
        .map_err(|(w, e)| format!("w = {w}: {e}"))?;
    write_slices_csv(&slices, std::io::stdout().lock())?;

    let min = slices
        .iter()
        .min_by(|a, b| a.gap01().total_cmp(&b.gap01()))
        .unwrap();
    eprintln!("smallest gap01 = {:.4e} at w = {:.3}", min.gap01(), min.w);
    Ok(())
}
