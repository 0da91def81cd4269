//! L-sweep on one instance, optimized and equidistant.
//!
//! cargo run --release --example sweep -- [n] [r] [seed]

use std::time::Instant;

use rba::dynamics::RbaProblem;
use rba::hamiltonian::BoundMode;
use rba::instance::{generate, parse_ratio};
use rba::schedule::{sweep_l, SweepConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(8), |s| s.parse())?;
    let r = parse_ratio(args.get(1).map_or("4", String::as_str))?;
    let seed: u64 = args.get(2).map_or(Ok(1), |s| s.parse())?;

    let inst = generate(n, r, seed)?;
    let problem = RbaProblem::new(&inst, BoundMode::Ideal)?;
    println!(
        "n = {n}, r = {r}, seed = {seed}, degeneracy = {}",
        problem.degeneracy()
    );

    for optimize in [false, true] {
        let t = Instant::now();
        let cfg = SweepConfig {
            optimize,
            until_failure_below: Some(0.2),
            ..SweepConfig::default()
        };
        let res = sweep_l(&problem, &cfg)?;
        println!("\n{}", if optimize { "optimized" } else { "equidistant" });
        println!(
            "{:>3} {:>12} {:>12} {:>6}  weights",
            "L", "p_fail", "tts", "evals"
        );
        for p in &res.points {
            let w: Vec<String> = p.schedule.weights.iter().map(|w| format!("{w:.4}")).collect();
            println!(
                "{:>3} {:>12.4e} {:>12.4e} {:>6}  [{}]",
                p.l,
                p.p_fail(),
                p.record.tts,
                p.nm_evals,
                w.join(", ")
            );
        }
        println!(
            "L* = {:?}, stop = {:?}, first L with p_fail < 0.2 = {:?} ({:.1?})",
            res.best_l,
            res.stop_reason,
            res.first_below(0.2),
            t.elapsed()
        );
    }
    Ok(())
}
