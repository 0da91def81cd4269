//! Exhaustive MAX-2SAT solution and the clause-energy levels.
//!
//! cargo run --release --example brute_force -- [n] [r] [seed]

use std::collections::BTreeMap;

use rba::hamiltonian::DiagonalEnergies;
use rba::instance::{brute_force, generate, parse_ratio, BruteForceResult};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(10), |s| s.parse())?;
    let r = parse_ratio(args.get(1).map_or("6", String::as_str))?;
    let seed: u64 = args.get(2).map_or(Ok(0), |s| s.parse())?;

    let inst = generate(n, r, seed)?;
    let bf = brute_force(&inst)?;
    println!(
        "max satisfied {} of {}, {} optimal assignment(s)",
        bf.max_satisfied,
        inst.num_clauses(),
        bf.ground_degeneracy()
    );
    for &b in bf.optimal_assignments.iter().take(8) {
        println!("  {}", BruteForceResult::bitstring(b, n));
    }

    // energy 3·unsat − sat, lowest levels with their multiplicities
    let diag = DiagonalEnergies::build(&inst)?;
    let mut hist: BTreeMap<i64, usize> = BTreeMap::new();
    for &e in diag.values() {
        *hist.entry(e as i64).or_default() += 1;
    }
    println!("\nenergy  count");
    for (e, c) in hist.iter().take(6) {
        println!("{e:>6}  {c}");
    }
    Ok(())
}
