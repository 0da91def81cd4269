//! Draws a random MAX-2SAT instance and shows both file formats.
//!
//! cargo run --release --example generate_instance -- [n] [r] [seed]

use rba::instance::{generate, parse_ratio, SatInstance};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(Ok(6), |s| s.parse())?;
    let r = parse_ratio(args.get(1).map_or("3/2", String::as_str))?;
    let seed: u64 = args.get(2).map_or(Ok(0), |s| s.parse())?;

    let inst = generate(n, r, seed)?;
    println!(
        "{} clauses over {} variables (r = {})",
        inst.num_clauses(),
        inst.n(),
        inst.ratio()
    );
    for c in inst.clauses() {
        println!("  {c}");
    }
    let wcnf = inst.to_wcnf();
    println!("\nWCNF:\n{wcnf}");
    let json = inst.to_json();
    println!("JSON:\n{json}");

    let back = SatInstance::from_json(&json)?;
    assert_eq!(back, inst);
    assert_eq!(SatInstance::from_wcnf(&wcnf)?.clauses(), inst.clauses());
    Ok(())
}
