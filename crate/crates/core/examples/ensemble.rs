//! Small ensemble written to a directory, then summarized from its CSVs.
//!
//! cargo run --release --example ensemble -- [out_dir]

use num_rational::Ratio;
use rba::study::report::report;
use rba::study::{run_ensemble, write_dataset, EnsembleSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "ensemble-out".into());
    let spec = EnsembleSpec {
        ns: vec![5, 6, 7],
        rs: vec![Ratio::from_integer(4), Ratio::from_integer(6)],
        count: 4,
        ..EnsembleSpec::default()
    };
    let data = run_ensemble(&spec)?;
    for s in &data.skipped {
        eprintln!("skipped n = {} r = {} seed = {}: {}", s.n, s.r, s.seed, s.reason);
    }
    for path in write_dataset(&data, dir.as_ref(), true)? {
        println!("wrote {}", path.display());
    }
    println!("\n{}", report(dir.as_ref())?);
    Ok(())
}
