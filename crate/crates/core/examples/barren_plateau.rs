//! Gradient variance of the final energy over random two-reflection
//! schedules, fitted against n.
//!
//! cargo run --release --example barren_plateau -- [samples] [n_max]

use std::time::Instant;

use rba::study::barren::{barren_plateau, BarrenPlateauSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let samples: usize = args.first().map_or(Ok(200), |s| s.parse())?;
    let n_max: usize = args.get(1).map_or(Ok(9), |s| s.parse())?;
    let spec = BarrenPlateauSpec {
        ns: (5..=n_max).collect(),
        samples,
        ..BarrenPlateauSpec::default()
    };
    let t = Instant::now();
    let res = barren_plateau(&spec)?;
    for row in res.rows.iter().filter(|r| r.wi == 1) {
        println!(
            "n = {:>2} seed = {:>20}  var(dE/dw1) = {:.4e}",
            row.n, row.seed, row.variance
        );
    }
    for s in &res.skipped {
        println!("skipped n = {} seed = {}: {}", s.n, s.seed, s.reason);
    }
    for fit in &res.fits {
        println!(
            "\ndE/dw{}: rate {:.4}, residual {:.3}",
            fit.wi, fit.rate, fit.residual
        );
        for p in &fit.per_n {
            println!(
                "  n = {:>2}: median {:.4e}, std {:.4e} over {}",
                p.n, p.median, p.std_dev, p.count
            );
        }
    }
    println!("\n{:.1?}", t.elapsed());
    Ok(())
}
