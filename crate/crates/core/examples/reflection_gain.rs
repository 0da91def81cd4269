//! Overlap gained by one projection versus one reflection, on random
//! unit vectors.

use rand::Rng;
use rba::dynamics::overlap_deltas;
use rba::seed::rng_from;

fn unit(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = rng_from(0);
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for _ in 0..10_000 {
        let dim = rng.random_range(2..=16);
        let (i, f, k) = (unit(&mut rng, dim), unit(&mut rng, dim), unit(&mut rng, dim));
        let (dp, dr) = overlap_deltas(&i, &f, &k)?;
        if dp >= 0.0 {
            count += 1;
            worst = worst.min(dr - 2.0 * dp);
        }
    }
    println!("{count} triples with δP ≥ 0; min(δR − 2δP) = {worst:.3e}");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    println!(
        "45° case: {:?}",
        overlap_deltas(&[1.0, 0.0], &[0.0, 1.0], &[s, s])?
    );
    Ok(())
}
