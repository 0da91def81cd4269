//! Matrix-free Lanczos against full diagonalization on one H_w.

use std::time::Instant;

use num_rational::Ratio;
use rba::eigensolve::{dense_spectrum, lanczos_lowest, SolverConfig, SpectrumSlice};
use rba::hamiltonian::{BoundMode, ProblemHamiltonian};
use rba::instance::generate;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = generate(10, Ratio::from_integer(6), 3)?;
    let h = ProblemHamiltonian::new(&inst, BoundMode::Ideal)?;
    for w in [0.2, 0.5, 0.8, 0.99] {
        let op = h.at(w)?;
        let t = Instant::now();
        let lz = lanczos_lowest(&op, 3, &SolverConfig::new(inst.seed()).at(w))?;
        let t_lz = t.elapsed();
        let t = Instant::now();
        let dn = SpectrumSlice::from_dense(w, &dense_spectrum(&op)?)?;
        let t_dn = t.elapsed();
        println!(
            "w = {w:<4} e0 {:.12} (Δ {:.1e})  gap01 {:.6e}  deg1 {}/{}  lanczos {t_lz:.1?} dense {t_dn:.1?}",
            lz.e0,
            (lz.e0 - dn.e0).abs(),
            lz.gap01(),
            lz.deg1(),
            dn.deg1()
        );
    }
    Ok(())
}
