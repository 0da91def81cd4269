mod common;

use std::f64::consts::PI;

use common::{pauli_energy, random_instance, random_nonconstant, rng};
use rba::eigensolve::dense::to_matrix;
use rba::eigensolve::dense_spectrum;
use rba::hamiltonian::{BoundMode, DiagonalEnergies, ProblemHamiltonian, SPECTRUM_GUARD};
use rba::instance::brute_force;

#[test]
fn diagonal_matches_clause_counts_and_spin_form() {
    let mut rng = rng(101);
    for _ in 0..40 {
        let inst = random_instance(&mut rng, 2..=9);
        let diag = DiagonalEnergies::build(&inst).unwrap();
        for b in 0..inst.dim() {
            let sat = inst.num_satisfied(b as u64) as i64;
            let unsat = inst.num_clauses() as i64 - sat;
            assert_eq!(diag.values()[b], (3 * unsat - sat) as f64);
            assert_eq!(diag.values()[b], pauli_energy(&inst, b) as f64);
        }
    }
}

#[test]
fn ground_states_match_brute_force() {
    let mut rng = rng(102);
    for _ in 0..20 {
        let inst = random_instance(&mut rng, 2..=10);
        let diag = DiagonalEnergies::build(&inst).unwrap();
        let bf = brute_force(&inst).unwrap();
        let states: Vec<usize> = diag.ground_states();
        assert_eq!(states.len(), bf.ground_degeneracy());
        for b in states {
            assert_eq!(inst.num_satisfied(b as u64), bf.max_satisfied);
        }
    }
}

/// H_w entry by entry from the definitions.
fn reference_matrix(h: &ProblemHamiltonian, w: f64) -> Vec<Vec<f64>> {
    let n = h.n();
    let dim = h.dim();
    let raw = h.diagonal();
    let (lo, hi) = (raw.min(), raw.max());
    let g = 2.0 * PI * SPECTRUM_GUARD;
    let mut m = vec![vec![0.0; dim]; dim];
    for b in 0..dim {
        m[b][b] = (1.0 - w) * g * 0.5 + w * g * (raw.values()[b] - lo) / (hi - lo);
        for k in 0..n {
            m[b][b ^ (1 << k)] = -(1.0 - w) * g / (2.0 * n as f64);
        }
    }
    m
}

#[test]
fn matrix_free_action_matches_reference_matrix() {
    let mut rng = rng(103);
    for i in 0..15 {
        let inst = random_instance(&mut rng, 2..=7);
        let Ok(h) = ProblemHamiltonian::new(&inst, BoundMode::Ideal) else {
            continue;
        };
        let w = i as f64 / 14.0;
        let got = to_matrix(&h.at(w).unwrap());
        let want = reference_matrix(&h, w);
        for (a, row) in want.iter().enumerate() {
            for (b, x) in row.iter().enumerate() {
                assert!((got[(a, b)] - x).abs() < 1e-13, "w = {w} entry ({a}, {b})");
                assert_eq!(got[(a, b)], got[(b, a)]);
            }
        }
    }
}

#[test]
fn mixer_spectrum_has_binomial_multiplicities() {
    let mut rng = rng(104);
    for n in 2..=8 {
        let inst = random_nonconstant(&mut rng, n..=n);
        let h = ProblemHamiltonian::new(&inst, BoundMode::Ideal).unwrap();
        let spec = dense_spectrum(&h.at(0.0).unwrap()).unwrap();
        let mut start = 0;
        for m in 0..=n {
            let mult = binomial(n, m);
            let level = 2.0 * PI * SPECTRUM_GUARD * m as f64 / n as f64;
            assert!((h.h0_level(m) - level).abs() < 1e-14);
            for e in &spec.values[start..start + mult] {
                assert!((e - level).abs() < 1e-10, "n = {n} m = {m}: {e} vs {level}");
            }
            start += mult;
        }
    }
}

#[test]
fn problem_spectrum_is_sorted_normalized_diagonal() {
    let mut rng = rng(105);
    let inst = random_nonconstant(&mut rng, 6..=6);
    let h = ProblemHamiltonian::new(&inst, BoundMode::Ideal).unwrap();
    let spec = dense_spectrum(&h.at(1.0).unwrap()).unwrap();
    let mut want = h.h1_diagonal().to_vec();
    want.sort_by(f64::total_cmp);
    assert_eq!(spec.values, want);
    assert_eq!(want[0], 0.0);
    assert!(*want.last().unwrap() < 2.0 * PI);
}

#[test]
fn dense_reconstruction() {
    let mut rng = rng(106);
    let inst = random_nonconstant(&mut rng, 5..=5);
    let h = ProblemHamiltonian::new(&inst, BoundMode::Ideal).unwrap();
    let op = h.at(0.37).unwrap();
    let m = to_matrix(&op);
    let spec = dense_spectrum(&op).unwrap();
    let dim = h.dim();
    for a in 0..dim {
        for b in 0..dim {
            let x: f64 = (0..dim)
                .map(|i| spec.vectors[i][a] * spec.values[i] * spec.vectors[i][b])
                .sum();
            assert!((x - m[(a, b)]).abs() < 1e-9);
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}
